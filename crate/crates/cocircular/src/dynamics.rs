//! Validation of solved configurations against the full equations of
//! motion: right-hand sides, fixed-step RK4 integration with drift
//! diagnostics, and deviation from the analytic rigidly rotating orbit.
//!
//! Curved states are never projected back to the hyperboloid; constraint
//! drift is measured and reported because it is itself a correctness signal.

use std::io::Write;

use crate::config::{CircularConfig, MassVector};
use crate::curved::{minkowski, CurvedPolygonConfig, HyperboloidPoint};
use crate::error::{Error, Result};
use crate::kernel::InteractionKernel;

/// Bodies closer than this are treated as collided.
const MIN_SEPARATION: f64 = 1e-9;
/// Pair products this close to -1 on the hyperboloid are collisions.
const CURVED_SINGULARITY_GUARD: f64 = 1e-14;
/// Constraint and tangency tolerance for curved state construction.
const CURVED_STATE_TOL: f64 = 1e-8;

/// Planar phase-space state.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarState {
    pub positions: Vec<[f64; 2]>,
    pub velocities: Vec<[f64; 2]>,
    pub masses: MassVector,
}

impl PlanarState {
    pub fn new(
        positions: Vec<[f64; 2]>,
        velocities: Vec<[f64; 2]>,
        masses: MassVector,
    ) -> Result<Self> {
        if positions.len() != masses.n() || velocities.len() != masses.n() {
            return Err(Error::DimensionMismatch {
                reason: format!(
                    "{} positions / {} velocities for {} masses",
                    positions.len(),
                    velocities.len(),
                    masses.n()
                ),
            });
        }
        if positions
            .iter()
            .chain(velocities.iter())
            .any(|v| !v[0].is_finite() || !v[1].is_finite())
        {
            return Err(Error::InvalidAngles {
                reason: "non-finite state entries".to_string(),
            });
        }
        Ok(PlanarState {
            positions,
            velocities,
            masses,
        })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Center of mass of the circle bodies (no central body in planar states).
    pub fn center_of_mass(&self) -> [f64; 2] {
        let total = self.masses.circle_total();
        let mut com = [0.0, 0.0];
        for (i, q) in self.positions.iter().enumerate() {
            com[0] += self.masses.get(i) * q[0];
            com[1] += self.masses.get(i) * q[1];
        }
        [com[0] / total, com[1] / total]
    }

    pub fn center_of_mass_velocity(&self) -> [f64; 2] {
        let total = self.masses.circle_total();
        let mut v = [0.0, 0.0];
        for (i, q) in self.velocities.iter().enumerate() {
            v[0] += self.masses.get(i) * q[0];
            v[1] += self.masses.get(i) * q[1];
        }
        [v[0] / total, v[1] / total]
    }
}

/// State on the hyperboloid sheet with tangent velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvedState {
    pub positions: Vec<HyperboloidPoint>,
    pub velocities: Vec<[f64; 3]>,
    pub masses: MassVector,
}

impl CurvedState {
    pub fn new(
        positions: Vec<HyperboloidPoint>,
        velocities: Vec<[f64; 3]>,
        masses: MassVector,
    ) -> Result<Self> {
        if positions.len() != masses.n() || velocities.len() != masses.n() {
            return Err(Error::DimensionMismatch {
                reason: format!(
                    "{} positions / {} velocities for {} masses",
                    positions.len(),
                    velocities.len(),
                    masses.n()
                ),
            });
        }
        for (i, (p, v)) in positions.iter().zip(&velocities).enumerate() {
            if p.constraint_residual() > CURVED_STATE_TOL {
                return Err(Error::OffHyperboloid {
                    value: minkowski(p, p),
                });
            }
            let tangency = p.x1 * v[0] + p.x2 * v[1] - p.x3 * v[2];
            if tangency.abs() > CURVED_STATE_TOL {
                return Err(Error::NotTangent {
                    index: i,
                    value: tangency,
                });
            }
        }
        Ok(CurvedState {
            positions,
            velocities,
            masses,
        })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Largest `|p.p + 1|` over the bodies.
    pub fn max_constraint_drift(&self) -> f64 {
        self.positions
            .iter()
            .fold(0.0, |acc, p| acc.max(p.constraint_residual()))
    }

    /// Largest `|p.v|` over the bodies.
    pub fn max_tangency_drift(&self) -> f64 {
        self.positions
            .iter()
            .zip(&self.velocities)
            .fold(0.0, |acc, (p, v)| {
                acc.max((p.x1 * v[0] + p.x2 * v[1] - p.x3 * v[2]).abs())
            })
    }
}

/// Accelerations of the planar equations of motion,
/// `q_i'' = sum_j m_j (q_j - q_i) f(|q_j - q_i|)`.
pub fn planar_rhs(state: &PlanarState, kernel: &InteractionKernel) -> Result<Vec<[f64; 2]>> {
    let n = state.n();
    let mut acc = vec![[0.0, 0.0]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = state.positions[j][0] - state.positions[i][0];
            let dy = state.positions[j][1] - state.positions[i][1];
            let dist = (dx * dx + dy * dy).sqrt();
            if dist < MIN_SEPARATION {
                return Err(Error::CoincidentBodies {
                    i,
                    j,
                    separation: dist,
                });
            }
            let f = kernel.eval_f(dist)?;
            acc[i][0] += state.masses.get(j) * dx * f;
            acc[i][1] += state.masses.get(j) * dy * f;
            acc[j][0] -= state.masses.get(i) * dx * f;
            acc[j][1] -= state.masses.get(i) * dy * f;
        }
    }
    Ok(acc)
}

/// Accelerations of the curved equations of motion on the sheet,
/// including the velocity-dependent constraint term.
pub fn curved_rhs(state: &CurvedState) -> Result<Vec<[f64; 3]>> {
    let n = state.n();
    let mut acc = vec![[0.0; 3]; n];
    for i in 0..n {
        let pi = &state.positions[i];
        let v = &state.velocities[i];
        let speed2 = v[0] * v[0] + v[1] * v[1] - v[2] * v[2];
        acc[i][0] += speed2 * pi.x1;
        acc[i][1] += speed2 * pi.x2;
        acc[i][2] += speed2 * pi.x3;
        for j in 0..n {
            if j == i {
                continue;
            }
            let pj = &state.positions[j];
            let w = minkowski(pi, pj);
            let gap = w * w - 1.0;
            if (w + 1.0).abs() < CURVED_SINGULARITY_GUARD || gap <= 0.0 {
                return Err(Error::CoincidentBodies {
                    i,
                    j,
                    separation: (w + 1.0).abs(),
                });
            }
            let denom = gap.powf(1.5);
            let m = state.masses.get(j);
            acc[i][0] += m * (pj.x1 + w * pi.x1) / denom;
            acc[i][1] += m * (pj.x2 + w * pi.x2) / denom;
            acc[i][2] += m * (pj.x3 + w * pi.x3) / denom;
        }
    }
    Ok(acc)
}

/// Time-sampled planar trajectory with center-of-mass drift per sample.
#[derive(Debug, Clone)]
pub struct PlanarTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PlanarState>,
    pub com_drift: Vec<f64>,
    /// Set when a collision truncated the integration.
    pub truncated_at: Option<f64>,
}

/// Time-sampled curved trajectory with constraint and tangency drift.
#[derive(Debug, Clone)]
pub struct CurvedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CurvedState>,
    pub constraint_drift: Vec<f64>,
    pub tangency_drift: Vec<f64>,
    pub truncated_at: Option<f64>,
}

fn check_steps(t_max: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() || t_max < 0.0 || !t_max.is_finite() {
        return Err(Error::InvalidIntegration {
            reason: format!("t_max = {t_max}, dt = {dt}"),
        });
    }
    Ok((t_max / dt).round().max(0.0) as usize)
}

fn rk4_step<F>(y: &[f64], dt: f64, f: &F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let k1 = f(y)?;
    let mut y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
    let k2 = f(&y2)?;
    y2 = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
    let k3 = f(&y2)?;
    y2 = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
    let k4 = f(&y2)?;
    Ok(y
        .iter()
        .enumerate()
        .map(|(idx, a)| {
            a + dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx])
        })
        .collect())
}

fn planar_pack(state: &PlanarState) -> Vec<f64> {
    let mut y = Vec::with_capacity(4 * state.n());
    for q in &state.positions {
        y.extend_from_slice(q);
    }
    for v in &state.velocities {
        y.extend_from_slice(v);
    }
    y
}

fn planar_unpack(y: &[f64], masses: &MassVector) -> PlanarState {
    let n = masses.n();
    let positions = (0..n).map(|i| [y[2 * i], y[2 * i + 1]]).collect();
    let velocities = (0..n)
        .map(|i| [y[2 * n + 2 * i], y[2 * n + 2 * i + 1]])
        .collect();
    PlanarState {
        positions,
        velocities,
        masses: masses.clone(),
    }
}

/// Fixed-step RK4 integration of the planar problem, recording every step.
pub fn integrate_planar(
    initial: &PlanarState,
    kernel: &InteractionKernel,
    t_max: f64,
    dt: f64,
) -> Result<PlanarTrajectory> {
    let steps = check_steps(t_max, dt)?;
    let masses = initial.masses.clone();
    let com0 = initial.center_of_mass();
    let vcom0 = initial.center_of_mass_velocity();

    let deriv = |y: &[f64]| -> Result<Vec<f64>> {
        let state = planar_unpack(y, &masses);
        let acc = planar_rhs(&state, kernel)?;
        let n = state.n();
        let mut dy = Vec::with_capacity(4 * n);
        for i in 0..n {
            dy.push(y[2 * n + 2 * i]);
            dy.push(y[2 * n + 2 * i + 1]);
        }
        for a in acc {
            dy.extend_from_slice(&a);
        }
        Ok(dy)
    };

    let mut traj = PlanarTrajectory {
        times: vec![0.0],
        states: vec![initial.clone()],
        com_drift: vec![0.0],
        truncated_at: None,
    };
    let mut y = planar_pack(initial);
    for step in 0..steps {
        let t_next = (step + 1) as f64 * dt;
        match rk4_step(&y, dt, &deriv) {
            Ok(next) if next.iter().all(|v| v.is_finite()) => y = next,
            _ => {
                traj.truncated_at = Some(step as f64 * dt);
                return Ok(traj);
            }
        }
        let state = planar_unpack(&y, &masses);
        let com = state.center_of_mass();
        let expected = [com0[0] + t_next * vcom0[0], com0[1] + t_next * vcom0[1]];
        let drift =
            ((com[0] - expected[0]).powi(2) + (com[1] - expected[1]).powi(2)).sqrt();
        traj.times.push(t_next);
        traj.com_drift.push(drift);
        traj.states.push(state);
    }
    Ok(traj)
}

fn curved_pack(state: &CurvedState) -> Vec<f64> {
    let mut y = Vec::with_capacity(6 * state.n());
    for p in &state.positions {
        y.extend_from_slice(&[p.x1, p.x2, p.x3]);
    }
    for v in &state.velocities {
        y.extend_from_slice(v);
    }
    y
}

fn curved_unpack(y: &[f64], masses: &MassVector) -> CurvedState {
    let n = masses.n();
    let positions = (0..n)
        .map(|i| HyperboloidPoint::from_xyz_unchecked(y[3 * i], y[3 * i + 1], y[3 * i + 2]))
        .collect();
    let velocities = (0..n)
        .map(|i| [y[3 * n + 3 * i], y[3 * n + 3 * i + 1], y[3 * n + 3 * i + 2]])
        .collect();
    CurvedState {
        positions,
        velocities,
        masses: masses.clone(),
    }
}

/// Fixed-step RK4 integration on the hyperboloid, without projection.
pub fn integrate_curved(initial: &CurvedState, t_max: f64, dt: f64) -> Result<CurvedTrajectory> {
    let steps = check_steps(t_max, dt)?;
    let masses = initial.masses.clone();

    let deriv = |y: &[f64]| -> Result<Vec<f64>> {
        let state = curved_unpack(y, &masses);
        let acc = curved_rhs(&state)?;
        let n = state.n();
        let mut dy = Vec::with_capacity(6 * n);
        dy.extend_from_slice(&y[3 * n..6 * n]);
        for a in acc {
            dy.extend_from_slice(&a);
        }
        Ok(dy)
    };

    let mut traj = CurvedTrajectory {
        times: vec![0.0],
        states: vec![initial.clone()],
        constraint_drift: vec![initial.max_constraint_drift()],
        tangency_drift: vec![initial.max_tangency_drift()],
        truncated_at: None,
    };
    let mut y = curved_pack(initial);
    for step in 0..steps {
        let t_next = (step + 1) as f64 * dt;
        match rk4_step(&y, dt, &deriv) {
            Ok(next) if next.iter().all(|v| v.is_finite()) => y = next,
            _ => {
                traj.truncated_at = Some(step as f64 * dt);
                return Ok(traj);
            }
        }
        let state = curved_unpack(&y, &masses);
        traj.times.push(t_next);
        traj.constraint_drift.push(state.max_constraint_drift());
        traj.tangency_drift.push(state.max_tangency_drift());
        traj.states.push(state);
    }
    Ok(traj)
}

/// Initial phase-space state of the rigid rotation through `config`.
/// Central-mass configurations must use `central_mass_equilibrium_state`,
/// which includes the central body in the system.
pub fn relative_equilibrium_state(config: &CircularConfig, spin: f64) -> Result<PlanarState> {
    if config.masses().central().is_some() {
        return Err(Error::CentralMassUnexpected);
    }
    let n = config.n();
    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    for i in 0..n {
        let q = config.cartesian(i)?;
        positions.push(q);
        velocities.push([-spin * q[1], spin * q[0]]);
    }
    PlanarState::new(positions, velocities, config.masses().clone())
}

/// Full-system initial state for a central-mass configuration: the circle
/// bodies in rigid rotation plus the central body at rest at the origin,
/// flattened into an (N+1)-body planar state with the central body last.
pub fn central_mass_equilibrium_state(config: &CircularConfig, spin: f64) -> Result<PlanarState> {
    let central = config
        .masses()
        .central()
        .ok_or(Error::CentralMassMissing)?;
    let n = config.n();
    let mut positions = Vec::with_capacity(n + 1);
    let mut velocities = Vec::with_capacity(n + 1);
    for i in 0..n {
        let q = config.cartesian(i)?;
        positions.push(q);
        velocities.push([-spin * q[1], spin * q[0]]);
    }
    positions.push([0.0, 0.0]);
    velocities.push([0.0, 0.0]);
    let mut flat: Vec<f64> = config.masses().circle_masses().to_vec();
    flat.push(central);
    PlanarState::new(positions, velocities, MassVector::new(flat)?)
}

/// Worst distance of one body from the origin over a trajectory.
pub fn origin_deviation(traj: &PlanarTrajectory, body: usize) -> f64 {
    traj.states.iter().fold(0.0, |acc, s| {
        let q = s.positions[body];
        acc.max((q[0] * q[0] + q[1] * q[1]).sqrt())
    })
}

/// Initial curved state of the rigid rotation through `config`.
pub fn curved_equilibrium_state(config: &CurvedPolygonConfig) -> Result<CurvedState> {
    let n = config.n();
    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    for i in 0..n {
        positions.push(config.position_at(i, 0.0)?);
        velocities.push(config.velocity_at(i, 0.0)?);
    }
    CurvedState::new(positions, velocities, config.masses().clone())
}

/// Rigid-rotation validation summary for a planar configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarOrbitCheck {
    /// Max distance over time and bodies to the analytic orbit.
    pub max_deviation: f64,
    pub max_com_drift: f64,
    pub truncated_at: Option<f64>,
}

/// Worst distance, over samples and bodies, between a trajectory and the
/// analytic rigid rotation through `config`.
pub fn planar_rotation_deviation(
    traj: &PlanarTrajectory,
    config: &CircularConfig,
    spin: f64,
) -> Result<f64> {
    let mut max_dev = 0.0f64;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let (sin, cos) = (spin * t).sin_cos();
        for i in 0..config.n() {
            let q0 = config.cartesian(i)?;
            let qa = [cos * q0[0] - sin * q0[1], sin * q0[0] + cos * q0[1]];
            let d = ((state.positions[i][0] - qa[0]).powi(2)
                + (state.positions[i][1] - qa[1]).powi(2))
            .sqrt();
            max_dev = max_dev.max(d);
        }
    }
    Ok(max_dev)
}

/// Integrate one or more periods from the relative-equilibrium initial
/// condition and measure the worst deviation from the analytic orbit.
pub fn orbit_residual_planar(
    kernel: &InteractionKernel,
    config: &CircularConfig,
    spin: f64,
    periods: f64,
    dt: f64,
) -> Result<PlanarOrbitCheck> {
    let initial = relative_equilibrium_state(config, spin)?;
    let t_max = periods * std::f64::consts::TAU / spin;
    let traj = integrate_planar(&initial, kernel, t_max, dt)?;
    Ok(PlanarOrbitCheck {
        max_deviation: planar_rotation_deviation(&traj, config, spin)?,
        max_com_drift: traj.com_drift.iter().cloned().fold(0.0, f64::max),
        truncated_at: traj.truncated_at,
    })
}

/// Rigid-rotation validation summary for a curved configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvedOrbitCheck {
    pub max_deviation: f64,
    pub max_constraint_drift: f64,
    pub max_tangency_drift: f64,
    /// Worst drift of the (conserved) heights from their initial values.
    pub max_height_drift: f64,
    pub truncated_at: Option<f64>,
}

/// Worst distance and height drift of a curved trajectory against the
/// analytic rigid rotation through `config`.
pub fn curved_rotation_deviation(
    traj: &CurvedTrajectory,
    config: &CurvedPolygonConfig,
) -> Result<(f64, f64)> {
    let mut max_dev = 0.0f64;
    let mut max_z = 0.0f64;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for i in 0..config.n() {
            let pa = config.position_at(i, *t)?;
            let p = &state.positions[i];
            let d = ((p.x1 - pa.x1).powi(2) + (p.x2 - pa.x2).powi(2) + (p.x3 - pa.x3).powi(2))
                .sqrt();
            max_dev = max_dev.max(d);
            max_z = max_z.max((p.x3 - config.z()).abs());
        }
    }
    Ok((max_dev, max_z))
}

pub fn orbit_residual_curved(
    config: &CurvedPolygonConfig,
    periods: f64,
    dt: f64,
) -> Result<CurvedOrbitCheck> {
    let initial = curved_equilibrium_state(config)?;
    let t_max = periods * std::f64::consts::TAU / config.spin();
    let traj = integrate_curved(&initial, t_max, dt)?;
    let (max_dev, max_z) = curved_rotation_deviation(&traj, config)?;
    Ok(CurvedOrbitCheck {
        max_deviation: max_dev,
        max_constraint_drift: traj.constraint_drift.iter().cloned().fold(0.0, f64::max),
        max_tangency_drift: traj.tangency_drift.iter().cloned().fold(0.0, f64::max),
        max_height_drift: max_z,
        truncated_at: traj.truncated_at,
    })
}

fn write_float(out: &mut impl Write, v: f64) -> std::io::Result<()> {
    // 17 significant digits: enough to reproduce the double exactly.
    write!(out, "{v:.16e}")
}

/// CSV export, one row per sample:
/// `t,x_1,y_1,vx_1,vy_1,...` with 17 significant digits.
pub fn write_planar_csv(traj: &PlanarTrajectory, out: &mut impl Write) -> std::io::Result<()> {
    let n = traj.states.first().map_or(0, |s| s.n());
    write!(out, "t")?;
    for i in 1..=n {
        write!(out, ",x_{i},y_{i},vx_{i},vy_{i}")?;
    }
    writeln!(out)?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        write_float(out, *t)?;
        for i in 0..n {
            for v in [
                state.positions[i][0],
                state.positions[i][1],
                state.velocities[i][0],
                state.velocities[i][1],
            ] {
                write!(out, ",")?;
                write_float(out, v)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// CSV export with height columns:
/// `t,x_1,y_1,z_1,vx_1,vy_1,vz_1,...` with 17 significant digits.
pub fn write_curved_csv(traj: &CurvedTrajectory, out: &mut impl Write) -> std::io::Result<()> {
    let n = traj.states.first().map_or(0, |s| s.n());
    write!(out, "t")?;
    for i in 1..=n {
        write!(out, ",x_{i},y_{i},z_{i},vx_{i},vy_{i},vz_{i}")?;
    }
    writeln!(out)?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        write_float(out, *t)?;
        for i in 0..n {
            let p = &state.positions[i];
            let v = &state.velocities[i];
            for value in [p.x1, p.x2, p.x3, v[0], v[1], v[2]] {
                write!(out, ",")?;
                write_float(out, value)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::regular_ngon;
    use crate::curved::lift;
    use std::f64::consts::PI;

    fn two_body_config() -> CircularConfig {
        let masses = MassVector::new(vec![1.0, 1.0]).unwrap();
        CircularConfig::new(1.0, vec![0.0, PI], masses).unwrap()
    }

    #[test]
    fn planar_rhs_two_body_values() {
        let masses = MassVector::new(vec![1.0, 1.0]).unwrap();
        let state = PlanarState::new(
            vec![[1.0, 0.0], [-1.0, 0.0]],
            vec![[0.0, 0.0], [0.0, 0.0]],
            masses,
        )
        .unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let acc = planar_rhs(&state, &kernel).unwrap();
        assert!((acc[0][0] + 0.25).abs() < 1e-15);
        assert!(acc[0][1].abs() < 1e-15);
        assert!((acc[1][0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn momentum_balance() {
        let masses = MassVector::new(vec![1.0, 2.0, 0.7]).unwrap();
        let state = PlanarState::new(
            vec![[0.4, 0.1], [-0.9, 0.8], [0.3, -1.2]],
            vec![[0.0, 0.0]; 3],
            masses.clone(),
        )
        .unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let acc = planar_rhs(&state, &kernel).unwrap();
        let mut total = [0.0, 0.0];
        for i in 0..3 {
            total[0] += masses.get(i) * acc[i][0];
            total[1] += masses.get(i) * acc[i][1];
        }
        assert!(total[0].abs() < 1e-12 && total[1].abs() < 1e-12);
    }

    #[test]
    fn equilibrium_acceleration_is_centripetal() {
        // At the solved two-body configuration the force is exactly -A^2 q.
        let config = two_body_config();
        let spin = 0.5;
        let state = relative_equilibrium_state(&config, spin).unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let acc = planar_rhs(&state, &kernel).unwrap();
        for i in 0..2 {
            let q = config.cartesian(i).unwrap();
            assert!((acc[i][0] + spin * spin * q[0]).abs() < 1e-10);
            assert!((acc[i][1] + spin * spin * q[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn planar_orbit_closes_over_one_period() {
        let config = two_body_config();
        let spin = 0.5;
        let kernel = InteractionKernel::power_law(3.0);
        let period = std::f64::consts::TAU / spin;
        let check =
            orbit_residual_planar(&kernel, &config, spin, 1.0, period * 1e-4).unwrap();
        assert!(check.truncated_at.is_none());
        assert!(
            check.max_deviation < 1e-6,
            "deviation {}",
            check.max_deviation
        );
        assert!(check.max_com_drift < 1e-9, "drift {}", check.max_com_drift);
    }

    #[test]
    fn rk4_step_halving_is_fourth_order() {
        let config = two_body_config();
        let spin = 0.5;
        let kernel = InteractionKernel::power_law(3.0);
        let period = std::f64::consts::TAU / spin;
        let dt = period * 2e-3;
        let coarse = orbit_residual_planar(&kernel, &config, spin, 1.0, dt)
            .unwrap()
            .max_deviation;
        let fine = orbit_residual_planar(&kernel, &config, spin, 1.0, dt / 2.0)
            .unwrap()
            .max_deviation;
        let ratio = coarse / fine;
        assert!(
            (12.0..=20.0).contains(&ratio),
            "step-halving ratio {ratio} (coarse {coarse}, fine {fine})"
        );
    }

    #[test]
    fn perturbed_config_is_detected() {
        let masses = MassVector::new(vec![1.0, 1.0]).unwrap();
        let perturbed =
            CircularConfig::new(1.0, vec![0.0, PI + 0.1], masses).unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let spin = 0.5;
        let period = std::f64::consts::TAU / spin;
        let check =
            orbit_residual_planar(&kernel, &perturbed, spin, 1.0, period * 1e-3).unwrap();
        assert!(
            check.max_deviation > 1e-2,
            "perturbation not detected: {}",
            check.max_deviation
        );
    }

    #[test]
    fn zero_horizon_returns_initial_sample() {
        let config = two_body_config();
        let state = relative_equilibrium_state(&config, 0.5).unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let traj = integrate_planar(&state, &kernel, 0.0, 0.1).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.states[0], state);
    }

    #[test]
    fn collision_truncates_with_flag() {
        let masses = MassVector::new(vec![1.0, 1.0]).unwrap();
        let state = PlanarState::new(
            vec![[4e-10, 0.0], [-4e-10, 0.0]],
            vec![[0.0, 0.0], [0.0, 0.0]],
            masses,
        )
        .unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let traj = integrate_planar(&state, &kernel, 1.0, 0.01).unwrap();
        assert_eq!(traj.truncated_at, Some(0.0));
        assert_eq!(traj.states.len(), 1);
    }

    #[test]
    fn curved_orbit_preserves_constraints() {
        let masses = MassVector::new(vec![1.0, 1.0]).unwrap();
        let planar = CircularConfig::new(1.0, vec![0.0, PI], masses).unwrap();
        let k = InteractionKernel::curved_hyperbolic();
        let spin = (2.0 * k.eval_f(2.0).unwrap()).sqrt();
        let curved = lift(&planar, spin).unwrap();
        let period = std::f64::consts::TAU / spin;
        let check = orbit_residual_curved(&curved, 1.0, period * 1e-4).unwrap();
        assert!(check.truncated_at.is_none());
        assert!(check.max_deviation < 1e-6, "dev {}", check.max_deviation);
        assert!(
            check.max_constraint_drift < 1e-8,
            "constraint {}",
            check.max_constraint_drift
        );
        assert!(
            check.max_tangency_drift < 1e-8,
            "tangency {}",
            check.max_tangency_drift
        );
        assert!(check.max_height_drift < 1e-8, "z {}", check.max_height_drift);
    }

    #[test]
    fn equal_mass_gon_velocities_are_tangent() {
        let masses = MassVector::new(vec![1.0; 4]).unwrap();
        let planar = regular_ngon(1.5, masses).unwrap();
        let curved = lift(&planar, 0.4).unwrap();
        let state = curved_equilibrium_state(&curved).unwrap();
        assert!(state.max_constraint_drift() < 1e-12);
        assert!(state.max_tangency_drift() < 1e-12);
    }

    #[test]
    fn csv_headers_and_precision() {
        let config = two_body_config();
        let state = relative_equilibrium_state(&config, 0.5).unwrap();
        let kernel = InteractionKernel::power_law(3.0);
        let traj = integrate_planar(&state, &kernel, 0.02, 0.01).unwrap();
        let mut buffer = Vec::new();
        write_planar_csv(&traj, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x_1,y_1,vx_1,vy_1,x_2,y_2,vx_2,vy_2");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
        // Every row round-trips to f64 exactly.
        for field in first.split(',') {
            field.parse::<f64>().unwrap();
        }

        let masses = MassVector::new(vec![1.0, 1.0]).unwrap();
        let planar = CircularConfig::new(1.0, vec![0.0, PI], masses).unwrap();
        let curved = lift(&planar, 0.3).unwrap();
        let cstate = curved_equilibrium_state(&curved).unwrap();
        let ctraj = integrate_curved(&cstate, 0.02, 0.01).unwrap();
        let mut cbuf = Vec::new();
        write_curved_csv(&ctraj, &mut cbuf).unwrap();
        let ctext = String::from_utf8(cbuf).unwrap();
        assert!(ctext.starts_with("t,x_1,y_1,z_1,vx_1,vy_1,vz_1,x_2,y_2,z_2,vx_2,vy_2,vz_2"));
    }
}
