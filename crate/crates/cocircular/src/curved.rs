//! Hyperboloid-sheet geometry for the curved problem and the reduction of
//! rigidly rotating polygonal configurations to a planar stationarity system
//! with the curved kernel.
//!
//! All points live on the upper sheet of `x1^2 + x2^2 - x3^2 = -1`; the
//! bilinear form pairing them is the Minkowski product
//! `x1 y1 + x2 y2 - x3 y3`.

use serde::{Deserialize, Serialize};

use crate::config::{CircularConfig, MassVector};
use crate::error::{Error, Result};
use crate::kernel::InteractionKernel;
use crate::variational::{ProblemSpec, Variant};

/// Tolerance for the manifold constraint of a user-constructed point.
const POINT_CONSTRAINT_TOL: f64 = 1e-10;
/// Tolerance for the stored-versus-recomputed height on deserialization.
const HEIGHT_TOL: f64 = 1e-9;
/// Pair products this close to the vertex value -1 are collisions.
const SINGULARITY_GUARD: f64 = 1e-14;

/// A point on the upper sheet (`x3 > 0`) of the unit hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl HyperboloidPoint {
    /// Checked constructor; the point must satisfy the manifold constraint.
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let p = HyperboloidPoint { x1, x2, x3 };
        let residual = p.constraint_residual();
        if x3 <= 0.0 || residual > POINT_CONSTRAINT_TOL {
            return Err(Error::OffHyperboloid {
                value: minkowski(&p, &p),
            });
        }
        Ok(p)
    }

    /// Unchecked constructor for integration states, where deviation from
    /// the sheet is measured as drift rather than rejected.
    pub fn from_xyz_unchecked(x1: f64, x2: f64, x3: f64) -> Self {
        HyperboloidPoint { x1, x2, x3 }
    }

    /// Lift of a planar point: `x3 = sqrt(1 + |P|^2)`.
    pub fn lift_planar(p: [f64; 2]) -> Self {
        HyperboloidPoint {
            x1: p[0],
            x2: p[1],
            x3: (1.0 + p[0] * p[0] + p[1] * p[1]).sqrt(),
        }
    }

    /// `|p . p + 1|`, zero on the sheet.
    pub fn constraint_residual(&self) -> f64 {
        (minkowski(self, self) + 1.0).abs()
    }
}

/// Minkowski product `x1 y1 + x2 y2 - x3 y3`.
pub fn minkowski(p: &HyperboloidPoint, q: &HyperboloidPoint) -> f64 {
    p.x1 * q.x1 + p.x2 * q.x2 - p.x3 * q.x3
}

/// A rigidly rotating polygon on the hyperboloid: planar radius `rho`,
/// angles `gamma`, height `z = sqrt(1 + rho^2)` and rotation speed `spin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurvedConfig", into = "RawCurvedConfig")]
pub struct CurvedPolygonConfig {
    rho: f64,
    gamma: Vec<f64>,
    z: f64,
    spin: f64,
    masses: MassVector,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawCurvedConfig {
    rho: f64,
    gamma: Vec<f64>,
    z: f64,
    spin: f64,
    masses: MassVector,
}

impl TryFrom<RawCurvedConfig> for CurvedPolygonConfig {
    type Error = Error;
    fn try_from(raw: RawCurvedConfig) -> Result<Self> {
        let masses = raw.masses;
        let planar = CircularConfig::new(raw.rho, raw.gamma, masses)?;
        let config = lift(&planar, raw.spin)?;
        if (config.z - raw.z).abs() > HEIGHT_TOL {
            return Err(Error::HeightMismatch {
                stored: raw.z,
                computed: config.z,
            });
        }
        Ok(config)
    }
}

impl From<CurvedPolygonConfig> for RawCurvedConfig {
    fn from(c: CurvedPolygonConfig) -> Self {
        RawCurvedConfig {
            rho: c.rho,
            gamma: c.gamma,
            z: c.z,
            spin: c.spin,
            masses: c.masses,
        }
    }
}

/// Lift a planar circular configuration to the upper sheet with rotation
/// speed `spin`; the height is forced by the manifold constraint.
pub fn lift(config: &CircularConfig, spin: f64) -> Result<CurvedPolygonConfig> {
    if !(spin > 0.0) || !spin.is_finite() {
        return Err(Error::InvalidSpin { spin });
    }
    if config.masses().central().is_some() {
        return Err(Error::CentralMassUnexpected);
    }
    let rho = config.radius();
    Ok(CurvedPolygonConfig {
        rho,
        gamma: config.angles().to_vec(),
        z: (1.0 + rho * rho).sqrt(),
        spin,
        masses: config.masses().clone(),
    })
}

impl CurvedPolygonConfig {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn spin(&self) -> f64 {
        self.spin
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    /// Planar component `P_i` at time zero.
    pub fn planar_position(&self, i: usize) -> Result<[f64; 2]> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok([
            self.rho * self.gamma[i].cos(),
            self.rho * self.gamma[i].sin(),
        ])
    }

    /// Body position `(T(spin t) P_i, z)`.
    pub fn position_at(&self, i: usize, t: f64) -> Result<HyperboloidPoint> {
        let p = self.planar_position(i)?;
        let theta = self.spin * t;
        let (sin, cos) = theta.sin_cos();
        Ok(HyperboloidPoint {
            x1: cos * p[0] - sin * p[1],
            x2: sin * p[0] + cos * p[1],
            x3: self.z,
        })
    }

    /// Rigid-rotation velocity; the third component is zero.
    pub fn velocity_at(&self, i: usize, t: f64) -> Result<[f64; 3]> {
        let p = self.planar_position(i)?;
        let theta = self.spin * t;
        let (sin, cos) = theta.sin_cos();
        // d/dt T(Bt) P = B T(Bt) J P with J the quarter turn.
        let jp = [-p[1], p[0]];
        Ok([
            self.spin * (cos * jp[0] - sin * jp[1]),
            self.spin * (sin * jp[0] + cos * jp[1]),
            0.0,
        ])
    }

    /// The planar problem whose stationary points are exactly the curved
    /// relative equilibria: curved kernel, same masses and angles, radius
    /// `rho` and spin carried over.
    pub fn reduced(&self) -> Result<(ProblemSpec, CircularConfig)> {
        let spec = ProblemSpec::new(
            InteractionKernel::curved_hyperbolic(),
            self.masses.clone(),
            self.spin,
            Variant::Curved,
        )?;
        let config = CircularConfig::new(self.rho, self.gamma.clone(), self.masses.clone())?;
        Ok((spec, config))
    }
}

/// Right-hand side of the curved equations of motion for body `i` of a
/// rigidly rotating configuration at time `t`.
pub fn curved_acceleration(config: &CurvedPolygonConfig, t: f64, i: usize) -> Result<[f64; 3]> {
    if i >= config.n() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: config.n(),
        });
    }
    let pi = config.position_at(i, t)?;
    // Rigid rotation gives p'. p' = (spin rho)^2 independent of t and i.
    let speed2 = (config.spin * config.rho) * (config.spin * config.rho);
    let mut acc = [speed2 * pi.x1, speed2 * pi.x2, speed2 * pi.x3];
    for j in 0..config.n() {
        if j == i {
            continue;
        }
        let pj = config.position_at(j, t)?;
        let w = minkowski(&pi, &pj);
        if (w + 1.0).abs() < SINGULARITY_GUARD {
            return Err(Error::CoincidentBodies {
                i,
                j,
                separation: (w + 1.0).abs(),
            });
        }
        let denom = (w * w - 1.0).powf(1.5);
        let m = config.masses.get(j);
        acc[0] += m * (pj.x1 + w * pi.x1) / denom;
        acc[1] += m * (pj.x2 + w * pi.x2) / denom;
        acc[2] += m * (pj.x3 + w * pi.x3) / denom;
    }
    Ok(acc)
}

/// Acceleration of the rigid-rotation ansatz itself: `(-B^2 T(Bt) P_i, 0)`.
pub fn kinematic_acceleration(config: &CurvedPolygonConfig, t: f64, i: usize) -> Result<[f64; 3]> {
    let pi = config.position_at(i, t)?;
    let b2 = config.spin * config.spin;
    Ok([-b2 * pi.x1, -b2 * pi.x2, 0.0])
}

/// Residual of the rigid-rotation ansatz for body `i`, expressed in the
/// co-rotating polar frame.
///
/// `vertical` is the third component of the dynamical residual (it vanishes
/// at stationary configurations). `planar` is the first-two-component
/// residual with the vertical imbalance projected out and the frame rotated
/// so that it is directly comparable, entry by entry, with the reduced
/// system residuals: `planar[0] = -radial_i / m_i` and
/// `planar[1] = tangential_i / (m_i rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorotatingResidual {
    pub planar: [f64; 2],
    pub vertical: f64,
}

pub fn corotating_residual(config: &CurvedPolygonConfig, i: usize) -> Result<CorotatingResidual> {
    let acc = curved_acceleration(config, 0.0, i)?;
    let kin = kinematic_acceleration(config, 0.0, i)?;
    let resid = [acc[0] - kin[0], acc[1] - kin[1], acc[2] - kin[2]];
    let p = config.planar_position(i)?;
    // Remove the vertical imbalance (it multiplies p_i in the full system).
    let s = resid[2] / config.z;
    let corrected = [resid[0] - s * p[0], resid[1] - s * p[1]];
    // Apply -T(-gamma_i).
    let (sin, cos) = config.gamma[i].sin_cos();
    let rotated = [
        -(cos * corrected[0] + sin * corrected[1]),
        -(-sin * corrected[0] + cos * corrected[1]),
    ];
    Ok(CorotatingResidual {
        planar: rotated,
        vertical: resid[2],
    })
}
