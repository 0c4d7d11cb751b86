//! Stationary-point search for the reduced potential: trust-region Newton
//! ascent over the gauge-fixed coordinates `(r, alpha_2..alpha_n)` with
//! `alpha_1 = 0`, local-maximum certification through the gauge-fixed
//! Hessian spectrum, and seeded multi-start uniqueness experiments.
//!
//! Gauge fixing removes the rotation degeneracy, so stationary points of an
//! admissible problem are strict local maxima and ascent is well posed near
//! them. Per-start random streams are derived from `(seed, start index)`,
//! which makes parallel and sequential schedules produce identical reports.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CircularConfig, OrderingId, regular_ngon, DEFAULT_GAP_MIN};
use crate::error::{Error, Result};
use crate::variational::{
    feasibility_margin, gradient, hessian, potential, residuals, symmetric_eigenvalues,
    ProblemSpec, Variant,
};

/// Relative eigenvalue threshold separating the rotation null direction
/// from genuinely negative spectrum.
pub const TOL_EIG: f64 = 1e-8;
/// Canonical-form clustering tolerance for uniqueness experiments.
pub const TOL_CLASS: f64 = 1e-8;
/// Radius floor enforced by the step safeguard.
const RADIUS_FLOOR: f64 = 1e-6;
/// Fraction-to-boundary factor keeping iterates strictly feasible.
const BOUNDARY_FRACTION: f64 = 0.95;
/// Minimum acceptance ratio for a trust-region step.
const ACCEPT_RATIO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Gauge-fixed gradient norm at which the solve is converged.
    pub tol_grad: f64,
    pub max_iter: usize,
    /// Number of randomized starts for multi-start experiments.
    pub starts: usize,
    pub seed: u64,
    /// Initial-guess jitter: gap log-scale in radians; the radius jitter is
    /// two thirds of this value (about 20% at the default).
    pub perturb_scale: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_grad: 1e-10,
            max_iter: 200,
            starts: 20,
            seed: 0,
            perturb_scale: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The step safeguard could not find an acceptable feasible step.
    StepFailure,
}

/// Outcome of one stationary-point solve.
///
/// A converged report is a stationary point of the reduced potential. It is
/// a relative equilibrium of the full dynamics only when the per-body
/// residual norms also vanish: stationarity pins the tangential equations
/// and the mass-weighted sum of the radial ones, and for generic unequal
/// masses no configuration satisfies every radial equation individually.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    /// Canonical configuration (first body at angle zero).
    pub config: CircularConfig,
    pub grad_norm: f64,
    /// Largest per-body radial residual of the stationarity system.
    pub residual_radial_norm: f64,
    /// Largest per-body tangential residual.
    pub residual_tangential_norm: f64,
    /// Eigenvalues of the gauge-fixed Hessian, ascending.
    pub hessian_spectrum: Vec<f64>,
    pub is_local_max: bool,
    pub feasibility_margin: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Potential value at every accepted iterate, for the ascent contract.
    #[serde(skip)]
    pub potential_trace: Vec<f64>,
}

impl StationaryReport {
    /// True when the configuration solves the full per-body stationarity
    /// system, not just the reduced-potential gradient.
    pub fn is_equilibrium(&self, tol: f64) -> bool {
        self.converged && self.residual_radial_norm <= tol && self.residual_tangential_norm <= tol
    }
}

/// Gauge-fixed coordinates: radius plus the movable angles.
#[derive(Clone)]
struct GaugeCoords {
    r: f64,
    /// `alpha_2..alpha_n`; `alpha_1` is pinned at zero.
    angles: Vec<f64>,
}

impl GaugeCoords {
    fn from_config(config: &CircularConfig) -> Self {
        let canon = config.canonicalize();
        GaugeCoords {
            r: canon.radius(),
            angles: canon.angles()[1..].to_vec(),
        }
    }

    fn to_config(&self, template: &CircularConfig) -> Result<CircularConfig> {
        let mut alpha = Vec::with_capacity(self.angles.len() + 1);
        alpha.push(0.0);
        alpha.extend_from_slice(&self.angles);
        template.with_coordinates(self.r, alpha)
    }

    fn step(&self, direction: &DVector<f64>, scale: f64) -> GaugeCoords {
        let mut next = self.clone();
        next.r += scale * direction[0];
        for (k, a) in next.angles.iter_mut().enumerate() {
            *a += scale * direction[k + 1];
        }
        next
    }

    /// Largest multiple of `direction` keeping the cyclic gaps above the
    /// collision floor and the radius above its floor.
    fn boundary_fraction(&self, direction: &DVector<f64>) -> f64 {
        let mut limit = 1.0f64;
        if direction[0] < 0.0 {
            let room = self.r - RADIUS_FLOOR;
            limit = limit.min(BOUNDARY_FRACTION * room.max(0.0) / (-direction[0]));
        }
        // Gaps of the full angle vector (0, angles...), cyclically closed.
        let n = self.angles.len() + 1;
        let angle = |i: usize| if i == 0 { 0.0 } else { self.angles[i - 1] };
        let dangle = |i: usize| if i == 0 { 0.0 } else { direction[i] };
        for i in 0..n {
            let j = (i + 1) % n;
            let gap = if j == 0 {
                TAU - angle(i)
            } else {
                angle(j) - angle(i)
            };
            let dgap = if j == 0 {
                -dangle(i)
            } else {
                dangle(j) - dangle(i)
            };
            if dgap < 0.0 {
                let room = gap - DEFAULT_GAP_MIN;
                limit = limit.min(BOUNDARY_FRACTION * room.max(0.0) / (-dgap));
            }
        }
        limit
    }
}

/// Gradient restricted to the gauge coordinates (drop the `alpha_1` entry).
fn gauge_gradient(full: &[f64]) -> DVector<f64> {
    let mut out = Vec::with_capacity(full.len() - 1);
    out.push(full[0]);
    out.extend_from_slice(&full[2..]);
    DVector::from_vec(out)
}

/// Shifted Newton ascent direction `-(H - tau I)^{-1} g` through the
/// eigendecomposition, with `tau` grown until the step fits the radius.
fn trust_region_step(
    hessian_gauge: &DMatrix<f64>,
    grad: &DVector<f64>,
    radius: f64,
) -> (DVector<f64>, f64) {
    let eigen = hessian_gauge.clone().symmetric_eigen();
    let coeffs = eigen.eigenvectors.transpose() * grad;
    let lambda_max = eigen.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let scale = eigen
        .eigenvalues
        .iter()
        .fold(1.0f64, |acc, l| acc.max(l.abs()));

    let step_for = |tau: f64| -> DVector<f64> {
        let mut combo = DVector::zeros(grad.len());
        for (k, lambda) in eigen.eigenvalues.iter().enumerate() {
            let denom = lambda - tau;
            combo += eigen.eigenvectors.column(k) * (-coeffs[k] / denom);
        }
        combo
    };

    // Pure Newton when the Hessian is safely negative definite.
    let tau0 = if lambda_max < -1e-12 * scale {
        0.0
    } else {
        lambda_max + 1e-8 * scale
    };
    let newton = step_for(tau0);
    if newton.norm() <= radius {
        let predicted = model_gain(hessian_gauge, grad, &newton);
        return (newton, predicted);
    }

    // Secular search: the step length decreases in tau past lambda_max.
    let mut lo = tau0;
    let mut hi = lambda_max + grad.norm() / radius + 1e-8 * scale;
    let mut best = step_for(hi);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let s = step_for(mid);
        if s.norm() > radius {
            lo = mid;
        } else {
            hi = mid;
            best = s;
        }
    }
    let predicted = model_gain(hessian_gauge, grad, &best);
    (best, predicted)
}

/// Quadratic-model gain `g.s + s.H.s / 2`; positive for shifted steps.
fn model_gain(h: &DMatrix<f64>, g: &DVector<f64>, s: &DVector<f64>) -> f64 {
    g.dot(s) + 0.5 * (h * s).dot(s)
}

/// Trust-region Newton ascent on the reduced potential from `init`.
///
/// Convergence, iteration-cap and step-failure outcomes are all reported in
/// the returned `StationaryReport`; only invalid inputs produce an `Err`.
pub fn solve_stationary(
    spec: &ProblemSpec,
    init: &CircularConfig,
    opts: &SolveOptions,
) -> Result<StationaryReport> {
    let mut coords = GaugeCoords::from_config(init);
    let template = init.canonicalize();
    let mut config = coords.to_config(&template)?;
    let mut value = potential(spec, &config)?;
    let mut trace = vec![value];

    let mut radius = 0.5;
    let radius_max = 50.0;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;

    for iter in 0..opts.max_iter {
        iterations = iter;
        let grad = gauge_gradient(&gradient(spec, &config)?);
        grad_norm = grad.norm();
        if grad_norm <= opts.tol_grad {
            termination = Termination::Converged;
            break;
        }
        let hess = hessian(spec, &config)?.gauge_fixed();

        // Retry with shrinking radius until a step is accepted.
        let mut accepted = false;
        for _ in 0..60 {
            let (step, predicted) = trust_region_step(&hess, &grad, radius);
            let beta = coords.boundary_fraction(&step);
            if beta <= 1e-14 || step.norm() * beta <= 1e-16 * (1.0 + coords.r) {
                radius *= 0.25;
                if radius < 1e-14 {
                    break;
                }
                continue;
            }
            let trial = coords.step(&step, beta);
            let trial_config = match trial.to_config(&template) {
                Ok(c) => c,
                Err(_) => {
                    radius *= 0.25;
                    continue;
                }
            };
            let trial_value = match potential(spec, &trial_config) {
                Ok(v) => v,
                Err(_) => {
                    radius *= 0.25;
                    continue;
                }
            };
            let scaled_predicted = beta * grad.dot(&step)
                + 0.5 * beta * beta * (&hess * &step).dot(&step);
            let predicted = if scaled_predicted > 0.0 {
                scaled_predicted
            } else {
                predicted.max(f64::MIN_POSITIVE)
            };
            let gain = trial_value - value;
            let ratio = gain / predicted;
            // Gains below the floating-point resolution of V cannot be
            // ratio-tested; accept them whenever the ascent contract holds.
            let unresolvable = predicted <= 1e-13 * value.abs().max(1.0);
            if (ratio >= ACCEPT_RATIO || unresolvable) && gain >= -1e-12 * value.abs() {
                let step_len = beta * step.norm();
                if ratio > 0.75 && step_len >= 0.8 * radius {
                    radius = (2.0 * radius).min(radius_max);
                } else if ratio < 0.25 {
                    radius = 0.25 * step_len.max(1e-14);
                }
                coords = trial;
                config = trial_config;
                value = trial_value;
                trace.push(value);
                accepted = true;
                break;
            }
            radius = 0.25 * (beta * step.norm()).max(radius * 0.25);
            if radius < 1e-14 {
                break;
            }
        }
        if !accepted {
            termination = Termination::StepFailure;
            break;
        }
        if iter + 1 == opts.max_iter {
            iterations = opts.max_iter;
        }
    }

    // Final gradient norm if the loop ended by cap or failure.
    if termination != Termination::Converged {
        let grad = gauge_gradient(&gradient(spec, &config)?);
        grad_norm = grad.norm();
        if grad_norm <= opts.tol_grad {
            termination = Termination::Converged;
        }
    }

    let hess = hessian(spec, &config)?;
    let spectrum = symmetric_eigenvalues(&hess.gauge_fixed());
    let spectral_norm = hess.spectral_norm();
    let max_eig = spectrum.last().copied().unwrap_or(0.0);
    let is_local_max = max_eig < -TOL_EIG * spectral_norm;
    let margin = match spec.variant() {
        Variant::CentralMass => Some(feasibility_margin(spec, &config)?),
        _ => None,
    };
    let res = residuals(spec, &config)?;
    Ok(StationaryReport {
        config: config.canonicalize(),
        grad_norm,
        residual_radial_norm: res.radial.iter().fold(0.0, |a, v| v.abs().max(a)),
        residual_tangential_norm: res.tangential.iter().fold(0.0, |a, v| v.abs().max(a)),
        hessian_spectrum: spectrum,
        is_local_max,
        feasibility_margin: margin,
        iterations,
        converged: termination == Termination::Converged,
        termination,
        potential_trace: trace,
    })
}

/// Certificate produced by `verify_local_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMaxCertificate {
    pub is_local_max: bool,
    /// Gauge-fixed spectrum, ascending.
    pub gauge_spectrum: Vec<f64>,
    /// Full-Hessian eigenvalues with magnitude below the null threshold.
    pub null_count: usize,
    /// Angle in radians between the near-null eigenvector and the rotation
    /// generator `(0, 1, ..., 1)`.
    pub null_alignment: f64,
    pub spectral_norm: f64,
}

/// Verify that a stationary configuration is a strict local maximum after
/// gauge fixing, and that the only near-null direction of the full Hessian
/// is the rotation generator.
pub fn verify_local_max(
    spec: &ProblemSpec,
    config: &CircularConfig,
    tol_grad: f64,
) -> Result<LocalMaxCertificate> {
    let grad = gauge_gradient(&gradient(spec, config)?);
    let grad_norm = grad.norm();
    if grad_norm > tol_grad {
        return Err(Error::NotStationary {
            grad_norm,
            tol: tol_grad,
        });
    }
    let hess = hessian(spec, config)?;
    let gauge_spectrum = symmetric_eigenvalues(&hess.gauge_fixed());
    let spectral_norm = hess.spectral_norm();

    let eigen = hess.full().clone().symmetric_eigen();
    let mut null_count = 0;
    let mut null_alignment = f64::INFINITY;
    let n = config.n();
    let generator_norm = (n as f64).sqrt();
    for (k, lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda.abs() < 1e-9 * spectral_norm {
            null_count += 1;
            let v = eigen.eigenvectors.column(k);
            // Cosine against (0, 1, ..., 1)/sqrt(n).
            let dot: f64 = (1..=n).map(|i| v[i]).sum::<f64>() / generator_norm;
            let angle = dot.abs().clamp(0.0, 1.0).acos();
            null_alignment = null_alignment.min(angle);
        }
    }
    let max_eig = gauge_spectrum.last().copied().unwrap_or(0.0);
    Ok(LocalMaxCertificate {
        is_local_max: max_eig < -TOL_EIG * spectral_norm,
        gauge_spectrum,
        null_count,
        null_alignment,
        spectral_norm,
    })
}

/// Default initialization: a regular polygon whose radius solves the
/// equal-mass-averaged radial equation by bisection.
pub fn default_initial_config(spec: &ProblemSpec) -> Result<CircularConfig> {
    let n = spec.masses().n();
    let mean_mass = spec.masses().circle_total() / n as f64;
    let a2 = spec.spin() * spec.spin();
    let central = spec.masses().central();
    let kernel = *spec.kernel();

    let radial = |r: f64| -> Result<f64> {
        let mut rhs = 0.0;
        for j in 1..n {
            let s = (std::f64::consts::PI * j as f64 / n as f64).sin();
            rhs += mean_mass * s * kernel.eval_g(2.0 * r * s)?;
        }
        if let Some(mc) = central {
            rhs += mc * kernel.eval_g(r)?;
        }
        Ok(rhs - a2 * r)
    };

    let mut lo = 1e-3;
    let mut hi = 1e3;
    let r0 = match (radial(lo), radial(hi)) {
        (Ok(flo), Ok(fhi)) if flo > 0.0 && fhi < 0.0 => {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                match radial(mid) {
                    Ok(v) if v > 0.0 => lo = mid,
                    Ok(_) => hi = mid,
                    Err(_) => break,
                }
            }
            0.5 * (lo + hi)
        }
        _ => 1.0,
    };
    regular_ngon(r0, spec.masses().clone())
}

/// Start 0 is the unjittered polygon; later starts jitter the gaps and the
/// radius with a stream derived from `(seed, start)`.
pub fn initial_config_for_start(
    spec: &ProblemSpec,
    opts: &SolveOptions,
    start: usize,
) -> Result<CircularConfig> {
    let base = default_initial_config(spec)?;
    if start == 0 {
        return Ok(base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(start as u64);

    let gaps = base.cyclic_gaps();
    let mut jittered: Vec<f64> = gaps
        .iter()
        .map(|g| g * (opts.perturb_scale * rng.random_range(-1.0..1.0)).exp())
        .collect();
    let total: f64 = jittered.iter().sum();
    for g in &mut jittered {
        *g *= TAU / total;
    }
    let mut alpha = Vec::with_capacity(base.n());
    let mut acc = 0.0;
    for g in jittered.iter().take(base.n()) {
        alpha.push(acc);
        acc += g;
    }
    let radius_jitter = 2.0 / 3.0 * opts.perturb_scale * rng.random_range(-1.0..1.0);
    let r = base.radius() * radius_jitter.exp();
    CircularConfig::new(r, alpha, spec.masses().clone())
}

/// Convergence summary of one start within a uniqueness experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub start: usize,
    pub termination: Termination,
    pub converged: bool,
    pub is_local_max: bool,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Index into the report's class list, for converged local maxima.
    pub class: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    Unique,
    Multiple,
    NoneFound,
}

/// Result of the per-ordering multi-start experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub ordering: OrderingId,
    /// Mass values around the circle in this ordering.
    pub ordering_values: Vec<f64>,
    /// Distinct canonical stationary configurations found.
    pub classes: Vec<CircularConfig>,
    pub per_start: Vec<StartOutcome>,
    pub verdict: UniquenessVerdict,
    /// Set when the experiment ran a single start only.
    pub single_start_caveat: bool,
}

/// Two canonical configurations represent the same rotation class when some
/// mass-preserving cyclic relabeling matches them within `tol`.
pub fn same_class(a: &CircularConfig, b: &CircularConfig, tol: f64) -> bool {
    if a.n() != b.n() || (a.radius() - b.radius()).abs() > tol {
        return false;
    }
    let n = a.n();
    let ma = a.masses().circle_masses();
    let mb = b.masses().circle_masses();
    'shift: for k in 0..n {
        for i in 0..n {
            if ma[i].to_bits() != mb[(i + k) % n].to_bits() {
                continue 'shift;
            }
        }
        let base = b.angles()[k];
        let mut worst = 0.0f64;
        for i in 0..n {
            let rebased = (b.angles()[(i + k) % n] - base).rem_euclid(TAU);
            let mut diff = (rebased - a.angles()[i]).abs();
            diff = diff.min(TAU - diff);
            worst = worst.max(diff);
        }
        if worst <= tol {
            return true;
        }
    }
    false
}

fn run_starts(
    spec: &ProblemSpec,
    opts: &SolveOptions,
    parallel: bool,
) -> Result<Vec<(usize, StationaryReport)>> {
    let one = |start: usize| -> Result<(usize, StationaryReport)> {
        let init = initial_config_for_start(spec, opts, start)?;
        let report = solve_stationary(spec, &init, opts)?;
        Ok((start, report))
    };
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..opts.starts).into_par_iter().map(one).collect();
    }
    let _ = parallel;
    (0..opts.starts).map(one).collect()
}

fn assemble_uniqueness(
    ordering: &OrderingId,
    spec: &ProblemSpec,
    opts: &SolveOptions,
    outcomes: Vec<(usize, StationaryReport)>,
) -> UniquenessReport {
    let mut classes: Vec<CircularConfig> = Vec::new();
    let mut per_start = Vec::with_capacity(outcomes.len());
    for (start, report) in outcomes {
        let class = if report.converged && report.is_local_max {
            let found = classes
                .iter()
                .position(|c| same_class(c, &report.config, TOL_CLASS));
            Some(match found {
                Some(idx) => idx,
                None => {
                    classes.push(report.config.clone());
                    classes.len() - 1
                }
            })
        } else {
            None
        };
        per_start.push(StartOutcome {
            start,
            termination: report.termination,
            converged: report.converged,
            is_local_max: report.is_local_max,
            grad_norm: report.grad_norm,
            iterations: report.iterations,
            class,
        });
    }
    let verdict = match classes.len() {
        0 => UniquenessVerdict::NoneFound,
        1 => UniquenessVerdict::Unique,
        _ => UniquenessVerdict::Multiple,
    };
    UniquenessReport {
        ordering: ordering.clone(),
        ordering_values: ordering.values(spec.masses()),
        classes,
        per_start,
        verdict,
        single_start_caveat: opts.starts == 1,
    }
}

/// Multi-start solve for one mass ordering; starts run in parallel when the
/// `parallel` feature is enabled.
pub fn uniqueness_experiment(
    spec: &ProblemSpec,
    ordering: &OrderingId,
    opts: &SolveOptions,
) -> Result<UniquenessReport> {
    let ordered = spec.with_ordering(ordering.perm())?;
    let outcomes = run_starts(&ordered, opts, true)?;
    Ok(assemble_uniqueness(ordering, spec, opts, outcomes))
}

/// Sequential variant of `uniqueness_experiment`; reports are identical.
pub fn uniqueness_experiment_sequential(
    spec: &ProblemSpec,
    ordering: &OrderingId,
    opts: &SolveOptions,
) -> Result<UniquenessReport> {
    let ordered = spec.with_ordering(ordering.perm())?;
    let outcomes = run_starts(&ordered, opts, false)?;
    Ok(assemble_uniqueness(ordering, spec, opts, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MassVector;
    use crate::kernel::InteractionKernel;
    use std::f64::consts::PI;

    fn two_body_problem() -> ProblemSpec {
        ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            MassVector::new(vec![1.0, 1.0]).unwrap(),
            0.5,
            Variant::Plain,
        )
        .unwrap()
    }

    #[test]
    fn two_body_solves_to_unit_radius() {
        let spec = two_body_problem();
        let init = CircularConfig::new(
            1.3,
            vec![0.0, 2.9],
            MassVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let report = solve_stationary(&spec, &init, &SolveOptions::default()).unwrap();
        assert!(report.converged);
        assert!(report.is_local_max);
        assert!(
            (report.config.radius() - 1.0).abs() < 1e-10,
            "r = {}",
            report.config.radius()
        );
        assert!((report.config.angles()[1] - PI).abs() < 1e-10);
        assert!(report.grad_norm <= 1e-10);
        // Gauge stays pinned.
        assert_eq!(report.config.angles()[0], 0.0);
    }

    #[test]
    fn ascent_is_monotone() {
        let spec = two_body_problem();
        let init = CircularConfig::new(
            1.8,
            vec![0.0, 2.2],
            MassVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let report = solve_stationary(&spec, &init, &SolveOptions::default()).unwrap();
        assert!(report.converged);
        for pair in report.potential_trace.windows(2) {
            assert!(
                pair[1] >= pair[0] - 1e-12 * pair[0].abs(),
                "ascent violated: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn pentagon_matches_bisection_oracle() {
        let masses = MassVector::new(vec![1.0; 5]).unwrap();
        let spec = ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            masses.clone(),
            1.0,
            Variant::Plain,
        )
        .unwrap();
        let report =
            solve_stationary(&spec, &default_initial_config(&spec).unwrap(), &SolveOptions::default())
                .unwrap();
        assert!(report.converged && report.is_local_max);

        // Oracle: regular pentagon radius from the scalar radial equation,
        // A^2 r = sum_j sin(pi j/5) g(2 r sin(pi j/5)), solved by bisection.
        let g = |x: f64| x.powi(-2);
        let phi = |r: f64| -> f64 {
            (1..5)
                .map(|j| {
                    let s = (PI * j as f64 / 5.0).sin();
                    s * g(2.0 * r * s)
                })
                .sum::<f64>()
                - r
        };
        let (mut lo, mut hi) = (1e-3, 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle_r = 0.5 * (lo + hi);
        assert!(
            (report.config.radius() - oracle_r).abs() < 1e-9,
            "r = {} oracle {oracle_r}",
            report.config.radius()
        );
        // Equispaced angles.
        for (i, a) in report.config.angles().iter().enumerate() {
            assert!((a - TAU * i as f64 / 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn central_mass_fixture() {
        let masses = MassVector::with_central(vec![1.0, 1.0], 1.0).unwrap();
        let spec = ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            masses.clone(),
            1.25f64.sqrt(),
            Variant::CentralMass,
        )
        .unwrap();
        let init = CircularConfig::new(1.1, vec![0.0, 3.0], masses).unwrap();
        let report = solve_stationary(&spec, &init, &SolveOptions::default()).unwrap();
        assert!(report.converged && report.is_local_max);
        assert!((report.config.radius() - 1.0).abs() < 1e-10);
        let margin = report.feasibility_margin.unwrap();
        assert!((margin - 0.25).abs() < 1e-10, "margin {margin}");
    }

    #[test]
    fn verify_two_body_spectrum() {
        let spec = two_body_problem();
        let config = CircularConfig::new(
            1.0,
            vec![0.0, PI],
            MassVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let cert = verify_local_max(&spec, &config, 1e-10).unwrap();
        assert!(cert.is_local_max);
        assert!((cert.gauge_spectrum[0] + 3.0).abs() < 1e-10);
        assert!((cert.gauge_spectrum[1] + 0.25).abs() < 1e-10);
        assert_eq!(cert.null_count, 1);
        assert!(cert.null_alignment < 1e-6, "alignment {}", cert.null_alignment);
    }

    #[test]
    fn verify_rejects_non_stationary_input() {
        let spec = two_body_problem();
        let config = CircularConfig::new(
            1.4,
            vec![0.0, 2.8],
            MassVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            verify_local_max(&spec, &config, 1e-10),
            Err(Error::NotStationary { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_nonconverged() {
        let spec = two_body_problem();
        let init = CircularConfig::new(
            2.5,
            vec![0.0, 1.5],
            MassVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let opts = SolveOptions {
            max_iter: 1,
            ..SolveOptions::default()
        };
        let report = solve_stationary(&spec, &init, &opts).unwrap();
        assert!(!report.converged);
        assert_eq!(report.termination, Termination::MaxIterations);
    }

    #[test]
    fn uniqueness_three_masses() {
        let spec = ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            MassVector::new(vec![1.0, 2.0, 3.0]).unwrap(),
            1.0,
            Variant::Plain,
        )
        .unwrap();
        let ordering = OrderingId::identity(3);
        let opts = SolveOptions {
            starts: 20,
            seed: 7,
            ..SolveOptions::default()
        };
        let report = uniqueness_experiment(&spec, &ordering, &opts).unwrap();
        assert_eq!(report.verdict, UniquenessVerdict::Unique);
        assert_eq!(report.classes.len(), 1);
        assert!(!report.single_start_caveat);
        assert!(report.per_start.iter().all(|s| s.converged));
    }

    #[test]
    fn equal_masses_recover_square() {
        let spec = ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            MassVector::new(vec![1.0; 4]).unwrap(),
            1.0,
            Variant::Plain,
        )
        .unwrap();
        let opts = SolveOptions {
            starts: 12,
            seed: 3,
            ..SolveOptions::default()
        };
        let report = uniqueness_experiment(&spec, &OrderingId::identity(4), &opts).unwrap();
        assert_eq!(report.verdict, UniquenessVerdict::Unique);
        let class = &report.classes[0];
        for (i, a) in class.angles().iter().enumerate() {
            assert!(
                (a - TAU * i as f64 / 4.0).abs() < 1e-8,
                "angle {i} = {a} not square"
            );
        }
    }

    #[test]
    fn parallel_and_sequential_reports_match() {
        let spec = ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            MassVector::new(vec![1.0, 2.0, 3.0]).unwrap(),
            1.0,
            Variant::Plain,
        )
        .unwrap();
        let ordering = OrderingId::identity(3);
        let opts = SolveOptions {
            starts: 10,
            seed: 11,
            ..SolveOptions::default()
        };
        let par = uniqueness_experiment(&spec, &ordering, &opts).unwrap();
        let seq = uniqueness_experiment_sequential(&spec, &ordering, &opts).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = ProblemSpec::new(
            InteractionKernel::power_law(3.0),
            MassVector::new(vec![1.0, 2.0]).unwrap(),
            0.8,
            Variant::Plain,
        )
        .unwrap();
        let ordering = OrderingId::identity(2);
        let opts = SolveOptions {
            starts: 6,
            seed: 42,
            ..SolveOptions::default()
        };
        let a = uniqueness_experiment(&spec, &ordering, &opts).unwrap();
        let b = uniqueness_experiment(&spec, &ordering, &opts).unwrap();
        assert_eq!(a, b);
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn same_class_handles_mass_preserving_shifts() {
        let masses = MassVector::new(vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        let a = CircularConfig::new(
            1.0,
            vec![0.0, 1.5, PI, PI + 1.5],
            masses.clone(),
        )
        .unwrap();
        // Shift by two positions: same values, same geometry.
        let b = a.rotated(PI).canonicalize();
        assert!(same_class(&a.canonicalize(), &b, 1e-9));

        let c = CircularConfig::new(1.0, vec![0.0, 1.3, PI, PI + 1.5], masses).unwrap();
        assert!(!same_class(&a.canonicalize(), &c.canonicalize(), 1e-9));
    }
}
