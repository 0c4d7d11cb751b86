//! The reduced potential of co-circular configurations, its central-mass
//! variant, and their closed-form first and second derivatives in the
//! coordinates `(r, alpha_1, ..., alpha_n)`.
//!
//! Stationary points of the potential are exactly the co-circular relative
//! equilibria; the Hessian quadratic form is non-positive at stationary
//! points for admissible kernels, which is what the local-max certification
//! in the solver checks.
//!
//! Second derivatives are obtained by direct differentiation of the
//! closed-form gradient and validated against finite differences in the
//! test suites.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{CircularConfig, MassVector, DEFAULT_GAP_MIN};
use crate::error::{Error, Result};
use crate::kernel::InteractionKernel;

/// Which stationarity system is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Bodies on a circle, no central mass.
    Plain,
    /// Bodies on a circle around one mass fixed at the origin.
    CentralMass,
    /// Reduced hyperbolic problem; the kernel must be curved-hyperbolic and
    /// the spin slot stores the hyperboloid rotation speed.
    Curved,
}

/// One solve instance: force law, masses, rotation speed and variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblemSpec", into = "RawProblemSpec")]
pub struct ProblemSpec {
    kernel: InteractionKernel,
    masses: MassVector,
    spin: f64,
    variant: Variant,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawProblemSpec {
    kernel: InteractionKernel,
    masses: MassVector,
    spin: f64,
    variant: Variant,
}

impl TryFrom<RawProblemSpec> for ProblemSpec {
    type Error = Error;
    fn try_from(raw: RawProblemSpec) -> Result<Self> {
        ProblemSpec::new(raw.kernel, raw.masses, raw.spin, raw.variant)
    }
}

impl From<ProblemSpec> for RawProblemSpec {
    fn from(spec: ProblemSpec) -> Self {
        RawProblemSpec {
            kernel: spec.kernel,
            masses: spec.masses,
            spin: spec.spin,
            variant: spec.variant,
        }
    }
}

impl ProblemSpec {
    pub fn new(
        kernel: InteractionKernel,
        masses: MassVector,
        spin: f64,
        variant: Variant,
    ) -> Result<Self> {
        if !(spin > 0.0) || !spin.is_finite() {
            return Err(Error::InvalidSpin { spin });
        }
        if variant == Variant::Curved && !kernel.is_curved() {
            return Err(Error::KernelVariantMismatch);
        }
        match (variant, masses.central()) {
            (Variant::CentralMass, None) => return Err(Error::CentralMassMissing),
            (Variant::Plain | Variant::Curved, Some(_)) => {
                return Err(Error::CentralMassUnexpected)
            }
            _ => {}
        }
        kernel.require_admissible()?;
        Ok(ProblemSpec {
            kernel,
            masses,
            spin,
            variant,
        })
    }

    pub fn kernel(&self) -> &InteractionKernel {
        &self.kernel
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    /// Angular speed: `A` for planar variants, `B` for the curved one.
    pub fn spin(&self) -> f64 {
        self.spin
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Same problem with the circle masses permuted.
    pub fn with_ordering(&self, perm: &[usize]) -> Result<ProblemSpec> {
        Ok(ProblemSpec {
            kernel: self.kernel,
            masses: self.masses.permuted(perm)?,
            spin: self.spin,
            variant: self.variant,
        })
    }

    fn validate_config(&self, config: &CircularConfig) -> Result<()> {
        if config.n() != self.masses.n() {
            return Err(Error::DimensionMismatch {
                reason: format!(
                    "configuration has {} bodies, spec has {}",
                    config.n(),
                    self.masses.n()
                ),
            });
        }
        match (self.variant, config.masses().central()) {
            (Variant::CentralMass, None) => return Err(Error::CentralMassMissing),
            (Variant::Plain | Variant::Curved, Some(_)) => {
                return Err(Error::CentralMassUnexpected)
            }
            _ => {}
        }
        let gap = config.min_cyclic_gap();
        if gap < DEFAULT_GAP_MIN {
            return Err(Error::CollisionGap {
                gap,
                min: DEFAULT_GAP_MIN,
            });
        }
        Ok(())
    }
}

/// Perturbation direction `(rho, gamma_1..gamma_n)` for the concavity
/// quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianProbe {
    pub rho: f64,
    pub gamma: Vec<f64>,
}

/// Dense symmetric second-derivative matrix over `(r, alpha_1..alpha_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianMatrix {
    mat: DMatrix<f64>,
}

impl HessianMatrix {
    pub fn full(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Number of bodies (matrix dimension is `bodies + 1`).
    pub fn bodies(&self) -> usize {
        self.mat.nrows() - 1
    }

    /// Hessian restricted to the gauge-fixed coordinates `(r, alpha_2..alpha_n)`:
    /// the row and column of `alpha_1` removed.
    pub fn gauge_fixed(&self) -> DMatrix<f64> {
        let dim = self.mat.nrows();
        let keep: Vec<usize> = (0..dim).filter(|&k| k != 1).collect();
        DMatrix::from_fn(dim - 1, dim - 1, |i, j| self.mat[(keep[i], keep[j])])
    }

    /// Largest absolute eigenvalue of the full matrix.
    pub fn spectral_norm(&self) -> f64 {
        symmetric_eigenvalues(&self.mat)
            .iter()
            .fold(0.0, |acc, &l| acc.max(l.abs()))
    }

    /// `v^T H v` with `v = (rho, gamma)`.
    pub fn quad_form(&self, probe: &HessianProbe) -> f64 {
        let n = self.bodies();
        assert_eq!(probe.gamma.len(), n, "probe dimension mismatch");
        let mut v = Vec::with_capacity(n + 1);
        v.push(probe.rho);
        v.extend_from_slice(&probe.gamma);
        let mut total = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                total += v[i] * self.mat[(i, j)] * v[j];
            }
        }
        total
    }
}

/// Sorted (ascending) eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(mat: &DMatrix<f64>) -> Vec<f64> {
    let mut eigs: Vec<f64> = mat
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Geometry and kernel values of one body pair.
struct PairTerm {
    /// `sin(|alpha_i - alpha_j| / 2)`, positive away from collision.
    s: f64,
    /// `cos((alpha_i - alpha_j) / 2)`.
    c: f64,
    /// `sign(alpha_i - alpha_j)`.
    delta: f64,
    g: f64,
    g_prime: f64,
}

fn pair_term(
    kernel: &InteractionKernel,
    r: f64,
    alpha_i: f64,
    alpha_j: f64,
    need_g_prime: bool,
) -> Result<PairTerm> {
    let d = alpha_i - alpha_j;
    let s = (0.5 * d.abs()).sin();
    let c = (0.5 * d).cos();
    let delta = if d > 0.0 { 1.0 } else { -1.0 };
    let u = 2.0 * r * s;
    let g = kernel.eval_g(u)?;
    let g_prime = if need_g_prime {
        kernel.eval_g_prime(u)?
    } else {
        0.0
    };
    Ok(PairTerm {
        s,
        c,
        delta,
        g,
        g_prime,
    })
}

/// Reduced potential `V` (or `W` for the central-mass variant).
pub fn potential(spec: &ProblemSpec, config: &CircularConfig) -> Result<f64> {
    spec.validate_config(config)?;
    let masses = config.masses();
    let n = config.n();
    let r = config.radius();
    let a2 = spec.spin() * spec.spin();

    let mut pair_sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let u = config.chord(i, j)?;
            pair_sum += 2.0 * masses.get(i) * masses.get(j) * spec.kernel().eval_primitive(u)?;
        }
    }
    let circle_total = masses.circle_total();
    let mut value = pair_sum - circle_total * a2 * r * r;
    if spec.variant() == Variant::CentralMass {
        let central = masses.central().ok_or(Error::CentralMassMissing)?;
        value += 2.0 * circle_total * central * spec.kernel().eval_primitive(r)?;
    }
    Ok(value)
}

/// Closed-form gradient `(dV/dr, dV/dalpha_1, ..., dV/dalpha_n)`.
pub fn gradient(spec: &ProblemSpec, config: &CircularConfig) -> Result<Vec<f64>> {
    spec.validate_config(config)?;
    let masses = config.masses();
    let n = config.n();
    let r = config.radius();
    let alpha = config.angles();
    let a2 = spec.spin() * spec.spin();

    let mut grad = vec![0.0; n + 1];
    for i in 0..n {
        for j in (i + 1)..n {
            let t = pair_term(spec.kernel(), r, alpha[i], alpha[j], false)?;
            let mm = masses.get(i) * masses.get(j);
            grad[0] += 4.0 * mm * t.s * t.g;
            // d/dalpha_i and d/dalpha_j carry opposite signs.
            let tangent = 2.0 * mm * r * t.delta * t.c * t.g;
            grad[1 + i] += tangent;
            grad[1 + j] -= tangent;
        }
    }
    let circle_total = masses.circle_total();
    grad[0] -= 2.0 * circle_total * a2 * r;
    if spec.variant() == Variant::CentralMass {
        let central = masses.central().ok_or(Error::CentralMassMissing)?;
        grad[0] += 2.0 * circle_total * central * spec.kernel().eval_g(r)?;
    }
    Ok(grad)
}

/// Closed-form Hessian over `(r, alpha_1..alpha_n)`.
pub fn hessian(spec: &ProblemSpec, config: &CircularConfig) -> Result<HessianMatrix> {
    spec.validate_config(config)?;
    let masses = config.masses();
    let n = config.n();
    let r = config.radius();
    let alpha = config.angles();
    let a2 = spec.spin() * spec.spin();

    let mut mat = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in (i + 1)..n {
            let t = pair_term(spec.kernel(), r, alpha[i], alpha[j], true)?;
            let mm = masses.get(i) * masses.get(j);

            mat[(0, 0)] += 8.0 * mm * t.s * t.s * t.g_prime;

            // d^2/dr dalpha, antisymmetric between the two bodies.
            let cross = 2.0 * mm * t.delta * t.c * (t.g + 2.0 * r * t.s * t.g_prime);
            mat[(0, 1 + i)] += cross;
            mat[(1 + i, 0)] += cross;
            mat[(0, 1 + j)] -= cross;
            mat[(1 + j, 0)] -= cross;

            // Off-diagonal angular block; the diagonal is minus the row sum.
            let off = mm * (r * t.s * t.g - 2.0 * r * r * t.c * t.c * t.g_prime);
            mat[(1 + i, 1 + j)] += off;
            mat[(1 + j, 1 + i)] += off;
            mat[(1 + i, 1 + i)] -= off;
            mat[(1 + j, 1 + j)] -= off;
        }
    }
    let circle_total = masses.circle_total();
    mat[(0, 0)] -= 2.0 * circle_total * a2;
    if spec.variant() == Variant::CentralMass {
        let central = masses.central().ok_or(Error::CentralMassMissing)?;
        mat[(0, 0)] += 2.0 * circle_total * central * spec.kernel().eval_g_prime(r)?;
    }
    Ok(HessianMatrix { mat })
}

/// Concavity quadratic form evaluated through the assembled Hessian.
pub fn quadratic_form(
    spec: &ProblemSpec,
    config: &CircularConfig,
    probe: &HessianProbe,
) -> Result<f64> {
    if probe.gamma.len() != config.n() {
        return Err(Error::DimensionMismatch {
            reason: format!(
                "probe has {} angular entries for {} bodies",
                probe.gamma.len(),
                config.n()
            ),
        });
    }
    if !probe.rho.is_finite() || probe.gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidAngles {
            reason: "probe entries must be finite".to_string(),
        });
    }
    Ok(hessian(spec, config)?.quad_form(probe))
}

/// Per-body residuals of the stationarity system; both vectors vanish
/// exactly at relative equilibria.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub radial: Vec<f64>,
    pub tangential: Vec<f64>,
}

impl Residuals {
    /// Largest entry in absolute value across both vectors.
    pub fn max_abs(&self) -> f64 {
        self.radial
            .iter()
            .chain(self.tangential.iter())
            .fold(0.0, |acc, &v| acc.max(v.abs()))
    }
}

pub fn residuals(spec: &ProblemSpec, config: &CircularConfig) -> Result<Residuals> {
    spec.validate_config(config)?;
    let masses = config.masses();
    let n = config.n();
    let r = config.radius();
    let alpha = config.angles();
    let a2 = spec.spin() * spec.spin();

    let mut radial = vec![0.0; n];
    let mut tangential = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let t = pair_term(spec.kernel(), r, alpha[i], alpha[j], false)?;
            let mm = masses.get(i) * masses.get(j);
            radial[i] -= mm * t.s * t.g;
            radial[j] -= mm * t.s * t.g;
            let tangent = mm * r * t.delta * t.c * t.g;
            tangential[i] += tangent;
            tangential[j] -= tangent;
        }
    }
    let central_pull = match spec.variant() {
        Variant::CentralMass => {
            let central = config.masses().central().ok_or(Error::CentralMassMissing)?;
            central * spec.kernel().eval_g(r)?
        }
        _ => 0.0,
    };
    for i in 0..n {
        radial[i] += masses.get(i) * (a2 * r - central_pull);
    }
    Ok(Residuals { radial, tangential })
}

/// `A^2 r - m_central g(r)`; must be positive for a consistent central-mass
/// stationary point.
pub fn feasibility_margin(spec: &ProblemSpec, config: &CircularConfig) -> Result<f64> {
    if spec.variant() != Variant::CentralMass {
        return Err(Error::NotCentralMassVariant);
    }
    spec.validate_config(config)?;
    let central = config.masses().central().ok_or(Error::CentralMassMissing)?;
    let r = config.radius();
    Ok(spec.spin() * spec.spin() * r - central * spec.kernel().eval_g(r)?)
}
