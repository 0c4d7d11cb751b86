//! Interaction kernels: the force factor `f`, its moment `g(x) = x f(x)`,
//! the derivative `g'` and an antiderivative `G` with `G' = g`.
//!
//! Admissible kernels have `f > 0` and strictly decreasing `g`; both are
//! certified by sampling on a log-spaced window since arbitrary parameter
//! combinations cannot be analyzed symbolically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sampling window for admissibility certification.
pub const DEFAULT_DOMAIN_LO: f64 = 1e-3;
pub const DEFAULT_DOMAIN_HI: f64 = 1e3;
/// Reference point where the quadrature-pinned antiderivative vanishes.
pub const DEFAULT_G_REF: f64 = 1.0;
/// Default number of admissibility samples.
pub const DEFAULT_ADMISSIBILITY_SAMPLES: usize = 512;

const QUADRATURE_TOL: f64 = 1e-12;
const QUADRATURE_MAX_DEPTH: u32 = 60;

/// Force-law family. `power_law` is `f(x) = x^-a`, `quasi_homogeneous` is
/// `f(x) = c1 x^-a + c2 x^-b`, and `curved_hyperbolic` is the reduced kernel
/// of the hyperbolic problem, `h(x) = 8 x^-3 (4 + x^2)^(-3/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    PowerLaw { a: f64 },
    QuasiHomogeneous { c1: f64, a: f64, c2: f64, b: f64 },
    CurvedHyperbolic,
}

/// A force law together with its admissibility window and the reference
/// point pinning the quadrature antiderivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionKernel {
    #[serde(flatten)]
    pub family: KernelFamily,
    #[serde(default = "default_domain_lo")]
    pub domain_lo: f64,
    #[serde(default = "default_domain_hi")]
    pub domain_hi: f64,
    #[serde(default = "default_g_ref")]
    pub g_ref: f64,
}

fn default_domain_lo() -> f64 {
    DEFAULT_DOMAIN_LO
}
fn default_domain_hi() -> f64 {
    DEFAULT_DOMAIN_HI
}
fn default_g_ref() -> f64 {
    DEFAULT_G_REF
}

/// Outcome of sampling-based admissibility certification.
#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible,
    /// First sample point violating a hypothesis, with the failed condition.
    Inadmissible { x: f64, reason: Violation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// `f(x) <= 0` at the reported point.
    ForceNotPositive,
    /// `g'(x) >= 0` at the reported point.
    MomentIncreasing,
}

impl Violation {
    pub fn describe(&self) -> &'static str {
        match self {
            Violation::ForceNotPositive => "f non-positive",
            Violation::MomentIncreasing => "g increasing",
        }
    }
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

impl InteractionKernel {
    pub fn power_law(a: f64) -> Self {
        Self::with_family(KernelFamily::PowerLaw { a })
    }

    pub fn quasi_homogeneous(c1: f64, a: f64, c2: f64, b: f64) -> Self {
        Self::with_family(KernelFamily::QuasiHomogeneous { c1, a, c2, b })
    }

    pub fn curved_hyperbolic() -> Self {
        Self::with_family(KernelFamily::CurvedHyperbolic)
    }

    fn with_family(family: KernelFamily) -> Self {
        InteractionKernel {
            family,
            domain_lo: DEFAULT_DOMAIN_LO,
            domain_hi: DEFAULT_DOMAIN_HI,
            g_ref: DEFAULT_G_REF,
        }
    }

    pub fn is_curved(&self) -> bool {
        matches!(self.family, KernelFamily::CurvedHyperbolic)
    }

    /// Force factor `f(x)`; the curved family returns `h(x)`.
    pub fn eval_f(&self, x: f64) -> Result<f64> {
        check_separation(x)?;
        Ok(match self.family {
            KernelFamily::PowerLaw { a } => x.powf(-a),
            KernelFamily::QuasiHomogeneous { c1, a, c2, b } => {
                c1 * x.powf(-a) + c2 * x.powf(-b)
            }
            KernelFamily::CurvedHyperbolic => 8.0 * x.powi(-3) * (4.0 + x * x).powf(-1.5),
        })
    }

    /// Force moment `g(x) = x f(x)`.
    pub fn eval_g(&self, x: f64) -> Result<f64> {
        Ok(x * self.eval_f(x)?)
    }

    /// Closed-form `dg/dx`, negative for admissible kernels.
    pub fn eval_g_prime(&self, x: f64) -> Result<f64> {
        check_separation(x)?;
        Ok(match self.family {
            KernelFamily::PowerLaw { a } => (1.0 - a) * x.powf(-a),
            KernelFamily::QuasiHomogeneous { c1, a, c2, b } => {
                c1 * (1.0 - a) * x.powf(-a) + c2 * (1.0 - b) * x.powf(-b)
            }
            KernelFamily::CurvedHyperbolic => {
                -8.0 * x.powi(-3) * (4.0 + x * x).powf(-2.5) * (8.0 + 5.0 * x * x)
            }
        })
    }

    /// Antiderivative `G` with `G'(x) = g(x)`.
    ///
    /// Power-law families use the closed form (`x^(2-a)/(2-a)`, or `ln x`
    /// when an exponent equals 2). The curved family has no such form and is
    /// integrated by adaptive Simpson quadrature from `g_ref`, pinned by
    /// `G(g_ref) = 0`.
    pub fn eval_primitive(&self, x: f64) -> Result<f64> {
        check_separation(x)?;
        match self.family {
            KernelFamily::PowerLaw { a } => Ok(power_primitive(1.0, a, x)),
            KernelFamily::QuasiHomogeneous { c1, a, c2, b } => {
                Ok(power_primitive(c1, a, x) + power_primitive(c2, b, x))
            }
            KernelFamily::CurvedHyperbolic => {
                adaptive_simpson(|t| self.eval_g(t).unwrap_or(f64::NAN), self.g_ref, x)
            }
        }
    }

    /// Certify `f > 0` and `g' < 0` on a log-spaced grid of `samples` points
    /// over `[domain_lo, domain_hi]`, reporting the first violation.
    pub fn check_admissible(&self, samples: usize) -> Admissibility {
        let samples = samples.max(2);
        let lo = self.domain_lo.ln();
        let hi = self.domain_hi.ln();
        for k in 0..samples {
            let t = k as f64 / (samples - 1) as f64;
            let x = (lo + t * (hi - lo)).exp();
            let f = match self.eval_f(x) {
                Ok(v) => v,
                Err(_) => {
                    return Admissibility::Inadmissible {
                        x,
                        reason: Violation::ForceNotPositive,
                    }
                }
            };
            if !(f > 0.0) || !f.is_finite() {
                return Admissibility::Inadmissible {
                    x,
                    reason: Violation::ForceNotPositive,
                };
            }
            let gp = self.eval_g_prime(x).unwrap_or(f64::NAN);
            if !(gp < 0.0) {
                return Admissibility::Inadmissible {
                    x,
                    reason: Violation::MomentIncreasing,
                };
            }
        }
        Admissibility::Admissible
    }

    /// `check_admissible` with the default sample count, as a `Result`.
    pub fn require_admissible(&self) -> Result<()> {
        match self.check_admissible(DEFAULT_ADMISSIBILITY_SAMPLES) {
            Admissibility::Admissible => Ok(()),
            Admissibility::Inadmissible { x, reason } => Err(Error::KernelInadmissible {
                x,
                reason: reason.describe().to_string(),
            }),
        }
    }
}

fn check_separation(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSeparation { x })
    }
}

/// Primitive of `c x^(1-e)`: `c x^(2-e)/(2-e)`, or `c ln x` when `e = 2`.
fn power_primitive(c: f64, e: f64, x: f64) -> f64 {
    if (e - 2.0).abs() < 1e-12 {
        c * x.ln()
    } else {
        c * x.powf(2.0 - e) / (2.0 - e)
    }
}

/// Adaptive Simpson quadrature of `f` over the oriented interval `[a, b]`.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_rule(a, b, fa, fm, fb);
    let value = simpson_recurse(&f, a, b, fa, fm, fb, whole, QUADRATURE_TOL, QUADRATURE_MAX_DEPTH);
    match value {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(Error::QuadratureFailure { x: b }),
    }
}

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return None;
    }
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}
