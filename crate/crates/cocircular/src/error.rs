use thiserror::Error;

/// Errors produced by kernel evaluation, configuration validation and the
/// variational/dynamics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kernel evaluated at non-positive separation x = {x}")]
    NonPositiveSeparation { x: f64 },

    #[error("quadrature for the kernel primitive did not converge at x = {x}")]
    QuadratureFailure { x: f64 },

    #[error("kernel inadmissible: {reason} at x = {x}")]
    KernelInadmissible { x: f64, reason: String },

    #[error("masses must be strictly positive and finite (offending value {value})")]
    InvalidMass { value: f64 },

    #[error("at least two bodies are required, got {n}")]
    TooFewBodies { n: usize },

    #[error("radius must be strictly positive and finite, got {r}")]
    InvalidRadius { r: f64 },

    #[error("invalid angle list: {reason}")]
    InvalidAngles { reason: String },

    #[error("cyclic angular gap {gap} below collision-exclusion minimum {min}")]
    CollisionGap { gap: f64, min: f64 },

    #[error("body index {index} out of range for {n} bodies")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("chord requested between a body and itself (index {index})")]
    ChordSameBody { index: usize },

    #[error("spin must be strictly positive and finite, got {spin}")]
    InvalidSpin { spin: f64 },

    #[error("central mass required for the central-mass variant but absent")]
    CentralMassMissing,

    #[error("central mass present but the variant is not central-mass")]
    CentralMassUnexpected,

    #[error("curved variant requires the curved-hyperbolic kernel")]
    KernelVariantMismatch,

    #[error("operation only defined for the central-mass variant")]
    NotCentralMassVariant,

    #[error("configuration is not stationary: gradient norm {grad_norm} exceeds tolerance {tol}")]
    NotStationary { grad_norm: f64, tol: f64 },

    #[error("bodies {i} and {j} coincide (separation {separation})")]
    CoincidentBodies { i: usize, j: usize, separation: f64 },

    #[error("point violates the hyperboloid constraint: x1^2+x2^2-x3^2 = {value}")]
    OffHyperboloid { value: f64 },

    #[error("stored height z = {stored} disagrees with recomputed sqrt(1+rho^2) = {computed}")]
    HeightMismatch { stored: f64, computed: f64 },

    #[error("state is not tangent to the hyperboloid: p.v = {value} for body {index}")]
    NotTangent { index: usize, value: f64 },

    #[error("invalid integration parameters: {reason}")]
    InvalidIntegration { reason: String },

    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
