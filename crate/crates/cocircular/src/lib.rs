//! Co-circular relative equilibria of generalized n-body problems and the
//! hyperbolic curved n-body problem: stationary-point search on the reduced
//! potential, local-maximum certification, per-ordering uniqueness
//! experiments, and validation against the full equations of motion.
//!
//! Multi-start experiments run on rayon when the default `parallel` feature
//! is enabled; per-start random streams make parallel and sequential runs
//! produce identical reports.

pub mod config;
pub mod curved;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod solver;
pub mod variational;

pub use config::{
    enumerate_orderings, regular_ngon, CircularConfig, MassVector, OrderingId, DEFAULT_GAP_MIN,
};
pub use curved::{
    corotating_residual, curved_acceleration, kinematic_acceleration, lift, minkowski,
    CurvedPolygonConfig, HyperboloidPoint,
};
pub use dynamics::{
    central_mass_equilibrium_state, curved_equilibrium_state, curved_rhs,
    curved_rotation_deviation, integrate_curved, integrate_planar, orbit_residual_curved,
    orbit_residual_planar, origin_deviation, planar_rhs, planar_rotation_deviation,
    relative_equilibrium_state, write_curved_csv, write_planar_csv, CurvedOrbitCheck, CurvedState,
    CurvedTrajectory, PlanarOrbitCheck, PlanarState, PlanarTrajectory,
};
pub use error::{Error, Result};
pub use kernel::{Admissibility, InteractionKernel, KernelFamily};
pub use solver::{
    default_initial_config, initial_config_for_start, solve_stationary, uniqueness_experiment,
    uniqueness_experiment_sequential, verify_local_max, LocalMaxCertificate, SolveOptions,
    StartOutcome, StationaryReport, Termination, UniquenessReport, UniquenessVerdict,
};
pub use variational::{
    feasibility_margin, gradient, hessian, potential, quadratic_form, residuals, HessianMatrix,
    HessianProbe, ProblemSpec, Residuals, Variant,
};
