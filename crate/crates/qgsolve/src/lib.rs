//! Pseudo-spectral solver and verification toolkit for the two-dimensional
//! dissipative quasi-geostrophic equation
//!
//! ```text
//! d_t theta + (-Lap)^alpha theta + div(theta u) = 0,   u = (-R2 theta, R1 theta),
//! ```
//!
//! on the periodic square, in the subcritical range `alpha` in `(1/2, 1)`.
//!
//! The crate has two halves. The solver half provides spectral fields and
//! multiplier operators ([`ops`]), Littlewood-Paley analysis and Besov-type
//! norms ([`besov`]), and two routes to a solution: Picard iteration on the
//! mild (Duhamel) formulation and an exponential time-differencing stepper
//! ([`mild`]). The verification half ([`probes`], [`gronwall`], [`battery`])
//! measures decay exponents, contraction factors, maximum principles and
//! a priori bounds of the computed solutions and compares them against their
//! predicted values.
//!
//! Most capabilities have a runnable demonstration under `examples/`:
//!
//! ```text
//! cargo run --release -p qgsolve --example linear_decay
//! cargo run --release -p qgsolve --example kernel_scaling
//! cargo run --release -p qgsolve --example besov_norms
//! cargo run --release -p qgsolve --example picard_iteration
//! cargo run --release -p qgsolve --example etd_simulation
//! cargo run --release -p qgsolve --example maximum_principle
//! cargo run --release -p qgsolve --example gronwall_bound
//! cargo run --release -p qgsolve --example persistence
//! cargo run --release -p qgsolve --example scaling_invariance
//! cargo run --release -p qgsolve --example bilinear_scaling
//! cargo run --release -p qgsolve --example mu0_calibration
//! ```
//!
//! A thin command-line front end (`qg`) drives the same library functions from
//! config files; see the crate README.

pub mod battery;
pub mod besov;
pub mod config;
pub mod error;
pub mod field;
pub mod grid;
pub mod gronwall;
pub mod mild;
pub mod ops;
pub mod params;
pub mod probes;
pub mod rng;
pub mod runner;
pub mod snapshot;
pub mod time;

pub use battery::{bilinear_battery_reports, run_battery, BatteryReport, CriterionReport};
pub use besov::{besov_norm, btilde_norm, lp_block, semigroup_characterization, BesovSpec, FilterBank};
pub use config::{InitSpec, RunConfig};
pub use error::{Error, Result};
pub use field::{transform_forward, transform_inverse, RealField, SpectralField};
pub use grid::Grid2D;
pub use gronwall::{volterra_solve, GronwallParams};
pub use mild::{
    bilinear_b, calibrate_mu0, contraction_holds, duhamel_linear, evolve_etd, picard_iterate,
    smallness_check, CalibrationRecord, CalibrationSetup, PicardResult, SmallnessReport,
};
pub use ops::{
    divergence, fractional_laplacian, kernel_field, kernel_norm, nonlinear_term, riesz_perp,
    riesz_perp_fields, riesz_transforms, semigroup_apply,
};
pub use params::SolverConfig;
pub use probes::{
    bilinear_estimate_probe, fit_loglog, kernel_scaling_report, max_principle_report,
    persistence_tracker, ProbeReport, TrackedNorm,
};
pub use rng::{random_bandlimited, random_power_law, CounterRng};
pub use runner::{run, RunSummary, Workflow};
pub use time::{etnu_norm, weighted_sup_norm, BaseNorm, TimeGrid, Trajectory, WeightedNormSpec};
