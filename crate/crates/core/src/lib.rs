//! Moment-closure laboratory for the gray radiative transfer equation in
//! slab geometry.
//!
//! The crate covers the full loop of a closure study:
//!
//! * [`kinetic`] — a discrete-ordinates reference solver for the kinetic
//!   equation, used to generate ground-truth moment trajectories;
//! * [`basis`] — Legendre polynomials, Gauss–Legendre quadrature and the
//!   projections connecting angular fields to moment vectors;
//! * [`closures`] — the P_N truncation, the filtered P_N source, the exact
//!   free-streaming gradient closure, and four learned closure forms
//!   (LM, LWM, LG, LGNM);
//! * [`mlp`] — a from-scratch fully connected network with tanh activations,
//!   reverse-mode gradients and Adam;
//! * [`training`] — dataset assembly from trajectories, losses, and the
//!   training loop;
//! * [`moment_solver`] — the closed-loop WENO5 / Lax–Friedrichs / SSP-RK3
//!   solver for the truncated moment system, with hyperbolicity diagnostics;
//! * [`scenarios`] — the benchmark catalog (constant, variable-scattering,
//!   Gaussian, wave-number and two-material problems).
//!
//! All numerical kernels are generic over the floating-point type through
//! [`Scalar`]; the aliases below fix `f64`, which is what the file formats
//! and the benchmark defaults use.

pub mod basis;
pub mod bench;
pub mod closures;
pub mod eig;
pub mod error;
pub mod grid;
pub mod io;
pub mod kinetic;
pub mod mlp;
pub mod moment_solver;
pub mod pipeline;
pub mod scalar;
pub mod scenarios;
pub mod spectral;
pub mod ssprk;
pub mod training;
pub mod weno;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default scalar used by the CLI, the file formats and the benchmarks.
pub type Real = f64;

pub type Quadrature = basis::Quadrature<Real>;
pub type MomentVector = basis::MomentVector<Real>;
pub type Grid = grid::Grid<Real>;
pub type AngularField = kinetic::AngularField<Real>;
pub type CrossSections = kinetic::CrossSections<Real>;
pub type MomentTrajectory = kinetic::MomentTrajectory<Real>;
pub type MlpModel = mlp::MlpModel<Real>;
pub type AdamState = mlp::AdamState<Real>;
pub type ClosureKind = closures::ClosureKind<Real>;
pub type Dataset = training::Dataset<Real>;
pub type SolverConfig = moment_solver::SolverConfig<Real>;
pub type MomentSolution = moment_solver::MomentSolution<Real>;
