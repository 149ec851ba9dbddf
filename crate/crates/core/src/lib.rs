//! Numerical laboratory for the Navier–Stokes equations with randomized
//! rough initial data on a periodic box.
//!
//! The pieces, bottom up:
//!
//! * [`grid`], [`field`], [`spectral`]: periodic pseudo-spectral
//!   discretization and the Fourier multipliers (Leray projector, ring
//!   projections, Friedrichs cutoff, Sobolev symbols, dealiasing).
//! * [`randomization`] and [`data`]: ring-wise randomization of `H^{-s}`
//!   data and the deterministic test fields.
//! * [`heat`]: the heat semigroup and its smoothing estimates.
//! * [`stochastic`]: space-time norms of the free evolution and their
//!   Monte Carlo moments and Gaussian tails.
//! * [`solver`]: the Friedrichs-truncated fluctuation system, integrated
//!   with integrating-factor Runge–Kutta.
//! * [`diagnostics`]: energy, `∂_t w` dual norms and residuals.

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod heat;
pub mod randomization;
pub mod solver;
pub mod spectral;
pub mod stats;
pub mod stochastic;

pub use data::{rough_data, taylor_green, DataProfile};
pub use error::{Error, Result};
pub use field::{Direction, Space, SpectralField};
pub use grid::{make_grid, Grid};
pub use randomization::{
    hminus_s_norm, randomize, sample_coefficients, verify_subgaussian, CoefficientDraw, Family, RandomModel,
};
pub use solver::{Integrator, SolverConfig, Trajectory};
pub use spectral::{
    dealias, friedrichs_cutoff, leray_project, multiplier, ring_index, ring_project, Multiplier, RingPartition,
};
pub use stochastic::{NormSpec, TailFitResult};
