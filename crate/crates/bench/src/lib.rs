//! Fixtures shared by the benchmarks in `benches/`.

use std::f64::consts::PI;
use std::sync::Arc;

use nsrw_core::{make_grid, randomize, rough_data, sample_coefficients, Family, Grid, RandomModel, RingPartition};
pub use nsrw_core::{Integrator, SolverConfig, SpectralField};

/// Randomized rough data on a `dim`-dimensional grid of side `n`.
pub fn rough_field(dim: usize, n: usize) -> (Arc<Grid>, SpectralField) {
    let grid = make_grid(dim, n, 2.0 * PI).expect("benchmark grid");
    let part = RingPartition::new(&grid);
    let f = rough_data(&grid, 0.25, Default::default(), 1, Some(1.0)).expect("benchmark data");
    let draw = sample_coefficients(&RandomModel::new(Family::StandardGaussian, 2), part.max_ring(), 0);
    let fw = randomize(&f, &draw, &part).expect("randomized data");
    (grid, fw)
}

/// Solver settings at the dealiasing band.
pub fn solver_config(dim: usize, n: usize) -> SolverConfig {
    SolverConfig {
        dim,
        n_points: n,
        length: 2.0 * PI,
        cutoff: n as f64 / 3.0,
        t_final: 1.0,
        dt: 0.005,
        s: 0.25,
        gamma: -0.1,
        integrator: Integrator::IfRk4,
        substep_near_zero: false,
        snapshot_every: 10,
        nonlinear: true,
    }
}
