#![allow(dead_code)]

use std::sync::Arc;

use nsrw_core::{Grid, Space, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Real physical field with i.i.d. uniform values, returned in Fourier space.
pub fn white_field(grid: &Arc<Grid>, components: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = (0..components)
        .map(|_| {
            (0..grid.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
                .collect()
        })
        .collect();
    SpectralField::from_components(grid, comps, Space::Physical)
        .unwrap()
        .to_fourier()
        .unwrap()
}

/// Single real Fourier pair `a e^{iξ·x} + conj` placed in component `comp`.
pub fn single_mode(grid: &Arc<Grid>, m: &[i64], comp: usize, amplitude: f64) -> SpectralField {
    let mut f = SpectralField::zero_vector(grid, Space::Fourier);
    let idx = grid.index_of(m).unwrap();
    let neg: Vec<i64> = m.iter().map(|v| -v).collect();
    let jdx = grid.index_of(&neg).unwrap();
    f.components_mut()[comp][idx] = Complex64::new(amplitude, 0.0);
    f.components_mut()[comp][jdx] = Complex64::new(amplitude, 0.0);
    f
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
