//! Initial data used by the experiments: rough divergence-free fields with
//! a prescribed spectral profile, and the Taylor–Green vortex.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Space, SpectralField};
use crate::grid::Grid;
use crate::randomization::hminus_s_norm;

/// Magnitude of `f̂(ξ)` as a function of `|ξ|²`, for data of regularity
/// `H^{-s}` with spectral tilt `tilt` beyond the `d/2` borderline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataProfile {
    /// `(1 + |ξ|²)^{(s - d/2 - tilt)/2}`
    Bracket { tilt: f64 },
    /// `|ξ|^{s - d/2 - tilt}`; scale free, so heat-flow decay rates show a
    /// clean power law on a finite lattice.
    Homogeneous { tilt: f64 },
}

impl Default for DataProfile {
    fn default() -> Self {
        DataProfile::Bracket { tilt: 0.05 }
    }
}

impl DataProfile {
    pub fn amplitude(&self, ksq: f64, s: f64, d: usize) -> f64 {
        if ksq == 0.0 {
            return 0.0;
        }
        match *self {
            DataProfile::Bracket { tilt } => (1.0 + ksq).powf(0.5 * (s - 0.5 * d as f64 - tilt)),
            DataProfile::Homogeneous { tilt } => ksq.powf(0.5 * (s - 0.5 * d as f64 - tilt)),
        }
    }
}

/// Real, mean-zero, divergence-free field whose coefficient magnitudes
/// follow `profile` exactly and whose directions are random (Leray
/// projected Gaussian vectors, seeded by `seed`). Nyquist modes are zero.
/// When `normalize_to` is set, the result is scaled so that
/// `‖f‖_{H^{-s}}` equals it.
pub fn rough_data(
    grid: &Arc<Grid>,
    s: f64,
    profile: DataProfile,
    seed: u64,
    normalize_to: Option<f64>,
) -> Result<SpectralField> {
    let d = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // keep data streams away from coefficient streams of the same seed
    rng.set_stream(u64::MAX);
    let mut f = SpectralField::zero_vector(grid, Space::Fourier);
    let comps = f.components_mut();
    for idx in 1..grid.len() {
        let j = grid.conjugate_index(idx);
        if j < idx || grid.is_nyquist(idx) {
            continue;
        }
        let xi = grid.mode(idx);
        let ksq = grid.ksq()[idx];
        let mut v = [Complex64::default(); 3];
        let mut norm = 0.0;
        // redraw on the (measure zero) event of a vanishing projection
        while norm < 1e-8 {
            for a in v.iter_mut().take(d) {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *a = Complex64::new(re, im);
            }
            let dot: Complex64 = (0..d).map(|a| v[a] * xi[a]).sum();
            for a in 0..d {
                v[a] -= dot * (xi[a] / ksq);
            }
            norm = (0..d).map(|a| v[a].norm_sqr()).sum::<f64>().sqrt();
        }
        let amp = profile.amplitude(ksq, s, d) / norm;
        for a in 0..d {
            comps[a][idx] = v[a] * amp;
            comps[a][j] = (v[a] * amp).conj();
        }
    }
    if let Some(target) = normalize_to {
        let n = hminus_s_norm(&f, s)?;
        if n == 0.0 {
            return Err(Error::InvalidArgument("profile produced a zero field".into()));
        }
        f.scale_in_place(target / n);
    }
    Ok(f)
}

/// Taylor–Green vortex `(sin x cos y, -cos x sin y)` (third component 0 in
/// 3D), sampled in physical space and returned in Fourier space. On a box of
/// period 2π the heat flow of this field, `e^{-2t}` times itself, solves the
/// full Navier–Stokes system.
pub fn taylor_green(grid: &Arc<Grid>, amplitude: f64) -> Result<SpectralField> {
    let d = grid.dim();
    let f = SpectralField::from_fn(grid, d, |x| {
        let mut v = vec![0.0; d];
        v[0] = amplitude * x[0].sin() * x[1].cos();
        v[1] = -amplitude * x[0].cos() * x[1].sin();
        v
    });
    let mut fh = f.to_fourier()?;
    fh.symmetrize()?;
    Ok(fh)
}
