//! Ring-wise randomization of rough data: `f^ω = Σ_n l_n(ω) Δ̃_n f` with
//! independent, mean-zero, sub-Gaussian coefficients `l_n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Space, SpectralField};
use crate::spectral::{check_partition, sobolev_norm, RingPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// ±1 with equal probability.
    Rademacher,
    /// N(0, 1).
    StandardGaussian,
    /// Uniform on [-1, 1].
    UniformSymmetric,
}

impl Family {
    /// Smallest `c` with `E e^{γX} ≤ e^{cγ²}` for all real γ.
    pub fn subgaussian_constant(self) -> f64 {
        match self {
            Family::Rademacher | Family::StandardGaussian => 0.5,
            Family::UniformSymmetric => 1.0 / 6.0,
        }
    }

    pub fn variance(self) -> f64 {
        match self {
            Family::Rademacher | Family::StandardGaussian => 1.0,
            Family::UniformSymmetric => 1.0 / 3.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModel {
    pub family: Family,
    pub c: f64,
    pub master_seed: u64,
}

impl RandomModel {
    pub fn new(family: Family, master_seed: u64) -> Self {
        Self {
            family,
            c: family.subgaussian_constant(),
            master_seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientDraw {
    pub sample_index: u64,
    /// `values[n - 1]` is `l_n`.
    pub values: Vec<f64>,
}

impl CoefficientDraw {
    /// The draw with every `l_n = 1`.
    pub fn identity(max_ring: usize) -> Self {
        Self {
            sample_index: 0,
            values: vec![1.0; max_ring],
        }
    }

    pub fn get(&self, ring: usize) -> f64 {
        self.values[ring - 1]
    }
}

/// Independent stream for ring `ring` of sample `sample_index`. ChaCha is
/// counter based, so each (seed, sample, ring) triple addresses a disjoint
/// block of the keystream regardless of the order in which draws are made.
fn ring_stream(master_seed: u64, sample_index: u64, ring: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(sample_index);
    rng.set_word_pos((ring as u128) << 32);
    rng
}

fn draw_one(family: Family, rng: &mut ChaCha8Rng) -> f64 {
    match family {
        Family::Rademacher => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        Family::StandardGaussian => rng.sample(StandardNormal),
        Family::UniformSymmetric => rng.random_range(-1.0..=1.0),
    }
}

pub fn sample_coefficients(model: &RandomModel, max_ring: usize, sample_index: u64) -> CoefficientDraw {
    let values = (1..=max_ring)
        .map(|n| draw_one(model.family, &mut ring_stream(model.master_seed, sample_index, n)))
        .collect();
    CoefficientDraw { sample_index, values }
}

/// Multiplies every coefficient in ring `n` by `l_n`.
pub fn randomize(f: &SpectralField, draw: &CoefficientDraw, partition: &RingPartition) -> Result<SpectralField> {
    f.expect_space(Space::Fourier)?;
    check_partition(f, partition)?;
    if draw.values.len() < partition.max_ring() {
        return Err(Error::InvalidArgument(format!(
            "draw has {} coefficients, partition needs {}",
            draw.values.len(),
            partition.max_ring()
        )));
    }
    let idx_ring = partition.indices();
    Ok(f.apply_symbol(|idx| draw.values[idx_ring[idx] as usize - 1]))
}

/// `‖f‖_{H^{-s}} = (Σ (1+|ξ|²)^{-s} |f̂|² · vol)^{1/2}`.
pub fn hminus_s_norm(f: &SpectralField, s: f64) -> Result<f64> {
    sobolev_norm(f, -s)
}

#[derive(Clone, Debug, Serialize)]
pub struct SubGaussianReport {
    pub family: Family,
    pub c: f64,
    pub gammas: Vec<f64>,
    /// `log E e^{γX} - cγ²` per γ.
    pub margins: Vec<f64>,
    pub max_margin: f64,
}

impl SubGaussianReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_margin <= tol
    }
}

pub fn verify_subgaussian(model: &RandomModel, gammas: &[f64]) -> Result<SubGaussianReport> {
    let mut margins = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let log_mgf = match model.family {
            Family::Rademacher => log_cosh(g),
            Family::StandardGaussian => 0.5 * g * g,
            Family::UniformSymmetric => {
                let m = adaptive_simpson(&|x: f64| 0.5 * (g * x).exp(), -1.0, 1.0, 1e-15)?;
                m.ln()
            }
        };
        margins.push(log_mgf - model.c * g * g);
    }
    let max_margin = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SubGaussianReport {
        family: model.family,
        c: model.c,
        gammas: gammas.to_vec(),
        margins,
        max_margin,
    })
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Adaptive Simpson quadrature with a relative tolerance.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 50;
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        Some(
            recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?
                + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?,
        )
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::QuadratureFailure(format!("simpson on [{a}, {b}]")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn rademacher_support_and_determinism() {
        let m = RandomModel::new(Family::Rademacher, 42);
        let a = sample_coefficients(&m, 500, 3);
        assert!(a.values.iter().all(|&v| v == 1.0 || v == -1.0));
        assert_eq!(a, sample_coefficients(&m, 500, 3));
        assert_ne!(a, sample_coefficients(&m, 500, 4));
        // a prefix of a longer draw is the shorter draw
        assert_eq!(sample_coefficients(&m, 100, 3).values[..], a.values[..100]);
    }

    #[test]
    fn gaussian_variance_of_first_coefficient() {
        let m = RandomModel::new(Family::StandardGaussian, 7);
        let xs: Vec<f64> = (0..100_000).map(|i| sample_coefficients(&m, 1, i).values[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(mean.abs() < 3.0 / (xs.len() as f64).sqrt(), "mean {mean}");
        assert!((0.97..=1.03).contains(&var), "variance {var}");
    }

    #[test]
    fn uniform_mean_and_range() {
        let m = RandomModel::new(Family::UniformSymmetric, 1);
        let xs: Vec<f64> = (0..100_000).map(|i| sample_coefficients(&m, 1, i).values[0]).collect();
        assert!(xs.iter().all(|x| x.abs() <= 1.0));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (1.0f64 / 3.0).sqrt();
        assert!(mean.abs() < 3.0 * sd / (xs.len() as f64).sqrt());
    }

    #[test]
    fn subgaussian_margins() {
        let gammas: Vec<f64> = (0..200).map(|i| -10.0 + 20.0 * i as f64 / 199.0).collect();
        for fam in [Family::Rademacher, Family::StandardGaussian, Family::UniformSymmetric] {
            let r = verify_subgaussian(&RandomModel::new(fam, 0), &gammas).unwrap();
            assert!(r.holds(1e-9), "{fam:?} margin {}", r.max_margin);
        }
        let g = verify_subgaussian(&RandomModel::new(Family::StandardGaussian, 0), &gammas).unwrap();
        assert!(g.margins.iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn uniform_quadrature_matches_closed_form() {
        for g in [-7.3, -0.01, 0.5, 4.0, 10.0] {
            let q = adaptive_simpson(&|x: f64| 0.5 * (g * x).exp(), -1.0, 1.0, 1e-15).unwrap();
            let exact = f64::sinh(g) / g;
            assert!((q - exact).abs() <= 1e-13 * exact);
        }
    }

    #[test]
    fn too_small_c_is_detected() {
        let mut m = RandomModel::new(Family::Rademacher, 0);
        m.c = 0.4;
        let r = verify_subgaussian(&m, &[0.5, 1.0, 2.0]).unwrap();
        assert!(!r.holds(1e-9));
    }

    #[test]
    fn randomize_rejects_foreign_partition() {
        let g1 = make_grid(2, 8, 2.0 * PI).unwrap();
        let g2 = make_grid(2, 16, 2.0 * PI).unwrap();
        let p = RingPartition::new(&g2);
        let f = SpectralField::zero_vector(&g1, Space::Fourier);
        let draw = CoefficientDraw::identity(p.max_ring());
        assert_eq!(randomize(&f, &draw, &p), Err(Error::GridMismatch));
    }
}
