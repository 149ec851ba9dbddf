//! Space-time norms of the free evolution `t^γ (-Δ)^{σ/2} e^{tΔ} f^ω`, and
//! Monte Carlo estimates of their moments and tails over the randomization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Direction, Space, SpectralField};
use crate::randomization::{hminus_s_norm, randomize, sample_coefficients, RandomModel};
use crate::spectral::{fractional_symbol, RingPartition};
use crate::stats::{geomspace, linear_fit, power_law_segment, power_law_segments};

/// Exponents of a weighted space-time norm `‖t^γ (-Δ)^{σ/2} e^{tΔ} f‖_{L^q_t L^p_x}`
/// together with the data regularity `s` and the moment order `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub gamma: f64,
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub t_final: f64,
}

impl NormSpec {
    /// `(σ + s − 2γ)·q`, which must stay below 2.
    pub fn admissibility_margin(&self) -> f64 {
        (self.sigma + self.s - 2.0 * self.gamma) * self.q
    }

    /// Reason the spec is inadmissible, if it is.
    pub fn inadmissibility(&self) -> Option<String> {
        if !(self.r >= self.p && self.p >= self.q && self.q >= 2.0) {
            return Some(format!(
                "need r >= p >= q >= 2, got r = {}, p = {}, q = {}",
                self.r, self.p, self.q
            ));
        }
        if self.sigma < 0.0 || self.s < 0.0 {
            return Some("sigma and s must be nonnegative".into());
        }
        if !(self.t_final > 0.0) {
            return Some(format!("horizon must be positive, got {}", self.t_final));
        }
        let m = self.admissibility_margin();
        if !(m < 2.0) {
            return Some(format!("(sigma + s - 2 gamma) q = {m} is not below 2"));
        }
        None
    }
}

pub fn check_admissible(spec: &NormSpec) -> bool {
    spec.inadmissibility().is_none()
}

/// Geometric time nodes on `(0, T]` with a power-law head on `[0, t_0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeQuadrature {
    nodes: Vec<f64>,
}

impl TimeQuadrature {
    pub const PER_DECADE: usize = 64;
    pub const DECADES: usize = 6;

    /// `per_decade` nodes per decade from `T·10^{-decades}` to `T`.
    pub fn geometric(t_final: f64, per_decade: usize, decades: usize) -> Self {
        let lo = t_final * 10f64.powi(-(decades as i32));
        Self {
            nodes: geomspace(lo, t_final, per_decade * decades + 1),
        }
    }

    pub fn standard(t_final: f64) -> Self {
        Self::geometric(t_final, Self::PER_DECADE, Self::DECADES)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `∫_0^T φ dt` from samples at the nodes: log-log interpolation between
    /// nodes and an exact power law, fitted to the first two nodes, on
    /// `[0, t_0]`.
    pub fn integrate(&self, phi: &[f64]) -> Result<f64> {
        let t = &self.nodes;
        let body = power_law_segments(t, phi);
        let (t0, t1, f0, f1) = (t[0], t[1], phi[0], phi[1]);
        let head = if f0 <= 0.0 || f1 <= 0.0 {
            f0.max(0.0) * t0
        } else {
            let alpha = (f1 / f0).ln() / (t1 / t0).ln();
            if alpha <= -1.0 {
                return Err(Error::DivergentIntegral(format!(
                    "integrand behaves like t^{alpha:.3} near t = 0"
                )));
            }
            f0 * t0 / (alpha + 1.0)
        };
        Ok(head + body)
    }
}

/// Spatial operator applied before the heat flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpatialOperator {
    /// `(-Δ)^{σ/2}`
    FractionalLaplacian(f64),
    /// `I + (-Δ)^{σ/2}`
    IdentityPlusFractional(f64),
}

impl SpatialOperator {
    fn symbol(self, ksq: f64) -> f64 {
        match self {
            SpatialOperator::FractionalLaplacian(sigma) => fractional_symbol(ksq, sigma),
            SpatialOperator::IdentityPlusFractional(sigma) => 1.0 + fractional_symbol(ksq, sigma),
        }
    }
}

/// `(∫_0^T t^{qγ} ‖A e^{tΔ} f‖_{L^p_x}^q dt)^{1/q}` by quadrature.
pub fn weighted_space_time_norm(
    f: &SpectralField,
    op: SpatialOperator,
    gamma: f64,
    p: f64,
    q: f64,
    quad: &TimeQuadrature,
) -> Result<f64> {
    f.expect_space(Space::Fourier)?;
    if gamma * q <= -1.0 {
        return Err(Error::DivergentIntegral(format!(
            "time weight t^{} is not integrable at 0",
            gamma * q
        )));
    }
    let g = f.grid().clone();
    let ksq = g.ksq();
    let base = f.apply_symbol(|idx| op.symbol(ksq[idx]));
    if base.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut phi = Vec::with_capacity(quad.nodes().len());
    for &t in quad.nodes() {
        let heat = g.heat_symbol(t);
        let work = base.apply_symbol(|idx| heat[idx]);
        let lp = if p == 2.0 {
            work.l2_norm()
        } else {
            work.into_transformed(Direction::Inverse)?.lp_norm(p)?
        };
        phi.push(t.powf(q * gamma) * lp.powf(q));
    }
    Ok(quad.integrate(&phi)?.powf(1.0 / q))
}

/// The space-time norm of `spec` for one realization `f_omega`.
pub fn space_time_norm(f_omega: &SpectralField, spec: &NormSpec, quad: &TimeQuadrature) -> Result<f64> {
    if let Some(why) = spec.inadmissibility() {
        return Err(Error::Inadmissible(why));
    }
    weighted_space_time_norm(
        f_omega,
        SpatialOperator::FractionalLaplacian(spec.sigma),
        spec.gamma,
        spec.p,
        spec.q,
        quad,
    )
}

/// Space-time norms of `M` independent randomizations of `f`, in sample
/// index order. The result does not depend on the number of worker threads.
pub fn sample_space_time_norms(
    f: &SpectralField,
    model: &RandomModel,
    spec: &NormSpec,
    samples: usize,
    first_index: u64,
) -> Result<Vec<f64>> {
    if let Some(why) = spec.inadmissibility() {
        return Err(Error::Inadmissible(why));
    }
    let partition = RingPartition::new(f.grid());
    let quad = TimeQuadrature::standard(spec.t_final);
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let draw = sample_coefficients(model, partition.max_ring(), first_index + i);
            let fw = randomize(f, &draw, &partition)?;
            space_time_norm(&fw, spec, &quad)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TailFitResult {
    pub lambda_grid: Vec<f64>,
    pub empirical_prob: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub r_squared: f64,
    /// Number of grid points inside the fit window.
    pub fit_points: usize,
    pub m: usize,
    pub data_norm: f64,
    pub median: f64,
    pub p995: f64,
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `#{x ≥ λ} / M` for every λ.
pub fn empirical_tail(samples: &[f64], lambda_grid: &[f64]) -> Vec<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    lambda_grid
        .iter()
        .map(|&lam| {
            let below = sorted.partition_point(|&x| x < lam);
            (sorted.len() - below) as f64 / m
        })
        .collect()
}

/// Number of λ points spanning median to 99.5th percentile.
pub const LAMBDA_POINTS: usize = 40;

/// Fits `log P̂(λ) = log C₁ − C₂ λ²/‖f‖²` over the λ with
/// `5/M ≤ P̂ ≤ 0.5`.
pub fn fit_gaussian_tail(samples: &[f64], data_norm: f64) -> Result<TailFitResult> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::DegenerateFit("need at least two samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[m - 1] {
        return Err(Error::DegenerateFit("all samples identical".into()));
    }
    if !(data_norm > 0.0) {
        return Err(Error::DegenerateFit("data norm is zero".into()));
    }
    let median = quantile(&sorted, 0.5);
    let p995 = quantile(&sorted, 0.995);
    if !(p995 > median) {
        return Err(Error::DegenerateFit("median equals the 99.5th percentile".into()));
    }
    let lambda_grid: Vec<f64> = (0..LAMBDA_POINTS)
        .map(|i| median + (p995 - median) * i as f64 / (LAMBDA_POINTS - 1) as f64)
        .collect();
    let empirical_prob = empirical_tail(samples, &lambda_grid);
    let lo = 5.0 / m as f64;
    let (x, y): (Vec<f64>, Vec<f64>) = lambda_grid
        .iter()
        .zip(&empirical_prob)
        .filter(|(_, &p)| p >= lo && p <= 0.5)
        .map(|(&l, &p)| (l * l / (data_norm * data_norm), p.ln()))
        .unzip();
    if x.len() < 3 {
        return Err(Error::DegenerateFit(format!("only {} λ values in the fit window", x.len())));
    }
    let fit = linear_fit(&x, &y);
    Ok(TailFitResult {
        lambda_grid,
        empirical_prob,
        c1: fit.intercept.exp(),
        c2: -fit.slope,
        r_squared: fit.r_squared,
        fit_points: x.len(),
        m,
        data_norm,
        median,
        p995,
    })
}

/// Draws `M` randomizations of `f`, evaluates the space-time norm of each,
/// and fits a Gaussian tail to the empirical exceedance probabilities.
pub fn monte_carlo_tails(f: &SpectralField, model: &RandomModel, spec: &NormSpec, m: usize) -> Result<TailFitResult> {
    if m < 200 {
        return Err(Error::InvalidArgument(format!("need at least 200 samples, got {m}")));
    }
    let samples = sample_space_time_norms(f, model, spec, m, 0)?;
    fit_gaussian_tail(&samples, hminus_s_norm(f, spec.s)?)
}

/// `(mean X^r)^{1/r}` over the samples.
pub fn empirical_moment(samples: &[f64], r: f64) -> f64 {
    let mean = samples.iter().map(|x| x.powf(r)).sum::<f64>() / samples.len() as f64;
    mean.powf(1.0 / r)
}

/// Monte Carlo estimate of `(E‖·‖^r)^{1/r} / ‖f‖_{H^{-s}}` with `r = spec.r`.
pub fn moment_bound_check(f: &SpectralField, model: &RandomModel, spec: &NormSpec, m: usize) -> Result<f64> {
    if m < 200 {
        return Err(Error::InvalidArgument(format!("need at least 200 samples, got {m}")));
    }
    let data_norm = hminus_s_norm(f, spec.s)?;
    if data_norm == 0.0 {
        return Ok(0.0);
    }
    let samples = sample_space_time_norms(f, model, spec, m, 0)?;
    Ok(empirical_moment(&samples, spec.r) / data_norm)
}

/// Integral of `t^a` on `[lo, hi]`; exposed for closed-form checks.
pub fn power_integral(a: f64, lo: f64, hi: f64) -> f64 {
    power_law_segment(lo, hi, lo.powf(a), hi.powf(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(sigma: f64, s: f64, gamma: f64, q: f64) -> NormSpec {
        NormSpec {
            gamma,
            sigma,
            p: q,
            q,
            r: q,
            s,
            t_final: 1.0,
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(check_admissible(&spec(0.0, 0.25, 0.0, 4.0)));
        assert!(!check_admissible(&spec(0.5, 0.25, 0.0, 4.0)));
        assert!(!check_admissible(&spec(0.5, 0.25, -0.1, 4.0)));
        assert!(check_admissible(&spec(0.5, 0.25, 0.2, 4.0)));
        let mut bad = spec(0.0, 0.25, 0.0, 4.0);
        bad.q = 1.0;
        bad.p = 1.0;
        assert!(!check_admissible(&bad));
        bad = spec(0.0, 0.25, 0.0, 4.0);
        bad.r = 3.0;
        assert!(!check_admissible(&bad));
    }

    #[test]
    fn quadrature_head_handles_singular_power() {
        let q = TimeQuadrature::standard(2.0);
        let phi: Vec<f64> = q.nodes().iter().map(|t| t.powf(-0.7)).collect();
        let exact = 2f64.powf(0.3) / 0.3;
        assert!((q.integrate(&phi).unwrap() - exact).abs() < 1e-10 * exact);
        let bad: Vec<f64> = q.nodes().iter().map(|t| t.powf(-1.2)).collect();
        assert!(matches!(q.integrate(&bad), Err(Error::DivergentIntegral(_))));
    }

    #[test]
    fn tail_probabilities_are_monotone() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 100.0).collect();
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let p = empirical_tail(&xs, &grid);
        assert!(p.windows(2).all(|w| w[1] <= w[0]));
        assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn zero_samples_have_zero_tail() {
        let xs = vec![0.0; 300];
        let p = empirical_tail(&xs, &[0.1, 1.0]);
        assert_eq!(p, vec![0.0, 0.0]);
        assert!(matches!(fit_gaussian_tail(&xs, 1.0), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn moment_of_constant() {
        assert!((empirical_moment(&[2.0; 10], 8.0) - 2.0).abs() < 1e-14);
    }
}
