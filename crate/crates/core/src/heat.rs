//! The heat semigroup `e^{tΔ}` as an exact multiplier, and numerical
//! checks of the smoothing estimates it satisfies on `H^{-s}` data.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Space, SpectralField};
use crate::grid::Grid;
use crate::randomization::hminus_s_norm;
use crate::spectral::{derivative_l2_norm, derivative_symbol};
use crate::stats::{geomspace, linear_fit};

/// Multiplies by `e^{-t|ξ|²}`.
pub fn heat_semigroup(field: &SpectralField, t: f64) -> Result<SpectralField> {
    let mut out = field.clone();
    heat_semigroup_in_place(&mut out, t)?;
    Ok(out)
}

pub fn heat_semigroup_in_place(field: &mut SpectralField, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    field.expect_space(Space::Fourier)?;
    if t == 0.0 {
        return Ok(());
    }
    let g = field.grid().clone();
    let ksq = g.ksq();
    field.apply_symbol_in_place(|idx| (-t * ksq[idx]).exp());
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    Linf,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub k: u32,
    pub norm_kind: NormKind,
    pub times: Vec<f64>,
    /// `‖∇^k e^{tΔ} f‖` at each time.
    pub values: Vec<f64>,
    /// value / bound at each time.
    pub ratios: Vec<f64>,
    /// Largest ratio: the smallest C with value ≤ C·bound on the grid.
    pub bound_constant: f64,
    /// For L^∞ only: ratios against the square-root form of the bound.
    pub sqrt_form_ratios: Option<Vec<f64>>,
    pub sqrt_form_bound_constant: Option<f64>,
    /// Log-log slope on the small-time window.
    pub fitted_slope: f64,
    pub fit_window: (f64, f64),
}

/// Small-time fitting window `[t_min, 10 t_min]`, `t_min = 10 / k_max²`:
/// the decade where the resolved band still dominates the decay.
pub fn fit_window(grid: &Grid) -> (f64, f64) {
    let t_min = 10.0 / (grid.k_max() * grid.k_max());
    (t_min, 10.0 * t_min)
}

const FIT_POINTS: usize = 16;

/// `‖∇^k e^{tΔ} f‖_{L²}`.
pub fn heat_l2(f: &SpectralField, k: u32, t: f64) -> Result<f64> {
    derivative_l2_norm(&heat_semigroup(f, t)?, k)
}

/// `‖∇^k e^{tΔ} f‖_{L^∞}` as the maximum over grid points.
pub fn heat_linf(f: &SpectralField, k: u32, t: f64) -> Result<f64> {
    linf_derivative_norm(&heat_semigroup(f, t)?, k)
}

/// Max over grid points of the Euclidean norm of the derivative tensor
/// `∇^k f`.
pub fn linf_derivative_norm(f: &SpectralField, k: u32) -> Result<f64> {
    f.expect_space(Space::Fourier)?;
    let g = f.grid().clone();
    let mut comps: Vec<Vec<Complex64>> = f.components().to_vec();
    for _ in 0..k {
        let mut next = Vec::with_capacity(comps.len() * g.dim());
        for c in &comps {
            for a in 0..g.dim() {
                next.push(
                    c.iter()
                        .enumerate()
                        .map(|(idx, v)| v * Complex64::new(0.0, derivative_symbol(&g, idx, a)))
                        .collect(),
                );
            }
        }
        comps = next;
    }
    SpectralField::from_components(&g, comps, Space::Fourier)?
        .into_transformed(crate::field::Direction::Inverse)?
        .lp_norm(f64::INFINITY)
}

fn safe_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be positive and increasing".into()));
    }
    Ok(())
}

fn fitted_slope<F: Fn(f64) -> Result<f64>>(grid: &Grid, norm: F) -> Result<f64> {
    let (lo, hi) = fit_window(grid);
    let ts = geomspace(lo, hi, FIT_POINTS);
    let mut x = Vec::with_capacity(ts.len());
    let mut y = Vec::with_capacity(ts.len());
    for t in ts {
        let v = norm(t)?;
        if v > 0.0 {
            x.push(t.ln());
            y.push(v.ln());
        }
    }
    Ok(linear_fit(&x, &y).slope)
}

/// L² smoothing estimate: `‖∇^k e^{tΔ} f‖_{L²} ≲ (1 + t^{-(s+k)/2}) ‖f‖_{H^{-s}}`.
pub fn decay_report_l2(f: &SpectralField, s: f64, k: u32, t_grid: &[f64]) -> Result<DecayReport> {
    check_grid(t_grid)?;
    let data_norm = hminus_s_norm(f, s)?;
    let exponent = 0.5 * (s + k as f64);
    let values = t_grid.iter().map(|&t| heat_l2(f, k, t)).collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = t_grid
        .iter()
        .zip(&values)
        .map(|(&t, &v)| safe_ratio(v, (1.0 + t.powf(-exponent)) * data_norm))
        .collect();
    Ok(DecayReport {
        k,
        norm_kind: NormKind::L2,
        times: t_grid.to_vec(),
        bound_constant: ratios.iter().copied().fold(0.0, f64::max),
        values,
        ratios,
        sqrt_form_ratios: None,
        sqrt_form_bound_constant: None,
        fitted_slope: fitted_slope(f.grid(), |t| heat_l2(f, k, t))?,
        fit_window: fit_window(f.grid()),
    })
}

/// L^∞ estimate, reported both against `max{t^{-1}, t^{-(k+s+d/2)}}` and
/// against its square root.
pub fn decay_report_linf(f: &SpectralField, s: f64, k: u32, t_grid: &[f64]) -> Result<DecayReport> {
    check_grid(t_grid)?;
    let d = f.grid().dim() as f64;
    let data_norm = hminus_s_norm(f, s)?;
    let values = t_grid.iter().map(|&t| heat_linf(f, k, t)).collect::<Result<Vec<_>>>()?;
    let bracket = |t: f64| f64::max(1.0 / t, t.powf(-(k as f64 + s + 0.5 * d)));
    let ratios: Vec<f64> = t_grid
        .iter()
        .zip(&values)
        .map(|(&t, &v)| safe_ratio(v, bracket(t) * data_norm))
        .collect();
    let sqrt_ratios: Vec<f64> = t_grid
        .iter()
        .zip(&values)
        .map(|(&t, &v)| safe_ratio(v, bracket(t).sqrt() * data_norm))
        .collect();
    Ok(DecayReport {
        k,
        norm_kind: NormKind::Linf,
        times: t_grid.to_vec(),
        bound_constant: ratios.iter().copied().fold(0.0, f64::max),
        values,
        ratios,
        sqrt_form_bound_constant: Some(sqrt_ratios.iter().copied().fold(0.0, f64::max)),
        sqrt_form_ratios: Some(sqrt_ratios),
        fitted_slope: fitted_slope(f.grid(), |t| heat_linf(f, k, t))?,
        fit_window: fit_window(f.grid()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearEstimates {
    pub l2: DecayReport,
    pub linf: DecayReport,
}

pub fn check_linear_estimates(f_omega: &SpectralField, s: f64, k: u32, t_grid: &[f64]) -> Result<LinearEstimates> {
    if k > 2 {
        return Err(Error::InvalidArgument(format!("derivative order must be 0, 1 or 2, got {k}")));
    }
    Ok(LinearEstimates {
        l2: decay_report_l2(f_omega, s, k, t_grid)?,
        linf: decay_report_linf(f_omega, s, k, t_grid)?,
    })
}

/// Suprema over the time grid of the normalized quantities that the free
/// evolution `g = e^{tΔ} f^ω` must keep bounded.
#[derive(Clone, Debug, Serialize)]
pub struct CondGReport {
    pub times: Vec<f64>,
    /// `sup_t ‖g‖_{L²} / (1 + t^{-s/2})`
    pub l2_sup: f64,
    /// `sup_t ‖∇^k g‖_{L^∞} / max{t^{-1}, t^{-(k+s+d/2)}}^{1/2}` for k = 0, 1.
    pub linf_sup: [f64; 2],
}

pub fn condg_check(f_omega: &SpectralField, s: f64, t_grid: &[f64]) -> Result<CondGReport> {
    check_grid(t_grid)?;
    let d = f_omega.grid().dim() as f64;
    let mut l2_sup: f64 = 0.0;
    let mut linf_sup = [0.0f64; 2];
    for &t in t_grid {
        let g = heat_semigroup(f_omega, t)?;
        l2_sup = l2_sup.max(g.l2_norm() / (1.0 + t.powf(-0.5 * s)));
        for (k, sup) in linf_sup.iter_mut().enumerate() {
            let bound = f64::max(1.0 / t, t.powf(-(k as f64 + s + 0.5 * d))).sqrt();
            *sup = sup.max(linf_derivative_norm(&g, k as u32)? / bound);
        }
    }
    Ok(CondGReport {
        times: t_grid.to_vec(),
        l2_sup,
        linf_sup,
    })
}
