//! Scalar time series derived from trajectories and data: energy, the
//! `H^{-1}` norm of `∂_t w`, the space-time norms that fix λ, and residuals
//! of the full equation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::solver::{truncated_flux, Trajectory};
use crate::spectral::sobolev_norm;
use crate::stats::cumulative_trapezoid;
use crate::stochastic::{weighted_space_time_norm, NormSpec, SpatialOperator, TimeQuadrature};

#[derive(Clone, Debug, Serialize)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    /// `‖w‖²_{L²}`
    pub kinetic: Vec<f64>,
    /// `∫_0^t ‖∇w‖²_{L²} dτ`, taken from the solver's per-step ledger
    pub dissipation_cum: Vec<f64>,
    /// `E(w)(t) = ‖w‖² + ∫_0^t ‖∇w‖²`
    pub total: Vec<f64>,
    /// `‖w‖² + 2∫_0^t ‖∇w‖²`, conserved by pure heat flow.
    pub balance: Vec<f64>,
}

impl EnergySeries {
    pub fn sup_total(&self) -> f64 {
        self.total.iter().copied().fold(0.0, f64::max)
    }
}

pub fn energy(trajectory: &Trajectory) -> Result<EnergySeries> {
    let kinetic: Vec<f64> = trajectory.w_states.iter().map(|w| w.l2_norm().powi(2)).collect();
    // snapshots are a subsequence of the per-step ledger
    let mut steps = trajectory.ledger.iter();
    let dissipation_cum = trajectory
        .times
        .iter()
        .map(|&t| {
            steps
                .find(|e| e.t == t)
                .map(|e| e.dissipation)
                .ok_or_else(|| Error::InvalidArgument(format!("snapshot t = {t} is missing from the ledger")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let total = kinetic.iter().zip(&dissipation_cum).map(|(k, d)| k + d).collect();
    let balance = kinetic.iter().zip(&dissipation_cum).map(|(k, d)| k + 2.0 * d).collect();
    Ok(EnergySeries {
        times: trajectory.times.clone(),
        kinetic,
        dissipation_cum,
        total,
        balance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DwdtSeries {
    pub times: Vec<f64>,
    /// `‖∂_t w‖_{H^{-1}}` per snapshot.
    pub values: Vec<f64>,
    /// Time exponent `4/d`.
    pub exponent: f64,
    /// `‖∂_t w‖_{L^{4/d}([0,T]; H^{-1})}` by the trapezoid rule.
    pub time_norm: f64,
}

/// `H^{-1}` norm (inhomogeneous bracket) of the truncated-system right-hand
/// side `Δw − J_nP∇·((w + J_ng)⊗(w + J_ng))` at each snapshot.
pub fn dwdt_norm(trajectory: &Trajectory) -> Result<DwdtSeries> {
    let cfg = &trajectory.config;
    let values = trajectory
        .w_states
        .iter()
        .zip(&trajectory.g_states)
        .map(|(w, jg)| {
            let ksq = w.grid().ksq().to_vec();
            let mut rate = w.apply_symbol(|idx| -ksq[idx]);
            if cfg.nonlinear {
                let v = w.add(jg)?;
                rate.axpy(-1.0, &truncated_flux(&v, &v, cfg.cutoff)?)?;
            }
            sobolev_norm(&rate, -1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let exponent = 4.0 / cfg.dim as f64;
    let powered: Vec<f64> = values.iter().map(|v| v.powf(exponent)).collect();
    let integral = *cumulative_trapezoid(&trajectory.times, &powered).last().unwrap_or(&0.0);
    Ok(DwdtSeries {
        times: trajectory.times.clone(),
        values,
        exponent,
        time_norm: integral.powf(1.0 / exponent),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CondTgTerm {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CondTgReport {
    pub dim: usize,
    pub terms: Vec<CondTgTerm>,
    /// Sum of the terms: the smallest admissible λ for this realization.
    pub lambda: f64,
}

/// Weighted space-time norms of `g = e^{tΔ} f^ω` that must stay below λ:
/// `‖t^γ g‖_{L⁴_t L⁴_x}` in 2D; in 3D the sum of
/// `‖t^γ [I + (-Δ)^{1/4}] g‖_{L²_t L⁶_x}`,
/// `‖t^γ [I + (-Δ)^{1/4}] g‖_{L^{8/3}_t L^{8/3}_x}` and `‖t^γ g‖_{L⁸_t L⁸_x}`.
pub fn condtg_check(f_omega: &SpectralField, gamma: f64, t_final: f64, s: f64) -> Result<CondTgReport> {
    if !(gamma < 0.0) {
        return Err(Error::InvalidArgument(format!("time weight exponent must be negative, got {gamma}")));
    }
    let dim = f_omega.grid().dim();
    let quad = TimeQuadrature::standard(t_final);
    // (label, operator, sigma used for admissibility, p, q)
    let plan: Vec<(&str, SpatialOperator, f64, f64, f64)> = match dim {
        2 => vec![("L4_t L4_x of t^gamma g", SpatialOperator::FractionalLaplacian(0.0), 0.0, 4.0, 4.0)],
        3 => vec![
            (
                "L2_t L6_x of t^gamma [I + (-lap)^(1/4)] g",
                SpatialOperator::IdentityPlusFractional(0.5),
                0.5,
                6.0,
                2.0,
            ),
            (
                "L8/3_t L8/3_x of t^gamma [I + (-lap)^(1/4)] g",
                SpatialOperator::IdentityPlusFractional(0.5),
                0.5,
                8.0 / 3.0,
                8.0 / 3.0,
            ),
            ("L8_t L8_x of t^gamma g", SpatialOperator::FractionalLaplacian(0.0), 0.0, 8.0, 8.0),
        ],
        _ => return Err(Error::InvalidArgument(format!("dimension {dim}"))),
    };
    let mut terms = Vec::with_capacity(plan.len());
    for (label, op, sigma, p, q) in plan {
        let spec = NormSpec {
            gamma,
            sigma,
            p,
            q,
            r: p,
            s,
            t_final,
        };
        if let Some(why) = spec.inadmissibility() {
            return Err(Error::Inadmissible(format!("{label}: {why}")));
        }
        terms.push(CondTgTerm {
            label: label.to_string(),
            value: weighted_space_time_norm(f_omega, op, gamma, p, q, &quad)?,
        });
    }
    let lambda = terms.iter().map(|t| t.value).sum();
    Ok(CondTgReport { dim, terms, lambda })
}

/// `‖(u(t+h) − u(t))/h − Δū + P∇·(ū⊗ū)‖_{H^{-1}}` at each midpoint, with
/// `ū` the average of consecutive snapshots. With `nonlinear = false` the
/// quadratic term is omitted (heat-equation residual).
pub fn nse_residual(snapshots: &[(f64, SpectralField)], nonlinear: bool) -> Result<Vec<(f64, f64)>> {
    if snapshots.len() < 2 {
        return Err(Error::InvalidArgument("need at least two snapshots".into()));
    }
    snapshots
        .windows(2)
        .map(|pair| {
            let (t0, u0) = &pair[0];
            let (t1, u1) = &pair[1];
            let h = t1 - t0;
            let mut mid = u0.add(u1)?;
            mid.scale_in_place(0.5);
            let mut r = u1.sub(u0)?;
            r.scale_in_place(1.0 / h);
            let ksq = mid.grid().ksq().to_vec();
            r.axpy(1.0, &mid.apply_symbol(|idx| ksq[idx]))?;
            if nonlinear {
                r.axpy(1.0, &truncated_flux(&mid, &mid, f64::INFINITY)?)?;
            }
            Ok((0.5 * (t0 + t1), sobolev_norm(&r, -1.0)?))
        })
        .collect()
}
