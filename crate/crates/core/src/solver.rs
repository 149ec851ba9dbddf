//! Friedrichs-truncated fluctuation system
//!
//! ```text
//! ∂_t w = Δw − J_n P ∇·((w + J_n g) ⊗ (w + J_n g)),   w(0) = 0,
//! g(t)  = e^{tΔ} f^ω,
//! ```
//!
//! which is the four-term truncated system written with the bilinear
//! product collected. The heat term is integrated exactly through an
//! integrating factor; the quadratic term is explicit (Lawson RK4 or
//! Euler). The forcing `g` is re-evaluated from `f^ω` at every stage time.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Direction, Space, SpectralField};
use crate::grid::{make_grid, Grid};
use crate::heat::heat_semigroup;
use crate::spectral::{
    dealias_in_place, derivative_l2_norm, derivative_symbol, friedrichs_cutoff, friedrichs_cutoff_in_place,
    leray_project_in_place, relative_divergence,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[serde(rename = "ifrk4")]
    IfRk4,
    #[serde(rename = "ifeuler")]
    IfEuler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dim: usize,
    pub n_points: usize,
    pub length: f64,
    /// Friedrichs cutoff radius in wavenumber units.
    pub cutoff: f64,
    pub t_final: f64,
    pub dt: f64,
    pub s: f64,
    pub gamma: f64,
    pub integrator: Integrator,
    pub substep_near_zero: bool,
    /// Uniform steps between stored snapshots.
    pub snapshot_every: usize,
    /// When false the quadratic term is dropped and `w` is pure heat flow.
    pub nonlinear: bool,
}

impl SolverConfig {
    /// Builds the grid and checks every static constraint.
    pub fn grid(&self) -> Result<Arc<Grid>> {
        let grid = make_grid(self.dim, self.n_points, self.length)?;
        self.validate(&grid)?;
        Ok(grid)
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.cutoff > 0.0) {
            return bad(format!("cutoff must be positive, got {}", self.cutoff));
        }
        let band = grid.dealias_cut();
        if self.cutoff > band * (1.0 + 1e-12) {
            return bad(format!(
                "cutoff {} exceeds the dealiased band N/3 · 2π/L = {band}",
                self.cutoff
            ));
        }
        if !(self.t_final > 0.0) || !(self.dt > 0.0) || self.dt > self.t_final {
            return bad(format!("need 0 < dt <= T, got dt = {}, T = {}", self.dt, self.t_final));
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1".into());
        }
        Ok(())
    }

    /// Step endpoints from 0 to T. With `substep_near_zero`, the first
    /// steps are geometric, `t_{j+1} = 1.2 t_j` from `dt·10⁻³`, until their
    /// increment reaches `dt` at `5·dt`; the uniform grid continues from there.
    pub fn schedule(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let steps = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        let mut first = 1;
        if self.substep_near_zero {
            first = GEOMETRIC_STEPS.min(steps);
            let end = first as f64 * self.dt;
            let mut t = self.dt * 1e-3;
            while t < end * (1.0 - 1e-9) {
                out.push(t);
                t *= 1.2;
            }
        }
        for k in first..=steps {
            out.push(if k == steps { self.t_final } else { k as f64 * self.dt });
        }
        out
    }

    /// Whether the schedule node at position `i` is stored as a snapshot.
    fn is_snapshot(&self, schedule: &[f64], i: usize) -> bool {
        if i == 0 || i + 1 == schedule.len() {
            return true;
        }
        let k = schedule[i] / self.dt;
        let kr = k.round();
        (k - kr).abs() < 1e-9 && kr >= 1.0 && (kr as usize) % self.snapshot_every == 0
    }
}

/// Uniform steps replaced by the geometric start.
const GEOMETRIC_STEPS: usize = 5;

/// Solver state: time and the fluctuation `w` in Fourier space.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub w: SpectralField,
}

/// Running energy budget. Over `[t_start, t]`,
/// `‖w(t)‖² − ‖w(t_start)‖² + 2∫‖∇w‖² = 2∫⟨w, N(w)⟩ ≤ 2∫|⟨w, N(w)⟩|`,
/// with the pairing accumulated by the solver's stage rule and the
/// dissipation split into the exact free decay plus a Simpson remainder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub t: f64,
    pub kinetic: f64,
    pub dissipation: f64,
    pub pairing: f64,
    pub pairing_abs: f64,
}

impl EnergyLedger {
    /// `rhs − lhs` of the energy inequality relative to `kinetic_start`.
    pub fn slack(&self, kinetic_start: f64) -> f64 {
        2.0 * self.pairing_abs - (self.kinetic - kinetic_start + 2.0 * self.dissipation)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub w_states: Vec<SpectralField>,
    /// `J_n g` at the snapshot times.
    pub g_states: Vec<SpectralField>,
    /// One entry per step endpoint, starting with the initial state.
    pub ledger: Vec<EnergyLedger>,
    pub config: SolverConfig,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        State {
            t: *self.times.last().expect("trajectory has a snapshot"),
            w: self.w_states.last().expect("trajectory has a snapshot").clone(),
        }
    }

    /// Smallest energy-inequality slack over all steps.
    pub fn min_energy_slack(&self) -> f64 {
        let k0 = self.ledger[0].kinetic;
        self.ledger.iter().map(|e| e.slack(k0)).fold(f64::INFINITY, f64::min)
    }
}

/// `J_n P ∇·(a ⊗ b)` with the pointwise products formed in physical space
/// from dealiased factors; `(∇·(a⊗b))_j = Σ_i ∂_i(a_i b_j)`.
pub fn truncated_flux(a: &SpectralField, b: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    a.expect_space(Space::Fourier)?;
    b.expect_space(Space::Fourier)?;
    a.expect_vector()?;
    b.expect_vector()?;
    let g = a.grid().clone();
    let to_real = |f: &SpectralField| -> Result<SpectralField> {
        let mut f = f.clone();
        dealias_in_place(&mut f)?;
        let mut p = f.into_transformed(Direction::Inverse)?;
        p.make_real()?;
        Ok(p)
    };
    let pa = to_real(a)?;
    let symmetric = std::ptr::eq(a, b);
    let pb = if symmetric { pa.clone() } else { to_real(b)? };
    let d = g.dim();
    let mut flux = SpectralField::zero_vector(&g, Space::Fourier);
    let mut prod = vec![Complex64::default(); g.len()];
    for i in 0..d {
        for j in 0..d {
            if symmetric && j < i {
                continue;
            }
            for ((p, x), y) in prod.iter_mut().zip(pa.component(i)).zip(pb.component(j)) {
                *p = Complex64::new(x.re * y.re, 0.0);
            }
            g.fft(&mut prod, false);
            let out = flux.components_mut();
            for (idx, p) in prod.iter().enumerate() {
                out[j][idx] += Complex64::new(0.0, derivative_symbol(&g, idx, i)) * p;
                if symmetric && i != j {
                    // (a_j a_i) contributes ∂_j to component i
                    out[i][idx] += Complex64::new(0.0, derivative_symbol(&g, idx, j)) * p;
                }
            }
        }
    }
    leray_project_in_place(&mut flux)?;
    friedrichs_cutoff_in_place(&mut flux, cutoff)?;
    Ok(flux)
}

fn check_support(w: &SpectralField, cutoff: f64) -> Result<()> {
    let g = w.grid();
    let r2 = cutoff * cutoff;
    let outside = w
        .components()
        .iter()
        .flat_map(|c| c.iter().enumerate())
        .filter(|(idx, _)| g.ksq()[*idx] >= r2)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    if outside > 0.0 {
        return Err(Error::SupportViolation(outside));
    }
    Ok(())
}

/// Nonlinear right-hand side
/// `−J_nP∇·(w⊗w) − J_nP∇·(w⊗J_ng) − J_nP∇·(J_ng⊗w) − J_nP∇·(J_ng⊗J_ng)`.
pub fn nonlinear_rhs(w: &SpectralField, g: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    check_support(w, cutoff)?;
    let jg = friedrichs_cutoff(g, cutoff)?;
    rhs_truncated(w, &jg, cutoff)
}

/// Same as [`nonlinear_rhs`] with the forcing already truncated.
fn rhs_truncated(w: &SpectralField, jg: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    let v = w.add(jg)?;
    let mut out = truncated_flux(&v, &v, cutoff)?;
    out.scale_in_place(-1.0);
    Ok(out)
}

fn sq(w: &SpectralField) -> f64 {
    w.l2_norm().powi(2)
}

fn grad_sq(w: &SpectralField) -> Result<f64> {
    Ok(derivative_l2_norm(w, 1)?.powi(2))
}

/// Per-step energy increments.
#[derive(Clone, Copy, Debug, Default)]
struct StepBudget {
    dissipation: f64,
    pairing: f64,
    pairing_abs: f64,
}

struct Stepper<'a> {
    config: &'a SolverConfig,
    /// `J_n f^ω`; `J_n g(t) = e^{tΔ} J_n f^ω`.
    jf: SpectralField,
}

impl<'a> Stepper<'a> {
    fn new(config: &'a SolverConfig, f_omega: &SpectralField) -> Result<Self> {
        Ok(Self {
            config,
            jf: friedrichs_cutoff(f_omega, config.cutoff)?,
        })
    }

    fn forcing(&self, t: f64) -> Result<SpectralField> {
        heat_semigroup(&self.jf, t)
    }

    fn rhs(&self, w: &SpectralField, t: f64) -> Result<SpectralField> {
        if !self.config.nonlinear {
            return Ok(SpectralField::zero_vector(w.grid(), Space::Fourier));
        }
        rhs_truncated(w, &self.forcing(t)?, self.config.cutoff)
    }

    fn step(&self, w: &SpectralField, t: f64, dt: f64) -> Result<(SpectralField, StepBudget)> {
        let g = w.grid().clone();
        let ksq = g.ksq();
        let full = |f: &SpectralField| f.apply_symbol(|idx| (-dt * ksq[idx]).exp());
        let half = |f: &SpectralField| f.apply_symbol(|idx| (-0.5 * dt * ksq[idx]).exp());
        let (next, budget) = match self.config.integrator {
            Integrator::IfEuler => {
                let k1 = self.rhs(w, t)?;
                let p1 = w.inner(&k1)?;
                let mut y = w.clone();
                y.axpy(dt, &k1)?;
                let next = full(&y);
                let free = full(w);
                let dissipation = 0.5 * (sq(w) - sq(&free)) + 0.5 * dt * (grad_sq(&next)? - grad_sq(&free)?);
                (
                    next,
                    StepBudget {
                        dissipation,
                        pairing: dt * p1,
                        pairing_abs: dt * p1.abs(),
                    },
                )
            }
            Integrator::IfRk4 => {
                let th = t + 0.5 * dt;
                let k1 = self.rhs(w, t)?;
                let mut a = w.clone();
                a.axpy(0.5 * dt, &k1)?;
                let a = half(&a);
                let k2 = self.rhs(&a, th)?;
                let wh = half(w);
                let mut b = wh.clone();
                b.axpy(0.5 * dt, &k2)?;
                let k3 = self.rhs(&b, th)?;
                let mut c = full(w);
                c.axpy(dt, &half(&k3))?;
                let k4 = self.rhs(&c, t + dt)?;

                let mut next = full(w);
                next.axpy(dt / 6.0, &full(&k1))?;
                let mut mid = k2.clone();
                mid.axpy(1.0, &k3)?;
                next.axpy(dt / 3.0, &half(&mid))?;
                next.axpy(dt / 6.0, &k4)?;

                // Dissipation of the free decay e^{sΔ}w is integrated exactly;
                // Simpson handles the remainder, which vanishes at s = 0.
                let mut y = a.clone();
                y.axpy(1.0, &b)?;
                y.scale_in_place(0.5);
                let free_end = full(w);
                let rest_mid = grad_sq(&y)? - grad_sq(&wh)?;
                let rest_end = grad_sq(&next)? - grad_sq(&free_end)?;
                let mut budget = StepBudget {
                    dissipation: 0.5 * (sq(w) - sq(&free_end)) + dt / 6.0 * (4.0 * rest_mid + rest_end),
                    ..StepBudget::default()
                };
                let stages = [(w, &k1), (&a, &k2), (&b, &k3), (&c, &k4)];
                for ((state, k), wgt) in stages.into_iter().zip([1.0, 2.0, 2.0, 1.0]) {
                    let p = state.inner(k)?;
                    budget.pairing += wgt * dt / 6.0 * p;
                    budget.pairing_abs += wgt * dt / 6.0 * p.abs();
                }
                (next, budget)
            }
        };
        if next.components().iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::StepFailure {
                t: t + dt,
                reason: "non-finite coefficients".into(),
            });
        }
        Ok((next, budget))
    }
}

/// Advances `state` by `dt`.
pub fn step(state: &State, dt: f64, config: &SolverConfig, f_omega: &SpectralField) -> Result<State> {
    if !(state.t >= 0.0) {
        return Err(Error::NegativeTime(state.t));
    }
    let stepper = Stepper::new(config, f_omega)?;
    let (w, _) = stepper.step(&state.w, state.t, dt)?;
    Ok(State { t: state.t + dt, w })
}

/// Largest stable explicit step estimated from `max|J_n g|` at `t = dt`:
/// `2.8 / (max|J_n g| · n)`, the RK4 imaginary-axis limit for the
/// advective rate.
pub fn stability_limit(config: &SolverConfig, f_omega: &SpectralField) -> Result<f64> {
    let jg = heat_semigroup(&friedrichs_cutoff(f_omega, config.cutoff)?, config.dt)?;
    let umax = jg.to_physical()?.lp_norm(f64::INFINITY)?;
    if umax == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.8 / (umax * config.cutoff))
}

fn check_data(f_omega: &SpectralField) -> Result<()> {
    f_omega.expect_space(Space::Fourier)?;
    f_omega.expect_vector()?;
    let scale = f_omega.coefficient_norm();
    if f_omega.mean_magnitude() > 1e-14 * scale.max(1.0) {
        return Err(Error::InvalidArgument("data must have zero mean".into()));
    }
    if relative_divergence(f_omega)? > 1e-10 {
        return Err(Error::InvalidArgument("data must be divergence free".into()));
    }
    Ok(())
}

/// Integrates from `w(0) = 0` to `T`.
pub fn solve(config: &SolverConfig, f_omega: &SpectralField) -> Result<Trajectory> {
    let grid = f_omega.grid().clone();
    let start = State {
        t: 0.0,
        w: SpectralField::zero_vector(&grid, Space::Fourier),
    };
    solve_from(config, f_omega, start)
}

/// Continues from `start`, whose time must lie on the step schedule.
pub fn solve_from(config: &SolverConfig, f_omega: &SpectralField, start: State) -> Result<Trajectory> {
    config.validate(f_omega.grid())?;
    check_data(f_omega)?;
    if config.nonlinear && config.dt >= 0.5 * stability_limit(config, f_omega)? {
        return Err(Error::InvalidConfig(format!(
            "dt = {} violates the explicit stability limit {}",
            config.dt,
            0.5 * stability_limit(config, f_omega)?
        )));
    }
    check_support(&start.w, config.cutoff)?;
    let schedule = config.schedule();
    let first = schedule
        .iter()
        .position(|&t| (t - start.t).abs() <= 1e-12 * config.t_final.max(1.0))
        .ok_or_else(|| Error::InvalidArgument(format!("t = {} is not on the step schedule", start.t)))?;

    let stepper = Stepper::new(config, f_omega)?;
    let mut w = start.w;
    let mut t = schedule[first];
    let norm2 = |w: &SpectralField| w.l2_norm().powi(2);
    let mut ledger = vec![EnergyLedger {
        t,
        kinetic: norm2(&w),
        dissipation: 0.0,
        pairing: 0.0,
        pairing_abs: 0.0,
    }];
    let mut times = vec![t];
    let mut w_states = vec![w.clone()];
    let mut g_states = vec![stepper.forcing(t)?];

    for i in first + 1..schedule.len() {
        let dt = schedule[i] - t;
        let (next, budget) = stepper.step(&w, t, dt)?;
        w = next;
        t = schedule[i];
        let prev = *ledger.last().expect("ledger is seeded");
        ledger.push(EnergyLedger {
            t,
            kinetic: norm2(&w),
            dissipation: prev.dissipation + budget.dissipation,
            pairing: prev.pairing + budget.pairing,
            pairing_abs: prev.pairing_abs + budget.pairing_abs,
        });
        if config.is_snapshot(&schedule, i) {
            times.push(t);
            w_states.push(w.clone());
            g_states.push(stepper.forcing(t)?);
        }
    }
    Ok(Trajectory {
        times,
        w_states,
        g_states,
        ledger,
        config: config.clone(),
    })
}

/// `u(t) = e^{tΔ} f^ω + w(t)` at each snapshot.
pub fn reconstruct_u(trajectory: &Trajectory, f_omega: &SpectralField) -> Result<Vec<(f64, SpectralField)>> {
    trajectory
        .times
        .iter()
        .zip(&trajectory.w_states)
        .map(|(&t, w)| Ok((t, heat_semigroup(f_omega, t)?.add(w)?)))
        .collect()
}
