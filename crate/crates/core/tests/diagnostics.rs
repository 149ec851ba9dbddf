mod common;

use std::f64::consts::PI;

use nsrw_core::diagnostics::{condtg_check, dwdt_norm, energy, nse_residual};
use nsrw_core::solver::{reconstruct_u, solve, solve_from, State};
use nsrw_core::{
    friedrichs_cutoff, make_grid, randomize, rough_data, sample_coefficients, taylor_green, DataProfile, Family,
    Integrator, RandomModel, RingPartition, SolverConfig, Space, SpectralField,
};

fn config(cutoff: f64, t_final: f64, dt: f64, every: usize) -> SolverConfig {
    SolverConfig {
        dim: 2,
        n_points: 32,
        length: 2.0 * PI,
        cutoff,
        t_final,
        dt,
        s: 0.25,
        gamma: -0.1,
        integrator: Integrator::IfRk4,
        substep_near_zero: false,
        snapshot_every: every,
        nonlinear: true,
    }
}

#[test]
fn zero_run_has_zero_energy_and_rate() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let f = SpectralField::zero_vector(&g, Space::Fourier);
    let traj = solve(&config(10.0, 0.5, 0.05, 1), &f).unwrap();
    let e = energy(&traj).unwrap();
    assert!(e.total.iter().chain(&e.balance).all(|v| *v == 0.0));
    assert!(dwdt_norm(&traj).unwrap().values.iter().all(|v| *v == 0.0));
}

#[test]
fn heat_flow_conserves_the_energy_balance() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let w0 = friedrichs_cutoff(&rough_data(&g, 0.0, DataProfile::Bracket { tilt: 2.0 }, 1, None).unwrap(), 4.0).unwrap();
    let w0 = w0.scale(1.0 / w0.l2_norm());
    let cfg = SolverConfig {
        nonlinear: false,
        ..config(10.0, 1.0, 5e-4, 1)
    };
    let traj = solve_from(&cfg, &SpectralField::zero_vector(&g, Space::Fourier), State { t: 0.0, w: w0.clone() }).unwrap();
    let e = energy(&traj).unwrap();
    let k0 = w0.l2_norm().powi(2);
    for b in &e.balance {
        assert!((b - k0).abs() <= 1e-6, "{b} vs {k0}");
    }
    assert!(e.dissipation_cum.windows(2).all(|d| d[1] >= d[0]));
}

#[test]
fn dwdt_of_a_shear_mode() {
    // w = (0, a sin x): the quadratic term vanishes and ∂_t w = Δw = -w
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let w0 = SpectralField::from_fn(&g, 2, |x| vec![0.0, 0.3 * x[0].sin()]).to_fourier().unwrap();
    let w0 = friedrichs_cutoff(&w0, 10.0).unwrap();
    let traj = solve_from(
        &config(10.0, 1.0, 0.01, 10),
        &SpectralField::zero_vector(&g, Space::Fourier),
        State { t: 0.0, w: w0.clone() },
    )
    .unwrap();
    let series = dwdt_norm(&traj).unwrap();
    for (t, v) in series.times.iter().zip(&series.values) {
        let exact = w0.l2_norm() * (-t).exp() / 2f64.sqrt();
        assert!(common::rel(*v, exact) < 1e-8, "t = {t}");
    }
    assert_eq!(series.exponent, 2.0);
}

#[test]
fn dwdt_time_norm_is_stable_under_cadence_doubling() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let part = RingPartition::new(&g);
    let f = rough_data(&g, 0.25, DataProfile::default(), 2, Some(1.0)).unwrap();
    let fw = randomize(&f, &sample_coefficients(&RandomModel::new(Family::StandardGaussian, 4), part.max_ring(), 1), &part)
        .unwrap();
    let norm = |every| {
        let traj = solve(&config(8.0, 1.0, 0.005, every), &fw).unwrap();
        dwdt_norm(&traj).unwrap().time_norm
    };
    let (coarse, fine) = (norm(4), norm(2));
    assert!(coarse.is_finite() && coarse > 0.0);
    assert!(common::rel(coarse, fine) < 0.15, "{coarse} vs {fine}");
}

/// `∫_0^T t^a e^{-ct} dt` with `v = t^{a+1}/(a+1)` removing the singularity.
fn weighted_exp_integral(a: f64, c: f64, t_final: f64) -> f64 {
    let b = a + 1.0;
    let top = t_final.powf(b) / b;
    let n = 20_000;
    let h = top / n as f64;
    let f = |v: f64| (-c * (b * v).powf(1.0 / b)).exp();
    let mut acc = f(0.0) + f(top);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn condtg_single_mode_closed_form() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let f = common::single_mode(&g, &[2, 1], 1, 0.7);
    let gamma = -0.1;
    let report = condtg_check(&f, gamma, 1.0, 0.25).unwrap();
    let l4 = f.to_physical().unwrap().lp_norm(4.0).unwrap();
    let exact = l4 * weighted_exp_integral(4.0 * gamma, 4.0 * 5.0, 1.0).powf(0.25);
    assert!(common::rel(report.lambda, exact) < 1e-3, "{} vs {exact}", report.lambda);

    let zero = SpectralField::zero_vector(&g, Space::Fourier);
    assert_eq!(condtg_check(&zero, gamma, 1.0, 0.25).unwrap().lambda, 0.0);
    assert!(condtg_check(&f, 0.1, 1.0, 0.25).is_err());
}

#[test]
fn condtg_is_homogeneous() {
    for (dim, n) in [(2, 32), (3, 16)] {
        let g = make_grid(dim, n, 2.0 * PI).unwrap();
        let f = rough_data(&g, 0.1, DataProfile::default(), 3, Some(1.0)).unwrap();
        let a = condtg_check(&f, -0.05, 1.0, 0.1).unwrap();
        let b = condtg_check(&f.scale(2.0), -0.05, 1.0, 0.1).unwrap();
        assert_eq!(a.terms.len(), if dim == 2 { 1 } else { 3 });
        assert!(common::rel(b.lambda, 2.0 * a.lambda) < 1e-10);
    }
}

#[test]
fn taylor_green_residual_is_second_order() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let tg = taylor_green(&g, 1.0).unwrap();
    let max_residual = |h: f64| {
        let snaps: Vec<(f64, SpectralField)> = (0..=8)
            .map(|i| {
                let t = i as f64 * h;
                (t, tg.scale((-2.0 * t).exp()))
            })
            .collect();
        nse_residual(&snaps, true).unwrap().iter().map(|r| r.1).fold(0.0, f64::max)
    };
    let (r1, r2) = (max_residual(0.02), max_residual(0.01));
    assert!(r1 <= 0.02f64.powi(2) * tg.l2_norm() + 1e-8);
    assert!((r1 / r2 - 4.0).abs() < 1.0, "{}", r1 / r2);
}

#[test]
fn solver_output_residual_tracks_the_cadence() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let f = friedrichs_cutoff(&rough_data(&g, 0.25, DataProfile::Bracket { tilt: 3.0 }, 5, Some(2.0)).unwrap(), 5.0)
        .unwrap();
    for nonlinear in [false, true] {
        let residual = |every| {
            let cfg = SolverConfig {
                nonlinear,
                ..config(32.0 / 3.0, 0.4, 0.002, every)
            };
            let traj = solve(&cfg, &f).unwrap();
            let u = reconstruct_u(&traj, &f).unwrap();
            nse_residual(&u, nonlinear).unwrap().iter().map(|r| r.1).fold(0.0, f64::max)
        };
        let (coarse, fine) = (residual(20), residual(10));
        assert!((coarse / fine - 4.0).abs() < 1.0, "nonlinear = {nonlinear}: {}", coarse / fine);
    }
}
