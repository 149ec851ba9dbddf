//! Experiment drivers. Each writes `series.csv`, `summary.json`,
//! `meta.json` and optional `plotdata/*.tsv` under the output directory.
//! Everything except `meta.json` is a deterministic function of the
//! config, whatever the number of worker threads.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use nsrw_core::diagnostics::{condtg_check, dwdt_norm, energy};
use nsrw_core::heat::{check_linear_estimates, condg_check, decay_report_l2, fit_window};
use nsrw_core::solver::{solve, solve_from, State};
use nsrw_core::spectral::relative_divergence;
use nsrw_core::stats::geomspace;
use nsrw_core::stochastic::{empirical_moment, fit_gaussian_tail, quantile, sample_space_time_norms};
use nsrw_core::{
    friedrichs_cutoff, hminus_s_norm, make_grid, randomize, rough_data, sample_coefficients, taylor_green,
    verify_subgaussian, DataProfile, Family, Grid, RingPartition, SpectralField,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checkpoint::{load_checkpoint, save_checkpoint};
use crate::config::{DataConfig, Experiment, ExperimentConfig};
use crate::error::{CliError, Result};

/// Tolerances of the built-in assertions.
pub mod tol {
    pub const SECOND_MOMENT: f64 = 0.05;
    pub const SUBGAUSSIAN_MARGIN: f64 = 1e-9;
    pub const RANDOMIZED_DIVERGENCE: f64 = 1e-12;
    pub const RADEMACHER_NORM: f64 = 1e-12;
    pub const SLOPE: f64 = 0.1;
    pub const TAIL_R2: f64 = 0.95;
    pub const ENERGY_SLACK: f64 = 1e-8;
    pub const SOLVER_DIVERGENCE: f64 = 1e-10;
    pub const TAYLOR_GREEN: f64 = 1e-6;
    pub const CUTOFF_UNIFORMITY: f64 = 0.2;
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: Value,
    pub failures: Vec<String>,
    pub output_dir: PathBuf,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tabular output: a header and rows of already formatted cells.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, path: &Path, delimiter: u8) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_path(path)
            .map_err(|e| CliError::Serialize(format!("{}: {e}", path.display())))?;
        let err = |e: csv::Error| CliError::Serialize(format!("{}: {e}", path.display()));
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

struct Output {
    series: Table,
    results: Value,
    failures: Vec<String>,
    plots: Vec<(String, Table)>,
}

/// Runs the configured experiment on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let out = match cfg.experiment {
        Experiment::Randomize => randomize_experiment(cfg)?,
        Experiment::Heatflow => heatflow_experiment(cfg)?,
        Experiment::Tails => tails_experiment(cfg)?,
        Experiment::Solve => solve_experiment(cfg)?,
        Experiment::Report => report_experiment(cfg)?,
    };
    out.series.write(&dir.join("series.csv"), b',')?;
    if !out.plots.is_empty() {
        let plot_dir = dir.join("plotdata");
        std::fs::create_dir_all(&plot_dir).map_err(|e| CliError::io(&plot_dir, e))?;
        for (name, table) in &out.plots {
            table.write(&plot_dir.join(format!("{name}.tsv")), b'\t')?;
        }
    }
    let mut config = serde_json::to_value(cfg).map_err(|e| CliError::Serialize(e.to_string()))?;
    if let Value::Object(map) = &mut config {
        map.remove("output_dir");
    }
    let summary = json!({
        "experiment": cfg.experiment.name(),
        "master_seed": cfg.master_seed,
        "config": config,
        "results": out.results,
        "failures": out.failures,
        "passed": out.failures.is_empty(),
    });
    write_json(&dir.join("summary.json"), &summary)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "timestamp_unix": stamp,
        "worker_threads": rayon::current_num_threads(),
        "version": env!("CARGO_PKG_VERSION"),
        "output_dir": dir.display().to_string(),
    });
    write_json(&dir.join("meta.json"), &meta)?;
    Ok(RunOutcome {
        summary,
        failures: out.failures,
        output_dir: dir,
    })
}

/// Same as [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Serialize(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn grid(cfg: &ExperimentConfig) -> Result<Arc<Grid>> {
    Ok(make_grid(cfg.d, cfg.n_points, cfg.length)?)
}

/// Data before randomization.
pub fn build_data(cfg: &ExperimentConfig, grid: &Arc<Grid>) -> Result<SpectralField> {
    match &cfg.data {
        DataConfig::Rough { profile, seed, norm } => {
            let profile = profile.unwrap_or(match cfg.experiment {
                Experiment::Heatflow => DataProfile::Homogeneous { tilt: 0.05 },
                _ => DataProfile::default(),
            });
            Ok(rough_data(grid, cfg.s, profile, *seed, Some(*norm))?)
        }
        DataConfig::TaylorGreen { amplitude } => Ok(taylor_green(grid, *amplitude)?),
    }
}

/// `f^ω` for draw `index`, or `f` itself when randomization is off.
fn realization(cfg: &ExperimentConfig, f: &SpectralField, part: &RingPartition, index: u64) -> Result<SpectralField> {
    if !cfg.randomize_data {
        return Ok(f.clone());
    }
    let draw = sample_coefficients(&cfg.model(), part.max_ring(), index);
    Ok(randomize(f, &draw, part)?)
}

fn randomize_experiment(cfg: &ExperimentConfig) -> Result<Output> {
    let g = grid(cfg)?;
    let part = RingPartition::new(&g);
    let f = build_data(cfg, &g)?;
    let norm = hminus_s_norm(&f, cfg.s)?;
    let model = cfg.model();
    let rows = (0..cfg.monte_carlo_m as u64)
        .into_par_iter()
        .map(|i| {
            let draw = sample_coefficients(&model, part.max_ring(), i);
            let fw = randomize(&f, &draw, &part)?;
            Ok((hminus_s_norm(&fw, cfg.s)?, relative_divergence(&fw)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let mut series = Table::new(["sample", "hminus_s_norm_sq", "relative_divergence"]);
    for (i, (n, div)) in rows.iter().enumerate() {
        series.push(vec![i.to_string(), num(n * n), num(*div)]);
    }
    let target = cfg.family.variance() * norm * norm;
    let mean = rows.iter().map(|(n, _)| n * n).sum::<f64>() / rows.len() as f64;
    let rel_err = (mean - target).abs() / target;
    let max_div = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_dev = rows.iter().map(|(n, _)| (n - norm).abs() / norm).fold(0.0, f64::max);

    let gammas: Vec<f64> = (0..200).map(|i| -10.0 + 20.0 * i as f64 / 199.0).collect();
    let report = verify_subgaussian(&model, &gammas)?;
    let mut margins = Table::new(["gamma", "margin"]);
    for (gm, m) in report.gammas.iter().zip(&report.margins) {
        margins.push(vec![num(*gm), num(*m)]);
    }

    let mut failures = Vec::new();
    if rel_err > tol::SECOND_MOMENT {
        failures.push(format!(
            "second moment: mean {mean} differs from {target} by {rel_err:.4} (> {})",
            tol::SECOND_MOMENT
        ));
    }
    if report.max_margin > tol::SUBGAUSSIAN_MARGIN {
        failures.push(format!("sub-Gaussian margin {} is positive", report.max_margin));
    }
    if max_div > tol::RANDOMIZED_DIVERGENCE {
        failures.push(format!("randomized data has relative divergence {max_div}"));
    }
    if cfg.family == Family::Rademacher && max_dev > tol::RADEMACHER_NORM {
        failures.push(format!("Rademacher draw changed the H^-s norm by {max_dev}"));
    }
    Ok(Output {
        series,
        results: json!({
            "data_norm": norm,
            "target_second_moment": target,
            "empirical_second_moment": mean,
            "relative_error": rel_err,
            "max_relative_divergence": max_div,
            "max_per_draw_norm_deviation": max_dev,
            "subgaussian": { "c": report.c, "max_margin": report.max_margin },
            "rings": { "max_ring": part.max_ring(), "empty_rings": part.empty_rings() },
        }),
        failures,
        plots: vec![("subgaussian_margin".into(), margins)],
    })
}

fn heatflow_experiment(cfg: &ExperimentConfig) -> Result<Output> {
    let g = grid(cfg)?;
    let part = RingPartition::new(&g);
    let f = build_data(cfg, &g)?;
    let fw = realization(cfg, &f, &part, 0)?;
    let window = fit_window(&g);
    let t_lo = (0.1 * window.0).min(0.01 * cfg.t_final);
    let times = geomspace(t_lo, cfg.t_final, cfg.time_points);

    let mut l2 = Vec::new();
    let mut linf = Vec::new();
    for &k in &cfg.heat_k {
        if cfg.heat_linf {
            let r = check_linear_estimates(&fw, cfg.s, k, &times)?;
            l2.push(r.l2);
            linf.push(r.linf);
        } else {
            l2.push(decay_report_l2(&fw, cfg.s, k, &times)?);
        }
    }
    let condg = if cfg.heat_linf {
        let c = condg_check(&fw, cfg.s, &times)?;
        json!({ "l2_sup": c.l2_sup, "linf_sup": c.linf_sup })
    } else {
        Value::Null
    };

    let mut header = vec!["time".to_string()];
    for k in &cfg.heat_k {
        header.push(format!("l2_k{k}"));
        if cfg.heat_linf {
            header.push(format!("linf_k{k}"));
        }
    }
    let mut series = Table::new(header);
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![num(*t)];
        for (j, r) in l2.iter().enumerate() {
            row.push(num(r.values[i]));
            if let Some(r) = linf.get(j) {
                row.push(num(r.values[i]));
            }
        }
        series.push(row);
    }

    let rough = matches!(cfg.data, DataConfig::Rough { .. });
    let mut failures = Vec::new();
    let per_k: Vec<Value> = l2
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let expected = -0.5 * (cfg.s + r.k as f64);
            if rough && (r.fitted_slope - expected).abs() > tol::SLOPE {
                failures.push(format!(
                    "k = {}: fitted L2 slope {:.4} is not within {} of {expected}",
                    r.k,
                    r.fitted_slope,
                    tol::SLOPE
                ));
            }
            let mut entry = json!({
                "k": r.k,
                "expected_slope": expected,
                "fitted_slope": r.fitted_slope,
                "l2_bound_constant": r.bound_constant,
                "fit_window": [r.fit_window.0, r.fit_window.1],
            });
            if let Some(m) = linf.get(j) {
                entry["linf_fitted_slope"] = json!(m.fitted_slope);
                entry["linf_bound_constant"] = json!(m.bound_constant);
                entry["linf_sqrt_form_bound_constant"] = json!(m.sqrt_form_bound_constant);
            }
            entry
        })
        .collect();
    Ok(Output {
        series,
        results: json!({
            "data_norm": hminus_s_norm(&fw, cfg.s)?,
            "decay": per_k,
            "condg": condg,
        }),
        failures,
        plots: Vec::new(),
    })
}

fn tail_outputs(samples: &[f64], data_norm: f64, name: &str) -> Result<(Table, Value, Vec<String>, Table)> {
    let fit = fit_gaussian_tail(samples, data_norm)?;
    let mut series = Table::new(["lambda", "empirical_prob", "fitted_prob"]);
    for (l, p) in fit.lambda_grid.iter().zip(&fit.empirical_prob) {
        let model = fit.c1 * (-fit.c2 * l * l / (data_norm * data_norm)).exp();
        series.push(vec![num(*l), num(*p), num(model)]);
    }
    let mut raw = Table::new(["sample", name]);
    for (i, v) in samples.iter().enumerate() {
        raw.push(vec![i.to_string(), num(*v)]);
    }
    let mut failures = Vec::new();
    if !(fit.r_squared >= tol::TAIL_R2) {
        failures.push(format!("tail fit r^2 = {:.4} below {}", fit.r_squared, tol::TAIL_R2));
    }
    if !(fit.c2 > 0.0) {
        failures.push(format!("tail fit C2 = {} is not positive", fit.c2));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let value = json!({
        "c1": fit.c1,
        "c2": fit.c2,
        "r_squared": fit.r_squared,
        "fit_points": fit.fit_points,
        "M": fit.m,
        "data_norm": data_norm,
        "median": fit.median,
        "p90": quantile(&sorted, 0.9),
        "p99": quantile(&sorted, 0.99),
        "p995": fit.p995,
    });
    Ok((series, value, failures, raw))
}

fn tails_experiment(cfg: &ExperimentConfig) -> Result<Output> {
    let g = grid(cfg)?;
    let f = build_data(cfg, &g)?;
    let spec = cfg.norm_spec();
    let samples = sample_space_time_norms(&f, &cfg.model(), &spec, cfg.monte_carlo_m, 0)?;
    let norm = hminus_s_norm(&f, cfg.s)?;
    let (series, mut results, failures, raw) = tail_outputs(&samples, norm, "space_time_norm")?;
    results["moment_ratio"] = json!(empirical_moment(&samples, spec.r) / norm);
    results["r"] = json!(spec.r);
    Ok(Output {
        series,
        results,
        failures,
        plots: vec![("samples".into(), raw)],
    })
}

fn report_experiment(cfg: &ExperimentConfig) -> Result<Output> {
    if !(cfg.gamma < 0.0) {
        return Err(CliError::field("gamma", "the lambda report needs a negative time weight"));
    }
    let g = grid(cfg)?;
    let part = RingPartition::new(&g);
    let f = build_data(cfg, &g)?;
    let lambdas = (0..cfg.monte_carlo_m as u64)
        .into_par_iter()
        .map(|i| {
            let fw = realization(cfg, &f, &part, i)?;
            Ok(condtg_check(&fw, cfg.gamma, cfg.t_final, cfg.s)?.lambda)
        })
        .collect::<Result<Vec<f64>>>()?;
    let norm = hminus_s_norm(&f, cfg.s)?;
    let (series, results, failures, raw) = tail_outputs(&lambdas, norm, "lambda")?;
    Ok(Output {
        series,
        results: json!({ "lambda": results }),
        failures,
        plots: vec![("lambda_samples".into(), raw)],
    })
}

struct RunRecord {
    draw: usize,
    cutoff: f64,
    times: Vec<f64>,
    kinetic: Vec<f64>,
    dissipation: Vec<f64>,
    total: Vec<f64>,
    balance: Vec<f64>,
    dwdt: Vec<f64>,
    summary: Value,
    energy_sup: f64,
    min_slack: f64,
    max_divergence: f64,
    support_ok: bool,
    w_sup_ratio: f64,
}

fn checkpoint_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir.join("checkpoints");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn run_one(cfg: &ExperimentConfig, fw: &SpectralField, draw: usize, ci: usize, cutoff: f64) -> Result<RunRecord> {
    let scfg = cfg.solver_config(cutoff);
    let traj = match &cfg.resume_from {
        Some(path) => {
            let ck = load_checkpoint(path)?;
            let same_grid = ck.field.grid().as_ref() == fw.grid().as_ref();
            if !same_grid || ck.cutoff.to_bits() != cutoff.to_bits() {
                return Err(CliError::field(
                    "resume_from",
                    format!("checkpoint grid or cutoff ({}) does not match the config", ck.cutoff),
                ));
            }
            solve_from(&scfg, fw, State { t: ck.t, w: ck.field })?
        }
        None => solve(&scfg, fw)?,
    };
    let dir = checkpoint_dir(cfg)?;
    let last = traj.final_state();
    save_checkpoint(&last.w, last.t, cutoff, &dir.join(format!("draw{draw}_cut{ci}_final.bin")))?;
    if let Some(t_ck) = cfg.checkpoint_at {
        let tol = 1e-9 * cfg.t_final;
        if let Some(i) = traj.times.iter().position(|t| (t - t_ck).abs() <= tol) {
            save_checkpoint(
                &traj.w_states[i],
                traj.times[i],
                cutoff,
                &dir.join(format!("draw{draw}_cut{ci}_mid.bin")),
            )?;
        } else if traj.times[0] < t_ck {
            return Err(CliError::field(
                "checkpoint_at",
                format!("t = {t_ck} is not a snapshot time (dt · snapshot_cadence multiples)"),
            ));
        }
    }

    let e = energy(&traj)?;
    let rate = dwdt_norm(&traj)?;
    let f_norm = fw.l2_norm();
    let w_sup = traj.w_states.iter().map(|w| w.l2_norm()).fold(0.0, f64::max);
    let mut max_divergence: f64 = 0.0;
    let mut support_ok = true;
    for w in &traj.w_states {
        max_divergence = max_divergence.max(relative_divergence(w)?);
        support_ok &= &friedrichs_cutoff(w, cutoff)? == w;
    }
    let min_slack = traj.min_energy_slack();
    let w_sup_ratio = if f_norm > 0.0 { w_sup / f_norm } else { 0.0 };
    let summary = json!({
        "draw": draw,
        "cutoff": cutoff,
        "start_time": traj.times[0],
        "final_time": last.t,
        "energy_sup": e.sup_total(),
        "min_energy_slack": min_slack,
        "w_sup": w_sup,
        "w_sup_over_f": w_sup_ratio,
        "final_w_l2": last.w.l2_norm(),
        "dwdt_time_norm": rate.time_norm,
        "max_relative_divergence": max_divergence,
        "steps": traj.ledger.len() - 1,
    });
    Ok(RunRecord {
        draw,
        cutoff,
        times: traj.times.clone(),
        kinetic: e.kinetic.clone(),
        dissipation: e.dissipation_cum.clone(),
        energy_sup: e.sup_total(),
        total: e.total,
        balance: e.balance,
        dwdt: rate.values,
        summary,
        min_slack,
        max_divergence,
        support_ok,
        w_sup_ratio,
    })
}

fn variation(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max > 0.0 {
        (max - min) / max
    } else {
        0.0
    }
}

fn solve_experiment(cfg: &ExperimentConfig) -> Result<Output> {
    let g = grid(cfg)?;
    let part = RingPartition::new(&g);
    let f = build_data(cfg, &g)?;
    let cutoffs = cfg.cutoff_list();
    let realizations = (0..cfg.draws as u64)
        .map(|i| realization(cfg, &f, &part, i))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.draws)
        .flat_map(|d| (0..cutoffs.len()).map(move |c| (d, c)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(d, c)| run_one(cfg, &realizations[d], d, c, cutoffs[c]))
        .collect::<Result<Vec<_>>>()?;

    let lambdas: Vec<Value> = if cfg.gamma < 0.0 {
        realizations
            .par_iter()
            .map(|fw| match condtg_check(fw, cfg.gamma, cfg.t_final, cfg.s) {
                Ok(r) => json!(r.lambda),
                Err(e) => json!(e.to_string()),
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut series = Table::new([
        "draw",
        "cutoff",
        "time",
        "kinetic",
        "dissipation_cum",
        "energy",
        "energy_balance",
        "dwdt_hminus1",
    ]);
    for r in &records {
        for i in 0..r.times.len() {
            series.push(vec![
                r.draw.to_string(),
                num(r.cutoff),
                num(r.times[i]),
                num(r.kinetic[i]),
                num(r.dissipation[i]),
                num(r.total[i]),
                num(r.balance[i]),
                num(r.dwdt[i]),
            ]);
        }
    }

    let mut failures = Vec::new();
    for r in &records {
        if r.min_slack < -tol::ENERGY_SLACK {
            failures.push(format!(
                "draw {}, cutoff {}: energy inequality violated by {}",
                r.draw, r.cutoff, -r.min_slack
            ));
        }
        if r.max_divergence > tol::SOLVER_DIVERGENCE {
            failures.push(format!("draw {}, cutoff {}: divergence {}", r.draw, r.cutoff, r.max_divergence));
        }
        if !r.support_ok {
            failures.push(format!("draw {}, cutoff {}: w left the cutoff ball", r.draw, r.cutoff));
        }
        if matches!(cfg.data, DataConfig::TaylorGreen { .. })
            && !cfg.randomize_data
            && r.w_sup_ratio > tol::TAYLOR_GREEN
        {
            failures.push(format!(
                "Taylor-Green fluctuation reached {} of the data norm",
                r.w_sup_ratio
            ));
        }
    }

    let mut uniformity = Value::Null;
    if cutoffs.len() >= 2 {
        let per_cutoff_mean: Vec<f64> = (0..cutoffs.len())
            .map(|c| {
                let sups: Vec<f64> = records
                    .iter()
                    .filter(|r| r.cutoff.to_bits() == cutoffs[c].to_bits())
                    .map(|r| r.energy_sup)
                    .collect();
                sups.iter().sum::<f64>() / sups.len() as f64
            })
            .collect();
        let worst_draw = (0..cfg.draws)
            .map(|d| {
                let sups: Vec<f64> = records.iter().filter(|r| r.draw == d).map(|r| r.energy_sup).collect();
                variation(&sups)
            })
            .fold(0.0, f64::max);
        let ensemble = variation(&per_cutoff_mean);
        if !(ensemble < tol::CUTOFF_UNIFORMITY) {
            failures.push(format!(
                "mean sup-energy varies by {ensemble:.4} across cutoffs (limit {})",
                tol::CUTOFF_UNIFORMITY
            ));
        }
        uniformity = json!({
            "cutoffs": cutoffs,
            "mean_energy_sup": per_cutoff_mean,
            "ensemble_variation": ensemble,
            "worst_draw_variation": worst_draw,
        });
    }

    let mut lambda_table = Table::new(["draw", "lambda"]);
    for (i, l) in lambdas.iter().enumerate() {
        lambda_table.push(vec![i.to_string(), l.to_string()]);
    }
    let plots = if lambdas.is_empty() {
        Vec::new()
    } else {
        vec![("lambda".to_string(), lambda_table)]
    };
    Ok(Output {
        series,
        results: json!({
            "data_norm_hminus_s": hminus_s_norm(&f, cfg.s)?,
            "runs": records.iter().map(|r| r.summary.clone()).collect::<Vec<_>>(),
            "w_sup_over_f": records.iter().map(|r| r.w_sup_ratio).fold(0.0, f64::max),
            "min_energy_slack": records.iter().map(|r| r.min_slack).fold(f64::INFINITY, f64::min),
            "energy_sup": records.iter().map(|r| r.energy_sup).fold(0.0, f64::max),
            "cutoff_uniformity": uniformity,
            "lambda": lambdas,
        }),
        failures,
        plots,
    })
}
