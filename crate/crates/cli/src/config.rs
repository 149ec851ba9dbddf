//! Experiment configuration: a JSON document, validated eagerly.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nsrw_core::stochastic::NormSpec;
use nsrw_core::{DataProfile, Family, Integrator, RandomModel, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Randomize,
    Heatflow,
    Tails,
    #[default]
    Solve,
    Report,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Randomize => "randomize",
            Experiment::Heatflow => "heatflow",
            Experiment::Tails => "tails",
            Experiment::Solve => "solve",
            Experiment::Report => "report",
        }
    }
}

/// Initial data before randomization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    /// Rough divergence-free field normalized in `H^{-s}`. Without a
    /// profile, `heatflow` uses the scale-free homogeneous profile and the
    /// other experiments the bracket profile, both with tilt 0.05.
    Rough {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<DataProfile>,
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        norm: f64,
    },
    TaylorGreen {
        #[serde(default = "one")]
        amplitude: f64,
    },
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig::Rough {
            profile: None,
            seed: 0,
            norm: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn two_pi() -> f64 {
    2.0 * PI
}
fn minus_tenth() -> f64 {
    -0.1
}
fn four() -> f64 {
    4.0
}
fn default_dt() -> f64 {
    0.005
}
fn yes() -> bool {
    true
}
fn default_m() -> usize {
    1000
}
fn default_cadence() -> usize {
    10
}
fn default_draws() -> usize {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_heat_k() -> Vec<u32> {
    vec![0, 1]
}
fn default_time_points() -> usize {
    64
}
fn default_family() -> Family {
    Family::StandardGaussian
}
fn default_integrator() -> Integrator {
    Integrator::IfRk4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Experiment,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,

    pub d: usize,
    #[serde(rename = "N")]
    pub n_points: usize,
    #[serde(rename = "L", default = "two_pi")]
    pub length: f64,
    #[serde(rename = "T", default = "one")]
    pub t_final: f64,

    pub s: f64,
    #[serde(default = "minus_tenth")]
    pub gamma: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "four")]
    pub p: f64,
    #[serde(default = "four")]
    pub q: f64,
    #[serde(default = "four")]
    pub r: f64,
    /// Admit `s ≥ 1/2` in 2D, outside the range of the well-posedness
    /// theorem for randomized data but inside that of the existence theorem
    /// for the fluctuation.
    #[serde(default)]
    pub allow_outside_theorem_range: bool,

    #[serde(default = "default_family")]
    pub family: Family,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(rename = "monte_carlo_M", default = "default_m")]
    pub monte_carlo_m: usize,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "yes")]
    pub randomize_data: bool,

    /// Friedrichs cutoff; defaults to the dealiased band `N/3 · 2π/L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    /// Extra cutoffs for a uniformity-in-n study; overrides `cutoff`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cutoffs: Vec<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    #[serde(default = "yes")]
    pub substep_near_zero: bool,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "default_cadence")]
    pub snapshot_cadence: usize,
    /// Number of randomized draws integrated by `solve`.
    #[serde(default = "default_draws")]
    pub draws: usize,
    /// Also checkpoint each run at this snapshot time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_at: Option<f64>,
    /// Continue a single run from this checkpoint instead of `t = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resume_from: Option<PathBuf>,

    #[serde(default = "default_heat_k")]
    pub heat_k: Vec<u32>,
    #[serde(default = "default_time_points")]
    pub time_points: usize,
    /// Also compute the `L^∞` decay and the weighted suprema in `heatflow`.
    #[serde(default = "yes")]
    pub heat_linf: bool,
}

impl ExperimentConfig {
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn dealias_band(&self) -> f64 {
        self.n_points as f64 / 3.0 * self.dk()
    }

    pub fn cutoff_list(&self) -> Vec<f64> {
        if !self.cutoffs.is_empty() {
            self.cutoffs.clone()
        } else {
            vec![self.cutoff.unwrap_or_else(|| self.dealias_band())]
        }
    }

    pub fn norm_spec(&self) -> NormSpec {
        NormSpec {
            gamma: self.gamma,
            sigma: self.sigma,
            p: self.p,
            q: self.q,
            r: self.r,
            s: self.s,
            t_final: self.t_final,
        }
    }

    pub fn model(&self) -> RandomModel {
        RandomModel::new(self.family, self.master_seed)
    }

    pub fn solver_config(&self, cutoff: f64) -> SolverConfig {
        SolverConfig {
            dim: self.d,
            n_points: self.n_points,
            length: self.length,
            cutoff,
            t_final: self.t_final,
            dt: self.dt,
            s: self.s,
            gamma: self.gamma,
            integrator: self.integrator,
            substep_near_zero: self.substep_near_zero,
            snapshot_every: self.snapshot_cadence,
            nonlinear: self.nonlinear,
        }
    }

    /// Checks every constraint, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        fn f(field: &'static str, reason: impl Into<String>) -> CliError {
            CliError::field(field, reason)
        }
        if self.d != 2 && self.d != 3 {
            return Err(f("d", format!("dimension must be 2 or 3, got {}", self.d)));
        }
        if self.n_points < 8 || self.n_points % 2 != 0 {
            return Err(f("N", format!("need an even resolution of at least 8, got {}", self.n_points)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(f("L", format!("box length must be positive, got {}", self.length)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(f("T", format!("horizon must be positive, got {}", self.t_final)));
        }
        if !(self.s >= 0.0) {
            return Err(f("s", format!("data regularity must be nonnegative, got {}", self.s)));
        }
        match self.d {
            2 if self.s >= 0.5 && !self.allow_outside_theorem_range => {
                return Err(f(
                    "s",
                    format!(
                        "s = {} lies outside the theorem range s < 1/2 for d = 2 \
                         (set allow_outside_theorem_range to run it anyway)",
                        self.s
                    ),
                ))
            }
            3 if self.s >= 0.25 => {
                return Err(f("s", format!("s = {} lies outside the theorem range s < 1/4 for d = 3", self.s)))
            }
            _ => {}
        }
        if !(self.q >= 2.0) {
            return Err(f("q", format!("need q >= 2 (r >= p >= q >= 2), got {}", self.q)));
        }
        if !(self.p >= self.q) {
            return Err(f("p", format!("need p >= q (r >= p >= q >= 2), got p = {}, q = {}", self.p, self.q)));
        }
        if !(self.r >= self.p) {
            return Err(f("r", format!("need r >= p (r >= p >= q >= 2), got r = {}, p = {}", self.r, self.p)));
        }
        if !(self.sigma >= 0.0) {
            return Err(f("sigma", format!("derivative order must be nonnegative, got {}", self.sigma)));
        }
        if matches!(self.experiment, Experiment::Tails | Experiment::Report) {
            if let Some(why) = self.norm_spec().inadmissibility() {
                return Err(f("gamma", format!("inadmissible exponents: {why}")));
            }
        }
        if self.monte_carlo_m == 0 {
            return Err(f("monte_carlo_M", "need at least one sample"));
        }
        if matches!(self.experiment, Experiment::Tails | Experiment::Report) && self.monte_carlo_m < 200 {
            return Err(f(
                "monte_carlo_M",
                format!("tail fits need at least 200 samples, got {}", self.monte_carlo_m),
            ));
        }
        if self.snapshot_cadence == 0 {
            return Err(f("snapshot_cadence", "must be at least 1"));
        }
        if self.draws == 0 {
            return Err(f("draws", "must be at least 1"));
        }
        if self.time_points < 2 {
            return Err(f("time_points", "need at least two times"));
        }
        if self.heat_k.iter().any(|&k| k > 2) {
            return Err(f("heat_k", "derivative orders must be 0, 1 or 2"));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_final) {
            return Err(f("dt", format!("need 0 < dt <= T, got {}", self.dt)));
        }
        let band = self.dealias_band();
        for c in self.cutoff_list() {
            if !(c > 0.0 && c <= band * (1.0 + 1e-12)) {
                let field = if self.cutoffs.is_empty() { "cutoff" } else { "cutoffs" };
                return Err(f(field, format!("cutoff {c} must lie in (0, N/3 · 2π/L = {band}]")));
            }
        }
        if let Some(t) = self.checkpoint_at {
            if !(t > 0.0 && t <= self.t_final) {
                return Err(f("checkpoint_at", format!("must lie in (0, T], got {t}")));
            }
        }
        if self.resume_from.is_some() && (self.draws != 1 || self.cutoff_list().len() != 1) {
            return Err(f("resume_from", "resuming needs a single draw and a single cutoff"));
        }
        match self.data {
            DataConfig::Rough { norm, .. } if !(norm > 0.0) => {
                return Err(f("data", format!("normalization must be positive, got {norm}")))
            }
            DataConfig::TaylorGreen { .. } if (self.length - 2.0 * PI).abs() > 1e-12 => {
                return Err(f("data", "Taylor-Green data needs L = 2π"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses and validates a JSON config.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text)
}

pub fn to_json(cfg: &ExperimentConfig) -> Result<String> {
    serde_json::to_string_pretty(cfg).map_err(|e| CliError::Serialize(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"d": 2, "N": 64, "L": 6.2832, "T": 1.0, "s": 0.25}"#;

    fn field_of(err: CliError) -> &'static str {
        match err {
            CliError::Field { field, .. } => field,
            other => panic!("expected a field error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_is_valid() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.experiment, Experiment::Solve);
        assert_eq!(cfg.n_points, 64);
        assert_eq!(cfg.monte_carlo_m, 1000);
        assert!((cfg.cutoff_list()[0] - 64.0 / 3.0 * 2.0 * PI / 6.2832).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let mut cfg = parse_config_str(MINIMAL).unwrap();
        cfg.data = DataConfig::Rough {
            profile: Some(DataProfile::Homogeneous { tilt: 0.1 }),
            seed: 4,
            norm: 2.0,
        };
        cfg.cutoffs = vec![5.0, 10.0];
        cfg.checkpoint_at = Some(0.5);
        let again = parse_config_str(&to_json(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn theorem_range_in_three_dimensions() {
        let err = parse_config_str(r#"{"d": 3, "N": 16, "s": 0.3}"#).unwrap_err();
        assert!(err.to_string().contains("s < 1/4"));
        assert_eq!(field_of(err), "s");
        let err = parse_config_str(r#"{"d": 2, "N": 16, "s": 0.6}"#).unwrap_err();
        assert_eq!(field_of(err), "s");
        assert!(parse_config_str(r#"{"d": 2, "N": 16, "s": 0.6, "allow_outside_theorem_range": true, "p": 2, "q": 2, "r": 2, "gamma": 0.1}"#).is_ok());
    }

    #[test]
    fn integrability_exponents() {
        let err = parse_config_str(r#"{"d": 2, "N": 16, "s": 0.25, "q": 1}"#).unwrap_err();
        assert_eq!(field_of(err), "q");
        let err = parse_config_str(r#"{"d": 2, "N": 16, "s": 0.25, "p": 3}"#).unwrap_err();
        assert_eq!(field_of(err), "p");
        let err = parse_config_str(r#"{"d": 2, "N": 16, "experiment": "tails", "s": 0.25, "sigma": 0.5, "gamma": 0}"#).unwrap_err();
        assert_eq!(field_of(err), "gamma");
    }

    #[test]
    fn unknown_and_missing_keys_fail() {
        assert!(matches!(
            parse_config_str(r#"{"d": 2, "N": 16, "s": 0.25, "bogus": 1}"#),
            Err(CliError::Parse(_))
        ));
        assert!(matches!(parse_config_str(r#"{"d": 2, "N": 16}"#), Err(CliError::Parse(_))));
        assert!(matches!(
            parse_config_str(r#"{"d": 2, "N": 16, "s": 0.1, "data": {"kind": "rough", "tilt": 1}}"#),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn cutoff_must_fit_the_band() {
        let err = parse_config_str(r#"{"d": 2, "N": 16, "s": 0.1, "cutoff": 6}"#).unwrap_err();
        assert_eq!(field_of(err), "cutoff");
        let err = parse_config_str(r#"{"d": 2, "N": 16, "s": 0.1, "cutoffs": [2, 9]}"#).unwrap_err();
        assert_eq!(field_of(err), "cutoffs");
    }
}
