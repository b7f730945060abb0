//! Seeded decoding campaigns.
//!
//! A campaign runs `trials` independent trials. Trial `i` derives its seed
//! from `(seed, "trial", i)` and from it the code, instance and harvest
//! seeds, all of which are recorded so a single trial can be replayed.
//! Trials run in parallel and the report is assembled by trial index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::asympt;
use crate::bias::{exact_biases, required_equations, BiasError};
use crate::codec::{random_code, sample_problem, CodecError};
use crate::decode::{decode_multi_weight, decode_single_weight, DecodeError, DecodeResult};
use crate::harvest::{
    harvest_dumer, harvest_gauss, DumerConfig, HarvestError, HarvestOptions, ParityPool, Target, WeightWindow,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid value for {key}: {value:?}")]
    InvalidValue { key: String, value: String },
    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Bias(#[from] BiasError),
    #[error(transparent)]
    Harvest(#[from] HarvestError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Error weight: a fixed count or a fraction of the GV distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorWeight {
    Fixed(usize),
    /// `t = round(f · n · H⁻¹(1 − R))`.
    GvFraction(f64),
}

impl ErrorWeight {
    pub fn resolve(&self, n: usize, rate: f64) -> Result<usize, ConfigError> {
        match *self {
            ErrorWeight::Fixed(t) => Ok(t),
            ErrorWeight::GvFraction(f) => {
                let tau = asympt::gv_distance(rate).map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
                Ok((f * n as f64 * tau).round() as usize)
            }
        }
    }
}

impl fmt::Display for ErrorWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorWeight::Fixed(t) => write!(f, "{t}"),
            ErrorWeight::GvFraction(x) => write!(f, "gv:{x}"),
        }
    }
}

impl FromStr for ErrorWeight {
    type Err = ();

    /// `4` or `gv:0.5`.
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.strip_prefix("gv:") {
            Some(f) => f.parse().map(ErrorWeight::GvFraction).map_err(|_| ()),
            None => s.parse().map(ErrorWeight::Fixed).map_err(|_| ()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gauss,
    Dumer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderChoice {
    Single,
    Multi,
    Both,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $name:literal),* }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $name),* })
            }
        }
        impl FromStr for $ty {
            type Err = ();
            fn from_str(s: &str) -> Result<Self, ()> {
                match s { $($name => Ok($ty::$variant),)* _ => Err(()) }
            }
        }
    };
}

keyword_enum!(Method { Gauss => "gauss", Dumer => "dumer" });
keyword_enum!(DecoderChoice { Single => "single", Multi => "multi", Both => "both" });

/// Campaign parameters. The text form is one `key=value` per line with the
/// same names as the command-line flags; `#` starts a comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub rate: f64,
    /// Shared code seed; when absent every trial draws its own code.
    pub code_seed: Option<u64>,
    pub t: ErrorWeight,
    pub method: Method,
    /// Harvest window; defaults to the single weight for gauss and to the
    /// collision search's own window for dumer.
    pub window: Option<WeightWindow>,
    pub dumer_l: usize,
    pub dumer_r: usize,
    pub decoder: DecoderChoice,
    /// Single-decoder weight; defaults to `1 + k/2`, the mean weight of a
    /// systematic-form dual row.
    pub w: Option<usize>,
    pub trials: usize,
    /// Whole-word failure target used to size the pool.
    pub target_fail: f64,
    /// Equations per position; defaults to the count derived from
    /// `target_fail`.
    pub equations: Option<usize>,
    pub iteration_cap: u64,
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 128,
            rate: 0.5,
            code_seed: None,
            t: ErrorWeight::Fixed(4),
            method: Method::Gauss,
            window: None,
            dumer_l: 8,
            dumer_r: 4,
            decoder: DecoderChoice::Single,
            w: None,
            trials: 10,
            target_fail: 0.05,
            equations: None,
            iteration_cap: crate::harvest::DEFAULT_ITERATION_CAP,
            seed: 0,
            out: None,
        }
    }
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

impl ExperimentConfig {
    pub fn to_text(&self) -> String {
        let pairs: [(&str, String); 17] = [
            ("n", self.n.to_string()),
            ("rate", self.rate.to_string()),
            ("code-seed", opt(&self.code_seed)),
            ("t", self.t.to_string()),
            ("method", self.method.to_string()),
            ("window", opt(&self.window)),
            ("dumer-l", self.dumer_l.to_string()),
            ("dumer-r", self.dumer_r.to_string()),
            ("decoder", self.decoder.to_string()),
            ("w", opt(&self.w)),
            ("trials", self.trials.to_string()),
            ("target-fail", self.target_fail.to_string()),
            ("equations", opt(&self.equations)),
            ("iteration-cap", self.iteration_cap.to_string()),
            ("seed", self.seed.to_string()),
            ("out", opt(&self.out)),
            ("format", "statdec-config v1".to_string()),
        ];
        pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn p<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::InvalidValue {
                key: key.into(),
                value: value.into(),
            })
        }
        fn o<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, ConfigError> {
            if value == "none" {
                Ok(None)
            } else {
                p(key, value).map(Some)
            }
        }
        match key {
            "n" => self.n = p(key, value)?,
            "rate" => self.rate = p(key, value)?,
            "code-seed" => self.code_seed = o(key, value)?,
            "t" => self.t = p(key, value)?,
            "method" => self.method = p(key, value)?,
            "window" => self.window = o(key, value)?,
            "dumer-l" => self.dumer_l = p(key, value)?,
            "dumer-r" => self.dumer_r = p(key, value)?,
            "decoder" => self.decoder = p(key, value)?,
            "w" => self.w = o(key, value)?,
            "trials" => self.trials = p(key, value)?,
            "target-fail" => self.target_fail = p(key, value)?,
            "equations" => self.equations = o(key, value)?,
            "iteration-cap" => self.iteration_cap = p(key, value)?,
            "seed" => self.seed = p(key, value)?,
            "out" => self.out = if value == "none" { None } else { Some(value.to_string()) },
            "format" if value == "statdec-config v1" => {}
            "format" => {
                return Err(ConfigError::InvalidValue {
                    key: key.into(),
                    value: value.into(),
                })
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Parses the text form on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected key=value, found {line:?}"),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn dimension(&self) -> usize {
        crate::codec::dimension_for(self.n, self.rate)
    }

    pub fn error_weight(&self) -> Result<usize, ConfigError> {
        self.t.resolve(self.n, self.rate)
    }

    pub fn single_weight(&self) -> usize {
        self.w.unwrap_or(1 + self.dimension() / 2)
    }

    pub fn dumer(&self) -> DumerConfig {
        DumerConfig {
            l: self.dumer_l,
            r: self.dumer_r,
        }
    }

    /// Equations per position for the single-weight class.
    pub fn equations_per_position(&self) -> Result<usize, CampaignError> {
        if let Some(m) = self.equations {
            return Ok(m);
        }
        let bias = exact_biases(self.n, self.single_weight(), self.error_weight()?)?;
        Ok(required_equations(&bias, self.target_fail, self.n)? as usize)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Inconsistent(m));
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return bad(format!("rate {} not in (0, 1)", self.rate));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if !(self.target_fail > 0.0 && self.target_fail < 1.0) {
            return bad(format!("target-fail {} not in (0, 1)", self.target_fail));
        }
        if self.error_weight()? > self.n {
            return bad("t exceeds n".into());
        }
        Ok(())
    }
}

/// Seeds used by one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialSeeds {
    pub trial: u64,
    pub code: u64,
    pub problem: u64,
    pub harvest: u64,
}

impl TrialSeeds {
    pub fn derive(cfg: &ExperimentConfig, index: u64) -> Self {
        let trial = rng::derive_seed(cfg.seed, "trial", index);
        Self {
            trial,
            code: cfg.code_seed.unwrap_or_else(|| rng::derive_seed(trial, "code", 0)),
            problem: rng::derive_seed(trial, "problem", 0),
            harvest: rng::derive_seed(trial, "harvest", 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderOutcome {
    pub success: bool,
    pub bit_errors: usize,
    pub predicted_fail_prob: f64,
    pub min_equations: usize,
}

impl DecoderOutcome {
    fn from_result(res: &DecodeResult, e: &crate::bitmat::BitVector) -> Self {
        Self {
            success: res.e_hat == *e,
            bit_errors: res.bit_errors(e),
            predicted_fail_prob: res.predicted_fail_prob,
            min_equations: res.min_equations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seeds: TrialSeeds,
    pub t: usize,
    pub pool_size: usize,
    pub pool_checksum: String,
    pub harvest_iterations: u64,
    pub single: Option<DecoderOutcome>,
    pub multi: Option<DecoderOutcome>,
    /// Set when the trial could not run to completion.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub trials: usize,
    pub errors: usize,
    pub single_successes: Option<usize>,
    pub multi_successes: Option<usize>,
    /// Trials where the weighted decoder succeeded and the single one did
    /// not, and vice versa.
    pub multi_only: Option<usize>,
    pub single_only: Option<usize>,
    pub mean_predicted_single: Option<f64>,
    pub mean_predicted_multi: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub format: &'static str,
    pub config: BTreeMap<String, String>,
    pub equations_per_position: usize,
    pub single_weight: usize,
    pub summary: CampaignSummary,
    pub trials: Vec<TrialRecord>,
}

impl CampaignReport {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }
}

/// The pool one trial decodes with.
pub fn trial_pool(
    cfg: &ExperimentConfig,
    code: &crate::codec::CodeInstance,
    seed: u64,
    per_position: usize,
) -> Result<(ParityPool, u64), CampaignError> {
    let w = cfg.single_weight();
    let single = WeightWindow::exact(w)?;
    let target_window = match cfg.decoder {
        DecoderChoice::Multi => cfg.window.unwrap_or(single),
        _ => single,
    };
    let target = Target::PerPosition {
        count: per_position,
        window: target_window,
    };
    let opts = HarvestOptions {
        iteration_cap: cfg.iteration_cap,
        ..Default::default()
    };
    let (pool, stats) = match cfg.method {
        Method::Gauss => harvest_gauss(code, cfg.window.unwrap_or(single), target, seed, opts)?,
        Method::Dumer => harvest_dumer(code, cfg.dumer(), cfg.window, target, seed, opts)?,
    };
    Ok((pool, stats.iterations))
}

/// Runs trial `index` in isolation.
pub fn run_trial(cfg: &ExperimentConfig, index: u64, per_position: usize) -> TrialRecord {
    let seeds = TrialSeeds::derive(cfg, index);
    let t = cfg.error_weight().unwrap_or(0);
    let mut record = TrialRecord {
        index,
        seeds,
        t,
        pool_size: 0,
        pool_checksum: String::new(),
        harvest_iterations: 0,
        single: None,
        multi: None,
        error: None,
    };
    let outcome = (|| -> Result<(), CampaignError> {
        let code = random_code(cfg.n, cfg.rate, seeds.code)?;
        let problem = sample_problem(&code, t, seeds.problem)?;
        let (pool, iterations) = trial_pool(cfg, &code, seeds.harvest, per_position)?;
        record.pool_size = pool.len();
        record.pool_checksum = pool.checksum();
        record.harvest_iterations = iterations;
        let e = problem.hidden_e.as_ref().expect("sampled instances carry ground truth");
        if cfg.decoder != DecoderChoice::Multi {
            let res = decode_single_weight(&problem, &pool, cfg.single_weight())?;
            record.single = Some(DecoderOutcome::from_result(&res, e));
        }
        if cfg.decoder != DecoderChoice::Single {
            let res = decode_multi_weight(&problem, &pool)?;
            record.multi = Some(DecoderOutcome::from_result(&res, e));
        }
        Ok(())
    })();
    if let Err(err) = outcome {
        record.error = Some(err.to_string());
    }
    record
}

fn config_map(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    cfg.to_text()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn summarize(trials: &[TrialRecord]) -> CampaignSummary {
    let count = |f: &dyn Fn(&TrialRecord) -> Option<bool>| -> Option<usize> {
        let vals: Vec<bool> = trials.iter().filter_map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().filter(|&&b| b).count())
    };
    let mean = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Option<f64> {
        let vals: Vec<f64> = trials.iter().filter_map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let both = |a: bool, b: bool| {
        move |t: &TrialRecord| match (&t.single, &t.multi) {
            (Some(s), Some(m)) => Some(s.success == a && m.success == b),
            _ => None,
        }
    };
    CampaignSummary {
        trials: trials.len(),
        errors: trials.iter().filter(|t| t.error.is_some()).count(),
        single_successes: count(&|t| t.single.as_ref().map(|o| o.success)),
        multi_successes: count(&|t| t.multi.as_ref().map(|o| o.success)),
        multi_only: count(&both(false, true)),
        single_only: count(&both(true, false)),
        mean_predicted_single: mean(&|t| t.single.as_ref().map(|o| o.predicted_fail_prob)),
        mean_predicted_multi: mean(&|t| t.multi.as_ref().map(|o| o.predicted_fail_prob)),
    }
}

/// Runs every trial of the campaign.
pub fn run_campaign(cfg: &ExperimentConfig) -> Result<CampaignReport, CampaignError> {
    cfg.validate()?;
    let per_position = cfg.equations_per_position()?;
    let trials: Vec<TrialRecord> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(cfg, i, per_position))
        .collect();
    Ok(CampaignReport {
        format: "statdec-campaign v1",
        config: config_map(cfg),
        equations_per_position: per_position,
        single_weight: cfg.single_weight(),
        summary: summarize(&trials),
        trials,
    })
}
