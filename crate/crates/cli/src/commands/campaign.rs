use std::path::PathBuf;

use clap::Args;
use statdec::experiment::run_campaign;

use crate::error::{algorithm, format, usage, CliResult};
use crate::io::{layered_config, write_output};
use crate::GlobalArgs;

/// Every flag has the name of the configuration key it overrides.
#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rate: Option<String>,
    /// One code for all trials instead of a fresh code per trial.
    #[arg(long)]
    code_seed: Option<String>,
    /// Error weight, a count or `gv:<fraction>`.
    #[arg(long)]
    t: Option<String>,
    /// `gauss` or `dumer`.
    #[arg(long)]
    method: Option<String>,
    /// Harvest window `w` or `lo..hi`.
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    dumer_l: Option<String>,
    #[arg(long)]
    dumer_r: Option<String>,
    /// `single`, `multi` or `both`.
    #[arg(long)]
    decoder: Option<String>,
    /// Single-weight class (default `1 + k/2`).
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Failure bound the per-position equation count is sized for.
    #[arg(long)]
    target_fail: Option<String>,
    /// Fixed equations per position, overriding the sizing rule.
    #[arg(long)]
    equations: Option<String>,
    #[arg(long)]
    iteration_cap: Option<String>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    dump_config: bool,
}

pub fn run(g: &GlobalArgs, a: CampaignArgs) -> CliResult<()> {
    let mut cfg = layered_config(
        g,
        &[
            ("n", a.n),
            ("rate", a.rate),
            ("code-seed", a.code_seed),
            ("t", a.t),
            ("method", a.method),
            ("window", a.window),
            ("dumer-l", a.dumer_l),
            ("dumer-r", a.dumer_r),
            ("decoder", a.decoder),
            ("w", a.w),
            ("trials", a.trials),
            ("target-fail", a.target_fail),
            ("equations", a.equations),
            ("iteration-cap", a.iteration_cap),
        ],
    )?;
    if let Some(out) = &g.out {
        cfg.out = Some(out.display().to_string());
    }
    cfg.validate().map_err(usage)?;
    if a.dump_config {
        return write_output(None, &cfg.to_text());
    }
    let report = run_campaign(&cfg).map_err(usage)?;
    let out = cfg.out.as_ref().map(PathBuf::from);
    write_output(out.as_deref(), &(report.to_json().map_err(format)? + "\n"))?;

    let s = &report.summary;
    eprintln!(
        "{} trials, {} equations of weight {} per position",
        s.trials, report.equations_per_position, report.single_weight
    );
    if let (Some(ok), Some(pred)) = (s.single_successes, s.mean_predicted_single) {
        eprintln!("single-weight: {ok}/{} recovered, mean predicted failure bound {pred:.3e}", s.trials);
    }
    if let (Some(ok), Some(pred)) = (s.multi_successes, s.mean_predicted_multi) {
        eprintln!("multi-weight:  {ok}/{} recovered, mean predicted failure bound {pred:.3e}", s.trials);
    }
    if let (Some(m), Some(o)) = (s.multi_only, s.single_only) {
        eprintln!("paired: {m} trials recovered only by multi-weight, {o} only by single-weight");
    }
    if s.errors > 0 {
        return Err(algorithm(format!("{} of {} trials failed to run; see the report", s.errors, s.trials)));
    }
    Ok(())
}
