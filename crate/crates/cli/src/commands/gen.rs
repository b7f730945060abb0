use clap::Args;
use statdec::asympt::gv_distance;
use statdec::codec::{random_code, sample_problem};
use statdec::experiment::TrialSeeds;
use statdec::formats::write_instance;

use crate::error::{usage, CliResult};
use crate::io::{layered_config, write_output};
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Code length.
    #[arg(long)]
    n: Option<String>,
    /// Code rate k/n in (0, 1).
    #[arg(long)]
    rate: Option<String>,
    /// Error weight, either a count or `gv:<fraction>` of the GV distance.
    #[arg(long)]
    t: Option<String>,
    /// Fix the code independently of `--seed`.
    #[arg(long)]
    code_seed: Option<String>,
    /// Derive seeds as trial `TRIAL` of a campaign with the same seed would.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Leave the hidden error and message out of the file.
    #[arg(long)]
    no_hidden: bool,
}

pub fn run(g: &GlobalArgs, a: GenArgs) -> CliResult<()> {
    let cfg = layered_config(
        g,
        &[("n", a.n), ("rate", a.rate), ("t", a.t), ("code-seed", a.code_seed)],
    )?;
    cfg.validate().map_err(usage)?;
    let t = cfg.error_weight().map_err(usage)?;
    let seeds = TrialSeeds::derive(&cfg, a.trial);
    let code = random_code(cfg.n, cfg.rate, seeds.code).map_err(usage)?;
    let problem = sample_problem(&code, t, seeds.problem).map_err(usage)?;

    let tau = gv_distance(cfg.rate).map_err(usage)?;
    let radius = tau * cfg.n as f64;
    eprintln!(
        "[{}, {}] code, t = {t}; GV relative distance {tau:.6} (radius {radius:.2})",
        code.n(),
        code.k()
    );
    if t as f64 > radius {
        eprintln!("warning: t = {t} exceeds the GV radius {radius:.2}; the solution is unlikely to be unique");
    }
    write_output(g.out.as_deref(), &write_instance(&problem, !a.no_hidden))
}
