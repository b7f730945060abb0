use std::path::PathBuf;

use clap::Args;
use statdec::bias::{exact_biases, required_equations};
use statdec::experiment::Method;
use statdec::formats::write_pool;
use statdec::harvest::{
    harvest_dumer, harvest_gauss, HarvestError, HarvestOptions, HarvestStats, ParityPool, Target, WeightWindow,
};

use crate::error::{algorithm, usage, CliError, CliResult};
use crate::io::{layered_config, load_instance, load_pool, write_output};
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct HarvestArgs {
    /// Instance file whose code is harvested.
    #[arg(long)]
    instance: PathBuf,
    /// `gauss` or `dumer`.
    #[arg(long)]
    method: Option<String>,
    /// Kept weights, `w` or `lo..hi`.
    #[arg(long)]
    window: Option<String>,
    /// Collision-search syndrome bits.
    #[arg(long)]
    dumer_l: Option<String>,
    /// Collision-search error weight (even).
    #[arg(long)]
    dumer_r: Option<String>,
    /// Weight whose slices the default target fills.
    #[arg(long)]
    w: Option<String>,
    /// Decoding failure probability the default target is sized for.
    #[arg(long)]
    target_fail: Option<String>,
    /// Give up after this many iterations, keeping the partial pool.
    #[arg(long)]
    iteration_cap: Option<String>,
    /// Stop at this many equations in total.
    #[arg(long, conflicts_with = "per_position")]
    total: Option<usize>,
    /// Stop once every position has this many equations of weight `w`.
    #[arg(long)]
    per_position: Option<usize>,
    /// Iterations computed in parallel between merges.
    #[arg(long, default_value_t = 64)]
    batch: usize,
}

pub fn run(g: &GlobalArgs, a: HarvestArgs) -> CliResult<()> {
    let cfg = layered_config(
        g,
        &[
            ("method", a.method),
            ("window", a.window),
            ("dumer-l", a.dumer_l),
            ("dumer-r", a.dumer_r),
            ("w", a.w),
            ("target-fail", a.target_fail),
            ("iteration-cap", a.iteration_cap),
        ],
    )?;
    let problem = load_instance(&a.instance)?;
    let code = &problem.code;
    let (n, k) = (code.n(), code.k());
    let dumer = cfg.dumer();
    let window = match (cfg.window, cfg.method) {
        (Some(w), _) => w,
        (None, Method::Gauss) => WeightWindow::exact(cfg.w.unwrap_or(1 + k / 2)).map_err(usage)?,
        (None, Method::Dumer) => {
            dumer.validate(n, k).map_err(usage)?;
            dumer.default_window(k).map_err(usage)?
        }
    };
    let w = cfg.w.unwrap_or(match cfg.method {
        Method::Gauss => 1 + k / 2,
        Method::Dumer => (window.lo + window.hi) / 2,
    });
    let target = match (a.total, a.per_position) {
        (Some(total), _) => Target::Total(total),
        (None, Some(count)) => Target::PerPosition {
            count,
            window: WeightWindow::exact(w).map_err(usage)?,
        },
        (None, None) => {
            let bias = exact_biases(n, w, problem.t).map_err(usage)?;
            let count = required_equations(&bias, cfg.target_fail, n).map_err(usage)? as usize;
            eprintln!("target: {count} weight-{w} equations per position (failure bound {})", cfg.target_fail);
            Target::PerPosition {
                count,
                window: WeightWindow::exact(w).map_err(usage)?,
            }
        }
    };
    let opts = HarvestOptions {
        iteration_cap: cfg.iteration_cap,
        batch: a.batch,
    };
    let outcome = match cfg.method {
        Method::Gauss => harvest_gauss(code, window, target, cfg.seed, opts),
        Method::Dumer => harvest_dumer(code, dumer, Some(window), target, cfg.seed, opts),
    };
    match outcome {
        Ok((pool, stats)) => {
            write_output(g.out.as_deref(), &write_pool(&pool))?;
            report(&pool, &stats, cfg.method, dumer.expected_collisions(n, k));
            Ok(())
        }
        Err(HarvestError::IterationCapExceeded { cap, pool, stats }) => {
            write_output(g.out.as_deref(), &write_pool(&pool))?;
            report(&pool, &stats, cfg.method, dumer.expected_collisions(n, k));
            Err(algorithm(format!(
                "iteration cap {cap} reached before the target; partial pool of {} equations written with complete=false",
                pool.len()
            )))
        }
        Err(e @ (HarvestError::InvalidParams(_) | HarvestError::OutsideWindow { .. })) => Err(usage(e)),
        Err(e) => Err(algorithm(e)),
    }
}

fn report(pool: &ParityPool, stats: &HarvestStats, method: Method, expected_collisions: f64) {
    eprintln!(
        "{} iterations ({} singular retries): {} candidates, {} in window {} ({:.4}), {} duplicates, pool {}",
        stats.iterations,
        stats.singular_retries,
        stats.candidates,
        stats.in_window,
        pool.window(),
        stats.acceptance_fraction(),
        stats.duplicates,
        pool.len()
    );
    if method == Method::Dumer && stats.iterations > 0 {
        eprintln!(
            "collisions per iteration: observed {:.2}, predicted {expected_collisions:.2}",
            stats.collisions as f64 / stats.iterations as f64
        );
    }
    eprintln!("weight histogram of candidates:");
    for (w, c) in &stats.weight_histogram {
        eprintln!("  {w:>5} {c}");
    }
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    /// Pool files to merge.
    #[arg(required = true)]
    pools: Vec<PathBuf>,
    /// Re-check every equation against this instance's code.
    #[arg(long)]
    instance: Option<PathBuf>,
}

pub fn run_merge(g: &GlobalArgs, a: MergeArgs) -> CliResult<()> {
    let problem = a.instance.as_deref().map(load_instance).transpose()?;
    let mut merged: Option<ParityPool> = None;
    for path in &a.pools {
        let pool = load_pool(path, problem.as_ref())?;
        merged = Some(match merged {
            None => pool,
            Some(acc) => acc
                .merge(&pool)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?,
        });
    }
    let mut merged = merged.expect("clap requires at least one pool");
    merged.canonicalize();
    eprintln!("merged {} files into {} equations, window {}", a.pools.len(), merged.len(), merged.window());
    write_output(g.out.as_deref(), &write_pool(&merged))
}
