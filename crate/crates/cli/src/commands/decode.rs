use std::path::PathBuf;

use clap::Args;
use statdec::decode::{decode_multi_weight_assuming, decode_single_weight_assuming, DecodeError};
use statdec::formats::DecodeReport;

use crate::error::{algorithm, format, CliError, CliResult};
use crate::io::{load_instance, load_pool, write_output};
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Instance to decode.
    #[arg(long)]
    instance: PathBuf,
    /// Pool harvested for the instance's code.
    #[arg(long)]
    pool: PathBuf,
    /// Weight class for single-weight decoding; defaults to the pool's
    /// window when it is a single weight, else `1 + k/2`.
    #[arg(long, conflicts_with = "multiweight")]
    w: Option<usize>,
    /// Weighted vote over every weight class in the pool.
    #[arg(long)]
    multiweight: bool,
    /// Error weight the biases assume (the instance's by default).
    #[arg(long)]
    t: Option<usize>,
}

pub fn run(g: &GlobalArgs, a: DecodeArgs) -> CliResult<()> {
    let problem = load_instance(&a.instance)?;
    let pool = load_pool(&a.pool, Some(&problem))?;
    let t = a.t.unwrap_or(problem.t);
    let (result, weight) = if a.multiweight {
        (decode_multi_weight_assuming(&problem, &pool, t), None)
    } else {
        let window = pool.window();
        let w = a
            .w
            .unwrap_or(if window.lo == window.hi { window.lo } else { 1 + problem.code.k() / 2 });
        (decode_single_weight_assuming(&problem, &pool, w, t), Some(w))
    };
    let mut result = result.map_err(|e| match e {
        DecodeError::PoolMismatch(_) => format(e),
        _ => algorithm(e),
    })?;
    result.evaluate(&problem);
    let report = DecodeReport::new(&problem, &pool, &result, weight);
    write_output(g.out.as_deref(), &(report.to_json().map_err(format)? + "\n"))?;

    eprintln!(
        "decoded weight {} with at least {} equations per position; predicted failure bound {:.3e}",
        result.e_hat.weight(),
        result.min_equations(),
        result.predicted_fail_prob
    );
    if result.t_misspecified {
        eprintln!("note: biases computed for t = {t}, instance declares t = {}", problem.t);
    }
    match (result.success, report.bit_errors) {
        (Some(true), _) => {
            eprintln!("success: decoded error matches the hidden one");
            Ok(())
        }
        (Some(false), Some(errors)) => Err(CliError::WrongDecoding(errors)),
        _ => Ok(()),
    }
}
