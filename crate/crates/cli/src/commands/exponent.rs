use clap::Args;
use statdec::asympt::{default_rate_grid, emit_curve, figure_table, CurveKind, TauRule};

use crate::error::{usage, CliResult};
use crate::io::write_output;
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct ExponentArgs {
    /// One of pi_const_weight, pi_binomial, omega0, prange, dumer_opt,
    /// sublinear_slopes.
    #[arg(long, required_unless_present = "figure", conflicts_with = "figure")]
    kind: Option<String>,
    /// The columns behind figure 1 to 7.
    #[arg(long)]
    figure: Option<u8>,
    /// `gv`, `gv/2` or a fixed relative error weight.
    #[arg(long, default_value = "gv")]
    tau: String,
    /// Comma-separated rates.
    #[arg(long, conflicts_with = "grid")]
    rates: Option<String>,
    /// Rate grid `start:stop:step`, both ends included.
    #[arg(long)]
    grid: Option<String>,
    /// Code length of figure 1's finite-length column.
    #[arg(long, default_value_t = 1000)]
    n: usize,
}

fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad grid {spec:?}")))?;
    let [start, stop, step] = parts[..] else {
        return Err(usage(format!("grid {spec:?} is not start:stop:step")));
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(usage(format!("grid {spec:?} is empty")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn parse_rates(list: &str) -> CliResult<Vec<f64>> {
    list.split(',')
        .map(|r| r.trim().parse::<f64>().map_err(|_| usage(format!("bad rate {r:?}"))))
        .collect()
}

pub fn run(g: &GlobalArgs, a: ExponentArgs) -> CliResult<()> {
    let grid = match (&a.rates, &a.grid) {
        (Some(list), _) => Some(parse_rates(list)?),
        (None, Some(spec)) => Some(parse_grid(spec)?),
        (None, None) => None,
    };
    let table = match (a.figure, &a.kind) {
        (Some(fig), _) => figure_table(fig, grid.as_deref(), a.n).map_err(usage)?,
        (None, Some(kind)) => {
            let kind: CurveKind = kind.parse().map_err(usage)?;
            let rule: TauRule = a.tau.parse().map_err(usage)?;
            let grid = grid.unwrap_or_else(default_rate_grid);
            emit_curve(kind, &grid, rule).map_err(usage)?
        }
        (None, None) => unreachable!("clap requires --kind or --figure"),
    };
    write_output(g.out.as_deref(), &table.to_csv())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        let g = parse_grid("0.1:0.5:0.1").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[4] - 0.5).abs() < 1e-12);
        assert!(parse_grid("0.5:0.1:0.1").is_err());
        assert!(parse_grid("0.1:0.5").is_err());
    }
}
