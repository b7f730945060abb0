use clap::Args;
use rayon::prelude::*;
use statdec::bias::{binomial_biases, biases_via_krawtchouk, exact_biases, mc_estimate_biases, to_f64};
use statdec::BigRational;
use statdec::formats::{fmt_fraction, write_bias_table, BiasRow};

use crate::error::{usage, CliError, CliResult};
use crate::io::write_output;
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct BiasArgs {
    /// Code length.
    #[arg(long, required_unless_present = "table")]
    n: Option<usize>,
    /// Parity-check weight.
    #[arg(long, required_unless_present = "table")]
    w: Option<usize>,
    /// Error weight.
    #[arg(long, required_unless_present = "table")]
    t: Option<usize>,
    /// Recompute through Krawtchouk polynomials and compare exactly.
    #[arg(long)]
    via_krawtchouk: bool,
    /// Also print the binomial-model biases.
    #[arg(long)]
    binomial: bool,
    /// Add a Monte-Carlo estimate from this many samples per hypothesis.
    #[arg(long, value_name = "SAMPLES")]
    mc: Option<u64>,
    /// Write the exact table for every 2 ≤ n ≤ MAX_N, 1 ≤ w, t ≤ n − 1.
    #[arg(long, value_name = "MAX_N", conflicts_with_all = ["n", "w", "t"])]
    table: Option<usize>,
}

fn rational_line(name: &str, q: &BigRational) -> String {
    format!("{name} = {} ({})\n", fmt_fraction(q), to_f64(q))
}

pub fn run(g: &GlobalArgs, a: BiasArgs) -> CliResult<()> {
    if let Some(max_n) = a.table {
        return write_table(g, max_n);
    }
    let (n, w, t) = (a.n.unwrap(), a.w.unwrap(), a.t.unwrap());
    let b = exact_biases(n, w, t).map_err(usage)?;
    let mut out = format!("n = {n}, w = {w}, t = {t}\n");
    out += &rational_line("q0", &b.q0);
    out += &rational_line("q1", &b.q1);
    out += &rational_line("eps0", &b.eps0);
    out += &rational_line("eps1", &b.eps1);
    out += &rational_line("delta", &b.delta);
    if b.log2_pw.is_finite() {
        out += &format!("log2_pw = {}\n", b.log2_pw);
    } else {
        out += "log2_pw = inf (zero bias)\n";
    }
    let mut mismatch = false;
    if a.via_krawtchouk {
        let k = biases_via_krawtchouk(n, w, t).map_err(usage)?;
        mismatch = !k.same_values(&b);
        out += if mismatch { "identity: MISMATCH\n" } else { "identity: exact match\n" };
    }
    if a.binomial {
        let (e0, e1) = binomial_biases(n, w, t);
        out += &format!("eps0_bin = {e0}\neps1_bin = {e1}\n");
    }
    if let Some(samples) = a.mc {
        let est = mc_estimate_biases(n, w, t, samples, g.seed.unwrap_or(0)).map_err(usage)?;
        let z0 = (est.q0_hat - to_f64(&b.q0)) / est.stderr0;
        let z1 = (est.q1_hat - to_f64(&b.q1)) / est.stderr1;
        out += &format!(
            "q0_mc = {} ± {} (z = {z0:.2})\nq1_mc = {} ± {} (z = {z1:.2})\n",
            est.q0_hat, est.stderr0, est.q1_hat, est.stderr1
        );
    }
    write_output(g.out.as_deref(), &out)?;
    if mismatch {
        Err(CliError::Verify(1))
    } else {
        Ok(())
    }
}

fn write_table(g: &GlobalArgs, max_n: usize) -> CliResult<()> {
    if max_n < 2 {
        return Err(usage("--table needs MAX_N >= 2"));
    }
    let triples: Vec<(usize, usize, usize)> = (2..=max_n)
        .flat_map(|n| (1..n).flat_map(move |w| (1..n).map(move |t| (n, w, t))))
        .collect();
    let rows: Vec<BiasRow> = triples
        .par_iter()
        .map(|&(n, w, t)| exact_biases(n, w, t).map(|b| BiasRow::from(&b)))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    write_output(g.out.as_deref(), &write_bias_table(&rows))
}
