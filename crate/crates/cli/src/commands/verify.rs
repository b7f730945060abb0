use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use statdec::asympt::{corollary_pi, pi_complex_formula, pi_exponent, pi_real_formula, regime_boundary};
use statdec::bias::{biases_via_krawtchouk, exact_biases};
use statdec::codec::{is_dual_word, random_code};
use statdec::formats::{read_bias_table, read_pool, write_pool};
use statdec::harvest::{harvest_dumer, harvest_gauss, DumerConfig, HarvestOptions, Target, WeightWindow};

use crate::error::{CliError, CliResult};
use crate::io::{load_instance, read_text, write_output};
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest length of the exact bias identity grid.
    #[arg(long, default_value_t = 40)]
    max_n: usize,
    /// Check a pool file instead of running the built-in suites.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Instance whose code the pool is checked against.
    #[arg(long, requires = "pool")]
    instance: Option<PathBuf>,
    /// Check every row of a bias table against both bias routes.
    #[arg(long)]
    bias_table: Option<PathBuf>,
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

pub fn run(g: &GlobalArgs, a: VerifyArgs) -> CliResult<()> {
    let mut checks = Vec::new();
    if let Some(path) = &a.pool {
        checks.push(check_pool_file(path, a.instance.as_ref())?);
    }
    if let Some(path) = &a.bias_table {
        checks.push(check_bias_table(path)?);
    }
    if checks.is_empty() {
        checks.push(identity_grid(a.max_n));
        checks.push(boundary_continuity());
        checks.push(corollary_equivalence());
        checks.push(tiny_pool_soundness(g.seed.unwrap_or(0)));
    }
    let mut out = String::new();
    for c in &checks {
        out += &format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    write_output(g.out.as_deref(), &out)?;
    match checks.iter().filter(|c| !c.pass).count() {
        0 => Ok(()),
        failed => Err(CliError::Verify(failed)),
    }
}

fn identity_grid(max_n: usize) -> Check {
    let triples: Vec<(usize, usize, usize)> = (2..=max_n)
        .flat_map(|n| (1..n).flat_map(move |w| (1..n).map(move |t| (n, w, t))))
        .collect();
    let mut bad: Vec<(usize, usize, usize)> = triples
        .par_iter()
        .filter(|&&(n, w, t)| match (exact_biases(n, w, t), biases_via_krawtchouk(n, w, t)) {
            (Ok(a), Ok(b)) => !a.same_values(&b),
            _ => true,
        })
        .copied()
        .collect();
    bad.sort();
    Check {
        name: "bias identity",
        pass: bad.is_empty(),
        detail: match bad.first() {
            None => format!("{} triples with n <= {max_n} agree exactly", triples.len()),
            Some((n, w, t)) => format!("{} mismatches, first at (n, w, t) = ({n}, {w}, {t})", bad.len()),
        },
    }
}

fn boundary_continuity() -> Check {
    let worst = (0..100)
        .map(|i| {
            let w = 0.004 + 0.492 * i as f64 / 99.0;
            let b = regime_boundary(w);
            (pi_real_formula(w, b) - pi_complex_formula(w, b)).abs()
        })
        .fold(0.0f64, f64::max);
    Check {
        name: "regime boundary continuity",
        pass: worst <= 1e-6,
        detail: format!("max gap {worst:.2e} over 100 points (tolerance 1e-6)"),
    }
}

fn corollary_equivalence() -> Check {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..20 {
        for j in 0..10 {
            let w = 0.005 + 0.49 * i as f64 / 19.0;
            let t = 0.005 + 0.49 * j as f64 / 9.0;
            match (pi_exponent(w, t), corollary_pi(w, t)) {
                (Ok(a), Ok(b)) => worst = worst.max((a.pi - b.pi).abs()),
                _ => failures += 1,
            }
        }
    }
    Check {
        name: "closed form vs complex path",
        pass: worst <= 1e-9 && failures == 0,
        detail: format!("max difference {worst:.2e} over 200 points (tolerance 1e-9), {failures} evaluation errors"),
    }
}

fn tiny_pool_soundness(seed: u64) -> Check {
    let result = (|| -> Result<String, String> {
        let code = random_code(24, 0.5, seed).map_err(|e| e.to_string())?;
        let opts = HarvestOptions::default();
        let window = WeightWindow::new(1, 24).map_err(|e| e.to_string())?;
        let (gauss, _) = harvest_gauss(&code, window, Target::Total(200), seed, opts).map_err(|e| e.to_string())?;
        let (dumer, _) = harvest_dumer(&code, DumerConfig { l: 4, r: 2 }, Some(window), Target::Total(200), seed, opts)
            .map_err(|e| e.to_string())?;
        let mut total = 0;
        for pool in [&gauss, &dumer] {
            if let Some(h) = pool.equations().iter().find(|h| !is_dual_word(&code, h)) {
                return Err(format!("non-dual vector {}", h.to_hex()));
            }
            let back = read_pool(&write_pool(pool), Some(&code)).map_err(|e| e.to_string())?;
            if back.checksum() != pool.checksum() {
                return Err("pool file round trip changed the checksum".into());
            }
            total += pool.len();
        }
        Ok(format!("{total} equations from both harvesters on a [24, 12] code are dual and round-trip"))
    })();
    Check {
        name: "pool soundness",
        pass: result.is_ok(),
        detail: result.unwrap_or_else(|e| e),
    }
}

fn check_pool_file(path: &Path, instance: Option<&PathBuf>) -> CliResult<Check> {
    let problem = instance.map(|p| load_instance(p)).transpose()?;
    let text = read_text(path)?;
    let (pass, detail) = match read_pool(&text, problem.as_ref().map(|p| &p.code)) {
        Ok(pool) => (
            true,
            format!(
                "{}: {} equations, window {}, checksum valid{}",
                path.display(),
                pool.len(),
                pool.window(),
                if problem.is_some() { ", all dual" } else { "" }
            ),
        ),
        Err(e) => (false, format!("{}: {e}", path.display())),
    };
    Ok(Check {
        name: "pool file",
        pass,
        detail,
    })
}

fn check_bias_table(path: &Path) -> CliResult<Check> {
    let text = read_text(path)?;
    let rows = match read_bias_table(&text) {
        Ok(rows) => rows,
        Err(e) => {
            return Ok(Check {
                name: "bias table",
                pass: false,
                detail: format!("{}: {e}", path.display()),
            })
        }
    };
    let bad: Vec<String> = rows
        .par_iter()
        .filter_map(|r| {
            let ok = match (exact_biases(r.n, r.w, r.t), biases_via_krawtchouk(r.n, r.w, r.t)) {
                (Ok(a), Ok(b)) => a.q0 == r.q0 && a.q1 == r.q1 && a.same_values(&b),
                _ => false,
            };
            (!ok).then(|| format!("({}, {}, {})", r.n, r.w, r.t))
        })
        .collect();
    Ok(Check {
        name: "bias table",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{}: {} rows match both bias routes", path.display(), rows.len())
        } else {
            format!(
                "{}: {} of {} rows disagree, offending (n, w, t): {}",
                path.display(),
                bad.len(),
                rows.len(),
                bad.iter().take(10).cloned().collect::<Vec<_>>().join(" ")
            )
        },
    })
}
