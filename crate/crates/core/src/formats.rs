//! Versioned text formats for instances, pools, decode reports and bias
//! tables.
//!
//! Every file starts with a magic line naming the format and its version;
//! readers refuse any other version. Bit vectors are written as lowercase
//! hex, four bits per digit, with bit `4j` the most significant bit of
//! digit `j` and zero padding at the end. `docs/formats.md` has worked
//! byte-level examples.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::bias::BiasPair;
use crate::bitmat::{BitMatrix, BitVector, BitmatError};
use crate::codec::{CodeInstance, CodecError, DecodingProblem};
use crate::decode::{DecodeResult, DecoderMode, PositionStats};
use crate::harvest::{checksum_of_sorted, HarvestError, ParityPool, Provenance, WeightWindow};

pub const INSTANCE_MAGIC: &str = "STATDEC-INSTANCE";
pub const POOL_MAGIC: &str = "STATDEC-POOL";
pub const REPORT_FORMAT: &str = "statdec-report v1";
pub const BIAS_TABLE_HEADER: &str = "# statdec-bias-table v1";
pub const VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsupported format header {0:?}")]
    UnsupportedVersion(String),
    #[error("checksum mismatch: file says {expected}, contents hash to {actual}")]
    ChecksumMismatch { expected: String, actual: String },
    #[error("pool holds {actual} equations but the header says {declared}")]
    CountMismatch { declared: usize, actual: usize },
    #[error("pool was harvested for a different code: {0}")]
    CodeMismatch(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Harvest(#[from] HarvestError),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, FormatError>;

/// Line reader with 1-based line numbers for error messages.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(FormatError::Syntax {
            line: self.last,
            msg: msg.into(),
        })
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l.trim_end_matches('\r'))
            }
            None => {
                self.last += 1;
                self.err("unexpected end of file")
            }
        }
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        match line.split_once('=') {
            Some((k, v)) if k == key => Ok(v),
            _ => self.err(format!("expected `{key}=…`, found {line:?}")),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        v.parse().or_else(|_| self.err(format!("cannot parse {key} value {v:?}")))
    }

    fn vector(&mut self, s: &str, len: usize) -> Result<BitVector> {
        BitVector::from_hex(s, len).or_else(|e: BitmatError| self.err(e.to_string()))
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.inner.by_ref().map(|(_, l)| l.trim()).find(|l| !l.is_empty()) {
            None => Ok(()),
            Some(l) => self.err(format!("trailing content {l:?}")),
        }
    }
}

fn check_magic(lines: &mut Lines<'_>, magic: &str) -> Result<()> {
    let first = lines.next_line()?;
    match first.split_once(' ') {
        Some((m, v)) if m == magic && v == VERSION => Ok(()),
        Some((m, _)) if m == magic => Err(FormatError::UnsupportedVersion(first.to_string())),
        _ => lines.err(format!("expected `{magic} {VERSION}`, found {first:?}")),
    }
}

fn opt_u64(v: Option<u64>) -> String {
    v.map_or_else(|| "none".to_string(), |s| s.to_string())
}

/// Writes an instance. Ground truth goes in a trailing section that is
/// omitted when `include_hidden` is false or the instance has none.
pub fn write_instance(problem: &DecodingProblem, include_hidden: bool) -> String {
    let code = &problem.code;
    let mut out = String::new();
    let _ = writeln!(out, "{INSTANCE_MAGIC} {VERSION}");
    let _ = writeln!(out, "n={}", code.n());
    let _ = writeln!(out, "k={}", code.k());
    let _ = writeln!(out, "t={}", problem.t);
    let _ = writeln!(out, "code_seed={}", code.seed());
    let _ = writeln!(out, "problem_seed={}", opt_u64(problem.seed));
    out.push_str("generator\n");
    for row in code.generator().rows() {
        let _ = writeln!(out, "{}", row.to_hex());
    }
    let _ = writeln!(out, "y={}", problem.y.to_hex());
    if include_hidden {
        if let (Some(e), Some(x)) = (&problem.hidden_e, &problem.hidden_x) {
            let _ = writeln!(out, "hidden_e={}", e.to_hex());
            let _ = writeln!(out, "hidden_x={}", x.to_hex());
        }
    }
    out.push_str("end\n");
    out
}

/// Parses an instance and checks the generator's rank and, when present,
/// the ground truth.
pub fn read_instance(text: &str) -> Result<DecodingProblem> {
    let mut lines = Lines::new(text);
    check_magic(&mut lines, INSTANCE_MAGIC)?;
    let n: usize = lines.parse("n")?;
    let k: usize = lines.parse("k")?;
    let t: usize = lines.parse("t")?;
    let code_seed: u64 = lines.parse("code_seed")?;
    let problem_seed = match lines.field("problem_seed")? {
        "none" => None,
        v => Some(v.parse().or_else(|_| lines.err(format!("cannot parse problem_seed {v:?}")))?),
    };
    if lines.next_line()? != "generator" {
        return lines.err("expected `generator`");
    }
    let mut rows = Vec::with_capacity(k);
    for _ in 0..k {
        let l = lines.next_line()?;
        rows.push(lines.vector(l, n)?);
    }
    let generator = BitMatrix::from_rows(n, rows).or_else(|e| lines.err(e.to_string()))?;
    let code = CodeInstance::from_generator(generator, code_seed)?;
    let y_hex = lines.field("y")?;
    let y = lines.vector(y_hex, n)?;
    let mut problem = DecodingProblem::honest(code, t, y)?;
    problem.seed = problem_seed;
    let mut line = lines.next_line()?;
    if let Some(e_hex) = line.strip_prefix("hidden_e=") {
        problem.hidden_e = Some(lines.vector(e_hex, n)?);
        let x_hex = lines.field("hidden_x")?;
        problem.hidden_x = Some(lines.vector(x_hex, k)?);
        line = lines.next_line()?;
    }
    if line != "end" {
        return lines.err(format!("expected `end`, found {line:?}"));
    }
    lines.expect_end()?;
    problem.check_ground_truth()?;
    Ok(problem)
}

/// Writes a pool: header, equations in pool order, and the checksum of the
/// sorted hex lines.
pub fn write_pool(pool: &ParityPool) -> String {
    let mut out = String::new();
    let p = &pool.provenance;
    let _ = writeln!(out, "{POOL_MAGIC} {VERSION}");
    let _ = writeln!(out, "n={}", pool.n());
    let _ = writeln!(out, "k={}", pool.k());
    let _ = writeln!(out, "code_seed={}", pool.code_seed());
    let _ = writeln!(out, "algorithm={}", p.algorithm);
    let _ = writeln!(out, "seed={}", p.seed);
    let _ = writeln!(out, "iterations={}", p.iterations);
    let _ = writeln!(out, "complete={}", p.complete);
    let _ = writeln!(out, "window={}", pool.window());
    let _ = writeln!(out, "count={}", pool.len());
    for h in pool.equations() {
        let _ = writeln!(out, "{}", h.to_hex());
    }
    let _ = writeln!(out, "checksum=sha256:{}", pool.checksum());
    out
}

/// Parses a pool, verifying count, checksum and weight window. With a
/// code, every equation is also re-checked for duality and the code's
/// parameters must match the header.
pub fn read_pool(text: &str, code: Option<&CodeInstance>) -> Result<ParityPool> {
    let mut lines = Lines::new(text);
    check_magic(&mut lines, POOL_MAGIC)?;
    let n: usize = lines.parse("n")?;
    let k: usize = lines.parse("k")?;
    let code_seed: u64 = lines.parse("code_seed")?;
    let algorithm = lines.parse("algorithm")?;
    let seed = lines.parse("seed")?;
    let iterations = lines.parse("iterations")?;
    let complete = lines.parse("complete")?;
    let window: WeightWindow = lines.parse("window")?;
    let count: usize = lines.parse("count")?;
    if let Some(c) = code {
        if (c.n(), c.k(), c.seed()) != (n, k, code_seed) {
            return Err(FormatError::CodeMismatch(format!(
                "pool is for [{n}, {k}] seed {code_seed}, instance is [{}, {}] seed {}",
                c.n(),
                c.k(),
                c.seed()
            )));
        }
    }
    let provenance = Provenance {
        algorithm,
        seed,
        iterations,
        complete,
    };
    let mut vectors = Vec::with_capacity(count);
    let declared_sum = loop {
        let line = lines.next_line()?;
        if let Some(sum) = line.strip_prefix("checksum=sha256:") {
            break sum.to_string();
        }
        vectors.push((lines.last, lines.vector(line, n)?));
    };
    lines.expect_end()?;
    if vectors.len() != count {
        return Err(FormatError::CountMismatch {
            declared: count,
            actual: vectors.len(),
        });
    }
    // integrity first, so a corrupted line is reported as such
    let mut hex: Vec<String> = vectors.iter().map(|(_, h)| h.to_hex()).collect();
    hex.sort();
    hex.dedup();
    let actual = checksum_of_sorted(&hex);
    if actual != declared_sum {
        return Err(FormatError::ChecksumMismatch {
            expected: declared_sum,
            actual,
        });
    }
    let mut pool = ParityPool::empty(n, k, code_seed, window, provenance);
    for (line, h) in vectors {
        if let Err(e) = pool.insert_loaded(code, h) {
            return Err(FormatError::Syntax { line, msg: e.to_string() });
        }
    }
    if pool.len() != count {
        return Err(FormatError::CountMismatch {
            declared: count,
            actual: pool.len(),
        });
    }
    Ok(pool)
}

/// JSON decode report.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeReport {
    pub format: &'static str,
    pub mode: DecoderMode,
    pub n: usize,
    pub k: usize,
    pub code_seed: u64,
    pub t_declared: usize,
    pub t_assumed: usize,
    pub t_misspecified: bool,
    /// The weight class used in single-weight mode.
    pub weight: Option<usize>,
    pub pool_checksum: String,
    pub pool_size: usize,
    pub min_equations: usize,
    pub predicted_fail_prob: f64,
    pub e_hat: String,
    pub e_hat_weight: usize,
    pub success: Option<bool>,
    pub bit_errors: Option<usize>,
    pub positions: Vec<PositionStats>,
}

impl DecodeReport {
    pub fn new(problem: &DecodingProblem, pool: &ParityPool, result: &DecodeResult, weight: Option<usize>) -> Self {
        Self {
            format: REPORT_FORMAT,
            mode: result.mode,
            n: problem.code.n(),
            k: problem.code.k(),
            code_seed: problem.code.seed(),
            t_declared: problem.t,
            t_assumed: result.t_assumed,
            t_misspecified: result.t_misspecified,
            weight,
            pool_checksum: pool.checksum(),
            pool_size: pool.len(),
            min_equations: result.min_equations(),
            predicted_fail_prob: result.predicted_fail_prob,
            e_hat: result.e_hat.to_hex(),
            e_hat_weight: result.e_hat.weight(),
            success: result.success,
            bit_errors: problem.hidden_e.as_ref().map(|e| result.bit_errors(e)),
            positions: result.per_position.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One line of a bias table.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasRow {
    pub n: usize,
    pub w: usize,
    pub t: usize,
    pub q0: BigRational,
    pub q1: BigRational,
}

impl From<&BiasPair> for BiasRow {
    fn from(b: &BiasPair) -> Self {
        Self {
            n: b.n,
            w: b.w,
            t: b.t,
            q0: b.q0.clone(),
            q1: b.q1.clone(),
        }
    }
}

/// Reduced fraction `p/q`, always with a denominator.
pub fn fmt_fraction(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_fraction(s: &str) -> Option<BigRational> {
    let (a, b) = s.split_once('/')?;
    let d: BigInt = b.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(a.parse().ok()?, d))
}

/// CSV with columns `n,w,t,q0,q1` and exact fractions.
pub fn write_bias_table(rows: &[BiasRow]) -> String {
    let mut out = format!("{BIAS_TABLE_HEADER}\nn,w,t,q0,q1\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.n, r.w, r.t, fmt_fraction(&r.q0), fmt_fraction(&r.q1));
    }
    out
}

pub fn read_bias_table(text: &str) -> Result<Vec<BiasRow>> {
    let mut lines = Lines::new(text);
    if lines.next_line()? != BIAS_TABLE_HEADER {
        return Err(FormatError::UnsupportedVersion(text.lines().next().unwrap_or("").to_string()));
    }
    if lines.next_line()? != "n,w,t,q0,q1" {
        return lines.err("expected column header `n,w,t,q0,q1`");
    }
    let mut rows = Vec::new();
    while let Ok(line) = lines.next_line() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parsed = (|| {
            if cells.len() != 5 {
                return None;
            }
            Some(BiasRow {
                n: cells[0].parse().ok()?,
                w: cells[1].parse().ok()?,
                t: cells[2].parse().ok()?,
                q0: parse_fraction(cells[3])?,
                q1: parse_fraction(cells[4])?,
            })
        })();
        match parsed {
            Some(r) => rows.push(r),
            None => return lines.err(format!("malformed row {line:?}")),
        }
    }
    Ok(rows)
}
