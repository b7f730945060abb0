//! Asymptotic exponents.
//!
//! All exponents are base 2 and per code bit: a quantity growing like
//! `2^{α·n}` is reported as `α`. `π(ω, τ)` is the exponent of the number of
//! weight-`ωn` parity checks statistical decoding needs against `τn` errors.
//! It has two closed forms, split by the curve `τ = 1/2 − √(ω − ω²)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bias::exact_biases;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptError {
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("ω = 1/2 makes the binomial base vanish")]
    DegenerateBase,
    #[error("no root of π(ω, τ) = H(ω) − R for R = {rate}, τ = {tau}")]
    NoRoot { rate: f64, tau: f64 },
}

type Result<T> = std::result::Result<T, AsymptError>;

fn domain<T>(msg: String) -> Result<T> {
    Err(AsymptError::DomainError(msg))
}

/// Binary entropy without argument checks; 0 outside `(0, 1)`.
fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// `H(x) = −x log2 x − (1−x) log2(1−x)`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("H({x}) needs x in [0, 1]"));
    }
    Ok(h2(x))
}

/// The preimage of `y` under `H` in `[0, 1/2]`, by bisection.
pub fn entropy_inv(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return domain(format!("H⁻¹({y}) needs y in [0, 1]"));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    // 60 halvings bring the bracket below 1e−18
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Relative Gilbert–Varshamov distance `H⁻¹(1 − R)`.
pub fn gv_distance(rate: f64) -> Result<f64> {
    check_rate(rate)?;
    entropy_inv(1.0 - rate)
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate < 1.0 {
        Ok(())
    } else {
        domain(format!("rate {rate} not in (0, 1)"))
    }
}

fn check_open_half(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 0.5 {
        Ok(())
    } else {
        domain(format!("{name} = {x} not in (0, 1/2)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Real,
    Complex,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Real => "real",
            Regime::Complex => "complex",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub omega: f64,
    pub tau: f64,
    pub regime: Regime,
    pub pi: f64,
}

/// `1/2 − √(ω − ω²)`: below it the quadratic has real roots.
pub fn regime_boundary(omega: f64) -> f64 {
    0.5 - (omega - omega * omega).sqrt()
}

pub fn regime_of(omega: f64, tau: f64) -> Regime {
    if tau < regime_boundary(omega) {
        Regime::Real
    } else {
        Regime::Complex
    }
}

/// Smaller root of `(1−ω)X² − (1−2τ)X + ω`, with the discriminant clamped
/// at zero so the formula extends continuously to the boundary.
fn small_root(omega: f64, tau: f64) -> f64 {
    let (a, b, c) = (1.0 - omega, -(1.0 - 2.0 * tau), omega);
    let disc = (b * b - 4.0 * a * c).max(0.0);
    (-b - disc.sqrt()) / (2.0 * a)
}

/// Real-regime closed form
/// `2ω log2 r − 2τ log2(1−r) − 2(1−τ) log2(1+r) + 2H(ω)`.
pub fn pi_real_formula(omega: f64, tau: f64) -> f64 {
    let r = small_root(omega, tau);
    2.0 * omega * r.log2() - 2.0 * tau * (1.0 - r).log2() - 2.0 * (1.0 - tau) * (1.0 + r).log2() + 2.0 * h2(omega)
}

/// Complex-regime closed form `H(ω) + H(τ) − 1`.
pub fn pi_complex_formula(omega: f64, tau: f64) -> f64 {
    h2(omega) + h2(tau) - 1.0
}

/// `π(ω, τ)` with the regime chosen by the boundary curve.
pub fn pi_exponent(omega: f64, tau: f64) -> Result<ExponentPoint> {
    check_open_half("ω", omega)?;
    check_open_half("τ", tau)?;
    let regime = regime_of(omega, tau);
    let pi = match regime {
        Regime::Real => pi_real_formula(omega, tau),
        Regime::Complex => pi_complex_formula(omega, tau),
    };
    Ok(ExponentPoint { omega, tau, regime, pi })
}

/// `π` evaluated in the `γ = 1/ω`, `s = τ/ω` parametrization. The complex
/// branch evaluates `2(ω·Re p(z) + H(ω))` at `z = r·e^{iφ}` in complex
/// arithmetic instead of using the entropy closed form.
pub fn corollary_pi(omega: f64, tau: f64) -> Result<ExponentPoint> {
    check_open_half("ω", omega)?;
    check_open_half("τ", tau)?;
    let gamma = 1.0 / omega;
    let s = tau / omega;
    if s < gamma / 2.0 - (gamma - 1.0).sqrt() {
        let (a, b) = (gamma - 1.0, -(gamma - 2.0 * s));
        let disc = (b * b - 4.0 * a).max(0.0);
        let r = (-b - disc.sqrt()) / (2.0 * a);
        let p = r.log2() - s * (1.0 - r).log2() - (gamma - s) * (1.0 + r).log2();
        return Ok(ExponentPoint {
            omega,
            tau,
            regime: Regime::Real,
            pi: 2.0 * (omega * p + h2(omega)),
        });
    }
    let radius = 1.0 / (gamma - 1.0).sqrt();
    let cos_phi = ((2.0 * s - gamma) / (2.0 * (gamma - 1.0).sqrt())).clamp(-1.0, 1.0);
    let z = Complex64::from_polar(radius, cos_phi.acos());
    let one = Complex64::new(1.0, 0.0);
    let log2 = |u: Complex64| u.ln() / std::f64::consts::LN_2;
    let p = log2(z) - s * log2(one + z) - (gamma - s) * log2(one - z);
    Ok(ExponentPoint {
        omega,
        tau,
        regime: Regime::Complex,
        pi: 2.0 * (omega * p.re + h2(omega)),
    })
}

/// Binomial-model exponent `−2τ log2(1 − 2ω)`.
pub fn pi_binomial(omega: f64, tau: f64) -> Result<f64> {
    if omega == 0.5 {
        return Err(AsymptError::DegenerateBase);
    }
    check_open_half("ω", omega)?;
    if !(0.0..0.5).contains(&tau) {
        return domain(format!("τ = {tau} not in [0, 1/2)"));
    }
    Ok(-2.0 * tau * (1.0 - 2.0 * omega).log2())
}

/// Slope `−2 log2(1 − 2ω)` of `π(ω, τ)` at `τ → 0`.
pub fn pi_sublinear_limit(omega: f64) -> Result<f64> {
    check_open_half("ω", omega)?;
    Ok(-2.0 * (1.0 - 2.0 * omega).log2())
}

/// `−log2(1 − R)`, the common sublinear-error exponent of ISD algorithms.
pub fn isd_sublinear_coeff(rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok(-(1.0 - rate).log2())
}

/// Expected-iteration exponent of Prange's algorithm,
/// `H(τ) − (1−R)·H(τ/(1−R))`.
pub fn prange_exponent(rate: f64, tau: f64) -> Result<f64> {
    check_rate(rate)?;
    if !(0.0..=(1.0 - rate) / 2.0).contains(&tau) {
        return domain(format!("τ = {tau} outside [0, (1−R)/2] for R = {rate}"));
    }
    Ok(h2(tau) - (1.0 - rate) * h2(tau / (1.0 - rate)))
}

/// Tolerance for `π − (H(ω) − R) ≤ 0`. At the GV distance the difference is
/// identically zero (up to rounding) on the complex side, so the root test
/// must absorb float noise.
const OMEGA0_TOL: f64 = 1e-12;
const OMEGA0_START: f64 = 1e-4;
const OMEGA0_STEP: f64 = 1e-3;

/// Smallest `ω` with `π(ω, τ) = H(ω) − R`: the lightest relative check
/// weight for which a random code holds enough checks.
///
/// Scans from `ω = 10⁻⁴` in steps of `10⁻³` for the first point where
/// `π(ω, τ) − (H(ω) − R)` drops to zero, then bisects the bracket.
pub fn omega0(rate: f64, tau: f64) -> Result<f64> {
    check_rate(rate)?;
    check_open_half("τ", tau)?;
    let g = |w: f64| pi_exponent(w, tau).map(|p| p.pi - (h2(w) - rate)).unwrap_or(f64::INFINITY);
    let upper = 0.5 - 1e-12;
    let (mut lo, mut hi) = (1e-12, OMEGA0_START);
    let mut found = g(OMEGA0_START) <= OMEGA0_TOL;
    while !found {
        if hi >= upper {
            return Err(AsymptError::NoRoot { rate, tau });
        }
        lo = hi;
        hi = (hi + OMEGA0_STEP).min(upper);
        found = g(hi) <= OMEGA0_TOL;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= OMEGA0_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Relative collision weight `ρ = (1−R+λ)·H⁻¹(2λ/(1−R+λ))` at which the
/// collision search runs in amortized constant time per output.
pub fn dumer_rho(rate: f64, lambda: f64) -> Result<f64> {
    check_rate(rate)?;
    let span = 1.0 - rate + lambda;
    if lambda <= 0.0 || 2.0 * lambda > span {
        return domain(format!("λ = {lambda} needs 0 < 2λ/(1−R+λ) <= 1"));
    }
    Ok(span * entropy_inv(2.0 * lambda / span)?)
}

/// Finite-length list count for the collision search at length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DumerListCount {
    pub l: usize,
    pub half_r: usize,
    /// `(1/n)·log2( C((n(1−R)+l)/2, r/2)² / 2^l )`.
    pub exponent: f64,
}

/// Evaluates `N_{r,l}` with `l = round(λn)` and `r/2 = round(ρn/2)`.
pub fn dumer_list_exponent(n: usize, rate: f64, lambda: f64) -> Result<DumerListCount> {
    let rho = dumer_rho(rate, lambda)?;
    let nf = n as f64;
    let l = (lambda * nf).round() as usize;
    let half_r = (rho * nf / 2.0).round() as usize;
    let half_len = ((nf * (1.0 - rate) + l as f64) / 2.0).round() as i64;
    let lb = crate::combinat::log2_binomial(half_len, half_r as i64);
    Ok(DumerListCount {
        l,
        half_r,
        exponent: (2.0 * lb - l as f64) / nf,
    })
}

/// Outcome of [`optimize_dumer`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DumerParams {
    pub rho: f64,
    pub lambda: f64,
    /// `ρ + (R − λ)/2`.
    pub omega_eff: f64,
    pub pi_at_omega_eff: f64,
    /// `max(π, λ)`: decoding cost against the harvest cost.
    pub pi_complete: f64,
    pub regime: Regime,
    pub omega0: f64,
    /// True when the weight-`R/2` systematic harvest was chosen instead.
    pub fallback: bool,
}

const LAMBDA_STEP: f64 = 1e-3;
const LAMBDA_TOL: f64 = 1e-6;

/// A candidate `λ` evaluated against the constraints.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    lambda: f64,
    rho: f64,
    omega_eff: f64,
    point: ExponentPoint,
}

fn candidate(rate: f64, tau: f64, omega0: f64, lambda: f64) -> Option<Candidate> {
    let rho = dumer_rho(rate, lambda).ok()?;
    let omega_eff = rho + (rate - lambda) / 2.0;
    // the lower bound on check weight and the cost balance λ ≤ π
    if omega_eff < omega0 {
        return None;
    }
    let point = pi_exponent(omega_eff, tau).ok()?;
    (lambda <= point.pi).then_some(Candidate {
        lambda,
        rho,
        omega_eff,
        point,
    })
}

/// Bisects between a feasible and an infeasible `λ` to the boundary, and
/// returns the last feasible candidate.
fn feasible_edge(rate: f64, tau: f64, omega0: f64, mut good: Candidate, mut bad: f64) -> Candidate {
    while (good.lambda - bad).abs() > 1e-12 {
        let mid = 0.5 * (good.lambda + bad);
        match candidate(rate, tau, omega0, mid) {
            Some(c) => good = c,
            None => bad = mid,
        }
    }
    good
}

/// Minimizes `π(ρ + (R−λ)/2, τ)` over `λ` subject to `ω_eff ≥ ω₀(R, τ)`
/// and `λ ≤ π(ω_eff, τ)`, with `ρ` tied to `λ` by [`dumer_rho`].
///
/// The scan uses steps of `10⁻³`; around the best grid point the feasible
/// edges are located by bisection and the interior by golden-section search
/// down to `10⁻⁶`. When no `λ` is feasible, or when the plain weight-`R/2`
/// harvest does at least as well, that point is returned with
/// `fallback = true`.
pub fn optimize_dumer(rate: f64, tau: f64) -> Result<DumerParams> {
    check_rate(rate)?;
    check_open_half("τ", tau)?;
    let w0 = omega0(rate, tau)?;
    let steps = ((1.0 - rate) / LAMBDA_STEP).floor() as usize;
    let grid: Vec<Option<Candidate>> = (1..=steps)
        .into_par_iter()
        .map(|i| candidate(rate, tau, w0, i as f64 * LAMBDA_STEP))
        .collect();
    let best_idx = grid
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (i, c)))
        .min_by(|a, b| a.1.point.pi.total_cmp(&b.1.point.pi))
        .map(|(i, _)| i);

    let fallback_point = pi_exponent(rate / 2.0, tau)?;
    let fallback = DumerParams {
        rho: 0.0,
        lambda: 0.0,
        omega_eff: rate / 2.0,
        pi_at_omega_eff: fallback_point.pi,
        pi_complete: fallback_point.pi,
        regime: fallback_point.regime,
        omega0: w0,
        fallback: true,
    };
    let Some(i) = best_idx else {
        return Ok(fallback);
    };
    let mut best = grid[i].expect("index of a feasible point");

    // feasible bracket around the best grid point
    let lambda_at = |j: usize| (j + 1) as f64 * LAMBDA_STEP;
    let left = if i == 0 {
        feasible_edge(rate, tau, w0, best, 0.0)
    } else {
        match grid[i - 1] {
            Some(c) => c,
            None => feasible_edge(rate, tau, w0, best, lambda_at(i - 1)),
        }
    };
    let right = match grid.get(i + 1) {
        Some(Some(c)) => *c,
        Some(None) => feasible_edge(rate, tau, w0, best, lambda_at(i + 1)),
        None => feasible_edge(rate, tau, w0, best, 1.0 - rate),
    };
    for c in [left, right] {
        if c.point.pi < best.point.pi {
            best = c;
        }
    }

    // golden-section search on the bracket
    let f = |l: f64| candidate(rate, tau, w0, l).map_or(f64::INFINITY, |c| c.point.pi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (left.lambda, right.lambda);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > LAMBDA_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if let Some(g) = candidate(rate, tau, w0, 0.5 * (a + b)) {
        if g.point.pi < best.point.pi {
            best = g;
        }
    }

    if fallback.pi_at_omega_eff <= best.point.pi {
        return Ok(fallback);
    }
    Ok(DumerParams {
        rho: best.rho,
        lambda: best.lambda,
        omega_eff: best.omega_eff,
        pi_at_omega_eff: best.point.pi,
        pi_complete: best.point.pi.max(best.lambda),
        regime: best.point.regime,
        omega0: w0,
        fallback: false,
    })
}

/// How `τ` is chosen for each rate of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    Gv,
    GvHalf,
    Fixed(f64),
}

impl TauRule {
    pub fn tau(&self, rate: f64) -> Result<f64> {
        match *self {
            TauRule::Gv => gv_distance(rate),
            TauRule::GvHalf => Ok(gv_distance(rate)? / 2.0),
            TauRule::Fixed(t) => Ok(t),
        }
    }
}

impl FromStr for TauRule {
    type Err = AsymptError;

    /// `gv`, `gv/2` or a number.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gv" => Ok(TauRule::Gv),
            "gv/2" | "gv_half" => Ok(TauRule::GvHalf),
            _ => s
                .parse::<f64>()
                .map(TauRule::Fixed)
                .map_err(|_| AsymptError::DomainError(format!("unknown τ rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    PiConstWeight,
    PiBinomial,
    Omega0,
    Prange,
    DumerOpt,
    SublinearSlopes,
}

impl FromStr for CurveKind {
    type Err = AsymptError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pi_const_weight" => CurveKind::PiConstWeight,
            "pi_binomial" => CurveKind::PiBinomial,
            "omega0" => CurveKind::Omega0,
            "prange" => CurveKind::Prange,
            "dumer_opt" => CurveKind::DumerOpt,
            "sublinear_slopes" => CurveKind::SublinearSlopes,
            _ => return domain(format!("unknown curve kind {s:?}")),
        })
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&fmt_sig12(*x)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Fixed decimal notation with 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.11}", 0.0);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit; one digit too many is harmless
    if s == "-0.00000000000" { "0.00000000000".into() } else { s }
}

/// A table of named columns, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Numeric values of a column; text cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[j] {
                    Cell::Num(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

fn build_rows<F>(grid: &[f64], row: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(f64) -> Result<Vec<Cell>> + Sync,
{
    if grid.is_empty() {
        return domain("empty rate grid".into());
    }
    grid.par_iter().map(|&r| row(r)).collect()
}

/// A single curve as `rate,tau,value,regime,aux`. The statistical-decoding
/// curves use `ω = R/2`; `aux` carries the kind's secondary quantity
/// (`ω₀`'s exponent, the ISD slope, or the optimal `λ`).
pub fn emit_curve(kind: CurveKind, grid: &[f64], rule: TauRule) -> Result<CsvTable> {
    let mut table = CsvTable::new(&["rate", "tau", "value", "regime", "aux"]);
    let none = || Cell::Text(String::new());
    table.rows = build_rows(grid, |rate| {
        let tau = rule.tau(rate)?;
        let (value, regime, aux) = match kind {
            CurveKind::PiConstWeight => {
                let p = pi_exponent(rate / 2.0, tau)?;
                (p.pi, Cell::Text(p.regime.to_string()), none())
            }
            CurveKind::PiBinomial => (pi_binomial(rate / 2.0, tau)?, none(), none()),
            CurveKind::Omega0 => {
                let w0 = omega0(rate, tau)?;
                let p = pi_exponent(w0, tau)?;
                (w0, Cell::Text(p.regime.to_string()), Cell::Num(p.pi))
            }
            CurveKind::Prange => (prange_exponent(rate, tau)?, none(), none()),
            CurveKind::DumerOpt => {
                let d = optimize_dumer(rate, tau)?;
                let tag = if d.fallback { "fallback".to_string() } else { d.regime.to_string() };
                (d.pi_complete, Cell::Text(tag), Cell::Num(d.lambda))
            }
            CurveKind::SublinearSlopes => (
                pi_sublinear_limit(rate / 2.0)?,
                none(),
                Cell::Num(2.0 * isd_sublinear_coeff(rate)?),
            ),
        };
        Ok(vec![Cell::Num(rate), Cell::Num(tau), Cell::Num(value), regime, aux])
    })?;
    Ok(table)
}

/// Rates `0.02, 0.04, …, 0.98`.
pub fn default_rate_grid() -> Vec<f64> {
    (1..50).map(|i| i as f64 * 0.02).collect()
}

/// Rates `0.005, 0.010, …, 0.1`, for the slopes near the origin.
pub fn small_rate_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.005).collect()
}

/// `(1/n)·log2 P_w` from exact biases, averaged over `w − 1, w, w + 1` to
/// step around zeros of the oscillating finite-length bias.
pub fn finite_exponent(n: usize, w: usize, t: usize) -> Result<f64> {
    let ws: Vec<usize> = [w.saturating_sub(1), w, w + 1]
        .into_iter()
        .filter(|&v| v >= 1 && v <= n)
        .collect();
    let mut total = 0.0;
    for &v in &ws {
        let b = exact_biases(n, v, t).map_err(|e| AsymptError::DomainError(e.to_string()))?;
        total += b.normalized_exponent();
    }
    Ok(total / ws.len() as f64)
}

/// Data for one of the figures comparing exponents as functions of `R`.
///
/// * 1: asymptotic `π(R/2, τ_GV)` against the length-`n` exact value.
/// * 2, 3, 4: binomial against constant-weight model at `ω = R/2`, with
///   `τ_GV` (2), `τ_GV` on small rates with slopes `value/R` (3), and
///   `τ_GV/2` (4).
/// * 5: Prange against statistical decoding at `ω = R/2`.
/// * 6: adds the lower bound `π(ω₀, τ_GV)`.
/// * 7: adds the optimized collision-search exponent.
pub fn figure_table(figure: u8, grid: Option<&[f64]>, n: usize) -> Result<CsvTable> {
    let default = if figure == 3 { small_rate_grid() } else { default_rate_grid() };
    let grid = grid.unwrap_or(&default);
    let (header, rule): (&[&str], TauRule) = match figure {
        1 => (&["rate", "tau", "asymptotic", "numeric", "n"], TauRule::Gv),
        2 | 4 => (&["rate", "tau", "binomial", "constant_weight"], if figure == 2 { TauRule::Gv } else { TauRule::GvHalf }),
        3 => (&["rate", "tau", "binomial", "constant_weight", "binomial_slope", "constant_weight_slope"], TauRule::Gv),
        5 => (&["rate", "tau", "prange", "statdec_half_rate"], TauRule::Gv),
        6 => (&["rate", "tau", "prange", "statdec_half_rate", "lower_bound", "omega0"], TauRule::Gv),
        7 => (
            &["rate", "tau", "prange", "statdec_half_rate", "lower_bound", "dumer_opt", "dumer_lambda", "dumer_fallback"],
            TauRule::Gv,
        ),
        _ => return domain(format!("unknown figure {figure}; expected 1 to 7")),
    };
    let mut table = CsvTable::new(header);
    table.rows = build_rows(grid, |rate| {
        let tau = rule.tau(rate)?;
        let half = pi_exponent(rate / 2.0, tau)?.pi;
        let mut row = vec![Cell::Num(rate), Cell::Num(tau)];
        match figure {
            1 => {
                let nf = n as f64;
                let w = (rate * nf / 2.0).round().max(1.0) as usize;
                let t = (tau * nf).round().max(1.0) as usize;
                row.extend([Cell::Num(half), Cell::Num(finite_exponent(n, w, t)?), Cell::Num(nf)]);
            }
            2..=4 => {
                let bin = pi_binomial(rate / 2.0, tau)?;
                row.extend([Cell::Num(bin), Cell::Num(half)]);
                if figure == 3 {
                    row.extend([Cell::Num(bin / rate), Cell::Num(half / rate)]);
                }
            }
            _ => {
                row.extend([Cell::Num(prange_exponent(rate, tau)?), Cell::Num(half)]);
                if figure >= 6 {
                    let w0 = omega0(rate, tau)?;
                    row.push(Cell::Num(pi_exponent(w0, tau)?.pi));
                    if figure == 6 {
                        row.push(Cell::Num(w0));
                    } else {
                        let d = optimize_dumer(rate, tau)?;
                        row.extend([
                            Cell::Num(d.pi_complete),
                            Cell::Num(d.lambda),
                            Cell::Text(d.fallback.to_string()),
                        ]);
                    }
                }
            }
        }
        Ok(row)
    })?;
    Ok(table)
}
