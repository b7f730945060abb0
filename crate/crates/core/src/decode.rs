//! Majority-vote and weighted statistical decoders.
//!
//! For each position `i` the decoder looks at the parity checks through `i`
//! and counts how many satisfy `⟨y, h⟩ = 1`. Because `⟨y, h⟩ = ⟨e, h⟩` for
//! a dual word `h`, that count is a sample of `q1` when `e_i = 1` and of
//! `q0` otherwise; the decision is the threshold test between the two means.
//! All comparisons are exact in rational arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bias::{exact_biases, to_f64, BiasError, BiasPair};
use crate::bitmat::BitVector;
use crate::codec::DecodingProblem;
use crate::combinat::log2_abs_rational;
use crate::harvest::{ParityPool, WeightWindow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("no parity checks through position {0}")]
    EmptySlice(usize),
    #[error("ε1 = ε0 for every weight class at these parameters")]
    ZeroBias,
    #[error("no weight class has any equations")]
    Empty,
    #[error("pool does not belong to this code: {0}")]
    PoolMismatch(String),
    #[error(transparent)]
    Bias(#[from] BiasError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderMode {
    Single,
    Multi,
}

/// Per-position decision data.
///
/// In single-weight mode `v` is the signed counter `sgn(ε1 − ε0)·ones`. In
/// multi-weight mode `v` and `threshold` are the weighted statistic and
/// midpoint divided by the largest `|ε0(j) − ε1(j)|` among the classes, which
/// leaves the decision unchanged and keeps the values representable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionStats {
    pub i: usize,
    pub m: usize,
    /// Checks with `⟨y, h⟩ = 1`.
    pub ones: usize,
    pub v: f64,
    pub threshold: f64,
    pub decided_bit: u8,
    /// `|v − threshold| / m`.
    pub margin: f64,
}

/// One weight class through one position, with exact biases.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightClassStats {
    pub w: usize,
    pub m: usize,
    pub eps0: BigRational,
    pub eps1: BigRational,
    /// `ε0 − ε1`.
    pub delta: BigRational,
    /// `m·delta²`.
    pub contribution: BigRational,
}

impl WeightClassStats {
    pub fn new(m: usize, bias: &BiasPair) -> Self {
        let delta = &bias.eps0 - &bias.eps1;
        let contribution = &delta * &delta * BigInt::from(m);
        Self {
            w: bias.w,
            m,
            eps0: bias.eps0.clone(),
            eps1: bias.eps1.clone(),
            delta,
            contribution,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub mode: DecoderMode,
    pub e_hat: BitVector,
    pub per_position: Vec<PositionStats>,
    pub predicted_fail_prob: f64,
    /// Error weight the biases were computed for.
    pub t_assumed: usize,
    /// Set when `t_assumed` differs from the instance's declared weight.
    pub t_misspecified: bool,
    /// Set by [`DecodeResult::evaluate`] when ground truth exists.
    pub success: Option<bool>,
}

impl DecodeResult {
    /// Compares against the hidden error, if the instance carries one.
    pub fn evaluate(&mut self, problem: &DecodingProblem) -> Option<bool> {
        self.success = problem.hidden_e.as_ref().map(|e| *e == self.e_hat);
        self.success
    }

    /// Positions where `e_hat` differs from `e`.
    pub fn bit_errors(&self, e: &BitVector) -> usize {
        self.e_hat.xor(e).weight()
    }

    pub fn min_equations(&self) -> usize {
        self.per_position.iter().map(|p| p.m).min().unwrap_or(0)
    }
}

/// `2·2^{−m·δ²/(2 ln 2)} = 2·exp(−m·δ²/2)` with `δ = ε1 − ε0`. Equals 2 at
/// `m = 0`.
pub fn predicted_error_single(m: u64, bias: &BiasPair) -> f64 {
    if bias.delta.is_zero() {
        return 2.0;
    }
    let delta_sq = (-bias.log2_pw).exp2();
    2.0 * (-(m as f64) * delta_sq / 2.0).exp()
}

/// The weight with the largest `m_j·delta_j²`; ties go to the smaller weight.
pub fn dominant_weight(classes: &[WeightClassStats]) -> Result<usize, DecodeError> {
    let mut best: Option<&WeightClassStats> = None;
    for c in classes.iter().filter(|c| c.m > 0) {
        best = match best {
            None => Some(c),
            Some(b) if c.contribution > b.contribution || (c.contribution == b.contribution && c.w < b.w) => Some(c),
            keep => keep,
        };
    }
    best.map(|c| c.w).ok_or(DecodeError::Empty)
}

fn check_pool(problem: &DecodingProblem, pool: &ParityPool) -> Result<(), DecodeError> {
    let code = &problem.code;
    if pool.n() != code.n() || pool.k() != code.k() {
        return Err(DecodeError::PoolMismatch(format!(
            "pool is [{}, {}], code is [{}, {}]",
            pool.n(),
            pool.k(),
            code.n(),
            code.k()
        )));
    }
    if pool.code_seed() != code.seed() {
        return Err(DecodeError::PoolMismatch(format!(
            "pool code seed {} differs from {}",
            pool.code_seed(),
            code.seed()
        )));
    }
    Ok(())
}

fn rat_int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Decides a bit from the counts of one position with a single class.
fn single_decision(m: usize, ones: usize, bias: &BiasPair) -> PositionStats {
    let sgn = bias.sign() as i64;
    let v = sgn * ones as i64;
    let threshold = rat_int(m) * BigInt::from(sgn) * (BigRational::one() + &bias.eps0 + &bias.eps1)
        / BigRational::from_integer(BigInt::from(2));
    let bit = BigRational::from_integer(BigInt::from(v)) >= threshold;
    let thr = to_f64(&threshold);
    PositionStats {
        i: 0,
        m,
        ones,
        v: v as f64,
        threshold: thr,
        decided_bit: bit as u8,
        margin: if m == 0 { 0.0 } else { (v as f64 - thr).abs() / m as f64 },
    }
}

/// Single-weight majority voting, with biases for the declared `t`.
pub fn decode_single_weight(problem: &DecodingProblem, pool: &ParityPool, w: usize) -> Result<DecodeResult, DecodeError> {
    decode_single_weight_assuming(problem, pool, w, problem.t)
}

/// Single-weight majority voting with biases for `t_assumed`, which may
/// differ from the instance's declared weight.
pub fn decode_single_weight_assuming(
    problem: &DecodingProblem,
    pool: &ParityPool,
    w: usize,
    t_assumed: usize,
) -> Result<DecodeResult, DecodeError> {
    check_pool(problem, pool)?;
    let n = problem.code.n();
    let bias = exact_biases(n, w, t_assumed)?;
    if bias.delta.is_zero() {
        return Err(DecodeError::ZeroBias);
    }
    let window = WeightWindow { lo: w, hi: w };
    let y = &problem.y;
    let per_position: Vec<PositionStats> = (0..n)
        .into_par_iter()
        .map(|i| {
            let slice = pool.slice(i, window);
            if slice.is_empty() {
                return Err(DecodeError::EmptySlice(i));
            }
            let ones = slice.iter().filter(|h| y.dot(h)).count();
            Ok(PositionStats {
                i,
                ..single_decision(slice.len(), ones, &bias)
            })
        })
        .collect::<Result<_, _>>()?;
    let min_m = per_position.iter().map(|p| p.m).min().unwrap_or(0);
    let predicted = n as f64 * predicted_error_single(min_m as u64, &bias);
    Ok(assemble(DecoderMode::Single, per_position, predicted, problem.t, t_assumed))
}

fn assemble(
    mode: DecoderMode,
    per_position: Vec<PositionStats>,
    predicted_fail_prob: f64,
    t_declared: usize,
    t_assumed: usize,
) -> DecodeResult {
    let e_hat = BitVector::from_bits(per_position.iter().map(|p| p.decided_bit == 1));
    DecodeResult {
        mode,
        e_hat,
        per_position,
        predicted_fail_prob,
        t_assumed,
        t_misspecified: t_assumed != t_declared,
        success: None,
    }
}

/// Per-class counts at one position: `(m_j, ones_j)`.
type ClassCounts = BTreeMap<usize, (usize, usize)>;

/// Weighted test `V ≤ (E0 + E1)/2` over the classes of one position, where
/// `V = Σ δ_j·ones_j` and `E_l = Σ m_j·δ_j·(1/2 + ε_l(j))`. Returns the
/// decided bit with `V` and the midpoint.
fn multi_decision(counts: &ClassCounts, classes: &BTreeMap<usize, ClassCoeffs>) -> (bool, BigRational, BigRational) {
    let mut v = BigRational::zero();
    let mut mid = BigRational::zero();
    for (w, &(m, ones)) in counts {
        let c = &classes[w];
        v += &c.delta * BigInt::from(ones);
        mid += &c.mid_coeff * BigInt::from(m);
    }
    (v <= mid, v, mid)
}

/// Per-weight constants of the weighted statistic.
struct ClassCoeffs {
    delta: BigRational,
    /// `δ·(1 + ε0 + ε1)/2`, the per-equation midpoint contribution.
    mid_coeff: BigRational,
    /// `δ²` as a float, possibly underflowing to 0.
    delta_sq: f64,
}

impl ClassCoeffs {
    fn new(bias: &BiasPair, scale: &BigRational) -> Self {
        let delta = (&bias.eps0 - &bias.eps1) * scale;
        let mid_coeff = &delta * (BigRational::one() + &bias.eps0 + &bias.eps1) / BigRational::from_integer(BigInt::from(2));
        Self {
            delta,
            mid_coeff,
            delta_sq: (-bias.log2_pw).exp2(),
        }
    }
}

/// Multi-weight decoding over every weight class present in the pool.
pub fn decode_multi_weight(problem: &DecodingProblem, pool: &ParityPool) -> Result<DecodeResult, DecodeError> {
    decode_multi_weight_assuming(problem, pool, problem.t)
}

pub fn decode_multi_weight_assuming(
    problem: &DecodingProblem,
    pool: &ParityPool,
    t_assumed: usize,
) -> Result<DecodeResult, DecodeError> {
    check_pool(problem, pool)?;
    let n = problem.code.n();
    let weights: Vec<usize> = pool.by_weight().keys().copied().collect();
    if weights.is_empty() {
        return Err(DecodeError::EmptySlice(0));
    }
    let biases: Vec<BiasPair> = weights
        .iter()
        .map(|&w| exact_biases(n, w, t_assumed))
        .collect::<Result<_, _>>()?;
    let max_abs = biases.iter().map(|b| b.delta.abs()).max().unwrap_or_else(BigRational::zero);
    if max_abs.is_zero() {
        return Err(DecodeError::ZeroBias);
    }
    let scale = max_abs.recip();
    let classes: BTreeMap<usize, ClassCoeffs> = biases.iter().map(|b| (b.w, ClassCoeffs::new(b, &scale))).collect();
    let y = &problem.y;
    let results: Vec<(PositionStats, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut counts = ClassCounts::new();
            for h in pool.position_equations(i) {
                let entry = counts.entry(h.weight()).or_insert((0, 0));
                entry.0 += 1;
                entry.1 += y.dot(h) as usize;
            }
            let m: usize = counts.values().map(|c| c.0).sum();
            if m == 0 {
                return Err(DecodeError::EmptySlice(i));
            }
            let ones = counts.values().map(|c| c.1).sum();
            let (bit, v, mid) = multi_decision(&counts, &classes);
            let exponent: f64 = counts.iter().map(|(w, c)| c.0 as f64 * classes[w].delta_sq).sum();
            let (v, thr) = (to_f64(&v), to_f64(&mid));
            let stats = PositionStats {
                i,
                m,
                ones,
                v,
                threshold: thr,
                decided_bit: bit as u8,
                margin: (v - thr).abs() / m as f64,
            };
            Ok((stats, 2.0 * (-exponent / 2.0).exp()))
        })
        .collect::<Result<_, _>>()?;
    let predicted = results.iter().map(|r| r.1).sum();
    let per_position = results.into_iter().map(|r| r.0).collect();
    Ok(assemble(DecoderMode::Multi, per_position, predicted, problem.t, t_assumed))
}

/// Weight-class statistics through position `i`, for reports.
pub fn position_classes(pool: &ParityPool, i: usize, t: usize) -> Result<Vec<WeightClassStats>, DecodeError> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for h in pool.position_equations(i) {
        *counts.entry(h.weight()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(w, m)| Ok(WeightClassStats::new(m, &exact_biases(pool.n(), w, t)?)))
        .collect()
}

/// `log2` of a class contribution, `−inf` for zero.
pub fn log2_contribution(c: &WeightClassStats) -> f64 {
    if c.contribution.is_zero() {
        f64::NEG_INFINITY
    } else {
        log2_abs_rational(&c.contribution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{random_code, sample_problem};
    use crate::harvest::{harvest_gauss, HarvestOptions, Target};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn class(w: usize, contribution: BigRational) -> WeightClassStats {
        WeightClassStats {
            w,
            m: 1,
            eps0: r(0, 1),
            eps1: r(0, 1),
            delta: r(0, 1),
            contribution,
        }
    }

    #[test]
    fn dominant_weight_rules() {
        assert_eq!(dominant_weight(&[class(7, r(1, 2))]).unwrap(), 7);
        assert_eq!(dominant_weight(&[class(12, r(4, 1)), class(10, r(4, 1))]).unwrap(), 10);
        assert_eq!(dominant_weight(&[class(12, r(5, 1)), class(10, r(4, 1))]).unwrap(), 12);
        assert_eq!(dominant_weight(&[]), Err(DecodeError::Empty));
    }

    #[test]
    fn predicted_error_examples() {
        let b = exact_biases(4, 2, 1).unwrap();
        assert_eq!(predicted_error_single(0, &b), 2.0);
        let mut prev = 2.0;
        for m in 1..50 {
            let p = predicted_error_single(m, &b);
            assert!(p < prev);
            prev = p;
        }
        // δ = 2/3 (the (4,2,1) case: ε1 = 1/2, ε0 = −1/6), m = 24
        assert_eq!(b.delta, r(2, 3));
        assert!(predicted_error_single(24, &b) <= 0.01);
        assert!(predicted_error_single(23, &b) > 0.01);
    }

    #[test]
    fn weight_one_indicator_slice() {
        let b = exact_biases(10, 1, 1).unwrap();
        let hit = single_decision(5, 5, &b);
        let miss = single_decision(5, 0, &b);
        assert_eq!((hit.v, hit.decided_bit), (5.0, 1));
        assert_eq!((miss.v, miss.decided_bit), (0.0, 0));
    }

    #[test]
    fn ties_decide_one() {
        // (4,2,1): sgn = 1, threshold = m·(1 + 1/2 − 1/6)/2 = 2m/3; m = 3 ties at 2
        let b = exact_biases(4, 2, 1).unwrap();
        assert_eq!(single_decision(3, 2, &b).decided_bit, 1);
        assert_eq!(single_decision(3, 1, &b).decided_bit, 0);
    }

    fn small_setup(seed: u64) -> (DecodingProblem, ParityPool) {
        let code = random_code(40, 0.5, seed).unwrap();
        let problem = sample_problem(&code, 2, seed + 100).unwrap();
        let win = WeightWindow::new(9, 13).unwrap();
        let (pool, _) = harvest_gauss(
            &code,
            win,
            Target::PerPosition { count: 30, window: win },
            seed,
            HarvestOptions::default(),
        )
        .unwrap();
        (problem, pool)
    }

    #[test]
    fn counters_match_naive_recount() {
        let (problem, pool) = small_setup(1);
        let res = decode_single_weight(&problem, &pool, 11).unwrap();
        let e = problem.hidden_e.as_ref().unwrap();
        let sgn = exact_biases(40, 11, 2).unwrap().sign() as f64;
        for p in &res.per_position {
            let mut ones = 0;
            let mut m = 0;
            for h in pool.equations() {
                if h.get(p.i) && h.weight() == 11 {
                    m += 1;
                    ones += e.dot(h) as usize;
                }
            }
            assert_eq!((p.m, p.ones), (m, ones));
            assert_eq!(p.v, sgn * ones as f64);
            assert_eq!(res.e_hat.get(p.i), p.decided_bit == 1);
        }
    }

    #[test]
    fn multi_reduces_to_single_on_one_class() {
        let (problem, pool) = small_setup(2);
        let win = WeightWindow::exact(11).unwrap();
        let mut single_pool = ParityPool::empty(pool.n(), pool.k(), pool.code_seed(), win, pool.provenance.clone());
        for h in pool.equations() {
            if h.weight() == 11 {
                single_pool.insert(&problem.code, h.clone()).unwrap();
            }
        }
        let a = decode_single_weight(&problem, &single_pool, 11).unwrap();
        let b = decode_multi_weight(&problem, &single_pool).unwrap();
        assert_eq!(a.e_hat, b.e_hat);
    }

    #[test]
    fn zero_delta_class_is_ignored() {
        let b10 = exact_biases(40, 10, 3).unwrap();
        let flat = BiasPair { delta: r(0, 1), eps0: r(1, 10), eps1: r(1, 10), ..b10.clone() };
        let scale = r(1, 1);
        let mut classes = BTreeMap::new();
        classes.insert(10, ClassCoeffs::new(&b10, &scale));
        let mut with_flat = BTreeMap::new();
        with_flat.insert(10, ClassCoeffs::new(&b10, &scale));
        with_flat.insert(20, ClassCoeffs::new(&flat, &scale));
        for ones in 0..=12 {
            let only: ClassCounts = [(10, (12, ones))].into_iter().collect();
            let both: ClassCounts = [(10, (12, ones)), (20, (9, 4))].into_iter().collect();
            assert_eq!(multi_decision(&only, &classes).0, multi_decision(&both, &with_flat).0);
        }
    }

    #[test]
    fn decisions_invariant_under_scaling() {
        let b1 = exact_biases(30, 7, 3).unwrap();
        let b2 = exact_biases(30, 9, 3).unwrap();
        for scale in [r(1, 1), r(3, 1), r(1, 1000)] {
            let classes: BTreeMap<usize, ClassCoeffs> =
                [(7, ClassCoeffs::new(&b1, &scale)), (9, ClassCoeffs::new(&b2, &scale))].into_iter().collect();
            let base: BTreeMap<usize, ClassCoeffs> =
                [(7, ClassCoeffs::new(&b1, &r(1, 1))), (9, ClassCoeffs::new(&b2, &r(1, 1)))].into_iter().collect();
            for o1 in 0..=10 {
                for o2 in 0..=8 {
                    let counts: ClassCounts = [(7, (10, o1)), (9, (8, o2))].into_iter().collect();
                    assert_eq!(multi_decision(&counts, &classes).0, multi_decision(&counts, &base).0);
                }
            }
        }
    }

    #[test]
    fn contributions_equal_mean_gap() {
        for (w, m) in [(5usize, 10usize), (9, 3), (14, 40)] {
            let b = exact_biases(30, w, 4).unwrap();
            let c = WeightClassStats::new(m, &b);
            let delta = &b.eps0 - &b.eps1;
            let mm = rat_int(m);
            let half = r(1, 2);
            let e0 = &mm * &delta * (&half + &b.eps0);
            let e1 = &mm * &delta * (&half + &b.eps1);
            assert_eq!(c.contribution, e0 - e1);
            assert!(!c.contribution.is_negative());
        }
    }

    #[test]
    fn dominant_dominates_mean() {
        let (_, pool) = small_setup(3);
        for i in 0..pool.n() {
            let classes = position_classes(&pool, i, 2).unwrap();
            let j0 = dominant_weight(&classes).unwrap();
            let top = classes.iter().find(|c| c.w == j0).unwrap().contribution.clone();
            let total: BigRational = classes.iter().map(|c| c.contribution.clone()).sum();
            assert!(top * rat_int(pool.n()) >= total);
        }
    }

    #[test]
    fn empty_slice_is_reported() {
        let (problem, pool) = small_setup(4);
        assert!(matches!(decode_single_weight(&problem, &pool, 30), Err(DecodeError::EmptySlice(_))));
    }

    #[test]
    fn misspecified_t_is_flagged() {
        let (problem, pool) = small_setup(5);
        let res = decode_single_weight_assuming(&problem, &pool, 11, 3).unwrap();
        assert!(res.t_misspecified);
        assert_eq!(res.t_assumed, 3);
        assert!(!decode_single_weight(&problem, &pool, 11).unwrap().t_misspecified);
    }
}
