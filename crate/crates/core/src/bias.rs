//! Exact parity-check biases.
//!
//! For a weight-`w` check `h` drawn uniformly among words with `h_i = 1`, and
//! an error `e` of weight `t`, `q1` (resp. `q0`) is the probability that
//! `⟨e, h⟩ = 1` given `e_i = 1` (resp. `e_i = 0`). Both are ratios of
//! hypergeometric sums computed here in unbounded-integer rationals; the
//! difference `ε1 − ε0` is exponentially small in `n` and a floating-point
//! evaluation of the alternating sums loses it to cancellation. Float and
//! log views are derived from the exact values at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::combinat::{binomial_int, binomial_row, log2_abs_rational};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BiasError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("weight {w} is not below n/2 = {half}")]
    DegenerateBase { w: usize, half: f64 },
    #[error("ε1 = ε0: the two hypotheses cannot be distinguished")]
    ZeroBias,
    #[error("required equation count does not fit in 64 bits")]
    EquationCountOverflow,
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Exact biases for one `(n, w, t)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasPair {
    pub n: usize,
    pub w: usize,
    pub t: usize,
    pub q0: BigRational,
    pub q1: BigRational,
    pub eps0: BigRational,
    pub eps1: BigRational,
    /// `ε1 − ε0`.
    pub delta: BigRational,
    /// `log2 P_w = −2·log2|ε1 − ε0|`; `+inf` when the bias vanishes.
    pub log2_pw: f64,
}

impl BiasPair {
    fn from_eps(n: usize, w: usize, t: usize, eps0: BigRational, eps1: BigRational) -> Self {
        let delta = &eps1 - &eps0;
        let log2_pw = if delta.is_zero() {
            f64::INFINITY
        } else {
            -2.0 * log2_abs_rational(&delta)
        };
        Self {
            n,
            w,
            t,
            q0: &eps0 + half(),
            q1: &eps1 + half(),
            eps0,
            eps1,
            delta,
            log2_pw,
        }
    }

    /// `sgn(ε1 − ε0)` as −1, 0 or 1.
    pub fn sign(&self) -> i32 {
        if self.delta.is_zero() {
            0
        } else if self.delta.is_positive() {
            1
        } else {
            -1
        }
    }

    /// `(ε1 − ε0)²` in floating point; underflows to 0 for very large `n`,
    /// in which case use [`BiasPair::log2_pw`].
    pub fn delta_sq_f64(&self) -> f64 {
        (-self.log2_pw).exp2()
    }

    /// `(1/n)·log2 P_w`.
    pub fn normalized_exponent(&self) -> f64 {
        self.log2_pw / self.n as f64
    }

    /// Whether both rationals have exactly the same values as `other`.
    pub fn same_values(&self, other: &BiasPair) -> bool {
        self.q0 == other.q0 && self.q1 == other.q1
    }
}

fn check_nwt(n: usize, w: usize, t: usize) -> Result<(), BiasError> {
    if w == 0 || w > n {
        return Err(BiasError::InvalidParams(format!("need 1 <= w <= n, got w = {w}, n = {n}")));
    }
    if t > n {
        return Err(BiasError::InvalidParams(format!("need t <= n, got t = {t}, n = {n}")));
    }
    Ok(())
}

/// `Σ_j C(t−1, j)·C(n−t, w−1−j)` over even `j`, and the matching odd sum with
/// `C(t, j)·C(n−t−1, w−1−j)`. Binomials with a negative top are zero, so
/// `t = 0` gives `q1 = 0` and `t = n` gives `q0 = 0`.
pub fn exact_biases(n: usize, w: usize, t: usize) -> Result<BiasPair, BiasError> {
    check_nwt(n, w, t)?;
    let (n_, w_, t_) = (n as i64, w as i64, t as i64);
    let norm = binomial_int(n_ - 1, w_ - 1);
    let top = w - 1;
    let (a1, b1) = (binomial_row(t_ - 1, top), binomial_row(n_ - t_, top));
    let (a0, b0) = (binomial_row(t_, top), binomial_row(n_ - t_ - 1, top));
    let mut even = BigInt::zero();
    let mut odd = BigInt::zero();
    for j in 0..=top {
        if j % 2 == 0 {
            even += &a1[j] * &b1[top - j];
        } else {
            odd += &a0[j] * &b0[top - j];
        }
    }
    let q1 = rat(even, norm.clone());
    let q0 = rat(odd, norm);
    Ok(BiasPair::from_eps(n, w, t, q0 - half(), q1 - half()))
}

/// An exact Krawtchouk polynomial evaluation `p_v^m(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrawtchoukValue {
    pub v: usize,
    pub m: usize,
    pub s: usize,
    pub value: BigRational,
}

/// `p_v^m(s) = ((−1)^v / 2^v) · Σ_j (−1)^j C(s, j) C(m−s, v−j)`.
pub fn krawtchouk(v: usize, m: usize, s: usize) -> Result<KrawtchoukValue, BiasError> {
    if v > m || s > m {
        return Err(BiasError::InvalidParams(format!(
            "need v <= m and s <= m, got v = {v}, m = {m}, s = {s}"
        )));
    }
    let a = binomial_row(s as i64, v);
    let b = binomial_row((m - s) as i64, v);
    let mut sum = BigInt::zero();
    for j in 0..=v {
        let term = &a[j] * &b[v - j];
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if v % 2 == 1 {
        sum = -sum;
    }
    Ok(KrawtchoukValue {
        v,
        m,
        s,
        value: rat(sum, BigInt::one() << v),
    })
}

/// `(−2)^e` as an exact rational, for any integer exponent.
fn neg_two_pow(e: i64) -> BigRational {
    let mag = BigInt::one() << e.unsigned_abs();
    let signed = if e.rem_euclid(2) == 1 { -mag } else { mag };
    if e >= 0 {
        BigRational::from_integer(signed)
    } else {
        rat(BigInt::one(), signed)
    }
}

/// The biases through the Krawtchouk identities
/// `ε1 = −(−2)^{w−2}·p_{w−1}^{n−1}(t−1)/C(n−1, w−1)` and
/// `ε0 = (−2)^{w−2}·p_{w−1}^{n−1}(t)/C(n−1, w−1)`.
///
/// At `w = 1` the factor `(−2)^{−1}` is the rational `−1/2`. Requires
/// `1 ≤ t ≤ n−1` so both evaluation points lie in `[0, n−1]`.
pub fn biases_via_krawtchouk(n: usize, w: usize, t: usize) -> Result<BiasPair, BiasError> {
    check_nwt(n, w, t)?;
    if t == 0 || t >= n {
        return Err(BiasError::InvalidParams(format!(
            "the Krawtchouk route needs 1 <= t <= n−1, got t = {t}"
        )));
    }
    let coef = neg_two_pow(w as i64 - 2) / BigRational::from_integer(binomial_int(n as i64 - 1, w as i64 - 1));
    let p1 = krawtchouk(w - 1, n - 1, t - 1)?.value;
    let p0 = krawtchouk(w - 1, n - 1, t)?.value;
    let eps1 = -(&coef * p1);
    let eps0 = coef * p0;
    Ok(BiasPair::from_eps(n, w, t, eps0, eps1))
}

/// Biases `(ε0, ε1)` when check coordinates are i.i.d. Bernoulli(w/n):
/// `ε0 = −(1−2w/n)^t / 2`, `ε1 = (1−2w/n)^{t−1} / 2`.
pub fn binomial_biases(n: usize, w: usize, t: usize) -> (f64, f64) {
    let base = 1.0 - 2.0 * w as f64 / n as f64;
    let eps0 = -0.5 * base.powi(t as i32);
    let eps1 = 0.5 * base.powi(t as i32 - 1);
    (eps0, eps1)
}

/// Signed log-domain form of [`binomial_biases`]: each entry is
/// `(sign, log2|ε|)`, usable when `t` is large enough to underflow.
pub fn binomial_biases_log2(n: usize, w: usize, t: usize) -> ((f64, f64), (f64, f64)) {
    let base = 1.0 - 2.0 * w as f64 / n as f64;
    let lb = base.abs().log2();
    let sign_pow = |e: usize| if base < 0.0 && e % 2 == 1 { -1.0 } else { 1.0 };
    let eps0 = (-sign_pow(t), t as f64 * lb - 1.0);
    let eps1 = (sign_pow(t - 1), (t as f64 - 1.0) * lb - 1.0);
    let fix = |(s, l): (f64, f64)| if base == 0.0 && l.is_nan() { (s, f64::NEG_INFINITY) } else { (s, l) };
    (fix(eps0), fix(eps1))
}

/// `log2 J_min = −2(t−1)·log2(1 − 2w/n)`, the check-sum count of the
/// iterative binomial-model decoder.
pub fn jmin_log2(n: usize, w: usize, t: usize) -> Result<f64, BiasError> {
    if 2 * w >= n {
        return Err(BiasError::DegenerateBase {
            w,
            half: n as f64 / 2.0,
        });
    }
    if t == 0 {
        return Err(BiasError::InvalidParams("t must be at least 1".into()));
    }
    Ok(-2.0 * (t as f64 - 1.0) * (1.0 - 2.0 * w as f64 / n as f64).log2())
}

/// Smallest `m` with `positions · 2 · 2^{−m·δ²/(2 ln 2)} ≤ target`, i.e. the
/// Chernoff-sized sample count union-bounded over `positions` decisions.
pub fn required_equations(bias: &BiasPair, target_fail_prob: f64, positions: usize) -> Result<u64, BiasError> {
    if bias.delta.is_zero() {
        return Err(BiasError::ZeroBias);
    }
    if !(target_fail_prob > 0.0 && target_fail_prob < 1.0) || positions == 0 {
        return Err(BiasError::InvalidParams(format!(
            "target {target_fail_prob} must be in (0, 1) and positions >= 1"
        )));
    }
    // positions·2·exp(−m·δ²/2) ≤ target  ⇔  m ≥ 2·ln(2·positions/target)/δ²
    let ln_ratio = (2.0 * positions as f64 / target_fail_prob).ln();
    let log2_m = (2.0 * ln_ratio).log2() + bias.log2_pw;
    if log2_m >= 63.0 {
        return Err(BiasError::EquationCountOverflow);
    }
    let delta_sq = bias.delta_sq_f64();
    let holds = |m: u64| {
        let log_fail = (positions as f64 * 2.0).ln() - m as f64 * delta_sq / 2.0;
        log_fail <= target_fail_prob.ln()
    };
    let mut m = log2_m.exp2().ceil().max(1.0) as u64;
    while m > 1 && holds(m - 1) {
        m -= 1;
    }
    while !holds(m) {
        m += 1;
    }
    Ok(m)
}

/// Monte-Carlo estimates of `q0`, `q1` with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub q0_hat: f64,
    pub q1_hat: f64,
    pub stderr0: f64,
    pub stderr1: f64,
    pub samples: u64,
}

const MC_CHUNK: u64 = 1 << 15;

/// Draws, per sample and independently for each hypothesis, a position `i`,
/// a check `h` uniform among weight-`w` words with `h_i = 1`, and an error
/// `e` uniform of weight `t` with `e_i` fixed, and records `⟨e, h⟩`.
///
/// Work is split in fixed-size chunks with one random stream each, so the
/// estimate does not depend on the number of threads.
pub fn mc_estimate_biases(n: usize, w: usize, t: usize, samples: u64, seed: u64) -> Result<McEstimate, BiasError> {
    check_nwt(n, w, t)?;
    if t == 0 || t >= n {
        return Err(BiasError::InvalidParams(format!(
            "sampling both hypotheses needs 1 <= t <= n−1, got t = {t}"
        )));
    }
    if samples == 0 {
        return Err(BiasError::InvalidParams("samples must be >= 1".into()));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let (ones0, ones1) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut r = rng::stream(seed, "mc-bias", c);
            let mut mark = vec![0u64; n];
            let mut stamp = 0u64;
            let (mut o0, mut o1) = (0u64, 0u64);
            for _ in 0..count {
                for e_i in [false, true] {
                    stamp += 1;
                    let i = r.gen_range(0..n);
                    // h: position i plus w−1 others
                    mark[i] = stamp;
                    for j in rand::seq::index::sample(&mut r, n - 1, w - 1).iter() {
                        mark[if j >= i { j + 1 } else { j }] = stamp;
                    }
                    // e: e_i fixed, remaining errors among the other n−1
                    let rest = if e_i { t - 1 } else { t };
                    let mut parity = e_i;
                    for j in rand::seq::index::sample(&mut r, n - 1, rest).iter() {
                        let pos = if j >= i { j + 1 } else { j };
                        parity ^= mark[pos] == stamp;
                    }
                    if parity {
                        if e_i {
                            o1 += 1;
                        } else {
                            o0 += 1;
                        }
                    }
                }
            }
            (o0, o1)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let s = samples as f64;
    let (q0, q1) = (ones0 as f64 / s, ones1 as f64 / s);
    Ok(McEstimate {
        q0_hat: q0,
        q1_hat: q1,
        stderr0: (q0 * (1.0 - q0) / s).sqrt(),
        stderr1: (q1 * (1.0 - q1) / s).sqrt(),
        samples,
    })
}

/// Exact rational as a lossy `f64`.
pub fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        let l = log2_abs_rational(q);
        let s = if q.is_negative() { -1.0 } else { 1.0 };
        s * l.exp2()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Brute-force oracle: enumerate every `h ∈ S_{w,i}` and every weight-`t`
    /// error with `e_i` fixed, at position `i = 0`.
    fn enumerate_biases(n: usize, w: usize, t: usize) -> (BigRational, BigRational) {
        let mut counts = [(0i64, 0i64); 2];
        for h in 0u32..(1 << n) {
            if h & 1 == 0 || h.count_ones() as usize != w {
                continue;
            }
            for e in 0u32..(1 << n) {
                if e.count_ones() as usize != t {
                    continue;
                }
                let ei = (e & 1) as usize;
                counts[ei].1 += 1;
                if (e & h).count_ones() % 2 == 1 {
                    counts[ei].0 += 1;
                }
            }
        }
        let q = |(a, b): (i64, i64)| if b == 0 { r(0, 1) } else { r(a, b) };
        (q(counts[0]), q(counts[1]))
    }

    #[test]
    fn small_case_from_enumeration() {
        let b = exact_biases(4, 2, 1).unwrap();
        assert_eq!(b.q1, r(1, 1));
        assert_eq!(b.q0, r(1, 3));
        assert_eq!(b.eps1, r(1, 2));
        let (q0, q1) = enumerate_biases(4, 2, 1);
        assert_eq!((b.q0, b.q1), (q0, q1));
    }

    #[test]
    fn exact_matches_enumeration_on_small_grid() {
        for n in 2..=10 {
            for w in 1..=n {
                for t in 1..n {
                    let b = exact_biases(n, w, t).unwrap();
                    let (q0, q1) = enumerate_biases(n, w, t);
                    assert_eq!(b.q0, q0, "q0 at ({n},{w},{t})");
                    assert_eq!(b.q1, q1, "q1 at ({n},{w},{t})");
                }
            }
        }
    }

    #[test]
    fn weight_one_is_the_indicator() {
        for n in 2..12 {
            for t in 1..=n {
                let b = exact_biases(n, 1, t).unwrap();
                assert_eq!(b.q1, r(1, 1));
                assert_eq!(b.q0, r(0, 1));
            }
        }
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(matches!(exact_biases(5, 0, 1), Err(BiasError::InvalidParams(_))));
        assert!(matches!(exact_biases(5, 6, 1), Err(BiasError::InvalidParams(_))));
        assert!(krawtchouk(5, 4, 0).is_err());
        assert!(krawtchouk(2, 4, 5).is_err());
    }

    /// Three-term recurrence for the unnormalized polynomial
    /// `K_v(s) = Σ_j (−1)^j C(s,j) C(m−s,v−j)`:
    /// `(v+1) K_{v+1} = (m − 2s) K_v − (m − v + 1) K_{v−1}`.
    fn krawtchouk_by_recurrence(v: usize, m: usize, s: usize) -> BigRational {
        let (m_, s_) = (m as i64, s as i64);
        let mut prev = BigRational::one();
        let mut cur = BigRational::from_integer(BigInt::from(m_ - 2 * s_));
        if v == 0 {
            return prev;
        }
        for k in 1..v as i64 {
            let next = (&cur * BigInt::from(m_ - 2 * s_) - &prev * BigInt::from(m_ - k + 1))
                / BigRational::from_integer(BigInt::from(k + 1));
            prev = std::mem::replace(&mut cur, next);
        }
        let sign = if v % 2 == 1 { -1 } else { 1 };
        cur * r(sign, 1 << v)
    }

    #[test]
    fn krawtchouk_examples() {
        assert_eq!(krawtchouk(0, 7, 3).unwrap().value, r(1, 1));
        assert_eq!(krawtchouk(1, 4, 1).unwrap().value, r(-1, 1));
        assert_eq!(krawtchouk(2, 6, 3).unwrap().value, r(-3, 4));
        for m in 0..14 {
            for v in 0..=m {
                for s in 0..=m {
                    assert_eq!(
                        krawtchouk(v, m, s).unwrap().value,
                        krawtchouk_by_recurrence(v, m, s),
                        "p_{v}^{m}({s})"
                    );
                }
            }
        }
    }

    #[test]
    fn krawtchouk_route_matches_exact() {
        let b = biases_via_krawtchouk(4, 2, 1).unwrap();
        assert_eq!(b.eps1, r(1, 2));
        for (n, w, t) in [(4, 2, 1), (20, 6, 4), (33, 11, 7), (9, 1, 3)] {
            let a = exact_biases(n, w, t).unwrap();
            let k = biases_via_krawtchouk(n, w, t).unwrap();
            assert!(a.same_values(&k), "({n},{w},{t})");
        }
        assert!(biases_via_krawtchouk(5, 2, 0).is_err());
        assert!(biases_via_krawtchouk(5, 2, 5).is_err());
    }

    #[test]
    fn vandermonde_normalization() {
        for n in 2..=30i64 {
            for w in 1..=n {
                for t in 1..n {
                    let lhs: BigInt = (0..w)
                        .map(|j| binomial_int(t - 1, j) * binomial_int(n - t, w - 1 - j))
                        .sum();
                    assert_eq!(lhs, binomial_int(n - 1, w - 1));
                }
            }
        }
    }

    #[test]
    fn binomial_model_examples() {
        let (e0, e1) = binomial_biases(128, 64, 3);
        assert_eq!(e0, 0.0);
        assert_eq!(e1, 0.0);
        let (_, e1) = binomial_biases(128, 10, 1);
        assert_eq!(e1, 0.5);
        let (e0, e1) = binomial_biases(128, 32, 4);
        assert!((e1 - 0.0625).abs() < 1e-15);
        assert!((e0 + 0.03125).abs() < 1e-15);
        let ((s0, l0), (s1, l1)) = binomial_biases_log2(128, 32, 4);
        assert_eq!((s0, s1), (-1.0, 1.0));
        assert!((l0 - (-5.0)).abs() < 1e-12 && (l1 - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn jmin_examples() {
        assert_eq!(jmin_log2(128, 32, 1).unwrap(), 0.0);
        assert!((jmin_log2(128, 32, 4).unwrap() - 6.0).abs() < 1e-12);
        assert!(matches!(jmin_log2(128, 64, 4), Err(BiasError::DegenerateBase { .. })));
        for (n, w, t) in [(128, 32, 4), (200, 30, 9), (90, 40, 2)] {
            let (_, e1) = binomial_biases(n, w, t);
            let via_bias = 2.0 * (1.0 / (2.0 * e1)).log2();
            assert!((jmin_log2(n, w, t).unwrap() - via_bias).abs() < 1e-12);
        }
    }

    fn pair_with_delta(delta: BigRational) -> BiasPair {
        BiasPair::from_eps(10, 2, 1, r(0, 1), delta)
    }

    #[test]
    fn required_equations_examples() {
        let b = pair_with_delta(r(2, 3));
        assert_eq!(required_equations(&b, 0.01, 1).unwrap(), 24);
        let mut prev = 0;
        for positions in [1, 2, 4, 8, 128, 1024] {
            let m = required_equations(&b, 0.01, positions).unwrap();
            assert!(m >= prev);
            prev = m;
        }
        let zero = pair_with_delta(r(0, 1));
        assert_eq!(required_equations(&zero, 0.01, 1), Err(BiasError::ZeroBias));
    }

    #[test]
    fn mc_small_case() {
        let est = mc_estimate_biases(4, 2, 1, 100_000, 3).unwrap();
        assert_eq!(est.q1_hat, 1.0);
        let sd = (1.0f64 / 3.0 * 2.0 / 3.0 / 1e5).sqrt();
        assert!((est.q0_hat - 1.0 / 3.0).abs() <= 3.0 * sd);
        let one = mc_estimate_biases(10, 3, 2, 1, 3).unwrap();
        assert!(one.q0_hat == 0.0 || one.q0_hat == 1.0);
        assert!(one.q1_hat == 0.0 || one.q1_hat == 1.0);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = mc_estimate_biases(20, 5, 3, 70_000, 8).unwrap();
        let b = mc_estimate_biases(20, 5, 3, 70_000, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_agrees_at_n8() {
        let exact = exact_biases(8, 4, 2).unwrap();
        let est = mc_estimate_biases(8, 4, 2, 1_000_000, 21).unwrap();
        for (hat, q) in [(est.q0_hat, &exact.q0), (est.q1_hat, &exact.q1)] {
            let q = to_f64(q);
            let sd = (q * (1.0 - q) / 1e6).sqrt();
            assert!((hat - q).abs() <= 3.0 * sd, "{hat} vs {q}");
        }
    }
}
