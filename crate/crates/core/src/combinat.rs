//! Exact binomial coefficients and base-2 logarithms of big numbers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `C(n, k)` with the convention `C(n, k) = 0` outside `0 ≤ k ≤ n`
/// (including negative `n`).
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binomial_int(n: i64, k: i64) -> BigInt {
    BigInt::from(binomial(n, k))
}

/// `[C(n, 0), …, C(n, kmax)]` by the multiplicative recurrence; all zero
/// for negative `n`.
pub fn binomial_row(n: i64, kmax: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(kmax + 1);
    let mut cur = if n < 0 { BigInt::zero() } else { BigInt::one() };
    for j in 0..=kmax as i64 {
        row.push(cur.clone());
        if !cur.is_zero() {
            cur = cur * (n - j) / (j + 1);
        }
    }
    row
}

/// `log2(x)` for a positive big integer, accurate to f64 precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    (top.iter_u64_digits().next().unwrap() as f64).log2() + shift as f64
}

/// `log2|q|`; `-inf` for zero.
pub fn log2_abs_rational(q: &BigRational) -> f64 {
    log2_biguint(q.numer().abs().magnitude()) - log2_biguint(q.denom().magnitude())
}

/// `log2 C(n, k)`; `-inf` when the coefficient vanishes.
pub fn log2_binomial(n: i64, k: i64) -> f64 {
    log2_biguint(&binomial(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_match_single_coefficients() {
        for n in -2..30i64 {
            let row = binomial_row(n, 35);
            for (k, c) in row.iter().enumerate() {
                assert_eq!(*c, binomial_int(n, k as i64), "C({n}, {k})");
            }
        }
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(-1, 0), BigUint::zero());
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(40, 20), BigUint::from(137_846_528_820u64));
    }

    #[test]
    fn log2_of_large_values() {
        let x = BigUint::one() << 300u32;
        assert!((log2_biguint(&x) - 300.0).abs() < 1e-12);
        let c = log2_binomial(1000, 500);
        // Stirling: log2 C(1000,500) ≈ 1000 − ½ log2(500π)
        let approx = 1000.0 - 0.5 * (500.0 * std::f64::consts::PI).log2();
        assert!((c - approx).abs() < 1e-3);
    }
}
