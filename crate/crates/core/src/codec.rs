//! Random codes and decoding instances.

use thiserror::Error;

use crate::bitmat::{BitMatrix, BitVector, BitmatError};
use crate::rng;

/// Full-rank resampling attempts before giving up.
pub const MAX_RANK_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("no full-rank generator after {0} attempts")]
    RankSamplingExhausted(usize),
    #[error(transparent)]
    Bitmat(#[from] BitmatError),
}

/// A random binary `[n, k]` code given by a full-rank generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeInstance {
    n: usize,
    k: usize,
    generator: BitMatrix,
    seed: u64,
}

impl CodeInstance {
    /// Wraps an existing generator, checking shape and full row rank.
    pub fn from_generator(generator: BitMatrix, seed: u64) -> Result<Self, CodecError> {
        let (k, n) = (generator.num_rows(), generator.num_cols());
        if k == 0 || k >= n {
            return Err(CodecError::InvalidParams(format!(
                "need 1 <= k < n, got k = {k}, n = {n}"
            )));
        }
        if generator.rank() != k {
            return Err(CodecError::InvalidParams("generator is not full rank".into()));
        }
        Ok(Self {
            n,
            k,
            generator,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Dimension of the dual code, `n − rank(G)`.
    pub fn dual_dimension(&self) -> usize {
        self.n - self.generator.rank()
    }

    /// Encodes a message `x` of length `k` as `x·G`.
    pub fn encode(&self, x: &BitVector) -> Result<BitVector, CodecError> {
        Ok(self.generator.vec_mat(x)?)
    }
}

/// Dimension `k = round(rate·n)` used by [`random_code`].
pub fn dimension_for(n: usize, rate: f64) -> usize {
    (rate * n as f64).round() as usize
}

/// Samples a uniformly random full-rank generator of an `[n, round(rate·n)]`
/// code. The result is a pure function of `(n, rate, seed)`.
pub fn random_code(n: usize, rate: f64, seed: u64) -> Result<CodeInstance, CodecError> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(CodecError::InvalidParams(format!("rate {rate} not in (0, 1)")));
    }
    if n < 4 {
        return Err(CodecError::InvalidParams(format!("n = {n} is below 4")));
    }
    let k = dimension_for(n, rate);
    if k < 2 || k + 2 > n {
        return Err(CodecError::InvalidParams(format!(
            "k = round(rate·n) = {k} must lie in [2, n−2]"
        )));
    }
    for attempt in 0..MAX_RANK_ATTEMPTS {
        let mut r = rng::stream(seed, "code", attempt as u64);
        let g = BitMatrix::random(k, n, &mut r);
        if g.rank() == k {
            return Ok(CodeInstance {
                n,
                k,
                generator: g,
                seed,
            });
        }
    }
    Err(CodecError::RankSamplingExhausted(MAX_RANK_ATTEMPTS))
}

/// An instance of the decoding problem: find `x` with `d(xG, y) = t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingProblem {
    pub code: CodeInstance,
    pub t: usize,
    pub y: BitVector,
    /// Seed the instance was sampled from, when it was sampled.
    pub seed: Option<u64>,
    pub hidden_e: Option<BitVector>,
    pub hidden_x: Option<BitVector>,
}

impl DecodingProblem {
    /// Builds an instance without ground truth.
    pub fn honest(code: CodeInstance, t: usize, y: BitVector) -> Result<Self, CodecError> {
        if y.len() != code.n() {
            return Err(CodecError::InvalidParams(format!(
                "word length {} differs from n = {}",
                y.len(),
                code.n()
            )));
        }
        if t > code.n() {
            return Err(CodecError::InvalidParams(format!("t = {t} exceeds n")));
        }
        Ok(Self {
            code,
            t,
            y,
            seed: None,
            hidden_e: None,
            hidden_x: None,
        })
    }

    /// Checks `y = xG ⊕ e` and `weight(e) = t` when ground truth is present.
    pub fn check_ground_truth(&self) -> Result<(), CodecError> {
        match (&self.hidden_x, &self.hidden_e) {
            (Some(x), Some(e)) => {
                if e.weight() != self.t {
                    return Err(CodecError::InvalidParams(format!(
                        "hidden error has weight {}, expected {}",
                        e.weight(),
                        self.t
                    )));
                }
                if self.code.encode(x)?.xor(e) != self.y {
                    return Err(CodecError::InvalidParams("y differs from xG + e".into()));
                }
                Ok(())
            }
            (None, None) => Ok(()),
            _ => Err(CodecError::InvalidParams(
                "ground truth must carry both x and e".into(),
            )),
        }
    }
}

/// Samples `x` uniformly in `F2^k` and `e` uniformly of weight `t`, and sets
/// `y = xG ⊕ e`.
pub fn sample_problem(code: &CodeInstance, t: usize, seed: u64) -> Result<DecodingProblem, CodecError> {
    if t > code.n() {
        return Err(CodecError::InvalidParams(format!(
            "t = {t} exceeds n = {}",
            code.n()
        )));
    }
    let mut r = rng::stream(seed, "problem", 0);
    let x = BitVector::random(code.k(), &mut r);
    let e = BitVector::random_of_weight(code.n(), t, &mut r);
    let y = code.encode(&x)?.xor(&e);
    Ok(DecodingProblem {
        code: code.clone(),
        t,
        y,
        seed: Some(seed),
        hidden_e: Some(e),
        hidden_x: Some(x),
    })
}

/// True iff `G·hᵀ = 0`.
pub fn is_dual_word(code: &CodeInstance, h: &BitVector) -> bool {
    h.len() == code.n()
        && code
            .generator()
            .mat_vec(h)
            .map(|s| s.is_zero())
            .unwrap_or(false)
}

/// Returns `x` with `xG = y ⊕ e_hat`, or `None` when `y ⊕ e_hat` is not a
/// codeword.
pub fn recover_message(problem: &DecodingProblem, e_hat: &BitVector) -> Option<BitVector> {
    if e_hat.len() != problem.code.n() {
        return None;
    }
    let target = problem.y.xor(e_hat);
    problem.code.generator().solve_left(&target).ok().flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmat::Permutation;
    use rand::Rng;

    #[test]
    fn random_code_is_deterministic() {
        let a = random_code(16, 0.5, 1).unwrap();
        let b = random_code(16, 0.5, 1).unwrap();
        assert_eq!(a, b);
        let c = random_code(16, 0.5, 2).unwrap();
        assert_ne!(a.generator(), c.generator());
    }

    #[test]
    fn random_codes_have_full_rank() {
        for seed in 0..100 {
            let c = random_code(24, 0.5, seed).unwrap();
            assert_eq!(c.generator().rank(), c.k());
        }
    }

    #[test]
    fn dual_dimension_is_n_minus_k() {
        for seed in 0..100 {
            let c = random_code(64, 0.5, seed).unwrap();
            assert_eq!(c.k(), 32);
            assert_eq!(c.dual_dimension(), 32);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(random_code(3, 0.5, 0), Err(CodecError::InvalidParams(_))));
        assert!(matches!(random_code(16, 1.5, 0), Err(CodecError::InvalidParams(_))));
        assert!(matches!(random_code(16, 0.05, 0), Err(CodecError::InvalidParams(_))));
        assert!(matches!(random_code(16, 0.95, 0), Err(CodecError::InvalidParams(_))));
    }

    #[test]
    fn sample_problem_edge_weights() {
        let code = random_code(16, 0.5, 4).unwrap();
        let p0 = sample_problem(&code, 0, 1).unwrap();
        assert!(p0.hidden_e.as_ref().unwrap().is_zero());
        assert!(is_dual_word(&code, &BitVector::zeros(16)));
        let pn = sample_problem(&code, 16, 1).unwrap();
        assert_eq!(pn.hidden_e.as_ref().unwrap(), &BitVector::ones(16));
        assert!(sample_problem(&code, 17, 1).is_err());
    }

    #[test]
    fn sampled_error_weight_is_exact() {
        let code = random_code(32, 0.5, 9).unwrap();
        for seed in 0..1000 {
            let t = (seed % 33) as usize;
            let p = sample_problem(&code, t, seed).unwrap();
            assert_eq!(p.hidden_e.as_ref().unwrap().weight(), t);
            p.check_ground_truth().unwrap();
        }
    }

    #[test]
    fn systematic_dual_rows_are_dual_words() {
        let code = random_code(20, 0.5, 5).unwrap();
        let mut r = rng::stream(0, "t", 0);
        let (p, sys) = loop {
            let p = Permutation::random(20, &mut r);
            if let Ok(s) = code.generator().systematize(&p) {
                break (p, s);
            }
        };
        let a = sys.redundancy();
        let k = code.k();
        for c in 0..code.n() - k {
            let mut h = a.column(c).concat(&BitVector::zeros(code.n() - k));
            h.set(k + c, true);
            assert!(is_dual_word(&code, &p.unapply(&h)));
        }
    }

    #[test]
    fn random_word_is_dual_with_probability_two_to_minus_k() {
        let code = random_code(16, 0.5, 77).unwrap();
        let mut r = rng::stream(3, "dual-rate", 0);
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|_| {
                let h = BitVector::random(16, &mut r);
                !h.is_zero() && is_dual_word(&code, &h)
            })
            .count();
        let expected = trials as f64 / 256.0;
        assert!(
            (hits as f64 - expected).abs() <= 0.5 * expected,
            "hits = {hits}, expected ≈ {expected}"
        );
    }

    #[test]
    fn recover_message_cases() {
        let code = random_code(40, 0.5, 12).unwrap();
        let mut wrong = 0;
        for seed in 0..50 {
            let p = sample_problem(&code, 4, seed).unwrap();
            let e = p.hidden_e.clone().unwrap();
            assert_eq!(recover_message(&p, &e), p.hidden_x);
            let mut flipped = e.clone();
            flipped.flip(rng::stream(seed, "flip", 0).gen_range(0..40));
            if recover_message(&p, &flipped).is_some() {
                wrong += 1;
            }
        }
        // probability 2^(k−n) = 2^-20 per trial
        assert_eq!(wrong, 0);
        let p0 = sample_problem(&code, 0, 5).unwrap();
        assert_eq!(recover_message(&p0, &BitVector::zeros(40)), p0.hidden_x);
    }
}
