//! Dense GF(2) linear algebra.
//!
//! Vectors and matrices are bit-packed into 64-bit words, row-major. The
//! public contract is expressed per bit: bit `j` of a vector is the `j`-th
//! coordinate, and a matrix is a stack of row vectors of equal length.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use thiserror::Error;

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Errors raised by the linear-algebra routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitmatError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// The leading block of the permuted matrix is not invertible; retry with
    /// a fresh permutation.
    #[error("left block is singular (no pivot for column {column})")]
    SingularLeftBlock { column: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid hex encoding: {0}")]
    InvalidHex(String),
}

/// A binary vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD_BITS] |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Builds a vector of length `len` with ones exactly at `support`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            len,
            words: (0..words_for(len)).map(|_| rng.gen()).collect(),
        };
        v.clear_tail();
        v
    }

    /// Uniformly random vector of Hamming weight exactly `weight`.
    pub fn random_of_weight<R: Rng + ?Sized>(len: usize, weight: usize, rng: &mut R) -> Self {
        assert!(weight <= len, "weight {weight} exceeds length {len}");
        let support = rand::seq::index::sample(rng, len, weight);
        let mut v = Self::zeros(len);
        for i in support.iter() {
            v.set(i, true);
        }
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot product of vectors of different length");
        let parity = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
        parity & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors of different length");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Positions of the set bits, increasing.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Copies `len` bits starting at `start` into a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        let mut out = BitVector::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Hex encoding: bits are read left to right in groups of four, bit `4j`
    /// being the most significant bit of nibble `j`. The last nibble is
    /// zero-padded on the right.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for j in 0..nibbles {
            let mut nib = 0u8;
            for b in 0..4 {
                let i = 4 * j + b;
                if i < self.len && self.get(i) {
                    nib |= 8 >> b;
                }
            }
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    /// Inverse of [`BitVector::to_hex`]. Padding bits must be zero.
    pub fn from_hex(s: &str, len: usize) -> Result<Self, BitmatError> {
        let s = s.trim();
        if s.len() != len.div_ceil(4) {
            return Err(BitmatError::InvalidHex(format!(
                "expected {} hex digits for {len} bits, got {}",
                len.div_ceil(4),
                s.len()
            )));
        }
        let mut v = BitVector::zeros(len);
        for (j, c) in s.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| BitmatError::InvalidHex(format!("bad digit {c:?}")))?;
            for b in 0..4 {
                if nib & (8 >> b) != 0 {
                    let i = 4 * j + b;
                    if i >= len {
                        return Err(BitmatError::InvalidHex("nonzero padding bit".into()));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

impl Ord for BitVector {
    /// Lexicographic order on the bit string (bit 0 first), then by length.
    /// For vectors of equal length this coincides with the order of their hex
    /// encodings.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                return a.reverse_bits().cmp(&b.reverse_bits());
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

/// Hamming weight of `v`.
pub fn weight(v: &BitVector) -> usize {
    v.weight()
}

/// A dense binary matrix stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, BitmatError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(BitmatError::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Convenience constructor from 0/1 literals; panics on ragged input.
    pub fn from_bit_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                BitVector::from_bits(r.iter().map(|&b| b != 0))
            })
            .collect();
        Self { cols, rows }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            cols,
            rows: (0..rows).map(|_| BitVector::random(cols, rng)).collect(),
        }
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bits(self.rows.iter().map(|r| r.get(c)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Submatrix made of columns `start..start + len`.
    pub fn column_block(&self, start: usize, len: usize) -> BitMatrix {
        BitMatrix {
            cols: len,
            rows: self.rows.iter().map(|r| r.slice(start, len)).collect(),
        }
    }

    /// `G · vᵀ`: one output bit per row.
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector, BitmatError> {
        if v.len() != self.cols {
            return Err(BitmatError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(BitVector::from_bits(self.rows.iter().map(|r| r.dot(v))))
    }

    /// `x · G`: the XOR of the rows selected by `x`.
    pub fn vec_mat(&self, x: &BitVector) -> Result<BitVector, BitmatError> {
        if x.len() != self.rows.len() {
            return Err(BitmatError::DimensionMismatch {
                expected: self.rows.len(),
                got: x.len(),
            });
        }
        let mut out = BitVector::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    /// `G · P`: column `j` of the result is column `p[j]` of `self`.
    pub fn permute_columns(&self, p: &Permutation) -> Result<BitMatrix, BitmatError> {
        if p.len() != self.cols {
            return Err(BitmatError::DimensionMismatch {
                expected: self.cols,
                got: p.len(),
            });
        }
        Ok(BitMatrix {
            cols: self.cols,
            rows: self.rows.iter().map(|r| p.apply(r)).collect(),
        })
    }

    /// Reduced row echelon form with the accumulated row transform.
    pub fn echelon(&self) -> Echelon {
        let k = self.rows.len();
        let mut rows = self.rows.clone();
        let mut transform = BitMatrix::identity(k).rows;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == k {
                break;
            }
            let Some(p) = (r..k).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            transform.swap(r, p);
            for i in 0..k {
                if i != r && rows[i].get(c) {
                    let (src, dst) = pick(&mut rows, r, i);
                    dst.xor_assign(src);
                    let (src, dst) = pick(&mut transform, r, i);
                    dst.xor_assign(src);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: BitMatrix {
                cols: self.cols,
                rows,
            },
            transform: BitMatrix { cols: k, rows: transform },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Finds `x` with `x · G = target`, if one exists.
    pub fn solve_left(&self, target: &BitVector) -> Result<Option<BitVector>, BitmatError> {
        if target.len() != self.cols {
            return Err(BitmatError::DimensionMismatch {
                expected: self.cols,
                got: target.len(),
            });
        }
        let ech = self.echelon();
        // target = x' · reduced, with x'_r read off the pivot columns
        let mut coeffs = BitVector::zeros(self.rows.len());
        for (r, &c) in ech.pivots.iter().enumerate() {
            coeffs.set(r, target.get(c));
        }
        if ech.reduced.vec_mat(&coeffs)? != *target {
            return Ok(None);
        }
        // reduced = U · G, hence x = x' · U
        Ok(Some(ech.transform.vec_mat(&coeffs)?))
    }

    /// Row-reduces `G·P` to the layout `[I_k | G′]`.
    ///
    /// Pivoting is leftmost-pivot with row swaps only; the column order is
    /// entirely the caller's permutation. Fails once with
    /// [`BitmatError::SingularLeftBlock`] when the first `k` columns of `G·P`
    /// are not invertible.
    pub fn systematize(&self, p: &Permutation) -> Result<Systematic, BitmatError> {
        let k = self.rows.len();
        if k > self.cols {
            return Err(BitmatError::InvalidArgument(format!(
                "{k} rows exceed {} columns",
                self.cols
            )));
        }
        let mut m = self.permute_columns(p)?;
        let transform_applied = m.eliminate_leading(k)?;
        Ok(Systematic {
            matrix: m,
            transform_applied,
        })
    }

    /// Row-reduces `G·P` to `[[I_{k−l}, G1], [0, G2]]`.
    pub fn partial_systematize(
        &self,
        p: &Permutation,
        l: usize,
    ) -> Result<PartialSystematic, BitmatError> {
        let k = self.rows.len();
        if l >= k {
            return Err(BitmatError::InvalidArgument(format!(
                "l = {l} must be smaller than k = {k}"
            )));
        }
        if k > self.cols {
            return Err(BitmatError::InvalidArgument(format!(
                "{k} rows exceed {} columns",
                self.cols
            )));
        }
        let mut m = self.permute_columns(p)?;
        let top_rows = k - l;
        m.eliminate_leading(top_rows)?;
        let n = self.cols;
        let bottom = m.rows.split_off(top_rows);
        let bottom_right = BitMatrix {
            cols: n - top_rows,
            rows: bottom.iter().map(|r| r.slice(top_rows, n - top_rows)).collect(),
        };
        Ok(PartialSystematic {
            top: m,
            bottom_right,
        })
    }

    /// Eliminates so that the first `pivots` columns become `[I; 0]`.
    /// Returns whether any row operation was needed.
    fn eliminate_leading(&mut self, pivots: usize) -> Result<bool, BitmatError> {
        let k = self.rows.len();
        let mut touched = false;
        for c in 0..pivots {
            let p = (c..k)
                .find(|&i| self.rows[i].get(c))
                .ok_or(BitmatError::SingularLeftBlock { column: c })?;
            if p != c {
                self.rows.swap(c, p);
                touched = true;
            }
            for i in 0..k {
                if i != c && self.rows[i].get(c) {
                    let (src, dst) = pick(&mut self.rows, c, i);
                    dst.xor_assign(src);
                    touched = true;
                }
            }
        }
        Ok(touched)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

/// Borrow row `src` immutably and row `dst` mutably.
fn pick(rows: &mut [BitVector], src: usize, dst: usize) -> (&BitVector, &mut BitVector) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = rows.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = rows.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

/// Output of [`BitMatrix::echelon`]: `reduced = transform · G`.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub transform: BitMatrix,
    pub pivots: Vec<usize>,
}

/// `[I_k | G′]`, row-equivalent to `G·P`.
#[derive(Debug, Clone)]
pub struct Systematic {
    pub matrix: BitMatrix,
    /// False when `G·P` was already in the target layout.
    pub transform_applied: bool,
}

impl Systematic {
    /// The `k × (n−k)` block `G′`.
    pub fn redundancy(&self) -> BitMatrix {
        let k = self.matrix.num_rows();
        self.matrix.column_block(k, self.matrix.num_cols() - k)
    }
}

/// `[[I_{k−l}, G1], [0, G2]]`, row-equivalent to `G·P`.
#[derive(Debug, Clone)]
pub struct PartialSystematic {
    /// The `(k−l) × n` upper block `[I_{k−l} | G1]`.
    pub top: BitMatrix,
    /// `G2`, of shape `l × (n−k+l)`.
    pub bottom_right: BitMatrix,
}

impl PartialSystematic {
    /// `G1`, of shape `(k−l) × (n−k+l)`.
    pub fn g1(&self) -> BitMatrix {
        let kl = self.top.num_rows();
        self.top.column_block(kl, self.top.num_cols() - kl)
    }
}

/// A permutation of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, BitmatError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(BitmatError::InvalidPermutation(format!(
                    "{i} is out of range or repeated"
                )));
            }
        }
        Ok(Self { images })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(images.as_mut_slice(), rng);
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { images: inv }
    }

    /// `apply(v)[j] = v[p[j]]`, the action of right multiplication by `P`.
    pub fn apply(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.images.len(), "permutation size mismatch");
        let mut out = BitVector::zeros(v.len());
        for (j, &i) in self.images.iter().enumerate() {
            if v.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    /// Maps a vector in permuted coordinates back: `out[p[j]] = v[j]`.
    pub fn unapply(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.images.len(), "permutation size mismatch");
        let mut out = BitVector::zeros(v.len());
        for j in v.iter_ones() {
            out.set(self.images[j], true);
        }
        out
    }
}
