//! Harvesting moderate-weight dual codewords.
//!
//! Two harvesters fill a [`ParityPool`]:
//!
//! * [`harvest_gauss`] draws a random column permutation, puts the generator
//!   in systematic form `[I_k | G′]` and reads the `n − k` rows of the
//!   parity-check matrix `[G′ᵀ | I_{n−k}]` off it.
//! * [`harvest_dumer`] reserves `l` rows in a partial systematic form and
//!   runs a birthday collision search on the `l`-bit syndrome of `G2`. Each
//!   collision `e = (e1, e2)` gives the dual word `(G1·eᵀ, e)`.
//!
//! Iterations are independent: iteration `j` draws from the stream
//! `(seed, tag, j)`. Batches of iterations run in parallel and are merged in
//! index order with the stopping rule applied after every iteration, so a
//! pool depends only on `(code, config, seed)` and not on the thread count.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bitmat::{BitVector, BitmatError, Permutation};
use crate::codec::{is_dual_word, CodeInstance};
use crate::combinat::binomial;
use crate::rng;

/// Default cap on permutations per harvest call.
pub const DEFAULT_ITERATION_CAP: u64 = 10_000;
/// Permutation redraws per iteration before giving up on a code.
pub const MAX_SINGULAR_RETRIES: u32 = 256;

#[derive(Debug, Error)]
pub enum HarvestError {
    #[error("invalid harvest parameters: {0}")]
    InvalidParams(String),
    #[error("vector of length {got} does not fit a pool of length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vector is not a dual codeword")]
    NotDual,
    #[error("weight {weight} lies outside the window {window}")]
    OutsideWindow { weight: usize, window: WeightWindow },
    #[error("pools differ in {0}")]
    Incompatible(String),
    #[error("no invertible block after {0} permutations")]
    RetriesExhausted(u32),
    /// The cap was hit before the target; the partial pool is kept.
    #[error("iteration cap {cap} reached with {} equations (target not met)", .pool.len())]
    IterationCapExceeded {
        cap: u64,
        pool: Box<ParityPool>,
        stats: Box<HarvestStats>,
    },
    #[error(transparent)]
    Bitmat(#[from] BitmatError),
}

/// Inclusive weight range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WeightWindow {
    pub lo: usize,
    pub hi: usize,
}

impl WeightWindow {
    pub fn new(lo: usize, hi: usize) -> Result<Self, HarvestError> {
        if lo == 0 || lo > hi {
            return Err(HarvestError::InvalidParams(format!(
                "window [{lo}, {hi}] must satisfy 1 <= lo <= hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn exact(w: usize) -> Result<Self, HarvestError> {
        Self::new(w, w)
    }

    /// `[center − radius, center + radius]`, clipped below at 1.
    pub fn around(center: usize, radius: usize) -> Result<Self, HarvestError> {
        Self::new(center.saturating_sub(radius).max(1), center + radius)
    }

    pub fn contains(&self, w: usize) -> bool {
        self.lo <= w && w <= self.hi
    }

    pub fn hull(&self, other: &WeightWindow) -> WeightWindow {
        WeightWindow {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

impl fmt::Display for WeightWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for WeightWindow {
    type Err = HarvestError;

    /// Accepts `w` or `lo..hi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarvestError::InvalidParams(format!("cannot parse window {s:?}"));
        match s.split_once("..") {
            Some((a, b)) => Self::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => Self::exact(s.trim().parse().map_err(|_| bad())?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gauss,
    Dumer,
    Merged,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Gauss => "gauss",
            Algorithm::Dumer => "dumer",
            Algorithm::Merged => "merged",
        })
    }
}

impl FromStr for Algorithm {
    type Err = HarvestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gauss" => Ok(Algorithm::Gauss),
            "dumer" => Ok(Algorithm::Dumer),
            "merged" => Ok(Algorithm::Merged),
            _ => Err(HarvestError::InvalidParams(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Where a pool came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub iterations: u64,
    /// False for a pool cut short by the iteration cap.
    pub complete: bool,
}

impl Provenance {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        Self {
            algorithm,
            seed,
            iterations: 0,
            complete: true,
        }
    }
}

/// A deduplicated set of dual codewords with weights in a window, indexed
/// by the positions they cover.
///
/// Equations keep insertion order, which is deterministic for a given seed;
/// [`ParityPool::canonicalize`] sorts them.
#[derive(Debug, Clone)]
pub struct ParityPool {
    n: usize,
    k: usize,
    code_seed: u64,
    window: WeightWindow,
    equations: Vec<BitVector>,
    seen: HashSet<BitVector>,
    position_index: Vec<Vec<u32>>,
    pub provenance: Provenance,
}

impl PartialEq for ParityPool {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.code_seed == other.code_seed
            && self.window == other.window
            && self.equations == other.equations
            && self.provenance == other.provenance
    }
}

impl ParityPool {
    pub fn new(code: &CodeInstance, window: WeightWindow, provenance: Provenance) -> Self {
        Self::empty(code.n(), code.k(), code.seed(), window, provenance)
    }

    /// An empty pool described only by its header fields.
    pub fn empty(n: usize, k: usize, code_seed: u64, window: WeightWindow, provenance: Provenance) -> Self {
        Self {
            n,
            k,
            code_seed,
            window,
            equations: Vec::new(),
            seen: HashSet::new(),
            position_index: vec![Vec::new(); n],
            provenance,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn code_seed(&self) -> u64 {
        self.code_seed
    }

    pub fn window(&self) -> WeightWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn equations(&self) -> &[BitVector] {
        &self.equations
    }

    pub fn contains(&self, h: &BitVector) -> bool {
        self.seen.contains(h)
    }

    /// Number of equations through position `i`.
    pub fn position_count(&self, i: usize) -> usize {
        self.position_index[i].len()
    }

    /// Equations through position `i`, in pool order.
    pub fn position_equations(&self, i: usize) -> impl Iterator<Item = &BitVector> + '_ {
        self.position_index[i].iter().map(|&j| &self.equations[j as usize])
    }

    /// Checks duality and weight, then inserts. Returns `false` for a
    /// duplicate.
    pub fn insert(&mut self, code: &CodeInstance, h: BitVector) -> Result<bool, HarvestError> {
        if h.len() != self.n {
            return Err(HarvestError::LengthMismatch {
                expected: self.n,
                got: h.len(),
            });
        }
        if !is_dual_word(code, &h) {
            return Err(HarvestError::NotDual);
        }
        self.insert_unchecked_dual(h)
    }

    /// Insertion for vectors already known to be dual words; the window and
    /// length are still enforced.
    fn insert_unchecked_dual(&mut self, h: BitVector) -> Result<bool, HarvestError> {
        let w = h.weight();
        if !self.window.contains(w) {
            return Err(HarvestError::OutsideWindow {
                weight: w,
                window: self.window,
            });
        }
        if self.seen.contains(&h) {
            return Ok(false);
        }
        let idx = self.equations.len() as u32;
        for i in h.iter_ones() {
            self.position_index[i].push(idx);
        }
        self.seen.insert(h.clone());
        self.equations.push(h);
        Ok(true)
    }

    /// Inserts a vector read from storage. Duality is checked only when a
    /// code is supplied.
    pub fn insert_loaded(&mut self, code: Option<&CodeInstance>, h: BitVector) -> Result<bool, HarvestError> {
        match code {
            Some(c) => self.insert(c, h),
            None if h.len() != self.n => Err(HarvestError::LengthMismatch {
                expected: self.n,
                got: h.len(),
            }),
            None => self.insert_unchecked_dual(h),
        }
    }

    /// Sorts equations lexicographically and rebuilds the index.
    pub fn canonicalize(&mut self) {
        self.equations.sort();
        for list in &mut self.position_index {
            list.clear();
        }
        for (idx, h) in self.equations.iter().enumerate() {
            for i in h.iter_ones() {
                self.position_index[i].push(idx as u32);
            }
        }
    }

    /// Set union. The result is canonicalized, so merging is commutative
    /// and associative on equations; the window becomes the hull of both.
    pub fn merge(&self, other: &ParityPool) -> Result<ParityPool, HarvestError> {
        if self.n != other.n || self.k != other.k {
            return Err(HarvestError::Incompatible("code dimensions".into()));
        }
        if self.code_seed != other.code_seed {
            return Err(HarvestError::Incompatible("code seed".into()));
        }
        let algorithm = if self.provenance.algorithm == other.provenance.algorithm {
            self.provenance.algorithm
        } else {
            Algorithm::Merged
        };
        let provenance = Provenance {
            algorithm,
            seed: self.provenance.seed.min(other.provenance.seed),
            iterations: self.provenance.iterations + other.provenance.iterations,
            complete: self.provenance.complete && other.provenance.complete,
        };
        let window = self.window.hull(&other.window);
        let mut out = ParityPool::empty(self.n, self.k, self.code_seed, window, provenance);
        for h in self.equations.iter().chain(&other.equations) {
            out.insert_unchecked_dual(h.clone())?;
        }
        out.canonicalize();
        Ok(out)
    }

    /// Equations through position `i` whose weight lies in `window`.
    pub fn slice(&self, i: usize, window: WeightWindow) -> Vec<&BitVector> {
        self.position_equations(i)
            .filter(|h| window.contains(h.weight()))
            .collect()
    }

    /// Equations grouped by exact weight, in pool order within each group.
    pub fn by_weight(&self) -> BTreeMap<usize, Vec<&BitVector>> {
        let mut out: BTreeMap<usize, Vec<&BitVector>> = BTreeMap::new();
        for h in &self.equations {
            out.entry(h.weight()).or_default().push(h);
        }
        out
    }

    /// Lowest per-position count among equations in `window`.
    pub fn min_position_count(&self, window: WeightWindow) -> usize {
        (0..self.n).map(|i| self.slice(i, window).len()).min().unwrap_or(0)
    }

    /// Re-checks every equation against `code`.
    pub fn verify(&self, code: &CodeInstance) -> Result<(), HarvestError> {
        if code.n() != self.n || code.k() != self.k {
            return Err(HarvestError::Incompatible("code dimensions".into()));
        }
        for h in &self.equations {
            if !is_dual_word(code, h) {
                return Err(HarvestError::NotDual);
            }
            let w = h.weight();
            if !self.window.contains(w) {
                return Err(HarvestError::OutsideWindow {
                    weight: w,
                    window: self.window,
                });
            }
        }
        Ok(())
    }

    /// Hex lines of the equations in sorted order.
    pub fn sorted_hex(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.equations.iter().map(BitVector::to_hex).collect();
        lines.sort();
        lines
    }

    /// SHA-256 of the sorted hex lines, each terminated by `\n`.
    pub fn checksum(&self) -> String {
        checksum_of_sorted(&self.sorted_hex())
    }
}

/// SHA-256 over sorted hex lines, each followed by a newline.
pub fn checksum_of_sorted(lines: &[String]) -> String {
    let mut hasher = Sha256::new();
    for line in lines {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

/// `pool_slice` as a free function.
pub fn pool_slice(pool: &ParityPool, i: usize, window: WeightWindow) -> Vec<&BitVector> {
    pool.slice(i, window)
}

/// When a harvest stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// At least this many equations in the pool.
    Total(usize),
    /// At least `count` equations in `window` through every position.
    PerPosition { count: usize, window: WeightWindow },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarvestOptions {
    pub iteration_cap: u64,
    /// Iterations computed in parallel before each merge step; affects
    /// speed only.
    pub batch: usize,
}

impl Default for HarvestOptions {
    fn default() -> Self {
        Self {
            iteration_cap: DEFAULT_ITERATION_CAP,
            batch: 64,
        }
    }
}

/// Diagnostics collected while harvesting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HarvestStats {
    pub iterations: u64,
    pub singular_retries: u64,
    /// Candidate vectors produced, before window filtering.
    pub candidates: u64,
    /// Candidates inside the window.
    pub in_window: u64,
    /// In-window candidates already present.
    pub duplicates: u64,
    /// Raw weight histogram of all candidates.
    pub weight_histogram: BTreeMap<usize, u64>,
    /// Sum of both list sizes over Dumer iterations.
    pub list_sizes: u64,
    /// Collisions found over Dumer iterations.
    pub collisions: u64,
}

impl HarvestStats {
    fn record(&mut self, out: &IterationOutput) {
        self.iterations += 1;
        self.singular_retries += out.singular_retries as u64;
        self.list_sizes += out.list_sizes;
        self.collisions += out.collisions;
        self.candidates += out.candidates;
        for (&w, &c) in &out.histogram {
            *self.weight_histogram.entry(w).or_default() += c;
        }
    }

    /// Fraction of candidates that landed in the window.
    pub fn acceptance_fraction(&self) -> f64 {
        if self.candidates == 0 {
            0.0
        } else {
            self.in_window as f64 / self.candidates as f64
        }
    }
}

/// Everything one iteration produced.
#[derive(Debug, Clone, Default)]
pub struct IterationOutput {
    /// In-window vectors with their weights, in deterministic order.
    pub equations: Vec<(BitVector, usize)>,
    pub candidates: u64,
    pub histogram: BTreeMap<usize, u64>,
    pub singular_retries: u32,
    pub list_sizes: u64,
    pub collisions: u64,
}

/// Draws permutations from `r` until `reduce` succeeds.
fn with_fresh_permutation<T>(
    n: usize,
    r: &mut rng::StreamRng,
    mut reduce: impl FnMut(&Permutation) -> Result<T, BitmatError>,
) -> Result<(Permutation, T, u32), HarvestError> {
    for retries in 0..MAX_SINGULAR_RETRIES {
        let p = Permutation::random(n, r);
        match reduce(&p) {
            Ok(v) => return Ok((p, v, retries)),
            Err(BitmatError::SingularLeftBlock { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(HarvestError::RetriesExhausted(MAX_SINGULAR_RETRIES))
}

/// One systematic-form draw: the `n − k` dual rows with weight in `window`.
pub fn gauss_iteration(
    code: &CodeInstance,
    window: WeightWindow,
    seed: u64,
    counter: u64,
) -> Result<IterationOutput, HarvestError> {
    let (n, k) = (code.n(), code.k());
    let mut r = rng::stream(seed, "gauss", counter);
    let (p, sys, retries) = with_fresh_permutation(n, &mut r, |p| code.generator().systematize(p))?;
    // rows of G′ᵀ: column c of G′ is the first k coordinates of dual row c
    let a_t = sys.redundancy().transpose();
    let mut out = IterationOutput {
        singular_retries: retries,
        ..Default::default()
    };
    for c in 0..n - k {
        let col = a_t.row(c);
        let w = col.weight() + 1;
        out.candidates += 1;
        *out.histogram.entry(w).or_default() += 1;
        if window.contains(w) {
            let mut h = col.concat(&BitVector::zeros(n - k));
            h.set(k + c, true);
            out.equations.push((p.unapply(&h), w));
        }
    }
    Ok(out)
}

/// Parameters of the collision search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DumerConfig {
    /// Syndrome length: rows kept out of the identity block.
    pub l: usize,
    /// Total weight of `e`, split evenly between the halves.
    pub r: usize,
}

impl DumerConfig {
    /// Lengths `(m1, m2)` of the two halves of the `n − k + l` columns.
    pub fn halves(&self, n: usize, k: usize) -> (usize, usize) {
        let m = n - k + self.l;
        (m / 2, m - m / 2)
    }

    pub fn validate(&self, n: usize, k: usize) -> Result<(), HarvestError> {
        let bad = |msg: String| Err(HarvestError::InvalidParams(msg));
        if self.r < 2 || self.r % 2 == 1 {
            return bad(format!("r = {} must be an even integer >= 2", self.r));
        }
        if self.l >= k {
            return bad(format!("l = {} must be below k = {k}", self.l));
        }
        if self.l > 64 {
            return bad(format!("l = {} exceeds the 64-bit syndrome limit", self.l));
        }
        let (m1, _) = self.halves(n, k);
        if self.r / 2 > m1 {
            return bad(format!("r/2 = {} exceeds the half length {m1}", self.r / 2));
        }
        Ok(())
    }

    /// Expected collisions per iteration, `C(m1, r/2)·C(m2, r/2) / 2^l`.
    pub fn expected_collisions(&self, n: usize, k: usize) -> f64 {
        let (m1, m2) = self.halves(n, k);
        let h = (self.r / 2) as i64;
        let lists = crate::combinat::log2_biguint(&(binomial(m1 as i64, h) * binomial(m2 as i64, h)));
        (lists - self.l as f64).exp2()
    }

    /// Window centred on the typical output weight `r + (k − l)/2` with
    /// radius `⌈√(k − l)/2⌉`, one standard deviation of `weight(G1·eᵀ)`.
    pub fn default_window(&self, k: usize) -> Result<WeightWindow, HarvestError> {
        let free = k - self.l;
        let radius = ((free as f64).sqrt() / 2.0).ceil() as usize;
        WeightWindow::around(self.r + free / 2, radius)
    }
}

/// All `size`-subsets of `0..m` in lexicographic order, with the XOR of the
/// given per-column syndromes.
fn subset_syndromes(cols: &[u64], size: usize) -> Vec<(Vec<u32>, u64)> {
    let m = cols.len();
    let mut out = Vec::new();
    if size > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let syn = idx.iter().fold(0u64, |s, &c| s ^ cols[c]);
        out.push((idx.iter().map(|&c| c as u32).collect(), syn));
        // rightmost index that can still move right
        let mut pos = size;
        while pos > 0 && idx[pos - 1] == m - size + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        pos -= 1;
        idx[pos] += 1;
        for j in pos + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// One collision-search iteration at stream counter `counter`.
pub fn dumer_iteration_at(
    code: &CodeInstance,
    cfg: DumerConfig,
    window: Option<WeightWindow>,
    seed: u64,
    counter: u64,
) -> Result<IterationOutput, HarvestError> {
    let (n, k) = (code.n(), code.k());
    cfg.validate(n, k)?;
    let mut r = rng::stream(seed, "dumer", counter);
    let (p, ps, retries) = with_fresh_permutation(n, &mut r, |p| {
        code.generator().partial_systematize(p, cfg.l)
    })?;
    let top = k - cfg.l;
    let (m1, m2) = cfg.halves(n, k);
    let m = m1 + m2;
    // l-bit syndromes of the G2 columns, and G1 columns as vectors
    let g2 = &ps.bottom_right;
    let syn: Vec<u64> = (0..m)
        .map(|c| (0..cfg.l).fold(0u64, |s, row| s | ((g2.get(row, c) as u64) << row)))
        .collect();
    let g1_cols: Vec<BitVector> = ps.g1().transpose().into_rows();

    let half = cfg.r / 2;
    let list1 = subset_syndromes(&syn[..m1], half);
    let list2 = subset_syndromes(&syn[m1..], half);
    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
    for (j, (_, s)) in list1.iter().enumerate() {
        buckets.entry(*s).or_default().push(j as u32);
    }

    let mut out = IterationOutput {
        singular_retries: retries,
        list_sizes: (list1.len() + list2.len()) as u64,
        ..Default::default()
    };
    for (e2, s2) in &list2 {
        let Some(bucket) = buckets.get(s2) else { continue };
        for &j in bucket {
            let e1 = &list1[j as usize].0;
            out.collisions += 1;
            let support = e1.iter().map(|&c| c as usize).chain(e2.iter().map(|&c| c as usize + m1));
            let mut g1e = BitVector::zeros(top);
            let mut e_pos = Vec::with_capacity(cfg.r);
            for c in support {
                g1e.xor_assign(&g1_cols[c]);
                e_pos.push(top + c);
            }
            let w = cfg.r + g1e.weight();
            out.candidates += 1;
            *out.histogram.entry(w).or_default() += 1;
            if window.is_none_or(|win| win.contains(w)) {
                let mut h = g1e.concat(&BitVector::zeros(m));
                for pos in e_pos {
                    h.set(pos, true);
                }
                out.equations.push((p.unapply(&h), w));
            }
        }
    }
    Ok(out)
}

/// One collision-search iteration; returns every emitted dual word with
/// its weight.
pub fn dumer_iteration(
    code: &CodeInstance,
    cfg: DumerConfig,
    seed: u64,
) -> Result<Vec<(BitVector, usize)>, HarvestError> {
    Ok(dumer_iteration_at(code, cfg, None, seed, 0)?.equations)
}

/// Tracks the stopping rule incrementally.
struct Progress {
    target: Target,
    deficient: usize,
    /// In-window equations through each position.
    counts: Vec<usize>,
}

impl Progress {
    fn new(target: Target, n: usize) -> Self {
        let deficient = match target {
            Target::PerPosition { count, .. } if count > 0 => n,
            _ => 0,
        };
        Self {
            target,
            deficient,
            counts: vec![0; n],
        }
    }

    fn on_insert(&mut self, h: &BitVector) {
        if let Target::PerPosition { count, window } = self.target {
            if window.contains(h.weight()) {
                for i in h.iter_ones() {
                    self.counts[i] += 1;
                    if self.counts[i] == count {
                        self.deficient -= 1;
                    }
                }
            }
        }
    }

    fn done(&self, pool: &ParityPool) -> bool {
        match self.target {
            Target::Total(t) => pool.len() >= t,
            Target::PerPosition { .. } => self.deficient == 0,
        }
    }
}

fn validate_target(target: Target, pool_window: WeightWindow) -> Result<(), HarvestError> {
    match target {
        Target::Total(0) => Err(HarvestError::InvalidParams("target must be >= 1".into())),
        Target::PerPosition { window, .. } if window.hi < pool_window.lo || window.lo > pool_window.hi => {
            Err(HarvestError::InvalidParams(format!(
                "target window {window} does not meet the pool window {pool_window}"
            )))
        }
        _ => Ok(()),
    }
}

fn run_harvest(
    code: &CodeInstance,
    window: WeightWindow,
    target: Target,
    seed: u64,
    opts: HarvestOptions,
    algorithm: Algorithm,
    iteration: impl Fn(u64) -> Result<IterationOutput, HarvestError> + Sync,
) -> Result<(ParityPool, HarvestStats), HarvestError> {
    validate_target(target, window)?;
    if window.hi > code.n() {
        return Err(HarvestError::InvalidParams(format!(
            "window {window} exceeds n = {}",
            code.n()
        )));
    }
    let provenance = Provenance::new(algorithm, seed);
    let mut pool = ParityPool::new(code, window, provenance);
    let mut stats = HarvestStats::default();
    let mut progress = Progress::new(target, code.n());
    let batch = opts.batch.max(1) as u64;
    let mut next = 0u64;
    while next < opts.iteration_cap && !progress.done(&pool) {
        let end = (next + batch).min(opts.iteration_cap);
        let outputs: Vec<Result<IterationOutput, HarvestError>> =
            (next..end).into_par_iter().map(&iteration).collect();
        for out in outputs {
            let out = out?;
            stats.record(&out);
            next += 1;
            for (h, _) in out.equations {
                stats.in_window += 1;
                if pool.insert_unchecked_dual(h.clone())? {
                    progress.on_insert(&h);
                } else {
                    stats.duplicates += 1;
                }
            }
            if progress.done(&pool) {
                break;
            }
        }
    }
    pool.provenance.iterations = stats.iterations;
    if !progress.done(&pool) {
        pool.provenance.complete = false;
        return Err(HarvestError::IterationCapExceeded {
            cap: opts.iteration_cap,
            pool: Box::new(pool),
            stats: Box::new(stats),
        });
    }
    debug_assert!(pool.verify(code).is_ok());
    Ok((pool, stats))
}

/// Systematic-form harvesting until `target` is met.
pub fn harvest_gauss(
    code: &CodeInstance,
    window: WeightWindow,
    target: Target,
    seed: u64,
    opts: HarvestOptions,
) -> Result<(ParityPool, HarvestStats), HarvestError> {
    run_harvest(code, window, target, seed, opts, Algorithm::Gauss, |j| {
        gauss_iteration(code, window, seed, j)
    })
}

/// Collision-search harvesting until `target` is met. `window` defaults to
/// [`DumerConfig::default_window`].
pub fn harvest_dumer(
    code: &CodeInstance,
    cfg: DumerConfig,
    window: Option<WeightWindow>,
    target: Target,
    seed: u64,
    opts: HarvestOptions,
) -> Result<(ParityPool, HarvestStats), HarvestError> {
    cfg.validate(code.n(), code.k())?;
    let window = match window {
        Some(w) => w,
        None => cfg.default_window(code.k())?,
    };
    run_harvest(code, window, target, seed, opts, Algorithm::Dumer, |j| {
        dumer_iteration_at(code, cfg, Some(window), seed, j)
    })
}
