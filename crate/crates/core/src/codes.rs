//! Fixed-length codes with side information.
//!
//! An [`ACode`] sees the side information `x2` at both encoder and decoder;
//! a [`BCode`] encodes from `x1` alone. Both are explicit tables over one
//! block alphabet (the blocklength is caller metadata). Messages are
//! `0..size`. Pair index is `x1 * x2_size + x2` throughout.

use rayon::prelude::*;

use crate::error::{invalid, over_cap, Result};
use crate::measures::{Dist, EventSet};
use crate::partition::{self, Partitions};

/// Cap on the number of encoder partitions an exhaustive B-code search visits.
pub const MAX_PARTITIONS: u128 = 10_000_000;

/// Tolerance for "equal error" when breaking ties between candidate codes.
const TIE_TOL: f64 = 1e-12;

/// `X1 × X2` at a fixed blocklength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairAlphabet {
    pub x1_size: usize,
    pub x2_size: usize,
}

impl PairAlphabet {
    pub fn new(x1_size: usize, x2_size: usize) -> Result<Self> {
        if x1_size == 0 || x2_size == 0 {
            return invalid("pair alphabet components must be nonempty");
        }
        Ok(PairAlphabet { x1_size, x2_size })
    }

    pub fn total(&self) -> usize {
        self.x1_size * self.x2_size
    }

    pub fn index(&self, x1: usize, x2: usize) -> usize {
        x1 * self.x2_size + x2
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.x2_size, index % self.x2_size)
    }

    pub fn check_joint(&self, joint: &Dist) -> Result<()> {
        if joint.size() != self.total() {
            return invalid(format!(
                "joint of size {} does not match a {}x{} pair alphabet",
                joint.size(),
                self.x1_size,
                self.x2_size
            ));
        }
        Ok(())
    }

    fn check_same(&self, other: &PairAlphabet) -> Result<()> {
        if self != other {
            return invalid(format!(
                "code built for {}x{} used on {}x{}",
                self.x1_size, self.x2_size, other.x1_size, other.x2_size
            ));
        }
        Ok(())
    }
}

/// Common view of A- and B-codes: a size and the reproduction map.
pub trait Code {
    fn alphabet(&self) -> PairAlphabet;
    fn size(&self) -> usize;
    fn message(&self, x1: usize, x2: usize) -> usize;
    fn decode(&self, message: usize, x2: usize) -> usize;

    /// `c(x1, x2) = decoder(encoder(…), x2)`.
    fn reproduce(&self, x1: usize, x2: usize) -> usize {
        self.decode(self.message(x1, x2), x2)
    }
}

fn check_decoder(alphabet: &PairAlphabet, size: usize, decoder: &[usize]) -> Result<()> {
    if decoder.len() != size * alphabet.x2_size {
        return invalid(format!(
            "decoder table has {} entries, expected {}",
            decoder.len(),
            size * alphabet.x2_size
        ));
    }
    if let Some(x) = decoder.iter().find(|&&x| x >= alphabet.x1_size) {
        return invalid(format!("decoder outputs {x}, outside X1"));
    }
    Ok(())
}

fn check_messages(size: usize, encoder: &[usize]) -> Result<()> {
    if size == 0 {
        return invalid("code size must be positive");
    }
    if let Some(m) = encoder.iter().find(|&&m| m >= size) {
        return invalid(format!("encoder emits message {m}, code size is {size}"));
    }
    Ok(())
}

/// Code whose encoder sees `(x1, x2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ACode {
    alphabet: PairAlphabet,
    size: usize,
    encoder: Vec<usize>,
    decoder: Vec<usize>,
}

impl ACode {
    /// `encoder` is indexed by pair index, `decoder` by `message * x2_size + x2`.
    pub fn new(
        alphabet: PairAlphabet,
        size: usize,
        encoder: Vec<usize>,
        decoder: Vec<usize>,
    ) -> Result<Self> {
        if encoder.len() != alphabet.total() {
            return invalid(format!(
                "encoder table has {} entries, expected {}",
                encoder.len(),
                alphabet.total()
            ));
        }
        check_messages(size, &encoder)?;
        check_decoder(&alphabet, size, &decoder)?;
        Ok(ACode {
            alphabet,
            size,
            encoder,
            decoder,
        })
    }

    pub fn encoder(&self) -> &[usize] {
        &self.encoder
    }

    pub fn decoder(&self) -> &[usize] {
        &self.decoder
    }
}

impl Code for ACode {
    fn alphabet(&self) -> PairAlphabet {
        self.alphabet
    }
    fn size(&self) -> usize {
        self.size
    }
    fn message(&self, x1: usize, x2: usize) -> usize {
        self.encoder[self.alphabet.index(x1, x2)]
    }
    fn decode(&self, message: usize, x2: usize) -> usize {
        self.decoder[message * self.alphabet.x2_size + x2]
    }
}

/// Code whose encoder sees `x1` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BCode {
    alphabet: PairAlphabet,
    size: usize,
    encoder: Vec<usize>,
    decoder: Vec<usize>,
}

impl BCode {
    /// `encoder` is indexed by `x1`, `decoder` by `message * x2_size + x2`.
    pub fn new(
        alphabet: PairAlphabet,
        size: usize,
        encoder: Vec<usize>,
        decoder: Vec<usize>,
    ) -> Result<Self> {
        if encoder.len() != alphabet.x1_size {
            return invalid(format!(
                "encoder table has {} entries, expected {}",
                encoder.len(),
                alphabet.x1_size
            ));
        }
        check_messages(size, &encoder)?;
        check_decoder(&alphabet, size, &decoder)?;
        Ok(BCode {
            alphabet,
            size,
            encoder,
            decoder,
        })
    }

    pub fn encoder(&self) -> &[usize] {
        &self.encoder
    }

    pub fn decoder(&self) -> &[usize] {
        &self.decoder
    }
}

impl Code for BCode {
    fn alphabet(&self) -> PairAlphabet {
        self.alphabet
    }
    fn size(&self) -> usize {
        self.size
    }
    fn message(&self, x1: usize, _x2: usize) -> usize {
        self.encoder[x1]
    }
    fn decode(&self, message: usize, x2: usize) -> usize {
        self.decoder[message * self.alphabet.x2_size + x2]
    }
}

/// Pairs a code reproduces exactly (or within a distortion level).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrectSet {
    pub alphabet: PairAlphabet,
    pub bits: EventSet,
}

impl CorrectSet {
    pub fn contains(&self, x1: usize, x2: usize) -> bool {
        self.bits.contains(self.alphabet.index(x1, x2))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn union(&self, other: &CorrectSet) -> CorrectSet {
        CorrectSet {
            alphabet: self.alphabet,
            bits: self.bits.union(&other.bits),
        }
    }

    /// Probability of the complement, summed in pair-index order.
    pub fn miss_mass(&self, joint: &Dist) -> f64 {
        complement_mass(&self.bits, joint)
    }
}

fn complement_mass(bits: &EventSet, joint: &Dist) -> f64 {
    let missed: f64 = joint
        .probs()
        .iter()
        .enumerate()
        .filter(|(i, _)| !bits.contains(*i))
        .map(|(_, p)| p)
        .sum();
    missed.clamp(0.0, 1.0)
}

/// A code seen only through its size and correct set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingSystemView {
    pub size: usize,
    pub correct: CorrectSet,
}

impl CodingSystemView {
    pub fn of(code: &impl Code) -> Self {
        let alphabet = code.alphabet();
        CodingSystemView {
            size: code.size(),
            correct: correct_set(code, &alphabet).expect("code is consistent with its own alphabet"),
        }
    }
}

/// Set of `(x1, x2)` with `c(x1, x2) = x1`.
pub fn correct_set(code: &impl Code, alphabet: &PairAlphabet) -> Result<CorrectSet> {
    code.alphabet().check_same(alphabet)?;
    let bits = EventSet::from_predicate(alphabet.total(), |i| {
        let (x1, x2) = alphabet.split(i);
        code.reproduce(x1, x2) == x1
    });
    Ok(CorrectSet {
        alphabet: *alphabet,
        bits,
    })
}

/// `P(c(X1, X2) ≠ X1)`.
pub fn error_probability(code: &impl Code, joint: &Dist, alphabet: &PairAlphabet) -> Result<f64> {
    alphabet.check_joint(joint)?;
    Ok(correct_set(code, alphabet)?.miss_mass(joint))
}

fn column(joint: &Dist, alphabet: &PairAlphabet, x2: usize) -> Vec<f64> {
    (0..alphabet.x1_size)
        .map(|x1| joint.get(alphabet.index(x1, x2)))
        .collect()
}

/// `x1` values of one column ordered by decreasing mass, ties to the smaller index.
fn ranked(col: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..col.len()).collect();
    order.sort_by(|&a, &b| col[b].total_cmp(&col[a]).then(a.cmp(&b)));
    order
}

/// Optimal A-code of size `size`: per side-information value keep the `size`
/// most probable `x1`. Returns the code and `e_A(size)`.
pub fn optimal_a_code(joint: &Dist, alphabet: &PairAlphabet, size: usize) -> Result<(ACode, f64)> {
    alphabet.check_joint(joint)?;
    if size == 0 {
        return invalid("code size must be positive");
    }
    let mut encoder = vec![0; alphabet.total()];
    let mut decoder = vec![0; size * alphabet.x2_size];
    for x2 in 0..alphabet.x2_size {
        let order = ranked(&column(joint, alphabet, x2));
        for (m, &x1) in order.iter().take(size).enumerate() {
            encoder[alphabet.index(x1, x2)] = m;
            decoder[m * alphabet.x2_size + x2] = x1;
        }
    }
    let code = ACode::new(*alphabet, size, encoder, decoder)?;
    let err = error_probability(&code, joint, alphabet)?;
    Ok((code, err))
}

/// `e_A(size)` without materializing code tables.
pub fn optimal_a_error(joint: &Dist, alphabet: &PairAlphabet, size: usize) -> Result<f64> {
    alphabet.check_joint(joint)?;
    if size == 0 {
        return invalid("code size must be positive");
    }
    if size >= alphabet.x1_size {
        return Ok(0.0);
    }
    let per_column: Vec<f64> = (0..alphabet.x2_size)
        .into_par_iter()
        .map(|x2| {
            let mut col = column(joint, alphabet, x2);
            col.select_nth_unstable_by(size - 1, |a, b| b.total_cmp(a));
            col[size..].iter().sum::<f64>()
        })
        .collect();
    Ok(per_column.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// `e_A(M)` for every `M` in `0..=x1_size` (entry 0 is the total mass).
pub fn a_error_profile(joint: &Dist, alphabet: &PairAlphabet) -> Result<Vec<f64>> {
    alphabet.check_joint(joint)?;
    const CHUNK: usize = 64;
    let x1 = alphabet.x1_size;
    let columns: Vec<usize> = (0..alphabet.x2_size).collect();
    let partials: Vec<Vec<f64>> = columns
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; x1 + 1];
            for &x2 in chunk {
                let mut col = column(joint, alphabet, x2);
                col.sort_by(|a, b| b.total_cmp(a));
                let mut tail = 0.0;
                for m in (0..x1).rev() {
                    tail += col[m];
                    acc[m] += tail;
                }
            }
            acc
        })
        .collect();
    let mut profile = vec![0.0; x1 + 1];
    for part in &partials {
        for (p, v) in profile.iter_mut().zip(part) {
            *p += v;
        }
    }
    Ok(profile.into_iter().map(|e| e.clamp(0.0, 1.0)).collect())
}

/// MAP decoder for a fixed binning: within each bin and side-information
/// value, the most probable `x1` (smallest index on ties). Empty bins
/// decode to `x1 = 0`.
pub fn map_decoder(
    alphabet: &PairAlphabet,
    encoder: &[usize],
    joint: &Dist,
    size: usize,
) -> Result<BCode> {
    alphabet.check_joint(joint)?;
    if encoder.len() != alphabet.x1_size {
        return invalid(format!(
            "encoder table has {} entries, expected {}",
            encoder.len(),
            alphabet.x1_size
        ));
    }
    check_messages(size, encoder)?;
    let mut decoder = vec![0; size * alphabet.x2_size];
    for x2 in 0..alphabet.x2_size {
        let mut best: Vec<Option<(usize, f64)>> = vec![None; size];
        for (x1, &m) in encoder.iter().enumerate() {
            let p = joint.get(alphabet.index(x1, x2));
            if best[m].is_none_or(|(_, q)| p > q) {
                best[m] = Some((x1, p));
            }
        }
        for (m, b) in best.iter().enumerate() {
            decoder[m * alphabet.x2_size + x2] = b.map_or(0, |(x1, _)| x1);
        }
    }
    BCode::new(*alphabet, size, encoder.to_vec(), decoder)
}

/// Error of the MAP decoder for a binning, summing the missed mass.
pub(crate) fn map_error(alphabet: &PairAlphabet, encoder: &[usize], joint: &[f64], size: usize) -> f64 {
    let mut best = vec![usize::MAX; size];
    let mut missed = 0.0;
    for x2 in 0..alphabet.x2_size {
        best.iter_mut().for_each(|b| *b = usize::MAX);
        for (x1, &m) in encoder.iter().enumerate() {
            let p = joint[x1 * alphabet.x2_size + x2];
            if best[m] == usize::MAX || p > joint[best[m] * alphabet.x2_size + x2] {
                best[m] = x1;
            }
        }
        for (x1, &m) in encoder.iter().enumerate() {
            if best[m] != x1 {
                missed += joint[x1 * alphabet.x2_size + x2];
            }
        }
    }
    missed
}

/// All binnings of `X1` into at most `size` bins, up to relabeling, checked
/// against [`MAX_PARTITIONS`].
pub(crate) fn encoder_partitions(alphabet: &PairAlphabet, size: usize) -> Result<Partitions> {
    let bins = size.min(alphabet.x1_size);
    let count = partition::count(alphabet.x1_size, bins);
    if count > MAX_PARTITIONS {
        return over_cap(format!(
            "{count} binnings of {} symbols exceed the cap of {MAX_PARTITIONS}",
            alphabet.x1_size
        ));
    }
    Ok(Partitions::new(alphabet.x1_size, bins))
}

/// Index of the first value within [`TIE_TOL`] of the minimum.
pub(crate) fn first_near_min(values: &[f64]) -> Option<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values.iter().position(|&v| v <= min + TIE_TOL)
}

/// Optimal B-code of size `size` by exhaustive search over binnings, each
/// with its MAP decoder. Returns the code and `e_B(size; 0)`.
pub fn optimal_b_code(joint: &Dist, alphabet: &PairAlphabet, size: usize) -> Result<(BCode, f64)> {
    alphabet.check_joint(joint)?;
    if size == 0 {
        return invalid("code size must be positive");
    }
    let parts = encoder_partitions(alphabet, size)?;
    let mut scored: Vec<(usize, f64)> = parts
        .clone()
        .enumerate()
        .par_bridge()
        .map(|(i, enc)| (i, map_error(alphabet, &enc, joint.probs(), size)))
        .collect();
    scored.sort_by_key(|(i, _)| *i);
    let errors: Vec<f64> = scored.into_iter().map(|(_, e)| e).collect();
    let best = first_near_min(&errors).expect("at least one binning");
    let encoder = parts.clone().nth(best).expect("index from the same enumeration");
    let code = map_decoder(alphabet, &encoder, joint, size)?;
    let err = error_probability(&code, joint, alphabet)?;
    Ok((code, err))
}

/// Union construction: keep `c1`'s message where `c1` is correct, otherwise
/// send `c2`'s message shifted past `c1`'s range.
pub fn merge_a_codes(c1: &ACode, c2: &ACode, alphabet: &PairAlphabet) -> Result<ACode> {
    c1.alphabet.check_same(alphabet)?;
    c2.alphabet.check_same(alphabet)?;
    let shift = c1.size;
    let encoder = (0..alphabet.total())
        .map(|i| {
            let (x1, x2) = alphabet.split(i);
            if c1.reproduce(x1, x2) == x1 {
                c1.message(x1, x2)
            } else {
                c2.message(x1, x2) + shift
            }
        })
        .collect();
    let mut decoder = c1.decoder.clone();
    decoder.extend_from_slice(&c2.decoder);
    ACode::new(*alphabet, c1.size + c2.size, encoder, decoder)
}

/// A B-code viewed as an A-code whose encoder ignores `x2`.
pub fn b_to_a(b: &BCode) -> ACode {
    let alphabet = b.alphabet;
    let encoder = (0..alphabet.total())
        .map(|i| b.encoder[alphabet.split(i).0])
        .collect();
    ACode {
        alphabet,
        size: b.size,
        encoder,
        decoder: b.decoder.clone(),
    }
}

/// `(1/n) log2 M*` where `M*` is the smallest size with `e_A(M*) ≤ 1 − a`.
pub fn min_size_for_error(
    joint: &Dist,
    alphabet: &PairAlphabet,
    a: f64,
    blocklength: usize,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return invalid(format!("correct-probability target {a} outside [0, 1]"));
    }
    if blocklength == 0 {
        return invalid("blocklength must be positive");
    }
    let profile = a_error_profile(joint, alphabet)?;
    let target = 1.0 - a + TIE_TOL;
    let m = (1..=alphabet.x1_size)
        .find(|&m| profile[m] <= target)
        .unwrap_or(alphabet.x1_size);
    Ok((m as f64).log2() / blocklength as f64)
}

/// Per-letter distortion `d(x1, x1')` over `X1 × X1`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Distortion {
    size: usize,
    table: Vec<f64>,
}

impl Distortion {
    pub fn new(size: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != size * size {
            return invalid(format!(
                "distortion table has {} entries, expected {}",
                table.len(),
                size * size
            ));
        }
        if table.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return invalid("distortions must be finite and nonnegative");
        }
        Ok(Distortion { size, table })
    }

    /// 0/1 distortion.
    pub fn hamming(size: usize) -> Self {
        let table = (0..size * size)
            .map(|i| if i / size == i % size { 0.0 } else { 1.0 })
            .collect();
        Distortion { size, table }
    }

    /// `|x − x'|` on `0..size`.
    pub fn line(size: usize) -> Self {
        let table = (0..size * size)
            .map(|i| (i / size).abs_diff(i % size) as f64)
            .collect();
        Distortion { size, table }
    }

    pub fn get(&self, x: usize, reproduction: usize) -> f64 {
        self.table[x * self.size + reproduction]
    }
}

/// Pairs reproduced within distortion `level`.
pub fn lossy_correct_set(
    code: &impl Code,
    distortion: &Distortion,
    level: f64,
    alphabet: &PairAlphabet,
) -> Result<CorrectSet> {
    code.alphabet().check_same(alphabet)?;
    if distortion.size != alphabet.x1_size {
        return invalid(format!(
            "distortion over {} symbols used with |X1| = {}",
            distortion.size, alphabet.x1_size
        ));
    }
    if level.is_nan() || level < 0.0 {
        return invalid(format!("distortion level {level} must be nonnegative"));
    }
    let bits = EventSet::from_predicate(alphabet.total(), |i| {
        let (x1, x2) = alphabet.split(i);
        distortion.get(x1, code.reproduce(x1, x2)) <= level
    });
    Ok(CorrectSet {
        alphabet: *alphabet,
        bits,
    })
}
