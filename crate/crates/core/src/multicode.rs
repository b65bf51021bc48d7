//! Several equal-size B-codes used jointly.
//!
//! A tuple of B-codes misses a pair only when every code misses it. For a
//! fixed tuple of binnings the best decoders are found per side-information
//! value: each `(code, bin)` slot can reproduce one `x1` of its bin, the
//! reproducible sets form a transversal matroid, and the greedy rule (most
//! probable `x1` first, kept when an augmenting path to a free slot exists)
//! maximizes the covered mass.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::codes::{
    encoder_partitions, error_probability, first_near_min, optimal_b_code, ACode, BCode,
    CorrectSet, PairAlphabet,
};
use crate::error::{invalid, over_cap, Result};
use crate::measures::{Dist, EventSet};
use crate::partition;
use crate::rng;

/// Cap on tuples visited by the exhaustive search inside [`k_index`].
pub const MAX_TUPLES: u128 = 10_000_000;

const RESTARTS: usize = 8;
const IMPROVE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    Exhaustive,
    Stochastic,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::Stochastic => "stochastic",
        }
    }
}

/// Best tuple found by [`best_multi_b`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCodeResult {
    pub codes: Vec<BCode>,
    pub miss_probability: f64,
    pub search_mode: SearchMode,
    pub seed: u64,
}

/// Outcome of [`k_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KIndex {
    Exactly(usize),
    ExceedsMax,
}

/// `P(T(c_0)^c ∩ … ∩ T(c_k)^c)`.
pub fn joint_miss_probability(codes: &[BCode], joint: &Dist, alphabet: &PairAlphabet) -> Result<f64> {
    alphabet.check_joint(joint)?;
    let Some((first, rest)) = codes.split_first() else {
        return invalid("joint miss probability of an empty code sequence");
    };
    let mut union = crate::codes::correct_set(first, alphabet)?;
    for c in rest {
        union = union.union(&crate::codes::correct_set(c, alphabet)?);
    }
    Ok(union.miss_mass(joint))
}

/// Greedy matroid evaluation of binning tuples over one joint.
struct Coverage<'a> {
    alphabet: PairAlphabet,
    size: usize,
    joint: &'a [f64],
    /// per x2: x1 values by decreasing mass, ties to the smaller index
    order: Vec<Vec<usize>>,
}

impl<'a> Coverage<'a> {
    fn new(alphabet: PairAlphabet, size: usize, joint: &'a Dist) -> Self {
        let probs = joint.probs();
        let order = (0..alphabet.x2_size)
            .map(|x2| {
                let mut xs: Vec<usize> = (0..alphabet.x1_size).collect();
                xs.sort_by(|&a, &b| {
                    probs[alphabet.index(b, x2)]
                        .total_cmp(&probs[alphabet.index(a, x2)])
                        .then(a.cmp(&b))
                });
                xs
            })
            .collect();
        Coverage {
            alphabet,
            size,
            joint: probs,
            order,
        }
    }

    /// Slot owners for one side-information value: `owner[code * size + bin]`.
    fn assign(&self, encoders: &[&[usize]], x2: usize, owner: &mut [Option<usize>]) -> f64 {
        owner.iter_mut().for_each(|o| *o = None);
        let mut visited = vec![false; owner.len()];
        let mut filled = 0;
        let mut missed = 0.0;
        for &x in &self.order[x2] {
            let p = self.joint[self.alphabet.index(x, x2)];
            if filled < owner.len() {
                visited.iter_mut().for_each(|v| *v = false);
                if self.augment(encoders, x, owner, &mut visited) {
                    filled += 1;
                    continue;
                }
            }
            missed += p;
        }
        missed
    }

    fn augment(
        &self,
        encoders: &[&[usize]],
        x: usize,
        owner: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for (i, enc) in encoders.iter().enumerate() {
            let slot = i * self.size + enc[x];
            if visited[slot] {
                continue;
            }
            visited[slot] = true;
            let free = match owner[slot] {
                None => true,
                Some(y) => self.augment(encoders, y, owner, visited),
            };
            if free {
                owner[slot] = Some(x);
                return true;
            }
        }
        false
    }

    fn miss(&self, encoders: &[&[usize]]) -> f64 {
        let mut owner = vec![None; encoders.len() * self.size];
        (0..self.alphabet.x2_size)
            .map(|x2| self.assign(encoders, x2, &mut owner))
            .sum()
    }

    /// Materializes the codes whose decoders realize the greedy cover.
    fn build(&self, encoders: &[Vec<usize>]) -> Result<Vec<BCode>> {
        let refs: Vec<&[usize]> = encoders.iter().map(Vec::as_slice).collect();
        let x2n = self.alphabet.x2_size;
        let mut decoders = vec![vec![0; self.size * x2n]; encoders.len()];
        let mut owner = vec![None; encoders.len() * self.size];
        for x2 in 0..x2n {
            self.assign(&refs, x2, &mut owner);
            for (i, enc) in encoders.iter().enumerate() {
                for b in 0..self.size {
                    // free slots have an empty or fully covered bin
                    let out = owner[i * self.size + b]
                        .or_else(|| enc.iter().position(|&m| m == b))
                        .unwrap_or(0);
                    decoders[i][b * x2n + x2] = out;
                }
            }
        }
        encoders
            .iter()
            .zip(decoders)
            .map(|(enc, dec)| BCode::new(self.alphabet, self.size, enc.clone(), dec))
            .collect()
    }
}

/// Nondecreasing index tuples of length `len` over `0..n`, lexicographic.
struct Multisets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Multisets {
    fn new(n: usize, len: usize) -> Self {
        Multisets {
            n,
            current: vec![0; len],
            done: n == 0,
        }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        match (0..self.current.len()).rev().find(|&i| self.current[i] + 1 < self.n) {
            Some(i) => {
                let v = self.current[i] + 1;
                self.current[i..].iter_mut().for_each(|c| *c = v);
            }
            None => self.done = true,
        }
        Some(out)
    }
}

fn tuple_count(alphabet: &PairAlphabet, size: usize, k: usize) -> u128 {
    let p = partition::count(alphabet.x1_size, size.min(alphabet.x1_size));
    (0..=k).fold(1u128, |acc, _| acc.saturating_mul(p))
}

fn validate(joint: &Dist, alphabet: &PairAlphabet, size: usize) -> Result<()> {
    alphabet.check_joint(joint)?;
    if size == 0 {
        return invalid("code size must be positive");
    }
    Ok(())
}

fn finish(
    coverage: &Coverage<'_>,
    encoders: &[Vec<usize>],
    joint: &Dist,
    mode: SearchMode,
    seed: u64,
) -> Result<MultiCodeResult> {
    let codes = coverage.build(encoders)?;
    let miss_probability = joint_miss_probability(&codes, joint, &coverage.alphabet)?;
    Ok(MultiCodeResult {
        codes,
        miss_probability,
        search_mode: mode,
        seed,
    })
}

/// Exact `e_B(size; k)` by enumerating every multiset of `k + 1` binnings.
pub fn exhaustive_multi_b(
    joint: &Dist,
    alphabet: &PairAlphabet,
    size: usize,
    k: usize,
) -> Result<MultiCodeResult> {
    validate(joint, alphabet, size)?;
    let parts: Vec<Vec<usize>> = encoder_partitions(alphabet, size)?.collect();
    let coverage = Coverage::new(*alphabet, size, joint);
    let mut scored: Vec<(usize, f64)> = Multisets::new(parts.len(), k + 1)
        .enumerate()
        .par_bridge()
        .map(|(i, tuple)| {
            let encs: Vec<&[usize]> = tuple.iter().map(|&t| parts[t].as_slice()).collect();
            (i, coverage.miss(&encs))
        })
        .collect();
    scored.sort_by_key(|(i, _)| *i);
    let misses: Vec<f64> = scored.into_iter().map(|(_, m)| m).collect();
    let best = first_near_min(&misses).expect("at least one tuple");
    let tuple = Multisets::new(parts.len(), k + 1)
        .nth(best)
        .expect("index from the same enumeration");
    let encoders: Vec<Vec<usize>> = tuple.iter().map(|&t| parts[t].clone()).collect();
    finish(&coverage, &encoders, joint, SearchMode::Exhaustive, 0)
}

/// Seeded local search over binning tuples: random restarts, single-symbol
/// bin moves accepted on strict improvement. `budget` bounds the number of
/// tuples evaluated. Restart 0 starts from `k + 1` copies of the best single
/// B-code when that search is within its cap, so the result never exceeds
/// `e_B(size; 0)` in that case.
pub fn stochastic_multi_b(
    joint: &Dist,
    alphabet: &PairAlphabet,
    size: usize,
    k: usize,
    budget: u64,
    seed: u64,
) -> Result<MultiCodeResult> {
    validate(joint, alphabet, size)?;
    if budget == 0 {
        return invalid("search budget must be positive");
    }
    let coverage = Coverage::new(*alphabet, size, joint);
    let single = optimal_b_code(joint, alphabet, size).ok().map(|(c, _)| c);
    let restarts = RESTARTS.min(budget as usize).max(1);
    let per_restart = (budget / restarts as u64).max(1);
    let labels = size.min(alphabet.x1_size);

    let runs: Vec<(f64, Vec<Vec<usize>>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, r as u64);
            let mut encs: Vec<Vec<usize>> = match (&single, r) {
                (Some(c), 0) => vec![c.encoder().to_vec(); k + 1],
                _ => (0..=k)
                    .map(|_| {
                        (0..alphabet.x1_size)
                            .map(|_| rng.random_range(0..labels))
                            .collect()
                    })
                    .collect(),
            };
            let eval = |encs: &[Vec<usize>]| {
                let refs: Vec<&[usize]> = encs.iter().map(Vec::as_slice).collect();
                coverage.miss(&refs)
            };
            let mut current = eval(&encs);
            let mut spent = 1u64;
            let mut moves: Vec<(usize, usize, usize)> = (0..=k)
                .flat_map(|i| {
                    (0..alphabet.x1_size).flat_map(move |x| (0..labels).map(move |b| (i, x, b)))
                })
                .collect();
            'search: loop {
                moves.shuffle(&mut rng);
                let mut improved = false;
                for &(i, x, b) in &moves {
                    if encs[i][x] == b {
                        continue;
                    }
                    if spent >= per_restart {
                        break 'search;
                    }
                    let old = encs[i][x];
                    encs[i][x] = b;
                    let candidate = eval(&encs);
                    spent += 1;
                    if candidate < current - IMPROVE_TOL {
                        current = candidate;
                        improved = true;
                    } else {
                        encs[i][x] = old;
                    }
                }
                if !improved {
                    break;
                }
            }
            (current, encs)
        })
        .collect();

    let misses: Vec<f64> = runs.iter().map(|(m, _)| *m).collect();
    let best = first_near_min(&misses).expect("at least one restart");
    finish(&coverage, &runs[best].1, joint, SearchMode::Stochastic, seed)
}

/// `e_B(size; k)`: exact when the tuple space fits in `budget`, otherwise a
/// seeded stochastic upper bound.
pub fn best_multi_b(
    joint: &Dist,
    alphabet: &PairAlphabet,
    size: usize,
    k: usize,
    budget: u64,
    seed: u64,
) -> Result<MultiCodeResult> {
    validate(joint, alphabet, size)?;
    if tuple_count(alphabet, size, k) <= budget as u128 {
        let mut res = exhaustive_multi_b(joint, alphabet, size, k)?;
        res.seed = seed;
        Ok(res)
    } else {
        stochastic_multi_b(joint, alphabet, size, k, budget, seed)
    }
}

/// Smallest `k ≤ k_max` with `e_B(‖c‖; k) ≤ ε(c)`.
pub fn k_index(c: &ACode, joint: &Dist, alphabet: &PairAlphabet, k_max: usize) -> Result<KIndex> {
    let err = error_probability(c, joint, alphabet)?;
    let size = crate::codes::Code::size(c);
    for k in 0..=k_max {
        if tuple_count(alphabet, size, k) > MAX_TUPLES {
            return over_cap(format!(
                "exhaustive search over {} B-code tuples at k = {k} exceeds {MAX_TUPLES}",
                tuple_count(alphabet, size, k)
            ));
        }
        let e = exhaustive_multi_b(joint, alphabet, size, k)?.miss_probability;
        if e <= err + 1e-12 {
            return Ok(KIndex::Exactly(k));
        }
    }
    Ok(KIndex::ExceedsMax)
}

/// Union of the correct sets of a tuple, as an event over pair indices.
pub fn covered_set(codes: &[BCode], alphabet: &PairAlphabet) -> Result<CorrectSet> {
    let mut bits = EventSet::empty(alphabet.total());
    for c in codes {
        bits = bits.union(&crate::codes::correct_set(c, alphabet)?.bits);
    }
    Ok(CorrectSet {
        alphabet: *alphabet,
        bits,
    })
}
