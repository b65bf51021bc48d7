//! Brute-force verifiers.
//!
//! Each routine here recomputes an optimized quantity by plain enumeration
//! over raw code tables, sharing nothing with the optimized path beyond the
//! table types. Every enumeration has an explicit cap and fails with a
//! resource error instead of truncating.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::codes::{correct_set, BCode, Code, CorrectSet, PairAlphabet};
use crate::error::{invalid, over_cap, Result};
use crate::measures::{conditional_restriction, g_functional, kl_divergence, Dist, EventSet};
use crate::partition::Partitions;
use crate::rng;

/// Cap on (encoder table, decoder table) pairs visited by [`enumerate_a_codes`].
pub const MAX_A_CODES: u128 = 100_000_000;
/// Cap on binning tuples visited by [`enumerate_b_tuples`].
pub const MAX_B_TUPLES: u128 = 10_000_000;
/// Cap on elementary decoder evaluations inside [`enumerate_b_tuples`].
pub const MAX_B_WORK: u128 = 1_000_000_000;

fn pow(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Writes `index` in base `radix` into `digits`, least significant first.
fn digits_of(mut index: u128, radix: usize, digits: &mut [usize]) {
    for d in digits.iter_mut() {
        *d = (index % radix as u128) as usize;
        index /= radix as u128;
    }
}

/// Exact `e_A(size)`: the smallest error over every encoder table
/// `X1 × X2 → messages` and every decoder table `messages × X2 → X1`.
pub fn enumerate_a_codes(joint: &Dist, alphabet: &PairAlphabet, size: usize) -> Result<f64> {
    alphabet.check_joint(joint)?;
    if size == 0 {
        return invalid("code size must be positive");
    }
    let pairs = alphabet.total();
    let x2n = alphabet.x2_size;
    let encoders = pow(size, pairs);
    let decoders = pow(alphabet.x1_size, size * x2n);
    let total = encoders.saturating_mul(decoders);
    if total > MAX_A_CODES {
        return over_cap(format!(
            "{total} A-code tables exceed the oracle cap of {MAX_A_CODES}"
        ));
    }
    let probs = joint.probs();
    let best = (0..encoders as u64)
        .into_par_iter()
        .map(|e| {
            let mut enc = vec![0; pairs];
            digits_of(e as u128, size, &mut enc);
            let mut dec = vec![0; size * x2n];
            let mut best = f64::INFINITY;
            for d in 0..decoders {
                digits_of(d, alphabet.x1_size, &mut dec);
                let err: f64 = (0..pairs)
                    .filter(|&i| dec[enc[i] * x2n + i % x2n] != i / x2n)
                    .map(|i| probs[i])
                    .sum();
                best = best.min(err);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Exact `e_B(size; k)`: the smallest joint miss probability over every
/// tuple of `k + 1` raw encoder tables `X1 → messages` and, per side
/// information value, every choice of decoder outputs.
pub fn enumerate_b_tuples(
    joint: &Dist,
    alphabet: &PairAlphabet,
    size: usize,
    k: usize,
) -> Result<f64> {
    alphabet.check_joint(joint)?;
    if size == 0 {
        return invalid("code size must be positive");
    }
    let x1n = alphabet.x1_size;
    let x2n = alphabet.x2_size;
    let codes = k + 1;
    let partitions = crate::partition::count(x1n, size.min(x1n));
    if (0..codes).fold(1u128, |a, _| a.saturating_mul(partitions)) > MAX_B_TUPLES {
        return over_cap(format!(
            "{partitions}^{codes} binning tuples exceed the oracle cap of {MAX_B_TUPLES}"
        ));
    }
    let tuples = pow(size, x1n * codes);
    let slots = codes * size;
    let choices = pow(x1n, slots);
    let work = tuples.saturating_mul(choices).saturating_mul(x2n as u128);
    if work > MAX_B_WORK {
        return over_cap(format!(
            "{work} decoder evaluations exceed the oracle cap of {MAX_B_WORK}"
        ));
    }
    let probs = joint.probs();
    let best = (0..tuples as u64)
        .into_par_iter()
        .map(|t| {
            let mut enc = vec![0; x1n * codes];
            digits_of(t as u128, size, &mut enc);
            let mut outputs = vec![0; slots];
            let mut missed = 0.0;
            for y in 0..x2n {
                let column: f64 = (0..x1n).map(|x| probs[x * x2n + y]).sum();
                let mut best_cover: f64 = 0.0;
                for c in 0..choices {
                    digits_of(c, x1n, &mut outputs);
                    let covered: f64 = (0..x1n)
                        .filter(|&x| {
                            (0..codes).any(|i| outputs[i * size + enc[i * x1n + x]] == x)
                        })
                        .map(|x| probs[x * x2n + y])
                        .sum();
                    best_cover = best_cover.max(covered);
                }
                missed += (column - best_cover).max(0.0);
            }
            missed
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Outcome of [`sample_variational_identity`].
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalReport {
    pub trials: usize,
    /// `1/μ(B)`
    pub g_bound: f64,
    /// `−log2 μ(B)`
    pub d_bound: f64,
    pub g_at_restriction: f64,
    pub d_at_restriction: f64,
    /// smallest `G(ν‖μ) − 1/μ(B)` over the samples
    pub worst_g_margin: f64,
    /// smallest `D(ν‖μ) + log2 μ(B)` over the samples
    pub worst_d_margin: f64,
    /// samples beating either bound by more than `1e-9`
    pub violations: usize,
}

impl VariationalReport {
    /// Bounds attained at the restriction and never beaten by a sample.
    pub fn holds(&self) -> bool {
        self.violations == 0
            && (self.g_at_restriction - self.g_bound).abs() <= 1e-12 * self.g_bound
            && (self.d_at_restriction - self.d_bound).abs() <= 1e-9
    }
}

/// Random measures supported on `event` against the two variational bounds
/// `G(ν‖μ) ≥ 1/μ(B)` and `D(ν‖μ) ≥ −log2 μ(B)`, both attained at `μ(·|B)`.
pub fn sample_variational_identity(
    mu: &Dist,
    event: &EventSet,
    trials: usize,
    seed: u64,
) -> Result<VariationalReport> {
    if event.size() != mu.size() {
        return invalid("event and measure live on different alphabets");
    }
    let mass = mu.mass(event);
    if mass.is_nan() || mass <= 0.0 {
        return invalid("event has zero probability");
    }
    let restriction = conditional_restriction(mu, event, mu)?;
    let g_bound = 1.0 / mass;
    let d_bound = -mass.log2();
    let g_at_restriction = g_functional(&restriction, mu)?.value();
    let d_at_restriction = kl_divergence(&restriction, mu)?.value();

    let members: Vec<usize> = event.iter().collect();
    let mut rng = rng::stream(seed, 0);
    let mut worst_g_margin = f64::INFINITY;
    let mut worst_d_margin = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..trials {
        let weights: Vec<f64> = members.iter().map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = weights.iter().sum();
        let mut probs = vec![0.0; mu.size()];
        for (&i, w) in members.iter().zip(&weights) {
            probs[i] = w / total;
        }
        let nu = Dist::built(probs)?;
        let g = g_functional(&nu, mu)?.value() - g_bound;
        let d = kl_divergence(&nu, mu)?.value() - d_bound;
        if g < -1e-9 || d < -1e-9 {
            violations += 1;
        }
        worst_g_margin = worst_g_margin.min(g);
        worst_d_margin = worst_d_margin.min(d);
    }
    Ok(VariationalReport {
        trials,
        g_bound,
        d_bound,
        g_at_restriction,
        d_at_restriction,
        worst_g_margin,
        worst_d_margin,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeVerdict {
    AllHold,
    CounterexampleFound,
    Inconclusive,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeVerdict::AllHold => "all_hold",
            ProbeVerdict::CounterexampleFound => "counterexample_found",
            ProbeVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Two B-codes whose union of correct sets no B-code of the summed size
/// reproduces exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub c1: BCode,
    pub c2: BCode,
    pub union: CorrectSet,
    pub size_bound: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub instances_checked: usize,
    pub counterexample: Option<Counterexample>,
    pub verdict: ProbeVerdict,
}

/// Largest alphabet the subadditivity probe handles exhaustively.
pub const PROBE_MAX_X1: usize = 4;
pub const PROBE_MAX_X2: usize = 3;
/// Largest code size enumerated for the probe.
pub const PROBE_MAX_SIZE: usize = 2;

/// Every B-code of size `size` over `alphabet` (raw tables).
fn all_b_codes(alphabet: &PairAlphabet, size: usize) -> Vec<BCode> {
    let x1n = alphabet.x1_size;
    let dec_len = size * alphabet.x2_size;
    let mut out = Vec::new();
    let mut enc = vec![0; x1n];
    let mut dec = vec![0; dec_len];
    for e in 0..pow(size, x1n) {
        digits_of(e, size, &mut enc);
        for d in 0..pow(x1n, dec_len) {
            digits_of(d, x1n, &mut dec);
            out.push(BCode::new(*alphabet, size, enc.clone(), dec.clone()).expect("tables in range"));
        }
    }
    out
}

/// A B-code of size `size` whose correct set is exactly `target`, if any.
///
/// With binning `f` and `U_y = {x : (x, y) ∈ target}`, the code must
/// reproduce the single member of `U_y` in each bin and output something
/// outside the bin when the bin meets `U_y` in nothing; the latter fails
/// only for a bin holding all of `X1`.
pub fn realize_correct_set(target: &CorrectSet, size: usize) -> Option<BCode> {
    let ab = target.alphabet;
    let x2n = ab.x2_size;
    'partitions: for f in Partitions::new(ab.x1_size, size.min(ab.x1_size)) {
        let mut decoder = vec![0; size * x2n];
        for m in 0..size {
            let bin: Vec<usize> = (0..ab.x1_size).filter(|&x| f[x] == m).collect();
            for y in 0..x2n {
                let hits: Vec<usize> = bin.iter().copied().filter(|&x| target.contains(x, y)).collect();
                decoder[m * x2n + y] = match hits.as_slice() {
                    [x] => *x,
                    [] => match (0..ab.x1_size).find(|&x| f[x] != m) {
                        Some(x) => x,
                        None => continue 'partitions,
                    },
                    _ => continue 'partitions,
                };
            }
        }
        let code = BCode::new(ab, size, f, decoder).expect("tables in range");
        debug_assert_eq!(correct_set(&code, &ab).ok().as_ref(), Some(target));
        return Some(code);
    }
    None
}

/// Searches pairs of B-codes of size at most [`PROBE_MAX_SIZE`] for one
/// whose union of correct sets no single B-code of the summed size
/// reproduces. All distinct pairs are checked when there are at most
/// `trials` of them; otherwise `trials` seeded random pairs.
pub fn b_subadditivity_probe(alphabet: &PairAlphabet, trials: usize, seed: u64) -> Result<ProbeReport> {
    if alphabet.x1_size > PROBE_MAX_X1 || alphabet.x2_size > PROBE_MAX_X2 {
        return Ok(ProbeReport {
            instances_checked: 0,
            counterexample: None,
            verdict: ProbeVerdict::Inconclusive,
        });
    }
    // one representative per distinct (size, correct set)
    let mut distinct: Vec<(BCode, CorrectSet)> = Vec::new();
    let mut seen: HashMap<(usize, CorrectSet), ()> = HashMap::new();
    for size in 1..=PROBE_MAX_SIZE {
        for code in all_b_codes(alphabet, size) {
            let t = correct_set(&code, alphabet)?;
            if seen.insert((size, t.clone()), ()).is_none() {
                distinct.push((code, t));
            }
        }
    }
    let n = distinct.len();
    let all_pairs = n * (n + 1) / 2;
    let pairs: Vec<(usize, usize)> = if all_pairs <= trials {
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
    } else {
        let mut rng = rng::stream(seed, 0);
        (0..trials)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect()
    };

    let mut cache: HashMap<(CorrectSet, usize), bool> = HashMap::new();
    let mut checked = 0;
    for (i, j) in pairs {
        let (c1, t1) = &distinct[i];
        let (c2, t2) = &distinct[j];
        let union = t1.union(t2);
        let bound = c1.size() + c2.size();
        checked += 1;
        let ok = *cache
            .entry((union.clone(), bound))
            .or_insert_with(|| realize_correct_set(&union, bound).is_some());
        if !ok {
            return Ok(ProbeReport {
                instances_checked: checked,
                counterexample: Some(Counterexample {
                    c1: c1.clone(),
                    c2: c2.clone(),
                    union,
                    size_bound: bound,
                }),
                verdict: ProbeVerdict::CounterexampleFound,
            });
        }
    }
    Ok(ProbeReport {
        instances_checked: checked,
        counterexample: None,
        verdict: ProbeVerdict::AllHold,
    })
}
