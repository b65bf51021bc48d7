//! Reliability functions and limiting error for single-letter sources.
//!
//! For an i.i.d. source `P` over `X1 × X2` the high-rate exponent is
//! `min { D(Q‖P) : H_Q(X1|X2) ≥ R }` and the low-rate exponent is
//! `min { D(Q‖P) : H_Q(X1|X2) ≤ R }`, both over joint types `Q`. The
//! minimization runs a dense simplex grid followed by a pattern search that
//! walks the constraint surface: every candidate is pulled back along the
//! segment towards `P` until the constraint is tight. `H_Q` is concave, so
//! on such a segment the feasible part is a single interval ending at the
//! candidate and the pull-back never increases the divergence.

use rayon::prelude::*;

use crate::codes::{optimal_a_error, PairAlphabet};
use crate::error::{invalid, over_cap, Result};
use crate::measures::{cond_entropy_slice, conditional_entropy, Dist, ExtReal, MAX_OUTCOMES};

/// Largest number of grid points a single minimization will visit.
pub const MAX_GRID_POINTS: u128 = 50_000_000;

/// Smallest pattern-search step.
const MIN_STEP: f64 = 1e-7;
const FEAS_TOL: f64 = 1e-14;
const BISECTION_ROUNDS: usize = 60;
const MAX_EVALUATIONS: usize = 2_000_000;

/// Distance from a component entropy inside which the mixture prediction is
/// undefined.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Source model generating block joints for any blocklength.
#[derive(Debug, Clone, PartialEq)]
pub enum SingleLetterModel {
    Iid {
        p: Dist,
        alphabet: PairAlphabet,
    },
    Mixture {
        alpha: f64,
        p1: Dist,
        p2: Dist,
        alphabet: PairAlphabet,
    },
}

impl SingleLetterModel {
    pub fn iid(p: Dist, alphabet: PairAlphabet) -> Result<Self> {
        alphabet.check_joint(&p)?;
        Ok(SingleLetterModel::Iid { p, alphabet })
    }

    pub fn mixture(alpha: f64, p1: Dist, p2: Dist, alphabet: PairAlphabet) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("mixture weight {alpha} must lie in (0, 1)"));
        }
        alphabet.check_joint(&p1)?;
        alphabet.check_joint(&p2)?;
        Ok(SingleLetterModel::Mixture {
            alpha,
            p1,
            p2,
            alphabet,
        })
    }

    /// Doubly symmetric binary source: uniform `X1`, `X2 = X1` flipped with
    /// probability `crossover`.
    pub fn dsbs(crossover: f64) -> Result<Self> {
        Self::iid(dsbs_joint(crossover)?, PairAlphabet::new(2, 2)?)
    }

    pub fn alphabet(&self) -> PairAlphabet {
        match self {
            SingleLetterModel::Iid { alphabet, .. } | SingleLetterModel::Mixture { alphabet, .. } => {
                *alphabet
            }
        }
    }

    /// Single-letter `H(X1|X2)` of each component.
    pub fn conditional_entropies(&self) -> Vec<f64> {
        let ab = self.alphabet();
        let h = |p: &Dist| cond_entropy_slice(p.probs(), ab.x1_size, ab.x2_size);
        match self {
            SingleLetterModel::Iid { p, .. } => vec![h(p)],
            SingleLetterModel::Mixture { p1, p2, .. } => vec![h(p1), h(p2)],
        }
    }

    /// Block joint at blocklength `n` over `X1^n × X2^n`, indexed
    /// `X1_block * |X2|^n + X2_block`.
    pub fn block_joint(&self, n: usize) -> Result<(Dist, PairAlphabet)> {
        let ab = self.alphabet();
        let block = block_alphabet(&ab, n)?;
        let probs = match self {
            SingleLetterModel::Iid { p, .. } => block_product(p, &ab, n),
            SingleLetterModel::Mixture { alpha, p1, p2, .. } => {
                let a = block_product(p1, &ab, n);
                let b = block_product(p2, &ab, n);
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| alpha * x + (1.0 - alpha) * y)
                    .collect()
            }
        };
        Ok((Dist::built(probs)?, block))
    }
}

/// Joint table of DSBS(`crossover`) over the 2×2 pair alphabet.
pub fn dsbs_joint(crossover: f64) -> Result<Dist> {
    if !(0.0..=1.0).contains(&crossover) {
        return invalid(format!("crossover {crossover} outside [0, 1]"));
    }
    let same = 0.5 * (1.0 - crossover);
    let flip = 0.5 * crossover;
    Dist::new(vec![same, flip, flip, same])
}

fn block_alphabet(ab: &PairAlphabet, n: usize) -> Result<PairAlphabet> {
    if n == 0 {
        return invalid("blocklength must be positive");
    }
    let pair = ab.total() as u128;
    let total = (0..n).fold(1u128, |acc, _| acc.saturating_mul(pair));
    if total > MAX_OUTCOMES as u128 {
        return over_cap(format!(
            "{pair}^{n} block pairs exceed the dense cap of {MAX_OUTCOMES}"
        ));
    }
    PairAlphabet::new(ab.x1_size.pow(n as u32), ab.x2_size.pow(n as u32))
}

fn block_product(p: &Dist, ab: &PairAlphabet, n: usize) -> Vec<f64> {
    let (x1, x2) = (ab.x1_size, ab.x2_size);
    let mut cur = vec![1.0];
    let (mut b1, mut b2) = (1usize, 1usize);
    for _ in 0..n {
        let (nb1, nb2) = (b1 * x1, b2 * x2);
        let mut next = vec![0.0; nb1 * nb2];
        for u in 0..b1 {
            for v in 0..b2 {
                let w = cur[u * b2 + v];
                for a in 0..x1 {
                    let row = (u * x1 + a) * nb2 + v * x2;
                    for b in 0..x2 {
                        next[row + b] = w * p.get(a * x2 + b);
                    }
                }
            }
        }
        cur = next;
        b1 = nb1;
        b2 = nb2;
    }
    cur
}

/// Which side of the rate the conditional entropy must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// `H_Q(X1|X2) ≥ R`: decay of the error probability.
    HighRate,
    /// `H_Q(X1|X2) ≤ R`: decay of the probability of correct decoding.
    LowRate,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::HighRate => "high_rate",
            CurveKind::LowRate => "low_rate",
        }
    }
}

/// Optimal value and the joint type attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSolution {
    pub value: ExtReal,
    pub minimizer: Option<Dist>,
}

struct Problem<'a> {
    p: &'a [f64],
    ab: PairAlphabet,
    rate: f64,
    kind: CurveKind,
}

impl Problem<'_> {
    fn entropy(&self, q: &[f64]) -> f64 {
        cond_entropy_slice(q, self.ab.x1_size, self.ab.x2_size)
    }

    fn feasible(&self, q: &[f64]) -> bool {
        let h = self.entropy(q);
        match self.kind {
            CurveKind::HighRate => h >= self.rate - FEAS_TOL,
            CurveKind::LowRate => h <= self.rate + FEAS_TOL,
        }
    }

    /// `D(q‖p)` for `q` supported inside the support of `p`.
    fn divergence(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(self.p)
            .filter(|(a, _)| **a > 0.0)
            .map(|(a, b)| a * (a / b).log2())
            .sum::<f64>()
            .max(0.0)
    }

    /// Closest feasible point to `p` on the segment from `p` to feasible `q`.
    fn pull_back(&self, q: &[f64]) -> Vec<f64> {
        let at = |s: f64| -> Vec<f64> {
            self.p
                .iter()
                .zip(q)
                .map(|(a, b)| (a + s * (b - a)).max(0.0))
                .collect()
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTION_ROUNDS {
            let mid = 0.5 * (lo + hi);
            if self.feasible(&at(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        at(hi)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Lowest-divergence feasible grid point over the support coordinates.
fn grid_search(prob: &Problem<'_>, support: &[usize], steps: usize) -> Option<(f64, Vec<f64>)> {
    let k = support.len();
    let full = prob.p.len();
    let scan = |first: usize| -> Option<(f64, Vec<f64>)> {
        let mut counts = vec![0usize; k];
        counts[0] = first;
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut q = vec![0.0; full];
        let mut visit = |counts: &[usize]| {
            for (c, &i) in counts.iter().zip(support) {
                q[i] = *c as f64 / steps as f64;
            }
            if prob.feasible(&q) {
                let d = prob.divergence(&q);
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, q.clone()));
                }
            }
        };
        compositions(&mut counts, 1, steps - first, &mut visit);
        best
    };
    let per_first: Vec<Option<(f64, Vec<f64>)>> = (0..=steps).into_par_iter().map(scan).collect();
    per_first
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, Vec<f64>)>, cand| match acc {
            Some(a) if a.0 <= cand.0 => Some(a),
            _ => Some(cand),
        })
}

/// Visits every way of writing `remaining` as an ordered sum over
/// `counts[pos..]`.
fn compositions(counts: &mut [usize], pos: usize, remaining: usize, visit: &mut impl FnMut(&[usize])) {
    if pos + 1 >= counts.len() {
        if pos < counts.len() {
            counts[pos] = remaining;
            visit(counts);
        } else if remaining == 0 {
            visit(counts);
        }
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        compositions(counts, pos + 1, remaining - c, visit);
    }
}

/// Feasible starting points that the grid may miss.
fn anchor_points(prob: &Problem<'_>) -> Vec<Vec<f64>> {
    let ab = prob.ab;
    let p = prob.p;
    let col_mass = |y: usize| (0..ab.x1_size).map(|x| p[ab.index(x, y)]).sum::<f64>();
    let col_support = |y: usize| {
        (0..ab.x1_size)
            .filter(|&x| p[ab.index(x, y)] > 0.0)
            .collect::<Vec<_>>()
    };
    let mut anchors = Vec::new();
    match prob.kind {
        CurveKind::HighRate => {
            // conditionally uniform on the support, marginal of p
            let mut q = vec![0.0; p.len()];
            for y in 0..ab.x2_size {
                let s = col_support(y);
                for &x in &s {
                    q[ab.index(x, y)] = col_mass(y) / s.len() as f64;
                }
            }
            anchors.push(q);
            // all mass on the column with the widest support
            if let Some(y) = (0..ab.x2_size).max_by_key(|&y| (col_support(y).len(), usize::MAX - y)) {
                let s = col_support(y);
                let mut q = vec![0.0; p.len()];
                for &x in &s {
                    q[ab.index(x, y)] = 1.0 / s.len() as f64;
                }
                anchors.push(q);
            }
        }
        CurveKind::LowRate => {
            // most probable x1 per column, marginal of p
            let mut q = vec![0.0; p.len()];
            for y in 0..ab.x2_size {
                if let Some(x) = (0..ab.x1_size)
                    .filter(|&x| p[ab.index(x, y)] > 0.0)
                    .max_by(|&a, &b| p[ab.index(a, y)].total_cmp(&p[ab.index(b, y)]).then(b.cmp(&a)))
                {
                    q[ab.index(x, y)] = col_mass(y);
                }
            }
            anchors.push(q);
        }
    }
    anchors
}

#[derive(Debug, Clone, Copy)]
enum Move {
    /// shift mass from pair `from` to pair `to` in the same column
    Within { from: usize, to: usize },
    /// shift column mass from `from` to `to`, keeping both conditionals
    Across { from: usize, to: usize },
}

fn moves(prob: &Problem<'_>) -> Vec<Move> {
    let ab = prob.ab;
    let p = prob.p;
    let mut out = Vec::new();
    let live: Vec<usize> = (0..ab.x2_size)
        .filter(|&y| (0..ab.x1_size).any(|x| p[ab.index(x, y)] > 0.0))
        .collect();
    for &y in &live {
        let s: Vec<usize> = (0..ab.x1_size)
            .filter(|&x| p[ab.index(x, y)] > 0.0)
            .map(|x| ab.index(x, y))
            .collect();
        for &a in &s {
            for &b in &s {
                if a != b {
                    out.push(Move::Within { from: a, to: b });
                }
            }
        }
    }
    for &a in &live {
        for &b in &live {
            if a != b {
                out.push(Move::Across { from: a, to: b });
            }
        }
    }
    out
}

fn apply(prob: &Problem<'_>, q: &[f64], mv: Move, step: f64) -> Option<Vec<f64>> {
    let ab = prob.ab;
    let mut next = q.to_vec();
    match mv {
        Move::Within { from, to } => {
            let amount = step.min(q[from]);
            if amount <= 0.0 {
                return None;
            }
            next[from] -= amount;
            next[to] += amount;
        }
        Move::Across { from, to } => {
            let column = |y: usize| -> Vec<f64> {
                let v: Vec<f64> = (0..ab.x1_size).map(|x| q[ab.index(x, y)]).collect();
                let total: f64 = v.iter().sum();
                if total > 0.0 {
                    v.iter().map(|a| a / total).collect()
                } else {
                    let w: Vec<f64> = (0..ab.x1_size).map(|x| prob.p[ab.index(x, y)]).collect();
                    let t: f64 = w.iter().sum();
                    w.iter().map(|a| a / t).collect()
                }
            };
            let source_mass: f64 = (0..ab.x1_size).map(|x| q[ab.index(x, from)]).sum();
            let amount = step.min(source_mass);
            if amount <= 0.0 {
                return None;
            }
            let (cf, ct) = (column(from), column(to));
            for x in 0..ab.x1_size {
                next[ab.index(x, from)] = (next[ab.index(x, from)] - amount * cf[x]).max(0.0);
                next[ab.index(x, to)] += amount * ct[x];
            }
        }
    }
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|v| *v /= total);
    Some(next)
}

/// Pattern search along the constraint surface, halving the step down to
/// [`MIN_STEP`].
fn refine(prob: &Problem<'_>, start: Vec<f64>, first_step: f64) -> (f64, Vec<f64>) {
    let mut current = prob.pull_back(&start);
    let mut value = prob.divergence(&current);
    let candidates = moves(prob);
    let mut step = first_step;
    let mut evaluations = 0;
    while step >= MIN_STEP && evaluations < MAX_EVALUATIONS {
        let mut improved = false;
        for &mv in &candidates {
            let Some(next) = apply(prob, &current, mv, step) else {
                continue;
            };
            evaluations += 1;
            if !prob.feasible(&next) {
                continue;
            }
            let pulled = prob.pull_back(&next);
            let d = prob.divergence(&pulled);
            if d < value - 1e-15 {
                value = d;
                current = pulled;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, current)
}

fn check_rate(ab: &PairAlphabet, rate: f64, grid_step: f64) -> Result<()> {
    let max = (ab.x1_size as f64).log2();
    if !(rate >= 0.0 && rate <= max + FEAS_TOL) {
        return invalid(format!("rate {rate} outside [0, {max}]"));
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return invalid(format!("grid step {grid_step} outside (0, 0.1]"));
    }
    Ok(())
}

/// Minimizes `D(Q‖P)` subject to the rate constraint of `kind`.
pub fn solve_rate_problem(
    model: &SingleLetterModel,
    rate: f64,
    grid_step: f64,
    kind: CurveKind,
) -> Result<RateSolution> {
    let SingleLetterModel::Iid { p, alphabet } = model else {
        return invalid("reliability functions are computed for i.i.d. models only");
    };
    check_rate(alphabet, rate, grid_step)?;
    let prob = Problem {
        p: p.probs(),
        ab: *alphabet,
        rate,
        kind,
    };
    if prob.feasible(p.probs()) {
        return Ok(RateSolution {
            value: ExtReal::ZERO,
            minimizer: Some(p.clone()),
        });
    }
    let support: Vec<usize> = (0..p.size()).filter(|&i| p.get(i) > 0.0).collect();
    let steps = (1.0 / grid_step).round() as usize;
    let points = binomial((steps + support.len() - 1) as u128, (support.len() - 1) as u128);
    if points > MAX_GRID_POINTS {
        return over_cap(format!(
            "{points} grid points exceed the cap of {MAX_GRID_POINTS}; use a coarser grid step"
        ));
    }
    let mut best = grid_search(&prob, &support, steps);
    for anchor in anchor_points(&prob) {
        if prob.feasible(&anchor) {
            let d = prob.divergence(&anchor);
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, anchor));
            }
        }
    }
    let Some((_, start)) = best else {
        return Ok(RateSolution {
            value: ExtReal::INFINITY,
            minimizer: None,
        });
    };
    let (value, q) = refine(&prob, start, grid_step);
    Ok(RateSolution {
        value: ExtReal::finite(value),
        minimizer: Some(Dist::built(q)?),
    })
}

/// `min { D(Q‖P) : H_Q(X1|X2) ≥ R }`.
pub fn rho_high_rate(model: &SingleLetterModel, rate: f64, grid_step: f64) -> Result<ExtReal> {
    Ok(solve_rate_problem(model, rate, grid_step, CurveKind::HighRate)?.value)
}

/// `min { D(Q‖P) : H_Q(X1|X2) ≤ R }`.
pub fn rho_low_rate(model: &SingleLetterModel, rate: f64, grid_step: f64) -> Result<ExtReal> {
    Ok(solve_rate_problem(model, rate, grid_step, CurveKind::LowRate)?.value)
}

/// Sampled exponent curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCurve {
    pub kind: CurveKind,
    pub points: Vec<(f64, ExtReal)>,
    /// Indices of points next to a detected jump, where the variational
    /// formula need not equal the operational exponent.
    pub flagged: Vec<usize>,
}

/// Evaluates one exponent over strictly increasing rates.
pub fn exponent_curve(
    model: &SingleLetterModel,
    rates: &[f64],
    grid_step: f64,
    kind: CurveKind,
) -> Result<ExponentCurve> {
    if rates.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("rates must be strictly increasing");
    }
    let values: Vec<ExtReal> = rates
        .par_iter()
        .map(|&r| solve_rate_problem(model, r, grid_step, kind).map(|s| s.value))
        .collect::<Result<_>>()?;
    let mut flagged = Vec::new();
    for i in 1..values.len() {
        if values[i - 1].is_infinite() != values[i].is_infinite() {
            flagged.extend([i - 1, i]);
        }
    }
    flagged.dedup();
    Ok(ExponentCurve {
        kind,
        points: rates.iter().copied().zip(values).collect(),
        flagged,
    })
}

/// Limiting error of the optimal A-code at rate `rate` for a two-component
/// mixture: one minus the weight of components whose conditional entropy is
/// below the rate.
pub fn predicted_eps_mixed(model: &SingleLetterModel, rate: f64) -> Result<f64> {
    let SingleLetterModel::Mixture { alpha, .. } = model else {
        return invalid("mixed-source prediction needs a mixture model");
    };
    let h = model.conditional_entropies();
    if h.iter().any(|hi| (rate - hi).abs() < BOUNDARY_TOL) {
        return invalid(format!(
            "rate {rate} sits on a component conditional entropy {h:?}"
        ));
    }
    let weights = [*alpha, 1.0 - alpha];
    let below: f64 = h
        .iter()
        .zip(weights)
        .filter(|(hi, _)| **hi < rate)
        .map(|(_, w)| w)
        .sum();
    Ok(if below == 0.0 {
        1.0
    } else if below == 1.0 {
        0.0
    } else {
        1.0 - below
    })
}

/// One blocklength of an empirical exponent sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    /// Code size `⌈2^{nR}⌉`.
    pub size: usize,
    pub e_a: f64,
    /// `−(1/n) log2 e_A`, infinite when `e_A = 0`.
    pub exponent: ExtReal,
}

/// Code size `⌈2^{nR}⌉`, saturating at `usize::MAX`.
pub fn code_size(n: usize, rate: f64) -> usize {
    let m = (2f64.powf(n as f64 * rate) - 1e-9).ceil().max(1.0);
    if m >= usize::MAX as f64 {
        usize::MAX
    } else {
        m as usize
    }
}

/// `e_A(⌈2^{nR}⌉)` and its exponent for each blocklength.
pub fn empirical_exponent_sweep(
    model: &SingleLetterModel,
    rate: f64,
    n_values: &[usize],
) -> Result<Vec<SweepPoint>> {
    if rate.is_nan() || rate < 0.0 {
        return invalid(format!("rate {rate} must be nonnegative"));
    }
    n_values
        .iter()
        .map(|&n| {
            let (joint, ab) = model.block_joint(n)?;
            let size = code_size(n, rate);
            let e_a = optimal_a_error(&joint, &ab, size.min(ab.x1_size))?;
            let exponent = if e_a > 0.0 {
                ExtReal::finite((-e_a.log2() / n as f64).max(0.0))
            } else {
                ExtReal::INFINITY
            };
            Ok(SweepPoint { n, size, e_a, exponent })
        })
        .collect()
}

/// `H_P(X1|X2)` of an i.i.d. model.
pub fn source_entropy(model: &SingleLetterModel) -> Result<f64> {
    match model {
        SingleLetterModel::Iid { p, alphabet } => {
            conditional_entropy(p, alphabet.x1_size, alphabet.x2_size)
        }
        _ => invalid("single conditional entropy requested for a mixture"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{iid_extension, kl_divergence, pair_block_layout};

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn block_joint_matches_reordered_product() {
        let p = Dist::new(vec![0.1, 0.2, 0.3, 0.15, 0.05, 0.2]).unwrap();
        let ab = PairAlphabet::new(3, 2).unwrap();
        let model = SingleLetterModel::iid(p.clone(), ab).unwrap();
        let (joint, block) = model.block_joint(3).unwrap();
        assert_eq!(block, PairAlphabet::new(27, 8).unwrap());
        let want = pair_block_layout(&iid_extension(&p, 3).unwrap(), 3, 2, 3).unwrap();
        assert!(joint.approx_eq(&want, 1e-15));
        assert!(model.block_joint(13).is_err());
    }

    #[test]
    fn dsbs_entropy() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        assert!((source_entropy(&m).unwrap() - h2(0.1)).abs() < 1e-12);
        assert!(SingleLetterModel::dsbs(1.5).is_err());
    }

    #[test]
    fn zero_below_entropy() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        let h = h2(0.1);
        assert_eq!(rho_high_rate(&m, h - 0.01, 0.05).unwrap(), ExtReal::ZERO);
        assert_eq!(rho_high_rate(&m, 0.0, 0.05).unwrap(), ExtReal::ZERO);
        assert_eq!(rho_low_rate(&m, h + 0.01, 0.05).unwrap(), ExtReal::ZERO);
        assert_eq!(rho_low_rate(&m, 1.0, 0.05).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn full_rate_forces_uniform_conditionals() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        let sol = solve_rate_problem(&m, 1.0, 0.05, CurveKind::HighRate).unwrap();
        // D(U ‖ (0.9, 0.1)) with the marginal of P
        let want = 0.5 * (0.5f64 / 0.9).log2() + 0.5 * (0.5f64 / 0.1).log2();
        assert!((sol.value.value() - want).abs() < 1e-6, "{}", sol.value);
        assert!((want - 0.737).abs() < 1e-3);
    }

    #[test]
    fn zero_rate_low_exponent_is_best_deterministic_guess() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        let v = rho_low_rate(&m, 0.0, 0.05).unwrap().value();
        assert!((v + 0.9f64.log2()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn minimizer_certificate() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        let SingleLetterModel::Iid { p, .. } = &m else { unreachable!() };
        let sol = solve_rate_problem(&m, 0.8, 0.02, CurveKind::HighRate).unwrap();
        let q = sol.minimizer.unwrap();
        let h = conditional_entropy(&q, 2, 2).unwrap();
        assert!((h - 0.8).abs() < 1e-6);
        let d = kl_divergence(&q, p).unwrap().value();
        assert!((d - sol.value.value()).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        assert!(rho_high_rate(&m, 1.5, 0.05).is_err());
        assert!(rho_high_rate(&m, -0.1, 0.05).is_err());
        assert!(rho_high_rate(&m, 0.5, 0.2).is_err());
        assert!(rho_high_rate(&m, 0.5, 0.0).is_err());
        let mix = mixture(0.5);
        assert!(rho_high_rate(&mix, 0.5, 0.05).is_err());
    }

    #[test]
    fn unreachable_rate_is_infinite() {
        // x1 is a function of x2 on the support: no joint type on it has
        // positive conditional entropy
        let p = Dist::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let m = SingleLetterModel::iid(p, PairAlphabet::new(2, 2).unwrap()).unwrap();
        assert!(rho_high_rate(&m, 0.5, 0.05).unwrap().is_infinite());
    }

    fn mixture(alpha: f64) -> SingleLetterModel {
        SingleLetterModel::mixture(
            alpha,
            dsbs_joint(0.02).unwrap(),
            dsbs_joint(0.35).unwrap(),
            PairAlphabet::new(2, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn mixed_prediction_cases() {
        let m = mixture(0.3);
        assert_eq!(predicted_eps_mixed(&m, 0.95).unwrap(), 0.0);
        assert_eq!(predicted_eps_mixed(&m, 0.1).unwrap(), 1.0);
        // the low-entropy component carries weight 0.3
        assert_eq!(predicted_eps_mixed(&m, 0.5).unwrap(), 0.7);
        assert!(predicted_eps_mixed(&m, h2(0.02)).is_err());
        assert!(predicted_eps_mixed(&SingleLetterModel::dsbs(0.1).unwrap(), 0.5).is_err());
        assert!(SingleLetterModel::mixture(1.0, dsbs_joint(0.1).unwrap(), dsbs_joint(0.2).unwrap(), PairAlphabet::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn code_sizes() {
        assert_eq!(code_size(12, 0.5), 64);
        assert_eq!(code_size(5, 0.8), 16);
        assert_eq!(code_size(12, 0.8), 777);
        assert_eq!(code_size(3, 0.0), 1);
    }

    #[test]
    fn full_rate_sweep_has_no_errors() {
        let m = SingleLetterModel::dsbs(0.1).unwrap();
        let pts = empirical_exponent_sweep(&m, 1.0, &[1, 2, 3]).unwrap();
        assert!(pts.iter().all(|p| p.e_a == 0.0 && p.exponent.is_infinite()));
    }

    #[test]
    fn curve_flags_transitions_to_infinity() {
        let p = Dist::new(vec![0.4, 0.1, 0.0, 0.5]).unwrap();
        let m = SingleLetterModel::iid(p, PairAlphabet::new(2, 2).unwrap()).unwrap();
        // support allows H up to 1 bit only through column x2 = 0
        let curve = exponent_curve(&m, &[0.2, 0.6, 1.0], 0.05, CurveKind::HighRate).unwrap();
        assert!(curve.points.iter().all(|(_, v)| !v.is_infinite()));
        assert!(curve.flagged.is_empty());
        assert!(exponent_curve(&m, &[0.5, 0.2], 0.05, CurveKind::HighRate).is_err());

        let copy = Dist::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let m = SingleLetterModel::iid(copy, PairAlphabet::new(2, 2).unwrap()).unwrap();
        let curve = exponent_curve(&m, &[0.0, 0.5, 0.9], 0.05, CurveKind::HighRate).unwrap();
        assert_eq!(curve.points[0].1, ExtReal::ZERO);
        assert!(curve.points[2].1.is_infinite());
        assert_eq!(curve.flagged, vec![0, 1]);
    }
}
