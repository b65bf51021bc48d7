//! Finite probability measures and the divergence functionals built on them.
//!
//! A [`Dist`] is a dense mass table over an integer-indexed alphabet. Block
//! alphabets are indexed lexicographically with the first symbol most
//! significant. Divergences that fail absolute continuity are reported as an
//! explicit infinite [`ExtReal`], never as NaN.

use std::fmt;

use crate::error::{invalid, over_cap, Result};

/// Largest table any routine will materialize.
pub const MAX_OUTCOMES: usize = 1 << 24;

/// Sum tolerance for user-supplied tables.
pub const SUM_TOL: f64 = 1e-12;

/// Sum tolerance for tables assembled from long products and sums.
const BUILT_SUM_TOL: f64 = 1e-9;

/// Entrywise tolerance used to decide that a measure equals the fallback.
const SAME_MEASURE_TOL: f64 = 1e-12;

/// Nonnegative extended real: a finite value or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Wraps a finite value. Panics on NaN or infinities; use
    /// [`ExtReal::INFINITY`] for the latter.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "ExtReal::finite called with {value}");
        ExtReal(value)
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The value as an `f64` (`f64::INFINITY` for `+∞`).
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn finite_value(self) -> Option<f64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Finite probability mass function.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    probs: Vec<f64>,
}

impl Dist {
    /// Validates nonnegativity and a unit sum within [`SUM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, SUM_TOL)
    }

    pub(crate) fn built(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, BUILT_SUM_TOL)
    }

    fn with_tolerance(probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return invalid("distribution must have at least one outcome");
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return invalid(format!("probability {i} is {p}, expected a finite value >= 0"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return invalid(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(Dist { probs })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return invalid("uniform distribution over an empty alphabet");
        }
        Ok(Dist {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point(size: usize, outcome: usize) -> Result<Self> {
        if outcome >= size {
            return invalid(format!("outcome {outcome} outside alphabet of size {size}"));
        }
        let mut probs = vec![0.0; size];
        probs[outcome] = 1.0;
        Ok(Dist { probs })
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    /// Probability of an event. The event must live on this alphabet.
    pub fn mass(&self, event: &EventSet) -> f64 {
        debug_assert_eq!(event.size(), self.size());
        event.iter().map(|i| self.probs[i]).sum()
    }

    pub fn support(&self) -> EventSet {
        EventSet::from_predicate(self.size(), |i| self.probs[i] > 0.0)
    }

    /// Entrywise comparison within an absolute tolerance.
    pub fn approx_eq(&self, other: &Dist, tol: f64) -> bool {
        self.size() == other.size()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Same measure on an alphabet extended by one zero-mass outcome, used
    /// when a sample space must strictly contain the coded alphabet.
    pub fn with_padding(&self) -> Dist {
        let mut probs = self.probs.clone();
        probs.push(0.0);
        Dist { probs }
    }
}

/// Subset of `{0, …, size-1}` stored as a bit mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventSet {
    size: usize,
    words: Vec<u64>,
}

impl EventSet {
    pub fn empty(size: usize) -> Self {
        EventSet {
            size,
            words: vec![0; size.div_ceil(64)],
        }
    }

    pub fn full(size: usize) -> Self {
        Self::from_predicate(size, |_| true)
    }

    pub fn from_predicate(size: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut set = Self::empty(size);
        for i in 0..size {
            if pred(i) {
                set.insert(i);
            }
        }
        set
    }

    pub fn from_indices(size: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(size);
        for i in indices {
            if i >= size {
                return invalid(format!("outcome {i} outside alphabet of size {size}"));
            }
            set.insert(i);
        }
        Ok(set)
    }

    /// Event from the low `size` bits of `mask` (`size <= 64`).
    pub fn from_mask(size: usize, mask: u64) -> Self {
        assert!(size <= 64);
        let keep = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
        let mut set = Self::empty(size);
        if size > 0 {
            set.words[0] = mask & keep;
        }
        set
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.size && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.size, "outcome {i} outside alphabet of size {}", self.size);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    fn zip_words(&self, other: &EventSet, op: impl Fn(u64, u64) -> u64) -> EventSet {
        assert_eq!(self.size, other.size, "event sets over different alphabets");
        EventSet {
            size: self.size,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn complement(&self) -> EventSet {
        let full = Self::full(self.size);
        self.zip_words(&full, |a, b| !a & b)
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.intersection(other) == *self
    }
}

fn check_sizes(a: &Dist, b: &Dist) -> Result<()> {
    if a.size() != b.size() {
        return invalid(format!(
            "alphabet sizes differ: {} vs {}",
            a.size(),
            b.size()
        ));
    }
    Ok(())
}

/// `D(ν‖μ) = Σ ν log2(ν/μ)`, infinite when ν is not absolutely continuous
/// with respect to μ.
pub fn kl_divergence(nu: &Dist, mu: &Dist) -> Result<ExtReal> {
    check_sizes(nu, mu)?;
    Ok(kl_slice(nu.probs(), mu.probs()))
}

pub(crate) fn kl_slice(nu: &[f64], mu: &[f64]) -> ExtReal {
    let mut total = 0.0;
    for (&p, &q) in nu.iter().zip(mu) {
        if p > 0.0 {
            if q <= 0.0 {
                return ExtReal::INFINITY;
            }
            total += p * (p / q).log2();
        }
    }
    ExtReal::finite(total.max(0.0))
}

/// `G(ν‖μ) = Σ ν²/μ`, the ν-expectation of the density dν/dμ. At least 1.
pub fn g_functional(nu: &Dist, mu: &Dist) -> Result<ExtReal> {
    check_sizes(nu, mu)?;
    if nu.probs() == mu.probs() {
        return Ok(ExtReal::finite(1.0));
    }
    let mut total = 0.0;
    for (&p, &q) in nu.probs().iter().zip(mu.probs()) {
        if p > 0.0 {
            if q <= 0.0 {
                return Ok(ExtReal::INFINITY);
            }
            total += p * (p / q);
        }
    }
    Ok(ExtReal::finite(total.max(1.0)))
}

/// μ conditioned on `event`; `fallback` when the event has zero mass.
pub fn conditional_restriction(mu: &Dist, event: &EventSet, fallback: &Dist) -> Result<Dist> {
    check_sizes(mu, fallback)?;
    if event.size() != mu.size() {
        return invalid(format!(
            "event over alphabet of size {} applied to measure of size {}",
            event.size(),
            mu.size()
        ));
    }
    let mass = mu.mass(event);
    if mass > 0.0 {
        let probs = (0..mu.size())
            .map(|i| if event.contains(i) { mu.get(i) / mass } else { 0.0 })
            .collect();
        Ok(Dist { probs })
    } else {
        Ok(fallback.clone())
    }
}

/// One step of the recursive tilting construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltLevel {
    pub measure: Dist,
    pub event: EventSet,
    /// `measure(event)`.
    pub mass: f64,
}

/// Record of iterated conditional restriction `ν⁰ = μ`,
/// `ν^{m+1} = ν^m(· | E_m)` with fallback `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltTrace {
    pub levels: Vec<TiltLevel>,
    pub terminal: Dist,
    pub divergence_bits: ExtReal,
    /// First level whose successor was set to the fallback measure.
    pub fallback_level: Option<usize>,
    /// Smallest `m` with `ν^m = u`, scanning `m = 0..=levels.len()`.
    pub first_fallback_equal: Option<usize>,
}

impl TiltTrace {
    /// Intersection of all events (the full alphabet when there are none).
    pub fn intersection(&self) -> EventSet {
        let size = self.terminal.size();
        self.levels
            .iter()
            .fold(EventSet::full(size), |acc, lvl| acc.intersection(&lvl.event))
    }

    /// Whether the construction equals a single restriction to the
    /// intersection. This holds whenever the number of levels does not
    /// exceed [`TiltTrace::first_fallback_equal`].
    pub fn covered_by_one_shot(&self) -> bool {
        self.first_fallback_equal
            .is_none_or(|j| self.levels.len() <= j)
    }
}

/// Iterated conditional restriction of `mu` through `events`, falling back to
/// `u` as soon as a level has zero mass on its event or already equals `u`.
pub fn recursive_tilt(mu: &Dist, u: &Dist, events: &[EventSet]) -> Result<TiltTrace> {
    check_sizes(mu, u)?;
    if let Some(e) = events.iter().find(|e| e.size() != mu.size()) {
        return invalid(format!(
            "event over alphabet of size {} applied to measure of size {}",
            e.size(),
            mu.size()
        ));
    }
    let mut current = mu.clone();
    let mut levels = Vec::with_capacity(events.len());
    let mut accumulated = 0.0;
    let mut fallback_level = None;
    let mut first_fallback_equal = None;

    for (m, event) in events.iter().enumerate() {
        let equals_u = current.approx_eq(u, SAME_MEASURE_TOL);
        if equals_u && first_fallback_equal.is_none() {
            first_fallback_equal = Some(m);
        }
        let mass = current.mass(event);
        let next = if mass > 0.0 && !equals_u {
            accumulated -= mass.log2();
            conditional_restriction(&current, event, u)?
        } else {
            fallback_level.get_or_insert(m);
            u.clone()
        };
        levels.push(TiltLevel {
            measure: std::mem::replace(&mut current, next),
            event: event.clone(),
            mass,
        });
    }
    if first_fallback_equal.is_none() && current.approx_eq(u, SAME_MEASURE_TOL) {
        first_fallback_equal = Some(events.len());
    }
    let divergence_bits = if fallback_level.is_none() {
        ExtReal::finite(accumulated.max(0.0))
    } else {
        kl_divergence(&current, mu)?
    };
    Ok(TiltTrace {
        levels,
        terminal: current,
        divergence_bits,
        fallback_level,
        first_fallback_equal,
    })
}

fn block_size(base: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return invalid("blocklength must be positive");
    }
    let mut size: usize = 1;
    for _ in 0..n {
        size = match size.checked_mul(base) {
            Some(s) if s <= MAX_OUTCOMES => s,
            _ => {
                return over_cap(format!(
                    "{base}^{n} outcomes exceeds the dense cap of {MAX_OUTCOMES}"
                ))
            }
        };
    }
    Ok(size)
}

/// n-fold product `p^n`, indexed lexicographically over symbol sequences with
/// the first symbol most significant.
pub fn iid_extension(p: &Dist, n: usize) -> Result<Dist> {
    let size = block_size(p.size(), n)?;
    let mut out = Vec::with_capacity(size);
    out.push(1.0);
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|&w| p.probs().iter().map(move |&q| w * q))
            .collect();
    }
    Dist::built(out)
}

/// `α·p1^n + (1−α)·p2^n` with `α ∈ (0, 1)`.
pub fn mixture_extension(alpha: f64, p1: &Dist, p2: &Dist, n: usize) -> Result<Dist> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("mixture weight {alpha} must lie in (0, 1)"));
    }
    check_sizes(p1, p2)?;
    let a = iid_extension(p1, n)?;
    let b = iid_extension(p2, n)?;
    let probs = a
        .probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| alpha * x + (1.0 - alpha) * y)
        .collect();
    Dist::built(probs)
}

/// `H(X1|X2)` in bits for a joint indexed as `x1 * x2_size + x2`.
pub fn conditional_entropy(q: &Dist, x1_size: usize, x2_size: usize) -> Result<f64> {
    if x1_size == 0 || x2_size == 0 || q.size() != x1_size * x2_size {
        return invalid(format!(
            "joint of size {} does not match a {x1_size}x{x2_size} pair alphabet",
            q.size()
        ));
    }
    Ok(cond_entropy_slice(q.probs(), x1_size, x2_size))
}

pub(crate) fn cond_entropy_slice(q: &[f64], x1_size: usize, x2_size: usize) -> f64 {
    let mut total = 0.0;
    for y in 0..x2_size {
        let marginal: f64 = (0..x1_size).map(|x| q[x * x2_size + y]).sum();
        if marginal <= 0.0 {
            continue;
        }
        for x in 0..x1_size {
            let p = q[x * x2_size + y];
            if p > 0.0 {
                total -= p * (p / marginal).log2();
            }
        }
    }
    total.max(0.0)
}

/// Reorders a product table over pair-symbol sequences (as produced by
/// [`iid_extension`] on a pair alphabet) into the block pair layout
/// `X1_block * x2_size^n + X2_block`.
pub fn pair_block_layout(q: &Dist, x1_size: usize, x2_size: usize, n: usize) -> Result<Dist> {
    let pair = x1_size * x2_size;
    let total = block_size(pair, n)?;
    if q.size() != total {
        return invalid(format!(
            "table of size {} is not a blocklength-{n} table over {pair} pair symbols",
            q.size()
        ));
    }
    let x2_blocks = x2_size.pow(n as u32);
    let mut out = vec![0.0; total];
    for (idx, &p) in q.probs().iter().enumerate() {
        let (mut a, mut b) = (0, 0);
        let mut rest = idx;
        let mut digits = Vec::with_capacity(n);
        for _ in 0..n {
            digits.push(rest % pair);
            rest /= pair;
        }
        for &d in digits.iter().rev() {
            a = a * x1_size + d / x2_size;
            b = b * x2_size + d % x2_size;
        }
        out[a * x2_blocks + b] = p;
    }
    Dist::built(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Dist {
        Dist::new(v.to_vec()).unwrap()
    }

    fn set(size: usize, idx: &[usize]) -> EventSet {
        EventSet::from_indices(size, idx.iter().copied()).unwrap()
    }

    #[test]
    fn dist_rejects_bad_tables() {
        assert!(Dist::new(vec![]).is_err());
        assert!(Dist::new(vec![0.5, 0.6]).is_err());
        assert!(Dist::new(vec![1.5, -0.5]).is_err());
        assert!(Dist::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Dist::new(vec![0.1, 0.2, 0.3, 0.4]).is_ok());
    }

    #[test]
    fn padding_adds_one_null_outcome() {
        let p = d(&[0.25, 0.75]).with_padding();
        assert_eq!(p.probs(), &[0.25, 0.75, 0.0]);
    }

    #[test]
    fn kl_examples() {
        let half = d(&[0.5, 0.5]);
        assert_eq!(kl_divergence(&half, &half).unwrap(), ExtReal::ZERO);
        assert_eq!(kl_divergence(&d(&[1.0, 0.0]), &half).unwrap().value(), 1.0);
        // 0.75 log2 1.5 + 0.25 log2 0.5
        let v = kl_divergence(&d(&[0.75, 0.25]), &half).unwrap().value();
        assert!((v - 0.188_721_875_540_867).abs() < 1e-12);
        assert!(kl_divergence(&half, &d(&[1.0, 0.0])).unwrap().is_infinite());
        assert!(kl_divergence(&half, &d(&[1.0])).is_err());
    }

    #[test]
    fn g_examples() {
        let half = d(&[0.5, 0.5]);
        assert_eq!(g_functional(&half, &half).unwrap().value(), 1.0);
        assert_eq!(g_functional(&d(&[1.0, 0.0]), &half).unwrap().value(), 2.0);
        let v = g_functional(&d(&[0.75, 0.25]), &half).unwrap().value();
        assert!((v - 1.25).abs() < 1e-15);
        assert!(g_functional(&half, &d(&[0.0, 1.0])).unwrap().is_infinite());
    }

    #[test]
    fn restriction_examples() {
        let u4 = Dist::uniform(4).unwrap();
        let r = conditional_restriction(&u4, &set(4, &[0, 1]), &u4).unwrap();
        assert_eq!(r.probs(), &[0.5, 0.5, 0.0, 0.0]);

        let mu = d(&[0.1, 0.2, 0.3, 0.4]);
        let r = conditional_restriction(&mu, &set(4, &[1, 3]), &u4).unwrap();
        assert!(r.approx_eq(&d(&[0.0, 1.0 / 3.0, 0.0, 2.0 / 3.0]), 1e-12));

        let fb = d(&[0.0, 1.0]);
        let r = conditional_restriction(&d(&[1.0, 0.0]), &set(2, &[1]), &fb).unwrap();
        assert_eq!(r, fb);
    }

    #[test]
    fn tilt_two_levels_matches_one_shot() {
        let mu = Dist::uniform(4).unwrap();
        let u = d(&[0.7, 0.1, 0.1, 0.1]);
        let events = [set(4, &[0, 1, 2]), set(4, &[1, 2])];
        let trace = recursive_tilt(&mu, &u, &events).unwrap();
        assert!(trace.terminal.approx_eq(&d(&[0.0, 0.5, 0.5, 0.0]), 1e-15));
        assert_eq!(trace.fallback_level, None);
        assert!((trace.divergence_bits.value() - 1.0).abs() < 1e-12);
        let kl = kl_divergence(&trace.terminal, &mu).unwrap().value();
        assert!((kl - 1.0).abs() < 1e-12);
        assert!((trace.levels[0].mass - 0.75).abs() < 1e-15);
        assert!((trace.levels[1].mass - 2.0 / 3.0).abs() < 1e-15);
        let one_shot = conditional_restriction(&mu, &trace.intersection(), &u).unwrap();
        assert!(trace.terminal.approx_eq(&one_shot, 1e-12));
    }

    #[test]
    fn tilt_without_events_is_identity() {
        let mu = d(&[0.2, 0.8]);
        let trace = recursive_tilt(&mu, &Dist::uniform(2).unwrap(), &[]).unwrap();
        assert_eq!(trace.terminal, mu);
        assert_eq!(trace.divergence_bits, ExtReal::ZERO);
    }

    #[test]
    fn tilt_zero_mass_falls_back() {
        let mu = d(&[0.5, 0.5]);
        let u = d(&[0.3, 0.7]);
        let trace = recursive_tilt(&mu, &u, &[set(2, &[0]), set(2, &[1])]).unwrap();
        assert_eq!(trace.terminal, u);
        assert_eq!(trace.fallback_level, Some(1));
        assert_eq!(trace.levels[1].mass, 0.0);
    }

    #[test]
    fn tilt_stops_once_level_equals_fallback() {
        // mu == u: the recursion stays at u, unlike a one-shot restriction.
        let u = Dist::uniform(4).unwrap();
        let trace = recursive_tilt(&u, &u, &[set(4, &[0, 1])]).unwrap();
        assert_eq!(trace.terminal, u);
        assert_eq!(trace.first_fallback_equal, Some(0));
        assert!(!trace.covered_by_one_shot());
    }

    #[test]
    fn iid_examples() {
        let p = d(&[0.7, 0.3]);
        let p2 = iid_extension(&p, 2).unwrap();
        let want = [0.49, 0.21, 0.21, 0.09];
        for (a, b) in p2.probs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(iid_extension(&p, 1).unwrap(), p);
        assert_eq!(
            iid_extension(&d(&[0.5, 0.5]), 2).unwrap().probs(),
            &[0.25; 4]
        );
        assert!(matches!(
            iid_extension(&p, 25),
            Err(crate::Error::ResourceCap(_))
        ));
        assert!(iid_extension(&p, 24).is_ok());
    }

    #[test]
    fn mixture_examples() {
        let p = d(&[0.6, 0.4]);
        let m = mixture_extension(0.5, &p, &p, 3).unwrap();
        assert!(m.approx_eq(&iid_extension(&p, 3).unwrap(), 1e-15));
        assert!(mixture_extension(1.0, &p, &p, 1).is_err());
        assert!(mixture_extension(0.0, &p, &p, 1).is_err());
        let m = mixture_extension(0.5, &d(&[1.0, 0.0]), &d(&[0.0, 1.0]), 1).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn conditional_entropy_examples() {
        // x1 uniform and independent of a 3-valued x2
        let q = Dist::uniform(6).unwrap();
        assert!((conditional_entropy(&q, 2, 3).unwrap() - 1.0).abs() < 1e-12);
        // copy source
        let q = d(&[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(conditional_entropy(&q, 2, 2).unwrap(), 0.0);
        // DSBS(0.1) gives h(0.1)
        let q = d(&[0.45, 0.05, 0.05, 0.45]);
        let h = -(0.1f64 * 0.1f64.log2() + 0.9 * 0.9f64.log2());
        assert!((conditional_entropy(&q, 2, 2).unwrap() - h).abs() < 1e-12);
        assert!((h - 0.468_995_593_589_281).abs() < 1e-12);
        assert!(conditional_entropy(&q, 3, 2).is_err());
    }

    #[test]
    fn block_layout_permutes_pair_sequences() {
        // 2x2 pair alphabet, n = 2: symbol (x1,x2) index = 2*x1 + x2.
        let mut probs = vec![0.0; 16];
        // sequence (x1=1,x2=0),(x1=0,x2=1): pair digits 2,1 -> index 9
        probs[9] = 1.0;
        let q = Dist::new(probs).unwrap();
        let laid = pair_block_layout(&q, 2, 2, 2).unwrap();
        // X1 block = 10b = 2, X2 block = 01b = 1 -> 2*4 + 1 = 9
        assert_eq!(laid.get(9), 1.0);
        let mut probs = vec![0.0; 16];
        // (x1=0,x2=1),(x1=1,x2=0): digits 1,2 -> index 6; X1 = 01 = 1, X2 = 10 = 2
        probs[6] = 1.0;
        let laid = pair_block_layout(&Dist::new(probs).unwrap(), 2, 2, 2).unwrap();
        assert_eq!(laid.get(4 + 2), 1.0);
    }

    #[test]
    fn event_set_ops() {
        let a = set(70, &[0, 5, 65]);
        let b = set(70, &[5, 69]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![5]);
        assert_eq!(a.union(&b).len(), 4);
        assert_eq!(a.complement().len(), 67);
        assert!(!a.complement().contains(65));
        assert!(set(70, &[5]).is_subset(&a));
        assert_eq!(EventSet::from_mask(3, 0b1101).iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(EventSet::from_indices(3, [3]).is_err());
    }
}
