//! Seeded invariant suites behind the `verify` command.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use sideinfo::codes::{
    b_to_a, correct_set, error_probability, merge_a_codes, min_size_for_error, optimal_a_code,
    optimal_a_error, optimal_b_code,
};
use sideinfo::exponents::{
    dsbs_joint, empirical_exponent_sweep, predicted_eps_mixed, solve_rate_problem, source_entropy,
    CurveKind,
};
use sideinfo::measures::{
    conditional_entropy, conditional_restriction, g_functional, iid_extension, kl_divergence,
    mixture_extension, recursive_tilt,
};
use sideinfo::multicode::{exhaustive_multi_b, joint_miss_probability, stochastic_multi_b};
use sideinfo::oracles::{
    b_subadditivity_probe, enumerate_a_codes, enumerate_b_tuples, sample_variational_identity,
    ProbeVerdict,
};
use sideinfo::{rng, ACode, BCode, Code, Dist, EventSet, PairAlphabet, SingleLetterModel};

/// Result of one invariant suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// First violation or error, if any.
    pub note: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.note.is_none()
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAIL" };
        write!(
            f,
            "{status} {} ({} checked, {} violations)",
            self.name, self.checked, self.violations
        )?;
        if let Some(note) = &self.note {
            write!(f, ": {note}")?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    violations: usize,
    note: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            checked: 0,
            violations: 0,
            note: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            self.note.get_or_insert_with(what);
        }
    }

    fn merge(&mut self, checked: usize, violations: usize, note: Option<String>) {
        self.checked += checked;
        self.violations += violations;
        if self.note.is_none() {
            self.note = note;
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name,
            checked: self.checked,
            violations: self.violations,
            note: self.note,
        }
    }
}

type Suite = fn(u64) -> sideinfo::Result<SuiteOutcome>;

const SUITES: [(&str, Suite); 16] = [
    ("measures.variational", variational),
    ("measures.recursive_tilt", recursive_tilt_exhaustive),
    ("measures.kl_g_bounds", kl_g_bounds),
    ("measures.extensions", extensions),
    ("codes.a_monotone", a_monotone),
    ("codes.oracle_a", oracle_a),
    ("codes.merge", merge),
    ("codes.b_to_a", b_to_a_suite),
    ("codes.min_size", min_size),
    ("multicode.monotone", multi_monotone),
    ("multicode.stochastic", multi_stochastic),
    ("multicode.duplicates", multi_duplicates),
    ("multicode.oracle_b", oracle_b),
    ("exponents.curves", exponent_curves),
    ("exponents.mixture", exponent_mixture),
    ("oracles.probe", probe),
];

/// Runs every suite with streams derived from `seed`, in a fixed order.
pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .enumerate()
        .map(|(i, (name, suite))| {
            let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
            suite(s).unwrap_or_else(|e| SuiteOutcome {
                name,
                checked: 0,
                violations: 1,
                note: Some(e.to_string()),
            })
        })
        .collect()
}

/// Random pmf with each entry zero with probability `zero_rate`.
pub fn random_dist(r: &mut impl Rng, size: usize, zero_rate: f64) -> Dist {
    let w: Vec<f64> = (0..size)
        .map(|_| {
            if r.random_bool(zero_rate) {
                0.0
            } else {
                r.random_range(0.01..1.0)
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return Dist::point(size, r.random_range(0..size)).expect("nonempty");
    }
    Dist::new(w.into_iter().map(|x| x / total).collect()).expect("normalized")
}

fn random_alphabet(r: &mut impl Rng, max_x1: usize, max_x2: usize) -> PairAlphabet {
    PairAlphabet::new(r.random_range(1..=max_x1), r.random_range(1..=max_x2)).expect("positive")
}

fn random_a_code(r: &mut impl Rng, ab: PairAlphabet, max_size: usize) -> ACode {
    let m = r.random_range(1..=max_size);
    let enc = (0..ab.total()).map(|_| r.random_range(0..m)).collect();
    let dec = (0..m * ab.x2_size).map(|_| r.random_range(0..ab.x1_size)).collect();
    ACode::new(ab, m, enc, dec).expect("tables in range")
}

fn random_b_code(r: &mut impl Rng, ab: PairAlphabet, max_size: usize) -> BCode {
    let m = r.random_range(1..=max_size);
    let enc = (0..ab.x1_size).map(|_| r.random_range(0..m)).collect();
    let dec = (0..m * ab.x2_size).map(|_| r.random_range(0..ab.x1_size)).collect();
    BCode::new(ab, m, enc, dec).expect("tables in range")
}

fn variational(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("measures.variational");
    for i in 0..100 {
        let n = r.random_range(1..=8);
        let mu = random_dist(&mut r, n, 0.2);
        let mut b = EventSet::from_predicate(n, |_| r.random_bool(0.5));
        let support: Vec<usize> = mu.support().iter().collect();
        b.insert(support[r.random_range(0..support.len())]);
        let rep = sample_variational_identity(&mu, &b, 1000, seed.wrapping_add(i))?;
        t.check(rep.holds(), || format!("instance {i}: {rep:?}"));
    }
    Ok(t.finish())
}

/// Every event sequence of length ≤ 4 over alphabets of size ≤ 6.
fn recursive_tilt_exhaustive(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("measures.recursive_tilt");
    for size in 1..=6usize {
        let mu = random_dist(&mut r, size, 0.0);
        let u = Dist::uniform(size)?;
        let subsets = 1u64 << size;
        for len in 0..=4u32 {
            let count = subsets.pow(len);
            let (checked, violations, note) = (0..count)
                .into_par_iter()
                .map(|idx| {
                    let mut rest = idx;
                    let events: Vec<EventSet> = (0..len)
                        .map(|_| {
                            let e = EventSet::from_mask(size, rest % subsets);
                            rest /= subsets;
                            e
                        })
                        .collect();
                    match check_tilt(&mu, &u, &events) {
                        Ok(()) => (1usize, 0usize, None),
                        Err(msg) => (1, 1, Some(msg)),
                    }
                })
                .reduce(
                    || (0, 0, None),
                    |a, b| (a.0 + b.0, a.1 + b.1, a.2.or(b.2)),
                );
            t.merge(checked, violations, note);
        }
    }
    Ok(t.finish())
}

fn check_tilt(mu: &Dist, u: &Dist, events: &[EventSet]) -> Result<(), String> {
    let trace = recursive_tilt(mu, u, events).map_err(|e| e.to_string())?;
    let fail = |what: &str| Err(format!("{what} for events {events:?}"));
    if trace.covered_by_one_shot() {
        let one_shot = conditional_restriction(mu, &trace.intersection(), u).map_err(|e| e.to_string())?;
        if !trace.terminal.approx_eq(&one_shot, 1e-12) {
            return fail("terminal differs from one-shot restriction");
        }
    } else if !trace.terminal.approx_eq(u, 1e-12) {
        return fail("terminal differs from fallback after a level equal to it");
    }
    if trace.fallback_level.is_none() {
        let direct = kl_divergence(&trace.terminal, mu).map_err(|e| e.to_string())?;
        if (trace.divergence_bits.value() - direct.value()).abs() > 1e-9 {
            return fail("divergence accumulator differs from direct divergence");
        }
    }
    Ok(())
}

fn kl_g_bounds(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("measures.kl_g_bounds");
    for i in 0..10_000 {
        let n = r.random_range(1..=8);
        let nu = random_dist(&mut r, n, 0.2);
        let mu = if i % 10 == 0 { nu.clone() } else { random_dist(&mut r, n, 0.2) };
        let d = kl_divergence(&nu, &mu)?;
        let g = g_functional(&nu, &mu)?;
        t.check(d.value() >= 0.0 && g.value() >= 1.0, || format!("{nu:?} vs {mu:?}"));
        if nu == mu {
            t.check(d.value() == 0.0 && g.value() == 1.0, || format!("equality case {nu:?}"));
        }
    }
    Ok(t.finish())
}

fn extensions(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("measures.extensions");
    for _ in 0..50 {
        let ab = random_alphabet(&mut r, 3, 3);
        let p = random_dist(&mut r, ab.total(), 0.2);
        let q = random_dist(&mut r, ab.total(), 0.2);
        let alpha = r.random_range(0.0..=1.0);
        let n = r.random_range(1..=4);
        for d in [iid_extension(&p, n)?, mixture_extension(alpha, &p, &q, n)?] {
            let total: f64 = d.probs().iter().sum();
            t.check(
                (total - 1.0).abs() <= 1e-9 && d.probs().iter().all(|&x| x >= 0.0),
                || format!("extension sums to {total}"),
            );
        }
        let model = SingleLetterModel::iid(p.clone(), ab)?;
        let (block, bab) = model.block_joint(n)?;
        let h1 = conditional_entropy(&p, ab.x1_size, ab.x2_size)?;
        let hn = conditional_entropy(&block, bab.x1_size, bab.x2_size)?;
        t.check((hn - n as f64 * h1).abs() <= 1e-9, || format!("H(product) {hn} vs {n}·{h1}"));
    }
    Ok(t.finish())
}

fn a_monotone(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("codes.a_monotone");
    for _ in 0..200 {
        let ab = random_alphabet(&mut r, 5, 3);
        let joint = random_dist(&mut r, ab.total(), 0.3);
        let mut prev = f64::INFINITY;
        for m in 1..=ab.x1_size {
            let ea = optimal_a_error(&joint, &ab, m)?;
            let (_, eb) = optimal_b_code(&joint, &ab, m)?;
            t.check(ea <= prev + 1e-12, || format!("e_A rose at M = {m}"));
            t.check(ea <= eb + 1e-12, || format!("e_A({m}) = {ea} > e_B = {eb}"));
            prev = ea;
        }
        t.check(prev.abs() <= 1e-12, || format!("e_A(x1_size) = {prev}"));
    }
    Ok(t.finish())
}

fn oracle_a(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("codes.oracle_a");
    for _ in 0..60 {
        let ab = random_alphabet(&mut r, 3, 2);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        for m in 1..=2 {
            let (_, fast) = optimal_a_code(&joint, &ab, m)?;
            let slow = enumerate_a_codes(&joint, &ab, m)?;
            t.check((fast - slow).abs() <= 1e-12, || format!("e_A({m}): {fast} vs oracle {slow}"));
        }
    }
    Ok(t.finish())
}

fn merge(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("codes.merge");
    for _ in 0..1000 {
        let ab = random_alphabet(&mut r, 5, 4);
        let c1 = random_a_code(&mut r, ab, 4);
        let c2 = random_a_code(&mut r, ab, 4);
        let m = merge_a_codes(&c1, &c2, &ab)?;
        t.check(m.size() == c1.size() + c2.size(), || "size not additive".into());
        let union = correct_set(&c1, &ab)?.union(&correct_set(&c2, &ab)?);
        t.check(correct_set(&m, &ab)? == union, || "merged correct set differs from union".into());
    }
    Ok(t.finish())
}

fn b_to_a_suite(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("codes.b_to_a");
    for _ in 0..1000 {
        let ab = random_alphabet(&mut r, 5, 4);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        let b = random_b_code(&mut r, ab, 4);
        let a = b_to_a(&b);
        t.check(correct_set(&a, &ab)? == correct_set(&b, &ab)?, || "correct sets differ".into());
        t.check(
            error_probability(&a, &joint, &ab)? == error_probability(&b, &joint, &ab)?,
            || "error probabilities differ".into(),
        );
    }
    Ok(t.finish())
}

fn min_size(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("codes.min_size");
    for _ in 0..200 {
        let ab = random_alphabet(&mut r, 6, 3);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        let n = r.random_range(1..=4);
        let mut prev = 0.0;
        for i in 0..=20 {
            let v = min_size_for_error(&joint, &ab, i as f64 / 20.0, n)?;
            t.check(v >= prev, || "R_n^a decreased in a".into());
            prev = v;
        }
        for m in 1..=ab.x1_size {
            let a = 1.0 - optimal_a_error(&joint, &ab, m)?;
            let v = min_size_for_error(&joint, &ab, a, n)?;
            t.check(v <= (m as f64).log2() / n as f64 + 1e-12, || format!("R_n^a above rate of M = {m}"));
        }
    }
    Ok(t.finish())
}

fn multi_monotone(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("multicode.monotone");
    for _ in 0..40 {
        let ab = random_alphabet(&mut r, 4, 3);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        let mut by_m: Vec<Vec<f64>> = Vec::new();
        for m in 1..=3 {
            let mut row = Vec::new();
            for k in 0..=2 {
                row.push(exhaustive_multi_b(&joint, &ab, m, k)?.miss_probability);
            }
            t.check(row.windows(2).all(|w| w[1] <= w[0] + 1e-12), || format!("e_B({m};k) rose in k"));
            by_m.push(row);
        }
        for k in 0..=2 {
            t.check(
                by_m.windows(2).all(|w| w[1][k] <= w[0][k] + 1e-12),
                || format!("e_B(M;{k}) rose in M"),
            );
        }
    }
    Ok(t.finish())
}

fn multi_stochastic(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("multicode.stochastic");
    let instances = 30;
    let mut equal = 0;
    for i in 0..instances {
        let ab = random_alphabet(&mut r, 5, 3);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        let exact = exhaustive_multi_b(&joint, &ab, 2, 1)?.miss_probability;
        let s = stochastic_multi_b(&joint, &ab, 2, 1, 4_000, seed.wrapping_add(i))?.miss_probability;
        t.check(s >= exact - 1e-12, || format!("stochastic {s} below exact {exact}"));
        if s <= exact + 1e-12 {
            equal += 1;
        }
    }
    t.check(equal * 10 >= instances * 9, || format!("stochastic matched exact on {equal}/{instances}"));
    Ok(t.finish())
}

fn multi_duplicates(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("multicode.duplicates");
    for _ in 0..500 {
        let ab = random_alphabet(&mut r, 5, 4);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        let b = random_b_code(&mut r, ab, 3);
        let copies = r.random_range(1..=4);
        let single = error_probability(&b, &joint, &ab)?;
        let dup = joint_miss_probability(&vec![b; copies], &joint, &ab)?;
        t.check(dup == single, || format!("{copies} copies miss {dup}, single {single}"));
    }
    Ok(t.finish())
}

fn oracle_b(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut r = rng::stream(seed, 0);
    let mut t = Tally::new("multicode.oracle_b");
    for _ in 0..40 {
        let ab = random_alphabet(&mut r, 3, 2);
        let joint = random_dist(&mut r, ab.total(), 0.2);
        for m in 1..=2 {
            let (_, single) = optimal_b_code(&joint, &ab, m)?;
            let slow = enumerate_b_tuples(&joint, &ab, m, 0)?;
            t.check((single - slow).abs() <= 1e-12, || format!("e_B({m};0): {single} vs {slow}"));
            let multi = exhaustive_multi_b(&joint, &ab, m, 1)?.miss_probability;
            let slow = enumerate_b_tuples(&joint, &ab, m, 1)?;
            t.check((multi - slow).abs() <= 1e-12, || format!("e_B({m};1): {multi} vs {slow}"));
        }
    }
    Ok(t.finish())
}

fn exponent_models(seed: u64) -> sideinfo::Result<Vec<(SingleLetterModel, f64)>> {
    let mut r = rng::stream(seed, 0);
    let ab = PairAlphabet::new(3, 2)?;
    let p = random_dist(&mut r, ab.total(), 0.0);
    Ok(vec![
        (SingleLetterModel::dsbs(0.1)?, 0.01),
        (SingleLetterModel::dsbs(0.25)?, 0.01),
        (SingleLetterModel::iid(p, ab)?, 0.05),
    ])
}

fn exponent_curves(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut t = Tally::new("exponents.curves");
    for (model, step) in exponent_models(seed)? {
        let h = source_entropy(&model)?;
        let top = (model.alphabet().x1_size as f64).log2();
        let rates: Vec<f64> = (0..=10).map(|i| top * i as f64 / 10.0).collect();
        for (kind, increasing) in [(CurveKind::HighRate, true), (CurveKind::LowRate, false)] {
            let at_h = solve_rate_problem(&model, h, step, kind)?.value;
            t.check(at_h.value() == 0.0, || format!("{} at the entropy is {at_h}", kind.as_str()));
            let mut prev: Option<f64> = None;
            for &rate in &rates {
                let sol = solve_rate_problem(&model, rate, step, kind)?;
                let v = sol.value.value();
                if let Some(pv) = prev {
                    let ok = if increasing { v >= pv - 1e-6 } else { v <= pv + 1e-6 || pv.is_infinite() };
                    t.check(ok, || format!("{} not monotone at R = {rate}", kind.as_str()));
                }
                prev = Some(v);
                if let Some(q) = &sol.minimizer {
                    let ab = model.alphabet();
                    let hq = conditional_entropy(q, ab.x1_size, ab.x2_size)?;
                    let SingleLetterModel::Iid { p, .. } = &model else { unreachable!() };
                    let d = kl_divergence(q, p)?.value();
                    let feasible = match kind {
                        CurveKind::HighRate => hq >= rate - 1e-6,
                        CurveKind::LowRate => hq <= rate + 1e-6,
                    };
                    t.check(feasible, || format!("minimizer infeasible at R = {rate}"));
                    t.check((d - v).abs() <= 1e-4, || format!("certificate {d} vs reported {v}"));
                }
            }
        }
    }
    Ok(t.finish())
}

fn exponent_mixture(_seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut t = Tally::new("exponents.mixture");
    let ab = PairAlphabet::new(2, 2)?;
    let model = SingleLetterModel::mixture(0.5, dsbs_joint(0.02)?, dsbs_joint(0.35)?, ab)?;
    for rate in [0.05, 0.5, 0.97, 1.0] {
        let eps = predicted_eps_mixed(&model, rate)?;
        t.check([0.0, 0.5, 1.0].contains(&eps), || format!("prediction {eps} at R = {rate}"));
    }
    let eps = predicted_eps_mixed(&model, 0.5)?;
    let sweep = empirical_exponent_sweep(&model, 0.5, &[12])?;
    t.check((sweep[0].e_a - eps).abs() <= 0.1, || format!("e_A(n=12) = {} vs {eps}", sweep[0].e_a));
    Ok(t.finish())
}

fn probe(seed: u64) -> sideinfo::Result<SuiteOutcome> {
    let mut t = Tally::new("oracles.probe");
    for (x1, x2) in [(2, 2), (3, 2), (3, 3), (5, 1)] {
        let ab = PairAlphabet::new(x1, x2)?;
        let rep = b_subadditivity_probe(&ab, 200_000, seed)?;
        let consistent = rep.counterexample.is_some() == (rep.verdict == ProbeVerdict::CounterexampleFound);
        t.check(consistent, || format!("probe report inconsistent on {x1}×{x2}"));
        if let Some(cx) = &rep.counterexample {
            let union = correct_set(&cx.c1, &ab)?.union(&correct_set(&cx.c2, &ab)?);
            t.check(union == cx.union, || "counterexample union mismatch".into());
        }
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilt_check_accepts_plain_sequences() {
        let mu = Dist::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let u = Dist::uniform(4).unwrap();
        let events = [EventSet::from_mask(4, 0b1110), EventSet::from_mask(4, 0b0110)];
        assert!(check_tilt(&mu, &u, &events).is_ok());
    }

    #[test]
    fn outcome_display() {
        let o = SuiteOutcome { name: "x", checked: 3, violations: 0, note: None };
        assert_eq!(o.to_string(), "ok x (3 checked, 0 violations)");
    }
}
