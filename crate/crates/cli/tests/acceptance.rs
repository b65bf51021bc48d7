//! Acceptance gate: one pass/fail line per criterion.
//!
//! Run with `cargo test -p sideinfo-cli --test acceptance`. Exits nonzero when
//! any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use sideinfo::codes::{b_to_a, correct_set, error_probability, merge_a_codes, optimal_a_code, optimal_b_code};
use sideinfo::exponents::{
    dsbs_joint, empirical_exponent_sweep, predicted_eps_mixed, rho_high_rate, rho_low_rate,
    source_entropy,
};
use sideinfo::measures::{conditional_restriction, g_functional, kl_divergence, recursive_tilt};
use sideinfo::multicode::exhaustive_multi_b;
use sideinfo::oracles::{enumerate_a_codes, enumerate_b_tuples};
use sideinfo::{rng, ACode, Code, Dist, EventSet, PairAlphabet, SingleLetterModel};
use sideinfo_cli::{run_with_workers, to_csv_string, ExperimentConfig};

const VARIATIONAL_REL_TOL: f64 = 1e-12;
const SAMPLE_TOL: f64 = 1e-9;
const TILT_TOL: f64 = 1e-12;
const TILT_DIVERGENCE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const MIXED_TOL: f64 = 0.1;
const RHO_ORACLE_TOL: f64 = 1e-4;
const EMPIRICAL_TOL: f64 = 0.15;
const FULL_RATE_TOL: f64 = 1e-3;
const FULL_RATE_VALUE: f64 = 0.737;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_dist(r: &mut impl Rng, size: usize, zero_rate: f64) -> Dist {
    loop {
        let w: Vec<f64> = (0..size)
            .map(|_| if r.random_bool(zero_rate) { 0.0 } else { r.random_range(0.01..1.0) })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return Dist::new(w.into_iter().map(|x| x / total).collect()).unwrap();
        }
    }
}

fn log2_ratio_sum(nu: &[f64], mu: &[f64]) -> f64 {
    nu.iter()
        .zip(mu)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, q)| p * (p / q).log2())
        .sum()
}

fn variational_identity() -> Verdict {
    let mut r = rng::stream(1, 0);
    let mut worst_rel = 0.0f64;
    let mut worst_d = 0.0f64;
    let mut beaten = 0;
    let mut samples = 0;
    for _ in 0..500 {
        let n = r.random_range(1..=8);
        let mu = random_dist(&mut r, n, 0.2);
        let mut b = EventSet::from_predicate(n, |_| r.random_bool(0.5));
        let support: Vec<usize> = mu.support().iter().collect();
        b.insert(support[r.random_range(0..support.len())]);
        let mass: f64 = b.iter().map(|i| mu.get(i)).sum();
        let restricted = conditional_restriction(&mu, &b, &mu).unwrap();
        let g = g_functional(&restricted, &mu).unwrap().value();
        worst_rel = worst_rel.max((g - 1.0 / mass).abs() * mass);
        let d = kl_divergence(&restricted, &mu).unwrap().value();
        worst_d = worst_d.max((d + mass.log2()).abs());
        let members: Vec<usize> = b.iter().collect();
        for _ in 0..1000 {
            let w: Vec<f64> = members.iter().map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
            let total: f64 = w.iter().sum();
            let mut nu = vec![0.0; n];
            for (&i, x) in members.iter().zip(&w) {
                nu[i] = x / total;
            }
            let g_nu: f64 = nu.iter().zip(mu.probs()).filter(|(p, _)| **p > 0.0).map(|(p, q)| p * p / q).sum();
            let d_nu = log2_ratio_sum(&nu, mu.probs());
            if g_nu < 1.0 / mass - SAMPLE_TOL || d_nu < -mass.log2() - SAMPLE_TOL {
                beaten += 1;
            }
            samples += 1;
        }
    }
    verdict(
        worst_rel <= VARIATIONAL_REL_TOL && worst_d <= SAMPLE_TOL && beaten == 0,
        format!(
            "500 instances, {samples} samples: max G rel err {worst_rel:.1e}, max D err {worst_d:.1e}, {beaten} samples beat a bound"
        ),
    )
}

fn recursive_tilt_suite() -> Verdict {
    let mut r = rng::stream(2, 0);
    let mut sequences = 0u64;
    let mut mismatches = 0u64;
    let mut accumulator_checks = 0u64;
    let mut accumulator_errors = 0u64;
    for size in 1..=6usize {
        let mu = random_dist(&mut r, size, 0.0);
        let u = Dist::uniform(size).unwrap();
        let subsets = 1u64 << size;
        for len in 0..=4u32 {
            for idx in 0..subsets.pow(len) {
                let mut rest = idx;
                let mut masks = Vec::with_capacity(len as usize);
                for _ in 0..len {
                    masks.push(rest % subsets);
                    rest /= subsets;
                }
                let events: Vec<EventSet> = masks.iter().map(|&m| EventSet::from_mask(size, m)).collect();
                let trace = recursive_tilt(&mu, &u, &events).unwrap();
                sequences += 1;

                let inter = masks.iter().fold(subsets - 1, |a, m| a & m);
                let inter_mass: f64 = (0..size).filter(|i| inter >> i & 1 == 1).map(|i| mu.get(i)).sum();
                let expected: Vec<f64> = if !trace.covered_by_one_shot() || inter_mass == 0.0 {
                    u.probs().to_vec()
                } else {
                    (0..size)
                        .map(|i| if inter >> i & 1 == 1 { mu.get(i) / inter_mass } else { 0.0 })
                        .collect()
                };
                let same = trace
                    .terminal
                    .probs()
                    .iter()
                    .zip(&expected)
                    .all(|(a, b)| (a - b).abs() <= TILT_TOL);
                if !same {
                    mismatches += 1;
                }
                if trace.fallback_level.is_none() {
                    accumulator_checks += 1;
                    let direct = log2_ratio_sum(trace.terminal.probs(), mu.probs());
                    if (trace.divergence_bits.value() - direct).abs() > TILT_DIVERGENCE_TOL {
                        accumulator_errors += 1;
                    }
                }
            }
        }
    }
    verdict(
        mismatches == 0 && accumulator_errors == 0,
        format!(
            "{sequences} sequences: {mismatches} terminal mismatches, {accumulator_errors}/{accumulator_checks} accumulator errors"
        ),
    )
}

fn random_a_code(r: &mut impl Rng, ab: PairAlphabet) -> ACode {
    let m = r.random_range(1..=4);
    let enc = (0..ab.total()).map(|_| r.random_range(0..m)).collect();
    let dec = (0..m * ab.x2_size).map(|_| r.random_range(0..ab.x1_size)).collect();
    ACode::new(ab, m, enc, dec).unwrap()
}

fn merge_suite() -> Verdict {
    let mut r = rng::stream(3, 0);
    let mut bad = 0;
    for _ in 0..1000 {
        let ab = PairAlphabet::new(r.random_range(1..=6), r.random_range(1..=4)).unwrap();
        let c1 = random_a_code(&mut r, ab);
        let c2 = random_a_code(&mut r, ab);
        let m = merge_a_codes(&c1, &c2, &ab).unwrap();
        let t1 = correct_set(&c1, &ab).unwrap();
        let t2 = correct_set(&c2, &ab).unwrap();
        let t = correct_set(&m, &ab).unwrap();
        let union_ok = (0..ab.x1_size)
            .all(|x| (0..ab.x2_size).all(|y| t.contains(x, y) == (t1.contains(x, y) || t2.contains(x, y))));
        if m.size() != c1.size() + c2.size() || !union_ok {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("1000 pairs, {bad} failures"))
}

fn optimality_certification() -> Verdict {
    let mut r = rng::stream(4, 0);
    let mut instances = 0;
    let mut mismatches = 0;
    for _ in 0..60 {
        let ab = PairAlphabet::new(r.random_range(1..=3), r.random_range(1..=2)).unwrap();
        let joint = random_dist(&mut r, ab.total(), 0.2);
        for m in 1..=2 {
            instances += 1;
            let (_, ea) = optimal_a_code(&joint, &ab, m).unwrap();
            let oa = enumerate_a_codes(&joint, &ab, m).unwrap();
            let (_, eb) = optimal_b_code(&joint, &ab, m).unwrap();
            let ob = enumerate_b_tuples(&joint, &ab, m, 0).unwrap();
            if (ea - oa).abs() > ORACLE_TOL || (eb - ob).abs() > ORACLE_TOL {
                mismatches += 1;
            }
        }
    }
    verdict(mismatches == 0, format!("{instances} instances, {mismatches} mismatches"))
}

fn ordering_suite() -> Verdict {
    let mut r = rng::stream(5, 0);
    let mut violations = Vec::new();
    for inst in 0..60 {
        let ab = PairAlphabet::new(r.random_range(2..=4), r.random_range(1..=3)).unwrap();
        let joint = random_dist(&mut r, ab.total(), 0.2);
        let mut table = Vec::new();
        for m in 1..=3 {
            let (b, eb) = optimal_b_code(&joint, &ab, m).unwrap();
            let (_, ea) = optimal_a_code(&joint, &ab, m).unwrap();
            if ea > eb + ORACLE_TOL {
                violations.push(format!("instance {inst}: e_A({m}) > e_B({m};0)"));
            }
            if error_probability(&b_to_a(&b), &joint, &ab).unwrap() != error_probability(&b, &joint, &ab).unwrap() {
                violations.push(format!("instance {inst}: b_to_a changed the error"));
            }
            let row: Vec<f64> = (0..=2)
                .map(|k| exhaustive_multi_b(&joint, &ab, m, k).unwrap().miss_probability)
                .collect();
            if row.windows(2).any(|w| w[1] > w[0] + ORACLE_TOL) {
                violations.push(format!("instance {inst}: e_B({m};k) increased in k"));
            }
            table.push(row);
        }
        for k in 0..=2 {
            if table.windows(2).any(|w| w[1][k] > w[0][k] + ORACLE_TOL) {
                violations.push(format!("instance {inst}: e_B(M;{k}) increased in M"));
            }
        }
    }
    let detail = match violations.first() {
        None => "60 instances, M = 1..3, k = 0..2, no violations".to_string(),
        Some(v) => format!("{} violations, first: {v}", violations.len()),
    };
    verdict(violations.is_empty(), detail)
}

fn mixed_source() -> Verdict {
    let ab = PairAlphabet::new(2, 2).unwrap();
    let model = SingleLetterModel::mixture(0.5, dsbs_joint(0.02).unwrap(), dsbs_joint(0.35).unwrap(), ab).unwrap();
    let predicted = predicted_eps_mixed(&model, 0.5).unwrap();
    let ns: Vec<usize> = (4..=12).collect();
    let sweep = empirical_exponent_sweep(&model, 0.5, &ns).unwrap();
    let values: Vec<f64> = sweep.iter().map(|p| p.e_a).collect();
    let last = *values.last().unwrap();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.3}")).collect();
    verdict(
        (last - predicted).abs() <= MIXED_TOL && monotone && predicted == 0.5,
        format!(
            "predicted {predicted}, e_A(n=4..12) = [{}], |e_A(12) - pred| = {:.3}, monotone = {monotone}",
            shown.join(", "),
            (last - predicted).abs()
        ),
    )
}

/// `H_Q(X1|X2)` for a 2 × 2 table.
fn cond_entropy_2x2(q: &[f64; 4]) -> f64 {
    let mut h = 0.0;
    for y in 0..2 {
        let col = q[y] + q[2 + y];
        for x in 0..2 {
            let v = q[2 * x + y];
            if v > 0.0 {
                h -= v * (v / col).log2();
            }
        }
    }
    h
}

/// Independent grid oracle for the high-rate problem on a 2 × 2 model with
/// full support: every composition with step `h` meeting the rate constraint
/// is pulled toward `p` to the constraint boundary along the segment.
fn grid_oracle_high_rate(p: &[f64; 4], rate: f64, h: f64) -> f64 {
    let div = |q: &[f64; 4]| -> f64 {
        q.iter().zip(p).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).log2()).sum()
    };
    if cond_entropy_2x2(p) >= rate {
        return 0.0;
    }
    let steps = (1.0 / h).round() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps - i {
            for k in 0..=steps - i - j {
                let l = steps - i - j - k;
                let q = [i, j, k, l].map(|c| c as f64 / steps as f64);
                if cond_entropy_2x2(&q) < rate {
                    continue;
                }
                let at = |t: f64| -> [f64; 4] { std::array::from_fn(|c| p[c] + t * (q[c] - p[c])) };
                let (mut lo, mut hi) = (0.0, 1.0);
                if cond_entropy_2x2(&at(hi)) > rate {
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if cond_entropy_2x2(&at(mid)) >= rate {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                }
                best = best.min(div(&at(hi)));
            }
        }
    }
    best
}

fn exponent_consistency() -> Verdict {
    let model = SingleLetterModel::dsbs(0.1).unwrap();
    let p4: [f64; 4] = dsbs_joint(0.1).unwrap().probs().try_into().unwrap();
    let step = 0.01;

    let rho = rho_high_rate(&model, 0.8, step).unwrap().value();
    let oracle = grid_oracle_high_rate(&p4, 0.8, step / 4.0);
    let grid_ok = (rho - oracle).abs() <= RHO_ORACLE_TOL;

    let ns: Vec<usize> = (4..=12).collect();
    let sweep = empirical_exponent_sweep(&model, 0.8, &ns).unwrap();
    let est: Vec<f64> = sweep.iter().map(|p| p.exponent.value()).collect();
    let at12 = *est.last().unwrap();
    let near = (at12 - rho).abs() <= EMPIRICAL_TOL;
    let increasing = est.windows(2).all(|w| w[1] >= w[0]);

    let rho_full = rho_high_rate(&model, 1.0, step).unwrap().value();
    let oracle_full = grid_oracle_high_rate(&p4, 1.0, step / 4.0);
    let full_ok = (rho_full - oracle_full).abs() <= FULL_RATE_TOL && (rho_full - FULL_RATE_VALUE).abs() <= FULL_RATE_TOL;

    let shown: Vec<String> = est.iter().map(|v| format!("{v:.3}")).collect();
    verdict(
        grid_ok && near && increasing && full_ok,
        format!(
            "R=0.8: rho {rho:.6} vs oracle {oracle:.6} ({}); -log2(e_A)/n for n=4..12 = [{}], |est(12) - rho| = {:.3} ({}), increasing = {increasing}; R=1: rho {rho_full:.6} vs oracle {oracle_full:.6} ({})",
            if grid_ok { "ok" } else { "off" },
            shown.join(", "),
            (at12 - rho).abs(),
            if near { "ok" } else { "off" },
            if full_ok { "ok" } else { "off" },
        ),
    )
}

fn boundary_triviality() -> Verdict {
    let mut r = rng::stream(8, 0);
    let mut models = vec![SingleLetterModel::dsbs(0.1).unwrap(), SingleLetterModel::dsbs(0.3).unwrap()];
    for _ in 0..3 {
        let ab = PairAlphabet::new(3, 2).unwrap();
        models.push(SingleLetterModel::iid(random_dist(&mut r, 6, 0.0), ab).unwrap());
    }
    let mut bad = Vec::new();
    let mut checked = 0;
    for (i, model) in models.iter().enumerate() {
        let h = source_entropy(model).unwrap();
        let top = (model.alphabet().x1_size as f64).log2();
        let step = if model.alphabet().x1_size == 2 { 0.01 } else { 0.05 };
        for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let below = h * f;
            let above = h + (top - h) * f;
            checked += 2;
            if rho_high_rate(model, below, step).unwrap().value() != 0.0 {
                bad.push(format!("model {i}: rho_hi({below}) != 0"));
            }
            if rho_low_rate(model, above, step).unwrap().value() != 0.0 {
                bad.push(format!("model {i}: rho_lo({above}) != 0"));
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} checks, {} nonzero: {bad:?}", bad.len()))
}

fn determinism() -> Verdict {
    let configs = [
        r#"{"model": {"type": "iid", "x1_size": 6, "x2_size": 2,
            "joint": [0.1, 0.02, 0.05, 0.08, 0.12, 0.03, 0.02, 0.15, 0.09, 0.11, 0.13, 0.1]},
            "command": "multi", "params": {"M": 3, "k": 2, "budget": 3000}, "seed": 17}"#,
        r#"{"model": {"type": "dsbs", "crossover": 0.1}, "command": "sweep",
            "params": {"R": 0.8, "n_values": [2, 4, 6, 8, 10]}, "seed": 3}"#,
        r#"{"model": {"type": "dsbs", "crossover": 0.1}, "command": "exponent",
            "params": {"rates": [0.2, 0.469, 0.8, 0.95, 1.0], "grid_step": 0.02}, "seed": 5}"#,
        r#"{"model": {"type": "mixture", "alpha": 0.5, "components": [
            {"type": "dsbs", "crossover": 0.02}, {"type": "dsbs", "crossover": 0.35}]},
            "command": "mixed", "params": {"R": 0.5, "n_values": [4, 6, 8]}, "seed": 9}"#,
        r#"{"model": {"type": "dsbs", "crossover": 0.2}, "command": "probe", "params": {"trials": 500}, "seed": 21}"#,
    ];
    let mut differing = Vec::new();
    for (i, text) in configs.iter().enumerate() {
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let outputs: Vec<String> = [1, 4, 1]
            .iter()
            .map(|&w| to_csv_string(&run_with_workers(&cfg, w).unwrap()))
            .collect();
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(i);
        }
    }
    verdict(
        differing.is_empty(),
        format!("{} configs at 1, 4, 1 workers; differing: {differing:?}", configs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, Duration); 9] = [
        ("variational identity", variational_identity, Duration::from_secs(30)),
        ("recursive tilt", recursive_tilt_suite, Duration::from_secs(60)),
        ("subadditive merge", merge_suite, Duration::from_secs(10)),
        ("optimality certification", optimality_certification, Duration::from_secs(300)),
        ("ordering", ordering_suite, Duration::from_secs(60)),
        ("mixed-source limiting error", mixed_source, Duration::from_secs(600)),
        ("exponent consistency", exponent_consistency, Duration::from_secs(600)),
        ("boundary triviality", boundary_triviality, Duration::from_secs(10)),
        ("determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} [{:.1}s / {}s] {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
