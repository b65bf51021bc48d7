use std::time::Instant;

use rayon::prelude::*;
use sideinfo::codes::{min_size_for_error, optimal_a_code, optimal_b_code};
use sideinfo::exponents::{empirical_exponent_sweep, exponent_curve, predicted_eps_mixed, CurveKind};
use sideinfo::multicode::{best_multi_b, exhaustive_multi_b, k_index};
use sideinfo::oracles::b_subadditivity_probe;
use sideinfo::{Code, ExtReal, KIndex, ProbeVerdict};

use crate::config::{Command, ExperimentConfig, DEFAULT_BUDGET};
use crate::error::{CliError, Result};
use crate::report::{Metric, ResultRow};
use crate::verify;

struct Rows<'a> {
    config: &'a ExperimentConfig,
    started: Instant,
    rows: Vec<ResultRow>,
}

impl<'a> Rows<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        Rows {
            config,
            started: Instant::now(),
            rows: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, experiment: &str, n: usize, m: usize, r: f64, k: usize, metric: Metric, value: ExtReal) {
        let runtime_ms = if self.config.record_runtime {
            self.started.elapsed().as_millis() as u64
        } else {
            0
        };
        self.rows.push(ResultRow {
            experiment: experiment.to_string(),
            n,
            m,
            r,
            k,
            metric,
            value,
            seed: self.config.seed,
            runtime_ms,
        });
    }
}

fn rate_of(m: usize, n: usize) -> f64 {
    (m as f64).log2() / n as f64
}

/// Runs one validated experiment and returns its rows in deterministic order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let p = &config.params;
    let mut out = Rows::new(config);
    let name = config.command.as_str();
    match config.command {
        Command::Verify => {
            let outcomes = verify::run_all(config.seed);
            let failed: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.passed())
                .map(|o| o.to_string())
                .collect();
            if !failed.is_empty() {
                return Err(CliError::Verify(failed.join("; ")));
            }
        }
        Command::Optimal => {
            let model = config.model()?;
            let n = p.n.unwrap_or(1);
            let m = p.m.expect("validated");
            let (joint, ab) = model.block_joint(n)?;
            let eff = m.min(ab.x1_size);
            let r = rate_of(m, n);
            let (_, ea) = optimal_a_code(&joint, &ab, eff)?;
            out.push(name, n, m, r, 0, Metric::EA, ExtReal::finite(ea));
            let (_, eb) = optimal_b_code(&joint, &ab, eff)?;
            out.push(name, n, m, r, 0, Metric::EB, ExtReal::finite(eb));
            if let Some(a) = p.a {
                let rate = min_size_for_error(&joint, &ab, a, n)?;
                out.push(name, n, m, r, 0, Metric::RnA, ExtReal::finite(rate));
            }
        }
        Command::Multi => {
            let model = config.model()?;
            let n = p.n.unwrap_or(1);
            let m = p.m.expect("validated");
            let k_top = p.k.expect("validated");
            let budget = p.budget.unwrap_or(DEFAULT_BUDGET);
            let (joint, ab) = model.block_joint(n)?;
            let eff = m.min(ab.x1_size);
            let r = rate_of(m, n);
            for k in 0..=k_top {
                let res = best_multi_b(&joint, &ab, eff, k, budget, config.seed)?;
                let experiment = format!("{name}:{}", res.search_mode.as_str());
                out.push(&experiment, n, m, r, k, Metric::EBk, ExtReal::finite(res.miss_probability));
            }
            if let Some(k_max) = p.k_max {
                // trace of the k-index search for the optimal A-code of this size
                let (a, ea) = optimal_a_code(&joint, &ab, eff)?;
                let found = k_index(&a, &joint, &ab, k_max)?;
                let last = match found {
                    KIndex::Exactly(k) => k,
                    KIndex::ExceedsMax => k_max,
                };
                out.push(&format!("{name}:k_index"), n, m, r, 0, Metric::EA, ExtReal::finite(ea));
                for k in 0..=last {
                    let e = exhaustive_multi_b(&joint, &ab, a.size(), k)?.miss_probability;
                    let tag = match found {
                        KIndex::Exactly(_) if k == last => "k_index:found",
                        KIndex::ExceedsMax if k == last => "k_index:exceeds_max",
                        _ => "k_index",
                    };
                    out.push(&format!("{name}:{tag}"), n, m, r, k, Metric::Miss, ExtReal::finite(e));
                }
            }
        }
        Command::Sweep | Command::Mixed => {
            let model = config.model()?;
            let r = p.r.expect("validated");
            let n_values = p.n_values.as_ref().expect("validated");
            if config.command == Command::Mixed {
                let eps = predicted_eps_mixed(&model, r)?;
                out.push(name, 0, 0, r, 0, Metric::EpsPred, ExtReal::finite(eps));
            }
            let points: Vec<_> = n_values
                .par_iter()
                .map(|&n| empirical_exponent_sweep(&model, r, &[n]))
                .collect::<sideinfo::Result<Vec<_>>>()?;
            for pt in points.into_iter().flatten() {
                out.push(name, pt.n, pt.size, r, 0, Metric::EA, ExtReal::finite(pt.e_a));
                out.push(name, pt.n, pt.size, r, 0, Metric::ExponentEst, pt.exponent);
            }
        }
        Command::Exponent => {
            let model = config.model()?;
            let step = p.grid_step.expect("validated");
            let rates = p.rates.clone().unwrap_or_else(|| vec![p.r.expect("validated")]);
            for (kind, metric) in [(CurveKind::HighRate, Metric::RhoHi), (CurveKind::LowRate, Metric::RhoLo)] {
                let curve = exponent_curve(&model, &rates, step, kind)?;
                for (i, &(r, v)) in curve.points.iter().enumerate() {
                    // values over i.i.d. perturbations only
                    let experiment = if curve.flagged.contains(&i) {
                        format!("{name}:restricted_family:near_jump")
                    } else {
                        format!("{name}:restricted_family")
                    };
                    out.push(&experiment, 0, 0, r, 0, metric, v);
                }
            }
        }
        Command::Probe => {
            let model = config.model()?;
            let trials = p.trials.expect("validated");
            let report = b_subadditivity_probe(&model.alphabet(), trials, config.seed)?;
            let experiment = format!("{name}:{}", report.verdict.as_str());
            // value 1 when some union of correct sets has no single-code realization
            if report.verdict != ProbeVerdict::Inconclusive {
                let (bound, value) = match &report.counterexample {
                    Some(cx) => (cx.size_bound, 1.0),
                    None => (0, 0.0),
                };
                out.push(&experiment, report.instances_checked, bound, 0.0, 0, Metric::Miss, ExtReal::finite(value));
            }
        }
    }
    Ok(out.rows)
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_with_workers(config: &ExperimentConfig, workers: usize) -> Result<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Resource(e.to_string()))?;
    pool.install(|| run_experiment(config))
}
