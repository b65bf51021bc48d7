use serde::Deserialize;
use sideinfo::exponents::dsbs_joint;
use sideinfo::{Dist, PairAlphabet, SingleLetterModel};

use crate::error::{CliError, Result};

/// Source description as written in the config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Doubly symmetric binary source with the given crossover probability.
    Dsbs { crossover: f64 },
    /// Single-letter joint pmf, row-major over `x1 * x2_size + x2`.
    Iid {
        x1_size: usize,
        x2_size: usize,
        joint: Vec<f64>,
    },
    /// `alpha · P1^n + (1 − alpha) · P2^n`.
    Mixture {
        alpha: f64,
        components: Vec<ModelSpec>,
    },
}

impl ModelSpec {
    fn component(&self) -> Result<(Dist, PairAlphabet)> {
        match self {
            ModelSpec::Dsbs { crossover } => Ok((dsbs_joint(*crossover)?, PairAlphabet::new(2, 2)?)),
            ModelSpec::Iid {
                x1_size,
                x2_size,
                joint,
            } => {
                let ab = PairAlphabet::new(*x1_size, *x2_size)?;
                let p = Dist::new(joint.clone())?;
                ab.check_joint(&p)?;
                Ok((p, ab))
            }
            ModelSpec::Mixture { .. } => Err(CliError::Config(
                "mixture components must be dsbs or iid models".into(),
            )),
        }
    }

    pub fn build(&self) -> Result<SingleLetterModel> {
        match self {
            ModelSpec::Mixture { alpha, components } => {
                let [c1, c2] = components.as_slice() else {
                    return Err(CliError::Config(format!(
                        "a mixture needs exactly 2 components, got {}",
                        components.len()
                    )));
                };
                let (p1, a1) = c1.component()?;
                let (p2, a2) = c2.component()?;
                if a1 != a2 {
                    return Err(CliError::Config("mixture components differ in alphabet".into()));
                }
                Ok(SingleLetterModel::mixture(*alpha, p1, p2, a1)?)
            }
            other => {
                let (p, ab) = other.component()?;
                Ok(SingleLetterModel::iid(p, ab)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Optimal,
    Multi,
    Sweep,
    Exponent,
    Mixed,
    Probe,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Optimal => "optimal",
            Command::Multi => "multi",
            Command::Sweep => "sweep",
            Command::Exponent => "exponent",
            Command::Mixed => "mixed",
            Command::Probe => "probe",
        }
    }
}

/// Command-specific parameters. Which ones are required depends on the command.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub rates: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub a: Option<f64>,
    pub grid_step: Option<f64>,
    pub budget: Option<u64>,
    pub trials: Option<usize>,
    pub n_values: Option<Vec<usize>>,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: Option<ModelSpec>,
    pub command: Command,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
    /// Fill the `runtime_ms` column with wall-clock times. Off by default so
    /// that reports are byte-reproducible.
    #[serde(default)]
    pub record_runtime: bool,
}

fn missing(command: Command, field: &str) -> CliError {
    CliError::Config(format!("command `{}` requires params.{field}", command.as_str()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn model(&self) -> Result<SingleLetterModel> {
        self.model
            .as_ref()
            .ok_or_else(|| {
                CliError::Config(format!("command `{}` requires a model", self.command.as_str()))
            })?
            .build()
    }

    /// Checks that the parameters required by the command are present and sane.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let c = self.command;
        if c != Command::Verify {
            let model = self.model()?;
            if c == Command::Mixed && !matches!(model, SingleLetterModel::Mixture { .. }) {
                return Err(CliError::Config("command `mixed` needs a mixture model".into()));
            }
        }
        let positive = |v: Option<usize>, name: &str| -> Result<()> {
            match v {
                Some(0) => Err(CliError::Config(format!("params.{name} must be positive"))),
                _ => Ok(()),
            }
        };
        positive(p.n, "n")?;
        positive(p.m, "M")?;
        positive(p.trials, "trials")?;
        if p.budget == Some(0) {
            return Err(CliError::Config("params.budget must be positive".into()));
        }
        if let Some(r) = p.r {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("params.R = {r} must be a finite rate ≥ 0")));
            }
        }
        if let Some(a) = p.a {
            if !(0.0..=1.0).contains(&a) {
                return Err(CliError::Config(format!("params.a = {a} outside [0, 1]")));
            }
        }
        if let Some(s) = p.grid_step {
            if !(s > 0.0 && s <= 0.5) {
                return Err(CliError::Config(format!("params.grid_step = {s} outside (0, 0.5]")));
            }
        }
        if let Some(ns) = &p.n_values {
            if ns.is_empty() || ns.contains(&0) {
                return Err(CliError::Config("params.n_values must be nonempty and positive".into()));
            }
        }
        match c {
            Command::Verify => {}
            Command::Optimal => {
                p.m.ok_or_else(|| missing(c, "M"))?;
            }
            Command::Multi => {
                p.m.ok_or_else(|| missing(c, "M"))?;
                p.k.ok_or_else(|| missing(c, "k"))?;
            }
            Command::Sweep | Command::Mixed => {
                p.r.ok_or_else(|| missing(c, "R"))?;
                p.n_values.as_ref().ok_or_else(|| missing(c, "n_values"))?;
            }
            Command::Exponent => {
                p.grid_step.ok_or_else(|| missing(c, "grid_step"))?;
                if p.r.is_none() && p.rates.is_none() {
                    return Err(missing(c, "R or params.rates"));
                }
                if let Some(rates) = &p.rates {
                    if rates.is_empty() || rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
                        return Err(CliError::Config("params.rates must be finite rates ≥ 0".into()));
                    }
                    if rates.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(CliError::Config("params.rates must be strictly increasing".into()));
                    }
                }
            }
            Command::Probe => {
                p.trials.ok_or_else(|| missing(c, "trials"))?;
            }
        }
        Ok(())
    }
}
