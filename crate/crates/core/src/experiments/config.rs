use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BVariant};
use crate::error::{Error, Result};
use crate::hypotheses::{builtin_class, read_class_file, Distribution, HypothesisClass};
use crate::selectors::DecMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bs,
    Cs,
    As,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Bs, Algorithm::Cs, Algorithm::As];
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Bs => "bs",
            Algorithm::Cs => "cs",
            Algorithm::As => "as",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bs" => Ok(Algorithm::Bs),
            "cs" => Ok(Algorithm::Cs),
            "as" => Ok(Algorithm::As),
            other => Err(Error::param("algo", format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Everything needed to run a batch of seeded trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub delta: f64,
    /// Best margin of the built-in class. Ignored when `class` is set.
    pub gamma0: Option<f64>,
    /// Lower bound on the best margin given to batch and constrained
    /// selection; defaults to the class's best margin.
    pub gamma: Option<f64>,
    pub c: f64,
    pub dec_mode: DecMode,
    pub b_variant: BVariant,
    pub distribution: Distribution,
    /// Explicit class replacing the built-in distributions.
    pub class: Option<HypothesisClass>,
    pub runs: usize,
    pub base_seed: u64,
    /// Draw the success patterns once and reuse them for every trial.
    pub fixed_patterns: bool,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithm: Algorithm::As,
            n: 18,
            delta: 0.01,
            gamma0: None,
            gamma: None,
            c: 4.0,
            dec_mode: DecMode::Variable,
            b_variant: BVariant::Simple,
            distribution: Distribution::Symmetric,
            class: None,
            runs: 30,
            base_seed: 0,
            fixed_patterns: false,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, gamma0: f64) -> Self {
        ExperimentConfig {
            algorithm,
            gamma0: Some(gamma0),
            ..ExperimentConfig::default()
        }
    }

    /// The hypothesis class trials are drawn from.
    pub fn hypothesis_class(&self) -> Result<HypothesisClass> {
        match &self.class {
            Some(class) => Ok(class.clone()),
            None => {
                let gamma0 = self.gamma0.ok_or_else(|| {
                    Error::param("gamma0", "required unless a class file is given")
                })?;
                builtin_class(gamma0, self.distribution)
            }
        }
    }

    /// Lower bound handed to batch and constrained selection.
    pub fn effective_gamma(&self, class: &HypothesisClass) -> f64 {
        self.gamma.unwrap_or_else(|| class.gamma0())
    }

    pub fn validate(&self) -> Result<HypothesisClass> {
        if self.runs == 0 {
            return Err(Error::param("runs", "must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(Error::param("jobs", "must be at least 1"));
        }
        bounds::check_delta(self.delta)?;
        bounds::check_c(self.c)?;
        let class = self.hypothesis_class()?;
        if class.n() != self.n {
            return Err(Error::param(
                "n",
                format!("{} does not match the class size {}", self.n, class.n()),
            ));
        }
        if let Some(gamma) = self.gamma {
            bounds::check_unit("gamma", gamma)?;
            if gamma > class.gamma0() + 1e-12 {
                return Err(Error::param(
                    "gamma",
                    format!("{gamma} exceeds gamma0 = {}", class.gamma0()),
                ));
            }
        }
        if self.algorithm == Algorithm::Cs {
            bounds::threshold_b(
                self.n,
                self.delta,
                self.effective_gamma(&class),
                self.c,
                self.b_variant,
            )?;
        }
        Ok(class)
    }
}

/// Experiment settings as read from a TOML file. Keys match the long CLI
/// flags with dashes replaced by underscores.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub algo: Option<Algorithm>,
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub dec: Option<DecMode>,
    pub b_variant: Option<BVariant>,
    pub distribution: Option<Distribution>,
    pub class_file: Option<PathBuf>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub fixed_patterns: Option<bool>,
    pub jobs: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1);
            Error::malformed(line, e.message().to_string())
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| e.in_file(path))
    }

    /// Values from `self` take precedence over `lower`.
    pub fn or(self, lower: ConfigFile) -> ConfigFile {
        ConfigFile {
            algo: self.algo.or(lower.algo),
            n: self.n.or(lower.n),
            delta: self.delta.or(lower.delta),
            gamma0: self.gamma0.or(lower.gamma0),
            gamma: self.gamma.or(lower.gamma),
            c: self.c.or(lower.c),
            dec: self.dec.or(lower.dec),
            b_variant: self.b_variant.or(lower.b_variant),
            distribution: self.distribution.or(lower.distribution),
            class_file: self.class_file.or(lower.class_file),
            runs: self.runs.or(lower.runs),
            seed: self.seed.or(lower.seed),
            fixed_patterns: self.fixed_patterns.or(lower.fixed_patterns),
            jobs: self.jobs.or(lower.jobs),
        }
    }

    /// Fills unset keys with defaults and loads the class file, if any.
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let d = ExperimentConfig::default();
        let class = match &self.class_file {
            Some(path) => Some(read_class_file(path)?),
            None => None,
        };
        let n = self
            .n
            .unwrap_or_else(|| class.as_ref().map_or(d.n, HypothesisClass::n));
        Ok(ExperimentConfig {
            algorithm: self.algo.unwrap_or(d.algorithm),
            n,
            delta: self.delta.unwrap_or(d.delta),
            gamma0: self.gamma0,
            gamma: self.gamma,
            c: self.c.unwrap_or(d.c),
            dec_mode: self.dec.unwrap_or(d.dec_mode),
            b_variant: self.b_variant.unwrap_or(d.b_variant),
            distribution: self.distribution.unwrap_or(d.distribution),
            class,
            runs: self.runs.unwrap_or(d.runs),
            base_seed: self.seed.unwrap_or(d.base_seed),
            fixed_patterns: self.fixed_patterns.unwrap_or(d.fixed_patterns),
            jobs: self.jobs.unwrap_or(d.jobs),
        })
    }
}
