//! Experiment configuration file (JSON). Every key is optional; missing keys
//! take the default experiment values and unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::metrics::MetricsConfig;
use crate::netgen::{RandomGraphParams, SbmParams};
use crate::policy::Policy;
use crate::population::PopulationConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Complete,
    Random {
        p_edge: f64,
    },
    Sbm {
        p_maj_maj: f64,
        p_min_min: f64,
        p_maj_min: f64,
        p_min_maj: f64,
    },
    /// A stored `src,dst` edge list over `n` nodes.
    EdgeList {
        path: PathBuf,
        n: usize,
    },
}

impl Default for GraphSpec {
    fn default() -> Self {
        GraphSpec::from_sbm(SbmParams::default())
    }
}

impl GraphSpec {
    pub fn from_sbm(p: SbmParams) -> Self {
        GraphSpec::Sbm {
            p_maj_maj: p.p_maj_maj,
            p_min_min: p.p_min_min,
            p_maj_min: p.p_maj_min,
            p_min_maj: p.p_min_maj,
        }
    }

    pub fn sbm_params(&self) -> Option<SbmParams> {
        match *self {
            GraphSpec::Sbm { p_maj_maj, p_min_min, p_maj_min, p_min_maj } => Some(SbmParams { p_maj_maj, p_min_min, p_maj_min, p_min_maj }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub population: PopulationConfig<f64>,
    pub graph: GraphSpec,
    pub engine: EngineConfig<f64>,
    pub metrics: MetricsConfig,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Write event logs, population and edge list next to the per-run metrics.
    pub write_logs: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            population: PopulationConfig::default(),
            graph: GraphSpec::default(),
            engine: EngineConfig::default(),
            metrics: MetricsConfig::default(),
            seeds: (0..20).collect(),
            output_dir: PathBuf::from("out"),
            write_logs: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.population.validate()?;
        match &self.graph {
            GraphSpec::Complete => {}
            GraphSpec::Random { p_edge } => RandomGraphParams { p_edge: *p_edge }.validate()?,
            GraphSpec::Sbm { .. } => self.graph.sbm_params().expect("sbm").validate()?,
            GraphSpec::EdgeList { n, .. } => {
                if *n != self.population.n {
                    return Err(Error::config(
                        "graph.n",
                        format!("graph.n = {n} does not match population.n = {}", self.population.n),
                    ));
                }
            }
        }
        self.engine.validate()?;
        self.metrics.validate()?;
        if self.metrics.burn_in >= self.engine.steps {
            return Err(Error::config(
                "metrics.burn_in",
                format!("burn-in {} must be below engine.steps {}", self.metrics.burn_in, self.engine.steps),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        let distinct: BTreeSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return Err(Error::config("seeds", "seeds must be distinct"));
        }
        Ok(())
    }

    /// The config with `output_dir` cleared, so artifacts do not depend on
    /// where they were written.
    pub fn portable(&self) -> Self {
        Self { output_dir: PathBuf::new(), ..self.clone() }
    }

    /// Hex SHA-256 of the canonical JSON form of [`Self::portable`].
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.portable()).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Resolves a relative edge-list path against the directory of the config file.
    fn resolve_paths(&mut self, base: &Path) {
        if let GraphSpec::EdgeList { path, .. } = &mut self.graph {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

/// Parses and validates config text. Empty text yields the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config = if text.trim().is_empty() {
        ExperimentConfig::default()
    } else {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
        })?
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config(&text)?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MinorityShare,
    SbmParams,
    Beta4,
    Policy,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "minority_share" => Ok(SweepAxis::MinorityShare),
            "sbm_params" | "sbm" => Ok(SweepAxis::SbmParams),
            "beta4" => Ok(SweepAxis::Beta4),
            "policy" => Ok(SweepAxis::Policy),
            other => Err(Error::config("axis", format!("unknown sweep axis `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::MinorityShare => "minority_share",
            SweepAxis::SbmParams => "sbm_params",
            SweepAxis::Beta4 => "beta4",
            SweepAxis::Policy => "policy",
        }
    }

    /// Grid used when no values are given.
    pub fn default_values(self) -> Vec<SweepValue> {
        match self {
            SweepAxis::MinorityShare => [0.05, 0.1, 0.2, 0.3, 0.4].map(SweepValue::Number).to_vec(),
            SweepAxis::Beta4 => (1..=10).map(|b| SweepValue::Number(b as f64)).collect(),
            SweepAxis::Policy => Policy::ALL.map(SweepValue::Policy).to_vec(),
            SweepAxis::SbmParams => [
                SbmParams::homophilic(0.4, 0.5, 0.1),
                SbmParams { p_maj_maj: 0.5, p_min_min: 0.4, p_maj_min: 0.1, p_min_maj: 0.1 },
                SbmParams::homophilic(0.5, 0.5, 0.2),
                SbmParams::uniform(0.5),
            ]
            .map(SweepValue::Sbm)
            .to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Number(f64),
    Sbm(SbmParams),
    Policy(Policy),
}

impl SweepValue {
    pub fn label(&self) -> String {
        match self {
            SweepValue::Number(v) => v.to_string(),
            SweepValue::Sbm(p) => format!("{}:{}:{}:{}", p.p_maj_maj, p.p_min_min, p.p_maj_min, p.p_min_maj),
            SweepValue::Policy(p) => p.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
}

impl SweepSpec {
    /// Parses a comma-separated value list. SBM tuples are written
    /// `maj_maj:min_min:maj_min:min_maj`.
    pub fn parse(axis: SweepAxis, values: Option<&str>) -> Result<Self> {
        let Some(text) = values.filter(|v| !v.trim().is_empty()) else {
            return Ok(Self { axis, values: axis.default_values() });
        };
        let bad = |v: &str| Error::config("values", format!("cannot parse `{v}` for axis {}", axis.as_str()));
        let values = text
            .split(',')
            .map(str::trim)
            .map(|v| match axis {
                SweepAxis::MinorityShare | SweepAxis::Beta4 => v.parse().map(SweepValue::Number).map_err(|_| bad(v)),
                SweepAxis::Policy => Policy::parse(v).map(SweepValue::Policy).ok_or_else(|| bad(v)),
                SweepAxis::SbmParams => {
                    let parts: Vec<f64> = v.split(':').map(|p| p.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad(v))?;
                    match parts[..] {
                        [a, b, c, d] => Ok(SweepValue::Sbm(SbmParams { p_maj_maj: a, p_min_min: b, p_maj_min: c, p_min_maj: d })),
                        _ => Err(bad(v)),
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axis, values })
    }

    /// The base config with one grid value applied.
    pub fn apply(&self, base: &ExperimentConfig, value: &SweepValue) -> Result<ExperimentConfig> {
        let mut config = base.clone();
        match (self.axis, value) {
            (SweepAxis::MinorityShare, SweepValue::Number(v)) => config.population.minority_share = *v,
            (SweepAxis::Beta4, SweepValue::Number(v)) => config.engine.beta.beta[3] = *v,
            (SweepAxis::Policy, SweepValue::Policy(p)) => config.engine.policy = *p,
            (SweepAxis::SbmParams, SweepValue::Sbm(p)) => config.graph = GraphSpec::from_sbm(*p),
            _ => return Err(Error::config("values", format!("value {} does not fit axis {}", value.label(), self.axis.as_str()))),
        }
        config.validate()?;
        Ok(config)
    }
}
