//! Experiment configuration: one TOML file naming a household, a tariff,
//! the optimizers to run, and an optional forgery.
//!
//! Scenario and tariff paths resolve relative to the config file, so a
//! config directory can be copied anywhere. The output directory resolves
//! relative to the working directory. Command-line flags override single
//! fields after loading.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::attack::AttackSpec;
use crate::files::{FileError, FileErrorKind, LoadError};
use crate::harness::BillingMode;
use crate::optim::{GaParams, HsaParams, OptimizerSpec};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaseline {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGa {
    population_size: Option<usize>,
    generations: Option<usize>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    tournament_size: Option<usize>,
}

impl RawGa {
    fn params(&self) -> GaParams {
        let d = GaParams::default();
        GaParams {
            population_size: self.population_size.unwrap_or(d.population_size),
            generations: self.generations.unwrap_or(d.generations),
            crossover_rate: self.crossover_rate.unwrap_or(d.crossover_rate),
            mutation_rate: self.mutation_rate.unwrap_or(d.mutation_rate),
            tournament_size: self.tournament_size.unwrap_or(d.tournament_size),
            seed: 0,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHsa {
    harmony_memory_size: Option<usize>,
    memory_rate: Option<f64>,
    pitch_rate: Option<f64>,
    max_improvisations: Option<usize>,
}

impl RawHsa {
    fn params(&self) -> HsaParams {
        let d = HsaParams::default();
        HsaParams {
            harmony_memory_size: self.harmony_memory_size.unwrap_or(d.harmony_memory_size),
            memory_rate: self.memory_rate.unwrap_or(d.memory_rate),
            pitch_rate: self.pitch_rate.unwrap_or(d.pitch_rate),
            max_improvisations: self.max_improvisations.unwrap_or(d.max_improvisations),
            seed: 0,
        }
    }
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimizers {
    baseline: Option<RawBaseline>,
    ga: Option<RawGa>,
    hsa: Option<RawHsa>,
    oracle: Option<RawOracle>,
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_oracle_limit() -> u64 {
    10_000_000
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: PathBuf,
    tariff: PathBuf,
    #[serde(default)]
    attacks: Vec<AttackSpec>,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
    #[serde(default)]
    billing: BillingMode,
    #[serde(default = "default_oracle_limit")]
    oracle_limit: u64,
    #[serde(default)]
    optimizers: RawOptimizers,
}

/// A loaded experiment, paths resolved and every parameter validated.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario_path: PathBuf,
    pub tariff_path: PathBuf,
    pub attacks: Vec<AttackSpec>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub billing: BillingMode,
    pub oracle_limit: u64,
    pub baseline: bool,
    pub ga: Option<GaParams>,
    pub hsa: Option<HsaParams>,
    pub oracle: bool,
}

/// Single-field replacements from command-line flags.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// Replaces the whole seed list with this one seed.
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub billing: Option<BillingMode>,
    pub oracle_limit: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, FileError> {
        let at = |error: LoadError| FileError {
            path: path.to_path_buf(),
            error,
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            at(LoadError {
                line: None,
                kind: FileErrorKind::Parse,
                message: e.to_string(),
            })
        })?;
        ExperimentConfig::from_str_at(&text, path.parent().unwrap_or(Path::new("")))
            .map_err(at)
    }

    /// Parses a config document, resolving referenced paths against `dir`.
    pub fn from_str_at(text: &str, dir: &Path) -> Result<ExperimentConfig, LoadError> {
        let parse = |message: String| LoadError {
            line: None,
            kind: FileErrorKind::Parse,
            message,
        };
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
            LoadError {
                line,
                kind: FileErrorKind::Parse,
                message: e.message().to_string(),
            }
        })?;
        if raw.seeds.is_empty() {
            return Err(parse("seeds must not be empty".to_string()));
        }
        let ga = raw.optimizers.ga.as_ref().map(RawGa::params);
        if let Some(params) = &ga {
            params
                .validate()
                .map_err(|e| parse(format!("optimizers.ga: {e}")))?;
        }
        let hsa = raw.optimizers.hsa.as_ref().map(RawHsa::params);
        if let Some(params) = &hsa {
            params
                .validate()
                .map_err(|e| parse(format!("optimizers.hsa: {e}")))?;
        }
        Ok(ExperimentConfig {
            scenario_path: dir.join(&raw.scenario),
            tariff_path: dir.join(&raw.tariff),
            attacks: raw.attacks,
            seeds: raw.seeds,
            out_dir: raw.out_dir,
            billing: raw.billing,
            oracle_limit: raw.oracle_limit,
            baseline: raw.optimizers.baseline.is_some(),
            ga,
            hsa,
            oracle: raw.optimizers.oracle.is_some(),
        })
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seeds = vec![seed];
        }
        if let Some(out_dir) = &overrides.out_dir {
            self.out_dir = out_dir.clone();
        }
        if let Some(billing) = overrides.billing {
            self.billing = billing;
        }
        if let Some(limit) = overrides.oracle_limit {
            self.oracle_limit = limit;
        }
    }

    /// Enabled optimizers in reporting order: baseline, ga, hsa, oracle.
    /// Seeds are zero here; runs reseed per sweep entry.
    pub fn optimizer_specs(&self) -> Vec<OptimizerSpec> {
        let mut specs = Vec::new();
        if self.baseline {
            specs.push(OptimizerSpec::Baseline);
        }
        if let Some(params) = &self.ga {
            specs.push(OptimizerSpec::Ga(params.clone()));
        }
        if let Some(params) = &self.hsa {
            specs.push(OptimizerSpec::Hsa(params.clone()));
        }
        if self.oracle {
            specs.push(OptimizerSpec::Oracle {
                limit: self.oracle_limit,
            });
        }
        specs
    }
}
