//! Schedule optimizers: seeded metaheuristics, an exhaustive solver, and
//! the unmanaged baseline pass-through.

use std::fmt;

use thiserror::Error;

use crate::model::{total_cost, HouseholdScenario, TariffDay};
use crate::money::Money;

mod candidate;
mod exhaustive;
mod ga;
mod hsa;

pub use candidate::{
    decode, fitness, repair_precedence, Candidate, EncodingMismatch, RepairedCandidate,
};
pub use exhaustive::{brute_force_optimize, search_space_size, SearchSpaceTooLarge};
pub use ga::{ga_optimize, GaParams};
pub use hsa::{hsa_optimize, HsaParams};

use candidate::{Genome, Layout};

/// Outcome of one optimizer run. Bit-for-bit reproducible given the same
/// scenario, tariff, parameters, and seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizerResult {
    pub schedule: crate::model::Schedule,
    pub cost: crate::model::CostBreakdown,
    /// Best total seen so far: one entry for the initial population or
    /// memory, then one per generation or improvisation. The exhaustive
    /// solver and the baseline record their single final value.
    pub best_cost_history: Vec<Money>,
    /// Cost evaluations performed.
    pub evaluations: u64,
    /// Seed the run used; 0 for the seedless optimizers.
    pub seed: u64,
}

/// A tuning value outside its documented range.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid optimizer parameter: {0}")]
pub struct InvalidParams(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OptimizeError {
    #[error(transparent)]
    InvalidParams(#[from] InvalidParams),
    #[error(transparent)]
    SearchSpaceTooLarge(#[from] SearchSpaceTooLarge),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

/// Prices the scenario's baseline schedule unchanged: the no-management
/// reference every optimizer is measured against. Ignores prices when
/// choosing, so it is trivially immune to forged tariffs.
pub fn baseline_result(
    scenario: &HouseholdScenario,
    tariff: &TariffDay,
) -> Result<OptimizerResult, OptimizeError> {
    let schedule = scenario.baseline().clone();
    let cost = total_cost(&schedule, tariff, scenario)
        .map_err(|e| OptimizeError::Internal(format!("baseline schedule: {e}")))?;
    Ok(OptimizerResult {
        best_cost_history: vec![cost.total],
        evaluations: 1,
        seed: 0,
        schedule,
        cost,
    })
}

/// Result for a scenario with no decision variables: the fixed profiles are
/// the only schedule there is.
pub(crate) fn static_result(
    scenario: &HouseholdScenario,
    tariff: &TariffDay,
    seed: u64,
) -> Result<OptimizerResult, OptimizeError> {
    let schedule = scenario.fixed_schedule();
    let cost = total_cost(&schedule, tariff, scenario)
        .map_err(|e| OptimizeError::Internal(format!("fixed-profile schedule: {e}")))?;
    Ok(OptimizerResult {
        best_cost_history: vec![cost.total],
        evaluations: 1,
        seed,
        schedule,
        cost,
    })
}

/// Turns a winning genome into the final result, re-pricing it through the
/// schedule path as a cross-check on the fast evaluator.
pub(crate) fn finish_run(
    layout: &Layout,
    best: &Genome,
    scenario: &HouseholdScenario,
    tariff: &TariffDay,
    history: Vec<Money>,
    evaluations: u64,
    seed: u64,
) -> Result<OptimizerResult, OptimizeError> {
    let schedule = layout.schedule(best, scenario);
    let cost = total_cost(&schedule, tariff, scenario)
        .map_err(|e| OptimizeError::Internal(format!("optimizer emitted {e}")))?;
    debug_assert_eq!(Some(&cost.total), history.last());
    Ok(OptimizerResult {
        best_cost_history: history,
        evaluations,
        seed,
        schedule,
        cost,
    })
}

/// Which optimizer to run, with its parameters: the uniform entry point
/// shared by experiments and the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum OptimizerSpec {
    Baseline,
    Ga(GaParams),
    Hsa(HsaParams),
    Oracle { limit: u64 },
}

impl OptimizerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerSpec::Baseline => "baseline",
            OptimizerSpec::Ga(_) => "ga",
            OptimizerSpec::Hsa(_) => "hsa",
            OptimizerSpec::Oracle { .. } => "oracle",
        }
    }

    /// True for the optimizers whose result depends on a seed.
    pub fn is_seeded(&self) -> bool {
        matches!(self, OptimizerSpec::Ga(_) | OptimizerSpec::Hsa(_))
    }

    pub fn seed(&self) -> u64 {
        match self {
            OptimizerSpec::Ga(p) => p.seed,
            OptimizerSpec::Hsa(p) => p.seed,
            OptimizerSpec::Baseline | OptimizerSpec::Oracle { .. } => 0,
        }
    }

    /// The same optimizer reseeded; seedless optimizers pass through.
    pub fn seeded(&self, seed: u64) -> OptimizerSpec {
        match self {
            OptimizerSpec::Ga(p) => OptimizerSpec::Ga(GaParams { seed, ..p.clone() }),
            OptimizerSpec::Hsa(p) => OptimizerSpec::Hsa(HsaParams { seed, ..p.clone() }),
            other => other.clone(),
        }
    }

    pub fn run(
        &self,
        scenario: &HouseholdScenario,
        tariff: &TariffDay,
    ) -> Result<OptimizerResult, OptimizeError> {
        match self {
            OptimizerSpec::Baseline => baseline_result(scenario, tariff),
            OptimizerSpec::Ga(params) => ga_optimize(scenario, tariff, params),
            OptimizerSpec::Hsa(params) => hsa_optimize(scenario, tariff, params),
            OptimizerSpec::Oracle { limit } => brute_force_optimize(scenario, tariff, *limit),
        }
    }
}

impl fmt::Display for OptimizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerSpec::Baseline => write!(f, "baseline"),
            OptimizerSpec::Ga(p) => write!(
                f,
                "ga(population_size={}, generations={}, crossover_rate={}, \
                 mutation_rate={}, tournament_size={}, seed={})",
                p.population_size,
                p.generations,
                p.crossover_rate,
                p.mutation_rate,
                p.tournament_size,
                p.seed,
            ),
            OptimizerSpec::Hsa(p) => write!(
                f,
                "hsa(harmony_memory_size={}, memory_rate={}, pitch_rate={}, \
                 max_improvisations={}, seed={})",
                p.harmony_memory_size, p.memory_rate, p.pitch_rate, p.max_improvisations, p.seed,
            ),
            OptimizerSpec::Oracle { limit } => write!(f, "oracle(limit={limit})"),
        }
    }
}
