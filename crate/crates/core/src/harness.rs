//! Clean-vs-attacked experiment pairs and the resilience index.
//!
//! One experiment runs the same optimizer twice with the same seed: once
//! on the true tariff and once on a forged one. Reusing the seed means any
//! cost difference is the forgery's doing, not run-to-run noise. The
//! resilience index compresses that difference into a percentage:
//! 100 means the forgery changed nothing, 0 means the bill doubled, and
//! anything past double goes negative.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::{compose_attacks, AttackSpec, ComposeError};
use crate::model::{total_cost, HouseholdScenario, TariffDay, SLOT_COUNT};
use crate::money::{div_round_half_away, Money, Ri};
use crate::optim::{OptimizeError, OptimizerResult, OptimizerSpec};

/// Which tariff the attacked run pays. The optimizer always sees the
/// forged prices; a real attacker cannot change the market rate, so the
/// default bills on the true tariff.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BillingMode {
    #[default]
    TrueTariff,
    ForgedTariff,
}

impl BillingMode {
    pub fn name(self) -> &'static str {
        match self {
            BillingMode::TrueTariff => "true_tariff",
            BillingMode::ForgedTariff => "forged_tariff",
        }
    }
}

impl fmt::Display for BillingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown billing mode {0:?}, expected true_tariff or forged_tariff")]
pub struct ParseBillingModeError(String);

impl FromStr for BillingMode {
    type Err = ParseBillingModeError;

    fn from_str(text: &str) -> Result<BillingMode, ParseBillingModeError> {
        match text {
            "true_tariff" => Ok(BillingMode::TrueTariff),
            "forged_tariff" => Ok(BillingMode::ForgedTariff),
            other => Err(ParseBillingModeError(other.to_string())),
        }
    }
}

/// The index divides by the clean cost, so a slot that costs nothing
/// clean has no defined index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("resilience index is undefined when the clean cost is zero")]
pub struct UndefinedRi;

/// 100 minus the absolute cost change as a percentage of the clean cost.
///
/// Quantizes half away from zero, except that a nonzero change never
/// rounds all the way back to 100: full marks are reserved for a bill
/// the forgery did not move at all. Degenerate losses past the integer
/// range saturate.
pub fn resilience_index(attacked: Money, clean: Money) -> Result<Ri, UndefinedRi> {
    if clean.0 <= 0 {
        return Err(UndefinedRi);
    }
    let delta = i128::from(attacked.0 - clean.0).abs();
    let mut penalty = div_round_half_away(delta * i128::from(Ri::FULL.0), i128::from(clean.0));
    if delta > 0 && penalty == 0 {
        penalty = 1;
    }
    let ri = i128::from(Ri::FULL.0) - penalty;
    Ok(Ri(i64::try_from(ri).unwrap_or(i64::MIN)))
}

/// One clean-vs-attacked pair, both runs seeded identically.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    /// Optimizer and full parameter echo, seed included.
    pub optimizer: OptimizerSpec,
    pub billing: BillingMode,
    /// The forgery that was applied, in application order.
    pub attacks: Vec<AttackSpec>,
    /// Optimized and billed on the true tariff.
    pub clean: OptimizerResult,
    /// Optimized on the forged tariff, billed per `billing`. Under
    /// true-tariff billing the cost fields hold the real bill while the
    /// history keeps what the optimizer believed it was paying.
    pub attacked: OptimizerResult,
    /// Index over daily totals.
    pub ri_total: Ri,
    /// Slotwise index; `None` marks slots with zero clean cost.
    pub ri_hourly: [Option<Ri>; SLOT_COUNT],
}

impl ExperimentReport {
    pub fn clean_total(&self) -> Money {
        self.clean.cost.total
    }

    pub fn attacked_total(&self) -> Money {
        self.attacked.cost.total
    }

    /// Mean of the defined hourly indices: the alternative aggregation to
    /// `ri_total`, which works over daily totals. The two agree only when
    /// hourly damage is uniform, so both are reported.
    pub fn ri_hourly_mean(&self) -> Option<Ri> {
        let defined: Vec<i64> = self.ri_hourly.iter().flatten().map(|ri| ri.0).collect();
        if defined.is_empty() {
            return None;
        }
        let sum: i128 = defined.iter().map(|&v| i128::from(v)).sum();
        Some(Ri(
            div_round_half_away(sum, defined.len() as i128) as i64
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Attack(#[from] ComposeError),
    #[error(transparent)]
    UndefinedRi(#[from] UndefinedRi),
    #[error("seed sweep needs at least one seed")]
    NoSeeds,
}

/// Runs the clean and attacked legs and scores the pair.
pub fn run_experiment(
    scenario: &HouseholdScenario,
    true_tariff: &TariffDay,
    attacks: &[AttackSpec],
    optimizer: &OptimizerSpec,
    billing: BillingMode,
) -> Result<ExperimentReport, ExperimentError> {
    let clean = optimizer.run(scenario, true_tariff)?;
    let forged = compose_attacks(true_tariff, attacks)?;
    let mut attacked = optimizer.run(scenario, &forged)?;
    if billing == BillingMode::TrueTariff {
        attacked.cost = total_cost(&attacked.schedule, true_tariff, scenario)
            .map_err(|e| OptimizeError::Internal(format!("attacked run emitted {e}")))?;
    }
    let ri_total = resilience_index(attacked.cost.total, clean.cost.total)?;
    let mut ri_hourly = [None; SLOT_COUNT];
    for slot in 0..SLOT_COUNT {
        if clean.cost.hourly[slot].0 > 0 {
            ri_hourly[slot] = Some(
                resilience_index(attacked.cost.hourly[slot], clean.cost.hourly[slot])
                    .expect("clean hourly cost is positive"),
            );
        }
    }
    Ok(ExperimentReport {
        optimizer: optimizer.clone(),
        billing,
        attacks: attacks.to_vec(),
        clean,
        attacked,
        ri_total,
        ri_hourly,
    })
}

/// mean, smallest, and largest of one tracked quantity across a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stats<T> {
    pub mean: T,
    pub min: T,
    pub max: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSummary {
    pub ri_total: Stats<Ri>,
    pub clean_total: Stats<Money>,
    pub attacked_total: Stats<Money>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSweep {
    /// One report per requested seed, in the order given.
    pub reports: Vec<ExperimentReport>,
    pub summary: SweepSummary,
}

fn summarize(values: impl Iterator<Item = i64> + Clone) -> Stats<i64> {
    let sum: i128 = values.clone().map(i128::from).sum();
    let count = values.clone().count() as i128;
    Stats {
        mean: div_round_half_away(sum, count) as i64,
        min: values.clone().min().expect("sweep is non-empty"),
        max: values.max().expect("sweep is non-empty"),
    }
}

/// Reruns the experiment once per seed and folds summary statistics.
/// Seedless optimizers simply repeat.
pub fn sweep_seeds(
    scenario: &HouseholdScenario,
    true_tariff: &TariffDay,
    attacks: &[AttackSpec],
    optimizer: &OptimizerSpec,
    billing: BillingMode,
    seeds: &[u64],
) -> Result<SeedSweep, ExperimentError> {
    if seeds.is_empty() {
        return Err(ExperimentError::NoSeeds);
    }
    let reports = seeds
        .iter()
        .map(|&seed| {
            run_experiment(scenario, true_tariff, attacks, &optimizer.seeded(seed), billing)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ri = summarize(reports.iter().map(|r| r.ri_total.0));
    let clean = summarize(reports.iter().map(|r| r.clean_total().0));
    let attacked = summarize(reports.iter().map(|r| r.attacked_total().0));
    Ok(SeedSweep {
        summary: SweepSummary {
            ri_total: Stats {
                mean: Ri(ri.mean),
                min: Ri(ri.min),
                max: Ri(ri.max),
            },
            clean_total: Stats {
                mean: Money(clean.mean),
                min: Money(clean.min),
                max: Money(clean.max),
            },
            attacked_total: Stats {
                mean: Money(attacked.mean),
                min: Money(attacked.min),
                max: Money(attacked.max),
            },
        },
        reports,
    })
}
