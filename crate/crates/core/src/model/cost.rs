//! The cost objective: pricing a feasible schedule under a tariff.

use thiserror::Error;

use crate::money::Money;
use super::scenario::{HouseholdScenario, ViolationList};
use super::schedule::{validate_schedule, Schedule, SLOT_COUNT};
use super::tariff::TariffDay;

/// Slot-by-slot cost of one day. `total` is always the exact sum of `hourly`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostBreakdown {
    pub hourly: [Money; SLOT_COUNT],
    pub total: Money,
}

impl CostBreakdown {
    pub fn from_hourly(hourly: [Money; SLOT_COUNT]) -> CostBreakdown {
        CostBreakdown {
            hourly,
            total: hourly.iter().copied().sum(),
        }
    }
}

/// The schedule broke at least one feasibility rule; no cost is defined.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("schedule is infeasible: {0}")]
pub struct InfeasibleSchedule(pub ViolationList);

/// Prices a schedule: each active appliance-slot contributes its hourly
/// energy at that slot's rate. Exact integer arithmetic throughout, so the
/// breakdown's total never drifts from the sum of its parts.
pub fn total_cost(
    schedule: &Schedule,
    tariff: &TariffDay,
    scenario: &HouseholdScenario,
) -> Result<CostBreakdown, InfeasibleSchedule> {
    let violations = validate_schedule(schedule, scenario);
    if !violations.is_empty() {
        return Err(InfeasibleSchedule(ViolationList(violations)));
    }
    let mut hourly = [Money::ZERO; SLOT_COUNT];
    for appliance in scenario.appliances() {
        let slots = schedule
            .get(&appliance.id)
            .expect("validated schedule covers every appliance");
        for slot in slots.iter() {
            hourly[slot] += tariff.price(slot).energy_cost(appliance.power_wh);
        }
    }
    Ok(CostBreakdown::from_hourly(hourly))
}
