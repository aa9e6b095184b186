//! Domain model: appliances, tariffs, schedules, and the cost objective.

mod appliance;
mod cost;
mod scenario;
mod schedule;
mod tariff;

pub use appliance::{Appliance, ApplianceKind};
pub use cost::{total_cost, CostBreakdown, InfeasibleSchedule};
pub use scenario::{HouseholdScenario, ScenarioError, ViolationList};
pub use schedule::{
    validate_schedule, ParseSlotsError, Schedule, SlotMask, Violation, SLOT_COUNT,
};
pub use tariff::{Band, Season, TariffDay, TariffError};
