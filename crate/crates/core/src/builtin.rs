//! The shipped example household and tariffs, compiled in so tests and
//! documentation never depend on working-directory layout. The same files
//! live under `fixtures/` for use with the command line.

use crate::files::{household_from_str, tariff_from_str};
use crate::model::{HouseholdScenario, Season, TariffDay};

pub const HOUSEHOLD_TOML: &str = include_str!("../fixtures/household.toml");
pub const TARIFF_WINTER_TOML: &str = include_str!("../fixtures/tariff_winter.toml");
pub const TARIFF_SUMMER_TOML: &str = include_str!("../fixtures/tariff_summer.toml");

/// The eight-load example household.
pub fn household() -> HouseholdScenario {
    household_from_str(HOUSEHOLD_TOML).expect("shipped household parses")
}

pub fn tariff(season: Season) -> TariffDay {
    let text = match season {
        Season::Winter => TARIFF_WINTER_TOML,
        Season::Summer => TARIFF_SUMMER_TOML,
    };
    tariff_from_str(text).expect("shipped tariff parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{total_cost, validate_schedule, ApplianceKind};
    use crate::money::Money;

    #[test]
    fn shipped_household_shape() {
        let scenario = household();
        assert_eq!(scenario.appliances().len(), 8);
        let flexible = scenario
            .appliances()
            .iter()
            .filter(|a| a.is_flexible())
            .count();
        assert_eq!(flexible, 4);
        let iron = scenario.appliance("iron").unwrap();
        assert_eq!(iron.kind, ApplianceKind::FlexibleUninterruptible);
        assert_eq!(iron.power_wh, 1_800);
        assert!(validate_schedule(scenario.baseline(), &scenario).is_empty());
    }

    #[test]
    fn winter_baseline_bill_is_pinned() {
        let scenario = household();
        let tariff = tariff(Season::Winter);
        let cost = total_cost(scenario.baseline(), &tariff, &scenario).unwrap();
        // Unmanaged winter day: 1307.2 cents, checked by hand per load.
        assert_eq!(cost.total, Money(13_072_260));
        assert_eq!(cost.total.to_string(), "1307.2");
    }

    #[test]
    fn both_tariffs_cover_the_day_with_positive_prices() {
        for season in [Season::Winter, Season::Summer] {
            let tariff = tariff(season);
            assert_eq!(tariff.season(), season);
            for slot in 0..crate::model::SLOT_COUNT {
                assert!(tariff.price(slot).0 > 0);
            }
        }
    }
}
