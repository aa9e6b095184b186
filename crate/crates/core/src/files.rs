//! On-disk formats for households and tariffs.
//!
//! Both formats are small hand-editable TOML files. Powers and prices are
//! written as decimals in everyday units (kilowatts, cents per
//! kilowatt-hour) and converted exactly to the internal integer grids;
//! a value that does not land on its grid is rejected rather than
//! silently rounded. Unknown keys are hard errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::model::{
    Appliance, Band, HouseholdScenario, Schedule, ScenarioError, Season, SlotMask, TariffDay,
    SLOT_COUNT,
};
use crate::money::{f64_to_scaled, Price};

/// Parse troubles cover everything from a missing file to a schema or
/// value error; infeasible means the file parsed but describes a
/// household that cannot run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileErrorKind {
    Parse,
    Infeasible,
}

/// A load failure before any path is known. `load_*` wrappers attach one.
#[derive(Clone, Debug)]
pub struct LoadError {
    pub line: Option<usize>,
    pub kind: FileErrorKind,
    pub message: String,
}

impl LoadError {
    fn parse(message: impl Into<String>) -> LoadError {
        LoadError {
            line: None,
            kind: FileErrorKind::Parse,
            message: message.into(),
        }
    }

    fn from_toml(err: toml::de::Error, text: &str) -> LoadError {
        let line = err
            .span()
            .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
        LoadError {
            line,
            kind: FileErrorKind::Parse,
            message: err.message().to_string(),
        }
    }

    fn from_scenario(err: ScenarioError) -> LoadError {
        let kind = match err {
            ScenarioError::InfeasibleBaseline(_) | ScenarioError::PrecedenceCycle(_) => {
                FileErrorKind::Infeasible
            }
            _ => FileErrorKind::Parse,
        };
        LoadError {
            line: None,
            kind,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for LoadError {}

/// A load failure tied to the file it came from.
#[derive(Clone, Debug)]
pub struct FileError {
    pub path: PathBuf,
    pub error: LoadError,
}

impl FileError {
    pub fn kind(&self) -> FileErrorKind {
        self.error.kind
    }
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.error)
    }
}

impl std::error::Error for FileError {}

fn read_file(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|err| FileError {
        path: path.to_path_buf(),
        error: LoadError::parse(err.to_string()),
    })
}

fn at_path<T>(path: &Path, result: Result<T, LoadError>) -> Result<T, FileError> {
    result.map_err(|error| FileError {
        path: path.to_path_buf(),
        error,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum RawKind {
    Fixed,
    Uninterruptible,
    Interruptible,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAppliance {
    id: String,
    kind: RawKind,
    power_kw: f64,
    hours: Option<usize>,
    profile: Option<SlotMask>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHousehold {
    #[serde(default)]
    precedence: Vec<(String, String)>,
    appliances: Vec<RawAppliance>,
    baseline: BTreeMap<String, SlotMask>,
}

fn convert_appliance(raw: &RawAppliance) -> Result<Appliance, LoadError> {
    let bad = |what: &str| LoadError::parse(format!("appliance `{}`: {what}", raw.id));
    let milli = f64_to_scaled(raw.power_kw, 1_000, "0.001")
        .map_err(|e| bad(&format!("power_kw {e}")))?;
    let power_wh =
        u32::try_from(milli).map_err(|_| bad("power_kw is beyond any household circuit"))?;
    match raw.kind {
        RawKind::Fixed => {
            if raw.hours.is_some() {
                return Err(bad("a fixed appliance takes a profile, not hours"));
            }
            let profile = raw.profile.ok_or_else(|| bad("fixed kind needs a profile"))?;
            Ok(Appliance::fixed(&raw.id, power_wh, profile))
        }
        RawKind::Uninterruptible | RawKind::Interruptible => {
            if raw.profile.is_some() {
                return Err(bad("only fixed appliances take a profile"));
            }
            let hours = raw.hours.ok_or_else(|| bad("flexible kind needs hours"))?;
            Ok(match raw.kind {
                RawKind::Uninterruptible => Appliance::uninterruptible(&raw.id, power_wh, hours),
                _ => Appliance::interruptible(&raw.id, power_wh, hours),
            })
        }
    }
}

/// Parses a household document. Baseline entries for fixed appliances may
/// be omitted; they are filled in from the profiles.
pub fn household_from_str(text: &str) -> Result<HouseholdScenario, LoadError> {
    let raw: RawHousehold = toml::from_str(text).map_err(|e| LoadError::from_toml(e, text))?;
    let mut appliances = Vec::with_capacity(raw.appliances.len());
    for entry in &raw.appliances {
        appliances.push(convert_appliance(entry)?);
    }
    let mut baseline = Schedule::new();
    for (id, slots) in &raw.baseline {
        baseline.set(id.clone(), *slots);
    }
    for appliance in &appliances {
        if let (Some(profile), None) = (appliance.fixed_profile, baseline.get(&appliance.id)) {
            baseline.set(appliance.id.clone(), profile);
        }
    }
    HouseholdScenario::new(appliances, raw.precedence, baseline)
        .map_err(LoadError::from_scenario)
}

pub fn load_household(path: &Path) -> Result<HouseholdScenario, FileError> {
    let text = read_file(path)?;
    at_path(path, household_from_str(&text))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPeriod {
    band: Band,
    price: f64,
    slots: SlotMask,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTariff {
    season: Season,
    periods: Vec<RawPeriod>,
}

/// Parses a tariff document. The periods must tile the whole day.
pub fn tariff_from_str(text: &str) -> Result<TariffDay, LoadError> {
    let raw: RawTariff = toml::from_str(text).map_err(|e| LoadError::from_toml(e, text))?;
    let mut prices = [Price(0); SLOT_COUNT];
    let mut bands = [Band::OffPeak; SLOT_COUNT];
    let mut covered = SlotMask::EMPTY;
    for period in &raw.periods {
        let price = Price::from_f64(period.price)
            .map_err(|e| LoadError::parse(format!("period `{}`: price {e}", period.band)))?;
        for slot in period.slots.iter() {
            if covered.contains(slot) {
                return Err(LoadError::parse(format!("hour {slot} is priced twice")));
            }
            covered.insert(slot);
            prices[slot] = price;
            bands[slot] = period.band;
        }
    }
    if covered != SlotMask::ALL {
        let mut missing = SlotMask::EMPTY;
        for slot in 0..SLOT_COUNT {
            if !covered.contains(slot) {
                missing.insert(slot);
            }
        }
        return Err(LoadError::parse(format!("hours {missing} have no price")));
    }
    TariffDay::new(prices, bands, raw.season).map_err(|e| LoadError::parse(e.to_string()))
}

pub fn load_tariff(path: &Path) -> Result<TariffDay, FileError> {
    let text = read_file(path)?;
    at_path(path, tariff_from_str(&text))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_HOUSEHOLD: &str = r#"
precedence = [["washing_machine", "iron"]]

[[appliances]]
id = "lamp"
kind = "fixed"
power_kw = 0.1
profile = "18-22"

[[appliances]]
id = "washing_machine"
kind = "uninterruptible"
power_kw = 0.7
hours = 3

[[appliances]]
id = "iron"
kind = "uninterruptible"
power_kw = 1.8
hours = 2

[[appliances]]
id = "water_heater"
kind = "interruptible"
power_kw = 4.45
hours = 4

[baseline]
washing_machine = "1-3"
iron = "5-6"
water_heater = "0-3"
"#;

    const SMALL_TARIFF: &str = r#"
season = "winter"

[[periods]]
band = "off_peak"
price = 8.2
slots = "0-6,20-23"

[[periods]]
band = "peak"
price = 20.8
slots = "7-10,18-19"

[[periods]]
band = "mid_peak"
price = 14.4
slots = "11-17"
"#;

    #[test]
    fn household_parses_with_exact_powers_and_filled_baseline() {
        let scenario = household_from_str(SMALL_HOUSEHOLD).unwrap();
        let lamp = scenario.appliance("lamp").unwrap();
        assert_eq!(lamp.power_wh, 100);
        assert_eq!(lamp.fixed_profile, Some("18-22".parse().unwrap()));
        assert_eq!(scenario.appliance("water_heater").unwrap().power_wh, 4_450);
        assert_eq!(
            scenario.baseline().get("lamp"),
            Some("18-22".parse().unwrap())
        );
        assert_eq!(
            scenario.precedence(),
            &[("washing_machine".to_string(), "iron".to_string())]
        );
    }

    #[test]
    fn tariff_parses_bands_prices_and_season() {
        let tariff = tariff_from_str(SMALL_TARIFF).unwrap();
        assert_eq!(tariff.season(), Season::Winter);
        assert_eq!(tariff.price(0), Price(82));
        assert_eq!(tariff.price(7), Price(208));
        assert_eq!(tariff.price(12), Price(144));
        assert_eq!(tariff.band(7), Band::Peak);
        assert_eq!(tariff.band(21), Band::OffPeak);
    }

    #[test]
    fn syntax_errors_carry_a_line_number() {
        let err = household_from_str("appliances = [\nnonsense\n]").unwrap_err();
        assert_eq!(err.kind, FileErrorKind::Parse);
        assert_eq!(err.line, Some(2));
        assert!(err.to_string().starts_with("line 2:"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = household_from_str(&SMALL_HOUSEHOLD.replace("hours = 3", "hours = 3\nspin = 9"))
            .unwrap_err();
        assert_eq!(err.kind, FileErrorKind::Parse);
        assert!(err.message.contains("spin"));
    }

    #[test]
    fn appliance_shape_mismatches_are_named() {
        let missing_profile =
            household_from_str(&SMALL_HOUSEHOLD.replace("profile = \"18-22\"\n", ""))
                .unwrap_err();
        assert!(missing_profile.message.contains("lamp"));
        assert!(missing_profile.message.contains("profile"));

        let profile_on_flexible = household_from_str(
            &SMALL_HOUSEHOLD.replace("hours = 3", "hours = 3\nprofile = \"1-3\""),
        )
        .unwrap_err();
        assert!(profile_on_flexible.message.contains("washing_machine"));
    }

    #[test]
    fn off_grid_power_is_rejected_not_rounded() {
        let err = household_from_str(&SMALL_HOUSEHOLD.replace("0.7", "0.7004")).unwrap_err();
        assert_eq!(err.kind, FileErrorKind::Parse);
        assert!(err.message.contains("washing_machine"));
        assert!(err.message.contains("power_kw"));
    }

    #[test]
    fn scenario_problems_split_parse_from_infeasible() {
        let duplicated = SMALL_HOUSEHOLD.replace("id = \"lamp\"", "id = \"iron\"");
        let err = household_from_str(&duplicated).unwrap_err();
        assert_eq!(err.kind, FileErrorKind::Parse);

        let broken_precedence = SMALL_HOUSEHOLD.replace("iron = \"5-6\"", "iron = \"2-3\"");
        let err = household_from_str(&broken_precedence).unwrap_err();
        assert_eq!(err.kind, FileErrorKind::Infeasible);

        let cycle = SMALL_HOUSEHOLD.replace(
            "precedence = [[\"washing_machine\", \"iron\"]]",
            "precedence = [[\"washing_machine\", \"iron\"], [\"iron\", \"washing_machine\"]]",
        );
        let err = household_from_str(&cycle).unwrap_err();
        assert_eq!(err.kind, FileErrorKind::Infeasible);
    }

    #[test]
    fn tariff_must_tile_the_day() {
        let gap = SMALL_TARIFF.replace("slots = \"11-17\"", "slots = \"11-16\"");
        let err = tariff_from_str(&gap).unwrap_err();
        assert!(err.message.contains("17"));
        assert!(err.message.contains("no price"));

        let overlap = SMALL_TARIFF.replace("slots = \"11-17\"", "slots = \"10-17\"");
        let err = tariff_from_str(&overlap).unwrap_err();
        assert!(err.message.contains("hour 10"));
    }

    #[test]
    fn off_grid_price_is_rejected() {
        let err = tariff_from_str(&SMALL_TARIFF.replace("8.2", "8.25")).unwrap_err();
        assert!(err.message.contains("off_peak"));
        assert!(err.message.contains("price"));
    }

    #[test]
    fn missing_file_reports_the_path() {
        let err = load_household(Path::new("no/such/household.toml")).unwrap_err();
        assert_eq!(err.kind(), FileErrorKind::Parse);
        assert!(err.to_string().contains("no/such/household.toml"));
    }
}
