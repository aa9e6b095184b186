//! Hour-slot sets, schedules, and feasibility checking.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::appliance::ApplianceKind;
use super::scenario::HouseholdScenario;

/// Number of hourly slots in a scheduling day. Slot 0 covers midnight to 1 am.
pub const SLOT_COUNT: usize = 24;

const FULL_MASK: u32 = (1 << SLOT_COUNT) - 1;

/// A set of hour slots, encoded as a 24-bit mask.
///
/// The textual form is a comma-separated list of slots and inclusive ranges,
/// e.g. `7-10,18-19`; `all` and `none` denote the full and empty set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SlotMask(u32);

impl SlotMask {
    pub const EMPTY: SlotMask = SlotMask(0);
    pub const ALL: SlotMask = SlotMask(FULL_MASK);

    /// An unbroken run of `len` slots starting at `start`.
    /// Panics if the run does not fit in the day.
    pub fn run(start: usize, len: usize) -> SlotMask {
        assert!(
            start + len <= SLOT_COUNT,
            "slot run {start}+{len} does not fit in a day"
        );
        if len == 0 {
            return SlotMask::EMPTY;
        }
        SlotMask(((1u32 << len) - 1) << start)
    }

    /// Collects arbitrary slots. Panics on a slot outside the day.
    pub fn from_slots<I: IntoIterator<Item = usize>>(slots: I) -> SlotMask {
        let mut mask = SlotMask::EMPTY;
        for slot in slots {
            mask.insert(slot);
        }
        mask
    }

    pub fn contains(self, slot: usize) -> bool {
        slot < SLOT_COUNT && self.0 & (1 << slot) != 0
    }

    pub fn insert(&mut self, slot: usize) {
        assert!(slot < SLOT_COUNT, "slot {slot} out of range");
        self.0 |= 1 << slot;
    }

    pub fn remove(&mut self, slot: usize) {
        assert!(slot < SLOT_COUNT, "slot {slot} out of range");
        self.0 &= !(1 << slot);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Lowest active slot.
    pub fn first(self) -> Option<usize> {
        if self.is_empty() {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Highest active slot.
    pub fn last(self) -> Option<usize> {
        if self.is_empty() {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    /// True when the active slots form one unbroken run.
    /// The empty set does not count as a run.
    pub fn is_contiguous(self) -> bool {
        match self.first() {
            None => false,
            Some(first) => {
                let shifted = self.0 >> first;
                shifted & (shifted + 1) == 0
            }
        }
    }

    /// Active slots in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..SLOT_COUNT).filter(move |&s| self.contains(s))
    }

    /// True when every slot of `self` is also in `other`.
    pub fn is_subset_of(self, other: SlotMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when the two sets share no slot.
    pub fn is_disjoint(self, other: SlotMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Raw bit pattern; bit `i` set means slot `i` is active.
    pub fn bits(self) -> u32 {
        self.0
    }
}

impl fmt::Display for SlotMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "none");
        }
        if *self == SlotMask::ALL {
            return write!(f, "all");
        }
        let mut first_item = true;
        let mut slot = 0;
        while slot < SLOT_COUNT {
            if !self.contains(slot) {
                slot += 1;
                continue;
            }
            let start = slot;
            while slot < SLOT_COUNT && self.contains(slot) {
                slot += 1;
            }
            let end = slot - 1;
            if !first_item {
                write!(f, ",")?;
            }
            first_item = false;
            if start == end {
                write!(f, "{start}")?;
            } else {
                write!(f, "{start}-{end}")?;
            }
        }
        Ok(())
    }
}

/// A slot list that does not parse.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseSlotsError {
    #[error("`{0}` is not a slot or slot range")]
    Malformed(String),
    #[error("slot {0} is outside 0..{SLOT_COUNT}")]
    OutOfRange(usize),
    #[error("range `{0}` runs backwards")]
    Backwards(String),
}

impl FromStr for SlotMask {
    type Err = ParseSlotsError;

    fn from_str(text: &str) -> Result<SlotMask, ParseSlotsError> {
        let text = text.trim();
        match text {
            "all" => return Ok(SlotMask::ALL),
            "none" => return Ok(SlotMask::EMPTY),
            _ => {}
        }
        let slot = |part: &str| -> Result<usize, ParseSlotsError> {
            let n: usize = part
                .trim()
                .parse()
                .map_err(|_| ParseSlotsError::Malformed(part.trim().to_string()))?;
            if n >= SLOT_COUNT {
                return Err(ParseSlotsError::OutOfRange(n));
            }
            Ok(n)
        };
        let mut mask = SlotMask::EMPTY;
        for item in text.split(',') {
            match item.split_once('-') {
                None => mask.insert(slot(item)?),
                Some((a, b)) => {
                    let (start, end) = (slot(a)?, slot(b)?);
                    if start > end {
                        return Err(ParseSlotsError::Backwards(item.trim().to_string()));
                    }
                    for s in start..=end {
                        mask.insert(s);
                    }
                }
            }
        }
        Ok(mask)
    }
}

impl Serialize for SlotMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<SlotMask, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-appliance activation slots; the decision variable of the whole crate.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    assignment: BTreeMap<String, SlotMask>,
}

impl Schedule {
    pub fn new() -> Schedule {
        Schedule::default()
    }

    pub fn set(&mut self, id: impl Into<String>, slots: SlotMask) {
        self.assignment.insert(id.into(), slots);
    }

    pub fn get(&self, id: &str) -> Option<SlotMask> {
        self.assignment.get(id).copied()
    }

    /// Entries in ascending appliance-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, SlotMask)> {
        self.assignment.iter().map(|(id, &m)| (id.as_str(), m))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// A broken feasibility rule, as data. Validation reports all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The schedule names an appliance the scenario does not have.
    UnknownAppliance { id: String },
    /// A scenario appliance has no entry in the schedule.
    MissingAppliance { id: String },
    /// Active slot count differs from the appliance's operating slots.
    SlotCount {
        id: String,
        expected: usize,
        actual: usize,
    },
    /// A fixed appliance deviates from its required profile.
    FixedProfileMismatch {
        id: String,
        expected: SlotMask,
        actual: SlotMask,
    },
    /// An uninterruptible appliance's slots are not one unbroken run.
    BrokenRun { id: String, slots: SlotMask },
    /// A successor starts before its predecessor has finished.
    PrecedenceOrder {
        predecessor: String,
        successor: String,
        predecessor_end: usize,
        successor_start: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownAppliance { id } => {
                write!(f, "`{id}` is not an appliance of this scenario")
            }
            Violation::MissingAppliance { id } => {
                write!(f, "`{id}` has no scheduled slots")
            }
            Violation::SlotCount {
                id,
                expected,
                actual,
            } => write!(f, "`{id}` runs {actual} slot(s), needs {expected}"),
            Violation::FixedProfileMismatch {
                id,
                expected,
                actual,
            } => write!(f, "`{id}` must run exactly at {expected}, got {actual}"),
            Violation::BrokenRun { id, slots } => {
                write!(f, "`{id}` must run without interruption, got {slots}")
            }
            Violation::PrecedenceOrder {
                predecessor,
                successor,
                predecessor_end,
                successor_start,
            } => write!(
                f,
                "`{successor}` starts at slot {successor_start} before `{predecessor}` \
                 ends at slot {predecessor_end}"
            ),
        }
    }
}

/// Checks a schedule against every scenario rule and returns all violations,
/// in a deterministic order: unknown ids first, then per-appliance rules in
/// ascending id order, then the precedence pairs in scenario order.
pub fn validate_schedule(schedule: &Schedule, scenario: &HouseholdScenario) -> Vec<Violation> {
    let mut out = Vec::new();
    for (id, _) in schedule.iter() {
        if scenario.appliance(id).is_none() {
            out.push(Violation::UnknownAppliance { id: id.to_string() });
        }
    }
    for appliance in scenario.appliances() {
        let Some(slots) = schedule.get(&appliance.id) else {
            out.push(Violation::MissingAppliance {
                id: appliance.id.clone(),
            });
            continue;
        };
        if slots.len() != appliance.operating_slots {
            out.push(Violation::SlotCount {
                id: appliance.id.clone(),
                expected: appliance.operating_slots,
                actual: slots.len(),
            });
        }
        match appliance.kind {
            ApplianceKind::Fixed => {
                if let Some(profile) = appliance.fixed_profile {
                    if slots != profile {
                        out.push(Violation::FixedProfileMismatch {
                            id: appliance.id.clone(),
                            expected: profile,
                            actual: slots,
                        });
                    }
                }
            }
            ApplianceKind::FlexibleUninterruptible => {
                if !slots.is_empty() && !slots.is_contiguous() {
                    out.push(Violation::BrokenRun {
                        id: appliance.id.clone(),
                        slots,
                    });
                }
            }
            ApplianceKind::FlexibleInterruptible => {}
        }
    }
    for (predecessor, successor) in scenario.precedence() {
        let (Some(pred), Some(succ)) = (schedule.get(predecessor), schedule.get(successor)) else {
            continue;
        };
        if let (Some(pred_end), Some(succ_start)) = (pred.last(), succ.first()) {
            if succ_start < pred_end + 1 {
                out.push(Violation::PrecedenceOrder {
                    predecessor: predecessor.clone(),
                    successor: successor.clone(),
                    predecessor_end: pred_end,
                    successor_start: succ_start,
                });
            }
        }
    }
    out
}
