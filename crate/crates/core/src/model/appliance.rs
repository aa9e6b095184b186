//! Household loads and their flexibility classes.

use serde::{Deserialize, Serialize};

use super::schedule::SlotMask;

/// How much scheduling freedom a load gives the optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplianceKind {
    /// Runs at a fixed profile; never a decision variable.
    Fixed,
    /// Movable, but must run as one unbroken block.
    FlexibleUninterruptible,
    /// Movable, and its operating hours may be scattered over the day.
    FlexibleInterruptible,
}

/// One household load.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Appliance {
    pub id: String,
    pub kind: ApplianceKind,
    /// Energy drawn per active hour, in watt-hours.
    pub power_wh: u32,
    /// Hour slots the load must be active per day.
    pub operating_slots: usize,
    /// Required activation slots; present exactly when `kind` is [`ApplianceKind::Fixed`].
    pub fixed_profile: Option<SlotMask>,
}

impl Appliance {
    pub fn fixed(id: impl Into<String>, power_wh: u32, profile: SlotMask) -> Appliance {
        Appliance {
            id: id.into(),
            kind: ApplianceKind::Fixed,
            power_wh,
            operating_slots: profile.len(),
            fixed_profile: Some(profile),
        }
    }

    pub fn uninterruptible(
        id: impl Into<String>,
        power_wh: u32,
        operating_slots: usize,
    ) -> Appliance {
        Appliance {
            id: id.into(),
            kind: ApplianceKind::FlexibleUninterruptible,
            power_wh,
            operating_slots,
            fixed_profile: None,
        }
    }

    pub fn interruptible(
        id: impl Into<String>,
        power_wh: u32,
        operating_slots: usize,
    ) -> Appliance {
        Appliance {
            id: id.into(),
            kind: ApplianceKind::FlexibleInterruptible,
            power_wh,
            operating_slots,
            fixed_profile: None,
        }
    }

    pub fn is_flexible(&self) -> bool {
        self.kind != ApplianceKind::Fixed
    }
}
