//! Time-of-use tariffs: one day of hourly prices with advertised bands.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::Price;
use super::schedule::SLOT_COUNT;

/// Advertised rate band of a slot. Bands are metadata shown to customers;
/// every cost computation reads the prices alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    OffPeak,
    MidPeak,
    Peak,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::OffPeak => "off_peak",
            Band::MidPeak => "mid_peak",
            Band::Peak => "peak",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Summer,
    Winter,
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Season::Summer => "summer",
            Season::Winter => "winter",
        })
    }
}

/// A price on a tariff must be positive.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("price {price} at slot {slot} is not positive")]
pub struct TariffError {
    pub slot: usize,
    pub price: Price,
}

/// One day of hourly prices. Immutable once constructed; attacks and other
/// transformations build new values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TariffDay {
    prices: [Price; SLOT_COUNT],
    bands: [Band; SLOT_COUNT],
    season: Season,
}

impl TariffDay {
    pub fn new(
        prices: [Price; SLOT_COUNT],
        bands: [Band; SLOT_COUNT],
        season: Season,
    ) -> Result<TariffDay, TariffError> {
        for (slot, &price) in prices.iter().enumerate() {
            if price.0 <= 0 {
                return Err(TariffError { slot, price });
            }
        }
        Ok(TariffDay {
            prices,
            bands,
            season,
        })
    }

    /// Uniform price all day, banded off-peak. Panics on a non-positive price.
    pub fn flat(price: Price, season: Season) -> TariffDay {
        TariffDay::new([price; SLOT_COUNT], [Band::OffPeak; SLOT_COUNT], season)
            .expect("flat tariff price must be positive")
    }

    pub fn prices(&self) -> &[Price; SLOT_COUNT] {
        &self.prices
    }

    pub fn price(&self, slot: usize) -> Price {
        self.prices[slot]
    }

    pub fn bands(&self) -> &[Band; SLOT_COUNT] {
        &self.bands
    }

    pub fn band(&self, slot: usize) -> Band {
        self.bands[slot]
    }

    pub fn season(&self) -> Season {
        self.season
    }
}
