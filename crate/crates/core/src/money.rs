//! Fixed-point money, prices, and percentages.
//!
//! All cost accounting is integer arithmetic so that results are exact,
//! platform independent, and bit-for-bit reproducible:
//!
//! * [`Price`] is a tariff rate in tenths of a cent per kWh.
//! * [`Money`] is an accumulated cost in ten-thousandths of a cent. One
//!   watt-hour at 0.1 c/kWh costs exactly one unit, so the product of a
//!   watt-hour rating and a [`Price`] always lands on this grid and slot
//!   costs sum to daily totals with no rounding anywhere.
//! * [`Ri`] is a percentage in ten-thousandths of a percent.
//!
//! The only rounding in the crate happens on division and display, and it is
//! always round-half-away-from-zero.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// [`Money`] units per cent.
pub const MONEY_PER_CENT: i64 = 10_000;

/// [`Price`] units per cent.
pub const PRICE_PER_CENT: i64 = 10;

/// A cost amount in ten-thousandths of a cent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub i64);

impl Money {
    pub const ZERO: Money = Money(0);

    /// Whole cents, mostly for tests and examples.
    pub fn from_cents(cents: i64) -> Money {
        Money(cents * MONEY_PER_CENT)
    }

    /// Value rounded to tenths of a cent, the display resolution.
    pub fn display_tenths(self) -> i64 {
        div_round_half_away(i128::from(self.0), 1_000) as i64
    }
}

/// Prints cents with one decimal digit, e.g. `1307.2`.
impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tenths = self.display_tenths();
        if tenths < 0 {
            write!(f, "-")?;
        }
        let abs = tenths.abs();
        write!(f, "{}.{}", abs / 10, abs % 10)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money(self.0 * rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

/// A tariff rate in tenths of a cent per kWh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Price(pub i64);

impl Price {
    /// Rate from tenths of a cent, e.g. `Price::from_tenths(208)` is 20.8 c/kWh.
    pub fn from_tenths(tenths: i64) -> Price {
        Price(tenths)
    }

    /// Exact parse of a decimal rate with at most one fractional digit.
    pub fn parse(text: &str) -> Result<Price, DecimalError> {
        parse_decimal(text, 1).map(Price)
    }

    /// Rate from a float that must sit on the 0.1-cent grid.
    pub fn from_f64(value: f64) -> Result<Price, DecimalError> {
        f64_to_scaled(value, PRICE_PER_CENT, "0.1").map(Price)
    }

    /// Cost of drawing `power_wh` watt-hours during one slot at this rate.
    /// Exact: 1 Wh times 1 tenth-cent/kWh is exactly one [`Money`] unit.
    pub fn energy_cost(self, power_wh: u32) -> Money {
        Money(self.0 * i64::from(power_wh))
    }
}

/// Prints cents per kWh with one decimal digit, e.g. `20.8`.
impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 0 {
            write!(f, "-")?;
        }
        let abs = self.0.abs();
        write!(f, "{}.{}", abs / 10, abs % 10)
    }
}

/// A percentage in ten-thousandths of a percent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ri(pub i64);

impl Ri {
    /// Exactly 100 percent.
    pub const FULL: Ri = Ri(1_000_000);
}

/// Prints percent with four decimal digits, e.g. `98.2000`.
impl fmt::Display for Ri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 0 {
            write!(f, "-")?;
        }
        let abs = self.0.abs();
        write!(f, "{}.{:04}", abs / 10_000, abs % 10_000)
    }
}

/// Integer division rounding half away from zero. `den` must be positive.
pub fn div_round_half_away(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let sign = if num < 0 { -1 } else { 1 };
    sign * ((num.abs() * 2 + den) / (den * 2))
}

/// A decimal literal that does not fit the expected grid.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecimalError {
    #[error("`{0}` is not a decimal number")]
    Malformed(String),
    #[error("`{value}` has more than {max_frac} decimal place(s)")]
    TooPrecise { value: String, max_frac: u32 },
    #[error("`{value}` is not a positive multiple of {step}")]
    OffGrid { value: String, step: &'static str },
}

/// Parses a decimal string into an integer scaled by `10^frac_digits`.
/// Exact; rejects more fractional digits than allowed.
pub fn parse_decimal(text: &str, frac_digits: u32) -> Result<i64, DecimalError> {
    let malformed = || DecimalError::Malformed(text.to_string());
    let (sign, rest) = match text.strip_prefix('-') {
        Some(r) => (-1i64, r),
        None => (1i64, text),
    };
    let (whole, frac) = match rest.split_once('.') {
        Some((w, f)) => (w, f),
        None => (rest, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(malformed());
    }
    if frac.len() as u32 > frac_digits {
        return Err(DecimalError::TooPrecise {
            value: text.to_string(),
            max_frac: frac_digits,
        });
    }
    let digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if !digits(whole) || !digits(frac) {
        return Err(malformed());
    }
    let mut value: i64 = if whole.is_empty() {
        0
    } else {
        whole.parse().map_err(|_| malformed())?
    };
    for _ in 0..frac_digits {
        value = value.checked_mul(10).ok_or_else(malformed)?;
    }
    if !frac.is_empty() {
        let mut f: i64 = frac.parse().map_err(|_| malformed())?;
        for _ in 0..(frac_digits - frac.len() as u32) {
            f *= 10;
        }
        value = value.checked_add(f).ok_or_else(malformed)?;
    }
    Ok(sign * value)
}

/// Converts a float that should be `n / scale` for a positive integer `n`.
/// Tolerates only float representation error, not genuinely off-grid values.
pub fn f64_to_scaled(value: f64, scale: i64, step: &'static str) -> Result<i64, DecimalError> {
    let scaled = value * scale as f64;
    let nearest = scaled.round();
    if !scaled.is_finite() || (scaled - nearest).abs() > 1e-6 || nearest < 1.0 || nearest > 1e15 {
        return Err(DecimalError::OffGrid {
            value: format!("{value}"),
            step,
        });
    }
    Ok(nearest as i64)
}
