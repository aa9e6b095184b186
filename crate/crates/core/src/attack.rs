//! Forged-price transformations of a tariff signal.
//!
//! An attack rewrites the prices a scheduler sees; it never touches the
//! tariff the household is actually billed on. Compositions run on exact
//! rationals and quantize back to the price grid once at the end, so
//! inverse pairs such as a doubling followed by a halving cancel exactly.
//!
//! Band labels and the season ride along unchanged. The forger rewrites
//! prices, and schedulers only ever read prices, so stale labels cannot
//! leak into a decision.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::{SlotMask, TariffDay, SLOT_COUNT};
use crate::money::{div_round_half_away, Price};

type Rat = Ratio<i128>;

/// One tariff-forging transformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttackSpec {
    /// Multiplies the price in the chosen slots by a positive factor.
    Scale { factor: Ratio<i64>, slots: SlotMask },
    /// Replays stale prices: the forged slot t shows the true price of
    /// slot (t - hours) mod 24.
    Delay { hours: usize },
    /// Overwrites the chosen slots with one fixed price.
    PeakLower { new_price: Price, slots: SlotMask },
    /// Swaps price values between two disjoint slot sets, pairing them
    /// off in ascending slot order.
    PeakShift { from: SlotMask, to: SlotMask },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InvalidAttack {
    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(Ratio<i64>),
    #[error("delay must be under 24 hours, got {0}")]
    DelayTooLong(usize),
    #[error("forged price must be positive, got {0} cents per kWh")]
    NonPositivePrice(Price),
    #[error("peak shift needs equally sized slot sets, got {from} and {to} slots")]
    ShiftSizeMismatch { from: usize, to: usize },
    #[error("peak shift slot sets overlap at {0}")]
    ShiftOverlap(SlotMask),
}

/// An invalid attack inside a composition, tagged with its position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("attack {index}: {source}")]
pub struct ComposeError {
    pub index: usize,
    #[source]
    pub source: InvalidAttack,
}

impl AttackSpec {
    pub fn validate(&self) -> Result<(), InvalidAttack> {
        match *self {
            AttackSpec::Scale { factor, .. } => {
                if factor <= Ratio::from_integer(0) {
                    return Err(InvalidAttack::NonPositiveFactor(factor));
                }
            }
            AttackSpec::Delay { hours } => {
                if hours >= SLOT_COUNT {
                    return Err(InvalidAttack::DelayTooLong(hours));
                }
            }
            AttackSpec::PeakLower { new_price, .. } => {
                if new_price.0 <= 0 {
                    return Err(InvalidAttack::NonPositivePrice(new_price));
                }
            }
            AttackSpec::PeakShift { from, to } => {
                if from.len() != to.len() {
                    return Err(InvalidAttack::ShiftSizeMismatch {
                        from: from.len(),
                        to: to.len(),
                    });
                }
                if !from.is_disjoint(to) {
                    return Err(InvalidAttack::ShiftOverlap(SlotMask::from_slots(
                        from.iter().filter(|&s| to.contains(s)),
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AttackSpec::Scale { .. } => "scale",
            AttackSpec::Delay { .. } => "delay",
            AttackSpec::PeakLower { .. } => "peak_lower",
            AttackSpec::PeakShift { .. } => "peak_shift",
        }
    }

    /// Rewrites the rational price table in place. Callers validate first.
    fn forge(&self, prices: &mut [Rat; SLOT_COUNT]) {
        debug_assert!(self.validate().is_ok());
        match *self {
            AttackSpec::Scale { factor, slots } => {
                let wide = Ratio::new(i128::from(*factor.numer()), i128::from(*factor.denom()));
                for slot in slots.iter() {
                    prices[slot] *= wide;
                }
            }
            AttackSpec::Delay { hours } => {
                prices.rotate_right(hours);
            }
            AttackSpec::PeakLower { new_price, slots } => {
                for slot in slots.iter() {
                    prices[slot] = Rat::from_integer(i128::from(new_price.0));
                }
            }
            AttackSpec::PeakShift { from, to } => {
                for (a, b) in from.iter().zip(to.iter()) {
                    prices.swap(a, b);
                }
            }
        }
    }
}

/// Applies one attack; see [`compose_attacks`] for chains.
pub fn apply_attack(tariff: &TariffDay, attack: &AttackSpec) -> Result<TariffDay, InvalidAttack> {
    compose_attacks(tariff, std::slice::from_ref(attack)).map_err(|e| e.source)
}

/// Applies attacks in order on an exact rational price table, then
/// quantizes once back to the price grid, rounding halves away from zero.
/// A forged price that would quantize to zero is clamped up to the
/// smallest positive grid price.
pub fn compose_attacks(
    tariff: &TariffDay,
    attacks: &[AttackSpec],
) -> Result<TariffDay, ComposeError> {
    let mut prices = [Rat::from_integer(0); SLOT_COUNT];
    for (slot, p) in prices.iter_mut().enumerate() {
        *p = Rat::from_integer(i128::from(tariff.price(slot).0));
    }
    for (index, attack) in attacks.iter().enumerate() {
        attack
            .validate()
            .map_err(|source| ComposeError { index, source })?;
        attack.forge(&mut prices);
    }
    let mut quantized = [Price(0); SLOT_COUNT];
    for (slot, p) in prices.iter().enumerate() {
        let grid = div_round_half_away(*p.numer(), *p.denom()).max(1);
        quantized[slot] = Price(i64::try_from(grid).expect("forged price fits the money range"));
    }
    Ok(TariffDay::new(quantized, *tariff.bands(), tariff.season())
        .expect("quantized prices stay positive"))
}

/// Renders a positive rational as its exact decimal when the denominator
/// is a product of twos and fives, or as numerator/denominator otherwise.
fn factor_text(factor: Ratio<i64>) -> String {
    let num = i128::from(*factor.numer());
    let den = i128::from(*factor.denom());
    let mut stripped = den;
    while stripped % 2 == 0 {
        stripped /= 2;
    }
    while stripped % 5 == 0 {
        stripped /= 5;
    }
    if stripped != 1 {
        return format!("{num}/{den}");
    }
    let mut digits = 0u32;
    let mut pow = 1i128;
    while pow % den != 0 {
        pow *= 10;
        digits += 1;
    }
    let scaled = num * (pow / den);
    if digits == 0 {
        return scaled.to_string();
    }
    let text = format!("{scaled:0>width$}", width = digits as usize + 1);
    let (whole, frac) = text.split_at(text.len() - digits as usize);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        whole.to_string()
    } else {
        format!("{whole}.{frac}")
    }
}

fn parse_factor(text: &str) -> Option<Ratio<i64>> {
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.parse().ok()?;
        let den: i64 = den.parse().ok()?;
        if den <= 0 {
            return None;
        }
        return Some(Ratio::new(num, den));
    }
    let (whole, frac) = match text.split_once('.') {
        Some((whole, frac)) if !frac.is_empty() => (whole, frac),
        Some(_) => return None,
        None => (text, ""),
    };
    if whole.is_empty()
        || !whole.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 12
    {
        return None;
    }
    let whole: i64 = whole.parse().ok()?;
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let frac_value: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    Some(Ratio::new(whole.checked_mul(den)?.checked_add(frac_value)?, den))
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AttackSpec::Scale { factor, slots } => {
                write!(f, "scale:{}", factor_text(factor))?;
                if slots != SlotMask::ALL {
                    write!(f, "@{slots}")?;
                }
                Ok(())
            }
            AttackSpec::Delay { hours } => write!(f, "delay:{hours}"),
            AttackSpec::PeakLower { new_price, slots } => {
                write!(f, "peak_lower:{new_price}@{slots}")
            }
            AttackSpec::PeakShift { from, to } => write!(f, "peak_shift:{from}/{to}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseAttackError {
    #[error("unknown attack kind {0:?}, expected scale, delay, peak_lower, or peak_shift")]
    UnknownKind(String),
    #[error("malformed {part} {text:?} in {kind} attack")]
    Malformed {
        kind: &'static str,
        part: &'static str,
        text: String,
    },
    #[error(transparent)]
    Invalid(#[from] InvalidAttack),
}

fn malformed(kind: &'static str, part: &'static str, text: &str) -> ParseAttackError {
    ParseAttackError::Malformed {
        kind,
        part,
        text: text.to_string(),
    }
}

/// Compact textual form, the same one `Display` emits:
/// `scale:1.5@7-10` (slots optional, all when omitted), `delay:3`,
/// `peak_lower:10.1@7-10,18-19`, `peak_shift:7-10/0-3`.
impl FromStr for AttackSpec {
    type Err = ParseAttackError;

    fn from_str(text: &str) -> Result<AttackSpec, ParseAttackError> {
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| ParseAttackError::UnknownKind(text.to_string()))?;
        let attack = match kind {
            "scale" => {
                let (factor, slots) = match body.split_once('@') {
                    Some((factor, slots)) => (
                        factor,
                        slots
                            .parse()
                            .map_err(|_| malformed("scale", "slots", slots))?,
                    ),
                    None => (body, SlotMask::ALL),
                };
                AttackSpec::Scale {
                    factor: parse_factor(factor)
                        .ok_or_else(|| malformed("scale", "factor", factor))?,
                    slots,
                }
            }
            "delay" => AttackSpec::Delay {
                hours: body.parse().map_err(|_| malformed("delay", "hours", body))?,
            },
            "peak_lower" => {
                let (price, slots) = body
                    .split_once('@')
                    .ok_or_else(|| malformed("peak_lower", "body", body))?;
                AttackSpec::PeakLower {
                    new_price: Price::parse(price)
                        .map_err(|_| malformed("peak_lower", "price", price))?,
                    slots: slots
                        .parse()
                        .map_err(|_| malformed("peak_lower", "slots", slots))?,
                }
            }
            "peak_shift" => {
                let (from, to) = body
                    .split_once('/')
                    .ok_or_else(|| malformed("peak_shift", "body", body))?;
                AttackSpec::PeakShift {
                    from: from
                        .parse()
                        .map_err(|_| malformed("peak_shift", "from slots", from))?,
                    to: to
                        .parse()
                        .map_err(|_| malformed("peak_shift", "to slots", to))?,
                }
            }
            other => return Err(ParseAttackError::UnknownKind(other.to_string())),
        };
        attack.validate()?;
        Ok(attack)
    }
}

impl Serialize for AttackSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AttackSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<AttackSpec, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Band, Season};

    fn ratio(num: i64, den: i64) -> Ratio<i64> {
        Ratio::new(num, den)
    }

    fn distinct_tariff() -> TariffDay {
        let mut prices = [Price(0); SLOT_COUNT];
        for (slot, p) in prices.iter_mut().enumerate() {
            *p = Price(100 + slot as i64);
        }
        TariffDay::new(prices, [Band::MidPeak; SLOT_COUNT], Season::Summer).unwrap()
    }

    fn winter_like() -> TariffDay {
        let mut prices = [Price(0); SLOT_COUNT];
        let mut bands = [Band::OffPeak; SLOT_COUNT];
        for slot in 0..SLOT_COUNT {
            let peak = (7..=10).contains(&slot) || (18..=19).contains(&slot);
            let mid = (11..=17).contains(&slot);
            (prices[slot], bands[slot]) = if peak {
                (Price::parse("20.8").unwrap(), Band::Peak)
            } else if mid {
                (Price::parse("14.4").unwrap(), Band::MidPeak)
            } else {
                (Price::parse("8.2").unwrap(), Band::OffPeak)
            };
        }
        TariffDay::new(prices, bands, Season::Winter).unwrap()
    }

    #[test]
    fn unit_scale_and_zero_delay_are_identities() {
        let tariff = distinct_tariff();
        let scale = AttackSpec::Scale {
            factor: ratio(1, 1),
            slots: SlotMask::ALL,
        };
        assert_eq!(apply_attack(&tariff, &scale).unwrap(), tariff);
        let delay = AttackSpec::Delay { hours: 0 };
        assert_eq!(apply_attack(&tariff, &delay).unwrap(), tariff);
    }

    #[test]
    fn peak_lower_rewrites_exactly_the_chosen_slots() {
        let tariff = winter_like();
        let attack: AttackSpec = "peak_lower:10.1@7-10,18-19".parse().unwrap();
        let forged = apply_attack(&tariff, &attack).unwrap();
        for slot in 0..SLOT_COUNT {
            let attacked = (7..=10).contains(&slot) || (18..=19).contains(&slot);
            if attacked {
                assert_eq!(forged.price(slot), Price::parse("10.1").unwrap());
            } else {
                assert_eq!(forged.price(slot), tariff.price(slot));
            }
            // Labels are forged along with nothing: they stay stale.
            assert_eq!(forged.band(slot), tariff.band(slot));
        }
        assert_eq!(forged.season(), tariff.season());
    }

    #[test]
    fn doubling_then_halving_cancels_exactly() {
        let tariff = distinct_tariff();
        let attacks = [
            AttackSpec::Scale {
                factor: ratio(2, 1),
                slots: SlotMask::ALL,
            },
            AttackSpec::Scale {
                factor: ratio(1, 2),
                slots: SlotMask::ALL,
            },
        ];
        assert_eq!(compose_attacks(&tariff, &attacks).unwrap(), tariff);
    }

    #[test]
    fn delays_compose_modulo_a_day() {
        let tariff = distinct_tariff();
        for a in 0..SLOT_COUNT {
            for b in 0..SLOT_COUNT {
                let pair = [AttackSpec::Delay { hours: a }, AttackSpec::Delay { hours: b }];
                let composed = compose_attacks(&tariff, &pair).unwrap();
                let single = AttackSpec::Delay {
                    hours: (a + b) % SLOT_COUNT,
                };
                assert_eq!(composed, apply_attack(&tariff, &single).unwrap());
            }
        }
    }

    #[test]
    fn delay_shows_stale_prices() {
        let tariff = distinct_tariff();
        let forged = apply_attack(&tariff, &AttackSpec::Delay { hours: 3 }).unwrap();
        for slot in 0..SLOT_COUNT {
            let stale = (slot + SLOT_COUNT - 3) % SLOT_COUNT;
            assert_eq!(forged.price(slot), tariff.price(stale));
        }
    }

    #[test]
    fn peak_shift_swaps_paired_slots_and_is_an_involution() {
        let tariff = distinct_tariff();
        let attack: AttackSpec = "peak_shift:7-10/0-3".parse().unwrap();
        let once = apply_attack(&tariff, &attack).unwrap();
        for (peak, cheap) in [(7, 0), (8, 1), (9, 2), (10, 3)] {
            assert_eq!(once.price(peak), tariff.price(cheap));
            assert_eq!(once.price(cheap), tariff.price(peak));
        }
        let twice = apply_attack(&once, &attack).unwrap();
        assert_eq!(twice, tariff);
    }

    #[test]
    fn scaling_preserves_price_order() {
        let tariff = distinct_tariff();
        let slots: SlotMask = "5-20".parse().unwrap();
        let forged = apply_attack(
            &tariff,
            &AttackSpec::Scale {
                factor: ratio(7, 2),
                slots,
            },
        )
        .unwrap();
        let ordered = |t: &TariffDay, mask: SlotMask| {
            let mut slots: Vec<usize> = mask.iter().collect();
            slots.sort_by_key(|&s| (t.price(s), s));
            slots
        };
        assert_eq!(ordered(&forged, slots), ordered(&tariff, slots));
        let uniform = apply_attack(
            &tariff,
            &AttackSpec::Scale {
                factor: ratio(7, 2),
                slots: SlotMask::ALL,
            },
        )
        .unwrap();
        assert_eq!(
            ordered(&uniform, SlotMask::ALL),
            ordered(&tariff, SlotMask::ALL)
        );
    }

    #[test]
    fn quantization_rounds_half_away_and_never_hits_zero() {
        let tariff = TariffDay::flat(Price(15), Season::Summer);
        let halved = apply_attack(
            &tariff,
            &AttackSpec::Scale {
                factor: ratio(1, 2),
                slots: SlotMask::ALL,
            },
        )
        .unwrap();
        // 7.5 tenths rounds away from zero to 8.
        assert_eq!(halved.price(0), Price(8));

        let floor = apply_attack(
            &TariffDay::flat(Price(1), Season::Summer),
            &AttackSpec::Scale {
                factor: ratio(1, 3),
                slots: SlotMask::ALL,
            },
        )
        .unwrap();
        assert_eq!(floor.price(0), Price(1));

        let thirded = apply_attack(
            &TariffDay::flat(Price(100), Season::Summer),
            &AttackSpec::Scale {
                factor: ratio(1, 3),
                slots: SlotMask::ALL,
            },
        )
        .unwrap();
        assert_eq!(thirded.price(0), Price(33));
    }

    #[test]
    fn validation_rejects_each_bad_shape() {
        let zero = AttackSpec::Scale {
            factor: ratio(0, 1),
            slots: SlotMask::ALL,
        };
        assert_eq!(
            zero.validate(),
            Err(InvalidAttack::NonPositiveFactor(ratio(0, 1)))
        );
        assert_eq!(
            AttackSpec::Delay { hours: 24 }.validate(),
            Err(InvalidAttack::DelayTooLong(24))
        );
        assert_eq!(
            AttackSpec::PeakLower {
                new_price: Price(0),
                slots: SlotMask::ALL,
            }
            .validate(),
            Err(InvalidAttack::NonPositivePrice(Price(0)))
        );
        assert_eq!(
            AttackSpec::PeakShift {
                from: "1-3".parse().unwrap(),
                to: "5-6".parse().unwrap(),
            }
            .validate(),
            Err(InvalidAttack::ShiftSizeMismatch { from: 3, to: 2 })
        );
        assert_eq!(
            AttackSpec::PeakShift {
                from: "1-3".parse().unwrap(),
                to: "3-5".parse().unwrap(),
            }
            .validate(),
            Err(InvalidAttack::ShiftOverlap("3".parse().unwrap()))
        );
    }

    #[test]
    fn composition_reports_the_failing_index() {
        let tariff = distinct_tariff();
        let attacks = [
            AttackSpec::Delay { hours: 1 },
            AttackSpec::Delay { hours: 99 },
        ];
        let err = compose_attacks(&tariff, &attacks).unwrap_err();
        assert_eq!(
            err,
            ComposeError {
                index: 1,
                source: InvalidAttack::DelayTooLong(99),
            }
        );
        assert_eq!(err.to_string(), "attack 1: delay must be under 24 hours, got 99");
    }

    #[test]
    fn grammar_round_trips() {
        for text in [
            "scale:1.5@7-10",
            "scale:2",
            "scale:7/3",
            "delay:3",
            "peak_lower:10.1@7-10,18-19",
            "peak_shift:7-10/0-3",
        ] {
            let attack: AttackSpec = text.parse().unwrap();
            assert_eq!(attack.to_string(), text);
            let again: AttackSpec = attack.to_string().parse().unwrap();
            assert_eq!(again, attack);
        }
        // Reduction canonicalizes the factor but keeps the value.
        let reduced: AttackSpec = "scale:15/10".parse().unwrap();
        assert_eq!(reduced.to_string(), "scale:1.5");
        let quarters: AttackSpec = "scale:0.25".parse().unwrap();
        assert_eq!(quarters.to_string(), "scale:0.25");
    }

    #[test]
    fn grammar_rejects_malformed_and_invalid_specs() {
        assert!(matches!(
            "melt:1".parse::<AttackSpec>(),
            Err(ParseAttackError::UnknownKind(_))
        ));
        assert!(matches!(
            "noise".parse::<AttackSpec>(),
            Err(ParseAttackError::UnknownKind(_))
        ));
        assert!(matches!(
            "scale:abc".parse::<AttackSpec>(),
            Err(ParseAttackError::Malformed { part: "factor", .. })
        ));
        assert!(matches!(
            "scale:1.5@99".parse::<AttackSpec>(),
            Err(ParseAttackError::Malformed { part: "slots", .. })
        ));
        assert!(matches!(
            "delay:soon".parse::<AttackSpec>(),
            Err(ParseAttackError::Malformed { .. })
        ));
        assert!(matches!(
            "peak_lower:10.1".parse::<AttackSpec>(),
            Err(ParseAttackError::Malformed { part: "body", .. })
        ));
        assert!(matches!(
            "peak_shift:1-2".parse::<AttackSpec>(),
            Err(ParseAttackError::Malformed { part: "body", .. })
        ));
        assert_eq!(
            "scale:0".parse::<AttackSpec>(),
            Err(ParseAttackError::Invalid(InvalidAttack::NonPositiveFactor(
                ratio(0, 1)
            )))
        );
        assert_eq!(
            "delay:24".parse::<AttackSpec>(),
            Err(ParseAttackError::Invalid(InvalidAttack::DelayTooLong(24)))
        );
    }

    #[test]
    fn serde_uses_the_compact_form() {
        #[derive(Serialize, Deserialize)]
        struct Doc {
            attacks: Vec<AttackSpec>,
        }
        let doc: Doc = toml::from_str("attacks = [\"scale:1.5@7-10\", \"delay:3\"]").unwrap();
        assert_eq!(
            doc.attacks,
            vec![
                AttackSpec::Scale {
                    factor: ratio(3, 2),
                    slots: "7-10".parse().unwrap(),
                },
                AttackSpec::Delay { hours: 3 },
            ]
        );
        let back = toml::to_string(&doc).unwrap();
        assert!(back.contains("\"scale:1.5@7-10\""));
        assert!(toml::from_str::<Doc>("attacks = [\"delay:31\"]").is_err());
    }
}
