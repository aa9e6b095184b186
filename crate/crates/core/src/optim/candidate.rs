//! Candidate encoding shared by every optimizer.
//!
//! Flexible appliances are the only decision variables: an uninterruptible
//! load contributes its start slot, an interruptible load the set of slots
//! it occupies. Fixed loads cost the same under every candidate and ride
//! along as a constant. Ordering constraints are enforced by repair rather
//! than penalties, so every evaluated candidate prices a real schedule.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{
    ApplianceKind, HouseholdScenario, Schedule, SlotMask, TariffDay, SLOT_COUNT,
};
use crate::money::Money;
use crate::rng::DetRng;

/// Decision variables for one scenario: start slots for uninterruptible
/// appliances, slot sets for interruptible ones. Fixed appliances never
/// appear here.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Candidate {
    pub starts: BTreeMap<String, usize>,
    pub slot_sets: BTreeMap<String, SlotMask>,
}

/// Why a candidate does not fit a scenario's decision variables.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncodingMismatch {
    #[error("`{id}` is not an uninterruptible appliance of this scenario")]
    UnexpectedStart { id: String },
    #[error("`{id}` is not an interruptible appliance of this scenario")]
    UnexpectedSlotSet { id: String },
    #[error("no start slot for `{id}`")]
    MissingStart { id: String },
    #[error("no slot set for `{id}`")]
    MissingSlotSet { id: String },
    #[error("start {start} for `{id}` exceeds the last feasible start {max}")]
    StartOutOfRange {
        id: String,
        start: usize,
        max: usize,
    },
    #[error("slot set for `{id}` has {actual} slot(s), needs {expected}")]
    SlotSetSize {
        id: String,
        expected: usize,
        actual: usize,
    },
}

/// Outcome of precedence repair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairedCandidate {
    pub candidate: Candidate,
    /// True when a successor had to be clamped at the end of the day, in
    /// which case the repaired candidate may still break the ordering rule.
    pub overflowed: bool,
}

/// Pushes every successor to the end of its predecessor, settling chains in
/// one topological pass. Entries that do not resolve against the scenario
/// are left untouched.
pub fn repair_precedence(
    candidate: &Candidate,
    scenario: &HouseholdScenario,
) -> RepairedCandidate {
    let mut repaired = candidate.clone();
    let mut overflowed = false;
    for (pred, succ) in scenario.precedence_topo() {
        let (Some(&pred_start), Some(&succ_start)) =
            (repaired.starts.get(pred), repaired.starts.get(succ))
        else {
            continue;
        };
        let (Some(pred_app), Some(succ_app)) =
            (scenario.appliance(pred), scenario.appliance(succ))
        else {
            continue;
        };
        let mut pushed = succ_start.max(pred_start + pred_app.operating_slots);
        let max_start = SLOT_COUNT - succ_app.operating_slots;
        if pushed > max_start {
            pushed = max_start;
            overflowed = true;
        }
        repaired.starts.insert(succ.to_string(), pushed);
    }
    RepairedCandidate {
        candidate: repaired,
        overflowed,
    }
}

/// Expands a candidate into a full schedule: shape-checks it, repairs
/// precedence, then lays fixed profiles and flexible slots side by side.
///
/// When repair had to clamp a successor at the end of the day the returned
/// schedule still breaks the ordering rule; `validate_schedule` reports it.
/// Every other shape-correct candidate decodes to a feasible schedule.
pub fn decode(
    candidate: &Candidate,
    scenario: &HouseholdScenario,
) -> Result<Schedule, EncodingMismatch> {
    for id in candidate.starts.keys() {
        match scenario.appliance(id) {
            Some(a) if a.kind == ApplianceKind::FlexibleUninterruptible => {}
            _ => return Err(EncodingMismatch::UnexpectedStart { id: id.clone() }),
        }
    }
    for id in candidate.slot_sets.keys() {
        match scenario.appliance(id) {
            Some(a) if a.kind == ApplianceKind::FlexibleInterruptible => {}
            _ => return Err(EncodingMismatch::UnexpectedSlotSet { id: id.clone() }),
        }
    }
    for a in scenario.flexible() {
        match a.kind {
            ApplianceKind::FlexibleUninterruptible => {
                let Some(&start) = candidate.starts.get(&a.id) else {
                    return Err(EncodingMismatch::MissingStart { id: a.id.clone() });
                };
                let max = SLOT_COUNT - a.operating_slots;
                if start > max {
                    return Err(EncodingMismatch::StartOutOfRange {
                        id: a.id.clone(),
                        start,
                        max,
                    });
                }
            }
            ApplianceKind::FlexibleInterruptible => {
                let Some(&slots) = candidate.slot_sets.get(&a.id) else {
                    return Err(EncodingMismatch::MissingSlotSet { id: a.id.clone() });
                };
                if slots.len() != a.operating_slots {
                    return Err(EncodingMismatch::SlotSetSize {
                        id: a.id.clone(),
                        expected: a.operating_slots,
                        actual: slots.len(),
                    });
                }
            }
            ApplianceKind::Fixed => unreachable!("flexible() never yields fixed appliances"),
        }
    }
    let repaired = repair_precedence(candidate, scenario).candidate;
    let mut schedule = scenario.fixed_schedule();
    for a in scenario.flexible() {
        match a.kind {
            ApplianceKind::FlexibleUninterruptible => {
                let start = repaired.starts[&a.id];
                schedule.set(a.id.clone(), SlotMask::run(start, a.operating_slots));
            }
            ApplianceKind::FlexibleInterruptible => {
                schedule.set(a.id.clone(), repaired.slot_sets[&a.id]);
            }
            ApplianceKind::Fixed => unreachable!(),
        }
    }
    Ok(schedule)
}

/// Total cost of the decoded candidate. Agrees with `total_cost` on the
/// decoded schedule whenever repair did not overflow; it stays defined (the
/// same sum over the repaired slots) even when it did, because optimizers
/// need a total function.
pub fn fitness(
    candidate: &Candidate,
    scenario: &HouseholdScenario,
    tariff: &TariffDay,
) -> Result<Money, EncodingMismatch> {
    let schedule = decode(candidate, scenario)?;
    let mut total = Money::ZERO;
    for (id, slots) in schedule.iter() {
        let power = scenario
            .appliance(id)
            .expect("decode only emits scenario appliances")
            .power_wh;
        for slot in slots.iter() {
            total += tariff.price(slot).energy_cost(power);
        }
    }
    Ok(total)
}

/// One decision variable of the flat optimizer view.
#[derive(Clone, Debug)]
pub(crate) struct Var {
    pub id: String,
    pub power_wh: u32,
    pub ot: usize,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum VarKind {
    /// Start slot of an uninterruptible run. `max_start` is the last slot
    /// the run itself fits in; `domain_max` additionally leaves room for
    /// every successor chain, so sampling from it keeps repair overflow-free.
    Start { max_start: usize, domain_max: usize },
    /// Slot set of an interruptible load.
    Set,
}

/// Flat, index-addressed view of a scenario's decision variables, in
/// canonical (ascending id) order. All optimizers share it.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub vars: Vec<Var>,
    /// (predecessor, successor) var indices in forward topological order.
    pub pairs: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(scenario: &HouseholdScenario) -> Layout {
        let mut vars: Vec<Var> = scenario
            .flexible()
            .map(|a| Var {
                id: a.id.clone(),
                power_wh: a.power_wh,
                ot: a.operating_slots,
                kind: match a.kind {
                    ApplianceKind::FlexibleUninterruptible => VarKind::Start {
                        max_start: SLOT_COUNT - a.operating_slots,
                        domain_max: SLOT_COUNT - a.operating_slots,
                    },
                    ApplianceKind::FlexibleInterruptible => VarKind::Set,
                    ApplianceKind::Fixed => unreachable!(),
                },
            })
            .collect();
        let index: BTreeMap<String, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), i))
            .collect();
        let pairs: Vec<(usize, usize)> = scenario
            .precedence_topo()
            .into_iter()
            .map(|(p, s)| (index[p], index[s]))
            .collect();
        // Tighten start domains back to front so that a predecessor always
        // leaves room for its whole successor chain. A feasible baseline
        // exists, so every domain stays non-empty.
        for &(p, s) in pairs.iter().rev() {
            let succ_domain = match vars[s].kind {
                VarKind::Start { domain_max, .. } => domain_max,
                VarKind::Set => unreachable!("precedence only binds uninterruptible loads"),
            };
            let pred_ot = vars[p].ot;
            debug_assert!(succ_domain >= pred_ot);
            if let VarKind::Start { domain_max, .. } = &mut vars[p].kind {
                *domain_max = (*domain_max).min(succ_domain - pred_ot);
            }
        }
        Layout { vars, pairs }
    }

    pub fn is_static(&self) -> bool {
        self.vars.is_empty()
    }

    /// Draw order: one value per variable, in canonical variable order.
    pub fn random_genome(&self, rng: &mut DetRng) -> Genome {
        Genome(
            self.vars
                .iter()
                .map(|v| match v.kind {
                    VarKind::Start { domain_max, .. } => Gene::Start(rng.index(domain_max + 1)),
                    VarKind::Set => Gene::Set(SlotMask::from_slots(rng.distinct(v.ot, SLOT_COUNT))),
                })
                .collect(),
        )
    }

    /// Genome counterpart of `repair_precedence`. Returns true on overflow,
    /// which cannot happen for genomes sampled from the tightened domains.
    pub fn repair(&self, genome: &mut Genome) -> bool {
        let mut overflowed = false;
        for &(p, s) in &self.pairs {
            let Gene::Start(pred_start) = genome.0[p] else {
                unreachable!()
            };
            let Gene::Start(succ_start) = genome.0[s] else {
                unreachable!()
            };
            let VarKind::Start { max_start, .. } = self.vars[s].kind else {
                unreachable!()
            };
            let mut pushed = succ_start.max(pred_start + self.vars[p].ot);
            if pushed > max_start {
                pushed = max_start;
                overflowed = true;
            }
            genome.0[s] = Gene::Start(pushed);
        }
        overflowed
    }

    pub fn schedule(&self, genome: &Genome, scenario: &HouseholdScenario) -> Schedule {
        let mut schedule = scenario.fixed_schedule();
        for (var, gene) in self.vars.iter().zip(&genome.0) {
            let mask = match (*gene, var.ot) {
                (Gene::Start(start), ot) => SlotMask::run(start, ot),
                (Gene::Set(slots), _) => slots,
            };
            schedule.set(var.id.clone(), mask);
        }
        schedule
    }

    #[cfg(test)]
    pub fn candidate(&self, genome: &Genome) -> Candidate {
        let mut candidate = Candidate::default();
        for (var, gene) in self.vars.iter().zip(&genome.0) {
            match *gene {
                Gene::Start(start) => {
                    candidate.starts.insert(var.id.clone(), start);
                }
                Gene::Set(slots) => {
                    candidate.slot_sets.insert(var.id.clone(), slots);
                }
            }
        }
        candidate
    }
}

/// Slot index of the n'th active slot, ascending. Panics past the end.
pub(crate) fn nth_active(mask: SlotMask, n: usize) -> usize {
    mask.iter().nth(n).expect("active pick within mask")
}

/// Slot index of the n'th inactive slot, ascending. Panics past the end.
pub(crate) fn nth_inactive(mask: SlotMask, n: usize) -> usize {
    (0..SLOT_COUNT)
        .filter(|&s| !mask.contains(s))
        .nth(n)
        .expect("inactive pick within mask complement")
}

/// Moves one active slot onto one inactive slot, both chosen uniformly.
/// Draw order: the active pick, then the inactive pick. Full and empty
/// masks pass through unchanged with no draws.
pub(crate) fn swap_one_slot(mask: SlotMask, rng: &mut DetRng) -> SlotMask {
    let active = mask.len();
    if active == 0 || active == SLOT_COUNT {
        return mask;
    }
    let drop = nth_active(mask, rng.index(active));
    let add = nth_inactive(mask, rng.index(SLOT_COUNT - active));
    let mut moved = mask;
    moved.remove(drop);
    moved.insert(add);
    moved
}

/// One gene per variable, aligned with `Layout::vars`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Gene {
    Start(usize),
    Set(SlotMask),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Genome(pub Vec<Gene>);

/// Price tables precomputed for tight evaluation loops.
pub(crate) struct Evaluator {
    /// Per-slot rate in tenths of a cent.
    prices: [i64; SLOT_COUNT],
    /// prefix[i] is the rate sum of slots 0..i.
    prefix: [i64; SLOT_COUNT + 1],
    fixed_total: Money,
}

impl Evaluator {
    pub fn new(scenario: &HouseholdScenario, tariff: &TariffDay) -> Evaluator {
        let mut prices = [0i64; SLOT_COUNT];
        let mut prefix = [0i64; SLOT_COUNT + 1];
        for slot in 0..SLOT_COUNT {
            prices[slot] = tariff.price(slot).0;
            prefix[slot + 1] = prefix[slot] + prices[slot];
        }
        let mut fixed_total = Money::ZERO;
        for a in scenario.fixed() {
            if let Some(profile) = a.fixed_profile {
                for slot in profile.iter() {
                    fixed_total += tariff.price(slot).energy_cost(a.power_wh);
                }
            }
        }
        Evaluator {
            prices,
            prefix,
            fixed_total,
        }
    }

    pub fn genome_cost(&self, layout: &Layout, genome: &Genome) -> Money {
        self.genes_cost(layout, &genome.0)
    }

    pub fn genes_cost(&self, layout: &Layout, genes: &[Gene]) -> Money {
        let mut total = self.fixed_total.0;
        for (var, gene) in layout.vars.iter().zip(genes) {
            let rate_sum = match *gene {
                Gene::Start(start) => self.prefix[start + var.ot] - self.prefix[start],
                Gene::Set(slots) => {
                    let mut bits = slots.bits();
                    let mut sum = 0i64;
                    while bits != 0 {
                        sum += self.prices[bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                    sum
                }
            };
            total += i64::from(var.power_wh) * rate_sum;
        }
        Money(total)
    }
}
