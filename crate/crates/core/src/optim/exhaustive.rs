//! Exhaustive search over the full candidate space.
//!
//! Ground truth for everything else: enumerates candidates in canonical
//! order (appliances by ascending id; starts ascending; slot sets in
//! lexicographic order of their ascending slot list), skips precedence
//! breakers, and keeps the first cheapest. Strict improvement on better
//! cost means ties resolve to the lexicographically smallest candidate.

use thiserror::Error;

use crate::model::{HouseholdScenario, SlotMask, TariffDay, SLOT_COUNT};
use crate::money::Money;

use super::candidate::{Evaluator, Gene, Genome, Layout, VarKind};
use super::{finish_run, static_result, OptimizeError, OptimizerResult};

/// The instance is too big to enumerate within the given budget.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("search space of {size} candidate(s) exceeds the limit of {limit}")]
pub struct SearchSpaceTooLarge {
    pub size: u128,
    pub limit: u64,
}

/// Number of candidates the exhaustive solver would enumerate: the product
/// over flexible appliances of start positions or slot-set combinations.
pub fn search_space_size(scenario: &HouseholdScenario) -> u128 {
    let mut size: u128 = 1;
    for a in scenario.flexible() {
        let choices = match a.kind {
            crate::model::ApplianceKind::FlexibleUninterruptible => {
                (SLOT_COUNT - a.operating_slots + 1) as u128
            }
            crate::model::ApplianceKind::FlexibleInterruptible => {
                choose(SLOT_COUNT, a.operating_slots)
            }
            crate::model::ApplianceKind::Fixed => unreachable!(),
        };
        size = size.saturating_mul(choices);
    }
    size
}

/// Binomial coefficient, exact at every intermediate step.
pub(crate) fn choose(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

pub fn brute_force_optimize(
    scenario: &HouseholdScenario,
    tariff: &TariffDay,
    limit: u64,
) -> Result<OptimizerResult, OptimizeError> {
    let size = search_space_size(scenario);
    if size > u128::from(limit) {
        return Err(SearchSpaceTooLarge { size, limit }.into());
    }
    let layout = Layout::new(scenario);
    if layout.is_static() {
        return static_result(scenario, tariff, 0);
    }
    let evaluator = Evaluator::new(scenario, tariff);
    // Precedence pairs indexed by the depth at which both ends are known,
    // so infeasible subtrees are cut as early as possible.
    let mut pairs_at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); layout.vars.len()];
    for &(p, s) in &layout.pairs {
        pairs_at[p.max(s)].push((p, s));
    }
    let mut search = Search {
        layout: &layout,
        evaluator: &evaluator,
        pairs_at,
        genes: Vec::with_capacity(layout.vars.len()),
        best: None,
        evaluations: 0,
    };
    search.descend(0);
    let (best, best_cost) = search
        .best
        .expect("a feasible baseline exists, so some candidate is feasible");
    finish_run(
        &layout,
        &best,
        scenario,
        tariff,
        vec![best_cost],
        search.evaluations,
        0,
    )
}

struct Search<'a> {
    layout: &'a Layout,
    evaluator: &'a Evaluator,
    pairs_at: Vec<Vec<(usize, usize)>>,
    genes: Vec<Gene>,
    best: Option<(Genome, Money)>,
    evaluations: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.layout.vars.len() {
            self.evaluations += 1;
            let cost = self.evaluator.genes_cost(self.layout, &self.genes);
            let improved = match &self.best {
                None => true,
                Some((_, best_cost)) => cost < *best_cost,
            };
            if improved {
                self.best = Some((Genome(self.genes.clone()), cost));
            }
            return;
        }
        match self.layout.vars[depth].kind {
            VarKind::Start { max_start, .. } => {
                for start in 0..=max_start {
                    self.genes.push(Gene::Start(start));
                    if self.ordered(depth) {
                        self.descend(depth + 1);
                    }
                    self.genes.pop();
                }
            }
            VarKind::Set => {
                let ot = self.layout.vars[depth].ot;
                let mut combo: Vec<usize> = (0..ot).collect();
                loop {
                    self.genes
                        .push(Gene::Set(SlotMask::from_slots(combo.iter().copied())));
                    if self.ordered(depth) {
                        self.descend(depth + 1);
                    }
                    self.genes.pop();
                    if !next_combination(&mut combo, SLOT_COUNT) {
                        break;
                    }
                }
            }
        }
    }

    /// Checks the precedence pairs that become decidable at this depth.
    fn ordered(&self, depth: usize) -> bool {
        self.pairs_at[depth].iter().all(|&(p, s)| {
            let (Gene::Start(pred), Gene::Start(succ)) = (self.genes[p], self.genes[s]) else {
                unreachable!("precedence only binds start variables");
            };
            succ >= pred + self.layout.vars[p].ot
        })
    }
}

/// Advances `combo` to the next k-combination of `0..n` in lexicographic
/// order; false when `combo` was the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] != i + n - k {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
