//! Genetic algorithm over the candidate encoding.
//!
//! Steady generational loop: tournament selection, uniform crossover,
//! per-variable mutation, precedence repair, and one elite carried over
//! unchanged. Crossover treats a start time as one unit but blends slot
//! sets per slot, so subsets mix instead of being inherited whole. The
//! draw order per generation is fixed and part of the reproducibility
//! contract: for each offspring, two tournaments (one index draw per
//! contestant), one crossover coin, then per variable the crossover draws
//! (one coin for a start; one coin per disputed slot plus the cardinality
//! repair draws for a set), then per variable one mutation coin plus that
//! variable's resample draws.

use crate::model::{HouseholdScenario, SlotMask, TariffDay, SLOT_COUNT};
use crate::money::Money;
use crate::rng::DetRng;

use super::candidate::{
    nth_active, nth_inactive, swap_one_slot, Evaluator, Gene, Genome, Layout, VarKind,
};
use super::{finish_run, static_result, InvalidParams, OptimizeError, OptimizerResult};

/// Genetic algorithm tuning. The elite count is fixed at one.
#[derive(Clone, Debug, PartialEq)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> GaParams {
        GaParams {
            population_size: 32,
            generations: 200,
            crossover_rate: 0.9,
            mutation_rate: 0.05,
            tournament_size: 3,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        if self.population_size == 0 {
            return Err(InvalidParams("population_size must be at least 1".into()));
        }
        if self.generations == 0 {
            return Err(InvalidParams("generations must be at least 1".into()));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return Err(InvalidParams(format!(
                "tournament_size must be in 1..={}",
                self.population_size
            )));
        }
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(InvalidParams(format!("{name} must be within [0, 1]")));
            }
        }
        Ok(())
    }
}

pub fn ga_optimize(
    scenario: &HouseholdScenario,
    tariff: &TariffDay,
    params: &GaParams,
) -> Result<OptimizerResult, OptimizeError> {
    params.validate()?;
    let layout = Layout::new(scenario);
    if layout.is_static() {
        return static_result(scenario, tariff, params.seed);
    }
    let evaluator = Evaluator::new(scenario, tariff);
    let mut rng = DetRng::new(params.seed);
    let mut evaluations = 0u64;

    let mut population: Vec<Genome> = (0..params.population_size)
        .map(|_| {
            let mut g = layout.random_genome(&mut rng);
            layout.repair(&mut g);
            g
        })
        .collect();
    let mut costs: Vec<Money> = population
        .iter()
        .map(|g| {
            evaluations += 1;
            evaluator.genome_cost(&layout, g)
        })
        .collect();

    let best_index = argmin(&costs);
    let mut best = (population[best_index].clone(), costs[best_index]);
    let mut history = vec![best.1];

    for _ in 0..params.generations {
        let elite_index = argmin(&costs);
        let mut next = Vec::with_capacity(params.population_size);
        next.push(population[elite_index].clone());
        while next.len() < params.population_size {
            let a = tournament(&costs, params.tournament_size, &mut rng);
            let b = tournament(&costs, params.tournament_size, &mut rng);
            let mut child = if rng.chance(params.crossover_rate) {
                crossover(&layout, &population[a], &population[b], &mut rng)
            } else {
                population[a].clone()
            };
            mutate(&layout, &mut child, params.mutation_rate, &mut rng);
            layout.repair(&mut child);
            next.push(child);
        }
        population = next;
        costs = population
            .iter()
            .map(|g| {
                evaluations += 1;
                evaluator.genome_cost(&layout, g)
            })
            .collect();
        let gen_best = argmin(&costs);
        if costs[gen_best] < best.1 {
            best = (population[gen_best].clone(), costs[gen_best]);
        }
        history.push(best.1);
    }

    finish_run(&layout, &best.0, scenario, tariff, history, evaluations, params.seed)
}

/// Lowest cost, earliest index on ties.
fn argmin(costs: &[Money]) -> usize {
    let mut best = 0;
    for (i, &c) in costs.iter().enumerate().skip(1) {
        if c < costs[best] {
            best = i;
        }
    }
    best
}

/// Draws `size` contestants with replacement; the earliest drawn of the
/// cheapest wins.
fn tournament(costs: &[Money], size: usize, rng: &mut DetRng) -> usize {
    let mut winner = rng.index(costs.len());
    for _ in 1..size {
        let contender = rng.index(costs.len());
        if costs[contender] < costs[winner] {
            winner = contender;
        }
    }
    winner
}

/// Uniform crossover: each start comes from parent `a` on heads; each slot
/// set keeps the parents' common slots, tosses a coin per disputed slot,
/// and is then repaired back to its required cardinality.
fn crossover(layout: &Layout, a: &Genome, b: &Genome, rng: &mut DetRng) -> Genome {
    Genome(
        layout
            .vars
            .iter()
            .zip(a.0.iter().zip(&b.0))
            .map(|(var, (&ga, &gb))| match (ga, gb) {
                (Gene::Start(sa), Gene::Start(sb)) => {
                    Gene::Start(if rng.chance(0.5) { sa } else { sb })
                }
                (Gene::Set(ma), Gene::Set(mb)) => Gene::Set(blend_sets(ma, mb, var.ot, rng)),
                _ => unreachable!("genome is aligned with the layout"),
            })
            .collect(),
    )
}

/// Child slot set of two parents with the same cardinality. Slots both
/// parents agree on pass through; each disputed slot gets one coin, in
/// ascending slot order. Oversized children then drop random active slots
/// and undersized ones add random inactive slots until the count fits.
fn blend_sets(a: SlotMask, b: SlotMask, ot: usize, rng: &mut DetRng) -> SlotMask {
    let mut child = SlotMask::EMPTY;
    for slot in 0..SLOT_COUNT {
        let keep = match (a.contains(slot), b.contains(slot)) {
            (true, true) => true,
            (false, false) => false,
            _ => rng.chance(0.5),
        };
        if keep {
            child.insert(slot);
        }
    }
    while child.len() > ot {
        child.remove(nth_active(child, rng.index(child.len())));
    }
    while child.len() < ot {
        child.insert(nth_inactive(child, rng.index(SLOT_COUNT - child.len())));
    }
    child
}

/// Per variable: with probability `rate`, resample a start uniformly from
/// its (precedence-tightened) domain, or move one slot of a set.
fn mutate(layout: &Layout, genome: &mut Genome, rate: f64, rng: &mut DetRng) {
    for (var, gene) in layout.vars.iter().zip(genome.0.iter_mut()) {
        if !rng.chance(rate) {
            continue;
        }
        match (var.kind, &mut *gene) {
            (VarKind::Start { domain_max, .. }, Gene::Start(s)) => {
                *s = rng.index(domain_max + 1);
            }
            (VarKind::Set, Gene::Set(slots)) => {
                *slots = swap_one_slot(*slots, rng);
            }
            _ => unreachable!("genome is aligned with the layout"),
        }
    }
}
