//! A household: its appliances, ordering constraints, and unmanaged baseline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::appliance::{Appliance, ApplianceKind};
use super::schedule::{validate_schedule, Schedule, Violation, SLOT_COUNT};

/// Why a scenario cannot be constructed.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("appliance id `{0}` appears twice")]
    DuplicateId(String),
    #[error("appliance `{0}` has zero power")]
    ZeroPower(String),
    #[error("appliance `{id}` needs {operating_slots} operating slots, the day has {SLOT_COUNT}")]
    BadOperatingSlots { id: String, operating_slots: usize },
    #[error("fixed appliance `{0}` has no profile")]
    MissingProfile(String),
    #[error("flexible appliance `{0}` must not carry a fixed profile")]
    UnexpectedProfile(String),
    #[error("profile of `{id}` covers {profile_slots} slot(s), operating slots say {operating_slots}")]
    ProfileSize {
        id: String,
        operating_slots: usize,
        profile_slots: usize,
    },
    #[error("precedence rule names unknown appliance `{0}`")]
    UnknownPrecedenceId(String),
    #[error("precedence applies to uninterruptible appliances; `{0}` is not one")]
    PrecedenceKind(String),
    #[error("precedence rules form a cycle involving `{0}`")]
    PrecedenceCycle(String),
    #[error("baseline schedule is infeasible: {0}")]
    InfeasibleBaseline(ViolationList),
}

/// Violations joined for error display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationList(pub Vec<Violation>);

impl fmt::Display for ViolationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The simulated household. Construction validates everything once; the
/// accessors hand out immutable views, so a value of this type is always
/// internally consistent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HouseholdScenario {
    /// Sorted by id; this order is the canonical appliance order everywhere.
    appliances: Vec<Appliance>,
    /// (predecessor, successor) pairs, in declaration order.
    precedence: Vec<(String, String)>,
    baseline: Schedule,
}

impl HouseholdScenario {
    pub fn new(
        mut appliances: Vec<Appliance>,
        precedence: Vec<(String, String)>,
        baseline: Schedule,
    ) -> Result<HouseholdScenario, ScenarioError> {
        appliances.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in appliances.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ScenarioError::DuplicateId(pair[0].id.clone()));
            }
        }
        for a in &appliances {
            check_appliance(a)?;
        }
        let by_id: BTreeMap<&str, &Appliance> =
            appliances.iter().map(|a| (a.id.as_str(), a)).collect();
        for (pred, succ) in &precedence {
            for id in [pred, succ] {
                let Some(appliance) = by_id.get(id.as_str()) else {
                    return Err(ScenarioError::UnknownPrecedenceId(id.clone()));
                };
                if appliance.kind != ApplianceKind::FlexibleUninterruptible {
                    return Err(ScenarioError::PrecedenceKind(id.clone()));
                }
            }
        }
        check_acyclic(&precedence)?;
        let scenario = HouseholdScenario {
            appliances,
            precedence,
            baseline,
        };
        let violations = validate_schedule(&scenario.baseline, &scenario);
        if !violations.is_empty() {
            return Err(ScenarioError::InfeasibleBaseline(ViolationList(violations)));
        }
        Ok(scenario)
    }

    /// Appliances in canonical (ascending id) order.
    pub fn appliances(&self) -> &[Appliance] {
        &self.appliances
    }

    pub fn appliance(&self, id: &str) -> Option<&Appliance> {
        self.appliances
            .binary_search_by(|a| a.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.appliances[i])
    }

    pub fn precedence(&self) -> &[(String, String)] {
        &self.precedence
    }

    pub fn baseline(&self) -> &Schedule {
        &self.baseline
    }

    pub fn flexible(&self) -> impl Iterator<Item = &Appliance> {
        self.appliances.iter().filter(|a| a.is_flexible())
    }

    pub fn fixed(&self) -> impl Iterator<Item = &Appliance> {
        self.appliances.iter().filter(|a| !a.is_flexible())
    }

    /// The schedule of the fixed appliances alone.
    pub fn fixed_schedule(&self) -> Schedule {
        let mut schedule = Schedule::new();
        for a in self.fixed() {
            if let Some(profile) = a.fixed_profile {
                schedule.set(a.id.clone(), profile);
            }
        }
        schedule
    }

    /// Precedence pairs ordered so that every pair's predecessor comes after
    /// all pairs that constrain it. Processing repairs in this order settles
    /// chains in one pass.
    pub(crate) fn precedence_topo(&self) -> Vec<(&str, &str)> {
        let ids: BTreeSet<&str> = self
            .precedence
            .iter()
            .flat_map(|(a, b)| [a.as_str(), b.as_str()])
            .collect();
        let mut indegree: BTreeMap<&str, usize> = ids.iter().map(|&id| (id, 0)).collect();
        for (_, succ) in &self.precedence {
            *indegree.get_mut(succ.as_str()).unwrap() += 1;
        }
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut order = Vec::new();
        while let Some(&id) = ready.iter().next() {
            ready.remove(id);
            for (pred, succ) in &self.precedence {
                if pred == id {
                    order.push((pred.as_str(), succ.as_str()));
                    let d = indegree.get_mut(succ.as_str()).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(succ.as_str());
                    }
                }
            }
        }
        debug_assert_eq!(order.len(), self.precedence.len());
        order
    }
}

fn check_appliance(a: &Appliance) -> Result<(), ScenarioError> {
    if a.power_wh == 0 {
        return Err(ScenarioError::ZeroPower(a.id.clone()));
    }
    if a.operating_slots == 0 || a.operating_slots > SLOT_COUNT {
        return Err(ScenarioError::BadOperatingSlots {
            id: a.id.clone(),
            operating_slots: a.operating_slots,
        });
    }
    match (a.kind, a.fixed_profile) {
        (ApplianceKind::Fixed, None) => return Err(ScenarioError::MissingProfile(a.id.clone())),
        (ApplianceKind::Fixed, Some(profile)) => {
            if profile.len() != a.operating_slots {
                return Err(ScenarioError::ProfileSize {
                    id: a.id.clone(),
                    operating_slots: a.operating_slots,
                    profile_slots: profile.len(),
                });
            }
        }
        (_, Some(_)) => return Err(ScenarioError::UnexpectedProfile(a.id.clone())),
        (_, None) => {}
    }
    Ok(())
}

fn check_acyclic(precedence: &[(String, String)]) -> Result<(), ScenarioError> {
    let ids: BTreeSet<&str> = precedence
        .iter()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .collect();
    let mut indegree: BTreeMap<&str, usize> = ids.iter().map(|&id| (id, 0)).collect();
    for (_, succ) in precedence {
        *indegree.get_mut(succ.as_str()).unwrap() += 1;
    }
    let mut ready: Vec<&str> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();
    let mut seen = 0;
    while let Some(id) = ready.pop() {
        seen += 1;
        for (pred, succ) in precedence {
            if pred == id {
                let d = indegree.get_mut(succ.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(succ);
                }
            }
        }
    }
    if seen != ids.len() {
        let stuck = indegree
            .iter()
            .find(|(_, &d)| d > 0)
            .map(|(&id, _)| id.to_string())
            .unwrap_or_default();
        return Err(ScenarioError::PrecedenceCycle(stuck));
    }
    Ok(())
}
