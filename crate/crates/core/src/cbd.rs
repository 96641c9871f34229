//! Contextuality-by-Default: every observable is renamed per context, after
//! which contexts share no observables and a joint distribution always
//! exists (the product of the context distributions).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jpd::{
    ContextSpec, FeasibilityResult, JointAtom, JointDistribution, JpdError, MeasurementSystem, MeasurementSystemSpec,
    ObservableSpec,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CbdError {
    #[error("observable {observable:?} appears in contexts {first} and {second}")]
    NotASplitSystem { observable: String, first: usize, second: usize },
    #[error("product witness has {size} atoms, budget is {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error(transparent)]
    System(#[from] JpdError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub observable: String,
    /// 1-based context index.
    pub context: usize,
    pub split: String,
}

/// `(observable, context) ↦ split observable`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SplitMap {
    entries: Vec<SplitEntry>,
}

impl SplitMap {
    pub fn entries(&self) -> &[SplitEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, observable: &str, context: usize) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.observable == observable && e.context == context)
            .map(|e| e.split.as_str())
    }
}

/// Name of `observable` as measured in 1-based `context`. The context
/// index is the text after the last underscore, so the map is injective.
pub fn split_name(observable: &str, context: usize) -> String {
    format!("{observable}_{context}")
}

pub fn split_by_context(sys: &MeasurementSystem) -> (MeasurementSystem, SplitMap) {
    let spec = sys.to_spec();
    let outcomes: HashMap<&str, &Vec<Rational>> =
        spec.observables.iter().map(|o| (o.name.as_str(), &o.outcomes)).collect();
    let mut map = SplitMap::default();
    let mut observables = Vec::new();
    let mut contexts = Vec::new();
    for (c, ctx) in spec.contexts.iter().enumerate() {
        let renamed: Vec<String> = ctx
            .observables
            .iter()
            .map(|name| {
                let split = split_name(name, c + 1);
                map.entries.push(SplitEntry {
                    observable: name.clone(),
                    context: c + 1,
                    split: split.clone(),
                });
                observables.push(ObservableSpec {
                    name: split.clone(),
                    outcomes: outcomes[name.as_str()].clone(),
                });
                split
            })
            .collect();
        contexts.push(ContextSpec {
            observables: renamed,
            distribution: ctx.distribution.clone(),
        });
    }
    let split = MeasurementSystem::new(MeasurementSystemSpec { observables, contexts })
        .expect("renaming a valid system yields a valid system");
    (split, map)
}

/// Builds the product of the context distributions of a split system and
/// checks it against every context by marginalization.
pub fn verify_split_feasible(sys: &MeasurementSystem, budget: u64) -> Result<FeasibilityResult, CbdError> {
    let spec = sys.to_spec();
    let mut owner: HashMap<&str, usize> = HashMap::new();
    for (c, ctx) in spec.contexts.iter().enumerate() {
        for name in &ctx.observables {
            if let Some(&first) = owner.get(name.as_str()) {
                return Err(CbdError::NotASplitSystem {
                    observable: name.clone(),
                    first: first + 1,
                    second: c + 1,
                });
            }
            owner.insert(name, c);
        }
    }
    let size = spec
        .contexts
        .iter()
        .fold(1u128, |acc, ctx| acc.saturating_mul(ctx.distribution.len() as u128));
    if size > budget as u128 {
        return Err(CbdError::BudgetExceeded { size, budget });
    }

    let position: HashMap<&str, usize> = spec
        .observables
        .iter()
        .enumerate()
        .map(|(i, o)| (o.name.as_str(), i))
        .collect();
    let mut atoms = vec![JointAtom {
        outcome: vec![Rational::zero(); spec.observables.len()],
        p: Rational::one(),
    }];
    for ctx in &spec.contexts {
        let mut next = Vec::with_capacity(atoms.len() * ctx.distribution.len());
        for atom in &atoms {
            for entry in &ctx.distribution {
                let mut outcome = atom.outcome.clone();
                for (name, v) in ctx.observables.iter().zip(&entry.outcome) {
                    outcome[position[name.as_str()]] = v.clone();
                }
                next.push(JointAtom {
                    outcome,
                    p: &atom.p * &entry.p,
                });
            }
        }
        atoms = next;
    }
    let witness = JointDistribution {
        observables: spec.observables.iter().map(|o| o.name.clone()).collect(),
        atoms,
    };
    assert!(witness.reproduces(sys), "product of context distributions must reproduce each context");
    Ok(FeasibilityResult::Feasible { witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jpd::{feasibility_general, CorrelationTriple, OutcomeWeight, DEFAULT_PRODUCT_BUDGET};
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    fn anticorrelated() -> MeasurementSystem {
        MeasurementSystem::pairwise_pm1(&CorrelationTriple::new(q(-1), q(-1), q(-1)).unwrap())
    }

    #[test]
    fn split_names_follow_contexts() {
        let (split, map) = split_by_context(&anticorrelated());
        let names: Vec<&str> = split.observables().iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["X_1", "Y_1", "X_2", "Z_2", "Y_3", "Z_3"]);
        assert_eq!(map.len(), 6);
        assert_eq!(map.get("Z", 3), Some("Z_3"));
        assert_eq!(map.get("Z", 1), None);
    }

    #[test]
    fn split_preserves_marginals() {
        let sys = anticorrelated();
        let (split, _) = split_by_context(&sys);
        for (a, b) in sys.contexts().iter().zip(split.contexts()) {
            assert_eq!(a.distribution(), b.distribution());
        }
    }

    #[test]
    fn split_of_anticorrelated_is_feasible() {
        let sys = anticorrelated();
        assert!(!feasibility_general(&sys, DEFAULT_PRODUCT_BUDGET).unwrap().is_feasible());
        let (split, _) = split_by_context(&sys);
        let res = verify_split_feasible(&split, DEFAULT_PRODUCT_BUDGET).unwrap();
        let w = res.witness().unwrap();
        assert_eq!(w.atoms.len(), 8);
        assert!(w.reproduces(&split));
        // The LP agrees on the split system.
        assert!(feasibility_general(&split, DEFAULT_PRODUCT_BUDGET).unwrap().is_feasible());
    }

    #[test]
    fn single_context_split_is_a_renamed_copy() {
        let sys = MeasurementSystem::new(MeasurementSystemSpec {
            observables: vec![ObservableSpec { name: "A".into(), outcomes: vec![q(0), q(1)] }],
            contexts: vec![ContextSpec {
                observables: vec!["A".into()],
                distribution: vec![
                    OutcomeWeight { outcome: vec![q(0)], p: Rational::new(1, 3) },
                    OutcomeWeight { outcome: vec![q(1)], p: Rational::new(2, 3) },
                ],
            }],
        })
        .unwrap();
        let (split, map) = split_by_context(&sys);
        assert_eq!(split.observables()[0].name, "A_1");
        assert_eq!(split.contexts(), sys.contexts());
        assert_eq!(map.len(), 1);
        assert!(verify_split_feasible(&split, DEFAULT_PRODUCT_BUDGET).unwrap().is_feasible());
    }

    #[test]
    fn shared_observables_are_rejected() {
        assert!(matches!(
            verify_split_feasible(&anticorrelated(), DEFAULT_PRODUCT_BUDGET),
            Err(CbdError::NotASplitSystem { first: 1, second: 2, .. })
        ));
    }

    #[test]
    fn witness_budget() {
        let (split, _) = split_by_context(&anticorrelated());
        assert!(matches!(
            verify_split_feasible(&split, 4),
            Err(CbdError::BudgetExceeded { size: 8, budget: 4 })
        ));
    }

    /// Small random systems over binary observables: each context picks a
    /// subset of up to three observables and random integer weights.
    pub(crate) fn arb_system() -> impl Strategy<Value = MeasurementSystem> {
        (2usize..=4, 1usize..=4)
            .prop_flat_map(|(n, k)| {
                let ctx = prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(3))
                    .prop_flat_map(|members| {
                        let size = 1usize << members.len();
                        (Just(members), prop::collection::vec(0u32..4, size))
                    });
                (Just(n), prop::collection::vec(ctx, k))
            })
            .prop_filter_map("valid system", |(n, ctxs)| {
                let observables = (0..n)
                    .map(|i| ObservableSpec { name: format!("A{i}"), outcomes: vec![q(0), q(1)] })
                    .collect();
                let contexts = ctxs
                    .iter()
                    .map(|(members, weights)| {
                        let mut weights = weights.clone();
                        if weights.iter().all(|&w| w == 0) {
                            weights[0] = 1;
                        }
                        let total: u32 = weights.iter().sum();
                        ContextSpec {
                            observables: members.iter().map(|i| format!("A{i}")).collect(),
                            distribution: weights
                                .iter()
                                .enumerate()
                                .map(|(f, &w)| OutcomeWeight {
                                    outcome: (0..members.len())
                                        .map(|b| q((f >> (members.len() - 1 - b) & 1) as i64))
                                        .collect(),
                                    p: Rational::new(w as i64, total as i64),
                                })
                                .collect(),
                        }
                    })
                    .collect();
                MeasurementSystem::new(MeasurementSystemSpec { observables, contexts }).ok()
            })
    }

    proptest! {
        #[test]
        fn split_always_feasible(sys in arb_system()) {
            let (split, map) = split_by_context(&sys);
            let incidences: usize = sys.contexts().iter().map(|c| c.observables().len()).sum();
            prop_assert_eq!(map.len(), incidences);
            prop_assert_eq!(split.observables().len(), incidences);
            let res = verify_split_feasible(&split, DEFAULT_PRODUCT_BUDGET).unwrap();
            prop_assert!(res.witness().unwrap().reproduces(&split));
        }
    }
}
