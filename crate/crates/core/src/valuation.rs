//! Valuations of a KS instance in two readings.
//!
//! In the classical reading every context is a measurement of the same
//! object, so one global 0/1 assignment must satisfy all contexts at once;
//! this is exactly [`search_valuations`]. In the quasi-set reading each
//! context is borne by its own strong singleton drawn from a qset of
//! indistinguishable systems, and values are only constrained context by
//! context.
//!
//! At the level of constraints the quasi-set family has the same shape as
//! splitting observables per context in [`crate::cbd`]: no cross-context
//! consistency is required in either. The two differ in what the bearers
//! are taken to be, not in the arithmetic.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jpd::{ContextSpec, MeasurementSystem, MeasurementSystemSpec, ObservableSpec, OutcomeWeight};
use crate::ks::{parity_certificate, search_valuations, KsError, KsInstance, ParityCertificate, RayId, SearchOptions, Valuation};
use crate::linalg::{inner_product, Ray};
use crate::qset::{new_qset, strong_singletons, Kind, Qset, QsetError, StrongSingleton};
use crate::rational::Rational;
use crate::rng::SplitMix64;

pub const DEFAULT_KIND: &str = "system";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("state has dimension {state}, instance dimension is {instance}")]
    DimensionMismatch { state: usize, instance: usize },
    #[error("context {context} out of range ({contexts} contexts)")]
    UnknownContext { context: usize, contexts: usize },
    #[error("ray {ray} is not in context {context}")]
    RayNotInContext { context: usize, ray: RayId },
    #[error("{got} choices given for {expected} contexts")]
    ChoiceCount { expected: usize, got: usize },
    #[error("probabilities over context {0} do not sum to one")]
    NotNormalized(usize),
    #[error(transparent)]
    Search(#[from] KsError),
    #[error(transparent)]
    Qset(#[from] QsetError),
}

/// Outcome of the classical reading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClassicalOutcome {
    Feasible { valuations: Vec<Valuation>, exhaustive: bool },
    Infeasible { parity: Option<ParityCertificate> },
}

impl ClassicalOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ClassicalOutcome::Feasible { .. })
    }
}

pub fn classical_mode(inst: &KsInstance) -> Result<ClassicalOutcome, KsError> {
    classical_mode_with(inst, SearchOptions::default())
}

/// One global valuation for all contexts. An infeasible answer carries
/// the parity certificate when one exists.
pub fn classical_mode_with(inst: &KsInstance, opts: SearchOptions) -> Result<ClassicalOutcome, KsError> {
    let found = search_valuations(inst, opts)?;
    Ok(if found.valuations.is_empty() {
        ClassicalOutcome::Infeasible {
            parity: parity_certificate(inst),
        }
    } else {
        ClassicalOutcome::Feasible {
            valuations: found.valuations,
            exhaustive: found.exhaustive,
        }
    })
}

/// `⟨⟨P, V⟩, ⟦x⟧_z⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct QsetValuationEntry {
    pub ray_id: RayId,
    pub value: u8,
    pub bearer: StrongSingleton,
}

/// Per-context valuation entries over one system qset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "FamilyData", try_from = "FamilyData")]
pub struct ContextualValuationFamily {
    system: Arc<Qset>,
    contexts: Vec<Vec<QsetValuationEntry>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryData {
    ray_id: RayId,
    value: u8,
    bearer: BearerData,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BearerData {
    kind: Kind,
    token: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyData {
    system: Qset,
    contexts: Vec<Vec<EntryData>>,
}

impl From<ContextualValuationFamily> for FamilyData {
    fn from(f: ContextualValuationFamily) -> Self {
        FamilyData {
            system: (*f.system).clone(),
            contexts: f
                .contexts
                .into_iter()
                .map(|c| {
                    c.into_iter()
                        .map(|e| EntryData {
                            ray_id: e.ray_id,
                            value: e.value,
                            bearer: BearerData {
                                kind: e.bearer.kind().clone(),
                                token: e.bearer.token(),
                            },
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<FamilyData> for ContextualValuationFamily {
    type Error = QsetError;
    fn try_from(d: FamilyData) -> Result<Self, QsetError> {
        let system = Arc::new(d.system);
        let contexts = d
            .contexts
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|e| QsetValuationEntry {
                        ray_id: e.ray_id,
                        value: e.value,
                        bearer: StrongSingleton::reattach(e.bearer.kind, e.bearer.token, Arc::clone(&system)),
                    })
                    .collect()
            })
            .collect();
        Ok(ContextualValuationFamily { system, contexts })
    }
}

impl ContextualValuationFamily {
    /// Assembles a family without checking it; see [`verify_family`].
    pub fn from_parts(system: Qset, contexts: Vec<Vec<QsetValuationEntry>>) -> ContextualValuationFamily {
        ContextualValuationFamily {
            system: Arc::new(system),
            contexts,
        }
    }

    pub fn system(&self) -> &Qset {
        &self.system
    }

    pub fn contexts(&self) -> &[Vec<QsetValuationEntry>] {
        &self.contexts
    }

    pub fn contexts_mut(&mut self) -> &mut [Vec<QsetValuationEntry>] {
        &mut self.contexts
    }

    pub fn bearer_count(&self) -> usize {
        self.contexts
            .iter()
            .filter_map(|c| c.first())
            .map(|e| (e.bearer.kind().clone(), e.bearer.token()))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Value of `ray` in 0-based context `context`, if listed there.
    pub fn value(&self, context: usize, ray: RayId) -> Option<u8> {
        self.contexts
            .get(context)?
            .iter()
            .find(|e| e.ray_id == ray)
            .map(|e| e.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    /// The first ray of each context is true.
    #[default]
    FirstRay,
    /// A seeded uniform choice per context.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QsetModeOptions {
    pub kind: Kind,
    /// Elements in the system qset; defaults to the number of contexts.
    pub cardinality: Option<u64>,
    pub assignment: Assignment,
}

impl Default for QsetModeOptions {
    fn default() -> Self {
        QsetModeOptions {
            kind: Kind::new(DEFAULT_KIND).expect("nonempty"),
            cardinality: None,
            assignment: Assignment::FirstRay,
        }
    }
}

pub fn qset_mode(inst: &KsInstance) -> ContextualValuationFamily {
    qset_mode_with(inst, &QsetModeOptions::default()).expect("default options always allocate enough singletons")
}

pub fn qset_mode_with(inst: &KsInstance, opts: &QsetModeOptions) -> Result<ContextualValuationFamily, ValuationError> {
    let n = opts.cardinality.unwrap_or(inst.contexts().len() as u64);
    let system = new_qset(&[(opts.kind.clone(), n as i64)])?;
    qset_mode_in(inst, &system, opts)
}

/// As [`qset_mode_with`], drawing bearers from a caller-supplied qset.
pub fn qset_mode_in(
    inst: &KsInstance,
    system: &Qset,
    opts: &QsetModeOptions,
) -> Result<ContextualValuationFamily, ValuationError> {
    let choices: Vec<RayId> = match opts.assignment {
        Assignment::FirstRay => inst.contexts().iter().map(|c| c.ray_ids()[0]).collect(),
        Assignment::Seeded(seed) => {
            let mut rng = SplitMix64::new(seed);
            inst.contexts()
                .iter()
                .map(|c| c.ray_ids()[rng.below(c.len() as u64) as usize])
                .collect()
        }
    };
    with_choices(inst, system, &opts.kind, &choices)
}

/// A family in which context `i` makes `choices[i]` true.
pub fn with_choices(
    inst: &KsInstance,
    system: &Qset,
    kind: &Kind,
    choices: &[RayId],
) -> Result<ContextualValuationFamily, ValuationError> {
    let contexts = inst.contexts();
    if choices.len() != contexts.len() {
        return Err(ValuationError::ChoiceCount {
            expected: contexts.len(),
            got: choices.len(),
        });
    }
    let bearers = strong_singletons(system, kind, contexts.len() as u64)?;
    let system = Arc::new(system.clone());
    let mut out = Vec::with_capacity(contexts.len());
    for (c, ((ctx, &choice), bearer)) in contexts.iter().zip(choices).zip(bearers).enumerate() {
        if !ctx.contains(choice) {
            return Err(ValuationError::RayNotInContext { context: c + 1, ray: choice });
        }
        out.push(
            ctx.ray_ids()
                .iter()
                .map(|&id| QsetValuationEntry {
                    ray_id: id,
                    value: u8::from(id == choice),
                    bearer: bearer.clone(),
                })
                .collect(),
        );
    }
    Ok(ContextualValuationFamily { system, contexts: out })
}

/// Every context has nonempty entries summing to one with values in
/// {0, 1}, one bearer that is a well-formed strong singleton of the
/// family's system qset, and no bearer is shared by two contexts.
pub fn verify_family(fam: &ContextualValuationFamily) -> bool {
    let mut seen = BTreeSet::new();
    fam.contexts.iter().all(|entries| {
        let Some(first) = entries.first() else {
            return false;
        };
        let bearer = &first.bearer;
        let sums_to_one = entries.iter().map(|e| e.value as u32).sum::<u32>() == 1;
        let binary = entries.iter().all(|e| e.value <= 1);
        let one_bearer = entries
            .iter()
            .all(|e| e.bearer.kind() == bearer.kind() && e.bearer.token() == bearer.token());
        sums_to_one
            && binary
            && one_bearer
            && bearer.is_well_formed_in(&fam.system)
            && seen.insert((bearer.kind().clone(), bearer.token()))
    })
}

/// The entries of each context list exactly that context's rays.
pub fn family_covers(inst: &KsInstance, fam: &ContextualValuationFamily) -> bool {
    fam.contexts.len() == inst.contexts().len()
        && fam.contexts.iter().zip(inst.contexts()).all(|(entries, ctx)| {
            let listed: BTreeSet<RayId> = entries.iter().map(|e| e.ray_id).collect();
            listed.len() == entries.len() && listed == ctx.ray_ids().iter().copied().collect()
        })
}

fn check_state(inst: &KsInstance, state: &Ray, context: usize) -> Result<(), ValuationError> {
    if state.dimension() != inst.dimension() {
        return Err(ValuationError::DimensionMismatch {
            state: state.dimension(),
            instance: inst.dimension(),
        });
    }
    if context >= inst.contexts().len() {
        return Err(ValuationError::UnknownContext {
            context: context + 1,
            contexts: inst.contexts().len(),
        });
    }
    Ok(())
}

/// `⟨ψ|P|ψ⟩ / ⟨ψ|ψ⟩` for each ray of 0-based `context`, in context order.
pub fn born_probabilities(
    inst: &KsInstance,
    state: &Ray,
    context: usize,
) -> Result<Vec<(RayId, Rational)>, ValuationError> {
    check_state(inst, state, context)?;
    let psi = Rational::integer(state.norm_squared() as i64);
    inst.contexts()[context]
        .ray_ids()
        .iter()
        .map(|&id| {
            let ray = inst.ray(id);
            let overlap = inner_product(ray, state).map_err(KsError::from)?;
            let norm = Rational::integer(ray.norm_squared() as i64);
            Ok((id, &(&overlap * &overlap) / &(&norm * &psi)))
        })
        .collect()
}

/// Draws one ray of `context` with its Born probability. The draw is an
/// exact integer comparison against the common denominator, so the result
/// depends only on the generator state.
pub fn sample_context(
    inst: &KsInstance,
    state: &Ray,
    context: usize,
    rng: &mut SplitMix64,
) -> Result<RayId, ValuationError> {
    let probs = born_probabilities(inst, state, context)?;
    if probs.iter().map(|(_, p)| p).sum::<Rational>() != Rational::one() {
        return Err(ValuationError::NotNormalized(context + 1));
    }
    let common = probs
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, (_, p)| acc.lcm(p.denominator()));
    let draw = rng.below_big(&common.to_biguint().expect("positive denominator"));
    let draw = num_bigint::BigInt::from(draw);
    let mut cumulative = num_bigint::BigInt::zero();
    for (id, p) in &probs {
        cumulative += p.numerator() * (&common / p.denominator());
        if draw < cumulative {
            return Ok(*id);
        }
    }
    unreachable!("cumulative mass reaches the common denominator")
}

/// [`sample_context`] with a fresh generator.
pub fn simulate_context_run(inst: &KsInstance, state: &Ray, context: usize, seed: u64) -> Result<RayId, ValuationError> {
    sample_context(inst, state, context, &mut SplitMix64::new(seed))
}

/// Observable name for ray `id` in [`born_system`].
pub fn ray_observable(id: RayId) -> String {
    format!("P{id}")
}

/// The measurement system of 0/1 projector outcomes that a state induces
/// on the instance's contexts.
pub fn born_system(inst: &KsInstance, state: &Ray) -> Result<MeasurementSystem, ValuationError> {
    let binary = vec![Rational::zero(), Rational::one()];
    let observables = (0..inst.rays().len())
        .map(|id| ObservableSpec {
            name: ray_observable(id),
            outcomes: binary.clone(),
        })
        .collect();
    let mut contexts = Vec::new();
    for c in 0..inst.contexts().len() {
        let probs = born_probabilities(inst, state, c)?;
        if probs.iter().map(|(_, p)| p).sum::<Rational>() != Rational::one() {
            return Err(ValuationError::NotNormalized(c + 1));
        }
        let distribution = probs
            .iter()
            .enumerate()
            .filter(|(_, (_, p))| !p.is_zero())
            .map(|(i, (_, p))| OutcomeWeight {
                outcome: (0..probs.len()).map(|j| Rational::integer((i == j) as i64)).collect(),
                p: p.clone(),
            })
            .collect();
        contexts.push(ContextSpec {
            observables: inst.contexts()[c].ray_ids().iter().map(|&id| ray_observable(id)).collect(),
            distribution,
        });
    }
    Ok(MeasurementSystem::new(MeasurementSystemSpec { observables, contexts })
        .expect("normalized one-hot contexts form a valid system"))
}
