//! Finite probability spaces, moments, and the joint-distribution
//! (noncontextuality) decision for systems of observables measured in
//! several contexts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{lp_feasible, FarkasCertificate, LinearSystem, LpError, LpSolution};
use crate::rational::Rational;

/// Upper bound on the number of global outcome assignments handed to the LP.
pub const DEFAULT_PRODUCT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JpdError {
    #[error("atom {atom:?} has negative weight {weight}")]
    NegativeWeight { atom: String, weight: Rational },
    #[error("weights sum to {0}, not 1")]
    MassNotOne(Rational),
    #[error("{atoms} atoms but {weights} weights")]
    LengthMismatch { atoms: usize, weights: usize },
    #[error("duplicate atom {0:?}")]
    DuplicateAtom(String),
    #[error("random variable is not defined on exactly the atoms of the space")]
    DomainMismatch,
    #[error("correlation {0} outside [-1, 1]")]
    CorrelationOutOfRange(Rational),
    #[error("duplicate observable {0:?}")]
    DuplicateObservable(String),
    #[error("observable {0:?} has no outcomes")]
    NoOutcomes(String),
    #[error("observable {name:?} lists outcome {outcome} twice")]
    DuplicateOutcome { name: String, outcome: Rational },
    #[error("unknown observable {0:?}")]
    UnknownObservable(String),
    #[error("context {0} is empty")]
    EmptyContext(usize),
    #[error("context {context} lists observable {name:?} twice")]
    RepeatedObservable { context: usize, name: String },
    #[error("observable {0:?} appears in no context")]
    UnusedObservable(String),
    #[error("context {context}: outcome {outcome:?} is not a joint outcome of the context")]
    UnknownOutcome { context: usize, outcome: Vec<Rational> },
    #[error("context {context}: outcome {outcome:?} listed twice")]
    DuplicateEntry { context: usize, outcome: Vec<Rational> },
    #[error("context {context}: negative probability {p}")]
    NegativeProbability { context: usize, p: Rational },
    #[error("context {context}: probabilities sum to {total}, not 1")]
    ContextMassNotOne { context: usize, total: Rational },
    #[error("product outcome space has {size} assignments, budget is {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// A finite probability space whose event algebra is the full power set of
/// its atoms, so only atom weights are stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilitySpace {
    atoms: Vec<String>,
    weights: Vec<Rational>,
}

pub fn make_space(atoms: Vec<String>, weights: Vec<Rational>) -> Result<ProbabilitySpace, JpdError> {
    if atoms.len() != weights.len() {
        return Err(JpdError::LengthMismatch {
            atoms: atoms.len(),
            weights: weights.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for (a, w) in atoms.iter().zip(&weights) {
        if !seen.insert(a) {
            return Err(JpdError::DuplicateAtom(a.clone()));
        }
        if w.is_negative() {
            return Err(JpdError::NegativeWeight {
                atom: a.clone(),
                weight: w.clone(),
            });
        }
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(JpdError::MassNotOne(total));
    }
    Ok(ProbabilitySpace { atoms, weights })
}

impl ProbabilitySpace {
    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: &str) -> Option<&Rational> {
        self.atoms.iter().position(|a| a == atom).map(|i| &self.weights[i])
    }

    /// Probability of an event given as a set of atom labels.
    pub fn probability<'a>(&self, event: impl IntoIterator<Item = &'a str>) -> Rational {
        let event: BTreeSet<&str> = event.into_iter().collect();
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(a, _)| event.contains(a.as_str()))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn constant(&self, value: Rational) -> RandomVariable {
        RandomVariable {
            values: self.atoms.iter().map(|a| (a.clone(), value.clone())).collect(),
        }
    }
}

/// A real-valued function on the atoms of a space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomVariable {
    values: BTreeMap<String, Rational>,
}

impl RandomVariable {
    pub fn new(values: impl IntoIterator<Item = (String, Rational)>) -> RandomVariable {
        RandomVariable {
            values: values.into_iter().collect(),
        }
    }

    pub fn value(&self, atom: &str) -> Option<&Rational> {
        self.values.get(atom)
    }

    fn is_total_on(&self, sp: &ProbabilitySpace) -> bool {
        self.values.len() == sp.atoms.len() && sp.atoms.iter().all(|a| self.values.contains_key(a))
    }
}

pub fn expectation(sp: &ProbabilitySpace, a: &RandomVariable) -> Result<Rational, JpdError> {
    moment(sp, &[a])
}

/// Expectation of the pointwise product of `vars`; an empty list gives 1.
pub fn moment(sp: &ProbabilitySpace, vars: &[&RandomVariable]) -> Result<Rational, JpdError> {
    if vars.iter().any(|v| !v.is_total_on(sp)) {
        return Err(JpdError::DomainMismatch);
    }
    Ok(sp
        .atoms
        .iter()
        .zip(&sp.weights)
        .map(|(atom, w)| {
            vars.iter()
                .fold(w.clone(), |acc, v| acc * &v.values[atom.as_str()])
        })
        .sum())
}

/// Pairwise correlations of three ±1 variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub e_xy: Rational,
    pub e_xz: Rational,
    pub e_yz: Rational,
}

impl CorrelationTriple {
    pub fn new(e_xy: Rational, e_xz: Rational, e_yz: Rational) -> Result<CorrelationTriple, JpdError> {
        for e in [&e_xy, &e_xz, &e_yz] {
            if *e < -Rational::one() || *e > Rational::one() {
                return Err(JpdError::CorrelationOutOfRange(e.clone()));
            }
        }
        Ok(CorrelationTriple { e_xy, e_xz, e_yz })
    }

    fn values(&self) -> [&Rational; 3] {
        [&self.e_xy, &self.e_xz, &self.e_yz]
    }
}

/// `-1 ≤ E(XY)+E(XZ)+E(YZ) ≤ 1 + 2·min(E(XY),E(XZ),E(YZ))`.
pub fn suppes_zanotti_holds(c: &CorrelationTriple) -> bool {
    let sum: Rational = c.values().into_iter().sum();
    let min = c.values().into_iter().min().expect("three values").clone();
    sum >= -Rational::one() && sum <= Rational::one() + Rational::integer(2) * min
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: String,
    pub outcomes: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeWeight {
    pub outcome: Vec<Rational>,
    pub p: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub observables: Vec<String>,
    /// Joint outcomes not listed have probability zero.
    pub distribution: Vec<OutcomeWeight>,
}

/// Serialized form of a [`MeasurementSystem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSystemSpec {
    pub observables: Vec<ObservableSpec>,
    pub contexts: Vec<ContextSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    pub name: String,
    pub outcomes: Vec<Rational>,
}

/// One context: which observables are measured jointly and the
/// distribution of their joint outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementContext {
    observables: Vec<usize>,
    /// Dense over joint outcome indices, first observable most significant.
    distribution: Vec<Rational>,
}

impl MeasurementContext {
    pub fn observables(&self) -> &[usize] {
        &self.observables
    }

    pub fn distribution(&self) -> &[Rational] {
        &self.distribution
    }
}

/// Observables with finite outcome sets, and per-context joint
/// distributions over subsets of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementSystemSpec", into = "MeasurementSystemSpec")]
pub struct MeasurementSystem {
    observables: Vec<Observable>,
    contexts: Vec<MeasurementContext>,
}

impl TryFrom<MeasurementSystemSpec> for MeasurementSystem {
    type Error = JpdError;

    fn try_from(spec: MeasurementSystemSpec) -> Result<Self, JpdError> {
        MeasurementSystem::new(spec)
    }
}

impl From<MeasurementSystem> for MeasurementSystemSpec {
    fn from(sys: MeasurementSystem) -> Self {
        sys.to_spec()
    }
}

impl MeasurementSystem {
    pub fn new(spec: MeasurementSystemSpec) -> Result<MeasurementSystem, JpdError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, o) in spec.observables.iter().enumerate() {
            if index.insert(o.name.as_str(), i).is_some() {
                return Err(JpdError::DuplicateObservable(o.name.clone()));
            }
            if o.outcomes.is_empty() {
                return Err(JpdError::NoOutcomes(o.name.clone()));
            }
            for (k, v) in o.outcomes.iter().enumerate() {
                if o.outcomes[..k].contains(v) {
                    return Err(JpdError::DuplicateOutcome {
                        name: o.name.clone(),
                        outcome: v.clone(),
                    });
                }
            }
        }
        let observables: Vec<Observable> = spec
            .observables
            .iter()
            .map(|o| Observable {
                name: o.name.clone(),
                outcomes: o.outcomes.clone(),
            })
            .collect();

        let mut contexts = Vec::with_capacity(spec.contexts.len());
        let mut used = vec![false; observables.len()];
        for (c, ctx) in spec.contexts.iter().enumerate() {
            if ctx.observables.is_empty() {
                return Err(JpdError::EmptyContext(c + 1));
            }
            let mut members = Vec::with_capacity(ctx.observables.len());
            for name in &ctx.observables {
                let &i = index
                    .get(name.as_str())
                    .ok_or_else(|| JpdError::UnknownObservable(name.clone()))?;
                if members.contains(&i) {
                    return Err(JpdError::RepeatedObservable {
                        context: c + 1,
                        name: name.clone(),
                    });
                }
                used[i] = true;
                members.push(i);
            }
            let size: usize = members.iter().map(|&i| observables[i].outcomes.len()).product();
            let mut distribution = vec![Rational::zero(); size];
            let mut listed = vec![false; size];
            for entry in &ctx.distribution {
                let unknown = || JpdError::UnknownOutcome {
                    context: c + 1,
                    outcome: entry.outcome.clone(),
                };
                if entry.outcome.len() != members.len() {
                    return Err(unknown());
                }
                let mut flat = 0;
                for (&i, v) in members.iter().zip(&entry.outcome) {
                    let k = observables[i].outcomes.iter().position(|o| o == v).ok_or_else(unknown)?;
                    flat = flat * observables[i].outcomes.len() + k;
                }
                if listed[flat] {
                    return Err(JpdError::DuplicateEntry {
                        context: c + 1,
                        outcome: entry.outcome.clone(),
                    });
                }
                if entry.p.is_negative() {
                    return Err(JpdError::NegativeProbability {
                        context: c + 1,
                        p: entry.p.clone(),
                    });
                }
                listed[flat] = true;
                distribution[flat] = entry.p.clone();
            }
            let total: Rational = distribution.iter().sum();
            if !total.is_one() {
                return Err(JpdError::ContextMassNotOne { context: c + 1, total });
            }
            contexts.push(MeasurementContext {
                observables: members,
                distribution,
            });
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(JpdError::UnusedObservable(observables[i].name.clone()));
        }
        Ok(MeasurementSystem { observables, contexts })
    }

    pub fn to_spec(&self) -> MeasurementSystemSpec {
        MeasurementSystemSpec {
            observables: self
                .observables
                .iter()
                .map(|o| ObservableSpec {
                    name: o.name.clone(),
                    outcomes: o.outcomes.clone(),
                })
                .collect(),
            contexts: self
                .contexts
                .iter()
                .map(|ctx| ContextSpec {
                    observables: ctx.observables.iter().map(|&i| self.observables[i].name.clone()).collect(),
                    distribution: (0..ctx.distribution.len())
                        .filter(|&f| !ctx.distribution[f].is_zero())
                        .map(|f| OutcomeWeight {
                            outcome: self.joint_outcome_values(ctx, f),
                            p: ctx.distribution[f].clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn contexts(&self) -> &[MeasurementContext] {
        &self.contexts
    }

    pub fn observable_index(&self, name: &str) -> Option<usize> {
        self.observables.iter().position(|o| o.name == name)
    }

    fn joint_outcome_indices(&self, ctx: &MeasurementContext, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; ctx.observables.len()];
        for (slot, &i) in ctx.observables.iter().enumerate().rev() {
            let k = self.observables[i].outcomes.len();
            out[slot] = flat % k;
            flat /= k;
        }
        out
    }

    fn joint_outcome_values(&self, ctx: &MeasurementContext, flat: usize) -> Vec<Rational> {
        self.joint_outcome_indices(ctx, flat)
            .into_iter()
            .zip(&ctx.observables)
            .map(|(k, &i)| self.observables[i].outcomes[k].clone())
            .collect()
    }

    /// Number of global outcome assignments, saturating.
    pub fn product_size(&self) -> u128 {
        self.observables
            .iter()
            .fold(1u128, |acc, o| acc.saturating_mul(o.outcomes.len() as u128))
    }

    /// Three ±1 observables X, Y, Z measured in pairs, each pair with
    /// uniform marginals and the given correlation: `p(a,b) = (1 + ab·e)/4`.
    pub fn pairwise_pm1(c: &CorrelationTriple) -> MeasurementSystem {
        let pm = || vec![Rational::one(), -Rational::one()];
        let pair = |a: &str, b: &str, e: &Rational| ContextSpec {
            observables: vec![a.into(), b.into()],
            distribution: [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                .into_iter()
                .map(|(x, y)| OutcomeWeight {
                    outcome: vec![Rational::integer(x), Rational::integer(y)],
                    p: (Rational::one() + Rational::integer(x * y) * e) / Rational::integer(4),
                })
                .collect(),
        };
        MeasurementSystem::new(MeasurementSystemSpec {
            observables: ["X", "Y", "Z"]
                .into_iter()
                .map(|n| ObservableSpec {
                    name: n.into(),
                    outcomes: pm(),
                })
                .collect(),
            contexts: vec![
                pair("X", "Y", &c.e_xy),
                pair("X", "Z", &c.e_xz),
                pair("Y", "Z", &c.e_yz),
            ],
        })
        .expect("pairwise system is valid for correlations in [-1, 1]")
    }
}

/// One atom of a joint distribution: a full outcome assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointAtom {
    pub outcome: Vec<Rational>,
    pub p: Rational,
}

/// A joint distribution over named observables, listing only atoms with
/// positive probability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub observables: Vec<String>,
    pub atoms: Vec<JointAtom>,
}

impl JointDistribution {
    pub fn probability_of(&self, outcome: &[Rational]) -> Rational {
        self.atoms
            .iter()
            .filter(|a| a.outcome == outcome)
            .map(|a| &a.p)
            .sum()
    }

    /// The distribution as a probability space, one atom per listed
    /// outcome, together with one coordinate random variable per observable.
    pub fn to_space(&self) -> Result<(ProbabilitySpace, Vec<RandomVariable>), JpdError> {
        let label = |o: &[Rational]| {
            let parts: Vec<String> = o.iter().map(Rational::to_string).collect();
            format!("({})", parts.join(","))
        };
        let labels: Vec<String> = self.atoms.iter().map(|a| label(&a.outcome)).collect();
        let space = make_space(labels.clone(), self.atoms.iter().map(|a| a.p.clone()).collect())?;
        let vars = (0..self.observables.len())
            .map(|k| {
                RandomVariable::new(
                    labels
                        .iter()
                        .zip(&self.atoms)
                        .map(|(l, a)| (l.clone(), a.outcome[k].clone())),
                )
            })
            .collect();
        Ok((space, vars))
    }

    /// Whether this distribution reproduces every context distribution of
    /// `sys` exactly under marginalization.
    pub fn reproduces(&self, sys: &MeasurementSystem) -> bool {
        let names: Vec<&str> = sys.observables.iter().map(|o| o.name.as_str()).collect();
        if self.observables.iter().map(String::as_str).ne(names.iter().copied()) {
            return false;
        }
        let mut total = Rational::zero();
        let mut indexed = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            if atom.p.is_negative() || atom.outcome.len() != names.len() {
                return false;
            }
            let mut idx = Vec::with_capacity(names.len());
            for (o, v) in sys.observables.iter().zip(&atom.outcome) {
                match o.outcomes.iter().position(|x| x == v) {
                    Some(k) => idx.push(k),
                    None => return false,
                }
            }
            total += &atom.p;
            indexed.push((idx, &atom.p));
        }
        if !total.is_one() {
            return false;
        }
        sys.contexts.iter().all(|ctx| {
            let mut marginal = vec![Rational::zero(); ctx.distribution.len()];
            for (idx, p) in &indexed {
                let flat = ctx
                    .observables
                    .iter()
                    .fold(0, |f, &i| f * sys.observables[i].outcomes.len() + idx[i]);
                marginal[flat] += *p;
            }
            marginal == ctx.distribution
        })
    }
}

/// A Farkas vector over a labelled constraint system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasibilityCertificate {
    pub rows: Vec<String>,
    pub y: Vec<Rational>,
}

impl InfeasibilityCertificate {
    pub fn verify(&self, constraints: &LinearSystem) -> bool {
        FarkasCertificate { y: self.y.clone() }.verify(constraints)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum FeasibilityResult {
    Feasible { witness: JointDistribution },
    Infeasible { certificate: InfeasibilityCertificate },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl FeasibilityResult {
    pub fn verdict(&self) -> Verdict {
        match self {
            FeasibilityResult::Feasible { .. } => Verdict::Feasible,
            FeasibilityResult::Infeasible { .. } => Verdict::Infeasible,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.verdict() == Verdict::Feasible
    }

    pub fn witness(&self) -> Option<&JointDistribution> {
        match self {
            FeasibilityResult::Feasible { witness } => Some(witness),
            FeasibilityResult::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&InfeasibilityCertificate> {
        match self {
            FeasibilityResult::Infeasible { certificate } => Some(certificate),
            FeasibilityResult::Feasible { .. } => None,
        }
    }
}

/// `(x, y, z)` for atom `k` of `{±1}³`, ordered `+++, ++-, ..., ---`.
fn pm1_atom(k: usize) -> [i64; 3] {
    let s = |bit: usize| if k >> bit & 1 == 0 { 1 } else { -1 };
    [s(2), s(1), s(0)]
}

/// Normalization plus the three product moments over the 8 atoms of `{±1}³`.
pub fn three_constraints(c: &CorrelationTriple) -> LinearSystem {
    let mut sys = LinearSystem::new(vec![Rational::one(), c.e_xy.clone(), c.e_xz.clone(), c.e_yz.clone()]);
    for k in 0..8 {
        let [x, y, z] = pm1_atom(k);
        sys.push_column(vec![
            (0, Rational::one()),
            (1, Rational::integer(x * y)),
            (2, Rational::integer(x * z)),
            (3, Rational::integer(y * z)),
        ])
        .expect("rows in range");
    }
    sys
}

pub const THREE_ROWS: [&str; 4] = ["normalization", "E(XY)", "E(XZ)", "E(YZ)"];

/// Joint distribution existence for three ±1 variables with prescribed
/// pairwise moments; first moments are left free.
///
/// A feasible answer is symmetrized under global sign flip, which keeps
/// every second moment and puts all first moments at zero.
pub fn feasibility_three(c: &CorrelationTriple) -> Result<FeasibilityResult, JpdError> {
    let sys = three_constraints(c);
    Ok(match lp_feasible(&sys)? {
        LpSolution::Feasible(x) => {
            let half = Rational::new(1, 2);
            let atoms = (0..8)
                .map(|k| (k, (&x[k] + &x[7 - k]) * &half))
                .filter(|(_, p)| !p.is_zero())
                .map(|(k, p)| JointAtom {
                    outcome: pm1_atom(k).iter().map(|&v| Rational::integer(v)).collect(),
                    p,
                })
                .collect();
            FeasibilityResult::Feasible {
                witness: JointDistribution {
                    observables: vec!["X".into(), "Y".into(), "Z".into()],
                    atoms,
                },
            }
        }
        LpSolution::Infeasible(cert) => FeasibilityResult::Infeasible {
            certificate: InfeasibilityCertificate {
                rows: THREE_ROWS.iter().map(|s| s.to_string()).collect(),
                y: cert.y,
            },
        },
    })
}

/// Row labels of [`marginal_constraints`].
pub fn marginal_row_labels(sys: &MeasurementSystem) -> Vec<String> {
    let mut rows = vec!["normalization".to_string()];
    for (c, ctx) in sys.contexts.iter().enumerate() {
        let names: Vec<&str> = ctx.observables.iter().map(|&i| sys.observables[i].name.as_str()).collect();
        for f in 0..ctx.distribution.len() {
            let vals: Vec<String> = sys.joint_outcome_values(ctx, f).iter().map(Rational::to_string).collect();
            rows.push(format!("context {}: ({}) = ({})", c + 1, names.join(","), vals.join(",")));
        }
    }
    rows
}

/// One variable per global outcome assignment (mixed radix, first
/// observable most significant); one row for normalization and one per
/// context joint outcome.
pub fn marginal_constraints(sys: &MeasurementSystem, budget: u64) -> Result<LinearSystem, JpdError> {
    let size = sys.product_size();
    if size > budget as u128 {
        return Err(JpdError::BudgetExceeded { size, budget });
    }
    let mut rhs = vec![Rational::one()];
    let mut offsets = Vec::with_capacity(sys.contexts.len());
    for ctx in &sys.contexts {
        offsets.push(rhs.len());
        rhs.extend(ctx.distribution.iter().cloned());
    }
    let mut lp = LinearSystem::new(rhs);
    let radices: Vec<usize> = sys.observables.iter().map(|o| o.outcomes.len()).collect();
    let mut digits = vec![0usize; radices.len()];
    for _ in 0..size as usize {
        let mut col = vec![(0, Rational::one())];
        for (ctx, &off) in sys.contexts.iter().zip(&offsets) {
            let flat = ctx.observables.iter().fold(0, |f, &i| f * radices[i] + digits[i]);
            col.push((off + flat, Rational::one()));
        }
        lp.push_column(col)?;
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(lp)
}

/// Decides whether a single joint distribution over all observables
/// reproduces every context distribution. `Infeasible` means the system
/// is contextual.
pub fn feasibility_general(sys: &MeasurementSystem, budget: u64) -> Result<FeasibilityResult, JpdError> {
    let lp = marginal_constraints(sys, budget)?;
    Ok(match lp_feasible(&lp)? {
        LpSolution::Feasible(x) => {
            let radices: Vec<usize> = sys.observables.iter().map(|o| o.outcomes.len()).collect();
            let atoms = x
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(mut j, p)| {
                    let mut outcome = vec![Rational::zero(); radices.len()];
                    for (pos, &r) in radices.iter().enumerate().rev() {
                        outcome[pos] = sys.observables[pos].outcomes[j % r].clone();
                        j /= r;
                    }
                    JointAtom { outcome, p: p.clone() }
                })
                .collect();
            FeasibilityResult::Feasible {
                witness: JointDistribution {
                    observables: sys.observables.iter().map(|o| o.name.clone()).collect(),
                    atoms,
                },
            }
        }
        LpSolution::Infeasible(cert) => FeasibilityResult::Infeasible {
            certificate: InfeasibilityCertificate {
                rows: marginal_row_labels(sys),
                y: cert.y,
            },
        },
    })
}

/// Independent check of a [`feasibility_general`] answer.
pub fn verify_result(sys: &MeasurementSystem, result: &FeasibilityResult, budget: u64) -> Result<bool, JpdError> {
    Ok(match result {
        FeasibilityResult::Feasible { witness } => witness.reproduces(sys),
        FeasibilityResult::Infeasible { certificate } => {
            certificate.verify(&marginal_constraints(sys, budget)?)
        }
    })
}
