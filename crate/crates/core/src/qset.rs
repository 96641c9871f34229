//! A finite fragment of quasi-set theory, and automorphism-based
//! indiscernibility for finite relational structures.
//!
//! A [`Qset`] is known to the outside world only through its kinds and
//! their multiplicities. Each element carries a hidden bookkeeping label so
//! that membership can be tracked, but no public operation reports a label,
//! orders elements, or compares two element references for identity. The
//! only relation offered between element references is indistinguishability,
//! which in this model is sameness of kind.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

pub const DEFAULT_AUTOMORPHISM_BUDGET: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QsetError {
    #[error("kind name must be nonempty")]
    EmptyKind,
    #[error("kind {kind} given negative multiplicity {multiplicity}")]
    NegativeMultiplicity { kind: Kind, multiplicity: i64 },
    #[error("qset has no element of kind {0}")]
    KindAbsent(Kind),
    #[error("qset has {available} elements of kind {kind}, {requested} singletons requested")]
    InsufficientMultiplicity { kind: Kind, available: u64, requested: u64 },
    #[error("element {0:?} is not in the domain")]
    ElementNotInDomain(String),
    #[error("element {0:?} listed twice in the domain")]
    DuplicateElement(String),
    #[error("relation {0:?} mixes tuple lengths")]
    ArityMismatch(String),
    #[error("relation {0:?} declared twice")]
    DuplicateRelation(String),
    #[error("domain has {size} elements, automorphism budget is {budget}")]
    BudgetExceeded { size: usize, budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Kind(String);

impl Kind {
    pub fn new(name: impl Into<String>) -> Result<Kind, QsetError> {
        let name = name.into();
        if name.is_empty() {
            return Err(QsetError::EmptyKind);
        }
        Ok(Kind(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Kind {
    type Error = QsetError;
    fn try_from(s: String) -> Result<Kind, QsetError> {
        Kind::new(s)
    }
}

impl From<Kind> for String {
    fn from(k: Kind) -> String {
        k.0
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

static NEXT_LABEL: AtomicU64 = AtomicU64::new(0);

fn fresh_label() -> u64 {
    NEXT_LABEL.fetch_add(1, Ordering::Relaxed)
}

/// Handle to one element of a qset. Deliberately neither `PartialEq` nor
/// `Debug`-printable with its label.
#[derive(Clone)]
pub struct QObjectRef {
    kind: Kind,
    label: u64,
}

impl QObjectRef {
    pub fn kind(&self) -> &Kind {
        &self.kind
    }
}

impl fmt::Debug for QObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QObjectRef({})", self.kind)
    }
}

/// `a ≡ b`.
pub fn indistinguishable(a: &QObjectRef, b: &QObjectRef) -> bool {
    a.kind == b.kind
}

/// A finite quasi-set. Serializes as its kind → multiplicity table.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "BTreeMap<Kind, u64>", try_from = "BTreeMap<Kind, u64>")]
pub struct Qset {
    members: BTreeMap<Kind, Vec<u64>>,
}

impl fmt::Debug for Qset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.kinds()).finish()
    }
}

impl From<Qset> for BTreeMap<Kind, u64> {
    fn from(q: Qset) -> Self {
        q.kinds().map(|(k, n)| (k.clone(), n)).collect()
    }
}

impl TryFrom<BTreeMap<Kind, u64>> for Qset {
    type Error = QsetError;
    fn try_from(table: BTreeMap<Kind, u64>) -> Result<Qset, QsetError> {
        Ok(Qset::from_table(table.into_iter()))
    }
}

/// A qset with the given kind multiplicities. Repeated kinds add up.
pub fn new_qset(spec: &[(Kind, i64)]) -> Result<Qset, QsetError> {
    let mut table: BTreeMap<Kind, u64> = BTreeMap::new();
    for (kind, m) in spec {
        if *m < 0 {
            return Err(QsetError::NegativeMultiplicity {
                kind: kind.clone(),
                multiplicity: *m,
            });
        }
        *table.entry(kind.clone()).or_default() += *m as u64;
    }
    Ok(Qset::from_table(table.into_iter()))
}

impl Qset {
    pub fn empty() -> Qset {
        Qset {
            members: BTreeMap::new(),
        }
    }

    fn from_table(table: impl Iterator<Item = (Kind, u64)>) -> Qset {
        Qset {
            members: table
                .filter(|(_, n)| *n > 0)
                .map(|(k, n)| (k, (0..n).map(|_| fresh_label()).collect()))
                .collect(),
        }
    }

    /// Collects object references into a qset; duplicates count once.
    pub fn from_objects<'a>(objects: impl IntoIterator<Item = &'a QObjectRef>) -> Qset {
        let mut members: BTreeMap<Kind, Vec<u64>> = BTreeMap::new();
        for o in objects {
            let labels = members.entry(o.kind.clone()).or_default();
            if !labels.contains(&o.label) {
                labels.push(o.label);
            }
        }
        Qset { members }
    }

    /// The q-cardinal `qc(z)`.
    pub fn qcard(&self) -> u64 {
        self.members.values().map(|v| v.len() as u64).sum()
    }

    pub fn multiplicity(&self, kind: &Kind) -> u64 {
        self.members.get(kind).map_or(0, |v| v.len() as u64)
    }

    /// Kinds present (multiplicity ≥ 1) with their multiplicities.
    pub fn kinds(&self) -> impl Iterator<Item = (&Kind, u64)> {
        self.members.iter().map(|(k, v)| (k, v.len() as u64))
    }

    pub fn contains(&self, object: &QObjectRef) -> bool {
        self.members
            .get(&object.kind)
            .is_some_and(|labels| labels.contains(&object.label))
    }

    /// References to every element, grouped by kind.
    pub fn objects(&self) -> Vec<QObjectRef> {
        self.members
            .iter()
            .flat_map(|(k, labels)| labels.iter().map(move |&label| QObjectRef { kind: k.clone(), label }))
            .collect()
    }

    /// `[x]_z`: the elements of `z` of kind `k`.
    pub fn sub_of_kind(&self, kind: &Kind) -> Qset {
        sub_of_kind(self, kind)
    }

    /// Reassigns hidden labels within each kind by a seeded permutation.
    /// No public observation of the result differs from `self`.
    pub fn permute_hidden_labels(&self, seed: u64) -> Qset {
        let mut rng = SplitMix64::new(seed);
        Qset {
            members: self
                .members
                .iter()
                .map(|(k, labels)| {
                    let mut labels = labels.clone();
                    rng.shuffle(&mut labels);
                    (k.clone(), labels)
                })
                .collect(),
        }
    }
}

pub fn sub_of_kind(z: &Qset, kind: &Kind) -> Qset {
    Qset {
        members: z
            .members
            .get(kind)
            .map(|labels| BTreeMap::from([(kind.clone(), labels.clone())]))
            .unwrap_or_default(),
    }
}

/// Same multiplicity for every kind.
pub fn qset_indistinguishable(a: &Qset, b: &Qset) -> bool {
    a.kinds().eq(b.kinds())
}

/// `⟦x⟧_z`: a sub-qset of `z` with q-cardinal one whose sole element is of
/// the given kind. It records which draw it came from (its token) but not
/// which element it holds.
#[derive(Clone)]
pub struct StrongSingleton {
    parent: Arc<Qset>,
    kind: Kind,
    token: u32,
}

impl StrongSingleton {
    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn token(&self) -> u32 {
        self.token
    }

    pub fn parent(&self) -> &Qset {
        &self.parent
    }

    pub fn qcard(&self) -> u64 {
        1
    }

    /// Drawn from a qset indistinguishable from `z`, for a kind that `z`
    /// has enough elements of.
    pub fn is_well_formed_in(&self, z: &Qset) -> bool {
        qset_indistinguishable(&self.parent, z) && (self.token as u64) < z.multiplicity(&self.kind)
    }

    pub(crate) fn reattach(kind: Kind, token: u32, parent: Arc<Qset>) -> StrongSingleton {
        StrongSingleton { parent, kind, token }
    }
}

impl fmt::Debug for StrongSingleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟦{}⟧#{}", self.kind, self.token)
    }
}

#[derive(Serialize)]
struct SingletonView<'a> {
    kind: &'a Kind,
    token: u32,
}

impl Serialize for StrongSingleton {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SingletonView {
            kind: &self.kind,
            token: self.token,
        }
        .serialize(serializer)
    }
}

pub fn strong_singleton(z: &Qset, kind: &Kind) -> Result<StrongSingleton, QsetError> {
    Ok(strong_singletons(z, kind, 1)?.remove(0))
}

/// `count` strong singletons of one kind, with tokens `0..count`. Each is
/// indistinguishable from the others; none is identified with an element.
pub fn strong_singletons(z: &Qset, kind: &Kind, count: u64) -> Result<Vec<StrongSingleton>, QsetError> {
    let available = z.multiplicity(kind);
    if available == 0 {
        return Err(QsetError::KindAbsent(kind.clone()));
    }
    if count > available {
        return Err(QsetError::InsufficientMultiplicity {
            kind: kind.clone(),
            available,
            requested: count,
        });
    }
    let parent = Arc::new(z.clone());
    Ok((0..count as u32)
        .map(|token| StrongSingleton {
            parent: Arc::clone(&parent),
            kind: kind.clone(),
            token,
        })
        .collect())
}

/// A relation between kind slots of two qsets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QFunction {
    pub pairs: Vec<(Kind, Kind)>,
}

/// If `a ≡ a'` then `b ≡ b'` for every two pairs `(a, b)`, `(a', b')`.
pub fn check_qfunction(f: &QFunction) -> bool {
    let mut image: BTreeMap<&Kind, &Kind> = BTreeMap::new();
    f.pairs
        .iter()
        .all(|(a, b)| *image.entry(a).or_insert(b) == b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub name: String,
    pub tuples: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub domain: Vec<String>,
    pub relations: Vec<RelationSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    name: String,
    tuples: BTreeSet<Vec<usize>>,
}

/// `⟨A, R_i⟩` with a finite domain and named relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StructureSpec", into = "StructureSpec")]
pub struct FiniteStructure {
    domain: Vec<String>,
    relations: Vec<Relation>,
}

impl TryFrom<StructureSpec> for FiniteStructure {
    type Error = QsetError;
    fn try_from(spec: StructureSpec) -> Result<Self, QsetError> {
        FiniteStructure::new(spec)
    }
}

impl From<FiniteStructure> for StructureSpec {
    fn from(s: FiniteStructure) -> Self {
        StructureSpec {
            relations: s
                .relations
                .iter()
                .map(|r| RelationSpec {
                    name: r.name.clone(),
                    tuples: r
                        .tuples
                        .iter()
                        .map(|t| t.iter().map(|&i| s.domain[i].clone()).collect())
                        .collect(),
                })
                .collect(),
            domain: s.domain,
        }
    }
}

impl FiniteStructure {
    pub fn new(spec: StructureSpec) -> Result<FiniteStructure, QsetError> {
        let mut index = BTreeMap::new();
        for (i, e) in spec.domain.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(QsetError::DuplicateElement(e.clone()));
            }
        }
        let mut relations: Vec<Relation> = Vec::new();
        for r in &spec.relations {
            if relations.iter().any(|x| x.name == r.name) {
                return Err(QsetError::DuplicateRelation(r.name.clone()));
            }
            if r.tuples.windows(2).any(|w| w[0].len() != w[1].len()) {
                return Err(QsetError::ArityMismatch(r.name.clone()));
            }
            let tuples = r
                .tuples
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|e| index.get(e.as_str()).copied().ok_or_else(|| QsetError::ElementNotInDomain(e.clone())))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<BTreeSet<_>, _>>()?;
            relations.push(Relation {
                name: r.name.clone(),
                tuples,
            });
        }
        Ok(FiniteStructure {
            domain: spec.domain,
            relations,
        })
    }

    /// A simple graph as one symmetric binary relation `E`.
    pub fn undirected_graph(domain: &[&str], edges: &[(&str, &str)]) -> Result<FiniteStructure, QsetError> {
        let tuples = edges
            .iter()
            .flat_map(|&(a, b)| [vec![a.to_string(), b.to_string()], vec![b.to_string(), a.to_string()]])
            .collect();
        FiniteStructure::new(StructureSpec {
            domain: domain.iter().map(|s| s.to_string()).collect(),
            relations: vec![RelationSpec { name: "E".into(), tuples }],
        })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.iter().map(|r| r.name.as_str())
    }

    fn element(&self, label: &str) -> Result<usize, QsetError> {
        self.domain
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| QsetError::ElementNotInDomain(label.to_string()))
    }
}

/// A bijection of a structure's domain, as the list of images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

/// All relation-preserving bijections, in lexicographic order of their
/// image lists (so the identity comes first).
pub fn automorphisms(s: &FiniteStructure, budget: usize) -> Result<Vec<Permutation>, QsetError> {
    let n = s.domain.len();
    if n > budget {
        return Err(QsetError::BudgetExceeded { size: n, budget });
    }
    // Tuples become checkable once their largest element has an image.
    let mut checks: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); n];
    for (r, rel) in s.relations.iter().enumerate() {
        for t in &rel.tuples {
            if let Some(&last) = t.iter().max() {
                checks[last].push((r, t));
            }
        }
    }

    fn extend(
        s: &FiniteStructure,
        checks: &[Vec<(usize, &Vec<usize>)>],
        image: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Permutation>,
    ) {
        let i = image.len();
        if i == used.len() {
            out.push(Permutation(image.clone()));
            return;
        }
        for target in 0..used.len() {
            if used[target] {
                continue;
            }
            image.push(target);
            let ok = checks[i].iter().all(|(r, t)| {
                let mapped: Vec<usize> = t.iter().map(|&e| image[e]).collect();
                s.relations[*r].tuples.contains(&mapped)
            });
            if ok {
                used[target] = true;
                extend(s, checks, image, used, out);
                used[target] = false;
            }
            image.pop();
        }
    }

    let mut out = Vec::new();
    extend(s, &checks, &mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    Ok(out)
}

/// Some automorphism maps `a` to `b`.
pub fn structure_indiscernible(s: &FiniteStructure, a: &str, b: &str, budget: usize) -> Result<bool, QsetError> {
    let (a, b) = (s.element(a)?, s.element(b)?);
    Ok(automorphisms(s, budget)?.iter().any(|h| h.apply(a) == b))
}

/// Adds unary singleton predicates, one at a time, on the first element
/// moved by some automorphism, until only the identity survives.
pub fn rigid_extension(s: &FiniteStructure, budget: usize) -> Result<FiniteStructure, QsetError> {
    let mut out = s.clone();
    loop {
        let auts = automorphisms(&out, budget)?;
        let moved = (0..out.domain.len()).find(|&i| auts.iter().any(|h| h.apply(i) != i));
        let Some(e) = moved else {
            return Ok(out);
        };
        let mut name = format!("is_{}", out.domain[e]);
        while out.relations.iter().any(|r| r.name == name) {
            name.push('\'');
        }
        out.relations.push(Relation {
            name,
            tuples: BTreeSet::from([vec![e]]),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(name: &str) -> Kind {
        Kind::new(name).unwrap()
    }

    fn sulfuric_acid() -> Qset {
        new_qset(&[(k("H"), 2), (k("S"), 1), (k("O"), 4)]).unwrap()
    }

    fn path() -> FiniteStructure {
        FiniteStructure::undirected_graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
    }

    fn edgeless() -> FiniteStructure {
        FiniteStructure::undirected_graph(&["a", "b", "c"], &[]).unwrap()
    }

    #[test]
    fn kinds_must_be_named() {
        assert_eq!(Kind::new(""), Err(QsetError::EmptyKind));
        assert!(serde_json::from_str::<Kind>("\"\"").is_err());
    }

    #[test]
    fn new_qset_examples() {
        assert_eq!(sulfuric_acid().qcard(), 7);
        assert_eq!(new_qset(&[]).unwrap().qcard(), 0);
        assert_eq!(new_qset(&[(k("electron"), 6)]).unwrap().qcard(), 6);
        assert!(matches!(
            new_qset(&[(k("H"), -1)]),
            Err(QsetError::NegativeMultiplicity { multiplicity: -1, .. })
        ));
        let merged = new_qset(&[(k("H"), 1), (k("H"), 2), (k("He"), 0)]).unwrap();
        assert_eq!(merged.multiplicity(&k("H")), 3);
        assert_eq!(merged.kinds().count(), 1);
    }

    #[test]
    fn sub_of_kind_examples() {
        let z = sulfuric_acid();
        assert_eq!(sub_of_kind(&z, &k("O")).qcard(), 4);
        assert_eq!(sub_of_kind(&z, &k("He")).qcard(), 0);
        let e = new_qset(&[(k("electron"), 6)]).unwrap();
        assert_eq!(e.sub_of_kind(&k("electron")).qcard(), 6);
    }

    #[test]
    fn strong_singleton_examples() {
        let e = new_qset(&[(k("electron"), 9)]).unwrap();
        let s = strong_singleton(&e, &k("electron")).unwrap();
        assert_eq!(s.qcard(), 1);
        assert!(s.is_well_formed_in(&e));

        let z = sulfuric_acid();
        let s = strong_singleton(&z, &k("H")).unwrap();
        assert_eq!(s.kind(), &k("H"));
        assert_eq!(z.multiplicity(&k("H")), 2);

        let empty = new_qset(&[(k("electron"), 0)]).unwrap();
        assert_eq!(
            strong_singleton(&empty, &k("electron")).unwrap_err(),
            QsetError::KindAbsent(k("electron"))
        );
        assert!(matches!(
            strong_singletons(&z, &k("H"), 3),
            Err(QsetError::InsufficientMultiplicity { available: 2, requested: 3, .. })
        ));
    }

    #[test]
    fn singleton_serialization_hides_elements() {
        let z = new_qset(&[(k("electron"), 2)]).unwrap();
        let s = strong_singletons(&z, &k("electron"), 2).unwrap();
        assert_eq!(serde_json::to_string(&s[1]).unwrap(), r#"{"kind":"electron","token":1}"#);
    }

    #[test]
    fn qset_indistinguishability_examples() {
        assert!(qset_indistinguishable(&sulfuric_acid(), &sulfuric_acid()));
        let water = new_qset(&[(k("O"), 1), (k("H"), 2)]).unwrap();
        assert!(!qset_indistinguishable(&sulfuric_acid(), &water));
        let z = sulfuric_acid();
        assert!(qset_indistinguishable(&z, &z));
    }

    #[test]
    fn qfunction_examples() {
        let classical = QFunction {
            pairs: vec![(k("1"), k("spin-up")), (k("-1"), k("spin-down"))],
        };
        assert!(check_qfunction(&classical));
        let broken = QFunction {
            pairs: vec![(k("electron"), k("up")), (k("electron"), k("down"))],
        };
        assert!(!check_qfunction(&broken));
        assert!(check_qfunction(&QFunction::default()));
    }

    #[test]
    fn membership_is_not_congruent_with_indistinguishability() {
        let z = new_qset(&[(k("electron"), 2)]).unwrap();
        let objs = z.objects();
        assert!(indistinguishable(&objs[0], &objs[1]));
        let w = Qset::from_objects([&objs[0]]);
        assert!(w.contains(&objs[0]));
        assert!(!w.contains(&objs[1]));
        assert!(z.contains(&objs[0]) && z.contains(&objs[1]));
        // Independently built qsets share no elements.
        let other = new_qset(&[(k("electron"), 2)]).unwrap();
        assert!(!other.contains(&objs[0]));
    }

    #[test]
    fn qset_serializes_as_table() {
        let json = serde_json::to_string(&sulfuric_acid()).unwrap();
        assert_eq!(json, r#"{"H":2,"O":4,"S":1}"#);
        let back: Qset = serde_json::from_str(&json).unwrap();
        assert!(qset_indistinguishable(&back, &sulfuric_acid()));
    }

    #[test]
    fn automorphism_examples() {
        let auts = automorphisms(&path(), DEFAULT_AUTOMORPHISM_BUDGET).unwrap();
        assert_eq!(auts, vec![Permutation(vec![0, 1, 2]), Permutation(vec![2, 1, 0])]);

        let mut spec: StructureSpec = path().into();
        spec.relations.push(RelationSpec { name: "P".into(), tuples: vec![vec!["a".into()]] });
        let marked = FiniteStructure::new(spec).unwrap();
        assert_eq!(automorphisms(&marked, 10).unwrap(), vec![Permutation::identity(3)]);

        assert_eq!(automorphisms(&edgeless(), 10).unwrap().len(), 6);
        assert!(matches!(automorphisms(&path(), 2), Err(QsetError::BudgetExceeded { size: 3, budget: 2 })));
    }

    #[test]
    fn directed_edges_break_symmetry() {
        let s = FiniteStructure::new(StructureSpec {
            domain: vec!["a".into(), "b".into(), "c".into()],
            relations: vec![RelationSpec {
                name: "R".into(),
                tuples: vec![vec!["a".into(), "b".into()], vec!["b".into(), "c".into()]],
            }],
        })
        .unwrap();
        assert_eq!(automorphisms(&s, 10).unwrap().len(), 1);
    }

    #[test]
    fn indiscernibility_examples() {
        let p = path();
        assert!(structure_indiscernible(&p, "a", "c", 10).unwrap());
        assert!(!structure_indiscernible(&p, "a", "b", 10).unwrap());
        let rigid = rigid_extension(&p, 10).unwrap();
        assert!(!structure_indiscernible(&rigid, "a", "c", 10).unwrap());
        assert_eq!(
            structure_indiscernible(&p, "a", "z", 10),
            Err(QsetError::ElementNotInDomain("z".into()))
        );
    }

    #[test]
    fn rigid_extension_examples() {
        let rigid = rigid_extension(&path(), 10).unwrap();
        assert_eq!(rigid.relation_names().collect::<Vec<_>>(), ["E", "is_a"]);
        assert_eq!(automorphisms(&rigid, 10).unwrap().len(), 1);

        let again = rigid_extension(&rigid, 10).unwrap();
        assert_eq!(again, rigid);

        let e = rigid_extension(&edgeless(), 10).unwrap();
        assert_eq!(e.relation_names().count(), 3);
        assert_eq!(automorphisms(&e, 10).unwrap().len(), 1);
    }

    #[test]
    fn structure_validation() {
        let bad = StructureSpec {
            domain: vec!["a".into()],
            relations: vec![RelationSpec { name: "R".into(), tuples: vec![vec!["b".into()]] }],
        };
        assert_eq!(FiniteStructure::new(bad), Err(QsetError::ElementNotInDomain("b".into())));
        let ragged = StructureSpec {
            domain: vec!["a".into()],
            relations: vec![RelationSpec {
                name: "R".into(),
                tuples: vec![vec!["a".into()], vec!["a".into(), "a".into()]],
            }],
        };
        assert_eq!(FiniteStructure::new(ragged), Err(QsetError::ArityMismatch("R".into())));
        assert!(serde_json::from_str::<FiniteStructure>(r#"{"domain":["a","a"],"relations":[]}"#).is_err());
    }

    fn arb_qset() -> impl Strategy<Value = Qset> {
        prop::collection::vec((0usize..3, 0i64..4), 0..5).prop_map(|spec| {
            let spec: Vec<(Kind, i64)> = spec.into_iter().map(|(i, m)| (k(["H", "O", "e"][i]), m)).collect();
            new_qset(&spec).unwrap()
        })
    }

    fn arb_structure() -> impl Strategy<Value = FiniteStructure> {
        (1usize..=5).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..6).prop_map(move |edges| {
                let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let e: Vec<(&str, &str)> = edges.iter().map(|&(a, b)| (refs[a], refs[b])).collect();
                FiniteStructure::undirected_graph(&refs, &e).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn indistinguishability_is_an_equivalence(a in arb_qset(), b in arb_qset(), c in arb_qset()) {
            prop_assert!(qset_indistinguishable(&a, &a));
            prop_assert_eq!(qset_indistinguishable(&a, &b), qset_indistinguishable(&b, &a));
            if qset_indistinguishable(&a, &b) && qset_indistinguishable(&b, &c) {
                prop_assert!(qset_indistinguishable(&a, &c));
            }
        }

        #[test]
        fn automorphisms_form_a_group(s in arb_structure()) {
            let auts = automorphisms(&s, 10).unwrap();
            let set: BTreeSet<_> = auts.iter().cloned().collect();
            prop_assert!(auts[0].is_identity());
            for g in &auts {
                prop_assert!(set.contains(&g.inverse()));
                for h in &auts {
                    prop_assert!(set.contains(&g.compose(h)));
                }
            }
            for e in s.domain() {
                prop_assert!(structure_indiscernible(&s, e, e, 10).unwrap());
            }
            let rigid = rigid_extension(&s, 10).unwrap();
            prop_assert_eq!(automorphisms(&rigid, 10).unwrap().len(), 1);
        }
    }
}
