//! Kochen-Specker instances: rays grouped into contexts, the search for
//! noncontextual 0/1 valuations, and the parity obstruction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{canonical_ray, projector_from_ray, sum_is_identity, LinalgError, Projector, Ray};

/// Index into an instance's ray table.
pub type RayId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KsError {
    #[error("ray {id} has dimension {found}, instance dimension is {expected}")]
    RayDimension { id: RayId, expected: usize, found: usize },
    #[error("context {context} references ray {id}, but only {rays} rays exist")]
    UnknownRay { context: usize, id: RayId, rays: usize },
    #[error("context {0} is empty")]
    EmptyContext(usize),
    #[error("context {context} lists ray {id} more than once")]
    RepeatedRay { context: usize, id: RayId },
    #[error("instance dimension must be positive")]
    ZeroDimension,
    #[error("valuation covers {got} rays, instance has {expected}")]
    IncompleteValuation { expected: usize, got: usize },
    #[error("search node budget of {0} exhausted")]
    SearchBudgetExceeded(u64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Context {
    ray_ids: Vec<RayId>,
}

impl Context {
    pub fn new(ray_ids: Vec<RayId>) -> Context {
        Context { ray_ids }
    }

    pub fn ray_ids(&self) -> &[RayId] {
        &self.ray_ids
    }

    pub fn len(&self) -> usize {
        self.ray_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ray_ids.is_empty()
    }

    pub fn contains(&self, id: RayId) -> bool {
        self.ray_ids.contains(&id)
    }
}

/// A table of rays and the contexts built from them.
///
/// Construction checks only structure (dimensions, indices). Geometric
/// properties are reported by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KsInstance {
    dimension: usize,
    rays: Vec<Ray>,
    contexts: Vec<Context>,
}

impl KsInstance {
    pub fn new(dimension: usize, rays: Vec<Ray>, contexts: Vec<Context>) -> Result<KsInstance, KsError> {
        if dimension == 0 {
            return Err(KsError::ZeroDimension);
        }
        for (id, r) in rays.iter().enumerate() {
            if r.dimension() != dimension {
                return Err(KsError::RayDimension {
                    id,
                    expected: dimension,
                    found: r.dimension(),
                });
            }
        }
        for (c, ctx) in contexts.iter().enumerate() {
            if ctx.is_empty() {
                return Err(KsError::EmptyContext(c));
            }
            for (k, &id) in ctx.ray_ids.iter().enumerate() {
                if id >= rays.len() {
                    return Err(KsError::UnknownRay {
                        context: c,
                        id,
                        rays: rays.len(),
                    });
                }
                if ctx.ray_ids[..k].contains(&id) {
                    return Err(KsError::RepeatedRay { context: c, id });
                }
            }
        }
        Ok(KsInstance {
            dimension,
            rays,
            contexts,
        })
    }

    /// Builds an instance from contexts written out as vectors. Rays are
    /// canonicalized and numbered in order of first appearance, so equal
    /// rays in different contexts share one id.
    pub fn from_context_vectors<C, V>(dimension: usize, contexts: C) -> Result<KsInstance, KsError>
    where
        C: IntoIterator<Item = V>,
        V: IntoIterator<Item = Vec<i64>>,
    {
        let mut rays: Vec<Ray> = Vec::new();
        let mut index: BTreeMap<Ray, RayId> = BTreeMap::new();
        let mut out = Vec::new();
        for ctx in contexts {
            let mut ids = Vec::new();
            for comps in ctx {
                let ray = canonical_ray(&comps)?;
                let id = *index.entry(ray.clone()).or_insert_with(|| {
                    rays.push(ray);
                    rays.len() - 1
                });
                ids.push(id);
            }
            out.push(Context::new(ids));
        }
        KsInstance::new(dimension, rays, out)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, id: RayId) -> &Ray {
        &self.rays[id]
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn ray_id(&self, ray: &Ray) -> Option<RayId> {
        self.rays.iter().position(|r| r == ray)
    }

    /// Number of contexts each ray appears in.
    pub fn incidence(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rays.len()];
        for ctx in &self.contexts {
            for &id in ctx.ray_ids() {
                counts[id] += 1;
            }
        }
        counts
    }

    /// Same rays, with the given context removed.
    pub fn without_context(&self, index: usize) -> KsInstance {
        let mut contexts = self.contexts.clone();
        contexts.remove(index);
        KsInstance {
            dimension: self.dimension,
            rays: self.rays.clone(),
            contexts,
        }
    }

    pub fn projectors(&self, ctx: &Context) -> Vec<Projector> {
        ctx.ray_ids().iter().map(|&id| projector_from_ray(&self.rays[id])).collect()
    }
}

/// The 18-ray, 9-context set of Cabello, Estebaranz and García-Alcaine in
/// dimension four.
///
/// Rays are numbered in order of first appearance, so the first context is
/// `{(0,0,0,1), (0,0,1,0), (1,1,0,0), (1,-1,0,0)}` with ids 0..4. Listing
/// `(0,0,1,0)` twice in that line instead would not resolve the identity.
pub fn builtin_cabello() -> KsInstance {
    const LINES: [[[i64; 4]; 4]; 9] = [
        [[0, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [1, -1, 0, 0]],
        [[0, 0, 0, 1], [0, 1, 0, 0], [1, 0, 1, 0], [1, 0, -1, 0]],
        [[1, -1, 1, -1], [1, -1, -1, 1], [1, 1, 0, 0], [0, 0, 1, 1]],
        [[1, -1, 1, -1], [1, 1, 1, 1], [1, 0, -1, 0], [0, 1, 0, -1]],
        [[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 1], [1, 0, 0, -1]],
        [[1, -1, -1, 1], [1, 1, 1, 1], [1, 0, 0, -1], [0, 1, -1, 0]],
        [[1, 1, -1, 1], [1, 1, 1, -1], [1, -1, 0, 0], [0, 0, 1, 1]],
        [[1, 1, -1, 1], [-1, 1, 1, 1], [1, 0, 1, 0], [0, 1, 0, -1]],
        [[1, 1, 1, -1], [-1, 1, 1, 1], [1, 0, 0, 1], [0, 1, -1, 0]],
    ];
    KsInstance::from_context_vectors(4, LINES.iter().map(|line| line.iter().map(|r| r.to_vec())))
        .expect("builtin instance is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub left: RayId,
    pub right: RayId,
    pub orthogonal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextReport {
    pub index: usize,
    pub ray_ids: Vec<RayId>,
    pub size_matches_dimension: bool,
    pub pairs: Vec<PairVerdict>,
    pub pairwise_orthogonal: bool,
    pub commuting: bool,
    pub resolves_identity: bool,
}

impl ContextReport {
    pub fn passed(&self) -> bool {
        self.size_matches_dimension && self.pairwise_orthogonal && self.commuting && self.resolves_identity
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dimension: usize,
    pub ray_count: usize,
    pub context_count: usize,
    pub contexts: Vec<ContextReport>,
    /// Pairs of ray ids with equal canonical form.
    pub duplicate_rays: Vec<(RayId, RayId)>,
    /// Rays that appear in no context.
    pub unused_rays: Vec<RayId>,
    pub incidence: Vec<usize>,
    pub passed: bool,
}

pub fn validate_instance(inst: &KsInstance) -> ValidationReport {
    let contexts: Vec<ContextReport> = inst
        .contexts
        .iter()
        .enumerate()
        .map(|(index, ctx)| {
            let ids = ctx.ray_ids();
            let mut pairs = Vec::new();
            for (a, &i) in ids.iter().enumerate() {
                for &j in &ids[a + 1..] {
                    let orthogonal = inst.rays[i].is_orthogonal(&inst.rays[j]).unwrap_or(false);
                    pairs.push(PairVerdict {
                        left: i,
                        right: j,
                        orthogonal,
                    });
                }
            }
            let projectors = inst.projectors(ctx);
            let commuting = projectors.iter().enumerate().all(|(a, p)| {
                projectors[a + 1..]
                    .iter()
                    .all(|q| crate::linalg::commutes(p, q).unwrap_or(false))
            });
            ContextReport {
                index: index + 1,
                ray_ids: ids.to_vec(),
                size_matches_dimension: ids.len() == inst.dimension,
                pairwise_orthogonal: pairs.iter().all(|p| p.orthogonal),
                pairs,
                commuting,
                resolves_identity: sum_is_identity(&projectors).unwrap_or(false),
            }
        })
        .collect();

    let mut duplicate_rays = Vec::new();
    for (i, r) in inst.rays.iter().enumerate() {
        for (j, s) in inst.rays.iter().enumerate().skip(i + 1) {
            if r == s {
                duplicate_rays.push((i, j));
            }
        }
    }
    let incidence = inst.incidence();
    let unused_rays: Vec<RayId> = incidence
        .iter()
        .enumerate()
        .filter(|(_, &n)| n == 0)
        .map(|(i, _)| i)
        .collect();
    let passed = contexts.iter().all(ContextReport::passed) && duplicate_rays.is_empty() && unused_rays.is_empty();
    ValidationReport {
        dimension: inst.dimension,
        ray_count: inst.rays.len(),
        context_count: inst.contexts.len(),
        contexts,
        duplicate_rays,
        unused_rays,
        incidence,
        passed,
    }
}

/// A total 0/1 assignment to the rays of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation {
    values: Vec<u8>,
}

impl Valuation {
    pub fn new(values: Vec<bool>) -> Valuation {
        Valuation {
            values: values.into_iter().map(u8::from).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: RayId) -> bool {
        self.values[id] != 0
    }

    pub fn true_rays(&self) -> impl Iterator<Item = RayId> + '_ {
        self.values.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i)
    }
}

/// True iff every context has exactly one ray valued 1.
pub fn check_valuation(inst: &KsInstance, v: &Valuation) -> Result<bool, KsError> {
    if v.len() != inst.rays.len() || v.values.iter().any(|&x| x > 1) {
        return Err(KsError::IncompleteValuation {
            expected: inst.rays.len(),
            got: v.len(),
        });
    }
    Ok(inst
        .contexts
        .iter()
        .all(|ctx| ctx.ray_ids().iter().filter(|&&id| v.get(id)).count() == 1))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Stop after this many valuations.
    pub limit: Option<usize>,
    /// Fail once this many search nodes have been expanded.
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub valuations: Vec<Valuation>,
    /// True when no further valuation exists beyond those returned.
    pub exhaustive: bool,
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a KsInstance,
    limit: Option<usize>,
    budget: Option<u64>,
    nodes: u64,
    found: Vec<Valuation>,
    more: bool,
}

impl Search<'_> {
    /// Fixpoint of the exactly-one constraints. Returns false on conflict.
    fn propagate(&self, assign: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for ctx in &self.inst.contexts {
                let ids = ctx.ray_ids();
                let ones = ids.iter().filter(|&&i| assign[i] == Some(true)).count();
                let open: Vec<RayId> = ids.iter().copied().filter(|&i| assign[i].is_none()).collect();
                match ones {
                    0 if open.is_empty() => return false,
                    0 if open.len() == 1 => {
                        assign[open[0]] = Some(true);
                        changed = true;
                    }
                    0 => {}
                    1 => {
                        for i in open {
                            assign[i] = Some(false);
                            changed = true;
                        }
                    }
                    _ => return false,
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn done(&self) -> bool {
        self.more
    }

    fn descend(&mut self, mut assign: Vec<Option<bool>>) -> Result<(), KsError> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return Err(KsError::SearchBudgetExceeded(b));
            }
        }
        if !self.propagate(&mut assign) {
            return Ok(());
        }
        match assign.iter().position(Option::is_none) {
            None => {
                if self.limit.is_some_and(|l| self.found.len() >= l) {
                    self.more = true;
                } else {
                    self.found
                        .push(Valuation::new(assign.into_iter().map(|v| v == Some(true)).collect()));
                }
            }
            Some(branch) => {
                for value in [true, false] {
                    let mut next = assign.clone();
                    next[branch] = Some(value);
                    self.descend(next)?;
                    if self.done() {
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Enumerates noncontextual valuations by depth-first search with unit
/// propagation, branching on the lowest unassigned ray id and trying 1
/// before 0. Output order is deterministic.
pub fn search_valuations(inst: &KsInstance, opts: SearchOptions) -> Result<SearchOutcome, KsError> {
    let mut s = Search {
        inst,
        limit: opts.limit,
        budget: opts.node_budget,
        nodes: 0,
        found: Vec::new(),
        more: false,
    };
    s.descend(vec![None; inst.rays.len()])?;
    Ok(SearchOutcome {
        exhaustive: !s.more,
        valuations: s.found,
        nodes: s.nodes,
    })
}

/// Every ray occurs an even number of times while the number of contexts
/// is odd. Summing all exactly-one constraints then equates an even number
/// with an odd one, so no valuation exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCertificate {
    ray_incidence: Vec<usize>,
    context_count: usize,
}

impl ParityCertificate {
    pub fn ray_incidence(&self) -> &[usize] {
        &self.ray_incidence
    }

    pub fn context_count(&self) -> usize {
        self.context_count
    }

    /// Re-checks the certificate against an instance.
    pub fn verify(&self, inst: &KsInstance) -> bool {
        self.context_count == inst.contexts.len()
            && self.ray_incidence == inst.incidence()
            && self.context_count % 2 == 1
            && self.ray_incidence.iter().all(|n| n % 2 == 0)
    }
}

pub fn parity_certificate(inst: &KsInstance) -> Option<ParityCertificate> {
    let incidence = inst.incidence();
    let context_count = inst.contexts.len();
    (context_count % 2 == 1 && incidence.iter().all(|n| n % 2 == 0)).then_some(ParityCertificate {
        ray_incidence: incidence,
        context_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn first_line() -> KsInstance {
        KsInstance::from_context_vectors(
            4,
            [vec![vec![0, 0, 0, 1], vec![0, 0, 1, 0], vec![1, 1, 0, 0], vec![1, -1, 0, 0]]],
        )
        .unwrap()
    }

    fn two_disjoint() -> KsInstance {
        KsInstance::from_context_vectors(
            4,
            [
                vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
                vec![vec![1, 1, 0, 0], vec![1, -1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 1, -1]],
            ],
        )
        .unwrap()
    }

    /// Enumerates all 2^n assignments.
    fn brute_force(inst: &KsInstance) -> Vec<Valuation> {
        let n = inst.rays().len();
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let v = Valuation::new((0..n).map(|i| mask >> i & 1 == 1).collect());
            if check_valuation(inst, &v).unwrap() {
                out.push(v);
            }
        }
        out.sort_by(|a, b| b.values.cmp(&a.values));
        out
    }

    #[test]
    fn cabello_shape() {
        let inst = builtin_cabello();
        assert_eq!(inst.rays().len(), 18);
        assert_eq!(inst.contexts().len(), 9);
        let first: Vec<&[i64]> = inst.contexts()[0].ray_ids().iter().map(|&i| inst.ray(i).components()).collect();
        assert_eq!(first, vec![&[0, 0, 0, 1][..], &[0, 0, 1, 0], &[1, 1, 0, 0], &[1, -1, 0, 0]]);
        assert!(inst.incidence().iter().all(|&n| n == 2));
    }

    #[test]
    fn cabello_validates() {
        let report = validate_instance(&builtin_cabello());
        assert!(report.passed);
        assert_eq!(report.contexts.len(), 9);
        assert!(report.contexts.iter().all(|c| c.resolves_identity && c.pairs.len() == 6));
        assert!(report.duplicate_rays.is_empty());
    }

    #[test]
    fn non_orthogonal_context_fails_validation() {
        let inst = KsInstance::from_context_vectors(
            4,
            [vec![vec![0, 0, 0, 1], vec![0, 0, 1, 0], vec![1, 1, 0, 0], vec![1, 1, 1, 1]]],
        )
        .unwrap();
        let report = validate_instance(&inst);
        assert!(!report.passed);
        let bad: Vec<_> = report.contexts[0].pairs.iter().filter(|p| !p.orthogonal).collect();
        assert!(bad.iter().any(|p| (p.left, p.right) == (2, 3)));
        assert!(!report.contexts[0].resolves_identity);
    }

    #[test]
    fn duplicates_and_unused_rays_are_reported() {
        let r = |c: &[i64]| canonical_ray(c).unwrap();
        let rays = vec![r(&[1, 0]), r(&[0, 1]), r(&[0, 2]), r(&[1, 1])];
        let inst = KsInstance::new(2, rays, vec![Context::new(vec![0, 1])]).unwrap();
        let report = validate_instance(&inst);
        assert_eq!(report.duplicate_rays, vec![(1, 2)]);
        assert_eq!(report.unused_rays, vec![2, 3]);
        assert!(!report.passed);
        assert!(report.contexts[0].passed());
    }

    #[test]
    fn single_line_validates() {
        assert!(validate_instance(&first_line()).passed);
    }

    #[test]
    fn structural_errors() {
        let r = |c: &[i64]| canonical_ray(c).unwrap();
        assert!(matches!(
            KsInstance::new(2, vec![r(&[1, 0, 0])], vec![]),
            Err(KsError::RayDimension { .. })
        ));
        assert!(matches!(
            KsInstance::new(2, vec![r(&[1, 0])], vec![Context::new(vec![1])]),
            Err(KsError::UnknownRay { .. })
        ));
        assert!(matches!(
            KsInstance::new(2, vec![r(&[1, 0])], vec![Context::new(vec![0, 0])]),
            Err(KsError::RepeatedRay { .. })
        ));
        assert!(matches!(
            KsInstance::new(2, vec![r(&[1, 0])], vec![Context::new(vec![])]),
            Err(KsError::EmptyContext(0))
        ));
    }

    #[test]
    fn check_valuation_examples() {
        let inst = first_line();
        assert!(check_valuation(&inst, &Valuation::new(vec![true, false, false, false])).unwrap());
        assert!(!check_valuation(&inst, &Valuation::new(vec![false; 4])).unwrap());
        assert_eq!(
            check_valuation(&inst, &Valuation::new(vec![true])),
            Err(KsError::IncompleteValuation { expected: 4, got: 1 })
        );
    }

    #[test]
    fn no_cabello_valuation_by_brute_force() {
        assert!(brute_force(&builtin_cabello()).is_empty());
    }

    #[test]
    fn search_examples() {
        let out = search_valuations(&builtin_cabello(), SearchOptions::default()).unwrap();
        assert!(out.valuations.is_empty());
        assert!(out.exhaustive);

        let out = search_valuations(&first_line(), SearchOptions::default()).unwrap();
        assert_eq!(out.valuations.len(), 4);
        assert_eq!(out.valuations, brute_force(&first_line()));

        let out = search_valuations(&two_disjoint(), SearchOptions::default()).unwrap();
        assert_eq!(out.valuations.len(), 16);
        assert_eq!(out.valuations, brute_force(&two_disjoint()));
    }

    #[test]
    fn search_limit_and_budget() {
        let inst = two_disjoint();
        let out = search_valuations(&inst, SearchOptions { limit: Some(1), node_budget: None }).unwrap();
        assert_eq!(out.valuations.len(), 1);
        assert!(!out.exhaustive);

        let out = search_valuations(&first_line(), SearchOptions { limit: Some(4), node_budget: None }).unwrap();
        assert_eq!(out.valuations.len(), 4);
        assert!(out.exhaustive);

        assert_eq!(
            search_valuations(&builtin_cabello(), SearchOptions { limit: None, node_budget: Some(3) }),
            Err(KsError::SearchBudgetExceeded(3))
        );
    }

    #[test]
    fn search_is_deterministic() {
        let a = search_valuations(&two_disjoint(), SearchOptions::default()).unwrap();
        let b = search_valuations(&two_disjoint(), SearchOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parity_examples() {
        let inst = builtin_cabello();
        let cert = parity_certificate(&inst).unwrap();
        assert_eq!(cert.context_count(), 9);
        assert!(cert.ray_incidence().iter().all(|&n| n == 2));
        assert!(cert.verify(&inst));

        assert_eq!(parity_certificate(&first_line()), None);

        let trimmed = inst.without_context(8);
        assert_eq!(parity_certificate(&trimmed), None);
        assert_eq!(trimmed.incidence().iter().filter(|&&n| n % 2 == 1).count(), 4);
        assert!(!cert.verify(&trimmed));
    }

    /// Combinatorial instances with an odd context count where every ray
    /// appears in exactly two or four contexts.
    fn arb_even_odd_instance() -> impl Strategy<Value = KsInstance> {
        (prop_oneof![Just(3usize), Just(5)], 2usize..=9)
            .prop_flat_map(|(k, n)| {
                let sizes = if k >= 4 { vec![2usize, 4] } else { vec![2] };
                let one_ray = prop::sample::select(sizes)
                    .prop_flat_map(move |s| prop::sample::subsequence((0..k).collect::<Vec<_>>(), s));
                let per_ray = prop::collection::vec(one_ray, n);
                (Just(k), per_ray)
            })
            .prop_filter_map("every context nonempty", |(k, per_ray)| {
                let mut contexts = vec![Vec::new(); k];
                for (ray, ctxs) in per_ray.iter().enumerate() {
                    for &c in ctxs {
                        contexts[c].push(ray);
                    }
                }
                if contexts.iter().any(Vec::is_empty) {
                    return None;
                }
                let rays = (0..per_ray.len())
                    .map(|i| canonical_ray(&[1, i as i64]).unwrap())
                    .collect();
                KsInstance::new(2, rays, contexts.into_iter().map(Context::new).collect()).ok()
            })
    }

    proptest! {
        #[test]
        fn parity_certificate_implies_no_valuation(inst in arb_even_odd_instance()) {
            let cert = parity_certificate(&inst);
            prop_assert!(cert.is_some());
            prop_assert!(brute_force(&inst).is_empty());
            let out = search_valuations(&inst, SearchOptions::default()).unwrap();
            prop_assert!(out.valuations.is_empty() && out.exhaustive);
        }

        #[test]
        fn search_agrees_with_brute_force(
            contexts in prop::collection::vec(prop::sample::subsequence((0..7usize).collect::<Vec<_>>(), 1..=4), 1..=5)
        ) {
            let rays = (0..7).map(|i| canonical_ray(&[1, i]).unwrap()).collect();
            let inst = KsInstance::new(2, rays, contexts.into_iter().map(Context::new).collect()).unwrap();
            let out = search_valuations(&inst, SearchOptions::default()).unwrap();
            for v in &out.valuations {
                prop_assert!(check_valuation(&inst, v).unwrap());
            }
            prop_assert_eq!(out.valuations, brute_force(&inst));
        }
    }
}
