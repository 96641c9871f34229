//! Integer rays and their exact rank-1 projectors.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ray has no nonzero component")]
    AllZero,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty projector list")]
    Empty,
}

/// A one-dimensional subspace, stored as its primitive integer generator
/// with the first nonzero component positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Ray {
    components: Vec<i64>,
}

impl<'de> Deserialize<'de> for Ray {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let components = Vec::<i64>::deserialize(deserializer)?;
        canonical_ray(&components).map_err(serde::de::Error::custom)
    }
}

/// Canonical representative of the projective class of `components`.
pub fn canonical_ray(components: &[i64]) -> Result<Ray, LinalgError> {
    let first = components
        .iter()
        .copied()
        .find(|&c| c != 0)
        .ok_or(LinalgError::AllZero)?;
    let g = components.iter().fold(0i64, |g, &c| g.gcd(&c));
    let g = if first < 0 { -g } else { g };
    Ok(Ray {
        components: components.iter().map(|&c| c / g).collect(),
    })
}

impl Ray {
    pub fn new(components: &[i64]) -> Result<Ray, LinalgError> {
        canonical_ray(components)
    }

    pub fn components(&self) -> &[i64] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn norm_squared(&self) -> i128 {
        self.components.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    fn check_dim(&self, other: &Ray) -> Result<(), LinalgError> {
        if self.dimension() != other.dimension() {
            return Err(LinalgError::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(())
    }

    pub fn is_orthogonal(&self, other: &Ray) -> Result<bool, LinalgError> {
        Ok(inner_product(self, other)?.is_zero())
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ray{self}")
    }
}

pub fn inner_product(u: &Ray, v: &Ray) -> Result<Rational, LinalgError> {
    u.check_dim(v)?;
    let dot: i128 = u
        .components
        .iter()
        .zip(&v.components)
        .map(|(&a, &b)| (a as i128) * (b as i128))
        .sum();
    Ok(Rational::from(num_bigint::BigInt::from(dot)))
}

/// A square matrix of rationals, used for projectors and their sums.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projector {
    dimension: usize,
    /// Row-major, `dimension * dimension` entries.
    entries: Vec<Rational>,
}

impl Projector {
    pub fn identity(dimension: usize) -> Projector {
        let mut p = Projector::zero(dimension);
        for i in 0..dimension {
            p.entries[i * dimension + i] = Rational::one();
        }
        p
    }

    pub fn zero(dimension: usize) -> Projector {
        Projector {
            dimension,
            entries: vec![Rational::zero(); dimension * dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.dimension + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.dimension.max(1))
    }

    fn check_dim(&self, other: &Projector) -> Result<(), LinalgError> {
        if self.dimension != other.dimension {
            return Err(LinalgError::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Projector) -> Result<Projector, LinalgError> {
        self.check_dim(other)?;
        let d = self.dimension;
        let mut out = Projector::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * d + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Projector) -> Result<Projector, LinalgError> {
        self.check_dim(other)?;
        Ok(Projector {
            dimension: self.dimension,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dimension;
        (0..d).all(|i| (i + 1..d).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self).map(|sq| sq == *self).unwrap_or(false)
    }

    pub fn trace(&self) -> Rational {
        (0..self.dimension).map(|i| self.get(i, i)).sum()
    }

    /// `vᵀ P v`, exact.
    pub fn quadratic_form(&self, v: &[i64]) -> Result<Rational, LinalgError> {
        if v.len() != self.dimension {
            return Err(LinalgError::DimensionMismatch {
                left: self.dimension,
                right: v.len(),
            });
        }
        let mut acc = Rational::zero();
        for (i, &vi) in v.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                let coeff = (vi as i128) * (vj as i128);
                if coeff != 0 {
                    acc += self.get(i, j) * &Rational::from(num_bigint::BigInt::from(coeff));
                }
            }
        }
        Ok(acc)
    }
}

impl fmt::Debug for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// `v vᵀ / (v·v)`.
pub fn projector_from_ray(v: &Ray) -> Projector {
    let d = v.dimension();
    let norm = Rational::from(num_bigint::BigInt::from(v.norm_squared()));
    let mut entries = Vec::with_capacity(d * d);
    for &a in v.components() {
        for &b in v.components() {
            let num = Rational::from(num_bigint::BigInt::from((a as i128) * (b as i128)));
            entries.push(&num / &norm);
        }
    }
    Projector {
        dimension: d,
        entries,
    }
}

/// Whether `PQ − QP` vanishes exactly.
pub fn commutes(p: &Projector, q: &Projector) -> Result<bool, LinalgError> {
    Ok(p.mul(q)? == q.mul(p)?)
}

pub fn sum_is_identity(ps: &[Projector]) -> Result<bool, LinalgError> {
    let first = ps.first().ok_or(LinalgError::Empty)?;
    let mut total = Projector::zero(first.dimension());
    for p in ps {
        total = total.add(p)?;
    }
    Ok(total == Projector::identity(first.dimension()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ray(c: &[i64]) -> Ray {
        canonical_ray(c).unwrap()
    }

    fn proj(c: &[i64]) -> Projector {
        projector_from_ray(&ray(c))
    }

    fn diag(values: &[i64]) -> Projector {
        let mut p = Projector::zero(values.len());
        for (i, &v) in values.iter().enumerate() {
            p.entries[i * values.len() + i] = Rational::integer(v);
        }
        p
    }

    #[test]
    fn canonical_ray_examples() {
        assert_eq!(ray(&[0, 0, 0, 2]).components(), &[0, 0, 0, 1]);
        assert_eq!(ray(&[-1, 1, 0, 0]).components(), &[1, -1, 0, 0]);
        assert_eq!(ray(&[1, -1, 0, 0]).components(), &[1, -1, 0, 0]);
        assert_eq!(ray(&[0, -6, 4, 2]).components(), &[0, 3, -2, -1]);
        assert_eq!(canonical_ray(&[0, 0, 0, 0]), Err(LinalgError::AllZero));
        assert_eq!(canonical_ray(&[]), Err(LinalgError::AllZero));
    }

    #[test]
    fn deserialized_rays_are_canonical() {
        let r: Ray = serde_json::from_str("[0,0,-3,3]").unwrap();
        assert_eq!(r.components(), &[0, 0, 1, -1]);
        assert!(serde_json::from_str::<Ray>("[0,0]").is_err());
    }

    #[test]
    fn inner_product_examples() {
        let ip = |a: &[i64], b: &[i64]| inner_product(&ray(a), &ray(b)).unwrap();
        assert_eq!(ip(&[1, 1, 0, 0], &[1, -1, 0, 0]), Rational::zero());
        assert_eq!(ip(&[1, 1, 1, 1], &[1, 1, 1, 1]), Rational::integer(4));
        assert_eq!(ip(&[1, 0, 1, 0], &[0, 1, 0, -1]), Rational::zero());
        assert_eq!(
            inner_product(&ray(&[1, 0]), &ray(&[1, 0, 0])),
            Err(LinalgError::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn projector_examples() {
        assert_eq!(proj(&[0, 0, 0, 1]), diag(&[0, 0, 0, 1]));
        assert_eq!(proj(&[0, 0, 1, 0]), diag(&[0, 0, 1, 0]));
        let p = proj(&[1, 1, 0, 0]);
        let half = Rational::new(1, 2);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i < 2 && j < 2 { half.clone() } else { Rational::zero() };
                assert_eq!(p.get(i, j), &expected, "entry ({i},{j})");
            }
        }
        assert_eq!(p.trace(), Rational::one());
    }

    #[test]
    fn projector_action_on_vector() {
        // P_{0,0,0,1} keeps only the last coordinate.
        let p = proj(&[0, 0, 0, 1]);
        assert_eq!(p.quadratic_form(&[3, 5, 7, 2]).unwrap(), Rational::integer(4));
    }

    #[test]
    fn commutation_examples() {
        assert!(commutes(&proj(&[0, 0, 1, 0]), &proj(&[0, 0, 0, 1])).unwrap());
        let p = proj(&[1, 0, -1, 0]);
        assert!(commutes(&p, &p).unwrap());
        assert!(!commutes(&proj(&[0, 0, 0, 1]), &proj(&[1, 1, 1, 1])).unwrap());
        assert!(commutes(&proj(&[1, 0]), &proj(&[1, 0, 0])).is_err());
    }

    #[test]
    fn resolution_of_identity_examples() {
        let first: Vec<_> = [[0, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [1, -1, 0, 0]]
            .iter()
            .map(|c| proj(c))
            .collect();
        assert!(sum_is_identity(&first).unwrap());
        assert!(!sum_is_identity(&first[..2]).unwrap());
        let last: Vec<_> = [[1, 1, 1, -1], [-1, 1, 1, 1], [1, 0, 0, 1], [0, 1, -1, 0]]
            .iter()
            .map(|c| proj(c))
            .collect();
        assert!(sum_is_identity(&last).unwrap());
        assert_eq!(sum_is_identity(&[]), Err(LinalgError::Empty));
    }

    fn arb_components() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-5i64..=5, 1..=5).prop_filter("nonzero", |v| v.iter().any(|&c| c != 0))
    }

    proptest! {
        #[test]
        fn projectors_are_symmetric_idempotent(c in arb_components()) {
            let p = proj(&c);
            prop_assert!(p.is_symmetric());
            prop_assert!(p.is_idempotent());
            prop_assert_eq!(p.trace(), Rational::one());
        }

        #[test]
        fn canonical_ray_is_scale_invariant(c in arb_components(), k in (-7i64..=7).prop_filter("nonzero", |k| *k != 0)) {
            let r = ray(&c);
            let scaled: Vec<i64> = c.iter().map(|x| x * k).collect();
            prop_assert_eq!(ray(&scaled), r.clone());
            prop_assert_eq!(ray(r.components()), r);
        }

        #[test]
        fn orthogonal_rays_give_annihilating_projectors(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4) {
            prop_assume!(a != 0 || b != 0);
            let u = ray(&[a, b, c]);
            let v = ray(&[-b, a, 0]);
            prop_assert!(u.is_orthogonal(&v).unwrap());
            let (pu, pv) = (projector_from_ray(&u), projector_from_ray(&v));
            prop_assert!(pu.mul(&pv).unwrap().is_zero());
            prop_assert!(commutes(&pu, &pv).unwrap());
        }
    }
}
