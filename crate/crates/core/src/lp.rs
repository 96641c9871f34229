//! Exact feasibility for `A x = b, x ≥ 0` over the rationals.
//!
//! Phase-one revised simplex with one artificial variable per row and
//! Bland's lowest-index rule. When the artificial objective cannot reach
//! zero the phase-one dual is turned into a Farkas vector `y` with
//! `yᵀA ≥ 0` and `yᵀb < 0`. Both outcomes are re-checked before return.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("column entry refers to row {row}, system has {rows} rows")]
    RowOutOfRange { row: usize, rows: usize },
    #[error("dense row {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("internal check failed: {0}")]
    Verification(&'static str),
}

/// Equality constraints stored column-wise, since the marginal problems
/// this is used for have many more columns than rows and sparse columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    rhs: Vec<Rational>,
    columns: Vec<Vec<(usize, Rational)>>,
}

impl LinearSystem {
    pub fn new(rhs: Vec<Rational>) -> LinearSystem {
        LinearSystem {
            rhs,
            columns: Vec::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<Rational>], rhs: Vec<Rational>) -> Result<LinearSystem, LpError> {
        let width = rows.first().map_or(0, Vec::len);
        let mut sys = LinearSystem::new(rhs);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(LpError::RaggedRow {
                    row: i,
                    expected: width,
                    found: row.len(),
                });
            }
        }
        for j in 0..width {
            let col = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[j].is_zero())
                .map(|(i, r)| (i, r[j].clone()))
                .collect();
            sys.push_column(col)?;
        }
        Ok(sys)
    }

    /// Appends a column given as `(row, coefficient)` pairs; returns its index.
    pub fn push_column(&mut self, entries: Vec<(usize, Rational)>) -> Result<usize, LpError> {
        if let Some(&(row, _)) = entries.iter().find(|(r, _)| *r >= self.rhs.len()) {
            return Err(LpError::RowOutOfRange {
                row,
                rows: self.rhs.len(),
            });
        }
        self.columns.push(entries.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        Ok(self.columns.len() - 1)
    }

    pub fn row_count(&self) -> usize {
        self.rhs.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn column(&self, j: usize) -> &[(usize, Rational)] {
        &self.columns[j]
    }

    /// `A x = b` and `x ≥ 0`, exactly.
    pub fn is_solution(&self, x: &[Rational]) -> bool {
        if x.len() != self.columns.len() || x.iter().any(Rational::is_negative) {
            return false;
        }
        let mut lhs = vec![Rational::zero(); self.rhs.len()];
        for (col, xj) in self.columns.iter().zip(x) {
            if xj.is_zero() {
                continue;
            }
            for (i, a) in col {
                lhs[*i] += a * xj;
            }
        }
        lhs == self.rhs
    }

    fn dot_column(&self, y: &[Rational], j: usize) -> Rational {
        self.columns[j].iter().map(|(i, a)| &y[*i] * a).sum()
    }
}

/// A vector `y` proving `A x = b, x ≥ 0` has no solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    pub y: Vec<Rational>,
}

impl FarkasCertificate {
    /// `yᵀA ≥ 0` componentwise and `yᵀb < 0`.
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        if self.y.len() != sys.row_count() {
            return false;
        }
        let yb: Rational = self.y.iter().zip(sys.rhs()).map(|(a, b)| a * b).sum();
        yb.is_negative() && (0..sys.column_count()).all(|j| !sys.dot_column(&self.y, j).is_negative())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpSolution {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl LpSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpSolution::Feasible(_))
    }
}

struct PhaseOne<'a> {
    sys: &'a LinearSystem,
    sign: Vec<bool>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
}

impl PhaseOne<'_> {
    fn m(&self) -> usize {
        self.sys.row_count()
    }

    fn n(&self) -> usize {
        self.sys.column_count()
    }

    fn cost(&self, j: usize) -> Rational {
        if j >= self.n() {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    /// Column `j` of the sign-adjusted system, artificial columns included.
    fn column(&self, j: usize) -> Vec<(usize, Rational)> {
        if j >= self.n() {
            vec![(j - self.n(), Rational::one())]
        } else {
            self.sys.columns[j]
                .iter()
                .map(|(i, a)| (*i, if self.sign[*i] { -a } else { a.clone() }))
                .collect()
        }
    }

    fn duals(&self) -> Vec<Rational> {
        let m = self.m();
        let mut u = vec![Rational::zero(); m];
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.n() {
                for (k, uk) in u.iter_mut().enumerate() {
                    *uk += &self.binv[i][k];
                }
            }
        }
        u
    }

    fn entering(&self, u: &[Rational]) -> Option<usize> {
        (0..self.n() + self.m()).find(|&j| {
            if self.in_basis[j] {
                return false;
            }
            let reduced = self.cost(j) - self.column(j).iter().map(|(i, a)| &u[*i] * a).sum::<Rational>();
            reduced.is_negative()
        })
    }

    fn pivot(&mut self, entering: usize) -> Result<(), LpError> {
        let m = self.m();
        let col = self.column(entering);
        let d: Vec<Rational> = (0..m)
            .map(|i| col.iter().map(|(k, a)| &self.binv[i][*k] * a).sum())
            .collect();
        let mut leave: Option<(usize, Rational)> = None;
        for (i, di) in d.iter().enumerate() {
            if !di.is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / di;
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.ok_or(LpError::Verification("phase-one objective unbounded"))?;
        let pivot = d[r].clone();
        for v in self.binv[r].iter_mut() {
            *v = &*v / &pivot;
        }
        self.xb[r] = &self.xb[r] / &pivot;
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r].clone();
        for (i, di) in d.iter().enumerate() {
            if i == r || di.is_zero() {
                continue;
            }
            for (v, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &(di * p);
                }
            }
            self.xb[i] -= &(di * &pivot_x);
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[entering] = true;
        self.basis[r] = entering;
        Ok(())
    }
}

/// Decides whether `A x = b, x ≥ 0` has a solution.
pub fn lp_feasible(sys: &LinearSystem) -> Result<LpSolution, LpError> {
    let m = sys.row_count();
    let n = sys.column_count();
    let sign: Vec<bool> = sys.rhs.iter().map(Rational::is_negative).collect();
    let mut in_basis = vec![false; n + m];
    for flag in &mut in_basis[n..] {
        *flag = true;
    }
    let mut state = PhaseOne {
        sys,
        xb: sys.rhs.iter().map(Rational::abs).collect(),
        sign,
        basis: (n..n + m).collect(),
        in_basis,
        binv: (0..m)
            .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect(),
    };

    let u = loop {
        let u = state.duals();
        match state.entering(&u) {
            Some(j) => state.pivot(j)?,
            None => break u,
        }
    };

    let objective: Rational = state
        .basis
        .iter()
        .zip(&state.xb)
        .filter(|(&b, _)| b >= n)
        .map(|(_, x)| x)
        .sum();

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (&b, v) in state.basis.iter().zip(&state.xb) {
            if b < n {
                x[b] = v.clone();
            }
        }
        if !sys.is_solution(&x) {
            return Err(LpError::Verification("witness does not satisfy A x = b"));
        }
        Ok(LpSolution::Feasible(x))
    } else {
        let y = u
            .iter()
            .zip(&state.sign)
            .map(|(ui, &flipped)| if flipped { ui.clone() } else { -ui })
            .collect();
        let cert = FarkasCertificate { y };
        if !cert.verify(sys) {
            return Err(LpError::Verification("Farkas certificate does not verify"));
        }
        Ok(LpSolution::Infeasible(cert))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    fn dense(rows: &[&[i64]], rhs: &[i64]) -> LinearSystem {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
        LinearSystem::from_dense(&rows, rhs.iter().map(|&v| q(v)).collect()).unwrap()
    }

    #[test]
    fn simple_feasible() {
        let sys = dense(&[&[1, 1]], &[1]);
        assert_eq!(lp_feasible(&sys).unwrap(), LpSolution::Feasible(vec![q(1), q(0)]));
    }

    #[test]
    fn simple_infeasible() {
        let sys = dense(&[&[1]], &[-1]);
        match lp_feasible(&sys).unwrap() {
            LpSolution::Infeasible(cert) => {
                // yᵀA = 1 ≥ 0 and yᵀb = -1 < 0.
                assert_eq!(cert.y, vec![q(1)]);
                assert!(cert.verify(&sys));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_fine() {
        let sys = dense(&[&[1, 1, 0], &[1, 1, 0], &[0, 1, 1]], &[2, 2, 1]);
        assert!(lp_feasible(&sys).unwrap().is_feasible());
    }

    #[test]
    fn empty_system() {
        let sys = LinearSystem::new(vec![]);
        assert_eq!(lp_feasible(&sys).unwrap(), LpSolution::Feasible(vec![]));
        let sys = LinearSystem::new(vec![q(1)]);
        assert!(!lp_feasible(&sys).unwrap().is_feasible());
    }

    #[test]
    fn bad_columns_rejected() {
        let mut sys = LinearSystem::new(vec![q(1)]);
        assert_eq!(
            sys.push_column(vec![(3, q(1))]),
            Err(LpError::RowOutOfRange { row: 3, rows: 1 })
        );
        let rows = vec![vec![q(1)], vec![q(1), q(2)]];
        assert!(LinearSystem::from_dense(&rows, vec![q(0), q(0)]).is_err());
    }

    /// Enumerates every basis of a small system: a feasible system has a
    /// basic feasible solution, so checking all square subsystems decides
    /// feasibility independently of the simplex path.
    fn feasible_by_bases(rows: &[Vec<i64>], rhs: &[i64]) -> bool {
        let m = rows.len();
        let n = rows[0].len();
        for mask in 0u32..(1 << n) {
            let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            if cols.len() > m {
                continue;
            }
            // Gaussian elimination on [A_cols | b] over the rationals.
            let mut aug: Vec<Vec<Rational>> = rows
                .iter()
                .zip(rhs)
                .map(|(r, &b)| cols.iter().map(|&j| q(r[j])).chain([q(b)]).collect())
                .collect();
            let k = cols.len();
            let mut pivot_row = 0;
            let mut pivots = Vec::new();
            for c in 0..k {
                let Some(p) = (pivot_row..m).find(|&i| !aug[i][c].is_zero()) else { continue };
                aug.swap(p, pivot_row);
                let pv = aug[pivot_row][c].clone();
                for v in aug[pivot_row].iter_mut() {
                    *v = &*v / &pv;
                }
                for i in 0..m {
                    if i != pivot_row && !aug[i][c].is_zero() {
                        let f = aug[i][c].clone();
                        let prow = aug[pivot_row].clone();
                        for (v, pr) in aug[i].iter_mut().zip(&prow) {
                            *v -= &(&f * pr);
                        }
                    }
                }
                pivots.push((pivot_row, c));
                pivot_row += 1;
            }
            let consistent = aug[pivot_row..].iter().all(|r| r[k].is_zero());
            if pivots.len() == k && consistent && pivots.iter().all(|&(r, _)| !aug[r][k].is_negative()) {
                return true;
            }
        }
        false
    }

    proptest! {
        #[test]
        fn agrees_with_basis_enumeration(
            (rows, rhs) in (1usize..=3, 1usize..=4).prop_flat_map(|(m, n)| (
                prop::collection::vec(prop::collection::vec(-2i64..=2, n), m),
                prop::collection::vec(-2i64..=2, m),
            ))
        ) {
            let sys = LinearSystem::from_dense(
                &rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect::<Vec<_>>(),
                rhs.iter().map(|&v| q(v)).collect(),
            ).unwrap();
            let got = lp_feasible(&sys).unwrap();
            prop_assert_eq!(got.is_feasible(), feasible_by_bases(&rows, &rhs));
            match got {
                LpSolution::Feasible(x) => prop_assert!(sys.is_solution(&x)),
                LpSolution::Infeasible(c) => prop_assert!(c.verify(&sys)),
            }
        }
    }
}
