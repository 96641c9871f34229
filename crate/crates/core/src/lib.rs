//! Exact-arithmetic tools for contextuality: Kochen-Specker ray sets,
//! joint-distribution existence for finite measurement systems, the
//! Contextuality-by-Default split, and a finite quasi-set model whose
//! per-context valuations avoid the Kochen-Specker contradiction.
//!
//! Every verdict is computed over [`Rational`]; no floating point enters
//! a decision path.

pub mod cbd;
pub mod io;
pub mod jpd;
pub mod ks;
pub mod linalg;
pub mod lp;
pub mod qset;
pub mod rational;
pub mod rng;
pub mod valuation;

pub use rational::Rational;
