//! The commitment partial order on belief states.
//!
//! `m1 ⊑ m2` (m1 at least as committed as m2) iff `pl1(A) ≤ pl2(A)` for
//! every `A`. A gap only counts as strict when it exceeds the tolerance.

use serde::{Deserialize, Serialize};

use crate::belief::MassFunction;
use crate::error::Result;
use crate::DEFAULT_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommitmentOrdering {
    Equal,
    FirstMoreCommitted,
    SecondMoreCommitted,
    Incomparable,
}

impl CommitmentOrdering {
    /// `true` for `Equal` and `FirstMoreCommitted`, i.e. first ⊑ second.
    pub fn first_at_least_as_committed(self) -> bool {
        matches!(
            self,
            CommitmentOrdering::Equal | CommitmentOrdering::FirstMoreCommitted
        )
    }
}

/// Orders two vectors where a smaller value means more committed.
fn order_by(lhs: &[f64], rhs: &[f64], tol: f64) -> CommitmentOrdering {
    let mut first_strict = false;
    let mut second_strict = false;
    for (&x, &y) in lhs.iter().zip(rhs) {
        if x < y - tol {
            first_strict = true;
        } else if y < x - tol {
            second_strict = true;
        }
    }
    match (first_strict, second_strict) {
        (false, false) => CommitmentOrdering::Equal,
        (true, false) => CommitmentOrdering::FirstMoreCommitted,
        (false, true) => CommitmentOrdering::SecondMoreCommitted,
        (true, true) => CommitmentOrdering::Incomparable,
    }
}

/// Compares plausibility functions pointwise.
pub fn compare(m1: &MassFunction, m2: &MassFunction) -> Result<CommitmentOrdering> {
    compare_with_tolerance(m1, m2, DEFAULT_TOLERANCE)
}

pub fn compare_with_tolerance(
    m1: &MassFunction,
    m2: &MassFunction,
    tol: f64,
) -> Result<CommitmentOrdering> {
    m1.frame().ensure_same(m2.frame())?;
    Ok(order_by(m1.pl().values(), m2.pl().values(), tol))
}

/// Same relation stated on `b(A) = bel(A) + m(∅)`: the more committed
/// function has the larger `b` everywhere.
pub fn compare_bel_form(m1: &MassFunction, m2: &MassFunction) -> Result<CommitmentOrdering> {
    compare_bel_form_with_tolerance(m1, m2, DEFAULT_TOLERANCE)
}

pub fn compare_bel_form_with_tolerance(
    m1: &MassFunction,
    m2: &MassFunction,
    tol: f64,
) -> Result<CommitmentOrdering> {
    m1.frame().ensure_same(m2.frame())?;
    let b1 = m1.b();
    let b2 = m2.b();
    Ok(order_by(b2.values(), b1.values(), tol))
}
