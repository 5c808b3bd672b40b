//! Necessity/belief and possibility/plausibility of set-valued queries.
//!
//! Both routes are provided: counting individuals on a parent relation,
//! and the mass-sum formulas on a distribution. For any relation and
//! column they agree exactly with the summarized distribution — that
//! identity is the central test of this module.

use crate::distribution::GranularDistribution;
use crate::error::{Error, Result};
use crate::frame::Subset;
use crate::rational::Rational;
use crate::relation::GranularRelation;

/// Raw individual counts behind a relation-backed query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryCounts {
    /// Rows whose cell is certain to satisfy the query (cell ⊆ Q).
    pub certain: u64,
    /// Rows whose cell may possibly satisfy it (cell ∩ Q ≠ ∅).
    pub possible: u64,
    pub total: u64,
}

/// Necessity and possibility of a query, with raw counts when the query
/// ran against a relation. Both the counts and the normalized values are
/// reported; the normalized values are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub necessity: Rational,
    pub possibility: Rational,
    pub counts: Option<QueryCounts>,
}

/// Bel(Q) = Σ of masses of focal granules contained in Q.
///
/// Q may be empty (belief 0) or the whole frame (belief 1).
pub fn belief(dist: &GranularDistribution, q: &Subset) -> Result<Rational> {
    if dist.frame() != q.frame() {
        return Err(Error::FrameMismatch);
    }
    Ok(dist
        .focal()
        .iter()
        .filter(|(g, _)| g.bits() & !q.bits() == 0)
        .map(|(_, m)| m)
        .sum())
}

/// Pl(Q) = Σ of masses of focal granules intersecting Q.
pub fn plausibility(dist: &GranularDistribution, q: &Subset) -> Result<Rational> {
    if dist.frame() != q.frame() {
        return Err(Error::FrameMismatch);
    }
    Ok(dist
        .focal()
        .iter()
        .filter(|(g, _)| g.bits() & q.bits() != 0)
        .map(|(_, m)| m)
        .sum())
}

/// Belief and plausibility of `q` in one result (no counts).
pub fn query_distribution(dist: &GranularDistribution, q: &Subset) -> Result<QueryResult> {
    let result = QueryResult {
        necessity: belief(dist, q)?,
        possibility: plausibility(dist, q)?,
        counts: None,
    };
    debug_assert!(result.necessity <= result.possibility);
    Ok(result)
}

/// Counts the individuals of one column that certainly/possibly satisfy
/// `q`, and reports the relative counts as necessity and possibility.
pub fn necessity_possibility(
    rel: &GranularRelation,
    column: &str,
    q: &Subset,
) -> Result<QueryResult> {
    if rel.frame() != q.frame() {
        return Err(Error::FrameMismatch);
    }
    let col = rel.column_index(column)?;
    let mut certain = 0u64;
    let mut possible = 0u64;
    for row in rel.rows() {
        let bits = row.cells()[col].bits();
        if bits & !q.bits() == 0 {
            certain += 1;
        }
        if bits & q.bits() != 0 {
            possible += 1;
        }
    }
    let total = rel.row_count() as u64;
    let result = QueryResult {
        necessity: Rational::from_counts(certain, total),
        possibility: Rational::from_counts(possible, total),
        counts: Some(QueryCounts {
            certain,
            possible,
            total,
        }),
    };
    debug_assert!(certain <= possible && possible <= total);
    Ok(result)
}
