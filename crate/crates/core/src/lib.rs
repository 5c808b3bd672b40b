//! Set-valued evidence over finite frames, kept exact.
//!
//! This crate models evidence as *granular distributions*: nonempty
//! subsets (granules) of a finite frame carrying positive rational
//! masses that sum to 1. A distribution summarizes a *parent relation*
//! of individuals with set-valued attributes; belief and plausibility of
//! a query are then literally relative counts of individuals. On top of
//! those values the crate provides:
//!
//! - [`query`]: belief/plausibility by mass sums and by row counting,
//!   which agree exactly on summarized relations;
//! - [`combination`]: Dempster's rule with the conflict mass and the
//!   normalization step kept explicit, n-ary folding, and credibility
//!   discounting;
//! - [`combinability`]: an exact decision — via integer max-flow over
//!   cleared denominators — of whether two distributions share a
//!   conflict-free parent relation, returning either a constructive
//!   parent or a violating-set certificate, cross-checkable against a
//!   definition-level subset oracle;
//! - [`sim`]: a deterministic, seedable ball-box simulator whose
//!   empirical belief, conflict rate, and kept-pair frequencies converge
//!   to the analytic values.
//!
//! All masses are arbitrary-precision rationals in lowest terms; the
//! analytic paths never touch floating point, so verdicts like
//! "combinable" or "K = 1" are exact statements rather than tolerance
//! calls. Values are immutable after construction and safe to share
//! across threads. With the default `parallel` feature, simulation
//! chunks run on rayon; results are identical to sequential runs.
//!
//! # Example
//!
//! The classic two-singleton pair: Dempster's rule normalizes it
//! (K = 5/9 < 1), yet no conflict-free parent relation exists.
//!
//! ```
//! use granular_ds::{combinability, combination, Frame, GranularDistribution, Rational};
//!
//! let frame = Frame::new(["a", "b"])?;
//! let g = GranularDistribution::from_entries(&frame, &[(&["a"], "2/3"), (&["b"], "1/3")])?;
//! let h = GranularDistribution::from_entries(&frame, &[(&["a"], "1/3"), (&["b"], "2/3")])?;
//!
//! let combined = combination::dempster_combine(&g, &h)?;
//! assert_eq!(combined.conflict, Rational::new(5, 9)?);
//!
//! match combinability::combinable(&g, &h)? {
//!     combinability::FeasibilityResult::Infeasible { certificate } => {
//!         assert_eq!(certificate.supply, Rational::new(2, 3)?);
//!         assert_eq!(certificate.reachable_demand, Rational::new(1, 3)?);
//!     }
//!     combinability::FeasibilityResult::Feasible { witness, .. } => {
//!         assert!(combinability::verify_parent(&witness, "s1", "s2", &g, &h)?);
//!         unreachable!("this pair has no conflict-free parent");
//!     }
//! }
//! # Ok::<(), granular_ds::Error>(())
//! ```

pub mod combinability;
pub mod combination;
mod distribution;
mod error;
pub mod exec;
mod flow;
mod frame;
pub mod query;
mod rational;
pub mod relation;
pub mod sim;

pub use combinability::{
    combinable, combinable_with, gale_oracle, gale_oracle_with_cap, sufficient_noncombinable,
    verify_parent, CombinableOptions, FeasibilityResult, GaleVerdict, InfeasibilityCertificate,
    JointAssignment, Side, SufficiencyVerdict,
};
pub use combination::{
    combine_n, conflict_mass, dempster_combine, discount, CombinationResult, Credibility,
};
pub use distribution::GranularDistribution;
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use frame::{Frame, Granule, Subset};
pub use query::{belief, plausibility, QueryCounts, QueryResult};
pub use rational::Rational;
pub use relation::{ConflictVerdict, GranularRelation};
pub use sim::{SimConfig, SimReport};
