//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`BigRational`] with Bland's
//! anti-cycling rule. Every outcome carries a certificate that can be checked
//! independently of the solver: a primal/dual pair for optima, a ray for
//! unbounded problems and a Farkas vector for infeasible ones.
//!
//! [`solve_saddle`] reduces a bilinear min-max over two polytopes to a single
//! LP by dualizing the inner maximization.

mod problem;
mod saddle;
mod simplex;

pub use num_rational::BigRational as Rational;

pub use problem::{Constraint, LpOutcome, LpProblem, Relation, Sense, Solution};
pub use saddle::{solve_saddle, Polytope};
pub use simplex::solve_lp;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    MalformedProblem(String),
    #[error("empty polytope")]
    EmptyPolytope,
    #[error("unbounded polytope")]
    UnboundedPolytope,
}

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
