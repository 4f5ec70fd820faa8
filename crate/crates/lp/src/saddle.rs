use num_traits::Zero;

use crate::problem::{Constraint, LpOutcome, LpProblem, Relation};
use crate::{solve_lp, LpError, Rational};

/// `{ x >= 0 : constraints }` in `dim` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Polytope {
            dim,
            constraints: Vec::new(),
        }
    }

    /// The standard simplex `{ x >= 0 : sum x = 1 }`.
    pub fn simplex(dim: usize) -> Self {
        let mut p = Polytope::new(dim);
        p.push(vec![Rational::from_integer(1.into()); dim], Relation::Eq, Rational::from_integer(1.into()));
        p
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn is_empty(&self) -> Result<bool, LpError> {
        let mut p = LpProblem::maximize(vec![Rational::zero(); self.dim]);
        p.constraints = self.constraints.clone();
        Ok(solve_lp(&p)?.is_infeasible())
    }

    /// Rewrites every row as `<=`, splitting equalities.
    fn leq_rows(&self) -> Vec<(Vec<Rational>, Rational)> {
        let mut out = Vec::new();
        for c in &self.constraints {
            match c.relation {
                Relation::Leq => out.push((c.coeffs.clone(), c.rhs.clone())),
                Relation::Geq => {
                    let n = c.negated();
                    out.push((n.coeffs, n.rhs));
                }
                Relation::Eq => {
                    out.push((c.coeffs.clone(), c.rhs.clone()));
                    let n = c.negated();
                    out.push((n.coeffs, n.rhs));
                }
            }
        }
        out
    }
}

/// `min_{p in P} max_{q in Q} p^T M q` for `M` of shape `P.dim x Q.dim`.
///
/// The inner maximization `max { (M^T p) q : A q <= b, q >= 0 }` is replaced
/// by its dual `min { b y : A^T y >= M^T p, y >= 0 }`, leaving one
/// minimization over `(p, y)`.
pub fn solve_saddle(m: &[Vec<Rational>], p: &Polytope, q: &Polytope) -> Result<Rational, LpError> {
    if m.len() != p.dim || m.iter().any(|row| row.len() != q.dim) {
        return Err(LpError::MalformedProblem(format!(
            "bilinear form is not {}x{}",
            p.dim, q.dim
        )));
    }
    if p.is_empty()? || q.is_empty()? {
        return Err(LpError::EmptyPolytope);
    }
    let q_rows = q.leq_rows();
    let k = q_rows.len();
    let width = p.dim + k;

    let mut objective = vec![Rational::zero(); width];
    for (i, (_, b)) in q_rows.iter().enumerate() {
        objective[p.dim + i] = b.clone();
    }
    let mut lp = LpProblem::minimize(objective);
    for j in 0..q.dim {
        let mut coeffs = vec![Rational::zero(); width];
        for (i, row) in m.iter().enumerate() {
            coeffs[i] = -&row[j];
        }
        for (i, (a, _)) in q_rows.iter().enumerate() {
            coeffs[p.dim + i] = a[j].clone();
        }
        lp.geq(coeffs, Rational::zero());
    }
    for c in &p.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.resize(width, Rational::zero());
        lp.add(coeffs, c.relation, c.rhs.clone());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => Ok(sol.value),
        // Q nonempty makes every inner dual bounded below, so an unbounded
        // combined problem is impossible; infeasibility means the inner
        // maximum is +inf for every p.
        LpOutcome::Unbounded { .. } | LpOutcome::Infeasible { .. } => Err(LpError::UnboundedPolytope),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, ratio};

    #[test]
    fn point_polytopes_return_the_scalar() {
        let mut p = Polytope::new(1);
        p.push(vec![int(1)], Relation::Eq, int(1));
        let v = solve_saddle(&[vec![int(7)]], &p, &p.clone()).unwrap();
        assert_eq!(v, int(7));
    }

    #[test]
    fn identity_game_has_value_one_half() {
        let m = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let v = solve_saddle(&m, &Polytope::simplex(2), &Polytope::simplex(2)).unwrap();
        assert_eq!(v, ratio(1, 2));
    }

    #[test]
    fn zero_form_has_value_zero() {
        let m = vec![vec![int(0); 3]; 2];
        let v = solve_saddle(&m, &Polytope::simplex(2), &Polytope::simplex(3)).unwrap();
        assert_eq!(v, int(0));
    }

    #[test]
    fn empty_polytope_is_reported() {
        let mut p = Polytope::new(1);
        p.push(vec![int(1)], Relation::Leq, int(1)).push(vec![int(1)], Relation::Geq, int(2));
        let err = solve_saddle(&[vec![int(1)]], &p, &Polytope::simplex(1)).unwrap_err();
        assert_eq!(err, LpError::EmptyPolytope);
    }

    #[test]
    fn unbounded_inner_polytope_is_reported() {
        let q = Polytope::new(1);
        let err = solve_saddle(&[vec![int(1)]], &Polytope::simplex(1), &q).unwrap_err();
        assert_eq!(err, LpError::UnboundedPolytope);
    }
}
