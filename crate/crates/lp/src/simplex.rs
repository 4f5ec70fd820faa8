use num_traits::{One, Signed, Zero};

use crate::problem::{LpOutcome, LpProblem, Relation, Sense, Solution};
use crate::{LpError, Rational};

/// Dense tableau in the form `B^-1 A | B^-1 b`.
struct Tableau {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    artificial: Vec<bool>,
    /// Column that started as the identity column of each row.
    identity_col: Vec<usize>,
    /// Rows multiplied by -1 to make the right-hand side nonnegative.
    negated: Vec<bool>,
    structural: usize,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Tableau {
        let n = problem.num_vars();
        let rows = problem.rows();
        let m = rows.len();

        let mut negated = vec![false; m];
        let rows: Vec<_> = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                if r.rhs.is_negative() {
                    negated[i] = true;
                    r.negated()
                } else {
                    r
                }
            })
            .collect();

        let aux: usize = rows
            .iter()
            .map(|r| match r.relation {
                Relation::Geq => 2,
                _ => 1,
            })
            .sum();
        let width = n + aux;
        let mut a = vec![vec![Rational::zero(); width]; m];
        let mut artificial = vec![false; width];
        let mut identity_col = vec![0; m];
        let mut next = n;
        for (i, r) in rows.iter().enumerate() {
            a[i][..n].clone_from_slice(&r.coeffs);
            match r.relation {
                Relation::Leq => {
                    a[i][next] = Rational::one();
                    identity_col[i] = next;
                    next += 1;
                }
                Relation::Geq => {
                    a[i][next] = -Rational::one();
                    a[i][next + 1] = Rational::one();
                    artificial[next + 1] = true;
                    identity_col[i] = next + 1;
                    next += 2;
                }
                Relation::Eq => {
                    a[i][next] = Rational::one();
                    artificial[next] = true;
                    identity_col[i] = next;
                    next += 1;
                }
            }
        }
        Tableau {
            a,
            rhs: rows.into_iter().map(|r| r.rhs).collect(),
            basis: identity_col.clone(),
            artificial,
            identity_col,
            negated,
            structural: n,
        }
    }

    fn width(&self) -> usize {
        self.artificial.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col].clone();
        if !p.is_one() {
            for v in self.a[row].iter_mut() {
                *v = &*v / &p;
            }
            self.rhs[row] = &self.rhs[row] / &p;
        }
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.a.len() {
            if r == row || self.a[r][col].is_zero() {
                continue;
            }
            let factor = self.a[r][col].clone();
            for (v, pv) in self.a[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// `c_B^T B^-1 a_j` for column `j`.
    fn price(&self, cost: &[Rational], j: usize) -> Rational {
        let mut z = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.a[r][j].is_zero() {
                z += &cost[b] * &self.a[r][j];
            }
        }
        z
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, v)| &cost[b] * v)
            .sum()
    }

    /// Row multipliers `c_B^T B^-1`, read off the original identity columns.
    fn multipliers(&self, cost: &[Rational]) -> Vec<Rational> {
        self.identity_col.iter().map(|&c| self.price(cost, c)).collect()
    }

    /// Maximizes `cost` with Bland's rule. On unboundedness returns the
    /// entering column that has no leaving row.
    fn optimize(&mut self, cost: &[Rational]) -> Result<(), usize> {
        loop {
            let mut in_basis = vec![false; self.width()];
            for &b in &self.basis {
                in_basis[b] = true;
            }
            let entering = (0..self.width())
                .find(|&j| !in_basis[j] && !self.artificial[j] && (&cost[j] - self.price(cost, j)).is_positive());
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                if !self.a[r][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.a[r][col];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(col),
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }

    fn unsign(&self, y: Vec<Rational>) -> Vec<Rational> {
        y.into_iter()
            .zip(&self.negated)
            .map(|(v, &neg)| if neg { -v } else { v })
            .collect()
    }
}

/// Solves `problem` exactly with a two-phase primal simplex.
pub fn solve_lp(problem: &LpProblem) -> Result<LpOutcome, LpError> {
    problem.validate()?;
    let mut t = Tableau::build(problem);
    let width = t.width();

    if t.artificial.iter().any(|&a| a) {
        // Artificial columns start basic; they are excluded from entering by
        // `optimize`, which is all phase one needs since they only leave.
        let cost: Vec<Rational> = t
            .artificial
            .iter()
            .map(|&a| if a { -Rational::one() } else { Rational::zero() })
            .collect();
        t.optimize(&cost)
            .expect("phase one objective is bounded by zero");
        if t.objective(&cost).is_negative() {
            let farkas = t.unsign(t.multipliers(&cost));
            return Ok(LpOutcome::Infeasible { farkas });
        }
        for r in 0..t.a.len() {
            if !t.artificial[t.basis[r]] {
                continue;
            }
            if let Some(col) = (0..width).find(|&j| !t.artificial[j] && !t.a[r][j].is_zero()) {
                t.pivot(r, col);
            }
        }
    }

    let mut cost = vec![Rational::zero(); width];
    for (j, c) in problem.objective.iter().enumerate() {
        cost[j] = match problem.sense {
            Sense::Maximize => c.clone(),
            Sense::Minimize => -c,
        };
    }
    match t.optimize(&cost) {
        Ok(()) => {
            let primal = t.point();
            let mut value = t.objective(&cost);
            let mut dual = t.unsign(t.multipliers(&cost));
            if problem.sense == Sense::Minimize {
                value = -value;
                dual = dual.into_iter().map(|y| -y).collect();
            }
            Ok(LpOutcome::Optimal(Solution {
                value,
                primal,
                dual,
            }))
        }
        Err(col) => {
            let point = t.point();
            let mut ray = vec![Rational::zero(); t.structural];
            if col < t.structural {
                ray[col] = Rational::one();
            }
            for (r, &b) in t.basis.iter().enumerate() {
                if b < t.structural {
                    ray[b] = -&t.a[r][col];
                }
            }
            Ok(LpOutcome::Unbounded { point, ray })
        }
    }
}
