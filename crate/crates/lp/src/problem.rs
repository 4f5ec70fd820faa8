use std::fmt;

use num_traits::{Signed, Zero};

use crate::{LpError, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Leq,
    Eq,
    Geq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Leq => Relation::Geq,
            Relation::Eq => Relation::Eq,
            Relation::Geq => Relation::Leq,
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Leq => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Geq => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Leq => "<=",
            Relation::Eq => "=",
            Relation::Geq => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub(crate) fn negated(&self) -> Constraint {
        Constraint {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            relation: self.relation.flipped(),
            rhs: -&self.rhs,
        }
    }
}

/// A linear program over nonnegative variables, with optional upper bounds.
///
/// Upper bounds are treated as extra `<=` rows appended after the explicit
/// constraints; dual vectors and Farkas certificates are indexed the same
/// way (see [`LpProblem::rows`]).
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub upper_bounds: Vec<Option<Rational>>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            constraints: Vec::new(),
            upper_bounds: vec![None; n],
        }
    }

    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn minimize(objective: Vec<Rational>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn leq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.add(coeffs, Relation::Leq, rhs)
    }

    pub fn geq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.add(coeffs, Relation::Geq, rhs)
    }

    pub fn equal(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.add(coeffs, Relation::Eq, rhs)
    }

    pub fn upper(&mut self, var: usize, bound: Rational) -> &mut Self {
        self.upper_bounds[var] = Some(bound);
        self
    }

    pub(crate) fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.upper_bounds.len() != n {
            return Err(LpError::MalformedProblem(format!(
                "{} upper bounds for {} variables",
                self.upper_bounds.len(),
                n
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::MalformedProblem(format!(
                    "row {} has {} coefficients, expected {}",
                    i,
                    c.coeffs.len(),
                    n
                )));
            }
        }
        for (j, u) in self.upper_bounds.iter().enumerate() {
            if let Some(u) = u {
                if u.is_negative() {
                    return Err(LpError::MalformedProblem(format!(
                        "negative upper bound {} on x{}",
                        u, j
                    )));
                }
            }
        }
        Ok(())
    }

    /// Explicit constraints followed by one `x_j <= u_j` row per bounded
    /// variable, in variable order.
    pub fn rows(&self) -> Vec<Constraint> {
        let n = self.num_vars();
        let mut rows = self.constraints.clone();
        for (j, u) in self.upper_bounds.iter().enumerate() {
            if let Some(u) = u {
                let mut coeffs = vec![Rational::zero(); n];
                coeffs[j] = Rational::from_integer(1.into());
                rows.push(Constraint {
                    coeffs,
                    relation: Relation::Leq,
                    rhs: u.clone(),
                });
            }
        }
        rows
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && self
                .rows()
                .iter()
                .all(|r| r.relation.holds(&dot(&r.coeffs, x), &r.rhs))
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        };
        writeln!(f, "{} {}", sense, linear_form(&self.objective))?;
        for row in self.rows() {
            writeln!(
                f,
                "  {} {} {}",
                linear_form(&row.coeffs),
                row.relation.symbol(),
                row.rhs
            )?;
        }
        write!(f, "  x >= 0")
    }
}

fn linear_form(coeffs: &[Rational]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| format!("{}*x{}", c, j))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// One multiplier per row of [`LpProblem::rows`], signed so that
    /// `sum(rhs_i * dual_i) == value`.
    pub dual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(Solution),
    /// A feasible `point` and a direction `ray` along which the objective
    /// improves without bound.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
    /// A Farkas multiplier per row of [`LpProblem::rows`].
    Infeasible { farkas: Vec<Rational> },
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.optimal().map(|s| &s.value)
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, LpOutcome::Unbounded { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    /// Checks the attached certificate against `problem` using only
    /// arithmetic on the problem data.
    pub fn verify(&self, problem: &LpProblem) -> Result<(), String> {
        let rows = problem.rows();
        let n = problem.num_vars();
        match self {
            LpOutcome::Optimal(sol) => {
                if !problem.is_feasible(&sol.primal) {
                    return Err("primal point infeasible".into());
                }
                if problem.objective_at(&sol.primal) != sol.value {
                    return Err("primal objective differs from value".into());
                }
                if sol.dual.len() != rows.len() {
                    return Err("dual has wrong length".into());
                }
                let dual_obj: Rational = rows.iter().zip(&sol.dual).map(|(r, y)| &r.rhs * y).sum();
                if dual_obj != sol.value {
                    return Err(format!("dual objective {} != {}", dual_obj, sol.value));
                }
                // Sign conditions: for max, y >= 0 on <= rows, y <= 0 on >= rows,
                // reversed for min.
                let flip = problem.sense == Sense::Minimize;
                for (i, (r, y)) in rows.iter().zip(&sol.dual).enumerate() {
                    let ok = match (r.relation, flip) {
                        (Relation::Eq, _) => true,
                        (Relation::Leq, false) | (Relation::Geq, true) => !y.is_negative(),
                        (Relation::Geq, false) | (Relation::Leq, true) => !y.is_positive(),
                    };
                    if !ok {
                        return Err(format!("dual sign violated on row {}", i));
                    }
                    let slack = dot(&r.coeffs, &sol.primal) - &r.rhs;
                    if !(y * &slack).is_zero() {
                        return Err(format!("complementary slackness fails on row {}", i));
                    }
                }
                for j in 0..n {
                    let col: Rational = rows.iter().zip(&sol.dual).map(|(r, y)| &r.coeffs[j] * y).sum();
                    let reduced = &col - &problem.objective[j];
                    let ok = if flip { !reduced.is_positive() } else { !reduced.is_negative() };
                    if !ok {
                        return Err(format!("dual constraint violated for x{}", j));
                    }
                    if !(&reduced * &sol.primal[j]).is_zero() {
                        return Err(format!("complementary slackness fails for x{}", j));
                    }
                }
                Ok(())
            }
            LpOutcome::Unbounded { point, ray } => {
                if !problem.is_feasible(point) {
                    return Err("base point infeasible".into());
                }
                if ray.len() != n || ray.iter().any(|v| v.is_negative()) {
                    return Err("ray leaves the nonnegative orthant".into());
                }
                for (i, r) in rows.iter().enumerate() {
                    let a = dot(&r.coeffs, ray);
                    let ok = match r.relation {
                        Relation::Leq => !a.is_positive(),
                        Relation::Eq => a.is_zero(),
                        Relation::Geq => !a.is_negative(),
                    };
                    if !ok {
                        return Err(format!("ray violates row {}", i));
                    }
                }
                let gain = problem.objective_at(ray);
                let improving = match problem.sense {
                    Sense::Maximize => gain.is_positive(),
                    Sense::Minimize => gain.is_negative(),
                };
                if improving {
                    Ok(())
                } else {
                    Err("ray does not improve the objective".into())
                }
            }
            LpOutcome::Infeasible { farkas } => {
                if farkas.len() != rows.len() {
                    return Err("certificate has wrong length".into());
                }
                for (i, (r, y)) in rows.iter().zip(farkas).enumerate() {
                    let ok = match r.relation {
                        Relation::Leq => !y.is_negative(),
                        Relation::Geq => !y.is_positive(),
                        Relation::Eq => true,
                    };
                    if !ok {
                        return Err(format!("certificate sign violated on row {}", i));
                    }
                }
                for j in 0..n {
                    let col: Rational = rows.iter().zip(farkas).map(|(r, y)| &r.coeffs[j] * y).sum();
                    if col.is_negative() {
                        return Err(format!("certificate column {} negative", j));
                    }
                }
                let rhs: Rational = rows.iter().zip(farkas).map(|(r, y)| &r.rhs * y).sum();
                if rhs.is_negative() {
                    Ok(())
                } else {
                    Err("certificate right-hand side not negative".into())
                }
            }
        }
    }
}
