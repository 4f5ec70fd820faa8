//! Simple valuations and the Kantorovich-Rubinshtein-Hutchinson quasi-metrics.
//!
//! `dKRH(mu, nu) = sup_h (int h dmu - int h dnu)` over 1-Lipschitz `h`, and
//! `dKRH^a` restricts `h` to values in `[0, a]`. Both are computed as a
//! linear program over the values of `h`, and again as a transport problem
//! over plans between the two valuations.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use qmet_lp::{solve_lp, LpOutcome, LpProblem};

use crate::error::{Error, Result};
use crate::lipschitz::{difference_row, is_alpha_lipschitz, lipschitz_rows};
use crate::{ExtFunc, ExtRat, QSpace, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MassClass {
    /// Total mass exactly 1.
    Normalized,
    /// Total mass below 1.
    Subnormalized,
    /// Total mass above 1.
    General,
}

/// `sum_i a_i delta_{x_i}` with positive rational weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleValuation {
    universe: usize,
    weights: BTreeMap<usize, Rational>,
}

impl SimpleValuation {
    /// Zero weights are dropped; negative ones are rejected.
    pub fn new(universe: usize, pairs: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (x, w) in pairs {
            if x >= universe {
                return Err(Error::Malformed(format!("point {} out of range", x)));
            }
            if w.is_negative() {
                return Err(Error::Malformed(format!("negative weight {}", w)));
            }
            let slot = weights.entry(x).or_insert_with(Rational::zero);
            *slot += w;
        }
        weights.retain(|_, w: &mut Rational| !w.is_zero());
        Ok(SimpleValuation { universe, weights })
    }

    pub fn zero(universe: usize) -> Self {
        SimpleValuation {
            universe,
            weights: BTreeMap::new(),
        }
    }

    pub fn dirac(universe: usize, x: usize) -> Self {
        SimpleValuation::new(universe, [(x, Rational::one())]).expect("point in range")
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn weight(&self, x: usize) -> Rational {
        self.weights.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.weights.iter().map(|(&x, w)| (x, w))
    }

    /// Weights as a dense vector indexed by point.
    pub fn dense(&self) -> Vec<Rational> {
        (0..self.universe).map(|x| self.weight(x)).collect()
    }

    pub fn mass(&self) -> Rational {
        self.weights.values().sum()
    }

    pub fn class(&self) -> MassClass {
        let m = self.mass();
        if m.is_one() {
            MassClass::Normalized
        } else if m < Rational::one() {
            MassClass::Subnormalized
        } else {
            MassClass::General
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.class() == MassClass::Normalized
    }

    /// `t * self + (1 - t) * other` for `t` in `[0, 1]`.
    pub fn mix(&self, other: &SimpleValuation, t: &Rational) -> SimpleValuation {
        assert!(!t.is_negative() && *t <= Rational::one(), "mixing weight outside [0, 1]");
        let s = Rational::one() - t;
        let pairs = self
            .support()
            .map(|(x, w)| (x, w * t))
            .chain(other.support().map(|(x, w)| (x, w * &s)))
            .collect::<Vec<_>>();
        SimpleValuation::new(self.universe, pairs).expect("convex combination is valid")
    }

    /// `{"weights": {"label": "p/q"}}`.
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        let weights: BTreeMap<&str, String> = self
            .support()
            .map(|(x, w)| (space.label(x), w.to_string()))
            .collect();
        serde_json::json!({ "weights": weights })
    }

    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<SimpleValuation> {
        let weights = value
            .get("weights")
            .and_then(|w| w.as_object())
            .ok_or_else(|| Error::Malformed("expected {\"weights\": {...}}".into()))?;
        let mut pairs = Vec::new();
        for (label, w) in weights {
            let text = w
                .as_str()
                .ok_or_else(|| Error::Malformed(format!("weight of {} must be a string", label)))?;
            let q = crate::ext::parse_rational(text).map_err(|e| Error::Malformed(e.to_string()))?;
            pairs.push((space.index_of(label)?, q));
        }
        SimpleValuation::new(space.len(), pairs)
    }
}

/// `sum_i a_i h(x_i)`, infinite as soon as a weighted point has `h = inf`.
pub fn integrate(nu: &SimpleValuation, h: &ExtFunc) -> ExtRat {
    nu.support().map(|(x, w)| h.get(x).weight(w)).sum()
}

fn check_space(space: &QSpace, vals: &[&SimpleValuation]) -> Result<()> {
    if vals.iter().any(|v| v.universe() != space.len()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

fn check_bound(bound: Option<&Rational>) -> Result<()> {
    match bound {
        Some(a) if !a.is_positive() => Err(Error::InvalidBound),
        _ => Ok(()),
    }
}

/// A solved LP together with the problem it was solved on, so the attached
/// certificate can be checked independently.
#[derive(Debug, Clone)]
pub struct LpRun {
    pub problem: LpProblem,
    pub outcome: LpOutcome,
}

impl LpRun {
    fn solve(problem: LpProblem) -> Result<LpRun> {
        let outcome = solve_lp(&problem)?;
        Ok(LpRun { problem, outcome })
    }

    pub fn certificate_ok(&self) -> bool {
        self.outcome.verify(&self.problem).is_ok()
    }
}

/// The Lipschitz-function LP: maximize `sum (mu_x - nu_x) h_x` over
/// 1-Lipschitz `h >= 0`, capped at `a` when bounded.
pub fn dkrh_lp_run(
    space: &QSpace,
    mu: &SimpleValuation,
    nu: &SimpleValuation,
    bound: Option<&Rational>,
) -> Result<(ExtRat, LpRun)> {
    check_space(space, &[mu, nu])?;
    check_bound(bound)?;
    let n = space.len();
    let objective = mu.dense().into_iter().zip(nu.dense()).map(|(a, b)| a - b).collect();
    let mut lp = LpProblem::maximize(objective);
    for (u, v, d) in lipschitz_rows(space, &Rational::one()) {
        lp.leq(difference_row(n, 0, u, v), d);
    }
    if let Some(a) = bound {
        for x in space.points() {
            lp.upper(x, a.clone());
        }
    }
    let run = LpRun::solve(lp)?;
    let value = match &run.outcome {
        LpOutcome::Optimal(sol) => ExtRat::try_finite(sol.value.clone()).unwrap_or_else(ExtRat::zero),
        LpOutcome::Unbounded { .. } => ExtRat::inf(),
        LpOutcome::Infeasible { .. } => {
            return Err(Error::DegenerateInstance("h = 0 reported infeasible".into()))
        }
    };
    Ok((value, run))
}

pub fn dkrh_lp(space: &QSpace, mu: &SimpleValuation, nu: &SimpleValuation, bound: Option<&Rational>) -> Result<ExtRat> {
    dkrh_lp_run(space, mu, nu, bound).map(|(v, _)| v)
}

/// A transition matrix between two valuations, with the slack vectors of
/// the bounded variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    pub t: Vec<Vec<Rational>>,
    pub u: Option<Vec<Rational>>,
    pub v: Option<Vec<Rational>>,
    pub bound: Option<Rational>,
}

impl TransportPlan {
    pub fn diagonal(mu: &SimpleValuation) -> TransportPlan {
        let n = mu.universe();
        let mut t = vec![vec![Rational::zero(); n]; n];
        for (x, w) in mu.support() {
            t[x][x] = w.clone();
        }
        TransportPlan {
            t,
            u: None,
            v: None,
            bound: None,
        }
    }

    /// `sum t_xy d(x, y)`, plus `a (sum u + sum v)` with slacks.
    pub fn weight(&self, space: &QSpace) -> ExtRat {
        let mut total = ExtRat::zero();
        for x in space.points() {
            for y in space.points() {
                total = total + space.d(x, y).weight(&self.t[x][y]);
            }
        }
        if let Some(a) = &self.bound {
            let slack: Rational = self.u.iter().chain(&self.v).flatten().sum();
            total = &total + &(slack * a);
        }
        total
    }

    pub fn row_sum(&self, x: usize) -> Rational {
        self.t[x].iter().sum()
    }

    pub fn col_sum(&self, y: usize) -> Rational {
        self.t.iter().map(|row| &row[y]).sum()
    }

    /// Exact marginals `mu` and `nu`, no slacks.
    pub fn is_transition_matrix(&self, mu: &SimpleValuation, nu: &SimpleValuation) -> bool {
        let n = self.t.len();
        self.u.is_none()
            && self.v.is_none()
            && self.t.iter().flatten().all(|q| !q.is_negative())
            && (0..n).all(|x| self.row_sum(x) == mu.weight(x))
            && (0..n).all(|y| self.col_sum(y) == nu.weight(y))
    }

    /// The bounded-variant constraints: `sum_y t_xy + u_x >= mu_x` and
    /// `sum_x t_xy - v_y <= nu_y`.
    pub fn is_bounded_plan(&self, mu: &SimpleValuation, nu: &SimpleValuation) -> bool {
        let n = self.t.len();
        let (Some(u), Some(v)) = (&self.u, &self.v) else {
            return false;
        };
        self.t.iter().flatten().chain(u).chain(v).all(|q| !q.is_negative())
            && (0..n).all(|x| self.row_sum(x) + &u[x] >= mu.weight(x))
            && (0..n).all(|y| self.col_sum(y) - &v[y] <= nu.weight(y))
    }

    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        let mut entries = Vec::new();
        for x in space.points() {
            for y in space.points() {
                if !self.t[x][y].is_zero() {
                    entries.push(serde_json::json!({
                        "from": space.label(x),
                        "to": space.label(y),
                        "mass": self.t[x][y].to_string(),
                    }));
                }
            }
        }
        let slack = |s: &Option<Vec<Rational>>| -> serde_json::Value {
            match s {
                None => serde_json::Value::Null,
                Some(s) => {
                    let m: BTreeMap<&str, String> = space
                        .points()
                        .filter(|&x| !s[x].is_zero())
                        .map(|x| (space.label(x), s[x].to_string()))
                        .collect();
                    serde_json::to_value(m).expect("slack serializes")
                }
            }
        };
        serde_json::json!({
            "t": entries,
            "u": slack(&self.u),
            "v": slack(&self.v),
            "weight": self.weight(space).to_string(),
        })
    }
}

fn require_normalized(mu: &SimpleValuation, nu: &SimpleValuation) -> Result<()> {
    if mu.is_normalized() && nu.is_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// Pairs of support points at finite distance; these index the transport
/// variables.
fn transport_pairs(space: &QSpace, mu: &SimpleValuation, nu: &SimpleValuation) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (x, _) in mu.support() {
        for (y, _) in nu.support() {
            if space.d(x, y).is_finite() {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

fn unit_row(len: usize, hits: impl IntoIterator<Item = usize>, sign: i64) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); len];
    for i in hits {
        row[i] = Rational::from_integer(sign.into());
    }
    row
}

/// The transport LP: minimize `sum t_xy d(x, y)` over plans with the exact
/// marginals. Pairs at infinite distance carry no variable, so an infeasible
/// LP means every plan costs `inf`.
pub fn dkrh_transport_run(
    space: &QSpace,
    mu: &SimpleValuation,
    nu: &SimpleValuation,
) -> Result<(ExtRat, Option<TransportPlan>, LpRun)> {
    check_space(space, &[mu, nu])?;
    require_normalized(mu, nu)?;
    let pairs = transport_pairs(space, mu, nu);
    let m = pairs.len();
    let cost = pairs
        .iter()
        .map(|&(x, y)| space.d(x, y).as_finite().expect("finite pair").clone())
        .collect();
    let mut lp = LpProblem::minimize(cost);
    for (x, w) in mu.support() {
        let hits = (0..m).filter(|&i| pairs[i].0 == x);
        lp.equal(unit_row(m, hits, 1), w.clone());
    }
    for (y, w) in nu.support() {
        let hits = (0..m).filter(|&i| pairs[i].1 == y);
        lp.equal(unit_row(m, hits, 1), w.clone());
    }
    let run = LpRun::solve(lp)?;
    match &run.outcome {
        LpOutcome::Optimal(sol) => {
            let n = space.len();
            let mut t = vec![vec![Rational::zero(); n]; n];
            for (i, &(x, y)) in pairs.iter().enumerate() {
                t[x][y] = sol.primal[i].clone();
            }
            let plan = TransportPlan {
                t,
                u: None,
                v: None,
                bound: None,
            };
            Ok((ExtRat::finite(sol.value.clone()), Some(plan), run))
        }
        LpOutcome::Infeasible { .. } => Ok((ExtRat::inf(), None, run)),
        LpOutcome::Unbounded { .. } => Err(Error::DegenerateInstance("transport LP unbounded".into())),
    }
}

pub fn dkrh_transport(space: &QSpace, mu: &SimpleValuation, nu: &SimpleValuation) -> Result<(ExtRat, Option<TransportPlan>)> {
    dkrh_transport_run(space, mu, nu).map(|(v, p, _)| (v, p))
}

/// The bounded transport LP: minimize
/// `sum t_xy d(x, y) + a sum u_x + a sum v_y` subject to
/// `sum_y t_xy + u_x >= mu_x` and `sum_x t_xy - v_y <= nu_y`.
pub fn dkrha_transport_run(
    space: &QSpace,
    mu: &SimpleValuation,
    nu: &SimpleValuation,
    a: &Rational,
) -> Result<(Rational, TransportPlan, LpRun)> {
    check_space(space, &[mu, nu])?;
    check_bound(Some(a))?;
    require_normalized(mu, nu)?;
    let n = space.len();
    let pairs = transport_pairs(space, mu, nu);
    let m = pairs.len();
    // Variables: t over pairs, then u over all points, then v over all points.
    let len = m + 2 * n;
    let mut cost: Vec<Rational> = pairs
        .iter()
        .map(|&(x, y)| space.d(x, y).as_finite().expect("finite pair").clone())
        .collect();
    cost.extend(std::iter::repeat_n(a.clone(), 2 * n));
    let mut lp = LpProblem::minimize(cost);
    for (x, w) in mu.support() {
        let hits = (0..m).filter(|&i| pairs[i].0 == x).chain([m + x]);
        lp.geq(unit_row(len, hits, 1), w.clone());
    }
    for y in space.points() {
        let mut row = unit_row(len, (0..m).filter(|&i| pairs[i].1 == y), 1);
        row[m + n + y] = -Rational::one();
        lp.leq(row, nu.weight(y));
    }
    let run = LpRun::solve(lp)?;
    let sol = match &run.outcome {
        LpOutcome::Optimal(sol) => sol.clone(),
        _ => return Err(Error::DegenerateInstance("bounded transport LP has no optimum".into())),
    };
    let mut t = vec![vec![Rational::zero(); n]; n];
    for (i, &(x, y)) in pairs.iter().enumerate() {
        t[x][y] = sol.primal[i].clone();
    }
    let plan = TransportPlan {
        t,
        u: Some(sol.primal[m..m + n].to_vec()),
        v: Some(sol.primal[m + n..].to_vec()),
        bound: Some(a.clone()),
    };
    Ok((sol.value, plan, run))
}

pub fn dkrha_transport(
    space: &QSpace,
    mu: &SimpleValuation,
    nu: &SimpleValuation,
    a: &Rational,
) -> Result<(Rational, TransportPlan)> {
    dkrha_transport_run(space, mu, nu, a).map(|(v, p, _)| (v, p))
}

/// Moving `mass` from `from` to `to` at cost `mass * d(from, to)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub from: usize,
    pub to: usize,
    pub mass: Rational,
    pub cost: ExtRat,
}

impl Move {
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        serde_json::json!({
            "from": space.label(self.from),
            "to": space.label(self.to),
            "mass": self.mass.to_string(),
            "cost": self.cost.to_string(),
        })
    }
}

/// Splits a plan into single moves, one per nonzero entry in index order.
/// Applying them in turn carries `mu` to the plan's target marginal, and
/// their costs add up to the plan's weight.
pub fn decompose_plan(space: &QSpace, mu: &SimpleValuation, plan: &TransportPlan) -> Result<Vec<Move>> {
    let n = space.len();
    if mu.universe() != n || plan.t.len() != n || plan.t.iter().any(|r| r.len() != n) {
        return Err(Error::SpaceMismatch);
    }
    if plan.t.iter().flatten().any(|q| q.is_negative()) {
        return Err(Error::InvalidPlan("negative entry".into()));
    }
    for x in space.points() {
        if plan.row_sum(x) != mu.weight(x) {
            return Err(Error::InvalidPlan(format!(
                "row {} sums to {}, expected {}",
                space.label(x),
                plan.row_sum(x),
                mu.weight(x)
            )));
        }
    }
    let mut moves = Vec::new();
    for x in space.points() {
        for y in space.points() {
            let mass = &plan.t[x][y];
            if !mass.is_zero() {
                moves.push(Move {
                    from: x,
                    to: y,
                    mass: mass.clone(),
                    cost: space.d(x, y).weight(mass),
                });
            }
        }
    }
    Ok(moves)
}

/// Replays moves on `mu`; the result is the plan's column marginal.
pub fn apply_moves(mu: &SimpleValuation, moves: &[Move]) -> Result<SimpleValuation> {
    let mut w = mu.dense();
    for m in moves {
        w[m.from] -= &m.mass;
        if w[m.from].is_negative() {
            return Err(Error::InvalidPlan(format!("point {} overdrawn", m.from)));
        }
        w[m.to] += &m.mass;
    }
    SimpleValuation::new(mu.universe(), w.into_iter().enumerate())
}

/// `(mu, r) <= (nu, s)` iff `dKRH(mu, nu) <= r - s`, bounded when `a` given.
pub fn ball_leq_valuations(
    space: &QSpace,
    lhs: (&SimpleValuation, &Rational),
    rhs: (&SimpleValuation, &Rational),
    bound: Option<&Rational>,
) -> Result<bool> {
    let gap = lhs.1 - rhs.1;
    if gap.is_negative() {
        return Ok(false);
    }
    Ok(dkrh_lp(space, lhs.0, rhs.0, bound)?.le_rat(&gap))
}

/// The naive supremum of a finite chain of balls `(nu_i, r_i)`, evaluated
/// on probes `h` that are `alpha`-Lipschitz:
/// `sup_i (int h dnu_i + alpha r - alpha r_i)` with `r = min_i r_i`.
pub fn naive_sup_chain(
    space: &QSpace,
    chain: &[(SimpleValuation, Rational)],
    probes: &[(ExtFunc, Rational)],
) -> Result<Vec<ExtRat>> {
    if chain.is_empty() {
        return Err(Error::Malformed("empty chain".into()));
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !ball_leq_valuations(space, (&w[0].0, &w[0].1), (&w[1].0, &w[1].1), None)? {
            return Err(Error::NotAChain(i));
        }
    }
    let r = chain.iter().map(|(_, r)| r).min().expect("nonempty").clone();
    probes
        .iter()
        .map(|(h, alpha)| {
            if !is_alpha_lipschitz(space, h, alpha) {
                return Err(Error::NotLipschitz(alpha.to_string()));
            }
            Ok(chain
                .iter()
                .filter_map(|(nu, ri)| integrate(nu, h).checked_sub(&(alpha * (ri - &r))))
                .max()
                .unwrap_or_else(ExtRat::zero))
        })
        .collect()
}
