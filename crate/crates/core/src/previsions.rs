//! Finitely generated previsions and forks.
//!
//! A sublinear prevision is `h |-> max_j int h dG_j` and a superlinear one
//! `h |-> min_j int h dG_j`, for a nonempty list of simple valuations `G_j`.
//! A fork pairs a superlinear lower part with a sublinear upper part
//! satisfying Walley's condition.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use qmet_lp::{solve_lp, solve_saddle, LpError, LpOutcome, LpProblem, Polytope, Relation};

use crate::error::{Error, Result};
use crate::lipschitz::{difference_row, envelope, is_alpha_lipschitz, lipschitz_rows};
use crate::powerdomains::QuasiLens;
use crate::valuations::{integrate, MassClass, SimpleValuation};
use crate::{ExtFunc, ExtRat, QSpace, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrevisionKind {
    Sublinear,
    Superlinear,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenPrevision {
    kind: PrevisionKind,
    generators: Vec<SimpleValuation>,
}

impl GenPrevision {
    /// Generators must be nonempty, live on one space and have mass at most 1.
    pub fn new(kind: PrevisionKind, generators: Vec<SimpleValuation>) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyGenerator)?;
        if generators.iter().any(|g| g.universe() != first.universe()) {
            return Err(Error::SpaceMismatch);
        }
        if generators.iter().any(|g| g.class() == MassClass::General) {
            return Err(Error::NotNormalized);
        }
        Ok(GenPrevision { kind, generators })
    }

    /// Dirac generators over `pts`; the empty set gives the zero prevision.
    pub fn dirac(kind: PrevisionKind, universe: usize, pts: impl IntoIterator<Item = usize>) -> Self {
        let mut generators: Vec<_> = pts.into_iter().map(|x| SimpleValuation::dirac(universe, x)).collect();
        if generators.is_empty() {
            generators.push(SimpleValuation::zero(universe));
        }
        GenPrevision { kind, generators }
    }

    pub fn kind(&self) -> PrevisionKind {
        self.kind
    }

    pub fn generators(&self) -> &[SimpleValuation] {
        &self.generators
    }

    pub fn universe(&self) -> usize {
        self.generators[0].universe()
    }

    /// Normalized when every generator has mass 1, subnormalized otherwise.
    pub fn class(&self) -> MassClass {
        if self.generators.iter().all(SimpleValuation::is_normalized) {
            MassClass::Normalized
        } else {
            MassClass::Subnormalized
        }
    }

    /// The same prevision with one more generator.
    pub fn with_generator(&self, g: SimpleValuation) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push(g);
        GenPrevision::new(self.kind, gens)
    }

    /// `{"kind": "...", "generators": [valuation...]}`.
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "generators": self.generators.iter().map(|g| g.to_json(space)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<GenPrevision> {
        let kind: PrevisionKind = value
            .get("kind")
            .cloned()
            .ok_or_else(|| Error::Malformed("prevision lacks \"kind\"".into()))
            .and_then(|k| serde_json::from_value(k).map_err(|e| Error::Malformed(e.to_string())))?;
        let gens = value
            .get("generators")
            .and_then(|g| g.as_array())
            .ok_or_else(|| Error::Malformed("prevision lacks \"generators\"".into()))?;
        let gens = gens
            .iter()
            .map(|g| SimpleValuation::from_json(space, g))
            .collect::<Result<Vec<_>>>()?;
        GenPrevision::new(kind, gens)
    }
}

pub fn eval_prevision(f: &GenPrevision, h: &ExtFunc) -> Result<ExtRat> {
    if f.universe() != h.len() {
        return Err(Error::SpaceMismatch);
    }
    let values = f.generators.iter().map(|g| integrate(g, h));
    Ok(match f.kind {
        PrevisionKind::Sublinear => values.max(),
        PrevisionKind::Superlinear => values.min(),
    }
    .expect("generators are nonempty"))
}

fn check_bound(bound: Option<&Rational>) -> Result<()> {
    match bound {
        Some(a) if !a.is_positive() => Err(Error::InvalidBound),
        _ => Ok(()),
    }
}

fn gap(g: &SimpleValuation, g2: &SimpleValuation) -> Vec<Rational> {
    g.dense().into_iter().zip(g2.dense()).map(|(a, b)| a - b).collect()
}

/// `sup_h min_k c_k . h` over `alpha`-Lipschitz `h` with `0 <= h (<= a)`.
/// The value is at least 0, attained by `h = 0`.
fn max_min_linear(space: &QSpace, forms: &[Vec<Rational>], alpha: &Rational, bound: Option<&Rational>) -> Result<ExtRat> {
    let n = space.len();
    let len = n + 1;
    let mut objective = vec![Rational::zero(); len];
    objective[n] = Rational::one();
    let mut lp = LpProblem::maximize(objective);
    for c in forms {
        let mut row: Vec<Rational> = c.iter().map(|q| -q).collect();
        row.push(Rational::one());
        lp.leq(row, Rational::zero());
    }
    for (u, v, d) in lipschitz_rows(space, alpha) {
        lp.leq(difference_row(len, 0, u, v), d);
    }
    if let Some(a) = bound {
        for x in space.points() {
            lp.upper(x, a.clone());
        }
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => Ok(ExtRat::finite(sol.value)),
        LpOutcome::Unbounded { .. } => Ok(ExtRat::inf()),
        LpOutcome::Infeasible { .. } => Err(Error::DegenerateInstance("h = 0 reported infeasible".into())),
    }
}

fn check_pair(space: &QSpace, a: &GenPrevision, b: &GenPrevision, kind: PrevisionKind) -> Result<()> {
    if a.kind != kind || b.kind != kind {
        return Err(Error::KindMismatch);
    }
    if a.universe() != space.len() || b.universe() != space.len() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// `sup_h (max_j G_j(h) - max_k G'_k(h))`, as the max over `j` of one LP
/// each. Bounded by `a` when given; `inf` can only occur without a bound.
pub fn dkrh_sublinear(space: &QSpace, a: &GenPrevision, b: &GenPrevision, bound: Option<&Rational>) -> Result<ExtRat> {
    check_pair(space, a, b, PrevisionKind::Sublinear)?;
    check_bound(bound)?;
    let mut best = ExtRat::zero();
    for g in &a.generators {
        let forms: Vec<_> = b.generators.iter().map(|g2| gap(g, g2)).collect();
        best = best.max(max_min_linear(space, &forms, &Rational::one(), bound)?);
    }
    Ok(best)
}

/// `sup_h (min_j G_j(h) - min_k G'_k(h))`, as the max over `k` of one LP
/// each.
pub fn dkrh_superlinear(space: &QSpace, a: &GenPrevision, b: &GenPrevision, bound: Option<&Rational>) -> Result<ExtRat> {
    check_pair(space, a, b, PrevisionKind::Superlinear)?;
    check_bound(bound)?;
    let mut best = ExtRat::zero();
    for g2 in &b.generators {
        let forms: Vec<_> = a.generators.iter().map(|g| gap(g, g2)).collect();
        best = best.max(max_min_linear(space, &forms, &Rational::one(), bound)?);
    }
    Ok(best)
}

/// A superlinear lower part and a sublinear upper part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fork {
    lower: GenPrevision,
    upper: GenPrevision,
}

impl Fork {
    /// Checks kinds and spaces. Walley's condition is not checked here; see
    /// [`check_walley`].
    pub fn new(lower: GenPrevision, upper: GenPrevision) -> Result<Fork> {
        if lower.kind != PrevisionKind::Superlinear || upper.kind != PrevisionKind::Sublinear {
            return Err(Error::KindMismatch);
        }
        if lower.universe() != upper.universe() {
            return Err(Error::SpaceMismatch);
        }
        Ok(Fork { lower, upper })
    }

    /// No checks at all, for building deliberately broken forks.
    pub fn new_unchecked(lower: GenPrevision, upper: GenPrevision) -> Fork {
        Fork { lower, upper }
    }

    pub fn lower(&self) -> &GenPrevision {
        &self.lower
    }

    pub fn upper(&self) -> &GenPrevision {
        &self.upper
    }

    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        serde_json::json!({ "lower": self.lower.to_json(space), "upper": self.upper.to_json(space) })
    }

    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<Fork> {
        let part = |k: &str| {
            value
                .get(k)
                .ok_or_else(|| Error::Malformed(format!("fork lacks {:?}", k)))
                .and_then(|v| GenPrevision::from_json(space, v))
        };
        Fork::new(part("lower")?, part("upper")?)
    }
}

/// `max(d(F-, F'-), d(F+, F'+))`.
pub fn fork_distance(space: &QSpace, f: &Fork, f2: &Fork, bound: Option<&Rational>) -> Result<ExtRat> {
    let lower = dkrh_superlinear(space, &f.lower, &f2.lower, bound)?;
    let upper = dkrh_sublinear(space, &f.upper, &f2.upper, bound)?;
    Ok(lower.max(upper))
}

/// `(F_Q, F^C)`: the lower part is the min over Dirac masses on `Q`, the
/// upper part the max over Dirac masses on `C`. Walley's condition is
/// probed on `probes` and any violation is an error.
pub fn fork_from_lens(space: &QSpace, lens: &QuasiLens, probes: &[(ExtFunc, ExtFunc)]) -> Result<Fork> {
    let n = space.len();
    let fork = Fork::new(
        GenPrevision::dirac(PrevisionKind::Superlinear, n, lens.q().iter()),
        GenPrevision::dirac(PrevisionKind::Sublinear, n, lens.c().iter()),
    )?;
    let report = check_walley(&fork, probes)?;
    match report.violations.first() {
        None => Ok(fork),
        Some(w) => Err(Error::WalleyViolation(w.describe(space))),
    }
}

/// `inf_{x in Q ∩ C} h(x)`, the alternative form of the lower part of a
/// lens-derived fork.
pub fn lens_lower_alt(lens: &QuasiLens, h: &ExtFunc) -> ExtRat {
    lens.core().iter().map(|x| h.get(x).clone()).min().unwrap_or_else(ExtRat::inf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalleySide {
    /// `F-(h + h') <= F-(h) + F+(h')` fails.
    Left,
    /// `F-(h) + F+(h') <= F+(h + h')` fails.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalleyWitness {
    pub h: ExtFunc,
    pub h2: ExtFunc,
    pub side: WalleySide,
}

impl WalleyWitness {
    pub fn describe(&self, space: &QSpace) -> String {
        format!("{:?} inequality fails at h = {}, h' = {}", self.side, self.h.to_json(space), self.h2.to_json(space))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalleyReport {
    pub checked: usize,
    pub violations: Vec<WalleyWitness>,
}

impl WalleyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates both Walley inequalities on every probe pair.
pub fn check_walley(fork: &Fork, probes: &[(ExtFunc, ExtFunc)]) -> Result<WalleyReport> {
    let mut report = WalleyReport::default();
    for (h, h2) in probes {
        let sum = h.add(h2);
        let lo_sum = eval_prevision(&fork.lower, &sum)?;
        let mid = eval_prevision(&fork.lower, h)? + eval_prevision(&fork.upper, h2)?;
        let hi_sum = eval_prevision(&fork.upper, &sum)?;
        report.checked += 1;
        if lo_sum > mid {
            report.violations.push(WalleyWitness {
                h: h.clone(),
                h2: h2.clone(),
                side: WalleySide::Left,
            });
        }
        if mid > hi_sum {
            report.violations.push(WalleyWitness {
                h: h.clone(),
                h2: h2.clone(),
                side: WalleySide::Right,
            });
        }
    }
    Ok(report)
}

/// Every monotone function with values in `{0, step, 2 step, ..., top}`.
/// Returns `None` above 4 points.
pub fn monotone_grid_functions(space: &QSpace, step: &Rational, top: &Rational) -> Option<Vec<ExtFunc>> {
    if space.len() > 4 || !step.is_positive() {
        return None;
    }
    let mut grid = vec![Rational::zero()];
    while grid.last().expect("nonempty") + step <= *top {
        let next = grid.last().expect("nonempty") + step;
        grid.push(next);
    }
    let n = space.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let f = ExtFunc::new(idx.iter().map(|&i| ExtRat::finite(grid[i].clone())).collect());
        if crate::lipschitz::is_monotone(space, &f) {
            out.push(f);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Some(out);
            }
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// All ordered pairs of the grid functions above.
pub fn exhaustive_walley_probes(space: &QSpace, step: &Rational, top: &Rational) -> Option<Vec<(ExtFunc, ExtFunc)>> {
    let fs = monotone_grid_functions(space, step, top)?;
    Some(fs.iter().flat_map(|h| fs.iter().map(move |h2| (h.clone(), h2.clone()))).collect())
}

/// `F(envelope(h, alpha))` for an `alpha`-Lipschitz `h`.
pub fn extend_prevision(space: &QSpace, f: &GenPrevision, h: &ExtFunc, alpha: &Rational) -> Result<ExtRat> {
    if !alpha.is_positive() {
        return Err(Error::InvalidBound);
    }
    if h.len() != space.len() {
        return Err(Error::SpaceMismatch);
    }
    if !is_alpha_lipschitz(space, h, alpha) {
        return Err(Error::NotLipschitz(alpha.to_string()));
    }
    eval_prevision(f, &envelope(space, h, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Sublinear side: forms `G - G'_k`.
    AN,
    /// Superlinear side: forms `G'_k - G`.
    DN,
}

/// Both orders of `sup_h min_{p in hull}` for the bilinear form
/// `p, h |-> sum_k p_k (±(G - G'_k)) . h`, with `h` ranging over the
/// `alpha`-Lipschitz maps into `[0, a]`.
///
/// `lhs` solves `max t` subject to `t <= M_k . h` directly; `rhs` takes
/// `min_p max_h` through the saddle-point solver.
pub fn minimax_check(
    space: &QSpace,
    g: &SimpleValuation,
    gens: &[SimpleValuation],
    side: Side,
    a: &Rational,
    alpha: &Rational,
) -> Result<(Rational, Rational)> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerator);
    }
    if !a.is_positive() || !alpha.is_positive() {
        return Err(Error::InvalidBound);
    }
    if g.universe() != space.len() || gens.iter().any(|k| k.universe() != space.len()) {
        return Err(Error::SpaceMismatch);
    }
    let m: Vec<Vec<Rational>> = gens
        .iter()
        .map(|k| match side {
            Side::AN => gap(g, k),
            Side::DN => gap(k, g),
        })
        .collect();
    let lhs = max_min_linear(space, &m, alpha, Some(a))?
        .as_finite()
        .cloned()
        .ok_or_else(|| Error::DegenerateInstance("bounded problem reported unbounded".into()))?;

    let n = space.len();
    let mut q = Polytope::new(n);
    for (u, v, d) in lipschitz_rows(space, alpha) {
        q.push(difference_row(n, 0, u, v), Relation::Leq, d);
    }
    for x in space.points() {
        let mut row = vec![Rational::zero(); n];
        row[x] = Rational::one();
        q.push(row, Relation::Leq, a.clone());
    }
    let rhs = solve_saddle(&m, &Polytope::simplex(gens.len()), &q).map_err(|e| match e {
        LpError::EmptyPolytope => Error::DegenerateInstance("empty polytope".into()),
        other => Error::Lp(other),
    })?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{s2, s3};
    use crate::powerdomains::{dh, dp, dq, make_quasi_lens};
    use crate::sets::PointSet;
    use qmet_lp::{int, ratio};

    fn h(vals: &[&str]) -> ExtFunc {
        ExtFunc::new(vals.iter().map(|s| s.parse().unwrap()).collect())
    }

    fn dirac(kind: PrevisionKind, pts: &[usize]) -> GenPrevision {
        GenPrevision::dirac(kind, 3, pts.iter().copied())
    }

    #[test]
    fn eval_examples() {
        let g = h(&["3", "0", "5"]);
        let single = dirac(PrevisionKind::Sublinear, &[2]);
        assert_eq!(eval_prevision(&single, &g).unwrap(), ExtRat::int(5));
        assert_eq!(eval_prevision(&dirac(PrevisionKind::Sublinear, &[0, 1]), &g).unwrap(), ExtRat::int(3));
        assert_eq!(eval_prevision(&dirac(PrevisionKind::Superlinear, &[0, 1]), &g).unwrap(), ExtRat::zero());
        assert_eq!(eval_prevision(&single, &h(&["1", "1"])), Err(Error::SpaceMismatch));
    }

    #[test]
    fn constructor_checks() {
        assert_eq!(GenPrevision::new(PrevisionKind::Sublinear, vec![]), Err(Error::EmptyGenerator));
        let heavy = SimpleValuation::new(3, [(0, int(2))]).unwrap();
        assert_eq!(GenPrevision::new(PrevisionKind::Sublinear, vec![heavy]), Err(Error::NotNormalized));
        let a = dirac(PrevisionKind::Sublinear, &[0]);
        assert_eq!(dkrh_superlinear(&s3(), &a, &a, None), Err(Error::KindMismatch));
    }

    #[test]
    fn dirac_distances_match_powerdomains() {
        let s = s3();
        let one = int(1);
        for (c, c2) in [(vec![0], vec![1]), (vec![0, 1], vec![2]), (vec![], vec![0]), (vec![2], vec![])] {
            let sub = dkrh_sublinear(&s, &dirac(PrevisionKind::Sublinear, &c), &dirac(PrevisionKind::Sublinear, &c2), Some(&one));
            let cs = PointSet::from_indices(3, c.iter().copied());
            let cs2 = PointSet::from_indices(3, c2.iter().copied());
            assert_eq!(sub.unwrap(), dh(&s, &cs, &cs2, Some(&one)));
            if !c.is_empty() && !c2.is_empty() {
                let sup = dkrh_superlinear(
                    &s,
                    &dirac(PrevisionKind::Superlinear, &c),
                    &dirac(PrevisionKind::Superlinear, &c2),
                    Some(&one),
                );
                assert_eq!(sup.unwrap(), dq(&s, &cs, &cs2, Some(&one)).unwrap());
            }
        }
        let a = dirac(PrevisionKind::Sublinear, &[0, 2]);
        assert!(dkrh_sublinear(&s, &a, &a, Some(&one)).unwrap().is_zero());
        assert!(dkrh_sublinear(&s, &a, &dirac(PrevisionKind::Sublinear, &[]), None).unwrap().is_inf());
    }

    #[test]
    fn lens_forks() {
        let s = s3();
        let probes = exhaustive_walley_probes(&s, &int(1), &int(2)).unwrap();
        let l = make_quasi_lens(&s, &PointSet::from_indices(3, [0, 1])).unwrap();
        let l2 = make_quasi_lens(&s, &PointSet::from_indices(3, [2])).unwrap();
        let f = fork_from_lens(&s, &l, &probes).unwrap();
        let f2 = fork_from_lens(&s, &l2, &probes).unwrap();
        for a in [ratio(1, 2), int(1), int(3)] {
            assert_eq!(fork_distance(&s, &f, &f2, Some(&a)).unwrap(), dp(&s, &l, &l2, Some(&a)).unwrap());
        }
        assert!(fork_distance(&s, &f, &f, Some(&int(1))).unwrap().is_zero());
        for (g, _) in &probes {
            assert_eq!(eval_prevision(f.lower(), g).unwrap(), lens_lower_alt(&l, g));
        }
    }

    #[test]
    fn swapped_fork_is_caught() {
        let s = s2();
        let probes = exhaustive_walley_probes(&s, &int(1), &int(1)).unwrap();
        let l = make_quasi_lens(&s, &PointSet::full(2)).unwrap();
        let f = fork_from_lens(&s, &l, &probes).unwrap();
        let swapped = Fork::new_unchecked(f.upper().clone(), f.lower().clone());
        let report = check_walley(&swapped, &probes).unwrap();
        assert!(!report.passed());
        let witness = (h(&["0", "1"]), ExtFunc::zero(2));
        assert!(!check_walley(&swapped, &[witness]).unwrap().passed());
    }

    #[test]
    fn zero_probe_reduces_to_order() {
        let s = s3();
        let l = make_quasi_lens(&s, &PointSet::from_indices(3, [0, 2])).unwrap();
        let f = fork_from_lens(&s, &l, &[]).unwrap();
        let g = h(&["1", "4", "2"]);
        let report = check_walley(&f, &[(g.clone(), ExtFunc::zero(3))]).unwrap();
        assert!(report.passed());
        assert!(eval_prevision(f.lower(), &g).unwrap() <= eval_prevision(f.upper(), &g).unwrap());
    }

    #[test]
    fn extension_examples() {
        let s = s3();
        let f = dirac(PrevisionKind::Sublinear, &[0, 1]);
        let g = h(&["1", "0", "0"]);
        assert_eq!(extend_prevision(&s, &f, &g, &int(1)).unwrap(), eval_prevision(&f, &g).unwrap());
        assert_eq!(extend_prevision(&s, &f, &g, &int(2)).unwrap(), extend_prevision(&s, &f, &g, &int(1)).unwrap());
        assert!(matches!(extend_prevision(&s, &f, &h(&["3", "0", "0"]), &int(1)), Err(Error::NotLipschitz(_))));
        let half = GenPrevision::new(
            PrevisionKind::Superlinear,
            vec![SimpleValuation::new(3, [(1, ratio(1, 2))]).unwrap()],
        )
        .unwrap();
        assert_eq!(extend_prevision(&s, &half, &h(&["4", "4", "4"]), &int(1)).unwrap(), ExtRat::int(2));
    }

    #[test]
    fn minimax_examples() {
        let s = s3();
        let g = SimpleValuation::dirac(3, 0);
        let gens = [SimpleValuation::dirac(3, 1), SimpleValuation::dirac(3, 2)];
        for side in [Side::AN, Side::DN] {
            let (l, r) = minimax_check(&s, &g, &gens, side, &int(1), &int(1)).unwrap();
            assert_eq!(l, r);
            let (l, r) = minimax_check(&s, &g, &gens[..1], side, &int(1), &int(1)).unwrap();
            assert_eq!(l, r);
            let (l, r) = minimax_check(&s, &g, &[g.clone()], side, &int(1), &int(1)).unwrap();
            assert!(l.is_zero() && r.is_zero());
        }
        assert_eq!(minimax_check(&s, &g, &[], Side::AN, &int(1), &int(1)), Err(Error::EmptyGenerator));
    }

    #[test]
    fn json_roundtrip() {
        let s = s3();
        let l = make_quasi_lens(&s, &PointSet::from_indices(3, [1])).unwrap();
        let f = fork_from_lens(&s, &l, &[]).unwrap();
        let j = f.to_json(&s);
        assert_eq!(Fork::from_json(&s, &j).unwrap(), f);
        assert_eq!(j["lower"]["kind"], "superlinear");
        let swapped = serde_json::json!({"lower": j["upper"], "upper": j["lower"]});
        assert_eq!(Fork::from_json(&s, &swapped), Err(Error::KindMismatch));
    }
}
