//! Hoare, Smyth and Plotkin quasi-metrics on subsets of a finite space.
//!
//! Lower sets carry `dH(C, C') = sup_{x in C} d(x, C')`, nonempty upper sets
//! carry `dQ(Q, Q') = sup_{x' in Q'} min_{x in Q} d(x, x')`, and quasi-lenses
//! `(Q, C)` carry `dP = max(dQ, dH)`. Each has a variant bounded by `a`,
//! obtained by clamping.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lipschitz::dist_to_closed;
use crate::sets::{is_lower, is_upper, lower_closure, upper_closure, PointSet};
use crate::{ExtRat, QSpace, Rational};

fn clamp(v: ExtRat, bound: Option<&Rational>) -> ExtRat {
    match bound {
        Some(a) => v.cap(a),
        None => v,
    }
}

/// Hoare quasi-metric; the empty sup is 0.
pub fn dh(space: &QSpace, c: &PointSet, c2: &PointSet, bound: Option<&Rational>) -> ExtRat {
    let v = c.iter().map(|x| dist_to_closed(space, x, c2)).max().unwrap_or_else(ExtRat::zero);
    clamp(v, bound)
}

/// `d(Q, x') = min_{x in Q} d(x, x')`.
pub fn dist_from_set(space: &QSpace, q: &PointSet, x: usize) -> ExtRat {
    q.iter().map(|y| space.d(y, x).clone()).min().unwrap_or_else(ExtRat::inf)
}

/// Smyth quasi-metric on nonempty sets.
pub fn dq(space: &QSpace, q: &PointSet, q2: &PointSet, bound: Option<&Rational>) -> Result<ExtRat> {
    if q.is_empty() || q2.is_empty() {
        return Err(Error::EmptySmythElement);
    }
    let v = q2.iter().map(|x| dist_from_set(space, q, x)).max().expect("nonempty");
    Ok(clamp(v, bound))
}

/// Plotkin quasi-metric `max(dQ, dH)`, each component bounded when `a` given.
pub fn dp(space: &QSpace, l: &QuasiLens, l2: &QuasiLens, bound: Option<&Rational>) -> Result<ExtRat> {
    Ok(dq(space, &l.q, &l2.q, bound)?.max(dh(space, &l.c, &l2.c, bound)))
}

/// The classical two-sided Hausdorff distance between nonempty sets.
pub fn hausdorff(space: &QSpace, e: &PointSet, e2: &PointSet) -> ExtRat {
    let one_sided = |a: &PointSet, b: &PointSet| {
        a.iter().map(|x| dist_to_closed(space, x, b)).max().unwrap_or_else(ExtRat::zero)
    };
    one_sided(e, e2).max(one_sided(e2, e))
}

/// `(C, r) <= (C', r')`: `r >= r'` and every `x in C` lies within `r - r'`
/// of `C'`.
pub fn ball_leq_h(space: &QSpace, lhs: (&PointSet, &Rational), rhs: (&PointSet, &Rational)) -> bool {
    let gap = lhs.1 - rhs.1;
    !gap.is_negative() && lhs.0.iter().all(|x| dist_to_closed(space, x, rhs.0).le_rat(&gap))
}

/// `(Q, r) <= (Q', r')`: `r >= r'` and every `x' in Q'` lies within
/// `r - r'` of some `x in Q`.
pub fn ball_leq_q(space: &QSpace, lhs: (&PointSet, &Rational), rhs: (&PointSet, &Rational)) -> bool {
    let gap = lhs.1 - rhs.1;
    !gap.is_negative()
        && rhs
            .0
            .iter()
            .all(|x2| lhs.0.iter().any(|x| space.d(x, x2).le_rat(&gap)))
}

/// A pair `(Q, C)` of an upper set and a lower set meeting in a set that
/// generates both.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiLens {
    q: PointSet,
    c: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum LensViolation {
    QNotUpper,
    CNotLower,
    EmptyIntersection,
    /// `Q` is not contained in `↑(Q ∩ C)`; names a witness.
    QNotGenerated { x: String },
    /// `C` is not contained in `↓(Q ∩ C)`; names a witness.
    CNotGenerated { x: String },
}

impl QuasiLens {
    /// Validates and builds.
    pub fn new(space: &QSpace, q: PointSet, c: PointSet) -> Result<QuasiLens> {
        let violations = validate_quasi_lens(space, &q, &c);
        if violations.is_empty() {
            Ok(QuasiLens { q, c })
        } else {
            let text = violations
                .iter()
                .map(|v| serde_json::to_string(v).expect("violation serializes"))
                .collect::<Vec<_>>()
                .join(", ");
            Err(Error::InvalidLens(text))
        }
    }

    pub fn q(&self) -> &PointSet {
        &self.q
    }

    pub fn c(&self) -> &PointSet {
        &self.c
    }

    pub fn core(&self) -> PointSet {
        self.q.intersection(&self.c)
    }

    /// `{"Q": [...], "C": [...]}`.
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        serde_json::json!({ "Q": self.q.to_json(space), "C": self.c.to_json(space) })
    }

    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<QuasiLens> {
        let part = |k: &str| {
            value
                .get(k)
                .ok_or_else(|| Error::Malformed(format!("lens lacks {:?}", k)))
                .and_then(|v| PointSet::from_json(space, v))
        };
        QuasiLens::new(space, part("Q")?, part("C")?)
    }
}

/// `(↑E, ↓E)`.
pub fn make_quasi_lens(space: &QSpace, pts: &PointSet) -> Result<QuasiLens> {
    if pts.is_empty() {
        return Err(Error::EmptyGenerator);
    }
    Ok(QuasiLens {
        q: upper_closure(space, pts),
        c: lower_closure(space, pts),
    })
}

/// Every failed quasi-lens condition. The neighbourhood condition
/// `C ⊆ cl(U ∩ C)` is tested at the least open `U ⊇ Q`, namely `Q` itself.
pub fn validate_quasi_lens(space: &QSpace, q: &PointSet, c: &PointSet) -> Vec<LensViolation> {
    let mut out = Vec::new();
    if !is_upper(space, q) {
        out.push(LensViolation::QNotUpper);
    }
    if !is_lower(space, c) {
        out.push(LensViolation::CNotLower);
    }
    let core = q.intersection(c);
    if core.is_empty() {
        out.push(LensViolation::EmptyIntersection);
    }
    let up = upper_closure(space, &core);
    if let Some(x) = q.iter().find(|&x| !up.contains(x)) {
        out.push(LensViolation::QNotGenerated {
            x: space.label(x).to_string(),
        });
    }
    let down = lower_closure(space, &core);
    if let Some(x) = c.iter().find(|&x| !down.contains(x)) {
        out.push(LensViolation::CNotGenerated {
            x: space.label(x).to_string(),
        });
    }
    out
}

/// The neighbourhood condition quantified over every open `U ⊇ Q`:
/// `C ⊆ ↓(U ∩ C)`. Exponential in the number of points.
pub fn neighbourhood_condition_all_opens(space: &QSpace, q: &PointSet, c: &PointSet) -> bool {
    PointSet::all_subsets(space.len())
        .filter(|u| q.is_subset(u) && is_upper(space, u))
        .all(|u| c.is_subset(&lower_closure(space, &u.intersection(c))))
}
