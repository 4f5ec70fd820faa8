//! Functions `X -> [0, inf]`, Lipschitz tests and envelopes.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::sets::PointSet;
use crate::{ExtRat, QSpace, Rational};

/// A function on the points of a space, indexed by point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtFunc {
    values: Vec<ExtRat>,
}

impl ExtFunc {
    pub fn new(values: Vec<ExtRat>) -> Self {
        ExtFunc { values }
    }

    pub fn constant(n: usize, v: ExtRat) -> Self {
        ExtFunc { values: vec![v; n] }
    }

    pub fn zero(n: usize) -> Self {
        ExtFunc::constant(n, ExtRat::zero())
    }

    /// Indicator of `set` scaled by `v`.
    pub fn indicator(set: &PointSet, v: ExtRat) -> Self {
        ExtFunc {
            values: (0..set.universe())
                .map(|x| if set.contains(x) { v.clone() } else { ExtRat::zero() })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: usize) -> &ExtRat {
        &self.values[x]
    }

    pub fn values(&self) -> &[ExtRat] {
        &self.values
    }

    pub fn map2(&self, other: &ExtFunc, f: impl Fn(&ExtRat, &ExtRat) -> ExtRat) -> ExtFunc {
        ExtFunc {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &ExtFunc) -> ExtFunc {
        self.map2(other, |a, b| a + b)
    }

    pub fn min(&self, other: &ExtFunc) -> ExtFunc {
        self.map2(other, |a, b| a.clone().min(b.clone()))
    }

    pub fn max(&self, other: &ExtFunc) -> ExtFunc {
        self.map2(other, |a, b| a.clone().max(b.clone()))
    }

    pub fn scale(&self, k: &Rational) -> ExtFunc {
        ExtFunc {
            values: self.values.iter().map(|v| v.weight(k)).collect(),
        }
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &ExtFunc) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(ExtRat::is_finite)
    }

    /// `{"label": "p/q" | "inf"}`.
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        let map: BTreeMap<&str, String> = space
            .points()
            .map(|x| (space.label(x), self.values[x].to_string()))
            .collect();
        serde_json::to_value(map).expect("function serializes")
    }

    /// Missing labels default to 0.
    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<ExtFunc> {
        let map: BTreeMap<String, ExtRat> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        let mut f = ExtFunc::zero(space.len());
        for (l, v) in map {
            f.values[space.index_of(&l)?] = v;
        }
        Ok(f)
    }
}

/// `dreal(f(x), f(y)) <= alpha * d(x, y)` for all pairs, with `0 * inf = inf`.
pub fn is_alpha_lipschitz(space: &QSpace, f: &ExtFunc, alpha: &Rational) -> bool {
    space.points().all(|x| {
        space
            .points()
            .all(|y| f.get(x).dreal(f.get(y)) <= space.d(x, y).scale(alpha))
    })
}

/// The largest `alpha`-Lipschitz map below `f`:
/// `f^alpha(x) = min_z (f(z) + alpha * d(x, z))`.
///
/// With `alpha = 0` the convention `0 * inf = inf` makes this the minimum of
/// `f` over the points at finite distance from `x`.
pub fn envelope(space: &QSpace, f: &ExtFunc, alpha: &Rational) -> ExtFunc {
    assert!(!alpha.is_negative(), "negative Lipschitz constant");
    ExtFunc::new(
        space
            .points()
            .map(|x| {
                space
                    .points()
                    .map(|z| f.get(z) + &space.d(x, z).scale(alpha))
                    .min()
                    .expect("nonempty space")
            })
            .collect(),
    )
}

/// `y |-> max(b - d(x, y), 0)`; for `b = inf`, `inf` at finite distance and
/// `0` elsewhere.
pub fn sea(space: &QSpace, x: usize, b: &ExtRat) -> ExtFunc {
    ExtFunc::new(
        space
            .points()
            .map(|y| match (b.as_finite(), space.d(x, y).as_finite()) {
                (_, None) => ExtRat::zero(),
                (None, Some(_)) => ExtRat::inf(),
                (Some(b), Some(d)) => {
                    if d < b {
                        ExtRat::finite(b - d)
                    } else {
                        ExtRat::zero()
                    }
                }
            })
            .collect(),
    )
}

/// Lower bounds `f(x_i) >= b_i` at distinct points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzConstraintSet {
    pairs: Vec<(usize, ExtRat)>,
}

impl LipschitzConstraintSet {
    pub fn new(pairs: Vec<(usize, ExtRat)>) -> Result<Self> {
        for (i, (x, _)) in pairs.iter().enumerate() {
            if pairs[..i].iter().any(|(y, _)| y == x) {
                return Err(Error::Malformed(format!("point {} constrained twice", x)));
            }
        }
        Ok(LipschitzConstraintSet { pairs })
    }

    pub fn pairs(&self) -> &[(usize, ExtRat)] {
        &self.pairs
    }
}

/// The smallest 1-Lipschitz map meeting every constraint: the pointwise max
/// of the `sea(x_i, b_i)`.
pub fn min_lip_above(space: &QSpace, constraints: &LipschitzConstraintSet) -> ExtFunc {
    constraints
        .pairs
        .iter()
        .fold(ExtFunc::zero(space.len()), |acc, (x, b)| acc.max(&sea(space, *x, b)))
}

/// `min_{y in set} d(x, y)`, `inf` on the empty set.
pub fn dist_to_closed(space: &QSpace, x: usize, set: &PointSet) -> ExtRat {
    set.iter().map(|y| space.d(x, y).clone()).min().unwrap_or_else(ExtRat::inf)
}

/// The step approximant `f_K^(alpha)` built from the superlevel sets
/// `U_k = { f >= k / 2^K }`, `k = 1..K 2^K`:
///
/// `min( min_k ((k-1)/2^K + alpha * d(x, X \ U_k)), K )`.
///
/// The result is the largest `alpha`-Lipschitz map below the dyadic step
/// function `min(floor(2^K f) / 2^K, K)`.
pub fn step_envelope(space: &QSpace, f: &ExtFunc, alpha: &Rational, k: u32) -> Result<ExtFunc> {
    if !alpha.is_positive() {
        return Err(Error::InvalidBound);
    }
    let scale = Rational::from_integer((1u64 << k).into());
    let cap = ExtRat::finite(Rational::from_integer(k.into()));
    let levels = u64::from(k) << k;
    let mut out = vec![cap; space.len()];
    for level in 1..=levels {
        let threshold = ExtRat::finite(Rational::from_integer(level.into()) / &scale);
        let outside = PointSet::from_indices(space.len(), space.points().filter(|&x| *f.get(x) < threshold));
        let base = Rational::from_integer((level - 1).into()) / &scale;
        for x in space.points() {
            let v = &dist_to_closed(space, x, &outside).scale(alpha) + &base;
            if v < out[x] {
                out[x] = v;
            }
        }
    }
    Ok(ExtFunc::new(out))
}

/// True iff every superlevel set `{f >= t}` is upward closed, i.e. `f` is
/// monotone for the specialization order.
pub fn is_monotone(space: &QSpace, f: &ExtFunc) -> bool {
    space
        .points()
        .all(|x| space.points().all(|y| !space.specialization_leq(x, y) || f.get(x) <= f.get(y)))
}

/// The finite constraints `h(u) - h(v) <= alpha * d(u, v)` cutting out the
/// `alpha`-Lipschitz maps among finite-valued `h`. Pairs at distance `inf`
/// impose nothing.
pub fn lipschitz_rows(space: &QSpace, alpha: &Rational) -> Vec<(usize, usize, Rational)> {
    let mut rows = Vec::new();
    for u in space.points() {
        for v in space.points() {
            if u != v {
                if let Some(d) = space.d(u, v).as_finite() {
                    rows.push((u, v, d * alpha));
                }
            }
        }
    }
    rows
}

/// The unit vector difference `e_u - e_v` in `len` coordinates, placed at
/// `offset`.
pub(crate) fn difference_row(len: usize, offset: usize, u: usize, v: usize) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); len];
    row[offset + u] = Rational::from_integer(1.into());
    row[offset + v] = Rational::from_integer((-1).into());
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{s2, s3};
    use qmet_lp::int;

    fn f(vals: &[&str]) -> ExtFunc {
        ExtFunc::new(vals.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn lipschitz_examples() {
        assert!(is_alpha_lipschitz(&s2(), &f(&["0", "5"]), &int(1)));
        assert!(is_alpha_lipschitz(&s3(), &f(&["2", "2", "2"]), &int(0)));
        assert!(!is_alpha_lipschitz(&s3(), &f(&["3", "0", "0"]), &int(1)));
        // On S2 the zero-cost direction is p -> q only through the finite edge.
        assert!(!is_alpha_lipschitz(&s2(), &f(&["5", "0"]), &int(1)));
    }

    #[test]
    fn envelope_examples() {
        let g = f(&["0", "5"]);
        assert_eq!(envelope(&s2(), &g, &int(1)), g);
        assert_eq!(envelope(&s3(), &f(&["3", "0", "0"]), &int(1)), f(&["1", "0", "0"]));
    }

    #[test]
    fn zero_alpha_envelope_takes_reachable_minimum() {
        // S2: from p both points are at finite distance, from q only q.
        assert_eq!(envelope(&s2(), &f(&["4", "1"]), &int(0)), f(&["1", "1"]));
        assert_eq!(envelope(&s2(), &f(&["1", "4"]), &int(0)), f(&["1", "4"]));
    }

    #[test]
    fn sea_examples() {
        let s = s3();
        assert_eq!(sea(&s, 0, &ExtRat::int(2)).get(1), &ExtRat::int(1));
        assert_eq!(sea(&s, 1, &ExtRat::zero()), ExtFunc::zero(3));
        let t = s2();
        assert!(sea(&t, 0, &ExtRat::inf()).get(1).is_inf());
        assert!(sea(&t, 1, &ExtRat::inf()).get(0).is_zero());
    }

    #[test]
    fn min_lip_above_examples() {
        let s = s3();
        let one = LipschitzConstraintSet::new(vec![(0, ExtRat::int(2))]).unwrap();
        assert_eq!(min_lip_above(&s, &one), sea(&s, 0, &ExtRat::int(2)));
        let none = LipschitzConstraintSet::new(vec![]).unwrap();
        assert_eq!(min_lip_above(&s, &none), ExtFunc::zero(3));
        let two = LipschitzConstraintSet::new(vec![(0, ExtRat::int(2)), (2, ExtRat::int(2))]).unwrap();
        assert_eq!(min_lip_above(&s, &two), f(&["2", "1", "2"]));
        assert!(LipschitzConstraintSet::new(vec![(0, ExtRat::int(1)), (0, ExtRat::int(2))]).is_err());
    }

    #[test]
    fn dist_to_closed_examples() {
        let s = s3();
        assert_eq!(dist_to_closed(&s, 0, &PointSet::from_indices(3, [1])), ExtRat::int(1));
        assert!(dist_to_closed(&s, 0, &PointSet::from_indices(3, [0, 2])).is_zero());
        assert!(dist_to_closed(&s, 0, &PointSet::empty(3)).is_inf());
    }

    #[test]
    fn step_envelope_examples() {
        let s = s3();
        assert_eq!(step_envelope(&s, &f(&["1", "1", "1"]), &int(1), 1).unwrap(), f(&["1", "1", "1"]));
        assert_eq!(step_envelope(&s, &ExtFunc::zero(3), &int(1), 4).unwrap(), ExtFunc::zero(3));
        let g = f(&["3", "0", "0"]);
        for k in 3..6 {
            assert_eq!(step_envelope(&s, &g, &int(1), k).unwrap(), envelope(&s, &g, &int(1)));
        }
        assert_eq!(step_envelope(&s, &g, &int(0), 3), Err(Error::InvalidBound));
    }

    #[test]
    fn json_shape() {
        let s = s2();
        let g = f(&["1/2", "inf"]);
        assert_eq!(g.to_json(&s).to_string(), r#"{"p":"1/2","q":"inf"}"#);
        assert_eq!(ExtFunc::from_json(&s, &g.to_json(&s)).unwrap(), g);
    }
}
