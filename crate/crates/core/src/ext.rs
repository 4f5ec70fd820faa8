//! Nonnegative rationals extended with `+inf`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Finite(Rational),
    Infinite,
}

/// An element of `[0, +inf]` with exact rational finite part.
///
/// Addition and comparison are total; `+inf` is the top element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtRat(Repr);

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat(Repr::Finite(Rational::zero()))
    }

    pub fn inf() -> Self {
        ExtRat(Repr::Infinite)
    }

    /// Panics on negative input.
    pub fn finite(q: Rational) -> Self {
        assert!(!q.is_negative(), "negative value {} in ExtRat", q);
        ExtRat(Repr::Finite(q))
    }

    pub fn try_finite(q: Rational) -> Option<Self> {
        (!q.is_negative()).then_some(ExtRat(Repr::Finite(q)))
    }

    pub fn int(v: u64) -> Self {
        ExtRat::finite(Rational::from_integer(v.into()))
    }

    pub fn ratio(num: u64, den: u64) -> Self {
        ExtRat::finite(Rational::new(num.into(), den.into()))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self.0, Repr::Infinite)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Finite(q) if q.is_zero())
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Finite(q) => Some(q),
            Repr::Infinite => None,
        }
    }

    /// `max(self - other, 0)`, with `inf - inf = 0` and `inf - x = inf`.
    pub fn dreal(&self, other: &ExtRat) -> ExtRat {
        match (&self.0, &other.0) {
            (_, Repr::Infinite) => ExtRat::zero(),
            (Repr::Infinite, Repr::Finite(_)) => ExtRat::inf(),
            (Repr::Finite(x), Repr::Finite(y)) => {
                if x <= y {
                    ExtRat::zero()
                } else {
                    ExtRat(Repr::Finite(x - y))
                }
            }
        }
    }

    /// `k * self` with the Lipschitz convention `0 * inf = inf`.
    pub fn scale(&self, k: &Rational) -> ExtRat {
        match &self.0 {
            Repr::Infinite => ExtRat::inf(),
            Repr::Finite(q) => ExtRat::finite(q * k),
        }
    }

    /// `k * self` with the measure convention `0 * inf = 0`.
    pub fn weight(&self, k: &Rational) -> ExtRat {
        if k.is_zero() {
            ExtRat::zero()
        } else {
            self.scale(k)
        }
    }

    /// `min(self, a)`.
    pub fn cap(&self, a: &Rational) -> ExtRat {
        match &self.0 {
            Repr::Finite(q) if q <= a => self.clone(),
            _ => ExtRat::finite(a.clone()),
        }
    }

    /// `self - r` when `self >= r`; `inf - r = inf`.
    pub fn checked_sub(&self, r: &Rational) -> Option<ExtRat> {
        match &self.0 {
            Repr::Infinite => Some(ExtRat::inf()),
            Repr::Finite(q) => ExtRat::try_finite(q - r),
        }
    }

    /// True iff `self <= r` for a finite rational `r` (possibly negative).
    pub fn le_rat(&self, r: &Rational) -> bool {
        matches!(&self.0, Repr::Finite(q) if q <= r)
    }

    /// True iff `self < r` for a finite rational `r` (possibly negative).
    pub fn lt_rat(&self, r: &Rational) -> bool {
        matches!(&self.0, Repr::Finite(q) if q < r)
    }
}

impl From<Rational> for ExtRat {
    fn from(q: Rational) -> Self {
        ExtRat::finite(q)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Infinite, Repr::Infinite) => Ordering::Equal,
            (Repr::Infinite, _) => Ordering::Greater,
            (_, Repr::Infinite) => Ordering::Less,
            (Repr::Finite(a), Repr::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for &ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: &ExtRat) -> ExtRat {
        match (&self.0, &rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtRat(Repr::Finite(a + b)),
            _ => ExtRat::inf(),
        }
    }
}

impl Add for ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: ExtRat) -> ExtRat {
        &self + &rhs
    }
}

impl Add<&Rational> for &ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: &Rational) -> ExtRat {
        match &self.0 {
            Repr::Finite(a) => ExtRat::finite(a + rhs),
            Repr::Infinite => ExtRat::inf(),
        }
    }
}

impl std::iter::Sum for ExtRat {
    fn sum<I: Iterator<Item = ExtRat>>(iter: I) -> ExtRat {
        iter.fold(ExtRat::zero(), |a, b| a + b)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Finite(q) => write!(f, "{}", q),
            Repr::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as a nonnegative rational or \"inf\"")]
pub struct ParseExtError(pub String);

/// Parses `"p/q"`, `"p"` or `"inf"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseExtError> {
    let err = || ParseExtError(s.to_string());
    let t = s.trim();
    let q = match t.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse().map_err(|_| err())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(t.parse().map_err(|_| err())?),
    };
    Ok(q)
}

impl FromStr for ExtRat {
    type Err = ParseExtError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if matches!(s.trim(), "inf" | "+inf" | "∞") {
            return Ok(ExtRat::inf());
        }
        ExtRat::try_finite(parse_rational(s)?).ok_or_else(|| ParseExtError(s.to_string()))
    }
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for plain rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmet_lp::ratio;

    #[test]
    fn dreal_cases() {
        assert_eq!(ExtRat::int(5).dreal(&ExtRat::int(3)), ExtRat::int(2));
        assert_eq!(ExtRat::int(3).dreal(&ExtRat::int(5)), ExtRat::zero());
        assert_eq!(ExtRat::inf().dreal(&ExtRat::int(3)), ExtRat::inf());
        assert_eq!(ExtRat::inf().dreal(&ExtRat::inf()), ExtRat::zero());
        assert_eq!(ExtRat::int(3).dreal(&ExtRat::inf()), ExtRat::zero());
    }

    #[test]
    fn infinity_is_absorbing_and_maximal() {
        assert_eq!(ExtRat::int(4) + ExtRat::inf(), ExtRat::inf());
        assert_eq!(ExtRat::int(4).min(ExtRat::inf()), ExtRat::int(4));
        assert!(ExtRat::inf() > ExtRat::int(1_000_000));
        assert_eq!(ExtRat::inf().scale(&ratio(0, 1)), ExtRat::inf());
        assert_eq!(ExtRat::inf().weight(&ratio(0, 1)), ExtRat::zero());
    }

    #[test]
    fn parse_and_print() {
        for s in ["0", "3/2", "inf", "7"] {
            let v: ExtRat = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("6/4".parse::<ExtRat>().unwrap(), ExtRat::ratio(3, 2));
        assert!("-1".parse::<ExtRat>().is_err());
        assert!("1/0".parse::<ExtRat>().is_err());
        assert!("x".parse::<ExtRat>().is_err());
    }

    #[test]
    fn json_uses_strings() {
        let v = vec![ExtRat::ratio(1, 2), ExtRat::inf()];
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/2","inf"]"#);
        let back: Vec<ExtRat> = serde_json::from_str(r#"["1/2","inf"]"#).unwrap();
        assert_eq!(back, v);
    }
}
