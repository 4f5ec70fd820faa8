//! Formal balls `(x, r)` over a finite quasi-metric space.
//!
//! Balls are ordered by `(x, r) <= (y, s)` iff `d(x, y) <= r - s`, and carry
//! the quasi-metric `d+((x, r), (y, s)) = max(d(x, y) - r + s, 0)`. Nesting a
//! ball inside another radius gives the double balls on which the
//! multiplication `mu(((x, r), s)) = (x, r + s)` acts.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::rational_str;
use crate::{ExtRat, QSpace, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalBall {
    pub center: usize,
    pub radius: Rational,
}

impl FormalBall {
    /// Panics on a negative radius.
    pub fn new(center: usize, radius: Rational) -> Self {
        assert!(!radius.is_negative(), "negative radius {}", radius);
        FormalBall { center, radius }
    }
}

/// `((x, r), s)`, a formal ball of formal balls.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DoubleBall {
    pub inner: FormalBall,
    pub outer_radius: Rational,
}

impl DoubleBall {
    pub fn new(inner: FormalBall, outer_radius: Rational) -> Self {
        assert!(!outer_radius.is_negative(), "negative radius {}", outer_radius);
        DoubleBall { inner, outer_radius }
    }
}

/// `(((x, r), s), t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripleBall {
    pub inner: DoubleBall,
    pub outer_radius: Rational,
}

impl TripleBall {
    pub fn new(inner: DoubleBall, outer_radius: Rational) -> Self {
        assert!(!outer_radius.is_negative(), "negative radius {}", outer_radius);
        TripleBall { inner, outer_radius }
    }
}

pub fn ball_leq(space: &QSpace, b: &FormalBall, c: &FormalBall) -> bool {
    space.d(b.center, c.center).le_rat(&(&b.radius - &c.radius))
}

pub fn dplus(space: &QSpace, b: &FormalBall, c: &FormalBall) -> ExtRat {
    match space.d(b.center, c.center).as_finite() {
        None => ExtRat::inf(),
        Some(d) => {
            let v = d - &b.radius + &c.radius;
            if v.is_negative() {
                ExtRat::zero()
            } else {
                ExtRat::finite(v)
            }
        }
    }
}

/// `(b, s) <= (c, t)` in the ball space of `(B(X), d+)`.
pub fn double_ball_leq(space: &QSpace, b: &DoubleBall, c: &DoubleBall) -> bool {
    dplus(space, &b.inner, &c.inner).le_rat(&(&b.outer_radius - &c.outer_radius))
}

/// Way-below test `(x, r) << (y, s)` iff `d(x, y) < r - s`; every point of a
/// finite space is taken to be a center point.
pub fn way_below(space: &QSpace, b: &FormalBall, c: &FormalBall) -> bool {
    space.d(b.center, c.center).lt_rat(&(&b.radius - &c.radius))
}

pub fn eta(x: usize) -> FormalBall {
    FormalBall::new(x, Rational::zero())
}

/// The unit at the level of balls: `b |-> (b, 0)`.
pub fn eta_ball(b: &FormalBall) -> DoubleBall {
    DoubleBall::new(b.clone(), Rational::zero())
}

pub fn mu(db: &DoubleBall) -> FormalBall {
    FormalBall::new(db.inner.center, &db.inner.radius + &db.outer_radius)
}

/// `B^1(eta)(x, r) = ((x, 0), r)`.
pub fn lift_eta(b: &FormalBall) -> DoubleBall {
    DoubleBall::new(eta(b.center), b.radius.clone())
}

/// Multiplication one level up: `(((x, r), s), t) |-> ((x, r), s + t)`.
pub fn mu_ball(tb: &TripleBall) -> DoubleBall {
    DoubleBall::new(tb.inner.inner.clone(), &tb.inner.outer_radius + &tb.outer_radius)
}

/// `B^1(mu)(((x, r), s), t) = (mu((x, r), s), t)`.
pub fn lift_mu(tb: &TripleBall) -> DoubleBall {
    DoubleBall::new(mu(&tb.inner), tb.outer_radius.clone())
}

#[derive(Debug, Clone, Default)]
pub struct MonadSamples {
    pub doubles: Vec<DoubleBall>,
    pub triples: Vec<TripleBall>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MonadReport {
    /// Instances checked for laws (i) to (iv), in order.
    pub checked: [usize; 4],
    pub failures: Vec<String>,
}

impl MonadReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the four unit/multiplication laws on every sample. Laws (i) and
/// (ii) run on each plain ball occurring in a sample, (iii) on triples, and
/// (iv), the order statement `eta_B(mu(b)) >= b`, on doubles.
pub fn check_monad_laws(space: &QSpace, samples: &MonadSamples) -> MonadReport {
    let mut report = MonadReport::default();
    let plain = samples
        .doubles
        .iter()
        .map(|d| &d.inner)
        .chain(samples.triples.iter().map(|t| &t.inner.inner));
    for b in plain {
        report.checked[0] += 1;
        if mu(&eta_ball(b)) != *b {
            report.failures.push(format!("(i) fails at {:?}", b));
        }
        report.checked[1] += 1;
        if mu(&lift_eta(b)) != *b {
            report.failures.push(format!("(ii) fails at {:?}", b));
        }
    }
    for t in &samples.triples {
        report.checked[2] += 1;
        if mu(&mu_ball(t)) != mu(&lift_mu(t)) {
            report.failures.push(format!("(iii) fails at {:?}", t));
        }
    }
    for db in &samples.doubles {
        report.checked[3] += 1;
        if !double_ball_leq(space, db, &eta_ball(&mu(db))) {
            report.failures.push(format!("(iv) fails at {:?}", db));
        }
    }
    report
}

/// Least upper bound of a finite family under `<=^{d+}`.
///
/// For each center `y`, the least ball centered at `y` above the family is
/// `(y, min_i (r_i - d(x_i, y)))` when that radius is nonnegative, and every
/// upper bound centered at `y` lies above it. The family has a least upper
/// bound iff one of these candidates is below all the others.
pub fn lub_formal_balls(space: &QSpace, balls: &[FormalBall]) -> Result<FormalBall> {
    if balls.is_empty() {
        return Err(Error::Malformed("empty family of balls".into()));
    }
    let mut candidates = Vec::new();
    for y in space.points() {
        let mut best: Option<Rational> = None;
        let mut ok = true;
        for b in balls {
            let Some(d) = space.d(b.center, y).as_finite() else {
                ok = false;
                break;
            };
            let s = &b.radius - d;
            best = Some(match best {
                Some(cur) if cur <= s => cur,
                _ => s,
            });
        }
        if let (true, Some(s)) = (ok, best) {
            if !s.is_negative() {
                candidates.push(FormalBall::new(y, s));
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::NoUpperBound);
    }
    candidates
        .iter()
        .find(|c| candidates.iter().all(|o| ball_leq(space, c, o)))
        .cloned()
        .ok_or(Error::NoLeast)
}

#[derive(Serialize, Deserialize)]
struct BallJson {
    center: String,
    #[serde(with = "rational_str")]
    radius: Rational,
}

impl FormalBall {
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        serde_json::to_value(BallJson {
            center: space.label(self.center).to_string(),
            radius: self.radius.clone(),
        })
        .expect("ball serializes")
    }

    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<FormalBall> {
        let raw: BallJson = serde_json::from_value(value.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        if raw.radius.is_negative() {
            return Err(Error::Malformed(format!("negative radius {}", raw.radius)));
        }
        Ok(FormalBall::new(space.index_of(&raw.center)?, raw.radius))
    }
}
