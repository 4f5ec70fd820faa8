//! Seeded random instances.
//!
//! Spaces are drawn by picking raw distances from the grid
//! `{0, 1/2, 1, 3/2, 2, 3}` (or `inf` with some probability), then closing
//! under shortest paths. To keep the result T0, zero entries are only
//! allowed along a random linear order of the points; a zero against that
//! order is replaced by a positive grid value. Symmetric spaces get no
//! off-diagonal zeros at all.

use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::balls::{DoubleBall, FormalBall, MonadSamples, TripleBall};
use crate::sets::{lower_closure, upper_closure, PointSet};
use crate::space::shortest_path_closure;
use crate::{ExtFunc, ExtRat, QSpace, Rational, SimpleValuation};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

const GRID: [(i64, i64); 6] = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];

fn grid_value(rng: &mut Rng64, positive: bool) -> Rational {
    let lo = usize::from(positive);
    let (p, q) = GRID[rng.gen_range(lo..GRID.len())];
    Rational::new(p.into(), q.into())
}

/// Shape of a random space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceShape {
    /// Any quasi-metric, with some infinite distances.
    General,
    /// A metric, possibly with infinite distances.
    Symmetric,
    /// The poset quasi-metric of a random partial order.
    Poset,
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{}", i)).collect()
}

pub fn random_space(rng: &mut Rng64, n: usize, shape: SpaceShape) -> QSpace {
    assert!(n >= 1, "spaces have at least one point");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut rank = vec![0; n];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    let mut d = vec![vec![ExtRat::zero(); n]; n];
    match shape {
        SpaceShape::Poset => {
            for x in 0..n {
                for y in 0..n {
                    if x != y {
                        d[x][y] = if rank[x] < rank[y] && rng.gen_bool(0.5) {
                            ExtRat::zero()
                        } else {
                            ExtRat::inf()
                        };
                    }
                }
            }
        }
        SpaceShape::General => {
            for x in 0..n {
                for y in 0..n {
                    if x != y {
                        d[x][y] = if rng.gen_bool(0.2) {
                            ExtRat::inf()
                        } else {
                            ExtRat::finite(grid_value(rng, rank[x] > rank[y]))
                        };
                    }
                }
            }
        }
        SpaceShape::Symmetric => {
            for x in 0..n {
                for y in x + 1..n {
                    let v = if rng.gen_bool(0.1) {
                        ExtRat::inf()
                    } else {
                        ExtRat::finite(grid_value(rng, true))
                    };
                    d[x][y] = v.clone();
                    d[y][x] = v;
                }
            }
        }
    }
    shortest_path_closure(&mut d);
    QSpace::validate(labels(n), d).expect("generated spaces are valid")
}

/// A space with `1..=max_points` points and a random shape.
pub fn any_space(rng: &mut Rng64, max_points: usize) -> QSpace {
    let n = rng.gen_range(1..=max_points);
    let shape = match rng.gen_range(0..4) {
        0 => SpaceShape::Symmetric,
        1 => SpaceShape::Poset,
        _ => SpaceShape::General,
    };
    random_space(rng, n, shape)
}

/// A normalized valuation with small-denominator weights.
pub fn random_normalized(rng: &mut Rng64, n: usize) -> SimpleValuation {
    let k = rng.gen_range(1..=n.min(3));
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = raw.iter().sum();
    SimpleValuation::new(
        n,
        pts.into_iter()
            .zip(raw)
            .map(|(x, w)| (x, Rational::new(w.into(), total.into()))),
    )
    .expect("weights are positive")
}

/// A valuation of mass at most 1, possibly zero.
pub fn random_subnormalized(rng: &mut Rng64, n: usize) -> SimpleValuation {
    let v = random_normalized(rng, n);
    let scale = Rational::new(rng.gen_range(0..=4i64).into(), 4.into());
    SimpleValuation::new(n, v.support().map(|(x, w)| (x, w * &scale)).collect::<Vec<_>>())
        .expect("weights are nonnegative")
}

pub fn random_set(rng: &mut Rng64, n: usize) -> PointSet {
    PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

pub fn random_nonempty_set(rng: &mut Rng64, n: usize) -> PointSet {
    let mut s = random_set(rng, n);
    if s.is_empty() {
        s.insert(rng.gen_range(0..n));
    }
    s
}

pub fn random_lower(rng: &mut Rng64, space: &QSpace) -> PointSet {
    lower_closure(space, &random_set(rng, space.len()))
}

pub fn random_upper(rng: &mut Rng64, space: &QSpace) -> PointSet {
    upper_closure(space, &random_nonempty_set(rng, space.len()))
}

/// Values from `{0, 1/2, ..., 3}` and occasionally `inf`.
pub fn random_function(rng: &mut Rng64, n: usize, allow_inf: bool) -> ExtFunc {
    ExtFunc::new(
        (0..n)
            .map(|_| {
                if allow_inf && rng.gen_bool(0.1) {
                    ExtRat::inf()
                } else {
                    ExtRat::finite(Rational::new(rng.gen_range(0..=6i64).into(), 2.into()))
                }
            })
            .collect(),
    )
}

/// A monotone function: the running max of random values along the
/// specialization order.
pub fn random_monotone(rng: &mut Rng64, space: &QSpace) -> ExtFunc {
    let raw = random_function(rng, space.len(), false);
    ExtFunc::new(
        space
            .points()
            .map(|x| {
                space
                    .points()
                    .filter(|&y| space.specialization_leq(y, x))
                    .map(|y| raw.get(y).clone())
                    .max()
                    .expect("x <= x")
            })
            .collect(),
    )
}

pub fn random_radius(rng: &mut Rng64) -> Rational {
    Rational::new(rng.gen_range(0..=8i64).into(), rng.gen_range(1..=4i64).into())
}

pub fn random_ball(rng: &mut Rng64, n: usize) -> FormalBall {
    FormalBall::new(rng.gen_range(0..n), random_radius(rng))
}

pub fn monad_samples(rng: &mut Rng64, n: usize, count: usize) -> MonadSamples {
    let mut s = MonadSamples::default();
    for _ in 0..count {
        let d = DoubleBall::new(random_ball(rng, n), random_radius(rng));
        s.triples.push(TripleBall::new(d.clone(), random_radius(rng)));
        s.doubles.push(d);
    }
    s
}

/// A positive Lipschitz constant from `{1/2, 1, 2, 3}`.
pub fn random_alpha(rng: &mut Rng64) -> Rational {
    [
        Rational::new(1.into(), 2.into()),
        Rational::one(),
        Rational::from_integer(2.into()),
        Rational::from_integer(3.into()),
    ]
    .choose(rng)
    .expect("nonempty")
    .clone()
}
