//! Subsets of a finite space, and their closures under the specialization
//! order.
//!
//! On a finite space the open sets are the upward-closed sets and the closed
//! sets the downward-closed ones.

use crate::error::{Error, Result};
use crate::QSpace;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    members: Vec<bool>,
}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        PointSet { members: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        PointSet { members: vec![true; n] }
    }

    pub fn from_indices(n: usize, pts: impl IntoIterator<Item = usize>) -> Self {
        let mut s = PointSet::empty(n);
        for p in pts {
            s.members[p] = true;
        }
        s
    }

    /// The set whose members are the bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        PointSet::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1))
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn insert(&mut self, x: usize) {
        self.members[x] = true;
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            members: self.members.iter().zip(&other.members).map(|(&a, &b)| a && b).collect(),
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            members: self.members.iter().zip(&other.members).map(|(&a, &b)| a || b).collect(),
        }
    }

    pub fn complement(&self) -> PointSet {
        PointSet {
            members: self.members.iter().map(|&m| !m).collect(),
        }
    }

    /// Every subset of an `n`-point universe, `n <= 20`.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = PointSet> {
        assert!(n <= 20, "refusing to enumerate 2^{} subsets", n);
        (0..1u64 << n).map(move |m| PointSet::from_mask(n, m))
    }

    /// Sorted label array.
    pub fn to_json(&self, space: &QSpace) -> serde_json::Value {
        let mut labels: Vec<&str> = self.iter().map(|x| space.label(x)).collect();
        labels.sort_unstable();
        labels.into()
    }

    pub fn from_json(space: &QSpace, value: &serde_json::Value) -> Result<PointSet> {
        let labels: Vec<String> = serde_json::from_value(value.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        let mut s = PointSet::empty(space.len());
        for l in labels {
            s.insert(space.index_of(&l)?);
        }
        Ok(s)
    }
}

/// `↓pts` under the specialization order.
pub fn lower_closure(space: &QSpace, pts: &PointSet) -> PointSet {
    PointSet::from_indices(
        space.len(),
        space.points().filter(|&x| pts.iter().any(|y| space.specialization_leq(x, y))),
    )
}

/// `↑pts` under the specialization order.
pub fn upper_closure(space: &QSpace, pts: &PointSet) -> PointSet {
    PointSet::from_indices(
        space.len(),
        space.points().filter(|&x| pts.iter().any(|y| space.specialization_leq(y, x))),
    )
}

pub fn is_lower(space: &QSpace, s: &PointSet) -> bool {
    lower_closure(space, s) == *s
}

pub fn is_upper(space: &QSpace, s: &PointSet) -> bool {
    upper_closure(space, s) == *s
}
