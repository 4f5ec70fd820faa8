//! Finite quasi-metric spaces.

use std::collections::HashSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::{ExtRat, Rational};

/// A finite set of labelled points with a validated quasi-metric.
///
/// Points are identified by index; labels are only for presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSpace {
    labels: Vec<String>,
    dist: Vec<Vec<ExtRat>>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    labels: Vec<String>,
    dist: Vec<Vec<ExtRat>>,
}

impl QSpace {
    /// Checks the quasi-metric axioms and reports every violation found.
    pub fn validate(labels: Vec<String>, dist: Vec<Vec<ExtRat>>) -> Result<QSpace> {
        let n = labels.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed(format!("distance matrix is not {}x{}", n, n)));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::Malformed(format!("duplicate label {:?}", l)));
            }
        }
        let mut violations = Vec::new();
        for x in 0..n {
            if !dist[x][x].is_zero() {
                violations.push(Violation::ZeroDiagonal { x: labels[x].clone() });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if dist[x][z] > &dist[x][y] + &dist[y][z] {
                        violations.push(Violation::Triangle {
                            x: labels[x].clone(),
                            y: labels[y].clone(),
                            z: labels[z].clone(),
                        });
                    }
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                if dist[x][y].is_zero() && dist[y][x].is_zero() {
                    violations.push(Violation::T0 {
                        x: labels[x].clone(),
                        y: labels[y].clone(),
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(QSpace { labels, dist })
        } else {
            Err(Error::InvalidSpace(violations))
        }
    }

    pub fn empty() -> QSpace {
        QSpace {
            labels: Vec::new(),
            dist: Vec::new(),
        }
    }

    /// `d(x,y) = 0` if `x <= y`, `inf` otherwise. `leq[x][y]` encodes `x <= y`.
    pub fn from_poset(labels: Vec<String>, leq: &[Vec<bool>]) -> Result<QSpace> {
        let n = labels.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed(format!("relation is not {}x{}", n, n)));
        }
        for x in 0..n {
            if !leq[x][x] {
                return Err(Error::NotAPartialOrder(format!("{} is not below itself", labels[x])));
            }
            for y in 0..n {
                if x != y && leq[x][y] && leq[y][x] {
                    return Err(Error::NotAPartialOrder(format!(
                        "{} and {} are below each other",
                        labels[x], labels[y]
                    )));
                }
                for z in 0..n {
                    if leq[x][y] && leq[y][z] && !leq[x][z] {
                        return Err(Error::NotAPartialOrder(format!(
                            "{} <= {} <= {} but not {} <= {}",
                            labels[x], labels[y], labels[z], labels[x], labels[z]
                        )));
                    }
                }
            }
        }
        let dist = (0..n)
            .map(|x| (0..n).map(|y| if leq[x][y] { ExtRat::zero() } else { ExtRat::inf() }).collect())
            .collect();
        QSpace::validate(labels, dist)
    }

    /// Shortest-path closure of a weighted digraph (Floyd-Warshall).
    pub fn from_digraph(labels: Vec<String>, edges: &[(usize, usize, Rational)]) -> Result<QSpace> {
        let n = labels.len();
        let mut dist = vec![vec![ExtRat::inf(); n]; n];
        for (x, row) in dist.iter_mut().enumerate() {
            row[x] = ExtRat::zero();
        }
        for (u, v, w) in edges {
            if *u >= n || *v >= n {
                return Err(Error::Malformed(format!("edge ({}, {}) out of range", u, v)));
            }
            if w.is_negative() {
                return Err(Error::Malformed(format!("negative weight {} on edge ({}, {})", w, u, v)));
            }
            let w = ExtRat::finite(w.clone());
            if w < dist[*u][*v] {
                dist[*u][*v] = w;
            }
        }
        shortest_path_closure(&mut dist);
        QSpace::validate(labels, dist)
    }

    pub fn from_json(text: &str) -> Result<QSpace> {
        let raw: SpaceJson = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        QSpace::validate(raw.labels, raw.dist)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpaceJson {
            labels: self.labels.clone(),
            dist: self.dist.clone(),
        })
        .expect("space serializes")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn d(&self, x: usize, y: usize) -> &ExtRat {
        &self.dist[x][y]
    }

    pub fn matrix(&self) -> &[Vec<ExtRat>] {
        &self.dist
    }

    /// The specialization order: `x <= y` iff `d(x,y) = 0`.
    pub fn specialization_leq(&self, x: usize, y: usize) -> bool {
        self.dist[x][y].is_zero()
    }

    pub fn is_symmetric(&self) -> bool {
        self.points().all(|x| self.points().all(|y| self.dist[x][y] == self.dist[y][x]))
    }

    /// `d^op(x,y) = d(y,x)`.
    pub fn opposite(&self) -> QSpace {
        let n = self.len();
        QSpace {
            labels: self.labels.clone(),
            dist: (0..n).map(|x| (0..n).map(|y| self.dist[y][x].clone()).collect()).collect(),
        }
    }

    /// Index of the pair `(x, y)` in [`QSpace::product_sq`].
    pub fn pair_index(&self, x: usize, y: usize) -> usize {
        x * self.len() + y
    }

    /// `X x X` with `d2((x,y),(x',y')) = d(x,x') + d(y',y)`.
    pub fn product_sq(&self) -> QSpace {
        let n = self.len();
        let mut labels = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                labels.push(format!("({},{})", self.labels[x], self.labels[y]));
            }
        }
        let mut dist = vec![vec![ExtRat::zero(); n * n]; n * n];
        for x in 0..n {
            for y in 0..n {
                for x2 in 0..n {
                    for y2 in 0..n {
                        dist[x * n + y][x2 * n + y2] = &self.dist[x][x2] + &self.dist[y2][y];
                    }
                }
            }
        }
        QSpace { labels, dist }
    }

    /// Disjoint union with cross-block distances `inf`.
    pub fn coproduct(&self, other: &QSpace) -> Result<QSpace> {
        for l in &other.labels {
            if self.labels.contains(l) {
                return Err(Error::LabelClash(l.clone()));
            }
        }
        let (n, m) = (self.len(), other.len());
        let mut dist = vec![vec![ExtRat::inf(); n + m]; n + m];
        for x in 0..n {
            for y in 0..n {
                dist[x][y] = self.dist[x][y].clone();
            }
        }
        for x in 0..m {
            for y in 0..m {
                dist[n + x][n + y] = other.dist[x][y].clone();
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(QSpace { labels, dist })
    }
}

/// In-place Floyd-Warshall over `[0, inf]`.
pub fn shortest_path_closure(dist: &mut [Vec<ExtRat>]) {
    let n = dist.len();
    for k in 0..n {
        for i in 0..n {
            if dist[i][k].is_inf() {
                continue;
            }
            for j in 0..n {
                let via = &dist[i][k] + &dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
}

/// Parses rows of `"p/q"` / `"inf"` entries. Panics on bad input.
pub fn parse_matrix(rows: &[&[&str]]) -> Vec<Vec<ExtRat>> {
    rows.iter()
        .map(|r| r.iter().map(|s| s.parse().expect("valid entry")).collect())
        .collect()
}

pub fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{p2, s2, s3};
    use qmet_lp::int;

    #[test]
    fn path_metric_is_valid() {
        let s = s3();
        assert_eq!(s.d(0, 2), &ExtRat::int(2));
    }

    #[test]
    fn t0_violation_names_the_pair() {
        let err = QSpace::validate(labels(&["a", "b"]), parse_matrix(&[&["0", "0"], &["0", "0"]])).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidSpace(vec![Violation::T0 {
                x: "a".into(),
                y: "b".into()
            }])
        );
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        let m = parse_matrix(&[&["0", "1", "5"], &["1", "0", "1"], &["5", "1", "0"]]);
        let Err(Error::InvalidSpace(v)) = QSpace::validate(labels(&["a", "b", "c"]), m) else {
            panic!("expected violations");
        };
        assert!(v.contains(&Violation::Triangle {
            x: "a".into(),
            y: "b".into(),
            z: "c".into()
        }));
    }

    #[test]
    fn nonzero_diagonal_is_reported() {
        let err = QSpace::validate(labels(&["a"]), parse_matrix(&[&["1"]])).unwrap_err();
        assert_eq!(err, Error::InvalidSpace(vec![Violation::ZeroDiagonal { x: "a".into() }]));
    }

    #[test]
    fn specialization_on_two_point_chain() {
        let p = p2();
        assert!(p.specialization_leq(0, 1));
        assert!(!p.specialization_leq(1, 0));
        assert!(p.specialization_leq(1, 1));
        assert_eq!(p.matrix(), parse_matrix(&[&["0", "0"], &["inf", "0"]]).as_slice());
    }

    #[test]
    fn antichain_poset_has_infinite_off_diagonal() {
        let s = QSpace::from_poset(labels(&["a", "b"]), &[vec![true, false], vec![false, true]]).unwrap();
        assert!(s.d(0, 1).is_inf() && s.d(1, 0).is_inf());
    }

    #[test]
    fn non_transitive_relation_is_rejected() {
        let leq = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        assert!(matches!(
            QSpace::from_poset(labels(&["a", "b", "c"]), &leq),
            Err(Error::NotAPartialOrder(_))
        ));
    }

    #[test]
    fn digraph_closure() {
        let s = QSpace::from_digraph(labels(&["a", "b", "c"]), &[(0, 1, int(1)), (1, 2, int(1))]).unwrap();
        assert_eq!(s.d(0, 2), &ExtRat::int(2));
        assert!(s.d(2, 0).is_inf());
        let e = QSpace::from_digraph(labels(&["a", "b"]), &[]).unwrap();
        assert!(e.d(0, 1).is_inf() && e.d(1, 0).is_inf());
        let z = QSpace::from_digraph(labels(&["a", "b"]), &[(0, 1, int(0)), (1, 0, int(0))]);
        assert!(matches!(z, Err(Error::InvalidSpace(v)) if matches!(v[0], Violation::T0 { .. })));
    }

    #[test]
    fn opposite_transposes_and_is_an_involution() {
        let s = s2();
        let o = s.opposite();
        assert!(o.d(0, 1).is_inf());
        assert_eq!(o.d(1, 0), &ExtRat::int(1));
        assert_eq!(o.opposite(), s);
        assert_eq!(s3().opposite(), s3());
    }

    #[test]
    fn product_square_formula() {
        let s = s2();
        let sq = s.product_sq();
        let (p, q) = (0, 1);
        assert_eq!(sq.d(s.pair_index(p, q), s.pair_index(q, q)), &ExtRat::int(1));
        assert!(sq.d(s.pair_index(p, p), s.pair_index(p, q)).is_inf());
        assert!(sq.d(3, 3).is_zero());
        assert_eq!(sq.label(1), "(p,q)");
    }

    #[test]
    fn coproduct_blocks() {
        let c = s2().coproduct(&p2()).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.d(0, 2).is_inf() && c.d(3, 1).is_inf());
        assert_eq!(s2().coproduct(&QSpace::empty()).unwrap(), s2());
        assert_eq!(s2().coproduct(&s2()), Err(Error::LabelClash("p".into())));
    }

    #[test]
    fn json_roundtrip() {
        let s = s2();
        let text = s.to_json().to_string();
        assert_eq!(text, r#"{"dist":[["0","1"],["inf","0"]],"labels":["p","q"]}"#);
        assert_eq!(QSpace::from_json(&text).unwrap(), s);
        assert!(matches!(QSpace::from_json("{\"labels\":"), Err(Error::Malformed(_))));
    }
}
