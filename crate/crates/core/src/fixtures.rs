//! Small named spaces used throughout the docs and tests.

use crate::space::{labels, parse_matrix, QSpace};

/// Two points with `d(p,q) = 1`, `d(q,p) = inf`.
pub fn s2() -> QSpace {
    QSpace::validate(labels(&["p", "q"]), parse_matrix(&[&["0", "1"], &["inf", "0"]])).unwrap()
}

/// The symmetric path metric `a - b - c` with unit steps.
pub fn s3() -> QSpace {
    QSpace::validate(
        labels(&["a", "b", "c"]),
        parse_matrix(&[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]]),
    )
    .unwrap()
}

/// The two-point chain `bot <= top` with its poset quasi-metric.
pub fn p2() -> QSpace {
    QSpace::from_poset(labels(&["bot", "top"]), &[vec![true, true], vec![false, true]]).unwrap()
}
