//! Solver results against brute-force vertex enumeration and matrix-game
//! kernel enumeration.

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use qmet_lp::{int, solve_lp, solve_saddle, LpOutcome, LpProblem, Polytope, Rational, Relation};

/// Solves a square system exactly; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All vertices of `{x >= 0 : rows}` by intersecting `n` tight constraints.
fn vertices(n: usize, rows: &[(Vec<Rational>, Relation, Rational)]) -> Vec<Vec<Rational>> {
    let mut hyper: Vec<(Vec<Rational>, Rational)> = rows.iter().map(|(a, _, b)| (a.clone(), b.clone())).collect();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        hyper.push((e, Rational::zero()));
    }
    let feasible = |x: &[Rational]| {
        x.iter().all(|v| !v.is_negative())
            && rows.iter().all(|(a, rel, b)| {
                let lhs: Rational = a.iter().zip(x).map(|(p, q)| p * q).sum();
                match rel {
                    Relation::Leq => lhs <= *b,
                    Relation::Geq => lhs >= *b,
                    Relation::Eq => lhs == *b,
                }
            })
    };
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for s in subsets(hyper.len(), n) {
        let a = s.iter().map(|&i| hyper[i].0.clone()).collect();
        let b = s.iter().map(|&i| hyper[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Value of the zero-sum game `min_rows max_cols` by Shapley-Snow kernels.
fn game_value(g: &[Vec<Rational>]) -> Rational {
    let (m, n) = (g.len(), g[0].len());
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                // Row player weights x on `rows`: x^T G[rows, cols] = v, sum x = 1.
                let mut a = vec![vec![Rational::zero(); k + 1]; k + 1];
                let mut b = vec![Rational::zero(); k + 1];
                for (c, &j) in cols.iter().enumerate() {
                    for (r, &i) in rows.iter().enumerate() {
                        a[c][r] = g[i][j].clone();
                    }
                    a[c][k] = -Rational::one();
                }
                for r in 0..k {
                    a[k][r] = Rational::one();
                }
                b[k] = Rational::one();
                let Some(x) = solve_square(a, b.clone()) else { continue };
                let mut a2 = vec![vec![Rational::zero(); k + 1]; k + 1];
                for (r, &i) in rows.iter().enumerate() {
                    for (c, &j) in cols.iter().enumerate() {
                        a2[r][c] = g[i][j].clone();
                    }
                    a2[r][k] = -Rational::one();
                }
                for c in 0..k {
                    a2[k][c] = Rational::one();
                }
                let Some(y) = solve_square(a2, b) else { continue };
                let v = x[k].clone();
                if x[..k].iter().any(|w| w.is_negative()) || y[..k].iter().any(|w| w.is_negative()) {
                    continue;
                }
                let row_ok = (0..n).all(|j| {
                    let s: Rational = rows.iter().zip(&x).map(|(&i, w)| &g[i][j] * w).sum();
                    s <= v
                });
                let col_ok = (0..m).all(|i| {
                    let s: Rational = cols.iter().zip(&y).map(|(&j, w)| &g[i][j] * w).sum();
                    s >= v
                });
                if row_ok && col_ok {
                    return v;
                }
            }
        }
    }
    panic!("no Shapley-Snow kernel found");
}

fn small() -> impl Strategy<Value = Rational> {
    (-4i64..=4).prop_map(int)
}

fn box_polytope(dim: usize, side: i64) -> (Polytope, Vec<(Vec<Rational>, Relation, Rational)>) {
    let mut p = Polytope::new(dim);
    let mut rows = Vec::new();
    for j in 0..dim {
        let mut e = vec![Rational::zero(); dim];
        e[j] = Rational::one();
        p.push(e.clone(), Relation::Leq, int(side));
        rows.push((e, Relation::Leq, int(side)));
    }
    (p, rows)
}

fn simplex_rows(dim: usize) -> Vec<(Vec<Rational>, Relation, Rational)> {
    vec![(vec![Rational::one(); dim], Relation::Eq, Rational::one())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn optimum_matches_vertex_enumeration(
        obj in prop::collection::vec(small(), 3),
        rows in prop::collection::vec((prop::collection::vec(small(), 3), 0usize..3, -3i64..=6), 1..4),
    ) {
        let mut p = LpProblem::maximize(obj.clone());
        let mut plain = Vec::new();
        for (a, rel, b) in rows {
            let rel = [Relation::Leq, Relation::Eq, Relation::Geq][rel];
            p.add(a.clone(), rel, int(b));
            plain.push((a, rel, int(b)));
        }
        // Bound the region so that enumeration sees every optimum.
        for j in 0..3 {
            p.upper(j, int(5));
            let mut e = vec![Rational::zero(); 3];
            e[j] = Rational::one();
            plain.push((e, Relation::Leq, int(5)));
        }
        let out = solve_lp(&p).unwrap();
        prop_assert!(out.verify(&p).is_ok(), "{:?}", out.verify(&p));
        let verts = vertices(3, &plain);
        match out {
            LpOutcome::Optimal(sol) => {
                let best = verts.iter().map(|x| p.objective_at(x)).max().unwrap();
                prop_assert_eq!(sol.value, best);
            }
            LpOutcome::Infeasible { .. } => prop_assert!(verts.is_empty()),
            LpOutcome::Unbounded { .. } => prop_assert!(false, "bounded region reported unbounded"),
        }
    }

    #[test]
    fn minimization_certificates_verify(
        obj in prop::collection::vec(small(), 4),
        rows in prop::collection::vec((prop::collection::vec(small(), 4), 0usize..3, -3i64..=6), 0..5),
    ) {
        let mut p = LpProblem::minimize(obj);
        for (a, rel, b) in rows {
            p.add(a, [Relation::Leq, Relation::Eq, Relation::Geq][rel], int(b));
        }
        let out = solve_lp(&p).unwrap();
        prop_assert!(out.verify(&p).is_ok(), "{:?}\n{}", out.verify(&p), p);
    }

    #[test]
    fn saddle_matches_matrix_game_on_simplices(
        m in (1usize..4, 1usize..4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(small(), c), r)),
    ) {
        let (r, c) = (m.len(), m[0].len());
        let v = solve_saddle(&m, &Polytope::simplex(r), &Polytope::simplex(c)).unwrap();
        prop_assert_eq!(v, game_value(&m));
    }

    #[test]
    fn saddle_matches_enumeration_on_boxes_and_simplices(
        m in prop::collection::vec(prop::collection::vec(small(), 3), 2),
    ) {
        // P = [0,1]^2 (4 vertices), Q = 3-simplex (3 vertices).
        let (p, p_rows) = box_polytope(2, 1);
        let q = Polytope::simplex(3);
        let pv = vertices(2, &p_rows);
        let qv = vertices(3, &simplex_rows(3));
        prop_assert_eq!(pv.len(), 4);
        prop_assert_eq!(qv.len(), 3);
        let g: Vec<Vec<Rational>> = pv.iter().map(|x| {
            qv.iter().map(|y| {
                let mut s = Rational::zero();
                for i in 0..2 { for j in 0..3 { s += &x[i] * &m[i][j] * &y[j]; } }
                s
            }).collect()
        }).collect();
        let v = solve_saddle(&m, &p, &q).unwrap();
        prop_assert_eq!(v, game_value(&g));
    }
}
