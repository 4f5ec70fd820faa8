//! Seeded property suites over random instances.
//!
//! Each suite draws `trials` instances and tallies, per property, how many
//! were checked and how many failed, keeping the first counterexample. The
//! report is plain JSON with exact rational strings, so equal seeds give
//! byte-identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::balls::{ball_leq, check_monad_laws, dplus, lub_formal_balls, way_below, FormalBall};
use crate::error::{Error, Result};
use crate::gen::{self, Rng64, SpaceShape};
use crate::lipschitz::{
    envelope, is_alpha_lipschitz, min_lip_above, step_envelope, LipschitzConstraintSet,
};
use crate::powerdomains::{
    ball_leq_h, ball_leq_q, dh, dp, dq, hausdorff, make_quasi_lens, neighbourhood_condition_all_opens,
    validate_quasi_lens,
};
use crate::previsions::{
    check_walley, dkrh_sublinear, dkrh_superlinear, eval_prevision, exhaustive_walley_probes, extend_prevision,
    fork_distance, fork_from_lens, lens_lower_alt, minimax_check, Fork, GenPrevision, PrevisionKind, Side,
};
use crate::sets::{is_lower, is_upper, PointSet};
use crate::valuations::{
    apply_moves, ball_leq_valuations, decompose_plan, dkrh_lp, dkrh_lp_run, dkrh_transport_run,
    dkrha_transport_run, integrate, naive_sup_chain, TransportPlan,
};
use crate::{ExtFunc, ExtRat, QSpace, Rational, SimpleValuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Axioms,
    Duality,
    Envelopes,
    Monad,
    Powerdomains,
    Isometries,
    Minimax,
    Walley,
    All,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Axioms,
        Suite::Duality,
        Suite::Envelopes,
        Suite::Monad,
        Suite::Powerdomains,
        Suite::Isometries,
        Suite::Minimax,
        Suite::Walley,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Duality => "duality",
            Suite::Envelopes => "envelopes",
            Suite::Monad => "monad",
            Suite::Powerdomains => "powerdomains",
            Suite::Isometries => "isometries",
            Suite::Minimax => "minimax",
            Suite::Walley => "walley",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .iter()
            .chain([&Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {:?}", s))
    }
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub seed: u64,
    pub trials: usize,
    /// Use this space for every trial instead of random ones.
    pub space: Option<QSpace>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PropertyTally {
    pub checked: usize,
    pub failed: usize,
    pub counterexample: Option<Value>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tally {
    props: BTreeMap<String, PropertyTally>,
    prefix: String,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> Value) {
        let key = format!("{}.{}", self.prefix, name);
        let t = self.props.entry(key).or_default();
        t.checked += 1;
        if !ok {
            t.failed += 1;
            if t.counterexample.is_none() {
                t.counterexample = Some(witness());
            }
        }
    }

    /// Records an operation that should not fail; an error counts as a
    /// failed instance and `None` is returned.
    fn ok<T>(&mut self, name: &str, r: Result<T>, witness: impl FnOnce() -> Value) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let w = witness();
                self.record(name, false, || json!({ "error": e.to_string(), "instance": w }));
                None
            }
        }
    }

    pub fn properties(&self) -> &BTreeMap<String, PropertyTally> {
        &self.props
    }

    pub fn passed(&self) -> bool {
        self.props.values().all(|t| t.failed == 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub fixed_space: bool,
    pub tally: Tally,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.tally.passed()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "trials": self.trials,
            "space": if self.fixed_space { "file" } else { "random" },
            "passed": self.passed(),
            "properties": self.tally.props,
        })
    }
}

pub fn run_suite(suite: Suite, config: &CheckConfig) -> Result<SuiteReport> {
    if config.trials == 0 {
        return Err(Error::Malformed("trials must be at least 1".into()));
    }
    let mut tally = Tally::default();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::ALL.to_vec() } else { vec![suite] };
    for s in suites {
        let index = Suite::ALL.iter().position(|x| *x == s).expect("listed suite") as u64;
        let mut rng = gen::rng(config.seed ^ (index << 40));
        tally.prefix = s.name().to_string();
        for _ in 0..config.trials {
            let mut ctx = Ctx {
                rng: &mut rng,
                tally: &mut tally,
                fixed: config.space.as_ref(),
            };
            match s {
                Suite::Axioms => axioms(&mut ctx),
                Suite::Duality => duality(&mut ctx),
                Suite::Envelopes => envelopes(&mut ctx),
                Suite::Monad => monad(&mut ctx),
                Suite::Powerdomains => powerdomains(&mut ctx),
                Suite::Isometries => isometries(&mut ctx),
                Suite::Minimax => minimax(&mut ctx),
                Suite::Walley => walley(&mut ctx),
                Suite::All => unreachable!("expanded above"),
            }
        }
    }
    tally.prefix.clear();
    Ok(SuiteReport {
        suite,
        seed: config.seed,
        trials: config.trials,
        fixed_space: config.space.is_some(),
        tally,
    })
}

struct Ctx<'a> {
    rng: &'a mut Rng64,
    tally: &'a mut Tally,
    fixed: Option<&'a QSpace>,
}

impl Ctx<'_> {
    fn space(&mut self, max_points: usize) -> QSpace {
        match self.fixed {
            Some(s) => s.clone(),
            None => gen::any_space(self.rng, max_points),
        }
    }

    /// A symmetric space: the fixed one if it is symmetric, else `None`.
    fn symmetric_space(&mut self, max_points: usize) -> Option<QSpace> {
        match self.fixed {
            Some(s) => s.is_symmetric().then(|| s.clone()),
            None => {
                let n = self.rng.gen_range(1..=max_points);
                Some(gen::random_space(self.rng, n, SpaceShape::Symmetric))
            }
        }
    }

    fn bound(&mut self) -> Rational {
        [ratio(1, 2), Rational::one(), int(3)][self.rng.gen_range(0..3)].clone()
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn ext_json(v: &ExtRat) -> Value {
    Value::String(v.to_string())
}

fn vals_json(space: &QSpace, vs: &[&SimpleValuation]) -> Value {
    json!({
        "space": space.to_json(),
        "valuations": vs.iter().map(|v| v.to_json(space)).collect::<Vec<_>>(),
    })
}

fn sets_json(space: &QSpace, sets: &[&PointSet]) -> Value {
    json!({
        "space": space.to_json(),
        "sets": sets.iter().map(|s| s.to_json(space)).collect::<Vec<_>>(),
    })
}

/// Zero self-distance, triangle inequality and two-way-zero separation for
/// one distance on one triple.
fn quasi_metric_triple<T>(
    ctx: &mut Ctx<'_>,
    name: &str,
    xs: [&T; 3],
    d: impl Fn(&T, &T) -> Result<ExtRat>,
    equal: impl Fn(&T, &T) -> bool,
    witness: impl Fn() -> Value,
) {
    let mut table = vec![vec![ExtRat::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            match ctx.tally.ok(&format!("{}.computes", name), d(xs[i], xs[j]), &witness) {
                Some(v) => table[i][j] = v,
                None => return,
            }
        }
    }
    let self_zero = (0..3).all(|i| table[i][i].is_zero());
    ctx.tally.record(&format!("{}.self_zero", name), self_zero, &witness);
    let triangle = (0..3).all(|i| (0..3).all(|j| (0..3).all(|k| table[i][k] <= &table[i][j] + &table[j][k])));
    ctx.tally.record(&format!("{}.triangle", name), triangle, &witness);
    let separated = (0..3).all(|i| {
        (0..3).all(|j| !(table[i][j].is_zero() && table[j][i].is_zero()) || equal(xs[i], xs[j]))
    });
    ctx.tally.record(&format!("{}.separation", name), separated, &witness);
}

fn axioms(ctx: &mut Ctx<'_>) {
    let space = ctx.space(6);
    let n = space.len();
    let ok = QSpace::validate(space.labels().to_vec(), space.matrix().to_vec()).is_ok();
    ctx.tally.record("space.valid", ok, || space.to_json());

    // Triples drawn so that repeats occur and separation is exercised.
    let mut vals: Vec<SimpleValuation> = (0..3).map(|_| gen::random_normalized(ctx.rng, n)).collect();
    if ctx.rng.gen_bool(0.3) {
        vals[2] = vals[0].clone();
    }
    let [a, b, c] = [&vals[0], &vals[1], &vals[2]];
    let w = || vals_json(&space, &[a, b, c]);
    quasi_metric_triple(ctx, "dkrh", [a, b, c], |x, y| dkrh_lp(&space, x, y, None), |x, y| x == y, w);
    let bound = ctx.bound();
    quasi_metric_triple(
        ctx,
        "dkrh_a",
        [a, b, c],
        |x, y| dkrh_lp(&space, x, y, Some(&bound)),
        |x, y| x == y,
        || json!({ "bound": bound.to_string(), "instance": w() }),
    );
    let subs: Vec<SimpleValuation> = (0..3).map(|_| gen::random_subnormalized(ctx.rng, n)).collect();
    let [a, b, c] = [&subs[0], &subs[1], &subs[2]];
    quasi_metric_triple(
        ctx,
        "dkrh_subnormalized",
        [a, b, c],
        |x, y| dkrh_lp(&space, x, y, None),
        |x, y| x == y,
        || vals_json(&space, &[a, b, c]),
    );

    let lowers: Vec<PointSet> = (0..3).map(|_| gen::random_lower(ctx.rng, &space)).collect();
    let [a, b, c] = [&lowers[0], &lowers[1], &lowers[2]];
    quasi_metric_triple(ctx, "dh", [a, b, c], |x, y| Ok(dh(&space, x, y, None)), |x, y| x == y, || {
        sets_json(&space, &[a, b, c])
    });
    let uppers: Vec<PointSet> = (0..3).map(|_| gen::random_upper(ctx.rng, &space)).collect();
    let [a, b, c] = [&uppers[0], &uppers[1], &uppers[2]];
    quasi_metric_triple(ctx, "dq", [a, b, c], |x, y| dq(&space, x, y, None), |x, y| x == y, || {
        sets_json(&space, &[a, b, c])
    });
    let lenses: Vec<_> = (0..3)
        .map(|_| make_quasi_lens(&space, &gen::random_nonempty_set(ctx.rng, n)).expect("nonempty generator"))
        .collect();
    let [a, b, c] = [&lenses[0], &lenses[1], &lenses[2]];
    quasi_metric_triple(ctx, "dp", [a, b, c], |x, y| dp(&space, x, y, None), |x, y| x == y, || {
        json!({ "space": space.to_json(), "lenses": [a.to_json(&space), b.to_json(&space), c.to_json(&space)] })
    });
}

fn duality(ctx: &mut Ctx<'_>) {
    let space = ctx.space(6);
    let n = space.len();
    let mu = gen::random_normalized(ctx.rng, n);
    let nu = if ctx.rng.gen_bool(0.1) { mu.clone() } else { gen::random_normalized(ctx.rng, n) };
    let w = || vals_json(&space, &[&mu, &nu]);

    let Some((lp_value, lp_run)) = ctx.tally.ok("kantorovich", dkrh_lp_run(&space, &mu, &nu, None), w) else {
        return;
    };
    let Some((tr_value, plan, tr_run)) = ctx.tally.ok("kantorovich", dkrh_transport_run(&space, &mu, &nu), w) else {
        return;
    };
    ctx.tally.record("kantorovich", lp_value == tr_value, || {
        json!({ "lp": ext_json(&lp_value), "transport": ext_json(&tr_value), "instance": w() })
    });
    ctx.tally.record("lp_certificates", lp_run.certificate_ok() && tr_run.certificate_ok(), w);
    if let Some(plan) = &plan {
        let valid = plan.is_transition_matrix(&mu, &nu) && plan.weight(&space) == tr_value;
        ctx.tally.record("optimal_plan_valid", valid, || json!({ "plan": plan.to_json(&space), "instance": w() }));
        let moves = ctx.tally.ok("decomposition", decompose_plan(&space, &mu, plan), w);
        if let Some(moves) = moves {
            let total: ExtRat = moves.iter().map(|m| m.cost.clone()).sum();
            let replay = apply_moves(&mu, &moves).map(|r| r == nu).unwrap_or(false);
            ctx.tally.record("decomposition", total == plan.weight(&space) && replay, w);
        }
    }
    // Any plan costs at least the optimum; the independent coupling is one.
    let mut product = TransportPlan::diagonal(&SimpleValuation::zero(n));
    for (x, a) in mu.support() {
        for (y, b) in nu.support() {
            product.t[x][y] = a * b;
        }
    }
    ctx.tally.record("plan_weight_bounds_value", product.weight(&space) >= lp_value, w);

    let mut previous: Option<ExtRat> = None;
    for a in [ratio(1, 2), Rational::one(), int(3)] {
        let bounded = ctx.tally.ok("bounded_duality", dkrh_lp_run(&space, &mu, &nu, Some(&a)), w);
        let transport = ctx.tally.ok("bounded_duality", dkrha_transport_run(&space, &mu, &nu, &a), w);
        let (Some((lp_a, run_a)), Some((tr_a, plan_a, trun_a))) = (bounded, transport) else {
            continue;
        };
        let ww = || json!({ "bound": a.to_string(), "lp": ext_json(&lp_a), "transport": tr_a.to_string(), "instance": w() });
        ctx.tally.record("bounded_duality", lp_a == ExtRat::finite(tr_a.clone()), ww);
        ctx.tally.record("bounded_at_most_a", lp_a.le_rat(&a), ww);
        ctx.tally.record("bounded_certificates", run_a.certificate_ok() && trun_a.certificate_ok(), ww);
        ctx.tally.record(
            "bounded_plan_valid",
            plan_a.is_bounded_plan(&mu, &nu) && plan_a.weight(&space) == ExtRat::finite(tr_a.clone()),
            ww,
        );
        let monotone = previous.as_ref().is_none_or(|p| *p <= lp_a) && lp_a <= lp_value;
        ctx.tally.record("bound_family_monotone", monotone, ww);
        previous = Some(lp_a);
    }
    // When finite, the unbounded optimum is reached at the bound max(h*).
    if let (true, Some(sol)) = (lp_value.is_finite(), lp_run.outcome.optimal()) {
        let top = sol.primal.iter().max().cloned().unwrap_or_else(Rational::zero);
        if top > Rational::zero() {
            let at_top = dkrh_lp(&space, &mu, &nu, Some(&top));
            ctx.tally.record("bound_family_sup", at_top.as_ref() == Ok(&lp_value), w);
        }
    }

    // Dirac identities on every pair of points.
    let a = ctx.bound();
    for x in space.points() {
        for y in space.points() {
            let (dx, dy) = (SimpleValuation::dirac(n, x), SimpleValuation::dirac(n, y));
            let d = space.d(x, y);
            let wd = || json!({ "space": space.to_json(), "x": space.label(x), "y": space.label(y), "bound": a.to_string() });
            ctx.tally.record("dirac", dkrh_lp(&space, &dx, &dy, None).as_ref() == Ok(d), wd);
            ctx.tally.record("dirac_bounded", dkrh_lp(&space, &dx, &dy, Some(&a)) == Ok(d.cap(&a)), wd);
        }
    }

    // The naive supremum of the two-element chain (mu, r + d) <= (nu, r).
    if let Some(d) = lp_value.as_finite() {
        let r = gen::random_radius(ctx.rng);
        let chain = vec![(mu.clone(), &r + d), (nu.clone(), r.clone())];
        let leq = ball_leq_valuations(&space, (&chain[0].0, &chain[0].1), (&chain[1].0, &chain[1].1), None);
        ctx.tally.record("ball_order", leq == Ok(true), w);
        let alpha = gen::random_alpha(ctx.rng);
        let probes: Vec<(ExtFunc, Rational)> = (0..4)
            .map(|_| (envelope(&space, &gen::random_function(ctx.rng, n, true), &alpha), alpha.clone()))
            .collect();
        if let Some(table) = ctx.tally.ok("naive_sup", naive_sup_chain(&space, &chain, &probes), w) {
            let top: Vec<ExtRat> = probes.iter().map(|(h, _)| integrate(&nu, h)).collect();
            ctx.tally.record("naive_sup", table == top, w);
        }
    }

    if let Some(sym) = ctx.symmetric_space(6) {
        let m = sym.len();
        let (p, q) = (gen::random_normalized(ctx.rng, m), gen::random_normalized(ctx.rng, m));
        let a = ctx.bound();
        let ws = || json!({ "bound": a.to_string(), "instance": vals_json(&sym, &[&p, &q]) });
        let there = dkrh_lp(&sym, &p, &q, Some(&a));
        let back = dkrh_lp(&sym, &q, &p, Some(&a));
        ctx.tally.record("symmetric_bounded", there.is_ok() && there == back, ws);
        let there = dkrh_lp(&sym, &p, &q, None);
        let back = dkrh_lp(&sym, &q, &p, None);
        if matches!((&there, &back), (Ok(x), Ok(y)) if x.is_finite() && y.is_finite()) {
            ctx.tally.record("symmetric_unbounded", there == back, ws);
        }
    }
}

fn envelopes(ctx: &mut Ctx<'_>) {
    let space = ctx.space(6);
    let n = space.len();
    let f = gen::random_function(ctx.rng, n, true);
    let alpha = gen::random_alpha(ctx.rng);
    let w = || json!({ "space": space.to_json(), "f": f.to_json(&space), "alpha": alpha.to_string() });
    let env = envelope(&space, &f, &alpha);
    ctx.tally.record("envelope_lipschitz", is_alpha_lipschitz(&space, &env, &alpha), w);
    ctx.tally.record("envelope_below", env.le(&f), w);

    // A sampled alpha-Lipschitz minorant: a random Lipschitz map shifted down
    // until it fits under f, then truncated at 0.
    let g = envelope(&space, &gen::random_function(ctx.rng, n, false), &alpha);
    let shift = space
        .points()
        .map(|x| g.get(x).dreal(f.get(x)))
        .max()
        .expect("nonempty");
    let shift = shift.as_finite().cloned().unwrap_or_else(Rational::zero);
    let minorant = ExtFunc::new(
        space
            .points()
            .map(|x| g.get(x).as_finite().and_then(|v| ExtRat::try_finite(v - &shift)).unwrap_or_else(ExtRat::zero))
            .collect(),
    );
    let sampled = is_alpha_lipschitz(&space, &minorant, &alpha) && minorant.le(&f);
    ctx.tally.record("minorant_sampler", sampled, w);
    ctx.tally.record("envelope_maximal", minorant.le(&env), || {
        json!({ "minorant": minorant.to_json(&space), "instance": w() })
    });

    let zero = envelope(&space, &f, &Rational::zero());
    ctx.tally.record(
        "zero_alpha",
        is_alpha_lipschitz(&space, &zero, &Rational::zero()) && zero.le(&f),
        w,
    );

    // A Lipschitz map is its own envelope at alpha and at every larger constant.
    let beta = &alpha * int(2);
    let consistent = envelope(&space, &env, &alpha) == env && envelope(&space, &env, &beta) == env;
    ctx.tally.record("constant_independence", consistent, w);
    let prev = GenPrevision::new(PrevisionKind::Sublinear, vec![gen::random_subnormalized(ctx.rng, n)])
        .expect("one generator");
    let ext = (extend_prevision(&space, &prev, &env, &alpha), extend_prevision(&space, &prev, &env, &beta));
    ctx.tally.record("extension_independence", matches!(&ext, (Ok(a), Ok(b)) if a == b), w);

    let mut last: Option<ExtFunc> = None;
    for k in 1..=4u32 {
        let Some(step) = ctx.tally.ok("step_below_envelope", step_envelope(&space, &f, &alpha, k), w) else {
            return;
        };
        let wk = || json!({ "K": k, "step": step.to_json(&space), "instance": w() });
        ctx.tally.record("step_below_envelope", step.le(&env), wk);
        ctx.tally.record("step_increasing", last.as_ref().is_none_or(|l| l.le(&step)), wk);
        if k >= 3 {
            // f takes values in (1/2)Z up to 3, so it is its own dyadic step
            // function at K >= 3 once capped at K.
            let kk = int(k.into());
            let capped = ExtFunc::new(f.values().iter().map(|v| v.cap(&kk)).collect());
            ctx.tally.record("step_dyadic_exact", step == envelope(&space, &capped, &alpha), wk);
        }
        last = Some(step);
    }

    // The least 1-Lipschitz map above a few point constraints.
    let mut pts: Vec<usize> = space.points().filter(|_| ctx.rng.gen_bool(0.5)).collect();
    pts.dedup();
    let pairs: Vec<(usize, ExtRat)> = pts.iter().map(|&x| (x, f.get(x).clone())).collect();
    let cs = LipschitzConstraintSet::new(pairs.clone()).expect("distinct points");
    let m = min_lip_above(&space, &cs);
    let meets = pairs.iter().all(|(x, b)| m.get(*x) >= b);
    ctx.tally.record("min_lip_above", is_alpha_lipschitz(&space, &m, &Rational::one()) && meets, w);
}

fn monad(ctx: &mut Ctx<'_>) {
    let space = ctx.space(6);
    let n = space.len();
    let samples = gen::monad_samples(ctx.rng, n, 500);
    let report = check_monad_laws(&space, &samples);
    let laws = ["unit_left", "unit_right", "associativity", "counit_order"];
    for (i, law) in laws.iter().enumerate() {
        let failed = report
            .failures
            .iter()
            .find(|f| f.starts_with(&format!("({})", ["i", "ii", "iii", "iv"][i])));
        ctx.tally.record(law, failed.is_none() && report.checked[i] >= 500, || {
            json!({ "space": space.to_json(), "failure": failed })
        });
    }

    let balls: Vec<FormalBall> = (0..3).map(|_| gen::random_ball(ctx.rng, n)).collect();
    let bj = || json!({ "space": space.to_json(), "balls": balls.iter().map(|b| b.to_json(&space)).collect::<Vec<_>>() });
    let d = |i: usize, j: usize| dplus(&space, &balls[i], &balls[j]);
    let tri = (0..3).all(|i| (0..3).all(|j| (0..3).all(|k| d(i, k) <= &d(i, j) + &d(j, k))));
    ctx.tally.record("dplus_triangle", tri, bj);
    let spec = (0..3).all(|i| (0..3).all(|j| d(i, j).is_zero() == ball_leq(&space, &balls[i], &balls[j])));
    ctx.tally.record("dplus_specialization_is_ball_order", spec, bj);
    let wb = (0..3).all(|i| (0..3).all(|j| !way_below(&space, &balls[i], &balls[j]) || ball_leq(&space, &balls[i], &balls[j])));
    ctx.tally.record("way_below_implies_below", wb, bj);

    // Upper bounds are searched on the grid (1/12)Z, which contains every
    // radius `r - d(x, y)` that can occur here.
    let family = &balls[..ctx.rng.gen_range(1..=3)];
    let grid = |y: usize| (0..=96).map(move |k| FormalBall::new(y, ratio(k, 12)));
    let is_upper_bound = |c: &FormalBall| family.iter().all(|b| ball_leq(&space, b, c));
    match lub_formal_balls(&space, family) {
        Ok(lub) => {
            let least = space.points().all(|y| grid(y).all(|c| !is_upper_bound(&c) || ball_leq(&space, &lub, &c)));
            ctx.tally.record("lub_is_least_upper_bound", is_upper_bound(&lub) && least, bj);
        }
        Err(e @ (Error::NoUpperBound | Error::NoLeast)) => {
            // A least upper bound would be the largest-radius bound at its center.
            let best: Vec<FormalBall> = space
                .points()
                .filter_map(|y| grid(y).rfind(|c| is_upper_bound(c)))
                .collect();
            let consistent = match e {
                Error::NoUpperBound => best.is_empty(),
                _ => !best.is_empty() && !best.iter().any(|c| best.iter().all(|o| ball_leq(&space, c, o))),
            };
            ctx.tally.record("lub_absent_consistent", consistent, bj);
        }
        Err(e) => ctx.tally.record("lub_is_least_upper_bound", false, || json!({ "error": e.to_string(), "instance": bj() })),
    }
}

fn powerdomains(ctx: &mut Ctx<'_>) {
    let space = ctx.space(4);
    let n = space.len();
    let w = || space.to_json();
    if n <= 6 {
        let all: Vec<PointSet> = PointSet::all_subsets(n).collect();
        let lowers: Vec<&PointSet> = all.iter().filter(|s| is_lower(&space, s)).collect();
        let uppers: Vec<&PointSet> = all.iter().filter(|s| !s.is_empty() && is_upper(&space, s)).collect();
        let dh_ok = lowers
            .iter()
            .all(|c| lowers.iter().all(|c2| dh(&space, c, c2, None).is_zero() == c.is_subset(c2)));
        ctx.tally.record("dh_zero_iff_subset", dh_ok, w);
        let dq_ok = uppers.iter().all(|q| {
            uppers
                .iter()
                .all(|q2| dq(&space, q, q2, None).map(|v| v.is_zero()) == Ok(q2.is_subset(q)))
        });
        ctx.tally.record("dq_zero_iff_superset", dq_ok, w);

        if n <= 5 {
            let mut lens_ok = true;
            let mut neighbourhood_ok = true;
            for q in &uppers {
                for c in &lowers {
                    let valid = validate_quasi_lens(&space, q, c).is_empty();
                    if valid {
                        let made = make_quasi_lens(&space, &q.intersection(c)).expect("core nonempty");
                        lens_ok &= made.q() == *q && made.c() == *c;
                    }
                    // With the other conditions in place, testing U = Q alone
                    // is equivalent to testing every open U containing Q.
                    let core = q.intersection(c);
                    if !core.is_empty() {
                        let at_q = c.is_subset(&crate::sets::lower_closure(&space, &core));
                        neighbourhood_ok &= at_q == neighbourhood_condition_all_opens(&space, q, c);
                    }
                }
            }
            ctx.tally.record("valid_lens_is_generated", lens_ok, w);
            ctx.tally.record("neighbourhood_reduction", neighbourhood_ok, w);
        }
    }
    let pts = gen::random_nonempty_set(ctx.rng, n);
    let lens = make_quasi_lens(&space, &pts).expect("nonempty");
    ctx.tally.record("make_lens_valid", validate_quasi_lens(&space, lens.q(), lens.c()).is_empty(), || {
        sets_json(&space, &[&pts])
    });

    let (c, c2) = (gen::random_lower(ctx.rng, &space), gen::random_lower(ctx.rng, &space));
    let (r, r2) = (gen::random_radius(ctx.rng), gen::random_radius(ctx.rng));
    let gap = &r - &r2;
    let wb = || json!({ "sets": sets_json(&space, &[&c, &c2]), "r": r.to_string(), "r2": r2.to_string() });
    let direct = gap >= Rational::zero() && dh(&space, &c, &c2, None).le_rat(&gap);
    ctx.tally.record("ball_leq_h_matches_dh", ball_leq_h(&space, (&c, &r), (&c2, &r2)) == direct, wb);
    let (q, q2) = (gen::random_upper(ctx.rng, &space), gen::random_upper(ctx.rng, &space));
    let wq = || json!({ "sets": sets_json(&space, &[&q, &q2]), "r": r.to_string(), "r2": r2.to_string() });
    let direct = gap >= Rational::zero() && dq(&space, &q, &q2, None).map(|v| v.le_rat(&gap)).unwrap_or(false);
    ctx.tally.record("ball_leq_q_matches_dq", ball_leq_q(&space, (&q, &r), (&q2, &r2)) == direct, wq);
}

fn dirac(kind: PrevisionKind, n: usize, set: &PointSet) -> GenPrevision {
    GenPrevision::dirac(kind, n, set.iter())
}

fn isometries(ctx: &mut Ctx<'_>) {
    let space = ctx.space(6);
    let n = space.len();
    let a = ctx.bound();

    let (c, c2) = (gen::random_lower(ctx.rng, &space), gen::random_lower(ctx.rng, &space));
    let w = || json!({ "bound": a.to_string(), "instance": sets_json(&space, &[&c, &c2]) });
    let (f, f2) = (dirac(PrevisionKind::Sublinear, n, &c), dirac(PrevisionKind::Sublinear, n, &c2));
    for bound in [None, Some(&a)] {
        let name = if bound.is_some() { "dh_bounded_sublinear" } else { "dh_sublinear" };
        let v = dkrh_sublinear(&space, &f, &f2, bound);
        ctx.tally.record(name, v == Ok(dh(&space, &c, &c2, bound)), || {
            json!({ "previsions": v.as_ref().map(ext_json).ok(), "dh": ext_json(&dh(&space, &c, &c2, bound)), "instance": w() })
        });
    }

    let (q, q2) = (gen::random_upper(ctx.rng, &space), gen::random_upper(ctx.rng, &space));
    let w = || json!({ "bound": a.to_string(), "instance": sets_json(&space, &[&q, &q2]) });
    let (f, f2) = (dirac(PrevisionKind::Superlinear, n, &q), dirac(PrevisionKind::Superlinear, n, &q2));
    for bound in [None, Some(&a)] {
        let name = if bound.is_some() { "dq_bounded_superlinear" } else { "dq_superlinear" };
        let v = dkrh_superlinear(&space, &f, &f2, bound);
        let expect = dq(&space, &q, &q2, bound);
        ctx.tally.record(name, v.is_ok() && v == expect, || {
            json!({ "previsions": v.as_ref().map(ext_json).ok(), "dq": expect.as_ref().map(ext_json).ok(), "instance": w() })
        });
    }

    let l = make_quasi_lens(&space, &gen::random_nonempty_set(ctx.rng, n)).expect("nonempty");
    let l2 = make_quasi_lens(&space, &gen::random_nonempty_set(ctx.rng, n)).expect("nonempty");
    let wl = || json!({ "space": space.to_json(), "bound": a.to_string(), "lenses": [l.to_json(&space), l2.to_json(&space)] });
    let forks = (fork_from_lens(&space, &l, &[]), fork_from_lens(&space, &l2, &[]));
    if let (Some(f), Some(f2)) = (ctx.tally.ok("dp_fork", forks.0, wl), ctx.tally.ok("dp_fork", forks.1, wl)) {
        for bound in [None, Some(&a)] {
            let name = if bound.is_some() { "dp_bounded_fork" } else { "dp_fork" };
            let v = fork_distance(&space, &f, &f2, bound);
            ctx.tally.record(name, v.is_ok() && v == dp(&space, &l, &l2, bound), wl);
        }
    }

    if let Some(sym) = ctx.symmetric_space(6) {
        let m = sym.len();
        let (e, e2) = (gen::random_nonempty_set(ctx.rng, m), gen::random_nonempty_set(ctx.rng, m));
        let (l, l2) = (make_quasi_lens(&sym, &e).expect("nonempty"), make_quasi_lens(&sym, &e2).expect("nonempty"));
        let v = dp(&sym, &l, &l2, None);
        ctx.tally.record("dp_is_hausdorff", v == Ok(hausdorff(&sym, &e, &e2)), || sets_json(&sym, &[&e, &e2]));
        let (p, p2) = (gen::random_normalized(ctx.rng, m), gen::random_normalized(ctx.rng, m));
        let b = ctx.bound();
        let there = dkrh_lp(&sym, &p, &p2, Some(&b));
        ctx.tally.record("dkrh_a_symmetric", there.is_ok() && there == dkrh_lp(&sym, &p2, &p, Some(&b)), || {
            json!({ "bound": b.to_string(), "instance": vals_json(&sym, &[&p, &p2]) })
        });
    }

    // Previsions with random generators: quasi-metric laws and hull invariance.
    for kind in [PrevisionKind::Sublinear, PrevisionKind::Superlinear] {
        let name = match kind {
            PrevisionKind::Sublinear => "sublinear",
            PrevisionKind::Superlinear => "superlinear",
        };
        let ps: Vec<GenPrevision> = (0..3)
            .map(|_| {
                let k = ctx.rng.gen_range(1..=3);
                let gens = (0..k).map(|_| gen::random_subnormalized(ctx.rng, n)).collect();
                GenPrevision::new(kind, gens).expect("valid generators")
            })
            .collect();
        let d = |x: &GenPrevision, y: &GenPrevision| match kind {
            PrevisionKind::Sublinear => dkrh_sublinear(&space, x, y, Some(&a)),
            PrevisionKind::Superlinear => dkrh_superlinear(&space, x, y, Some(&a)),
        };
        let probes: Vec<ExtFunc> = (0..6).map(|_| gen::random_monotone(ctx.rng, &space)).collect();
        let wp = || {
            json!({
                "space": space.to_json(),
                "bound": a.to_string(),
                "previsions": ps.iter().map(|p| p.to_json(&space)).collect::<Vec<_>>(),
            })
        };
        let same_eval = |x: &GenPrevision, y: &GenPrevision| {
            probes.iter().all(|h| eval_prevision(x, h) == eval_prevision(y, h))
        };
        quasi_metric_triple(ctx, &format!("{}_prevision", name), [&ps[0], &ps[1], &ps[2]], d, same_eval, wp);

        let p = &ps[0];
        let t = ratio(ctx.rng.gen_range(0..=4), 4);
        let g = p.generators();
        let mixed = p.with_generator(g[0].mix(&g[g.len() - 1], &t)).expect("mixture has mass <= 1");
        let evals_equal = probes.iter().all(|h| eval_prevision(p, h) == eval_prevision(&mixed, h));
        let dists_equal = d(p, &ps[1]) == d(&mixed, &ps[1]) && d(&ps[1], p) == d(&ps[1], &mixed);
        ctx.tally.record(&format!("{}_hull_invariance", name), evals_equal && dists_equal, wp);
    }
}

fn minimax(ctx: &mut Ctx<'_>) {
    let space = ctx.space(4);
    let n = space.len();
    let g = gen::random_normalized(ctx.rng, n);
    let k = ctx.rng.gen_range(1..=3);
    let gens: Vec<SimpleValuation> = (0..k).map(|_| gen::random_normalized(ctx.rng, n)).collect();
    let side = if ctx.rng.gen_bool(0.5) { Side::AN } else { Side::DN };
    let a = ctx.bound();
    let alpha = gen::random_alpha(ctx.rng);
    let w = || {
        json!({
            "side": format!("{:?}", side),
            "bound": a.to_string(),
            "alpha": alpha.to_string(),
            "instance": vals_json(&space, &std::iter::once(&g).chain(&gens).collect::<Vec<_>>()),
        })
    };
    if let Some((lhs, rhs)) = ctx.tally.ok("lhs_equals_rhs", minimax_check(&space, &g, &gens, side, &a, &alpha), w) {
        ctx.tally.record("lhs_equals_rhs", lhs == rhs, || {
            json!({ "lhs": lhs.to_string(), "rhs": rhs.to_string(), "instance": w() })
        });
        ctx.tally.record("value_within_bound", lhs >= Rational::zero(), w);
    }
}

fn walley(ctx: &mut Ctx<'_>) {
    let space = ctx.space(6);
    let n = space.len();
    let exhaustive = exhaustive_walley_probes(&space, &Rational::one(), &int(2));
    let probes = match &exhaustive {
        Some(p) => p.clone(),
        None => (0..500)
            .map(|_| (gen::random_monotone(ctx.rng, &space), gen::random_monotone(ctx.rng, &space)))
            .collect(),
    };
    let name = if exhaustive.is_some() { "lens_fork_exhaustive" } else { "lens_fork_random" };
    let pts = gen::random_nonempty_set(ctx.rng, n);
    let lens = make_quasi_lens(&space, &pts).expect("nonempty");
    let w = || json!({ "space": space.to_json(), "lens": lens.to_json(&space) });
    let Some(fork) = ctx.tally.ok(name, fork_from_lens(&space, &lens, &probes), w) else {
        return;
    };
    ctx.tally.record(name, probes.len() >= 500 || exhaustive.is_some(), w);

    let alt = probes
        .iter()
        .take(200)
        .all(|(h, _)| eval_prevision(fork.lower(), h).ok() == Some(lens_lower_alt(&lens, h)));
    ctx.tally.record("lower_part_two_forms", alt, w);

    // Swapping the parts breaks Walley's condition as soon as the lens core
    // has two points.
    if lens.core().len() >= 2 {
        let swapped = Fork::new_unchecked(fork.upper().clone(), fork.lower().clone());
        let caught = check_walley(&swapped, &probes).map(|r| !r.passed()).unwrap_or(false);
        ctx.tally.record("corrupted_fork_caught", caught, w);
    }
}
