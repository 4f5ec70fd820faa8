//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any
//! failure. Every comparison is exact.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qmet_core::checks::{run_suite, CheckConfig, SuiteReport};
use qmet_core::checks::Suite;

const SEED: u64 = 20_240_601;

struct Runs {
    reports: BTreeMap<&'static str, (SuiteReport, Duration)>,
}

impl Runs {
    fn get(&mut self, suite: Suite, trials: usize) -> &(SuiteReport, Duration) {
        self.reports.entry(suite.name()).or_insert_with(|| {
            let start = Instant::now();
            let config = CheckConfig { seed: SEED, trials, space: None };
            let report = run_suite(suite, &config).expect("suite runs");
            (report, start.elapsed())
        })
    }
}

/// Each listed property must have been checked at least `min` times with no
/// failures.
fn require(report: &SuiteReport, props: &[(&str, usize)]) -> Result<String, String> {
    let table = report.tally.properties();
    let mut parts = Vec::new();
    for &(name, min) in props {
        let key = format!("{}.{}", report.suite.name(), name);
        let Some(t) = table.get(&key) else {
            return Err(format!("{} never checked", key));
        };
        if t.failed > 0 {
            return Err(format!(
                "{}: {} of {} failed; first counterexample {}",
                key,
                t.failed,
                t.checked,
                t.counterexample.as_ref().map(|c| c.to_string()).unwrap_or_default()
            ));
        }
        if t.checked < min {
            return Err(format!("{}: only {} checks, need {}", key, t.checked, min));
        }
        parts.push(format!("{}={}", name, t.checked));
    }
    Ok(parts.join(" "))
}

fn axioms_for(prefixes: &[&'static str]) -> Vec<(String, usize)> {
    prefixes
        .iter()
        .flat_map(|p| ["self_zero", "triangle", "separation"].map(|law| (format!("{}.{}", p, law), 100)))
        .collect()
}

fn criterion_12() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_qmet");
    let start = Instant::now();
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(bin)
            .args(["check", "all", "--seed", "7", "--trials", "50"])
            .env_remove("QMET_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!("exit status {:?}", out.status.code()));
        }
        outputs.push(out.stdout);
    }
    let elapsed = start.elapsed();
    if outputs[0] != outputs[1] {
        return Err("reports differ between runs".into());
    }
    if elapsed > Duration::from_secs(300) {
        return Err(format!("two runs took {:.1?}", elapsed));
    }
    Ok(format!("{} identical bytes, two runs in {:.1?}", outputs[0].len(), elapsed))
}

fn main() -> ExitCode {
    let mut runs = Runs { reports: BTreeMap::new() };
    let mut results: Vec<(u32, &str, Result<String, String>)> = Vec::new();

    let (duality, took) = runs.get(Suite::Duality, 200).clone();
    let c1 = require(&duality, &[("kantorovich", 200), ("lp_certificates", 200)]).and_then(|s| {
        if took < Duration::from_secs(60) {
            Ok(format!("{} in {:.1?}", s, took))
        } else {
            Err(format!("duality suite took {:.1?}", took))
        }
    });
    results.push((1, "Kantorovich duality", c1));
    results.push((
        2,
        "bounded duality",
        require(&duality, &[("bounded_duality", 600), ("bounded_at_most_a", 600), ("bounded_plan_valid", 600)]),
    ));

    let axioms = runs.get(Suite::Axioms, 100).0.clone();
    let names = axioms_for(&["dkrh", "dkrh_a", "dh", "dq", "dp"]);
    let borrowed: Vec<(&str, usize)> = names.iter().map(|(n, m)| (n.as_str(), *m)).collect();
    results.push((3, "quasi-metric axioms", require(&axioms, &borrowed)));

    results.push((4, "Dirac identities", require(&duality, &[("dirac", 200), ("dirac_bounded", 200)])));

    let iso = runs.get(Suite::Isometries, 100).0.clone();
    results.push((
        5,
        "isometries",
        require(
            &iso,
            &[
                ("dh_sublinear", 100),
                ("dh_bounded_sublinear", 100),
                ("dq_bounded_superlinear", 100),
                ("dp_bounded_fork", 100),
            ],
        ),
    ));

    let pd = runs.get(Suite::Powerdomains, 100).0.clone();
    results.push((
        6,
        "specialization characterizations",
        require(&pd, &[("dh_zero_iff_subset", 100), ("dq_zero_iff_superset", 100)]),
    ));

    results.push((
        7,
        "Hausdorff recovery",
        require(&iso, &[("dp_is_hausdorff", 100), ("dkrh_a_symmetric", 100)])
            .and_then(|a| require(&duality, &[("symmetric_bounded", 100)]).map(|b| format!("{} {}", a, b))),
    ));

    let env = runs.get(Suite::Envelopes, 200).0.clone();
    results.push((
        8,
        "envelope maximality",
        require(
            &env,
            &[
                ("envelope_lipschitz", 200),
                ("envelope_below", 200),
                ("envelope_maximal", 200),
                ("constant_independence", 200),
                ("step_below_envelope", 200),
                ("step_dyadic_exact", 1),
            ],
        ),
    ));

    // Each recorded law instance stands for one space with at least 500
    // sampled balls.
    let monad = runs.get(Suite::Monad, 20).0.clone();
    results.push((
        9,
        "monad laws",
        require(&monad, &[("unit_left", 20), ("unit_right", 20), ("associativity", 20), ("counit_order", 20)]),
    ));

    let mm = runs.get(Suite::Minimax, 100).0.clone();
    results.push((10, "minimax", require(&mm, &[("lhs_equals_rhs", 100)])));

    let walley = runs.get(Suite::Walley, 100).0.clone();
    results.push((
        11,
        "Walley condition",
        require(
            &walley,
            &[("lens_fork_exhaustive", 1), ("lens_fork_random", 1), ("corrupted_fork_caught", 1)],
        ),
    ));

    results.push((12, "determinism", criterion_12()));

    let mut failed = false;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {:>2}: PASS {} ({})", n, name, detail),
            Err(why) => {
                failed = true;
                println!("criterion {:>2}: FAIL {} ({})", n, name, why);
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
