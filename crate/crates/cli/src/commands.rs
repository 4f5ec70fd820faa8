use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use qmet_core::checks::{run_suite, CheckConfig, Suite};
use qmet_core::powerdomains::{dh, dp, dq};
use qmet_core::previsions::{check_walley, exhaustive_walley_probes, fork_distance};
use qmet_core::sets::{is_lower, is_upper};
use qmet_core::valuations::{decompose_plan, dkrh_lp_run, dkrh_transport_run, dkrha_transport_run};
use qmet_core::{gen, Error, ExtFunc, ExtRat, Fork, PointSet, QSpace, QuasiLens, Rational, SimpleValuation};

use crate::DistKind;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed(_) | Error::UnknownLabel(_) | Error::LabelClash(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 3,
        message: format!("{}: {}", path.display(), e),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| io_failure(path, e))
}

fn load_space(path: &Path) -> Result<QSpace, Failure> {
    QSpace::from_json(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn emit(report: &Value) {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
}

pub fn validate(path: &Path) -> Outcome {
    match QSpace::from_json(&read(path)?) {
        Ok(space) => {
            emit(&json!({ "valid": true, "points": space.len() }));
            Ok(0)
        }
        Err(Error::InvalidSpace(violations)) => {
            emit(&json!({ "valid": false, "violations": violations }));
            Ok(2)
        }
        Err(e) => Err(io_failure(path, e)),
    }
}

fn ext(v: &ExtRat) -> Value {
    Value::String(v.to_string())
}

fn kind_name(kind: DistKind) -> &'static str {
    match kind {
        DistKind::Dkrh => "dkrh",
        DistKind::DkrhA => "dkrh-a",
        DistKind::Dh => "dh",
        DistKind::Dq => "dq",
        DistKind::Dp => "dp",
        DistKind::Fork => "fork",
    }
}

pub fn dist(kind: DistKind, bound: Option<&Rational>, space: &Path, lhs: &Path, rhs: &Path) -> Outcome {
    if kind == DistKind::DkrhA && bound.is_none() {
        return Err(Failure {
            code: 1,
            message: "--kind dkrh-a requires --bound".into(),
        });
    }
    let space = load_space(space)?;
    let (l, r) = (read_json(lhs)?, read_json(rhs)?);
    let mut report = json!({
        "kind": kind_name(kind),
        "bound": bound.map(|a| a.to_string()),
    });
    let mut code = 0;
    let value = match kind {
        DistKind::Dkrh | DistKind::DkrhA => {
            let mu = SimpleValuation::from_json(&space, &l)?;
            let nu = SimpleValuation::from_json(&space, &r)?;
            let (value, code_) = dkrh_report(&space, &mu, &nu, bound, &mut report)?;
            code = code_;
            value
        }
        DistKind::Dh => {
            let c = PointSet::from_json(&space, &l)?;
            let c2 = PointSet::from_json(&space, &r)?;
            if !is_lower(&space, &c) || !is_lower(&space, &c2) {
                return Err(Error::NotClosed("a lower set").into());
            }
            dh(&space, &c, &c2, bound)
        }
        DistKind::Dq => {
            let q = PointSet::from_json(&space, &l)?;
            let q2 = PointSet::from_json(&space, &r)?;
            if !is_upper(&space, &q) || !is_upper(&space, &q2) {
                return Err(Error::NotClosed("an upper set").into());
            }
            dq(&space, &q, &q2, bound)?
        }
        DistKind::Dp => {
            let a = QuasiLens::from_json(&space, &l)?;
            let b = QuasiLens::from_json(&space, &r)?;
            dp(&space, &a, &b, bound)?
        }
        DistKind::Fork => {
            let f = Fork::from_json(&space, &l)?;
            let f2 = Fork::from_json(&space, &r)?;
            let (probes, mode) = match exhaustive_walley_probes(&space, &Rational::from_integer(1.into()), &Rational::from_integer(2.into())) {
                Some(p) => (p, "exhaustive"),
                None => {
                    let mut rng = gen::rng(0);
                    let p = (0..500)
                        .map(|_| (gen::random_monotone(&mut rng, &space), gen::random_monotone(&mut rng, &space)))
                        .collect();
                    (p, "sampled")
                }
            };
            for (name, fork) in [("lhs", &f), ("rhs", &f2)] {
                let walley = check_walley(fork, &probes)?;
                if let Some(w) = walley.violations.first() {
                    return Err(Error::WalleyViolation(format!("{}: {}", name, w.describe(&space))).into());
                }
            }
            report["walley"] = json!(mode);
            fork_distance(&space, &f, &f2, bound)?
        }
    };
    report["value"] = ext(&value);
    emit(&report);
    Ok(code)
}

fn function_json(space: &QSpace, values: &[Rational]) -> Value {
    ExtFunc::new(values[..space.len()].iter().cloned().map(ExtRat::finite).collect()).to_json(space)
}

/// Both routes for valuations; the transport route needs normalized inputs.
fn dkrh_report(
    space: &QSpace,
    mu: &SimpleValuation,
    nu: &SimpleValuation,
    bound: Option<&Rational>,
    report: &mut Value,
) -> Result<(ExtRat, u8), Failure> {
    let (lp_value, lp_run) = dkrh_lp_run(space, mu, nu, bound)?;
    let mut witness = json!({});
    match &lp_run.outcome {
        qmet_core::lp::LpOutcome::Optimal(sol) => {
            witness["h"] = function_json(space, &sol.primal);
        }
        qmet_core::lp::LpOutcome::Unbounded { ray, .. } => {
            witness["ray"] = function_json(space, ray);
        }
        _ => {}
    }
    let mut certificates = json!({ "lp": lp_run.certificate_ok() });
    let mut routes = json!({ "lp": ext(&lp_value), "transport": null });
    let mut code = 0;
    if mu.is_normalized() && nu.is_normalized() {
        let tr_value = match bound {
            None => {
                let (v, plan, run) = dkrh_transport_run(space, mu, nu)?;
                certificates["transport"] = json!(run.certificate_ok());
                if let Some(plan) = plan {
                    witness["plan"] = plan.to_json(space);
                    let moves = decompose_plan(space, mu, &plan)?;
                    witness["moves"] = moves.iter().map(|m| m.to_json(space)).collect();
                }
                v
            }
            Some(a) => {
                let (v, plan, run) = dkrha_transport_run(space, mu, nu, a)?;
                certificates["transport"] = json!(run.certificate_ok());
                witness["plan"] = plan.to_json(space);
                ExtRat::finite(v)
            }
        };
        routes["transport"] = ext(&tr_value);
        if tr_value != lp_value {
            code = 2;
        }
    }
    witness["lp_certificates"] = certificates;
    report["routes"] = routes;
    report["routes_agree"] = json!(code == 0);
    report["witness"] = witness;
    Ok((lp_value, code))
}

pub fn check(suite: Suite, space: Option<&Path>, seed: u64, trials: usize, out: Option<&Path>) -> Outcome {
    let space = space.map(load_space).transpose()?;
    let config = CheckConfig { seed, trials, space };
    let report = run_suite(suite, &config)?;
    let text = format!("{}\n", serde_json::to_string_pretty(&report.to_json()).expect("report serializes"));
    print!("{}", text);
    if let Some(out) = out {
        fs::write(out, &text).map_err(|e| io_failure(out, e))?;
    }
    Ok(if report.passed() { 0 } else { 2 })
}
