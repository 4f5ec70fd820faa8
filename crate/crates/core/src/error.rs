use thiserror::Error;

use qmet_lp::LpError;

/// A single failed quasi-metric axiom, naming its witnesses by label.
#[derive(Debug, Clone, PartialEq, Eq, Error, serde::Serialize)]
#[serde(tag = "violation")]
pub enum Violation {
    #[error("d({x},{x}) is not 0")]
    ZeroDiagonal { x: String },
    #[error("d({x},{z}) > d({x},{y}) + d({y},{z})")]
    Triangle { x: String, y: String, z: String },
    #[error("d({x},{y}) = d({y},{x}) = 0 for distinct points")]
    T0 { x: String, y: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid quasi-metric space: {}", join(.0))]
    InvalidSpace(Vec<Violation>),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("label {0:?} appears in both spaces")]
    LabelClash(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("objects live on different spaces")]
    SpaceMismatch,
    #[error("valuation is not normalized")]
    NotNormalized,
    #[error("invalid transport plan: {0}")]
    InvalidPlan(String),
    #[error("no upper bound")]
    NoUpperBound,
    #[error("upper bounds exist but none is least")]
    NoLeast,
    #[error("entry {0} is not below its successor")]
    NotAChain(usize),
    #[error("Smyth elements must be nonempty")]
    EmptySmythElement,
    #[error("generator set is empty")]
    EmptyGenerator,
    #[error("set is not {0}")]
    NotClosed(&'static str),
    #[error("invalid quasi-lens: {0}")]
    InvalidLens(String),
    #[error("prevision kinds do not match")]
    KindMismatch,
    #[error("Walley's condition fails: {0}")]
    WalleyViolation(String),
    #[error("function is not {0}-Lipschitz")]
    NotLipschitz(String),
    #[error("bound must be positive")]
    InvalidBound,
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
