//! Exact quasi-metric constructions on finite spaces.
//!
//! Everything is computed over exact rationals extended with `+inf`
//! ([`ExtRat`]). The crate covers finite quasi-metric spaces and their
//! specialization order, formal balls, Lipschitz envelopes, the
//! Kantorovich-Rubinshtein-Hutchinson quasi-metrics on simple valuations and
//! on finitely generated previsions, and the Hoare, Smyth and Plotkin
//! powerdomain quasi-metrics. Distances that are characterized in two ways
//! (a Lipschitz-function LP and a transport LP, say) are computed both ways so
//! the equalities can be checked exactly.

pub mod balls;
pub mod checks;
pub mod error;
pub mod ext;
pub mod fixtures;
pub mod gen;
pub mod lipschitz;
pub mod powerdomains;
pub mod previsions;
pub mod sets;
pub mod space;
pub mod valuations;

pub use qmet_lp::Rational;
/// The exact LP solver the distances are computed with.
pub use qmet_lp as lp;

pub use balls::{DoubleBall, FormalBall};
pub use error::{Error, Result, Violation};
pub use ext::ExtRat;
pub use lipschitz::ExtFunc;
pub use powerdomains::QuasiLens;
pub use previsions::{Fork, GenPrevision, PrevisionKind};
pub use sets::PointSet;
pub use space::QSpace;
pub use valuations::{SimpleValuation, TransportPlan};
