//! Equilibrium engine for a two-period location-price game of research
//! funding.
//!
//! Researchers place plans on the characteristic line `[0, 1]`, quote an
//! ex-ante price before the government learns its ideal point `t` and an
//! ex-post price afterwards. The government pays the quadratic mismatch
//! `(t - z)^2` of the best plan it holds plus everything it spent.
//!
//! Stages, in the order they are solved backwards:
//!
//! * [`expost`]: price competition once `t` is known.
//! * [`exante`]: expected ex-post profits and the ex-ante prices they imply.
//! * [`location`]: the equally spaced location equilibrium and a relocation audit.
//! * [`entry`]: free entry under a fixed cost.
//!
//! [`oracle`] holds independent numerical twins of every closed form.
//!
//! All game math is generic over [`Scalar`], so the same code runs on `f64`
//! and on exact rationals ([`Exact`]).

pub mod entry;
pub mod error;
pub mod exante;
pub mod expost;
pub mod location;
pub mod model;
pub mod oracle;
pub mod scalar;

pub use entry::{optimal_variety, variety_sweep, EntryMode, EntrySolution};
pub use error::{GameError, Result};
pub use exante::{Adoption, ExAnteSolution, SpeComparison};
pub use expost::ExPostOutcome;
pub use location::{DeviationScan, EquilibriumReport};
pub use model::{make_profile, nearest_two, AdoptionSet, GovernmentPrefs, IdealPoint, LocationProfile, PlanSpec, Scenario};
pub use oracle::{OracleMethod, OracleReport, Verdict};
pub use scalar::{Exact, Scalar};

/// Profile over `f64`.
pub type Profile = LocationProfile<f64>;
/// Profile over exact rationals.
pub type ExactProfile = LocationProfile<Exact>;
pub type Outcome = ExPostOutcome<f64>;
pub type ExactOutcome = ExPostOutcome<Exact>;
pub type Solution = ExAnteSolution<f64>;
pub type Report = EquilibriumReport<f64>;
