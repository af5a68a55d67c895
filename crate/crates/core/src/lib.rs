//! Cost-minimizing (Q, R) policy and storage-climate selection for a single
//! perishable item held in a cold warehouse.
//!
//! The crate is organised around five pieces:
//!
//! * [`model`]: domain types, the annual cost function and every constraint.
//! * [`quality`]: synthetic quality datasets and the least-squares fit that
//!   produces the [`QualityModel`] used as a constraint.
//! * [`solver`]: exact solution by enumerating the nine
//!   (packaging, environment) pairs, plus a grid-refinement oracle and a KKT
//!   certificate.
//! * [`analysis`]: one-parameter sweeps, trend checks and Monte Carlo checks
//!   of the closed-form expectations.
//! * [`cli`]: scenario files and the `coldopt` command line.
//!
//! Data-parallel loops (combination enumeration, oracle grids, sweeps, Monte
//! Carlo blocks, dataset rows) go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Results are
//! identical either way.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod exec;
mod linalg;
pub mod model;
pub mod quality;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{
    CostBreakdown, ConstraintId, ConstraintReport, DecisionVector, LeadTimeDemand, Level,
    QualityModel, ScenarioParameters,
};
pub use solver::{InfeasibilityCause, InfeasibilityDiagnosis, Solution};
