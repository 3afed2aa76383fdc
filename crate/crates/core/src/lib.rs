//! Monte Carlo replication of a two-phase latent-print error-rate study, and
//! the frequentist and Bayesian estimators used to audit false-positive-rate
//! claims made from its data.
//!
//! The crate is organised as:
//! - [`model`]: decision categories, rate vectors and presets, the study design;
//! - [`sampling`]: seedable binomial, multinomial and subset draws;
//! - [`simulator`]: the replication itself and its summary tables;
//! - [`inference`]: ratio estimators, Beta posteriors, Fisher's exact test;
//! - [`report`]: rendering and the all-experiments report.

pub mod error;
pub mod inference;
pub mod model;
pub mod report;
pub mod sampling;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{
    build_rate_vector_pair, preset_rate_vectors, CategoryCounts, DecisionCategory,
    DecisionCountTable, InconclusiveSource, ObservedCounts, PhaseTotals, Rate, RateBuildOptions,
    RateVector, RateVectorPair, SourceScenario, StudyDesign, PRESET_NAMES,
};
pub use sampling::RngStream;
pub use simulator::{run_study, PartitionMode, SimulationSummary, StudyOptions};
