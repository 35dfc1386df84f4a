//! Simulation and verification of three maximal-segmental-score statistics
//! of a random walk with negative drift: the reflected walk `R_n`, the excess
//! `R*_n - y` of its running maximum, and the overshoot `O_{x+y}` of its first
//! passage above `x + y`.
//!
//! The crate provides step laws with closed-form moment generating functions,
//! the Cramér root solver, a reproducible parallel path engine, series for the
//! transforms of the limiting overshoot and reflected value, exact lattice
//! oracles, a compound-Poisson embedding, and the statistical tests that turn
//! samples into verdicts.

pub mod cli;
pub mod cramer;
pub mod embedding;
pub mod error;
pub mod lattice;
pub mod laws;
pub mod output;
pub mod rng;
pub mod spitzer;
pub mod stats;
pub mod verify;
pub mod walk;

pub use cramer::{compute_rho, solve_gamma, CramerSolution};
pub use embedding::{embed_path, run_embedding, EmbedConfig, EmbeddedSample};
pub use error::{Error, Result};
pub use lattice::LatticePmf;
pub use laws::StepLaw;
pub use rng::{Purpose, RngStream};
pub use spitzer::{Estimator, SeriesConfig, SpitzerSeries, TransformEval, Truncation};
pub use stats::{GumbelReport, IndependenceReport, KsReport};
pub use walk::{run_batch, run_path, BatchConfig, Passage, PassageMode, TripletSample};
