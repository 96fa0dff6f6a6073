//! Neutral-network local search on NKq fitness landscapes.
//!
//! - [`landscape`]: NKq generation, exact integer evaluation, text documents.
//! - [`neighborhood`]: one-bit neighborhoods, evolvability, locality predicates.
//! - [`heuristics`]: hill climbing (one and two step), Netcrawler, Scuba Search
//!   and its generic two-phase form.
//! - [`experiments`]: seeded sweeps, neutral-degree statistics and CSV output.
//! - [`pathgraph`]: hypercube graphs of small landscapes, DOT export, census.

pub mod experiments;
pub mod genotype;
pub mod heuristics;
pub mod landscape;
pub mod neighborhood;
pub mod pathgraph;
pub mod seed;

pub use genotype::Genotype;
pub use heuristics::{HeuristicKind, RunResult};
pub use landscape::{EpistasisMode, Fitness, NkqLandscape};
pub use neighborhood::EvalCounter;
