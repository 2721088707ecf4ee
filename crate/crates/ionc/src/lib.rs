//! Solver library for the ION-C problem: given a collection of overlapping
//! causal input graphs, each over a subset of a shared variable universe,
//! enumerate the complete set of global DAGs whose latent projection onto
//! every input's variable set reproduces that input exactly.
//!
//! The crate also ships the surrounding tooling: a brute-force oracle for
//! small universes, an ASP program emitter for differential testing against
//! external answer-set solvers, a seeded synthetic benchmark generator, and
//! solution-set analytics.

pub mod asp;
pub mod error;
pub mod files;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod projection;
pub mod solver;
pub mod stats;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{is_acyclic, Dag, NodeId, Universe, VarSet, MAX_NODES};
pub use instance::Instance;
pub use projection::{causally_connected, latent_project, projects_directed, InputGraph, PairLabel};
pub use solver::{check_candidate, solve, SolutionSet, SolveStatus, SolverConfig};
