//! Finite-state ants on a toroidal trail, evolved by a genetic algorithm
//! extended with artificial transposons.

pub mod analytics;
pub mod automaton;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod ga;
pub mod mge;
pub mod trail;

pub use analytics::{CensusRecord, DominanceTimeline, RunSummary};
pub use automaton::{Action, Genome, StateEntry, StateTable, TrialResult};
pub use error::{Error, Result};
pub use experiment::{ExperimentSpec, Preset};
pub use ga::{Evolution, GaConfig, GenerationStats, Population, Selection};
pub use mge::{ActionChain, MgeConfig, Transposon, TransposonKind};
pub use trail::{Heading, Pose, TrailGrid};
