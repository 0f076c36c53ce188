//! Pareto frontiers over per-row distance vectors, frontier peeling, and the
//! two search drivers that walk the peeled layers.

mod frontier;
mod search;

pub use frontier::{dominates, pareto_frontier, peel_frontiers, peel_table, FrontierStep};
pub use search::{exhaustive_search, local_search, SearchMode, SearchTrace, StepEvaluation, StepRecord, Termination};
