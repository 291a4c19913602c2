//! Sequential lots-drawing assignment: markets of workers and jobs under
//! eligibility and regional-avoidance constraints, tube-based assignment
//! procedures, exact matching oracles, and counterexample generators.

pub mod engine;
pub mod experiments;
pub mod model;
pub mod oracle;
pub mod procedures;

#[cfg(test)]
mod testing;

pub use engine::{execute, AssignmentArrangement, AssignmentPlan, TubeSequence};
pub use model::{
    CompatibilityRegime, Job, JobCategory, JobId, LevelVector, Market, Matching, Region, Worker,
    WorkerCategory, WorkerId,
};
pub use procedures::{ProcedureKind, QingPartition};
