//! Counterexample generators, exhaustive two-tube checks and Monte-Carlo
//! campaigns.

pub mod generators;
pub mod montecarlo;
pub mod random;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{reachable_outcomes, EngineError};
use crate::model::{CompatibilityRegime, Market, ModelError};
use crate::oracle::{maximum_matching_size, OracleError};
use crate::procedures::{two_tube_arrangement, two_tube_lead_region, ProcedureError};

pub use generators::{
    gen_example1, gen_prop1, gen_prop2, gen_prop3, gen_prop4, gen_thm1, gen_thm2, gen_thm3,
    CaseName, ExpectedOutcome, GeneratedCase,
};
pub use montecarlo::{
    applicable_procedures, compare_procedures, run_monte_carlo, run_trials, trial_seed, Comparison,
    PairedRow, TrialOutcome, TrialStats,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("unknown case `{0}` (expected example1, prop1, prop2, prop3, prop4, thm1, thm2, thm3 or all)")]
    UnknownCase(String),
    #[error("scale n must be at least 1, got {0}")]
    Scale(usize),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Two-tube outcomes over every assignment plan of one market.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTubeSweep {
    pub maximum_size: usize,
    /// Distinct matchings reachable under some plan.
    pub outcomes: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub jobs: usize,
    /// `|J_1|`: jobs of the leading region.
    pub lead_jobs: usize,
    /// `|W_-1|`: workers outside the leading region.
    pub other_workers: usize,
    /// Smallest number of jobs filled over all plans.
    pub min_jobs_filled: usize,
}

impl TwoTubeSweep {
    /// Every plan yields a maximum matching.
    pub fn always_maximum(&self) -> bool {
        self.min_size == self.maximum_size
    }

    /// Whether the all-jobs-filled clause applies, i.e. `|J_1| <= |W_-1|`.
    pub fn fill_clause_applies(&self) -> bool {
        self.lead_jobs <= self.other_workers
    }

    pub fn always_fills_every_job(&self) -> bool {
        self.min_jobs_filled == self.jobs
    }
}

/// Runs the two-tube arrangement under every plan, by walking the choice
/// tree of the drawing process.
pub fn two_tube_sweep(market: &Market, regime: CompatibilityRegime) -> Result<TwoTubeSweep, ExperimentError> {
    let arr = two_tube_arrangement(market)?;
    let outcomes = reachable_outcomes(market, regime, &arr).map_err(EngineError::from)?;
    let lead = two_tube_lead_region(market);
    let in_lead = |r| lead.as_ref() == Some(r);
    let sizes: Vec<usize> = outcomes.iter().map(|m| m.size()).collect();
    Ok(TwoTubeSweep {
        maximum_size: maximum_matching_size(market, regime),
        outcomes: outcomes.len(),
        min_size: sizes.iter().copied().min().unwrap_or(0),
        max_size: sizes.iter().copied().max().unwrap_or(0),
        jobs: market.jobs().len(),
        lead_jobs: market.jobs().iter().filter(|j| in_lead(&j.region)).count(),
        other_workers: market.workers().iter().filter(|w| !in_lead(&w.region)).count(),
        min_jobs_filled: sizes.iter().copied().min().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::random::profile_market;
    use super::*;

    const CP: CompatibilityRegime = CompatibilityRegime::EligibilityAndAvoidance;

    #[test]
    fn thm3_market_is_always_fully_filled() {
        for n in 1..=3 {
            let s = two_tube_sweep(&gen_thm3(n).unwrap().market, CP).unwrap();
            assert!(s.always_maximum() && s.fill_clause_applies() && s.always_fills_every_job(), "{s:?}");
        }
    }

    #[test]
    fn thm2_market_is_always_maximum() {
        let s = two_tube_sweep(&gen_thm2(2).unwrap().market, CP).unwrap();
        assert_eq!(s.maximum_size, 4);
        assert!(s.always_maximum());
    }

    #[test]
    fn same_region_only_market_matches_nobody() {
        let s = two_tube_sweep(&profile_market(&[(2, 1)]), CP).unwrap();
        assert_eq!((s.maximum_size, s.max_size), (0, 0));
        assert!(s.always_maximum());
    }

    #[test]
    fn jobs_of_workerless_regions_can_block_the_lead_region() {
        // Cardinality counterexample at n = 2: when the leading X-workers
        // both take Z-jobs, the Y-job stays empty.
        let s = two_tube_sweep(&gen_prop2(2).unwrap().market, CP).unwrap();
        assert_eq!(s.maximum_size, 4);
        assert_eq!((s.min_size, s.max_size), (3, 4));
        assert!(!s.always_maximum());
    }
}
