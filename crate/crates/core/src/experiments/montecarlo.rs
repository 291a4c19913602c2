//! Seeded Monte-Carlo campaigns over procedure plans.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::engine::{derive_seed, execute};
use crate::model::{CompatibilityRegime, LevelVector, Market};
use crate::oracle::{
    achievable_level_vectors, is_hl_optimal_vector, maximum_matching_size, OracleError,
};
use crate::procedures::{build, two_tube_arrangement, ProcedureInputs, ProcedureKind};

/// Seed of trial `t` under `master`.
pub fn trial_seed(master: u64, t: usize) -> u64 {
    derive_seed(master, &format!("trial/{t}"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub procedure: ProcedureKind,
    pub trials: usize,
    pub seed: u64,
    pub mean_size: f64,
    /// Matching size to number of trials producing it.
    pub size_histogram: BTreeMap<usize, usize>,
    pub maximum_size: usize,
    pub frac_maximum: f64,
    /// Absent when the market exceeds the enumeration bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frac_hl_optimal: Option<f64>,
}

/// Per-market oracle answers shared by all trials.
pub struct MarketOracle {
    pub maximum_size: usize,
    pub vectors: Option<BTreeSet<LevelVector>>,
}

impl MarketOracle {
    pub fn new(market: &Market, regime: CompatibilityRegime) -> Result<Self, ExperimentError> {
        let vectors = match achievable_level_vectors(market, regime) {
            Ok(v) => Some(v),
            Err(OracleError::TooLarge { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            maximum_size: maximum_matching_size(market, regime),
            vectors,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub size: usize,
    pub level: LevelVector,
}

/// One outcome per trial, in trial order.
pub fn run_trials(
    market: &Market,
    kind: ProcedureKind,
    regime: CompatibilityRegime,
    trials: usize,
    master_seed: u64,
    inputs: &ProcedureInputs,
) -> Result<Vec<TrialOutcome>, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    // Surface input errors once, before fanning out.
    build(kind, market, inputs, trial_seed(master_seed, 0))?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(master_seed, trial);
            let (arr, plan) = build(kind, market, inputs, seed)?;
            let mu = execute(market, regime, &arr, &plan)?;
            Ok(TrialOutcome {
                trial,
                seed,
                size: mu.size(),
                level: market.level_vector(&mu)?,
            })
        })
        .collect()
}

pub fn summarize(
    kind: ProcedureKind,
    master_seed: u64,
    outcomes: &[TrialOutcome],
    oracle: &MarketOracle,
) -> TrialStats {
    let trials = outcomes.len();
    let mut size_histogram = BTreeMap::new();
    let mut total = 0usize;
    let mut maximum = 0usize;
    let mut optimal = 0usize;
    for o in outcomes {
        *size_histogram.entry(o.size).or_insert(0) += 1;
        total += o.size;
        maximum += usize::from(o.size == oracle.maximum_size);
        if let Some(vs) = &oracle.vectors {
            optimal += usize::from(is_hl_optimal_vector(vs, &o.level));
        }
    }
    let frac = |k: usize| k as f64 / trials as f64;
    TrialStats {
        procedure: kind,
        trials,
        seed: master_seed,
        mean_size: frac(total),
        size_histogram,
        maximum_size: oracle.maximum_size,
        frac_maximum: frac(maximum),
        frac_hl_optimal: oracle.vectors.as_ref().map(|_| frac(optimal)),
    }
}

pub fn run_monte_carlo(
    market: &Market,
    kind: ProcedureKind,
    regime: CompatibilityRegime,
    trials: usize,
    master_seed: u64,
    inputs: &ProcedureInputs,
) -> Result<TrialStats, ExperimentError> {
    let outcomes = run_trials(market, kind, regime, trials, master_seed, inputs)?;
    let oracle = MarketOracle::new(market, regime)?;
    Ok(summarize(kind, master_seed, &outcomes, &oracle))
}

/// Sizes of every compared procedure in one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedRow {
    pub trial: usize,
    pub seed: u64,
    pub sizes: BTreeMap<ProcedureKind, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub stats: Vec<TrialStats>,
    pub rows: Vec<PairedRow>,
}

/// Procedures that can run on `market` with `inputs`: Song only with
/// preferences, the Qing pair only with a partition, two-tube only on a
/// single-category pool.
pub fn applicable_procedures(market: &Market, inputs: &ProcedureInputs) -> Vec<ProcedureKind> {
    ProcedureKind::ALL
        .into_iter()
        .filter(|k| match k {
            ProcedureKind::Song => inputs.preferences.is_some(),
            ProcedureKind::QingOne | ProcedureKind::QingTwo => inputs.partition.is_some(),
            ProcedureKind::TwoTube => two_tube_arrangement(market).is_ok(),
            _ => true,
        })
        .collect()
}

/// Runs `kinds` (default: every applicable procedure) on the same trial
/// seeds, so row `t` compares the procedures under one shared draw.
pub fn compare_procedures(
    market: &Market,
    regime: CompatibilityRegime,
    trials: usize,
    master_seed: u64,
    inputs: &ProcedureInputs,
    kinds: Option<&[ProcedureKind]>,
) -> Result<Comparison, ExperimentError> {
    let kinds = match kinds {
        Some(k) => k.to_vec(),
        None => applicable_procedures(market, inputs),
    };
    let oracle = MarketOracle::new(market, regime)?;
    let mut stats = Vec::with_capacity(kinds.len());
    let mut rows: Vec<PairedRow> = (0..trials)
        .map(|trial| PairedRow {
            trial,
            seed: trial_seed(master_seed, trial),
            sizes: BTreeMap::new(),
        })
        .collect();
    for &kind in &kinds {
        let outcomes = run_trials(market, kind, regime, trials, master_seed, inputs)?;
        for o in &outcomes {
            rows[o.trial].sizes.insert(kind, o.size);
        }
        stats.push(summarize(kind, master_seed, &outcomes, &oracle));
    }
    Ok(Comparison { stats, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::generators::{gen_prop1, gen_thm2};
    use crate::model::Matching;
    use crate::procedures::build_ming_two;
    use crate::testing::{a_job, a_worker, market_of};

    const CM: CompatibilityRegime = CompatibilityRegime::EligibilityOnly;
    const CP: CompatibilityRegime = CompatibilityRegime::EligibilityAndAvoidance;

    fn with_partition(case: &crate::experiments::GeneratedCase) -> ProcedureInputs {
        ProcedureInputs {
            preferences: Some(case.plan.job_orders.clone()),
            partition: case.partition.clone(),
        }
    }

    #[test]
    fn thm2_qing_two_always_maximum_and_dominates_qing_one() {
        let case = gen_thm2(2).unwrap();
        let inputs = with_partition(&case);
        let stats = run_monte_carlo(&case.market, ProcedureKind::QingTwo, CP, 200, 1, &inputs).unwrap();
        assert_eq!(stats.frac_maximum, 1.0);
        assert_eq!(stats.size_histogram.values().sum::<usize>(), 200);
        let cmp = compare_procedures(
            &case.market,
            CP,
            500,
            2,
            &inputs,
            Some(&[ProcedureKind::QingOne, ProcedureKind::QingTwo]),
        )
        .unwrap();
        for row in &cmp.rows {
            assert!(row.sizes[&ProcedureKind::QingTwo] >= row.sizes[&ProcedureKind::QingOne]);
        }
    }

    #[test]
    fn prop1_ming_one_is_deterministically_maximum() {
        let case = gen_prop1(2).unwrap();
        let inputs = with_partition(&case);
        let stats = run_monte_carlo(&case.market, ProcedureKind::MingOne, CM, 300, 5, &inputs).unwrap();
        assert_eq!(stats.mean_size, 4.0);
        assert_eq!(stats.frac_hl_optimal, Some(1.0));
        let cmp = compare_procedures(&case.market, CM, 100, 5, &inputs, None).unwrap();
        for row in &cmp.rows {
            for k in [ProcedureKind::MingOne, ProcedureKind::QingOne, ProcedureKind::QingTwo] {
                assert_eq!(row.sizes[&k], 4);
            }
        }
        // Two-tube is skipped on the mixed-category pool.
        assert!(!cmp.stats.iter().any(|s| s.procedure == ProcedureKind::TwoTube));
    }

    #[test]
    fn repeated_runs_are_identical() {
        let case = gen_thm2(3).unwrap();
        let inputs = with_partition(&case);
        let a = compare_procedures(&case.market, CP, 50, 9, &inputs, None).unwrap();
        let b = compare_procedures(&case.market, CP, 50, 9, &inputs, None).unwrap();
        assert_eq!(a, b);
        let one = run_monte_carlo(&case.market, ProcedureKind::MingTwo, CP, 1, 3, &inputs).unwrap();
        assert_eq!(one, run_monte_carlo(&case.market, ProcedureKind::MingTwo, CP, 1, 3, &inputs).unwrap());
    }

    #[test]
    fn single_region_matches_nobody_under_avoidance() {
        let m = market_of(
            &["X"],
            vec![a_worker("w1", "X", 1), a_worker("w2", "X", 2)],
            vec![a_job("j1", "X"), a_job("j2", "X")],
        );
        let inputs = ProcedureInputs {
            partition: Some(crate::procedures::default_qing_partition(&m).unwrap()),
            ..Default::default()
        };
        let cmp = compare_procedures(&m, CP, 20, 0, &inputs, None).unwrap();
        assert!(cmp.rows.iter().all(|r| r.sizes.values().all(|&s| s == 0)));
    }

    #[test]
    fn preconditions() {
        let case = gen_thm2(1).unwrap();
        assert!(matches!(
            run_monte_carlo(&case.market, ProcedureKind::MingTwo, CP, 0, 0, &ProcedureInputs::default()),
            Err(ExperimentError::NoTrials)
        ));
        assert!(matches!(
            run_monte_carlo(&case.market, ProcedureKind::QingOne, CP, 5, 0, &ProcedureInputs::default()),
            Err(ExperimentError::Procedure(_))
        ));
    }

    #[test]
    fn ming_two_single_worker_draws_each_job_half_the_time() {
        let m = market_of(
            &["X", "Y"],
            vec![a_worker("w", "X", 1)],
            vec![a_job("j1", "Y"), a_job("j2", "Y")],
        );
        let trials = 10_000;
        let mut first = 0;
        for t in 0..trials {
            let (arr, plan) = build_ming_two(&m, trial_seed(77, t));
            if execute(&m, CP, &arr, &plan).unwrap() == Matching::from(("w", "j1")) {
                first += 1;
            }
        }
        let freq = first as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "{freq}");
    }
}
