//! Sequential tube execution.
//!
//! An [`AssignmentArrangement`] splits the market into independent tube
//! sequences. Within a sequence, worker tubes are processed in order and
//! workers inside a tube follow the plan's worker order. Each worker takes
//! the top job, under his own job order, from the first job tube that still
//! holds a compatible job; with none left anywhere in the sequence he stays
//! unmatched.

mod explore;
mod sampling;

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CompatibilityRegime, JobId, Market, Matching, WorkerId};

pub use explore::reachable_outcomes;
pub use sampling::{
    derive_seed, rng_from_seed, sample_uniform_job_orders, sample_uniform_worker_order, shuffled,
};

/// A strict order over workers plus one strict order over all jobs per worker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentPlan {
    pub worker_order: Vec<WorkerId>,
    pub job_orders: BTreeMap<WorkerId, Vec<JobId>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("worker order names unknown worker `{0}`")]
    UnknownWorker(String),
    #[error("worker `{0}` appears twice in the worker order")]
    RepeatedWorker(String),
    #[error("worker order is missing `{0}`")]
    MissingWorker(String),
    #[error("no job order for worker `{0}`")]
    MissingJobOrder(String),
    #[error("job order given for unknown worker `{0}`")]
    UnexpectedJobOrder(String),
    #[error("job order of `{worker}` names unknown job `{job}`")]
    UnknownJob { worker: String, job: String },
    #[error("job order of `{worker}` repeats `{job}`")]
    RepeatedJob { worker: String, job: String },
    #[error("job order of `{worker}` is missing `{job}`")]
    MissingJob { worker: String, job: String },
}

impl AssignmentPlan {
    pub fn new(worker_order: Vec<WorkerId>, job_orders: BTreeMap<WorkerId, Vec<JobId>>) -> Self {
        Self {
            worker_order,
            job_orders,
        }
    }

    /// Worker order and job orders all drawn uniformly from `seed`.
    pub fn uniform(market: &Market, seed: u64) -> Self {
        let workers = worker_ids(market);
        Self {
            worker_order: sample_uniform_worker_order(&workers, derive_seed(seed, "worker-order")),
            job_orders: sample_uniform_job_orders(&workers, &job_ids(market), seed),
        }
    }

    /// Checks that the plan carries total orders covering the market.
    pub fn validate(&self, market: &Market) -> Result<(), PlanError> {
        let mut seen = HashSet::new();
        for w in &self.worker_order {
            market
                .worker_index(w.as_str())
                .map_err(|_| PlanError::UnknownWorker(w.0.clone()))?;
            if !seen.insert(w.as_str()) {
                return Err(PlanError::RepeatedWorker(w.0.clone()));
            }
        }
        if let Some(w) = market.workers().iter().find(|w| !seen.contains(w.id.as_str())) {
            return Err(PlanError::MissingWorker(w.id.0.clone()));
        }
        if let Some(w) = self
            .job_orders
            .keys()
            .find(|w| market.worker_index(w.as_str()).is_err())
        {
            return Err(PlanError::UnexpectedJobOrder(w.0.clone()));
        }
        for w in market.workers() {
            let order = self
                .job_orders
                .get(&w.id)
                .ok_or_else(|| PlanError::MissingJobOrder(w.id.0.clone()))?;
            validate_job_order(market, w.id.as_str(), order)?;
        }
        Ok(())
    }
}

pub(crate) fn validate_job_order(market: &Market, worker: &str, order: &[JobId]) -> Result<(), PlanError> {
    let mut seen = HashSet::new();
    for j in order {
        market.job_index(j.as_str()).map_err(|_| PlanError::UnknownJob {
            worker: worker.to_owned(),
            job: j.0.clone(),
        })?;
        if !seen.insert(j.as_str()) {
            return Err(PlanError::RepeatedJob {
                worker: worker.to_owned(),
                job: j.0.clone(),
            });
        }
    }
    if let Some(j) = market.jobs().iter().find(|j| !seen.contains(j.id.as_str())) {
        return Err(PlanError::MissingJob {
            worker: worker.to_owned(),
            job: j.id.0.clone(),
        });
    }
    Ok(())
}

pub fn worker_ids(market: &Market) -> Vec<WorkerId> {
    market.workers().iter().map(|w| w.id.clone()).collect()
}

pub fn job_ids(market: &Market) -> Vec<JobId> {
    market.jobs().iter().map(|j| j.id.clone()).collect()
}

/// Ordered worker tubes and ordered job tubes of one independent sub-market.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeSequence {
    pub worker_tubes: Vec<Vec<WorkerId>>,
    pub job_tubes: Vec<Vec<JobId>>,
}

impl TubeSequence {
    pub fn new(worker_tubes: Vec<Vec<WorkerId>>, job_tubes: Vec<Vec<JobId>>) -> Self {
        Self {
            worker_tubes,
            job_tubes,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentArrangement {
    pub sequences: Vec<TubeSequence>,
}

impl AssignmentArrangement {
    pub fn new(sequences: Vec<TubeSequence>) -> Self {
        Self { sequences }
    }
}

/// First partition condition an arrangement breaks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementViolation {
    #[error("tube names unknown worker `{0}`")]
    UnknownWorker(String),
    #[error("tube names unknown job `{0}`")]
    UnknownJob(String),
    #[error("worker `{0}` appears in more than one tube")]
    WorkerNotDisjoint(String),
    #[error("job `{0}` appears in more than one tube")]
    JobNotDisjoint(String),
    #[error("worker `{0}` is not covered by any tube")]
    WorkerNotCovered(String),
    #[error("job `{0}` is not covered by any tube")]
    JobNotCovered(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid arrangement: {0}")]
    Arrangement(#[from] ArrangementViolation),
    #[error("invalid plan: {0}")]
    Plan(#[from] PlanError),
}

/// Checks that the tubes partition the market's workers and jobs.
pub fn validate_arrangement(market: &Market, arr: &AssignmentArrangement) -> Result<(), ArrangementViolation> {
    index_arrangement(market, arr).map(|_| ())
}

/// Tubes resolved to market indices.
#[derive(Clone, Debug)]
pub(crate) struct IndexedSequence {
    pub worker_tubes: Vec<Vec<usize>>,
    pub job_tubes: Vec<Vec<usize>>,
}

pub(crate) fn index_arrangement(
    market: &Market,
    arr: &AssignmentArrangement,
) -> Result<Vec<IndexedSequence>, ArrangementViolation> {
    let mut worker_seen = vec![false; market.workers().len()];
    let mut job_seen = vec![false; market.jobs().len()];
    let mut out = Vec::with_capacity(arr.sequences.len());
    for seq in &arr.sequences {
        let mut worker_tubes = Vec::with_capacity(seq.worker_tubes.len());
        for tube in &seq.worker_tubes {
            let mut idx = Vec::with_capacity(tube.len());
            for w in tube {
                let i = market
                    .worker_index(w.as_str())
                    .map_err(|_| ArrangementViolation::UnknownWorker(w.0.clone()))?;
                if std::mem::replace(&mut worker_seen[i], true) {
                    return Err(ArrangementViolation::WorkerNotDisjoint(w.0.clone()));
                }
                idx.push(i);
            }
            worker_tubes.push(idx);
        }
        let mut job_tubes = Vec::with_capacity(seq.job_tubes.len());
        for tube in &seq.job_tubes {
            let mut idx = Vec::with_capacity(tube.len());
            for j in tube {
                let i = market
                    .job_index(j.as_str())
                    .map_err(|_| ArrangementViolation::UnknownJob(j.0.clone()))?;
                if std::mem::replace(&mut job_seen[i], true) {
                    return Err(ArrangementViolation::JobNotDisjoint(j.0.clone()));
                }
                idx.push(i);
            }
            job_tubes.push(idx);
        }
        out.push(IndexedSequence {
            worker_tubes,
            job_tubes,
        });
    }
    if let Some(i) = worker_seen.iter().position(|&s| !s) {
        return Err(ArrangementViolation::WorkerNotCovered(market.workers()[i].id.0.clone()));
    }
    if let Some(i) = job_seen.iter().position(|&s| !s) {
        return Err(ArrangementViolation::JobNotCovered(market.jobs()[i].id.0.clone()));
    }
    Ok(out)
}

/// Plan resolved to indices: position of each worker in the worker order,
/// and each worker's rank of every job (lower is preferred).
pub(crate) struct IndexedPlan {
    pub worker_pos: Vec<usize>,
    pub job_rank: Vec<Vec<usize>>,
}

impl IndexedPlan {
    pub fn new(market: &Market, plan: &AssignmentPlan) -> Result<Self, PlanError> {
        plan.validate(market)?;
        let mut worker_pos = vec![0; market.workers().len()];
        for (pos, w) in plan.worker_order.iter().enumerate() {
            worker_pos[market.worker_index(w.as_str()).expect("validated")] = pos;
        }
        let job_rank = market
            .workers()
            .iter()
            .map(|w| {
                let mut rank = vec![0; market.jobs().len()];
                for (r, j) in plan.job_orders[&w.id].iter().enumerate() {
                    rank[market.job_index(j.as_str()).expect("validated")] = r;
                }
                rank
            })
            .collect();
        Ok(Self { worker_pos, job_rank })
    }

    fn sorted_tube(&self, tube: &[usize]) -> Vec<usize> {
        let mut t = tube.to_vec();
        t.sort_by_key(|&w| self.worker_pos[w]);
        t
    }
}

fn run_sequence(
    market: &Market,
    regime: CompatibilityRegime,
    seq: &IndexedSequence,
    plan: &IndexedPlan,
) -> Vec<(usize, usize)> {
    let mut available = vec![false; market.jobs().len()];
    for &j in seq.job_tubes.iter().flatten() {
        available[j] = true;
    }
    let mut pairs = Vec::new();
    for tube in &seq.worker_tubes {
        for w in plan.sorted_tube(tube) {
            let ranks = &plan.job_rank[w];
            let pick = seq.job_tubes.iter().find_map(|jt| {
                jt.iter()
                    .copied()
                    .filter(|&j| available[j] && market.compatible_at(regime, w, j))
                    .min_by_key(|&j| ranks[j])
            });
            if let Some(j) = pick {
                available[j] = false;
                pairs.push((w, j));
            }
        }
    }
    pairs
}

/// Runs `arr` with `plan` over `market`. The result is feasible under `regime`.
pub fn execute(
    market: &Market,
    regime: CompatibilityRegime,
    arr: &AssignmentArrangement,
    plan: &AssignmentPlan,
) -> Result<Matching, EngineError> {
    let seqs = index_arrangement(market, arr)?;
    let plan = IndexedPlan::new(market, plan)?;
    let pairs = seqs
        .iter()
        .flat_map(|s| run_sequence(market, regime, s, &plan))
        .collect::<Vec<_>>();
    Ok(market.matching_from_indices(pairs))
}

/// Same as [`execute`], with the sequences run concurrently.
pub fn execute_parallel(
    market: &Market,
    regime: CompatibilityRegime,
    arr: &AssignmentArrangement,
    plan: &AssignmentPlan,
) -> Result<Matching, EngineError> {
    let seqs = index_arrangement(market, arr)?;
    let plan = IndexedPlan::new(market, plan)?;
    let parts: Vec<Vec<(usize, usize)>> = seqs
        .par_iter()
        .map(|s| run_sequence(market, regime, s, &plan))
        .collect();
    Ok(market.matching_from_indices(parts.into_iter().flatten()))
}

/// One step of a traced execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// A worker is drawn; `pool` lists the jobs of his sequence still unassigned.
    WorkerDrawn {
        sequence: usize,
        worker_tube: usize,
        worker: WorkerId,
        pool: Vec<JobId>,
    },
    /// A drawn job the worker cannot take; it goes back into its tube.
    JobReturned { worker: WorkerId, job: JobId },
    Matched {
        worker: WorkerId,
        job: JobId,
        job_tube: usize,
    },
    Unmatched { worker: WorkerId },
}

/// Executes by literally drawing lots: each worker pulls jobs from a tube in
/// his job order, returning incompatible ones, before moving to the next tube.
///
/// Produces the same matching as [`execute`] along with the event log.
pub fn execute_traced(
    market: &Market,
    regime: CompatibilityRegime,
    arr: &AssignmentArrangement,
    plan: &AssignmentPlan,
) -> Result<(Matching, Vec<TraceEvent>), EngineError> {
    let seqs = index_arrangement(market, arr)?;
    let iplan = IndexedPlan::new(market, plan)?;
    let mut events = Vec::new();
    let mut pairs = Vec::new();
    for (s, seq) in seqs.iter().enumerate() {
        let mut pool: Vec<Vec<usize>> = seq.job_tubes.clone();
        for (t, tube) in seq.worker_tubes.iter().enumerate() {
            for w in iplan.sorted_tube(tube) {
                let wid = market.workers()[w].id.clone();
                let mut snapshot: Vec<usize> = pool.iter().flatten().copied().collect();
                snapshot.sort_unstable();
                events.push(TraceEvent::WorkerDrawn {
                    sequence: s,
                    worker_tube: t,
                    worker: wid.clone(),
                    pool: snapshot.iter().map(|&j| market.jobs()[j].id.clone()).collect(),
                });
                let mut matched = false;
                'tubes: for (a, jt) in pool.iter_mut().enumerate() {
                    let mut draws = jt.clone();
                    draws.sort_by_key(|&j| iplan.job_rank[w][j]);
                    for j in draws {
                        let jid = market.jobs()[j].id.clone();
                        if market.compatible_at(regime, w, j) {
                            jt.retain(|&x| x != j);
                            pairs.push((w, j));
                            events.push(TraceEvent::Matched {
                                worker: wid.clone(),
                                job: jid,
                                job_tube: a,
                            });
                            matched = true;
                            break 'tubes;
                        }
                        events.push(TraceEvent::JobReturned {
                            worker: wid.clone(),
                            job: jid,
                        });
                    }
                }
                if !matched {
                    events.push(TraceEvent::Unmatched { worker: wid });
                }
            }
        }
    }
    Ok((market.matching_from_indices(pairs), events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Job, JobCategory, Worker, WorkerCategory};
    use crate::testing::{example1_market, random_market};
    use proptest::prelude::*;

    const CM: CompatibilityRegime = CompatibilityRegime::EligibilityOnly;
    const CP: CompatibilityRegime = CompatibilityRegime::EligibilityAndAvoidance;

    fn wids(ids: &[&str]) -> Vec<WorkerId> {
        ids.iter().map(|&i| i.into()).collect()
    }

    fn jids(ids: &[&str]) -> Vec<JobId> {
        ids.iter().map(|&i| i.into()).collect()
    }

    fn single(market: &Market) -> AssignmentArrangement {
        AssignmentArrangement::new(vec![TubeSequence::new(
            vec![worker_ids(market)],
            vec![job_ids(market)],
        )])
    }

    fn example1_plan(w_a_order: &[&str]) -> AssignmentPlan {
        AssignmentPlan::new(
            wids(&["w_a", "w_b"]),
            [
                ("w_a".into(), jids(w_a_order)),
                ("w_b".into(), jids(&["j_ab", "j_a"])),
            ]
            .into_iter()
            .collect(),
        )
    }

    #[test]
    fn example1_greedy_leaves_w_b_out() {
        let m = example1_market();
        let mu = execute(&m, CM, &single(&m), &example1_plan(&["j_ab", "j_a"])).unwrap();
        assert_eq!(mu, Matching::from(("w_a", "j_ab")));
    }

    #[test]
    fn example1_a_job_first_matches_both() {
        let m = example1_market();
        let mu = execute(&m, CM, &single(&m), &example1_plan(&["j_a", "j_ab"])).unwrap();
        assert_eq!(mu, Matching::from_pairs([("w_a", "j_a"), ("w_b", "j_ab")]).unwrap());
    }

    #[test]
    fn empty_market() {
        let m = Market::empty();
        let plan = AssignmentPlan::new(vec![], BTreeMap::new());
        assert!(execute(&m, CP, &AssignmentArrangement::default(), &plan).unwrap().is_empty());
    }

    #[test]
    fn lowest_job_tube_wins_over_job_order() {
        let m = example1_market();
        let arr = AssignmentArrangement::new(vec![TubeSequence::new(
            vec![wids(&["w_a", "w_b"])],
            vec![jids(&["j_a"]), jids(&["j_ab"])],
        )]);
        let mu = execute(&m, CM, &arr, &example1_plan(&["j_ab", "j_a"])).unwrap();
        assert_eq!(mu.job_of("w_a").unwrap().as_str(), "j_a");
        assert_eq!(mu.size(), 2);
    }

    #[test]
    fn empty_tubes_and_jobless_sequences() {
        let m = example1_market();
        let arr = AssignmentArrangement::new(vec![
            TubeSequence::new(vec![vec![], wids(&["w_b"])], vec![]),
            TubeSequence::new(vec![wids(&["w_a"]), vec![]], vec![vec![], jids(&["j_a", "j_ab"])]),
        ]);
        let mu = execute(&m, CM, &arr, &example1_plan(&["j_ab", "j_a"])).unwrap();
        assert_eq!(mu, Matching::from(("w_a", "j_ab")));
    }

    #[test]
    fn validation_reports_first_violation() {
        let m = example1_market();
        assert_eq!(validate_arrangement(&m, &single(&m)), Ok(()));
        let missing = AssignmentArrangement::new(vec![TubeSequence::new(
            vec![wids(&["w_a", "w_b"])],
            vec![jids(&["j_a"])],
        )]);
        assert_eq!(
            validate_arrangement(&m, &missing),
            Err(ArrangementViolation::JobNotCovered("j_ab".into()))
        );
        let shared = AssignmentArrangement::new(vec![
            TubeSequence::new(vec![wids(&["w_a"])], vec![jids(&["j_a"])]),
            TubeSequence::new(vec![wids(&["w_a", "w_b"])], vec![jids(&["j_ab"])]),
        ]);
        assert_eq!(
            validate_arrangement(&m, &shared),
            Err(ArrangementViolation::WorkerNotDisjoint("w_a".into()))
        );
        let unknown = AssignmentArrangement::new(vec![TubeSequence::new(
            vec![wids(&["w_a", "w_b", "w_z"])],
            vec![jids(&["j_a", "j_ab"])],
        )]);
        assert_eq!(
            validate_arrangement(&m, &unknown),
            Err(ArrangementViolation::UnknownWorker("w_z".into()))
        );
        let plan = example1_plan(&["j_a", "j_ab"]);
        assert!(matches!(
            execute(&m, CM, &missing, &plan),
            Err(EngineError::Arrangement(ArrangementViolation::JobNotCovered(_)))
        ));
    }

    #[test]
    fn plan_validation() {
        let m = example1_market();
        let mut plan = example1_plan(&["j_a", "j_ab"]);
        assert_eq!(plan.validate(&m), Ok(()));
        plan.job_orders.get_mut("w_b").unwrap().pop();
        assert_eq!(
            plan.validate(&m),
            Err(PlanError::MissingJob {
                worker: "w_b".into(),
                job: "j_a".into()
            })
        );
        let mut plan = example1_plan(&["j_a", "j_ab"]);
        plan.worker_order.push("w_a".into());
        assert_eq!(plan.validate(&m), Err(PlanError::RepeatedWorker("w_a".into())));
        let mut plan = example1_plan(&["j_a", "j_ab"]);
        plan.job_orders.remove("w_a");
        assert_eq!(plan.validate(&m), Err(PlanError::MissingJobOrder("w_a".into())));
        assert_eq!(AssignmentPlan::uniform(&m, 3).validate(&m), Ok(()));
    }

    #[test]
    fn plan_file_format() {
        let text = r#"{"worker_order":["w_a","w_b"],"job_orders":{"w_a":["j_a","j_ab"],"w_b":["j_ab","j_a"]}}"#;
        let plan: AssignmentPlan = serde_json::from_str(text).unwrap();
        assert_eq!(plan, example1_plan(&["j_a", "j_ab"]));
        assert!(serde_json::from_str::<AssignmentPlan>(r#"{"worker_order":[],"job_orders":{},"x":0}"#).is_err());
    }

    fn two_region_market() -> Market {
        let w = |id: &str, r: &str, k| Worker {
            id: id.into(),
            category: WorkerCategory::A,
            region: r.into(),
            exam_rank: k,
        };
        let j = |id: &str, r: &str| Job {
            id: id.into(),
            category: JobCategory::A,
            region: r.into(),
        };
        Market::new(
            vec!["X".into(), "Y".into()],
            vec![w("x1", "X", 1), w("y1", "Y", 2)],
            vec![j("jx", "X"), j("jy", "Y")],
        )
        .unwrap()
    }

    #[test]
    fn trace_records_returned_draws() {
        let m = two_region_market();
        let plan = AssignmentPlan::new(
            wids(&["x1", "y1"]),
            [("x1".into(), jids(&["jx", "jy"])), ("y1".into(), jids(&["jx", "jy"]))]
                .into_iter()
                .collect(),
        );
        let (mu, events) = execute_traced(&m, CP, &single(&m), &plan).unwrap();
        assert_eq!(mu, Matching::from_pairs([("x1", "jy"), ("y1", "jx")]).unwrap());
        assert_eq!(
            events[1],
            TraceEvent::JobReturned {
                worker: "x1".into(),
                job: "jx".into()
            }
        );
        assert!(matches!(&events[2], TraceEvent::Matched { job, .. } if job.as_str() == "jy"));
    }

    /// Random arrangement over a market: a random number of sequences and
    /// tubes, with ids dealt out by a seeded shuffle.
    fn random_arrangement(market: &Market, seed: u64) -> AssignmentArrangement {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let n_seq = rng.random_range(1..=3usize);
        let mut seqs = vec![TubeSequence::default(); n_seq];
        for s in &mut seqs {
            s.worker_tubes = vec![Vec::new(); rng.random_range(1..=3usize)];
            s.job_tubes = vec![Vec::new(); rng.random_range(1..=3usize)];
        }
        for w in shuffled(&worker_ids(market), seed) {
            let s = rng.random_range(0..n_seq);
            let t = rng.random_range(0..seqs[s].worker_tubes.len());
            seqs[s].worker_tubes[t].push(w);
        }
        for j in shuffled(&job_ids(market), seed ^ 1) {
            let s = rng.random_range(0..n_seq);
            let t = rng.random_range(0..seqs[s].job_tubes.len());
            seqs[s].job_tubes[t].push(j);
        }
        AssignmentArrangement::new(seqs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn execution_is_feasible_deterministic_and_greedy(seed in any::<u64>(), plus in any::<bool>()) {
            let regime = if plus { CP } else { CM };
            let m = random_market(seed, 7, 7, 3);
            let arr = random_arrangement(&m, seed);
            let plan = AssignmentPlan::uniform(&m, seed);
            let mu = execute(&m, regime, &arr, &plan).unwrap();
            prop_assert!(m.is_feasible(regime, &mu).unwrap());
            prop_assert_eq!(&mu, &execute(&m, regime, &arr, &plan).unwrap());
            prop_assert_eq!(&mu, &execute_parallel(&m, regime, &arr, &plan).unwrap());

            let (traced, events) = execute_traced(&m, regime, &arr, &plan).unwrap();
            prop_assert_eq!(&mu, &traced);
            // Local greediness: whoever stays unmatched had no compatible job in his pool.
            let mut last_pool: Vec<JobId> = Vec::new();
            for e in &events {
                match e {
                    TraceEvent::WorkerDrawn { pool, .. } => last_pool = pool.clone(),
                    TraceEvent::Unmatched { worker } => {
                        for j in &last_pool {
                            prop_assert!(!m.is_compatible(regime, worker.as_str(), j.as_str()).unwrap());
                        }
                    }
                    _ => {}
                }
            }
        }

        #[test]
        fn later_tubes_do_not_affect_earlier_ones(seed in any::<u64>()) {
            let m = random_market(seed, 7, 7, 3);
            let arr = random_arrangement(&m, seed);
            let plan = AssignmentPlan::uniform(&m, seed);
            let (_, full) = execute_traced(&m, CP, &arr, &plan).unwrap();
            // Move every worker outside the first tube of each sequence into a
            // fresh trailing sequence with no jobs; the first-tube events must not change.
            let mut truncated = arr.clone();
            let mut spill = Vec::new();
            for s in &mut truncated.sequences {
                for t in s.worker_tubes.iter_mut().skip(1) {
                    spill.append(t);
                }
            }
            truncated.sequences.push(TubeSequence::new(vec![spill], vec![]));
            let (_, cut) = execute_traced(&m, CP, &truncated, &plan).unwrap();
            let first_tube = |events: &[TraceEvent]| -> Vec<TraceEvent> {
                let mut keep = Vec::new();
                let mut on = false;
                for e in events {
                    if let TraceEvent::WorkerDrawn { worker_tube, sequence, .. } = e {
                        on = *worker_tube == 0 && *sequence < arr.sequences.len();
                    }
                    if on {
                        keep.push(e.clone());
                    }
                }
                keep
            };
            prop_assert_eq!(first_tube(&full), first_tube(&cut));
        }
    }
}
