//! The six procedures as (arrangement, plan) builders.
//!
//! | kind      | arrangement                                         | plan                          |
//! |-----------|-----------------------------------------------------|-------------------------------|
//! | `song`    | `<W^A, W^B> / <J>`                                  | exam order, stated preferences |
//! | `ming1`   | `<W^A, W^B> / <J^A, J^AB, J^B>`                     | exam order, ministry orders   |
//! | `ming2`   | `<W^A, W^B> / <J>`                                  | exam order, uniform job draws |
//! | `qing1`   | three sequences, one worker tube each               | uniform                       |
//! | `qing2`   | three sequences, priority tube before the rest      | uniform                       |
//! | `twotube` | `<W_1, W_-1> / <J_-1, J_1>` on a single-category pool | uniform                     |

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    job_ids, sample_uniform_job_orders, validate_job_order, worker_ids, AssignmentArrangement,
    AssignmentPlan, PlanError, TubeSequence,
};
use crate::model::{
    JobCategory, JobId, Market, ModelError, Region, WorkerCategory, WorkerId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProcedureKind {
    #[serde(rename = "song")]
    Song,
    #[serde(rename = "ming1")]
    MingOne,
    #[serde(rename = "ming2")]
    MingTwo,
    #[serde(rename = "qing1")]
    QingOne,
    #[serde(rename = "qing2")]
    QingTwo,
    #[serde(rename = "twotube")]
    TwoTube,
}

impl ProcedureKind {
    pub const ALL: [ProcedureKind; 6] = [
        ProcedureKind::Song,
        ProcedureKind::MingOne,
        ProcedureKind::MingTwo,
        ProcedureKind::QingOne,
        ProcedureKind::QingTwo,
        ProcedureKind::TwoTube,
    ];

    /// The five historical procedures, without the two-tube proposal.
    pub const HISTORICAL: [ProcedureKind; 5] = [
        ProcedureKind::Song,
        ProcedureKind::MingOne,
        ProcedureKind::MingTwo,
        ProcedureKind::QingOne,
        ProcedureKind::QingTwo,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ProcedureKind::Song => "song",
            ProcedureKind::MingOne => "ming1",
            ProcedureKind::MingTwo => "ming2",
            ProcedureKind::QingOne => "qing1",
            ProcedureKind::QingTwo => "qing2",
            ProcedureKind::TwoTube => "twotube",
        }
    }

    pub fn needs_partition(self) -> bool {
        matches!(self, ProcedureKind::QingOne | ProcedureKind::QingTwo)
    }
}

impl fmt::Display for ProcedureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ProcedureKind {
    type Err = ProcedureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProcedureKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| ProcedureError::UnknownProcedure(s.to_owned()))
    }
}

/// Split of A- and B-workers across the three Qing sequences.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QingPartition {
    pub wa1: Vec<WorkerId>,
    pub wa2: Vec<WorkerId>,
    pub wb1: Vec<WorkerId>,
    pub wb2: Vec<WorkerId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("partition names unknown worker `{0}`")]
    UnknownWorker(String),
    #[error("worker `{id}` in {set} is not a {expected:?}-worker")]
    WrongCategory {
        id: String,
        set: &'static str,
        expected: WorkerCategory,
    },
    #[error("worker `{0}` appears twice in the partition")]
    Repeated(String),
    #[error("worker `{0}` is in no partition set")]
    Uncovered(String),
    #[error("size constraint {equality} fails: {left} != {right}")]
    SizeMismatch {
        equality: &'static str,
        left: usize,
        right: usize,
    },
    #[error("no exact-fill partition exists: {0}")]
    Unsatisfiable(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcedureError {
    #[error("unknown procedure `{0}` (expected song, ming1, ming2, qing1, qing2 or twotube)")]
    UnknownProcedure(String),
    #[error("no job order supplied for worker `{0}`")]
    MissingOrder(String),
    #[error("job order supplied for unknown worker `{0}`")]
    UnexpectedOrder(String),
    #[error("invalid job order: {0}")]
    Order(#[from] PlanError),
    #[error("invalid partition: {0}")]
    Partition(#[from] PartitionError),
    #[error("{0} requires a Qing partition")]
    MissingPartition(ProcedureKind),
    #[error(
        "two-tube needs a single-category pool but `{worker}` is ineligible for `{job}`; run it per category"
    )]
    MixedCategories { worker: String, job: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A-workers by exam rank, then B-workers by exam rank.
pub fn exam_order(market: &Market) -> Vec<WorkerId> {
    let mut order = Vec::with_capacity(market.workers().len());
    for cat in [WorkerCategory::A, WorkerCategory::B] {
        let mut ws: Vec<_> = market.workers_of(cat).collect();
        ws.sort_by_key(|w| w.exam_rank);
        order.extend(ws.into_iter().map(|w| w.id.clone()));
    }
    order
}

fn ids_of(market: &Market, cat: WorkerCategory) -> Vec<WorkerId> {
    market.workers_of(cat).map(|w| w.id.clone()).collect()
}

fn jobs_of(market: &Market, cat: JobCategory) -> Vec<JobId> {
    market.jobs_of(cat).map(|j| j.id.clone()).collect()
}

fn checked_orders(
    market: &Market,
    orders: &BTreeMap<WorkerId, Vec<JobId>>,
) -> Result<BTreeMap<WorkerId, Vec<JobId>>, ProcedureError> {
    if let Some(w) = orders.keys().find(|w| market.worker_index(w.as_str()).is_err()) {
        return Err(ProcedureError::UnexpectedOrder(w.0.clone()));
    }
    for w in market.workers() {
        let order = orders
            .get(&w.id)
            .ok_or_else(|| ProcedureError::MissingOrder(w.id.0.clone()))?;
        validate_job_order(market, w.id.as_str(), order)?;
    }
    Ok(orders.clone())
}

pub fn song_arrangement(market: &Market) -> AssignmentArrangement {
    AssignmentArrangement::new(vec![TubeSequence::new(
        vec![ids_of(market, WorkerCategory::A), ids_of(market, WorkerCategory::B)],
        vec![job_ids(market)],
    )])
}

pub fn ming_one_arrangement(market: &Market) -> AssignmentArrangement {
    AssignmentArrangement::new(vec![TubeSequence::new(
        vec![ids_of(market, WorkerCategory::A), ids_of(market, WorkerCategory::B)],
        vec![
            jobs_of(market, JobCategory::A),
            jobs_of(market, JobCategory::AB),
            jobs_of(market, JobCategory::B),
        ],
    )])
}

/// Song: exam order, workers pick by their own preferences, any compatible
/// request is approved.
pub fn build_song(
    market: &Market,
    preferences: &BTreeMap<WorkerId, Vec<JobId>>,
) -> Result<(AssignmentArrangement, AssignmentPlan), ProcedureError> {
    let job_orders = checked_orders(market, preferences)?;
    Ok((
        song_arrangement(market),
        AssignmentPlan::new(exam_order(market), job_orders),
    ))
}

pub fn build_ming_one(
    market: &Market,
    ministry_orders: &BTreeMap<WorkerId, Vec<JobId>>,
) -> Result<(AssignmentArrangement, AssignmentPlan), ProcedureError> {
    let job_orders = checked_orders(market, ministry_orders)?;
    Ok((
        ming_one_arrangement(market),
        AssignmentPlan::new(exam_order(market), job_orders),
    ))
}

/// Exam order with every worker's job order drawn uniformly from `seed`.
pub fn exam_order_plan(market: &Market, seed: u64) -> AssignmentPlan {
    AssignmentPlan::new(
        exam_order(market),
        sample_uniform_job_orders(&worker_ids(market), &job_ids(market), seed),
    )
}

pub fn build_ming_two(market: &Market, seed: u64) -> (AssignmentArrangement, AssignmentPlan) {
    (song_arrangement(market), exam_order_plan(market, seed))
}

impl QingPartition {
    pub fn validate(&self, market: &Market) -> Result<(), PartitionError> {
        let mut seen = HashSet::new();
        let sets: [(&'static str, &[WorkerId], WorkerCategory); 4] = [
            ("wa1", &self.wa1, WorkerCategory::A),
            ("wa2", &self.wa2, WorkerCategory::A),
            ("wb1", &self.wb1, WorkerCategory::B),
            ("wb2", &self.wb2, WorkerCategory::B),
        ];
        for (set, ids, expected) in sets {
            for id in ids {
                let w = market
                    .worker(id.as_str())
                    .map_err(|_| PartitionError::UnknownWorker(id.0.clone()))?;
                if w.category != expected {
                    return Err(PartitionError::WrongCategory {
                        id: id.0.clone(),
                        set,
                        expected,
                    });
                }
                if !seen.insert(id.as_str()) {
                    return Err(PartitionError::Repeated(id.0.clone()));
                }
            }
        }
        if let Some(w) = market.workers().iter().find(|w| !seen.contains(w.id.as_str())) {
            return Err(PartitionError::Uncovered(w.id.0.clone()));
        }
        let count = |c| market.jobs_of(c).count();
        let checks = [
            ("|wa1| = |J^A|", self.wa1.len(), count(JobCategory::A)),
            ("|wb1| = |J^B|", self.wb1.len(), count(JobCategory::B)),
            ("|wa2| + |wb2| = |J^AB|", self.wa2.len() + self.wb2.len(), count(JobCategory::AB)),
        ];
        for (equality, left, right) in checks {
            if left != right {
                return Err(PartitionError::SizeMismatch { equality, left, right });
            }
        }
        Ok(())
    }
}

/// Best-ranked A-workers fill the A-sequence, best-ranked B-workers the
/// B-sequence, everyone else goes to the AB-sequence.
pub fn default_qing_partition(market: &Market) -> Result<QingPartition, PartitionError> {
    let n_wa = market.workers_of(WorkerCategory::A).count();
    let n_wb = market.workers_of(WorkerCategory::B).count();
    let n_ja = market.jobs_of(JobCategory::A).count();
    let n_jb = market.jobs_of(JobCategory::B).count();
    if n_wa < n_ja {
        return Err(PartitionError::Unsatisfiable(format!(
            "{n_wa} A-workers for {n_ja} A-jobs"
        )));
    }
    if n_wb < n_jb {
        return Err(PartitionError::Unsatisfiable(format!(
            "{n_wb} B-workers for {n_jb} B-jobs"
        )));
    }
    if market.workers().len() != market.jobs().len() {
        return Err(PartitionError::Unsatisfiable(format!(
            "{} workers for {} jobs",
            market.workers().len(),
            market.jobs().len()
        )));
    }
    let ranked = |cat| {
        let mut ws: Vec<_> = market.workers_of(cat).collect();
        ws.sort_by_key(|w| w.exam_rank);
        ws.into_iter().map(|w| w.id.clone()).collect::<Vec<_>>()
    };
    let mut wa1 = ranked(WorkerCategory::A);
    let wa2 = wa1.split_off(n_ja);
    let mut wb1 = ranked(WorkerCategory::B);
    let wb2 = wb1.split_off(n_jb);
    Ok(QingPartition { wa1, wa2, wb1, wb2 })
}

/// Splits `workers` into those with a job of their own region in `jobs`
/// (priority) and the rest.
pub fn split_priority(
    market: &Market,
    workers: &[WorkerId],
    jobs: &[JobId],
) -> Result<(Vec<WorkerId>, Vec<WorkerId>), ModelError> {
    let mut regions: HashSet<&Region> = HashSet::new();
    for j in jobs {
        regions.insert(&market.job(j.as_str())?.region);
    }
    let mut priority = Vec::new();
    let mut rest = Vec::new();
    for w in workers {
        if regions.contains(&market.worker(w.as_str())?.region) {
            priority.push(w.clone());
        } else {
            rest.push(w.clone());
        }
    }
    Ok((priority, rest))
}

fn qing_sequences(market: &Market, p: &QingPartition) -> [(Vec<WorkerId>, Vec<JobId>); 3] {
    let mut ab_workers = p.wa2.clone();
    ab_workers.extend(p.wb2.iter().cloned());
    [
        (p.wa1.clone(), jobs_of(market, JobCategory::A)),
        (ab_workers, jobs_of(market, JobCategory::AB)),
        (p.wb1.clone(), jobs_of(market, JobCategory::B)),
    ]
}

pub fn qing_one_arrangement(
    market: &Market,
    partition: &QingPartition,
) -> Result<AssignmentArrangement, ProcedureError> {
    partition.validate(market)?;
    Ok(AssignmentArrangement::new(
        qing_sequences(market, partition)
            .into_iter()
            .map(|(ws, js)| TubeSequence::new(vec![ws], vec![js]))
            .collect(),
    ))
}

pub fn qing_two_arrangement(
    market: &Market,
    partition: &QingPartition,
) -> Result<AssignmentArrangement, ProcedureError> {
    partition.validate(market)?;
    let mut seqs = Vec::with_capacity(3);
    for (ws, js) in qing_sequences(market, partition) {
        let (priority, rest) = split_priority(market, &ws, &js)?;
        seqs.push(TubeSequence::new(vec![priority, rest], vec![js]));
    }
    Ok(AssignmentArrangement::new(seqs))
}

pub fn build_qing_one(
    market: &Market,
    partition: &QingPartition,
    seed: u64,
) -> Result<(AssignmentArrangement, AssignmentPlan), ProcedureError> {
    Ok((
        qing_one_arrangement(market, partition)?,
        AssignmentPlan::uniform(market, seed),
    ))
}

/// Same plan derivation as [`build_qing_one`]: one seed gives both
/// procedures the identical plan.
pub fn build_qing_two(
    market: &Market,
    partition: &QingPartition,
    seed: u64,
) -> Result<(AssignmentArrangement, AssignmentPlan), ProcedureError> {
    Ok((
        qing_two_arrangement(market, partition)?,
        AssignmentPlan::uniform(market, seed),
    ))
}

/// Region whose workers draw first in the two-tube procedure: most workers
/// among regions that have both workers and jobs, ties to the smallest id.
pub fn two_tube_lead_region(market: &Market) -> Option<Region> {
    let mut counts: BTreeMap<&Region, (usize, usize)> = BTreeMap::new();
    for w in market.workers() {
        counts.entry(&w.region).or_default().0 += 1;
    }
    for j in market.jobs() {
        counts.entry(&j.region).or_default().1 += 1;
    }
    let mut best: Option<(&Region, usize)> = None;
    for (region, (nw, nj)) in counts {
        if nw > 0 && nj > 0 && best.is_none_or(|(_, b)| nw > b) {
            best = Some((region, nw));
        }
    }
    best.map(|(r, _)| r.clone())
}

pub fn two_tube_arrangement(market: &Market) -> Result<AssignmentArrangement, ProcedureError> {
    for w in market.workers() {
        if let Some(j) = market.jobs().iter().find(|j| !j.category.admits(w.category)) {
            return Err(ProcedureError::MixedCategories {
                worker: w.id.0.clone(),
                job: j.id.0.clone(),
            });
        }
    }
    let lead = two_tube_lead_region(market);
    let is_lead = |r: &Region| lead.as_ref() == Some(r);
    let (w_lead, w_rest): (Vec<_>, Vec<_>) = market.workers().iter().partition(|w| is_lead(&w.region));
    let (j_lead, j_rest): (Vec<_>, Vec<_>) = market.jobs().iter().partition(|j| is_lead(&j.region));
    Ok(AssignmentArrangement::new(vec![TubeSequence::new(
        vec![
            w_lead.into_iter().map(|w| w.id.clone()).collect(),
            w_rest.into_iter().map(|w| w.id.clone()).collect(),
        ],
        vec![
            j_rest.into_iter().map(|j| j.id.clone()).collect(),
            j_lead.into_iter().map(|j| j.id.clone()).collect(),
        ],
    )]))
}

pub fn build_two_tube(
    market: &Market,
    seed: u64,
) -> Result<(AssignmentArrangement, AssignmentPlan), ProcedureError> {
    Ok((two_tube_arrangement(market)?, AssignmentPlan::uniform(market, seed)))
}

/// The arrangement of `kind`, for runs under an externally fixed plan.
pub fn arrangement_for(
    kind: ProcedureKind,
    market: &Market,
    partition: Option<&QingPartition>,
) -> Result<AssignmentArrangement, ProcedureError> {
    match kind {
        ProcedureKind::Song | ProcedureKind::MingTwo => Ok(song_arrangement(market)),
        ProcedureKind::MingOne => Ok(ming_one_arrangement(market)),
        ProcedureKind::QingOne => qing_one_arrangement(
            market,
            partition.ok_or(ProcedureError::MissingPartition(kind))?,
        ),
        ProcedureKind::QingTwo => qing_two_arrangement(
            market,
            partition.ok_or(ProcedureError::MissingPartition(kind))?,
        ),
        ProcedureKind::TwoTube => two_tube_arrangement(market),
    }
}

/// Inputs a procedure may need besides the market.
#[derive(Clone, Debug, Default)]
pub struct ProcedureInputs {
    /// Song preferences.
    pub preferences: Option<BTreeMap<WorkerId, Vec<JobId>>>,
    pub partition: Option<QingPartition>,
}

/// Builds `kind` with its own plan-generation method, drawing from `seed`
/// where the procedure is random.
///
/// Ming-one ministry orders are sampled from `seed`; use [`build_ming_one`]
/// to supply them explicitly.
pub fn build(
    kind: ProcedureKind,
    market: &Market,
    inputs: &ProcedureInputs,
    seed: u64,
) -> Result<(AssignmentArrangement, AssignmentPlan), ProcedureError> {
    match kind {
        ProcedureKind::Song => build_song(
            market,
            inputs
                .preferences
                .as_ref()
                .ok_or_else(|| ProcedureError::MissingOrder(first_worker(market)))?,
        ),
        ProcedureKind::MingOne => Ok((ming_one_arrangement(market), exam_order_plan(market, seed))),
        ProcedureKind::MingTwo => Ok(build_ming_two(market, seed)),
        ProcedureKind::QingOne => build_qing_one(
            market,
            inputs
                .partition
                .as_ref()
                .ok_or(ProcedureError::MissingPartition(kind))?,
            seed,
        ),
        ProcedureKind::QingTwo => build_qing_two(
            market,
            inputs
                .partition
                .as_ref()
                .ok_or(ProcedureError::MissingPartition(kind))?,
            seed,
        ),
        ProcedureKind::TwoTube => build_two_tube(market, seed),
    }
}

fn first_worker(market: &Market) -> String {
    market
        .workers()
        .first()
        .map(|w| w.id.0.clone())
        .unwrap_or_default()
}
