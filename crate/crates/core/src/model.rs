//! Markets, matchings and the two evaluation metrics.
//!
//! A [`Market`] holds workers and jobs, each tagged with a category and a
//! native region. Which pairs may be matched is never stored: it follows from
//! the categories and regions under a [`CompatibilityRegime`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Opaque worker identifier.
    WorkerId
);
string_id!(
    /// Opaque job identifier.
    JobId
);
string_id!(
    /// Native region of a worker or a job.
    Region
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WorkerCategory {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum JobCategory {
    A,
    AB,
    B,
}

impl JobCategory {
    /// Degree eligibility: A-jobs take A-workers, B-jobs take B-workers,
    /// AB-jobs take anyone.
    pub fn admits(self, worker: WorkerCategory) -> bool {
        !matches!(
            (worker, self),
            (WorkerCategory::A, JobCategory::B) | (WorkerCategory::B, JobCategory::A)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Worker {
    pub id: WorkerId,
    pub category: WorkerCategory,
    pub region: Region,
    /// 1 is best; unique within the category.
    pub exam_rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub id: JobId,
    pub category: JobCategory,
    pub region: Region,
}

/// Which constraints decide compatibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompatibilityRegime {
    /// Degree eligibility only.
    #[serde(rename = "C-")]
    EligibilityOnly,
    /// Eligibility plus the rule of avoidance: no job in the worker's own region.
    #[serde(rename = "C+")]
    EligibilityAndAvoidance,
}

impl CompatibilityRegime {
    pub fn token(self) -> &'static str {
        match self {
            CompatibilityRegime::EligibilityOnly => "C-",
            CompatibilityRegime::EligibilityAndAvoidance => "C+",
        }
    }
}

impl fmt::Display for CompatibilityRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for CompatibilityRegime {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "C-" => Ok(CompatibilityRegime::EligibilityOnly),
            "C+" => Ok(CompatibilityRegime::EligibilityAndAvoidance),
            other => Err(ModelError::UnknownRegime(other.to_owned())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown worker id `{0}`")]
    UnknownWorker(String),
    #[error("unknown job id `{0}`")]
    UnknownJob(String),
    #[error("duplicate worker id `{0}`")]
    DuplicateWorker(String),
    #[error("duplicate job id `{0}`")]
    DuplicateJob(String),
    #[error("duplicate region `{0}`")]
    DuplicateRegion(String),
    #[error("empty identifier in {0}")]
    EmptyId(&'static str),
    #[error("`{id}` references region `{region}` which is not in the market")]
    UnknownRegion { id: String, region: String },
    #[error("worker `{0}` has exam_rank 0; ranks start at 1")]
    ZeroExamRank(String),
    #[error("exam_rank {rank} is shared by `{first}` and `{second}` in category {category:?}")]
    DuplicateExamRank {
        category: WorkerCategory,
        rank: u32,
        first: String,
        second: String,
    },
    #[error("worker `{0}` is matched twice")]
    WorkerMatchedTwice(String),
    #[error("job `{0}` is matched twice")]
    JobMatchedTwice(String),
    #[error("unknown compatibility regime `{0}` (expected C- or C+)")]
    UnknownRegime(String),
}

/// Workers, jobs and regions. Immutable once built.
#[derive(Clone, Debug)]
pub struct Market {
    regions: Vec<Region>,
    workers: Vec<Worker>,
    jobs: Vec<Job>,
    worker_index: HashMap<WorkerId, usize>,
    job_index: HashMap<JobId, usize>,
}

impl PartialEq for Market {
    fn eq(&self, other: &Self) -> bool {
        self.regions == other.regions && self.workers == other.workers && self.jobs == other.jobs
    }
}

impl Eq for Market {}

impl Market {
    pub fn new(regions: Vec<Region>, workers: Vec<Worker>, jobs: Vec<Job>) -> Result<Self, ModelError> {
        let mut region_set = BTreeSet::new();
        for r in &regions {
            if r.0.is_empty() {
                return Err(ModelError::EmptyId("regions"));
            }
            if !region_set.insert(r.clone()) {
                return Err(ModelError::DuplicateRegion(r.0.clone()));
            }
        }

        let mut worker_index = HashMap::with_capacity(workers.len());
        let mut ranks: HashMap<(WorkerCategory, u32), &WorkerId> = HashMap::new();
        for (i, w) in workers.iter().enumerate() {
            if w.id.0.is_empty() {
                return Err(ModelError::EmptyId("workers"));
            }
            if worker_index.insert(w.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorker(w.id.0.clone()));
            }
            if !region_set.contains(&w.region) {
                return Err(ModelError::UnknownRegion {
                    id: w.id.0.clone(),
                    region: w.region.0.clone(),
                });
            }
            if w.exam_rank == 0 {
                return Err(ModelError::ZeroExamRank(w.id.0.clone()));
            }
            if let Some(first) = ranks.insert((w.category, w.exam_rank), &w.id) {
                return Err(ModelError::DuplicateExamRank {
                    category: w.category,
                    rank: w.exam_rank,
                    first: first.0.clone(),
                    second: w.id.0.clone(),
                });
            }
        }

        let mut job_index = HashMap::with_capacity(jobs.len());
        for (i, j) in jobs.iter().enumerate() {
            if j.id.0.is_empty() {
                return Err(ModelError::EmptyId("jobs"));
            }
            if job_index.insert(j.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateJob(j.id.0.clone()));
            }
            if !region_set.contains(&j.region) {
                return Err(ModelError::UnknownRegion {
                    id: j.id.0.clone(),
                    region: j.region.0.clone(),
                });
            }
        }

        Ok(Self {
            regions,
            workers,
            jobs,
            worker_index,
            job_index,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), Vec::new()).expect("empty market is valid")
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn workers(&self) -> &[Worker] {
        &self.workers
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn worker_index(&self, id: &str) -> Result<usize, ModelError> {
        self.worker_index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorker(id.to_owned()))
    }

    pub fn job_index(&self, id: &str) -> Result<usize, ModelError> {
        self.job_index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownJob(id.to_owned()))
    }

    pub fn worker(&self, id: &str) -> Result<&Worker, ModelError> {
        self.worker_index(id).map(|i| &self.workers[i])
    }

    pub fn job(&self, id: &str) -> Result<&Job, ModelError> {
        self.job_index(id).map(|i| &self.jobs[i])
    }

    pub fn workers_of(&self, category: WorkerCategory) -> impl Iterator<Item = &Worker> {
        self.workers.iter().filter(move |w| w.category == category)
    }

    pub fn jobs_of(&self, category: JobCategory) -> impl Iterator<Item = &Job> {
        self.jobs.iter().filter(move |j| j.category == category)
    }

    /// Index-level compatibility check; panics on out-of-range indices.
    pub fn compatible_at(&self, regime: CompatibilityRegime, worker: usize, job: usize) -> bool {
        let w = &self.workers[worker];
        let j = &self.jobs[job];
        if !j.category.admits(w.category) {
            return false;
        }
        match regime {
            CompatibilityRegime::EligibilityOnly => true,
            CompatibilityRegime::EligibilityAndAvoidance => w.region != j.region,
        }
    }

    pub fn is_compatible(
        &self,
        regime: CompatibilityRegime,
        worker: &str,
        job: &str,
    ) -> Result<bool, ModelError> {
        let wi = self.worker_index(worker)?;
        let ji = self.job_index(job)?;
        Ok(self.compatible_at(regime, wi, ji))
    }

    /// True iff every pair in `mu` is compatible under `regime`.
    pub fn is_feasible(&self, regime: CompatibilityRegime, mu: &Matching) -> Result<bool, ModelError> {
        let mut ok = true;
        for (w, j) in mu.pairs() {
            ok &= self.is_compatible(regime, w.as_str(), j.as_str())?;
        }
        Ok(ok)
    }

    pub fn level_vector(&self, mu: &Matching) -> Result<LevelVector, ModelError> {
        let mut v = LevelVector::default();
        for (w, j) in mu.pairs() {
            let worker = self.worker(w.as_str())?;
            let job = self.job(j.as_str())?;
            v.add(worker.category, job.category);
        }
        Ok(v)
    }

    /// Converts an index-pair list back into an id-keyed matching.
    pub fn matching_from_indices(&self, pairs: impl IntoIterator<Item = (usize, usize)>) -> Matching {
        let mut mu = Matching::new();
        for (w, j) in pairs {
            mu.insert(self.workers[w].id.clone(), self.jobs[j].id.clone())
                .expect("index pairs form a one-to-one matching");
        }
        mu
    }

    /// Worker-index to job-index view of `mu`.
    pub fn matching_to_indices(&self, mu: &Matching) -> Result<Vec<Option<usize>>, ModelError> {
        let mut out = vec![None; self.workers.len()];
        for (w, j) in mu.pairs() {
            out[self.worker_index(w.as_str())?] = Some(self.job_index(j.as_str())?);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketFile {
    regions: Vec<Region>,
    workers: Vec<Worker>,
    jobs: Vec<Job>,
}

impl Serialize for Market {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MarketFile {
            regions: self.regions.clone(),
            workers: self.workers.clone(),
            jobs: self.jobs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Market {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = MarketFile::deserialize(deserializer)?;
        Market::new(file.regions, file.workers, file.jobs).map_err(serde::de::Error::custom)
    }
}

/// A partial one-to-one map between workers and jobs.
///
/// Carries no reference to a market; feasibility and metrics are evaluated
/// against whichever market and regime the caller supplies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    by_worker: BTreeMap<WorkerId, JobId>,
    by_job: BTreeMap<JobId, WorkerId>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<W, J>(pairs: impl IntoIterator<Item = (W, J)>) -> Result<Self, ModelError>
    where
        W: Into<WorkerId>,
        J: Into<JobId>,
    {
        let mut mu = Self::new();
        for (w, j) in pairs {
            mu.insert(w.into(), j.into())?;
        }
        Ok(mu)
    }

    pub fn insert(&mut self, worker: WorkerId, job: JobId) -> Result<(), ModelError> {
        if self.by_worker.contains_key(&worker) {
            return Err(ModelError::WorkerMatchedTwice(worker.0));
        }
        if self.by_job.contains_key(&job) {
            return Err(ModelError::JobMatchedTwice(job.0));
        }
        self.by_job.insert(job.clone(), worker.clone());
        self.by_worker.insert(worker, job);
        Ok(())
    }

    /// Removes the pair containing `worker`, returning its job.
    pub fn unmatch_worker(&mut self, worker: &str) -> Option<JobId> {
        let job = self.by_worker.remove(worker)?;
        self.by_job.remove(&job);
        Some(job)
    }

    pub fn job_of(&self, worker: &str) -> Option<&JobId> {
        self.by_worker.get(worker)
    }

    pub fn worker_of(&self, job: &str) -> Option<&WorkerId> {
        self.by_job.get(job)
    }

    /// Pairs ordered by worker id.
    pub fn pairs(&self) -> impl Iterator<Item = (&WorkerId, &JobId)> {
        self.by_worker.iter()
    }

    pub fn size(&self) -> usize {
        self.by_worker.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_worker.is_empty()
    }

    /// Merges matchings over disjoint sub-markets.
    pub fn union(mut self, other: Matching) -> Result<Matching, ModelError> {
        for (w, j) in other.by_worker {
            self.insert(w, j)?;
        }
        Ok(self)
    }
}

impl<W: Into<WorkerId>, J: Into<JobId>> From<(W, J)> for Matching {
    fn from((w, j): (W, J)) -> Self {
        let mut mu = Matching::new();
        mu.insert(w.into(), j.into()).expect("single pair");
        mu
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRecord {
    worker: WorkerId,
    job: JobId,
}

impl Serialize for Matching {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.by_worker.iter().map(|(w, j)| PairRecord {
            worker: w.clone(),
            job: j.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<PairRecord>::deserialize(deserializer)?;
        Matching::from_pairs(records.into_iter().map(|r| (r.worker, r.job)))
            .map_err(serde::de::Error::custom)
    }
}

/// The four counts behind the high-level dominance order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelVector {
    pub total_matched: usize,
    pub a_workers_matched: usize,
    pub a_jobs_filled: usize,
    pub ab_jobs_filled: usize,
}

impl LevelVector {
    pub const fn new(
        total_matched: usize,
        a_workers_matched: usize,
        a_jobs_filled: usize,
        ab_jobs_filled: usize,
    ) -> Self {
        Self {
            total_matched,
            a_workers_matched,
            a_jobs_filled,
            ab_jobs_filled,
        }
    }

    pub(crate) fn add(&mut self, worker: WorkerCategory, job: JobCategory) {
        self.total_matched += 1;
        if worker == WorkerCategory::A {
            self.a_workers_matched += 1;
        }
        match job {
            JobCategory::A => self.a_jobs_filled += 1,
            JobCategory::AB => self.ab_jobs_filled += 1,
            JobCategory::B => {}
        }
    }

    pub(crate) fn remove(&mut self, worker: WorkerCategory, job: JobCategory) {
        self.total_matched -= 1;
        if worker == WorkerCategory::A {
            self.a_workers_matched -= 1;
        }
        match job {
            JobCategory::A => self.a_jobs_filled -= 1,
            JobCategory::AB => self.ab_jobs_filled -= 1,
            JobCategory::B => {}
        }
    }

    /// Weak coordinatewise dominance: `self` prioritizes at least as many
    /// high levels as `other` on all four counts.
    pub fn hl_dominates(&self, other: &LevelVector) -> bool {
        self.total_matched >= other.total_matched
            && self.a_workers_matched >= other.a_workers_matched
            && self.a_jobs_filled >= other.a_jobs_filled
            && self.ab_jobs_filled >= other.ab_jobs_filled
    }

    /// Dominates and differs in at least one coordinate.
    pub fn strictly_dominates(&self, other: &LevelVector) -> bool {
        self != other && self.hl_dominates(other)
    }
}

impl fmt::Display for LevelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.total_matched, self.a_workers_matched, self.a_jobs_filled, self.ab_jobs_filled
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::example1_market;
    use proptest::prelude::*;

    const CM: CompatibilityRegime = CompatibilityRegime::EligibilityOnly;
    const CP: CompatibilityRegime = CompatibilityRegime::EligibilityAndAvoidance;

    fn worker(id: &str, category: WorkerCategory, region: &str, rank: u32) -> Worker {
        Worker {
            id: id.into(),
            category,
            region: region.into(),
            exam_rank: rank,
        }
    }

    fn job(id: &str, category: JobCategory, region: &str) -> Job {
        Job {
            id: id.into(),
            category,
            region: region.into(),
        }
    }

    fn xy_market() -> Market {
        Market::new(
            vec!["X".into(), "Y".into()],
            vec![
                worker("wa", WorkerCategory::A, "X", 1),
                worker("wb", WorkerCategory::B, "X", 1),
            ],
            vec![
                job("ja_x", JobCategory::A, "X"),
                job("jab_y", JobCategory::AB, "Y"),
                job("jb_y", JobCategory::B, "Y"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn compatibility_examples() {
        let m = xy_market();
        assert!(m.is_compatible(CM, "wa", "jab_y").unwrap());
        assert!(!m.is_compatible(CP, "wa", "ja_x").unwrap());
        assert!(m.is_compatible(CM, "wa", "ja_x").unwrap());
        assert!(!m.is_compatible(CM, "wb", "ja_x").unwrap());
        assert!(!m.is_compatible(CM, "wa", "jb_y").unwrap());
        assert!(m.is_compatible(CP, "wb", "jb_y").unwrap());
        assert_eq!(
            m.is_compatible(CM, "nobody", "ja_x"),
            Err(ModelError::UnknownWorker("nobody".into()))
        );
        assert_eq!(
            m.is_compatible(CM, "wa", "nothing"),
            Err(ModelError::UnknownJob("nothing".into()))
        );
    }

    #[test]
    fn feasibility_on_example1() {
        let m = example1_market();
        assert!(m.is_feasible(CM, &Matching::new()).unwrap());
        assert!(m.is_feasible(CM, &Matching::from(("w_a", "j_ab"))).unwrap());
        assert!(!m.is_feasible(CM, &Matching::from(("w_b", "j_a"))).unwrap());
        assert!(m.is_feasible(CM, &Matching::from(("w_x", "j_a"))).is_err());
    }

    #[test]
    fn sizes_and_vectors() {
        let m = example1_market();
        assert_eq!(Matching::new().size(), 0);
        let both = Matching::from_pairs([("w_a", "j_a"), ("w_b", "j_ab")]).unwrap();
        assert_eq!(both.size(), 2);
        assert_eq!(Matching::from(("w_a", "j_ab")).size(), 1);
        assert_eq!(m.level_vector(&Matching::new()).unwrap(), LevelVector::default());
        assert_eq!(m.level_vector(&both).unwrap(), LevelVector::new(2, 1, 1, 1));
    }

    #[test]
    fn dominance_examples() {
        let alt = LevelVector::new(4, 2, 2, 2);
        let song = LevelVector::new(2, 2, 0, 2);
        assert!(alt.hl_dominates(&song));
        assert!(song.hl_dominates(&song));
        assert!(!song.hl_dominates(&alt));
        assert!(alt.strictly_dominates(&song));
        assert!(!song.strictly_dominates(&song));
    }

    #[test]
    fn matching_rejects_reuse() {
        let mut mu = Matching::from(("w1", "j1"));
        assert_eq!(
            mu.insert("w1".into(), "j2".into()),
            Err(ModelError::WorkerMatchedTwice("w1".into()))
        );
        assert_eq!(
            mu.insert("w2".into(), "j1".into()),
            Err(ModelError::JobMatchedTwice("j1".into()))
        );
        assert_eq!(mu.unmatch_worker("w1"), Some("j1".into()));
        assert!(mu.is_empty());
    }

    #[test]
    fn market_validation() {
        let dup = Market::new(
            vec!["X".into()],
            vec![worker("w", WorkerCategory::A, "X", 1), worker("w", WorkerCategory::B, "X", 1)],
            vec![],
        );
        assert_eq!(dup, Err(ModelError::DuplicateWorker("w".into())));
        let rank = Market::new(
            vec!["X".into()],
            vec![worker("w1", WorkerCategory::A, "X", 2), worker("w2", WorkerCategory::A, "X", 2)],
            vec![],
        );
        assert!(matches!(rank, Err(ModelError::DuplicateExamRank { rank: 2, .. })));
        // Equal ranks across categories are fine.
        assert!(Market::new(
            vec!["X".into()],
            vec![worker("w1", WorkerCategory::A, "X", 1), worker("w2", WorkerCategory::B, "X", 1)],
            vec![],
        )
        .is_ok());
        let region = Market::new(vec!["X".into()], vec![], vec![job("j", JobCategory::A, "Q")]);
        assert!(matches!(region, Err(ModelError::UnknownRegion { .. })));
        let zero = Market::new(vec!["X".into()], vec![worker("w", WorkerCategory::A, "X", 0)], vec![]);
        assert_eq!(zero, Err(ModelError::ZeroExamRank("w".into())));
    }

    #[test]
    fn market_file_round_trip_and_unknown_fields() {
        let m = xy_market();
        let text = serde_json::to_string(&m).unwrap();
        let back: Market = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);

        let bad = r#"{"regions":["X"],"workers":[],"jobs":[],"extra":1}"#;
        assert!(serde_json::from_str::<Market>(bad).is_err());
        let bad_worker = r#"{"regions":["X"],"workers":[{"id":"w","category":"A","region":"X","exam_rank":1,"age":3}],"jobs":[]}"#;
        assert!(serde_json::from_str::<Market>(bad_worker).is_err());
        let bad_cat = r#"{"regions":["X"],"workers":[],"jobs":[{"id":"j","category":"C","region":"X"}]}"#;
        assert!(serde_json::from_str::<Market>(bad_cat).is_err());
    }

    #[test]
    fn regime_tokens() {
        assert_eq!("C-".parse::<CompatibilityRegime>().unwrap(), CM);
        assert_eq!("C+".parse::<CompatibilityRegime>().unwrap(), CP);
        assert!("C".parse::<CompatibilityRegime>().is_err());
        assert_eq!(serde_json::to_string(&CP).unwrap(), "\"C+\"");
    }

    fn level_vector() -> impl Strategy<Value = LevelVector> {
        (0usize..5, 0usize..5, 0usize..5, 0usize..5).prop_map(|(a, b, c, d)| LevelVector::new(a, b, c, d))
    }

    fn small_market() -> impl Strategy<Value = Market> {
        let workers = prop::collection::vec((any::<bool>(), 0usize..3), 0..5);
        let jobs = prop::collection::vec((0usize..3, 0usize..3), 0..5);
        (workers, jobs).prop_map(|(ws, js)| {
            let regions: Vec<Region> = ["R0", "R1", "R2"].iter().map(|&r| r.into()).collect();
            let workers = ws
                .iter()
                .enumerate()
                .map(|(i, &(a, r))| Worker {
                    id: WorkerId(format!("w{i}")),
                    category: if a { WorkerCategory::A } else { WorkerCategory::B },
                    region: regions[r].clone(),
                    exam_rank: i as u32 + 1,
                })
                .collect();
            let jobs = js
                .iter()
                .enumerate()
                .map(|(i, &(c, r))| Job {
                    id: JobId(format!("j{i}")),
                    category: [JobCategory::A, JobCategory::AB, JobCategory::B][c],
                    region: regions[r].clone(),
                })
                .collect();
            Market::new(regions, workers, jobs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn avoidance_only_removes_pairs(m in small_market()) {
            for w in 0..m.workers().len() {
                for j in 0..m.jobs().len() {
                    if m.compatible_at(CP, w, j) {
                        prop_assert!(m.compatible_at(CM, w, j));
                    }
                }
            }
        }

        #[test]
        fn feasibility_closed_under_removal(m in small_market(), drop in 0usize..5) {
            // Greedy feasible matching under C+, then drop one pair.
            let mut mu = Matching::new();
            for (wi, w) in m.workers().iter().enumerate() {
                if let Some(ji) = (0..m.jobs().len())
                    .find(|&ji| m.compatible_at(CP, wi, ji) && mu.worker_of(m.jobs()[ji].id.as_str()).is_none())
                {
                    mu.insert(w.id.clone(), m.jobs()[ji].id.clone()).unwrap();
                }
            }
            prop_assert!(m.is_feasible(CP, &mu).unwrap());
            let victim = mu.pairs().nth(drop).map(|(w, _)| w.clone());
            if let Some(w) = victim {
                mu.unmatch_worker(w.as_str());
            }
            prop_assert!(m.is_feasible(CP, &mu).unwrap());
            prop_assert_eq!(m.level_vector(&mu).unwrap().total_matched, mu.size());
        }

        #[test]
        fn dominance_is_a_preorder(a in level_vector(), b in level_vector(), c in level_vector()) {
            prop_assert!(a.hl_dominates(&a));
            if a.hl_dominates(&b) && b.hl_dominates(&c) {
                prop_assert!(a.hl_dominates(&c));
            }
        }
    }
}
