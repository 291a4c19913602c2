//! Ground truth for matching questions: maximum matchings via augmenting
//! paths, brute-force enumeration of feasible matchings, high-level
//! optimality and regional sufficiency.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CompatibilityRegime, JobId, LevelVector, Market, Matching, ModelError, Region, WorkerId};

/// Default cap on `|W| + |J|` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("matching is infeasible: `{worker}` cannot take `{job}`")]
    Infeasible { worker: String, job: String },
    #[error("market has {vertices} workers and jobs; enumeration bound is {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("not an augmenting path: {0}")]
    InvalidPath(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "side", content = "id", rename_all = "snake_case")]
pub enum Vertex {
    Worker(WorkerId),
    Job(JobId),
}

/// Alternating path `w0, j0, w1, j1, ..., wk, jk`: the edges `(wi, ji)` are
/// outside the matching, the edges `(ji, w(i+1))` inside it, and `w0`, `jk`
/// are unmatched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentingPath {
    pub vertices: Vec<Vertex>,
}

impl AugmentingPath {
    /// Worker/job pairs along the path: `(w0, j0), (w1, j1), ...`.
    fn steps(&self) -> Result<Vec<(&WorkerId, &JobId)>, OracleError> {
        if self.vertices.is_empty() || !self.vertices.len().is_multiple_of(2) {
            return Err(OracleError::InvalidPath(format!(
                "{} vertices; an odd number of edges needs an even vertex count",
                self.vertices.len()
            )));
        }
        self.vertices
            .chunks(2)
            .map(|c| match c {
                [Vertex::Worker(w), Vertex::Job(j)] => Ok((w, j)),
                _ => Err(OracleError::InvalidPath(
                    "vertices must alternate worker, job, worker, ...".into(),
                )),
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn validate(
        &self,
        market: &Market,
        regime: CompatibilityRegime,
        mu: &Matching,
    ) -> Result<(), OracleError> {
        let steps = self.steps()?;
        let mut seen_w = BTreeSet::new();
        let mut seen_j = BTreeSet::new();
        for (i, &(w, j)) in steps.iter().enumerate() {
            if !seen_w.insert(w) || !seen_j.insert(j) {
                return Err(OracleError::InvalidPath("a vertex repeats".into()));
            }
            if !market.is_compatible(regime, w.as_str(), j.as_str())? {
                return Err(OracleError::InvalidPath(format!("`{w}` is incompatible with `{j}`")));
            }
            if mu.job_of(w.as_str()) == Some(j) {
                return Err(OracleError::InvalidPath(format!("edge `{w}`-`{j}` is already matched")));
            }
            if let Some(&(next, _)) = steps.get(i + 1) {
                if mu.worker_of(j.as_str()) != Some(next) {
                    return Err(OracleError::InvalidPath(format!(
                        "`{j}` is not matched to `{next}`"
                    )));
                }
            }
        }
        let (first, _) = steps[0];
        let (_, last) = steps[steps.len() - 1];
        if mu.job_of(first.as_str()).is_some() {
            return Err(OracleError::InvalidPath(format!("start `{first}` is matched")));
        }
        if mu.worker_of(last.as_str()).is_some() {
            return Err(OracleError::InvalidPath(format!("end `{last}` is matched")));
        }
        Ok(())
    }

    /// Flips the path: its unmatched edges replace its matched ones.
    pub fn augment(
        &self,
        market: &Market,
        regime: CompatibilityRegime,
        mu: &Matching,
    ) -> Result<Matching, OracleError> {
        self.validate(market, regime, mu)?;
        let mut out = mu.clone();
        let steps = self.steps()?;
        for &(w, _) in &steps {
            out.unmatch_worker(w.as_str());
        }
        for (w, j) in steps {
            out.insert(w.clone(), j.clone())?;
        }
        Ok(out)
    }
}

/// Compatibility graph in index form.
pub(crate) struct Graph {
    pub(crate) adj: Vec<Vec<usize>>,
    pub(crate) n_jobs: usize,
}

impl Graph {
    pub(crate) fn new(market: &Market, regime: CompatibilityRegime) -> Self {
        let n_jobs = market.jobs().len();
        let adj = (0..market.workers().len())
            .map(|w| (0..n_jobs).filter(|&j| market.compatible_at(regime, w, j)).collect())
            .collect();
        Self { adj, n_jobs }
    }

    /// Breadth-first search from all unmatched workers at once; returns the
    /// `(worker, job)` steps of the first augmenting path found.
    fn augmenting_steps(
        &self,
        job_of: &[Option<usize>],
        worker_of: &[Option<usize>],
    ) -> Option<Vec<(usize, usize)>> {
        let mut parent_job: Vec<Option<usize>> = vec![None; self.adj.len()];
        let mut parent_worker: Vec<Option<usize>> = vec![None; self.n_jobs];
        let mut visited = vec![false; self.adj.len()];
        let mut queue = VecDeque::new();
        for w in 0..self.adj.len() {
            if job_of[w].is_none() {
                visited[w] = true;
                queue.push_back(w);
            }
        }
        while let Some(w) = queue.pop_front() {
            for &j in &self.adj[w] {
                if job_of[w] == Some(j) || parent_worker[j].is_some() {
                    continue;
                }
                parent_worker[j] = Some(w);
                match worker_of[j] {
                    None => {
                        let mut steps = Vec::new();
                        let mut job = j;
                        loop {
                            let worker = parent_worker[job].expect("reached jobs have a parent");
                            steps.push((worker, job));
                            match parent_job[worker] {
                                Some(prev) => job = prev,
                                None => break,
                            }
                        }
                        steps.reverse();
                        return Some(steps);
                    }
                    Some(mate) if !visited[mate] => {
                        visited[mate] = true;
                        parent_job[mate] = Some(j);
                        queue.push_back(mate);
                    }
                    Some(_) => {}
                }
            }
        }
        None
    }

    pub(crate) fn maximum(&self) -> Vec<Option<usize>> {
        let mut job_of = vec![None; self.adj.len()];
        let mut worker_of = vec![None; self.n_jobs];
        while let Some(steps) = self.augmenting_steps(&job_of, &worker_of) {
            for (w, j) in steps {
                job_of[w] = Some(j);
                worker_of[j] = Some(w);
            }
        }
        job_of
    }
}

/// Partner index per worker and per job.
type Partners = (Vec<Option<usize>>, Vec<Option<usize>>);

fn indexed(market: &Market, regime: CompatibilityRegime, mu: &Matching) -> Result<Partners, OracleError> {
    let job_of = market.matching_to_indices(mu)?;
    let mut worker_of = vec![None; market.jobs().len()];
    for (w, j) in job_of.iter().enumerate() {
        if let Some(j) = *j {
            if !market.compatible_at(regime, w, j) {
                return Err(OracleError::Infeasible {
                    worker: market.workers()[w].id.0.clone(),
                    job: market.jobs()[j].id.0.clone(),
                });
            }
            worker_of[j] = Some(w);
        }
    }
    Ok((job_of, worker_of))
}

/// A maximum-cardinality feasible matching.
pub fn maximum_matching(market: &Market, regime: CompatibilityRegime) -> Matching {
    let job_of = Graph::new(market, regime).maximum();
    market.matching_from_indices(job_of.into_iter().enumerate().filter_map(|(w, j)| Some((w, j?))))
}

pub fn maximum_matching_size(market: &Market, regime: CompatibilityRegime) -> usize {
    Graph::new(market, regime).maximum().iter().flatten().count()
}

pub fn find_augmenting_path(
    market: &Market,
    regime: CompatibilityRegime,
    mu: &Matching,
) -> Result<Option<AugmentingPath>, OracleError> {
    let (job_of, worker_of) = indexed(market, regime, mu)?;
    let steps = Graph::new(market, regime).augmenting_steps(&job_of, &worker_of);
    Ok(steps.map(|steps| AugmentingPath {
        vertices: steps
            .into_iter()
            .flat_map(|(w, j)| {
                [
                    Vertex::Worker(market.workers()[w].id.clone()),
                    Vertex::Job(market.jobs()[j].id.clone()),
                ]
            })
            .collect(),
    }))
}

/// True iff no augmenting path exists.
pub fn is_maximum(market: &Market, regime: CompatibilityRegime, mu: &Matching) -> Result<bool, OracleError> {
    Ok(find_augmenting_path(market, regime, mu)?.is_none())
}

fn check_bound(market: &Market, bound: usize) -> Result<(), OracleError> {
    let vertices = market.workers().len() + market.jobs().len();
    if vertices > bound {
        return Err(OracleError::TooLarge { vertices, bound });
    }
    Ok(())
}

/// Every feasible matching exactly once, the empty matching first.
pub fn enumerate_feasible_matchings(
    market: &Market,
    regime: CompatibilityRegime,
) -> Result<FeasibleMatchings<'_>, OracleError> {
    enumerate_feasible_matchings_bounded(market, regime, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_feasible_matchings_bounded(
    market: &Market,
    regime: CompatibilityRegime,
    bound: usize,
) -> Result<FeasibleMatchings<'_>, OracleError> {
    check_bound(market, bound)?;
    let graph = Graph::new(market, regime);
    let n = market.workers().len();
    Ok(FeasibleMatchings {
        market,
        choice: vec![0; n],
        used: vec![false; graph.n_jobs],
        graph,
        done: false,
    })
}

/// Odometer over per-worker choices; choice 0 is "unmatched", choice `k`
/// the `k`-th compatible job.
pub struct FeasibleMatchings<'a> {
    market: &'a Market,
    graph: Graph,
    choice: Vec<usize>,
    used: Vec<bool>,
    done: bool,
}

impl FeasibleMatchings<'_> {
    fn job_at(&self, w: usize) -> Option<usize> {
        self.choice[w].checked_sub(1).map(|k| self.graph.adj[w][k])
    }

    fn advance(&mut self) {
        for w in (0..self.choice.len()).rev() {
            if let Some(j) = self.job_at(w) {
                self.used[j] = false;
            }
            let adj = &self.graph.adj[w];
            let next = (self.choice[w]..adj.len()).find(|&k| !self.used[adj[k]]);
            match next {
                Some(k) => {
                    self.choice[w] = k + 1;
                    self.used[adj[k]] = true;
                    return;
                }
                None => self.choice[w] = 0,
            }
        }
        self.done = true;
    }
}

impl Iterator for FeasibleMatchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let pairs: Vec<_> = (0..self.choice.len())
            .filter_map(|w| Some((w, self.job_at(w)?)))
            .collect();
        self.advance();
        Some(self.market.matching_from_indices(pairs))
    }
}

/// Level vectors of all feasible matchings.
pub fn achievable_level_vectors(
    market: &Market,
    regime: CompatibilityRegime,
) -> Result<BTreeSet<LevelVector>, OracleError> {
    achievable_level_vectors_bounded(market, regime, DEFAULT_ENUMERATION_BOUND)
}

pub fn achievable_level_vectors_bounded(
    market: &Market,
    regime: CompatibilityRegime,
    bound: usize,
) -> Result<BTreeSet<LevelVector>, OracleError> {
    check_bound(market, bound)?;
    let graph = Graph::new(market, regime);
    let mut walk = VectorWalk {
        market,
        graph: &graph,
        used: vec![false; graph.n_jobs],
        current: LevelVector::default(),
        out: BTreeSet::new(),
    };
    walk.visit(0);
    Ok(walk.out)
}

struct VectorWalk<'a> {
    market: &'a Market,
    graph: &'a Graph,
    used: Vec<bool>,
    current: LevelVector,
    out: BTreeSet<LevelVector>,
}

impl VectorWalk<'_> {
    fn visit(&mut self, w: usize) {
        if w == self.graph.adj.len() {
            self.out.insert(self.current);
            return;
        }
        self.visit(w + 1);
        let wc = self.market.workers()[w].category;
        for k in 0..self.graph.adj[w].len() {
            let j = self.graph.adj[w][k];
            if self.used[j] {
                continue;
            }
            let jc = self.market.jobs()[j].category;
            self.used[j] = true;
            self.current.add(wc, jc);
            self.visit(w + 1);
            self.current.remove(wc, jc);
            self.used[j] = false;
        }
    }
}

/// Vectors not strictly dominated by any other achievable vector.
pub fn hl_frontier(vectors: &BTreeSet<LevelVector>) -> Vec<LevelVector> {
    vectors
        .iter()
        .filter(|v| !vectors.iter().any(|u| u.strictly_dominates(v)))
        .copied()
        .collect()
}

/// True iff no achievable vector strictly dominates `v`.
pub fn is_hl_optimal_vector(achievable: &BTreeSet<LevelVector>, v: &LevelVector) -> bool {
    !achievable.iter().any(|u| u.strictly_dominates(v))
}

pub fn is_hl_optimal(market: &Market, regime: CompatibilityRegime, mu: &Matching) -> Result<bool, OracleError> {
    indexed(market, regime, mu)?;
    let v = market.level_vector(mu)?;
    Ok(is_hl_optimal_vector(&achievable_level_vectors(market, regime)?, &v))
}

/// Workers and jobs per region, over regions that have either.
pub fn region_counts(market: &Market) -> BTreeMap<&Region, (usize, usize)> {
    let mut counts: BTreeMap<&Region, (usize, usize)> = BTreeMap::new();
    for w in market.workers() {
        counts.entry(&w.region).or_default().0 += 1;
    }
    for j in market.jobs() {
        counts.entry(&j.region).or_default().1 += 1;
    }
    counts
}

/// Every region with both workers and jobs has at least as many workers.
pub fn is_regionally_sufficient(market: &Market) -> bool {
    region_counts(market)
        .values()
        .all(|&(w, j)| w == 0 || j == 0 || w >= j)
}
