//! The counterexample markets, each with the fixed plan that exposes it and
//! the outcomes every procedure must produce under that plan.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::engine::{execute, AssignmentPlan};
use crate::model::{
    CompatibilityRegime, Job, JobCategory, JobId, LevelVector, Market, Matching, Region, Worker,
    WorkerCategory, WorkerId,
};
use crate::procedures::{arrangement_for, ProcedureKind, QingPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseName {
    Example1,
    Prop1,
    Prop2,
    Prop3,
    Prop4,
    Thm1,
    Thm2,
    Thm3,
}

impl CaseName {
    pub const ALL: [CaseName; 8] = [
        CaseName::Example1,
        CaseName::Prop1,
        CaseName::Prop2,
        CaseName::Prop3,
        CaseName::Prop4,
        CaseName::Thm1,
        CaseName::Thm2,
        CaseName::Thm3,
    ];

    pub fn token(self) -> &'static str {
        match self {
            CaseName::Example1 => "example1",
            CaseName::Prop1 => "prop1",
            CaseName::Prop2 => "prop2",
            CaseName::Prop3 => "prop3",
            CaseName::Prop4 => "prop4",
            CaseName::Thm1 => "thm1",
            CaseName::Thm2 => "thm2",
            CaseName::Thm3 => "thm3",
        }
    }

    /// Builds the case at scale `n`; the example ignores `n`.
    pub fn generate(self, n: usize) -> Result<GeneratedCase, ExperimentError> {
        match self {
            CaseName::Example1 => Ok(gen_example1()),
            CaseName::Prop1 => gen_prop1(n),
            CaseName::Prop2 => gen_prop2(n),
            CaseName::Prop3 => gen_prop3(n),
            CaseName::Prop4 => gen_prop4(n),
            CaseName::Thm1 => gen_thm1(n),
            CaseName::Thm2 => gen_thm2(n),
            CaseName::Thm3 => gen_thm3(n),
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for CaseName {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseName::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| ExperimentError::UnknownCase(s.to_owned()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedOutcome {
    pub size: usize,
    pub level: LevelVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedCase {
    pub name: CaseName,
    pub n: usize,
    pub regime: CompatibilityRegime,
    pub market: Market,
    pub plan: AssignmentPlan,
    /// Qing partition; absent when no exact-fill partition exists.
    pub partition: Option<QingPartition>,
    pub expected: BTreeMap<ProcedureKind, ExpectedOutcome>,
    /// Expected high-level optimality of procedure outcomes, where claimed.
    pub hl_optimal: BTreeMap<ProcedureKind, bool>,
    pub maximum_size: usize,
}

impl GeneratedCase {
    /// Runs `kind` under the case's fixed plan.
    pub fn run(&self, kind: ProcedureKind) -> Result<Matching, ExperimentError> {
        let arr = arrangement_for(kind, &self.market, self.partition.as_ref())?;
        Ok(execute(&self.market, self.regime, &arr, &self.plan)?)
    }

    /// The plan's job orders, used as Song preferences.
    pub fn preferences(&self) -> &BTreeMap<WorkerId, Vec<JobId>> {
        &self.plan.job_orders
    }
}

fn check_scale(n: usize) -> Result<(), ExperimentError> {
    if n < 1 {
        return Err(ExperimentError::Scale(n));
    }
    Ok(())
}

struct Builder {
    regions: Vec<Region>,
    workers: Vec<Worker>,
    jobs: Vec<Job>,
    ranks: [u32; 2],
}

impl Builder {
    fn new(regions: &[&str]) -> Self {
        Self {
            regions: regions.iter().map(|&r| Region::from(r)).collect(),
            workers: Vec::new(),
            jobs: Vec::new(),
            ranks: [0, 0],
        }
    }

    /// Adds `count` workers ranked after all earlier ones of their category.
    fn workers(&mut self, prefix: &str, category: WorkerCategory, region: &str, count: usize) -> Vec<WorkerId> {
        let slot = usize::from(category == WorkerCategory::B);
        (1..=count)
            .map(|i| {
                self.ranks[slot] += 1;
                let id = WorkerId::new(format!("{prefix}{i}"));
                self.workers.push(Worker {
                    id: id.clone(),
                    category,
                    region: region.into(),
                    exam_rank: self.ranks[slot],
                });
                id
            })
            .collect()
    }

    fn jobs(&mut self, prefix: &str, category: JobCategory, region: &str, count: usize) -> Vec<JobId> {
        (1..=count)
            .map(|i| {
                let id = JobId::new(format!("{prefix}{i}"));
                self.jobs.push(Job {
                    id: id.clone(),
                    category,
                    region: region.into(),
                });
                id
            })
            .collect()
    }

    fn market(self) -> Market {
        Market::new(self.regions, self.workers, self.jobs).expect("generated market is valid")
    }
}

/// Every worker in `order` ranks jobs by the concatenation of `job_groups`.
fn uniform_plan(order: Vec<WorkerId>, job_groups: &[&[JobId]]) -> AssignmentPlan {
    let ranking: Vec<JobId> = job_groups.iter().flat_map(|g| g.iter().cloned()).collect();
    let job_orders = order.iter().map(|w| (w.clone(), ranking.clone())).collect();
    AssignmentPlan::new(order, job_orders)
}

fn outcome(size: usize, level: (usize, usize, usize, usize)) -> ExpectedOutcome {
    ExpectedOutcome {
        size,
        level: LevelVector::new(level.0, level.1, level.2, level.3),
    }
}

fn expect(
    pairs: impl IntoIterator<Item = (ProcedureKind, ExpectedOutcome)>,
) -> BTreeMap<ProcedureKind, ExpectedOutcome> {
    pairs.into_iter().collect()
}

use ProcedureKind::{MingOne, MingTwo, QingOne, QingTwo, Song, TwoTube};

/// One A- and one B-worker, one A- and one AB-job. The A-worker draws first
/// and prefers the AB-job, leaving the B-worker nothing he may take.
pub fn gen_example1() -> GeneratedCase {
    let worker = |id: &str, category| Worker {
        id: id.into(),
        category,
        region: "X".into(),
        exam_rank: 1,
    };
    let job = |id: &str, category| Job {
        id: id.into(),
        category,
        region: "Y".into(),
    };
    let market = Market::new(
        vec!["X".into(), "Y".into()],
        vec![worker("w_a", WorkerCategory::A), worker("w_b", WorkerCategory::B)],
        vec![job("j_a", JobCategory::A), job("j_ab", JobCategory::AB)],
    )
    .expect("example market is valid");
    let (wa, wb) = (WorkerId::from("w_a"), WorkerId::from("w_b"));
    let (ja, jab) = (JobId::from("j_a"), JobId::from("j_ab"));
    let plan = uniform_plan(vec![wa.clone(), wb.clone()], &[&[jab], &[ja]]);
    let greedy = outcome(1, (1, 1, 0, 1));
    let full = outcome(2, (2, 1, 1, 1));
    GeneratedCase {
        name: CaseName::Example1,
        n: 1,
        regime: CompatibilityRegime::EligibilityOnly,
        market,
        plan,
        partition: Some(QingPartition {
            wa1: vec![wa],
            wa2: vec![],
            wb1: vec![],
            wb2: vec![wb],
        }),
        expected: expect([
            (Song, greedy),
            (MingTwo, greedy),
            (MingOne, full),
            (QingOne, full),
            (QingTwo, full),
        ]),
        hl_optimal: [(Song, false), (MingTwo, false), (MingOne, true), (QingOne, true), (QingTwo, true)]
            .into_iter()
            .collect(),
        maximum_size: 2,
    }
}

/// `n` A- and `n` B-workers from X; `n` A- and `n` AB-jobs from Y. A-workers
/// draw first and every worker ranks AB-jobs above A-jobs.
fn eligibility_market(n: usize) -> (Market, AssignmentPlan, QingPartition) {
    let mut b = Builder::new(&["X", "Y"]);
    let wa = b.workers("a", WorkerCategory::A, "X", n);
    let wb = b.workers("b", WorkerCategory::B, "X", n);
    let ja = b.jobs("ja", JobCategory::A, "Y", n);
    let jab = b.jobs("jab", JobCategory::AB, "Y", n);
    let order: Vec<WorkerId> = wa.iter().chain(&wb).cloned().collect();
    let plan = uniform_plan(order, &[&jab, &ja]);
    let partition = QingPartition {
        wa1: wa,
        wa2: vec![],
        wb1: vec![],
        wb2: wb,
    };
    (b.market(), plan, partition)
}

pub fn gen_prop1(n: usize) -> Result<GeneratedCase, ExperimentError> {
    check_scale(n)?;
    let (market, plan, partition) = eligibility_market(n);
    let greedy = outcome(n, (n, n, 0, n));
    let full = outcome(2 * n, (2 * n, n, n, n));
    Ok(GeneratedCase {
        name: CaseName::Prop1,
        n,
        regime: CompatibilityRegime::EligibilityOnly,
        market,
        plan,
        partition: Some(partition),
        expected: expect([
            (Song, greedy),
            (MingTwo, greedy),
            (MingOne, full),
            (QingOne, full),
            (QingTwo, full),
        ]),
        hl_optimal: BTreeMap::new(),
        maximum_size: 2 * n,
    })
}

/// Same market as [`gen_prop1`]: the dominating matching needs the
/// B-workers and A-jobs, and a B-job side would let B-workers fill B-jobs,
/// changing the greedy vector away from `(n, n, 0, n)`.
pub fn gen_prop3(n: usize) -> Result<GeneratedCase, ExperimentError> {
    let mut case = gen_prop1(n)?;
    case.name = CaseName::Prop3;
    case.hl_optimal = [(Song, false), (MingTwo, false), (MingOne, true), (QingOne, true), (QingTwo, true)]
        .into_iter()
        .collect();
    Ok(case)
}

/// A-workers: `n` from Y (ranked first), `n` from X. A-jobs: `n` from Z,
/// `n - 1` from X, one from Y. Every worker ranks Z over X over Y.
fn avoidance_market(n: usize) -> (Market, AssignmentPlan, QingPartition) {
    let mut b = Builder::new(&["X", "Y", "Z"]);
    let wy = b.workers("y", WorkerCategory::A, "Y", n);
    let wx = b.workers("x", WorkerCategory::A, "X", n);
    let jz = b.jobs("jz", JobCategory::A, "Z", n);
    let jx = b.jobs("jx", JobCategory::A, "X", n - 1);
    let jy = b.jobs("jy", JobCategory::A, "Y", 1);
    let order: Vec<WorkerId> = wy.iter().chain(&wx).cloned().collect();
    let plan = uniform_plan(order.clone(), &[&jz, &jx, &jy]);
    let partition = QingPartition {
        wa1: order,
        ..Default::default()
    };
    (b.market(), plan, partition)
}

fn avoidance_case(name: CaseName, n: usize) -> Result<GeneratedCase, ExperimentError> {
    check_scale(n)?;
    let (market, plan, partition) = avoidance_market(n);
    let s = n + 1;
    let historical = outcome(s, (s, s, s, 0));
    // With n >= 2 regions X and Y tie for the lead and X wins: X-workers take
    // the Z-jobs, the Y-job stays empty and n - 1 Y-workers fill the X-jobs.
    // With n = 1 only Y has both sides and leads.
    let t = if n == 1 { 2 } else { 2 * n - 1 };
    let mut expected = expect(ProcedureKind::HISTORICAL.into_iter().map(|k| (k, historical)));
    expected.insert(TwoTube, outcome(t, (t, t, t, 0)));
    let hl_optimal = if name == CaseName::Prop4 {
        ProcedureKind::HISTORICAL.into_iter().map(|k| (k, n == 1)).collect()
    } else {
        BTreeMap::new()
    };
    Ok(GeneratedCase {
        name,
        n,
        regime: CompatibilityRegime::EligibilityAndAvoidance,
        market,
        plan,
        partition: Some(partition),
        expected,
        hl_optimal,
        maximum_size: 2 * n,
    })
}

pub fn gen_prop2(n: usize) -> Result<GeneratedCase, ExperimentError> {
    avoidance_case(CaseName::Prop2, n)
}

/// The cardinality market again, with the high-level claims attached.
pub fn gen_prop4(n: usize) -> Result<GeneratedCase, ExperimentError> {
    avoidance_case(CaseName::Prop4, n)
}

/// A-workers: `n` from Y (ranked first), `n` from X. `n` A-jobs from Z and
/// `n` AB-jobs from X; every worker ranks the AB-jobs first.
pub fn gen_thm1(n: usize) -> Result<GeneratedCase, ExperimentError> {
    check_scale(n)?;
    let mut b = Builder::new(&["X", "Y", "Z"]);
    let wy = b.workers("y", WorkerCategory::A, "Y", n);
    let wx = b.workers("x", WorkerCategory::A, "X", n);
    let jz = b.jobs("jz", JobCategory::A, "Z", n);
    let jx = b.jobs("jx", JobCategory::AB, "X", n);
    let order: Vec<WorkerId> = wy.iter().chain(&wx).cloned().collect();
    let plan = uniform_plan(order, &[&jx, &jz]);
    let full = outcome(2 * n, (2 * n, 2 * n, n, n));
    let half = outcome(n, (n, n, n, 0));
    Ok(GeneratedCase {
        name: CaseName::Thm1,
        n,
        regime: CompatibilityRegime::EligibilityAndAvoidance,
        market: b.market(),
        plan,
        partition: Some(QingPartition {
            wa1: wy,
            wa2: wx,
            wb1: vec![],
            wb2: vec![],
        }),
        expected: expect([
            (Song, full),
            (MingTwo, full),
            (MingOne, half),
            (QingOne, half),
            (QingTwo, half),
            (TwoTube, full),
        ]),
        hl_optimal: [(Song, true), (MingTwo, true)].into_iter().collect(),
        maximum_size: 2 * n,
    })
}

/// A-workers: `n` from Y (ranked first), `n` from X. A-jobs: `n` from X and
/// `n` from Z; every worker ranks Z first.
pub fn gen_thm2(n: usize) -> Result<GeneratedCase, ExperimentError> {
    check_scale(n)?;
    let mut b = Builder::new(&["X", "Y", "Z"]);
    let wy = b.workers("y", WorkerCategory::A, "Y", n);
    let wx = b.workers("x", WorkerCategory::A, "X", n);
    let jx = b.jobs("jx", JobCategory::A, "X", n);
    let jz = b.jobs("jz", JobCategory::A, "Z", n);
    let order: Vec<WorkerId> = wy.iter().chain(&wx).cloned().collect();
    let plan = uniform_plan(order.clone(), &[&jz, &jx]);
    let half = outcome(n, (n, n, n, 0));
    let full = outcome(2 * n, (2 * n, 2 * n, 2 * n, 0));
    Ok(GeneratedCase {
        name: CaseName::Thm2,
        n,
        regime: CompatibilityRegime::EligibilityAndAvoidance,
        market: b.market(),
        plan,
        partition: Some(QingPartition {
            wa1: order,
            ..Default::default()
        }),
        expected: expect([
            (Song, half),
            (MingOne, half),
            (MingTwo, half),
            (QingOne, half),
            (QingTwo, full),
            (TwoTube, full),
        ]),
        hl_optimal: BTreeMap::new(),
        maximum_size: 2 * n,
    })
}

/// Regionally sufficient two-region market: X with `n + 1` workers and `n`
/// jobs, Y with `n` workers and one job. X leads and `|J_1| = n <= |W_-1|`,
/// so the two-tube procedure fills every job.
pub fn gen_thm3(n: usize) -> Result<GeneratedCase, ExperimentError> {
    check_scale(n)?;
    let mut b = Builder::new(&["X", "Y"]);
    let wy = b.workers("y", WorkerCategory::A, "Y", n);
    let wx = b.workers("x", WorkerCategory::A, "X", n + 1);
    let jx = b.jobs("jx", JobCategory::A, "X", n);
    let jy = b.jobs("jy", JobCategory::A, "Y", 1);
    let order: Vec<WorkerId> = wy.iter().chain(&wx).cloned().collect();
    let plan = uniform_plan(order, &[&jy, &jx]);
    let all = outcome(n + 1, (n + 1, n + 1, n + 1, 0));
    Ok(GeneratedCase {
        name: CaseName::Thm3,
        n,
        regime: CompatibilityRegime::EligibilityAndAvoidance,
        market: b.market(),
        plan,
        partition: None,
        expected: expect([(TwoTube, all)]),
        hl_optimal: [(TwoTube, true)].into_iter().collect(),
        maximum_size: n + 1,
    })
}
