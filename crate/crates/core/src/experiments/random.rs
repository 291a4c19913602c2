//! Seeded random markets, partitions and matchings for property suites.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::rng_from_seed;
use crate::model::{
    CompatibilityRegime, Job, JobCategory, Market, Matching, Region, Worker, WorkerCategory,
};
use crate::procedures::QingPartition;

fn regions(n: usize) -> Vec<Region> {
    (0..n).map(|i| Region::new(format!("R{i}"))).collect()
}

fn workers_with(rng: &mut impl Rng, cats: &[WorkerCategory], regions: &[Region]) -> Vec<Worker> {
    let mut next_rank = [0u32; 2];
    let mut ranks_a: Vec<u32> = (1..=cats.iter().filter(|c| **c == WorkerCategory::A).count() as u32).collect();
    let mut ranks_b: Vec<u32> = (1..=cats.iter().filter(|c| **c == WorkerCategory::B).count() as u32).collect();
    ranks_a.shuffle(rng);
    ranks_b.shuffle(rng);
    cats.iter()
        .enumerate()
        .map(|(i, &category)| {
            let slot = category as usize;
            let rank = if category == WorkerCategory::A {
                ranks_a[next_rank[slot] as usize]
            } else {
                ranks_b[next_rank[slot] as usize]
            };
            next_rank[slot] += 1;
            Worker {
                id: format!("w{i}").into(),
                category,
                region: regions[rng.random_range(0..regions.len())].clone(),
                exam_rank: rank,
            }
        })
        .collect()
}

fn jobs_with(rng: &mut impl Rng, cats: &[JobCategory], regions: &[Region]) -> Vec<Job> {
    cats.iter()
        .enumerate()
        .map(|(i, &category)| Job {
            id: format!("j{i}").into(),
            category,
            region: regions[rng.random_range(0..regions.len())].clone(),
        })
        .collect()
}

fn worker_category(rng: &mut impl Rng) -> WorkerCategory {
    if rng.random_bool(0.5) {
        WorkerCategory::A
    } else {
        WorkerCategory::B
    }
}

fn job_category(rng: &mut impl Rng) -> JobCategory {
    [JobCategory::A, JobCategory::AB, JobCategory::B][rng.random_range(0..3)]
}

/// Up to `max_workers` workers and `max_jobs` jobs with random categories
/// over `1..=max_regions` regions.
pub fn random_market(seed: u64, max_workers: usize, max_jobs: usize, max_regions: usize) -> Market {
    let mut rng = rng_from_seed(seed);
    let regions = regions(rng.random_range(1..=max_regions.max(1)));
    let wc: Vec<_> = (0..rng.random_range(0..=max_workers)).map(|_| worker_category(&mut rng)).collect();
    let jc: Vec<_> = (0..rng.random_range(0..=max_jobs)).map(|_| job_category(&mut rng)).collect();
    let workers = workers_with(&mut rng, &wc, &regions);
    let jobs = jobs_with(&mut rng, &jc, &regions);
    Market::new(regions, workers, jobs).expect("generated market is valid")
}

/// A-workers and A-jobs only.
pub fn random_single_category_market(
    seed: u64,
    max_workers: usize,
    max_jobs: usize,
    max_regions: usize,
) -> Market {
    let mut rng = rng_from_seed(seed);
    let regions = regions(rng.random_range(1..=max_regions.max(1)));
    let wc = vec![WorkerCategory::A; rng.random_range(0..=max_workers)];
    let jc = vec![JobCategory::A; rng.random_range(0..=max_jobs)];
    let workers = workers_with(&mut rng, &wc, &regions);
    let jobs = jobs_with(&mut rng, &jc, &regions);
    Market::new(regions, workers, jobs).expect("generated market is valid")
}

/// A market with random categories and regions together with a random
/// partition satisfying the Qing size constraints.
///
/// Workers are drawn first; a random subset of the A-workers (B-workers)
/// fixes the number of A-jobs (B-jobs), the rest determine the AB-jobs.
pub fn random_qing_instance(seed: u64, max_workers: usize, max_regions: usize) -> (Market, QingPartition) {
    let mut rng = rng_from_seed(seed);
    let regions = regions(rng.random_range(1..=max_regions.max(1)));
    let wc: Vec<_> = (0..rng.random_range(0..=max_workers)).map(|_| worker_category(&mut rng)).collect();
    let workers = workers_with(&mut rng, &wc, &regions);
    let mut partition = QingPartition::default();
    for w in &workers {
        let first = rng.random_bool(0.5);
        let set = match (w.category, first) {
            (WorkerCategory::A, true) => &mut partition.wa1,
            (WorkerCategory::A, false) => &mut partition.wa2,
            (WorkerCategory::B, true) => &mut partition.wb1,
            (WorkerCategory::B, false) => &mut partition.wb2,
        };
        set.push(w.id.clone());
    }
    let mut jc = vec![JobCategory::A; partition.wa1.len()];
    jc.extend(vec![JobCategory::B; partition.wb1.len()]);
    jc.extend(vec![JobCategory::AB; partition.wa2.len() + partition.wb2.len()]);
    jc.shuffle(&mut rng);
    let jobs = jobs_with(&mut rng, &jc, &regions);
    let market = Market::new(regions, workers, jobs).expect("generated market is valid");
    (market, partition)
}

/// A random feasible matching: compatible pairs in random order, each
/// kept with probability one half when both ends are still free.
pub fn random_feasible_matching(market: &Market, regime: CompatibilityRegime, seed: u64) -> Matching {
    let mut rng = rng_from_seed(seed);
    let mut pairs: Vec<(usize, usize)> = (0..market.workers().len())
        .flat_map(|w| (0..market.jobs().len()).map(move |j| (w, j)))
        .filter(|&(w, j)| market.compatible_at(regime, w, j))
        .collect();
    pairs.shuffle(&mut rng);
    let mut w_used = vec![false; market.workers().len()];
    let mut j_used = vec![false; market.jobs().len()];
    let mut chosen = Vec::new();
    for (w, j) in pairs {
        if !w_used[w] && !j_used[j] && rng.random_bool(0.5) {
            w_used[w] = true;
            j_used[j] = true;
            chosen.push((w, j));
        }
    }
    market.matching_from_indices(chosen)
}

/// Per-region `(workers, jobs)` counts of a single-category market.
pub type RegionProfile = Vec<(usize, usize)>;

/// All regionally-sufficient region profiles with at most `max_workers`
/// workers and `max_jobs` jobs over at most `max_regions` non-empty regions,
/// up to relabelling of regions.
pub fn sufficient_profiles(max_workers: usize, max_jobs: usize, max_regions: usize) -> Vec<RegionProfile> {
    let cells: Vec<(usize, usize)> = (0..=max_workers)
        .flat_map(|w| (0..=max_jobs).map(move |j| (w, j)))
        .filter(|&(w, j)| (w, j) != (0, 0) && (w == 0 || j == 0 || w >= j))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend_profiles(&cells, 0, max_workers, max_jobs, max_regions, &mut current, &mut out);
    out
}

fn extend_profiles(
    cells: &[(usize, usize)],
    start: usize,
    workers_left: usize,
    jobs_left: usize,
    regions_left: usize,
    current: &mut RegionProfile,
    out: &mut Vec<RegionProfile>,
) {
    if !current.is_empty() {
        out.push(current.clone());
    }
    if regions_left == 0 {
        return;
    }
    for (i, &(w, j)) in cells.iter().enumerate().skip(start) {
        if w <= workers_left && j <= jobs_left {
            current.push((w, j));
            extend_profiles(cells, i, workers_left - w, jobs_left - j, regions_left - 1, current, out);
            current.pop();
        }
    }
}

/// Every distinct ordering of every sufficient profile. Region order fixes
/// names and so the lexicographic tie-break between equally large regions.
pub fn sufficient_labelled_profiles(
    max_workers: usize,
    max_jobs: usize,
    max_regions: usize,
) -> Vec<RegionProfile> {
    let mut out = Vec::new();
    for p in sufficient_profiles(max_workers, max_jobs, max_regions) {
        let mut orders = BTreeSet::new();
        permute(&p, &mut Vec::new(), &mut vec![false; p.len()], &mut orders);
        out.extend(orders);
    }
    out
}

fn permute(
    items: &[(usize, usize)],
    current: &mut RegionProfile,
    used: &mut Vec<bool>,
    out: &mut BTreeSet<RegionProfile>,
) {
    if current.len() == items.len() {
        out.insert(current.clone());
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            current.push(items[i]);
            permute(items, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}

/// The single-category (A) market of a region profile; region `k` is named
/// by letter, workers are ranked in region order.
pub fn profile_market(profile: &[(usize, usize)]) -> Market {
    let regions: Vec<Region> = (0..profile.len())
        .map(|k| Region::new(((b'P' + k as u8) as char).to_string()))
        .collect();
    let mut workers = Vec::new();
    let mut jobs = Vec::new();
    for (k, &(nw, nj)) in profile.iter().enumerate() {
        for _ in 0..nw {
            let i = workers.len();
            workers.push(Worker {
                id: format!("w{i}").into(),
                category: WorkerCategory::A,
                region: regions[k].clone(),
                exam_rank: i as u32 + 1,
            });
        }
        for _ in 0..nj {
            let i = jobs.len();
            jobs.push(Job {
                id: format!("j{i}").into(),
                category: JobCategory::A,
                region: regions[k].clone(),
            });
        }
    }
    Market::new(regions, workers, jobs).expect("profile market is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::is_regionally_sufficient;

    #[test]
    fn random_markets_respect_limits_and_seed() {
        for seed in 0..300 {
            let m = random_market(seed, 8, 8, 4);
            assert!(m.workers().len() <= 8 && m.jobs().len() <= 8 && m.regions().len() <= 4);
            assert_eq!(m, random_market(seed, 8, 8, 4));
        }
    }

    #[test]
    fn qing_instances_carry_valid_partitions() {
        for seed in 0..300 {
            let (m, p) = random_qing_instance(seed, 8, 4);
            p.validate(&m).unwrap();
        }
    }

    #[test]
    fn random_matchings_are_feasible() {
        for seed in 0..200 {
            let m = random_market(seed, 6, 6, 3);
            for regime in [CompatibilityRegime::EligibilityOnly, CompatibilityRegime::EligibilityAndAvoidance] {
                let mu = random_feasible_matching(&m, regime, seed);
                assert!(m.is_feasible(regime, &mu).unwrap());
            }
        }
    }

    #[test]
    fn profiles_are_sufficient_distinct_and_bounded() {
        let profiles = sufficient_profiles(5, 5, 3);
        let mut canon: Vec<_> = profiles
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.sort();
                p
            })
            .collect();
        canon.sort();
        canon.dedup();
        assert_eq!(canon.len(), profiles.len());
        for p in &profiles {
            let m = profile_market(p);
            assert!(is_regionally_sufficient(&m));
            assert!(m.workers().len() <= 5 && m.jobs().len() <= 5 && p.len() <= 3);
        }
        // One region: (w, j) with w >= j or one side empty.
        assert_eq!(sufficient_profiles(1, 1, 1).len(), 3);
    }
}
