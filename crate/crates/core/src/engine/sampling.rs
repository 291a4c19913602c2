//! Seeded uniform permutations.
//!
//! Every random draw in the crate goes through [`derive_seed`] and
//! [`shuffled`], so a master seed fixes all outcomes on every platform.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::model::{JobId, WorkerId};

/// Derives an independent sub-seed from a master seed and a label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorts `items` and applies a Fisher-Yates shuffle driven by `seed`.
///
/// Sorting first makes the output independent of the caller's input order.
pub fn shuffled<T: Ord + Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut out = items.to_vec();
    out.sort();
    let mut rng = rng_from_seed(seed);
    for i in (1..out.len()).rev() {
        let j = rng.random_range(0..=i);
        out.swap(i, j);
    }
    out
}

/// A uniformly random strict order over `workers`.
pub fn sample_uniform_worker_order(workers: &[WorkerId], seed: u64) -> Vec<WorkerId> {
    shuffled(workers, seed)
}

/// One independent uniformly random order over `jobs` per worker.
///
/// Each worker's stream is keyed by `(seed, worker id)`, so the order drawn
/// for a worker does not depend on which other workers are present.
pub fn sample_uniform_job_orders(
    workers: &[WorkerId],
    jobs: &[JobId],
    seed: u64,
) -> BTreeMap<WorkerId, Vec<JobId>> {
    workers
        .iter()
        .map(|w| {
            let sub = derive_seed(seed, &format!("jobs/{}", w.as_str()));
            (w.clone(), shuffled(jobs, sub))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn ids(names: &[&str]) -> Vec<WorkerId> {
        names.iter().map(|&n| n.into()).collect()
    }

    #[test]
    fn singleton_order() {
        assert_eq!(sample_uniform_worker_order(&ids(&["w1"]), 7), ids(&["w1"]));
    }

    #[test]
    fn fixed_seed_is_deterministic_and_input_order_free() {
        let a = sample_uniform_worker_order(&ids(&["w1", "w2", "w3"]), 11);
        let b = sample_uniform_worker_order(&ids(&["w3", "w1", "w2"]), 11);
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, ids(&["w1", "w2", "w3"]));
    }

    #[test]
    fn job_orders_are_keyed_per_worker() {
        let jobs: Vec<JobId> = ["j1", "j2", "j3", "j4"].iter().map(|&j| j.into()).collect();
        let both = sample_uniform_job_orders(&ids(&["w1", "w2"]), &jobs, 5);
        let alone = sample_uniform_job_orders(&ids(&["w2"]), &jobs, 5);
        assert_eq!(both["w2"], alone["w2"]);
        assert_eq!(both, sample_uniform_job_orders(&ids(&["w2", "w1"]), &jobs, 5));
        let trivial = sample_uniform_job_orders(&ids(&["w"]), &jobs[..1], 0);
        assert_eq!(trivial["w"], vec![JobId::from("j1")]);
    }

    #[test]
    fn derived_seeds_separate_labels() {
        assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
        assert_ne!(derive_seed(1, "a"), derive_seed(2, "a"));
        assert_eq!(derive_seed(3, "x"), derive_seed(3, "x"));
    }

    #[test]
    fn three_worker_orders_are_uniform() {
        let workers = ids(&["w1", "w2", "w3"]);
        let samples = 60_000;
        let mut counts: HashMap<Vec<WorkerId>, usize> = HashMap::new();
        for s in 0..samples {
            *counts.entry(sample_uniform_worker_order(&workers, s)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let mut chi2 = 0.0;
        let expected = samples as f64 / 6.0;
        for &c in counts.values() {
            let freq = c as f64 / samples as f64;
            assert!((freq - 1.0 / 6.0).abs() <= 0.01, "frequency {freq}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 5 degrees of freedom, 0.999 quantile.
        assert!(chi2 < 20.52, "chi-square {chi2}");
    }

    #[test]
    fn two_by_two_job_orders_are_independent() {
        let workers = ids(&["w1", "w2"]);
        let jobs: Vec<JobId> = vec!["j1".into(), "j2".into()];
        let samples = 40_000;
        let mut joint = [0usize; 4];
        for s in 0..samples {
            let orders = sample_uniform_job_orders(&workers, &jobs, s);
            let a = (orders["w1"][0].as_str() == "j1") as usize;
            let b = (orders["w2"][0].as_str() == "j1") as usize;
            joint[a * 2 + b] += 1;
        }
        for c in joint {
            let freq = c as f64 / samples as f64;
            assert!((freq - 0.25).abs() <= 0.01, "joint frequency {freq}");
        }
    }
}
