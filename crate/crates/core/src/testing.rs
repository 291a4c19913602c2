use crate::model::{Job, JobCategory, Market, Region, Worker, WorkerCategory};

pub use crate::experiments::random::random_market;

pub fn market_of(regions: &[&str], workers: Vec<Worker>, jobs: Vec<Job>) -> Market {
    Market::new(regions.iter().map(|&r| Region::from(r)).collect(), workers, jobs).unwrap()
}

pub fn a_worker(id: &str, region: &str, rank: u32) -> Worker {
    Worker {
        id: id.into(),
        category: WorkerCategory::A,
        region: region.into(),
        exam_rank: rank,
    }
}

pub fn a_job(id: &str, region: &str) -> Job {
    Job {
        id: id.into(),
        category: JobCategory::A,
        region: region.into(),
    }
}

/// w_a (A), w_b (B) from X; j_a (A), j_ab (AB) from Y.
pub fn example1_market() -> Market {
    market_of(
        &["X", "Y"],
        vec![
            a_worker("w_a", "X", 1),
            Worker {
                id: "w_b".into(),
                category: WorkerCategory::B,
                region: "X".into(),
                exam_rank: 1,
            },
        ],
        vec![
            a_job("j_a", "Y"),
            Job {
                id: "j_ab".into(),
                category: JobCategory::AB,
                region: "Y".into(),
            },
        ],
    )
}

pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}
