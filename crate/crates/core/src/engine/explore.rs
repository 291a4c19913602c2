//! Every matching an arrangement can produce, over all assignment plans.
//!
//! A plan only matters through two kinds of choices: which remaining worker
//! of the current tube is drawn next, and which compatible job of the first
//! non-exhausted tube he takes. Each worker is drawn exactly once, so any
//! combination of choices is realised by some plan (put the chosen job at
//! the top of his order), and every plan realises one combination. Walking
//! the choice tree therefore covers the plan space without enumerating
//! `|W|! * |J|!^|W|` plans.

use std::collections::BTreeSet;

use super::{index_arrangement, ArrangementViolation, IndexedSequence};
use crate::model::{CompatibilityRegime, Market, Matching};

pub fn reachable_outcomes(
    market: &Market,
    regime: CompatibilityRegime,
    arr: &crate::engine::AssignmentArrangement,
) -> Result<BTreeSet<Matching>, ArrangementViolation> {
    let seqs = index_arrangement(market, arr)?;
    let mut leaves = BTreeSet::new();
    let mut walker = Walker {
        market,
        regime,
        seqs: &seqs,
        pairs: Vec::new(),
        leaves: &mut leaves,
    };
    walker.enter_sequence(0);
    Ok(leaves
        .into_iter()
        .map(|pairs| market.matching_from_indices(pairs))
        .collect())
}

struct Walker<'a> {
    market: &'a Market,
    regime: CompatibilityRegime,
    seqs: &'a [IndexedSequence],
    pairs: Vec<(usize, usize)>,
    leaves: &'a mut BTreeSet<Vec<(usize, usize)>>,
}

impl Walker<'_> {
    fn enter_sequence(&mut self, s: usize) {
        if s == self.seqs.len() {
            let mut leaf = self.pairs.clone();
            leaf.sort_unstable();
            self.leaves.insert(leaf);
            return;
        }
        let mut available = vec![false; self.market.jobs().len()];
        for &j in self.seqs[s].job_tubes.iter().flatten() {
            available[j] = true;
        }
        let remaining = self.seqs[s].worker_tubes.first().cloned().unwrap_or_default();
        self.step(s, 0, remaining, &mut available);
    }

    fn step(&mut self, s: usize, tube: usize, remaining: Vec<usize>, available: &mut [bool]) {
        let seq = &self.seqs[s];
        if remaining.is_empty() {
            if tube + 1 < seq.worker_tubes.len() {
                let next = seq.worker_tubes[tube + 1].clone();
                self.step(s, tube + 1, next, available);
            } else {
                self.enter_sequence(s + 1);
            }
            return;
        }
        for (k, &w) in remaining.iter().enumerate() {
            let mut rest = remaining.clone();
            rest.remove(k);
            let candidates: Vec<usize> = seq
                .job_tubes
                .iter()
                .map(|jt| {
                    jt.iter()
                        .copied()
                        .filter(|&j| available[j] && self.market.compatible_at(self.regime, w, j))
                        .collect::<Vec<_>>()
                })
                .find(|c| !c.is_empty())
                .unwrap_or_default();
            if candidates.is_empty() {
                self.step(s, tube, rest, available);
                continue;
            }
            for j in candidates {
                available[j] = false;
                self.pairs.push((w, j));
                self.step(s, tube, rest.clone(), available);
                self.pairs.pop();
                available[j] = true;
            }
        }
    }
}
