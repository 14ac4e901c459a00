//! Deterministic k-fold assignments.
//!
//! Ids are sorted lexicographically and shuffled with a 64-bit
//! permuted-congruential generator seeded directly with the run seed, so
//! the same (seed, ids) pair yields the same folds on every platform.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::error::{Error, Result};

/// Whether a series belongs to the training or validation side of a fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Train,
    Validation,
}

/// One fold of one cross-validation run.
#[derive(Debug, Clone)]
pub struct FoldAssignment {
    pub run_seed: u64,
    pub fold_index: usize,
    membership: BTreeMap<String, Membership>,
}

impl FoldAssignment {
    pub fn membership(&self, id: &str) -> Option<Membership> {
        self.membership.get(id).copied()
    }

    pub fn validation_ids(&self) -> Vec<String> {
        self.ids_with(Membership::Validation)
    }

    pub fn train_ids(&self) -> Vec<String> {
        self.ids_with(Membership::Train)
    }

    fn ids_with(&self, side: Membership) -> Vec<String> {
        self.membership
            .iter()
            .filter(|(_, m)| **m == side)
            .map(|(id, _)| id.clone())
            .collect()
    }
}

/// Partition `ids` into `k` folds for one run seed.
///
/// Fold sizes differ by at most one; the ten folds partition the id set
/// exactly. The assignment is a pure function of (seed, sorted ids).
pub fn make_folds(ids: &[String], seed: u64, k: usize) -> Result<Vec<FoldAssignment>> {
    if k == 0 {
        return Err(Error::Config("fold count must be positive".into()));
    }
    if ids.len() < k {
        return Err(Error::Config(format!(
            "{} series cannot be split into {k} folds",
            ids.len()
        )));
    }
    let mut sorted: Vec<&String> = ids.iter().collect();
    sorted.sort();
    sorted.dedup();

    let mut rng = Pcg64::seed_from_u64(seed);
    sorted.shuffle(&mut rng);

    // round-robin keeps fold sizes within one of each other
    let fold_of: Vec<usize> = (0..sorted.len()).map(|i| i % k).collect();

    let folds = (0..k)
        .map(|fold_index| {
            let membership = sorted
                .iter()
                .zip(&fold_of)
                .map(|(id, f)| {
                    let side = if *f == fold_index {
                        Membership::Validation
                    } else {
                        Membership::Train
                    };
                    ((*id).clone(), side)
                })
                .collect();
            FoldAssignment {
                run_seed: seed,
                fold_index,
                membership,
            }
        })
        .collect();
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("S{i:06}")).collect()
    }

    #[test]
    fn hundred_ids_make_ten_even_folds() {
        let folds = make_folds(&ids(100), 1, 10).unwrap();
        assert_eq!(folds.len(), 10);
        for fold in &folds {
            assert_eq!(fold.validation_ids().len(), 10);
            assert_eq!(fold.train_ids().len(), 90);
        }
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        let a = make_folds(&ids(137), 3, 10).unwrap();
        let b = make_folds(&ids(137), 3, 10).unwrap();
        for (fa, fb) in a.iter().zip(&b) {
            assert_eq!(fa.validation_ids(), fb.validation_ids());
        }
    }

    #[test]
    fn folds_partition_ids_exactly() {
        let all = ids(103);
        let folds = make_folds(&all, 7, 10).unwrap();
        let mut seen = BTreeSet::new();
        let mut sizes = Vec::new();
        for fold in &folds {
            let val = fold.validation_ids();
            sizes.push(val.len());
            for id in val {
                assert!(seen.insert(id), "validation sets must be disjoint");
            }
        }
        assert_eq!(seen.len(), all.len());
        let min = sizes.iter().min().unwrap();
        let max = sizes.iter().max().unwrap();
        assert!(max - min <= 1);
    }

    #[test]
    fn too_few_ids_is_config_error() {
        let err = make_folds(&ids(9), 1, 10).unwrap_err();
        assert_eq!(err.category(), "config-error");
    }

    #[test]
    fn five_runs_cover_each_id_five_times() {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};

        // brute-force coverage count over all 50 validation sets
        let all = ids(100_000);
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut distinct = BTreeSet::new();
        for seed in 1..=5u64 {
            let folds = make_folds(&all, seed, 10).unwrap();
            for fold in &folds {
                let val = fold.validation_ids();
                let mut hasher = DefaultHasher::new();
                val.hash(&mut hasher);
                distinct.insert(hasher.finish());
                for id in val {
                    *counts.entry(id).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(distinct.len(), 50);
        assert!(counts.values().all(|c| *c == 5));
        assert_eq!(counts.len(), 100_000);
    }
}
