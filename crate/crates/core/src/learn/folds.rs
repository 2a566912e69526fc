//! Stratified fold assignment.
//!
//! Members of each class are shuffled with a seeded generator and dealt
//! round-robin into folds. The dealing position carries over from one class
//! to the next so fold sizes also stay within one of each other.

use rand::seq::SliceRandom;

use super::LearnError;
use crate::seed::{rng_for, STREAM_FOLDS};

fn deal(labels: &[usize], k: usize, seed: u64) -> Vec<usize> {
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        members[c].push(i);
    }
    let mut rng = rng_for(seed, &[STREAM_FOLDS, k as u64]);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in members.iter_mut() {
        class.shuffle(&mut rng);
        for &i in class.iter() {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    assignment
}

/// Fold index for every row. Every class must have at least `k` members, so
/// that each class appears in every test fold.
pub fn stratified_folds(
    labels: &[usize],
    class_names: &[String],
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, LearnError> {
    if k < 2 {
        return Err(LearnError::BadK(k));
    }
    let mut counts = vec![0usize; class_names.len().max(labels.iter().max().map_or(0, |m| m + 1))];
    for &c in labels {
        counts[c] += 1;
    }
    if let Some((c, &count)) = counts.iter().enumerate().find(|(_, &n)| n > 0 && n < k) {
        return Err(LearnError::ClassTooSmall {
            class: class_names.get(c).cloned().unwrap_or_else(|| c.to_string()),
            count,
            k,
        });
    }
    Ok(deal(labels, k, seed))
}

/// Same dealing as [`stratified_folds`] but accepts classes smaller than
/// `k`; used for the internal folds inside a bag.
pub fn lenient_folds(labels: &[usize], k: usize, seed: u64) -> Vec<usize> {
    deal(labels, k.max(1), seed)
}

/// Row indices `(train, test)` of fold `f`.
pub fn split_indices(assignment: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, &a) in assignment.iter().enumerate() {
        if a == f {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    (train, test)
}
