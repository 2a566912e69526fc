//! Subsampled training bags with a minimum-coverage guarantee.
//!
//! Each bag is a seeded sample without replacement of `round(fraction * n)`
//! training rows. A repair pass then raises every row to at least
//! `min_inclusion` bags: an under-covered row replaces, in some bag that lacks
//! it, the member with the highest coverage. Bag sizes never change.

use rand::seq::index::sample;

use super::LearnError;
use crate::seed::{rng_for, STREAM_BAGS};

pub fn bag_size(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

pub fn subsample_bags(
    train_indices: &[usize],
    r: usize,
    fraction: f64,
    min_inclusion: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, LearnError> {
    let n = train_indices.len();
    let size = bag_size(n, fraction);
    if r == 0 || size == 0 || size > n {
        return Err(LearnError::BadConfig(format!(
            "cannot draw {r} bags of {size} rows from {n}"
        )));
    }
    if min_inclusion > r || n * min_inclusion > r * size {
        return Err(LearnError::InfeasibleCoverage {
            min_inclusion,
            r,
            bag_size: size,
            n,
        });
    }

    // positions into train_indices
    let mut bags: Vec<Vec<usize>> = (0..r)
        .map(|b| {
            let mut rng = rng_for(seed, &[STREAM_BAGS, b as u64]);
            sample(&mut rng, n, size).into_vec()
        })
        .collect();
    let mut member: Vec<Vec<bool>> = bags
        .iter()
        .map(|bag| {
            let mut m = vec![false; n];
            bag.iter().for_each(|&i| m[i] = true);
            m
        })
        .collect();
    let mut coverage = vec![0usize; n];
    bags.iter().flatten().for_each(|&i| coverage[i] += 1);

    loop {
        let Some(u) = (0..n)
            .filter(|&i| coverage[i] < min_inclusion)
            .min_by_key(|&i| (coverage[i], i))
        else {
            break;
        };
        // best swap: over bags lacking u, the member with the most coverage
        let mut best: Option<(usize, usize, usize)> = None; // (coverage, bag, slot)
        for (b, bag) in bags.iter().enumerate() {
            if member[b][u] {
                continue;
            }
            for (slot, &v) in bag.iter().enumerate() {
                if coverage[v] > min_inclusion && best.is_none_or(|(c, _, _)| coverage[v] > c) {
                    best = Some((coverage[v], b, slot));
                }
            }
        }
        let (_, b, slot) = best.expect("counting bound guarantees a donor");
        let v = bags[b][slot];
        bags[b][slot] = u;
        member[b][v] = false;
        member[b][u] = true;
        coverage[v] -= 1;
        coverage[u] += 1;
    }

    Ok(bags
        .into_iter()
        .map(|mut bag| {
            bag.sort_unstable();
            bag.into_iter().map(|p| train_indices[p]).collect()
        })
        .collect())
}
