//! Exhaustive nearest hit / nearest miss search.

use std::cmp::Ordering;

use crate::data::{ClassLabel, Dataset};
use crate::error::{Error, Result};

/// Nearest neighbors of one reference instance, nearest first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborSet {
    pub hits: Vec<usize>,
    /// Indexed by class; the reference's own class holds an empty list.
    pub misses_by_class: Vec<Vec<usize>>,
}

impl NeighborSet {
    pub fn misses(&self, class: ClassLabel) -> &[usize] {
        &self.misses_by_class[class]
    }
}

/// Up to `k` nearest instances of each class under `dist`, excluding the
/// reference itself. Equal distances are ordered by instance index. A class
/// with fewer than `k` other members yields all of them.
pub fn find_neighbors(
    ds: &Dataset,
    reference: usize,
    k: usize,
    dist: impl Fn(usize, usize) -> f64,
) -> Result<NeighborSet> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if ds.n_instances() < 2 {
        return Err(Error::InvalidConfig(
            "neighbor search needs at least two instances".into(),
        ));
    }
    ds.check_index(reference)?;
    Ok(nearest_by_class(ds, reference, k, dist))
}

pub(crate) fn nearest_by_class(
    ds: &Dataset,
    reference: usize,
    k: usize,
    dist: impl Fn(usize, usize) -> f64,
) -> NeighborSet {
    let mut buckets: Vec<Vec<(f64, usize)>> = vec![Vec::new(); ds.n_classes()];
    for j in (0..ds.n_instances()).filter(|&j| j != reference) {
        buckets[ds.class_of(j)].push((dist(reference, j), j));
    }
    let own = ds.class_of(reference);
    let mut hits = Vec::new();
    let mut misses_by_class = Vec::with_capacity(buckets.len());
    for (class, mut bucket) in buckets.into_iter().enumerate() {
        let keep = k.min(bucket.len());
        if keep < bucket.len() {
            bucket.select_nth_unstable_by(keep, by_distance_then_index);
            bucket.truncate(keep);
        }
        bucket.sort_unstable_by(by_distance_then_index);
        let list: Vec<usize> = bucket.into_iter().map(|(_, j)| j).collect();
        if class == own {
            hits = list;
            misses_by_class.push(Vec::new());
        } else {
            misses_by_class.push(list);
        }
    }
    NeighborSet {
        hits,
        misses_by_class,
    }
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}
