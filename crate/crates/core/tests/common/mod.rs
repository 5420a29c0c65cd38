//! Test-side oracles, written without reference to the library internals.

#![allow(dead_code)]

use rand::Rng;
use relieflab::data::{Dataset, FeatureKind, FeatureMeta, Value};
use relieflab::diff::Metric;
use relieflab::rng::seeded;

/// Random mixed dataset with 2..=3 classes, both of the first two classes
/// populated, and occasional missing categoric values. Retries until the
/// class-conditional statistics exist for every categoric feature.
pub fn random_dataset(seed: u64, max_instances: usize, max_features: usize, missing: bool) -> Dataset {
    let mut rng = seeded(seed);
    loop {
        let n = rng.random_range(4..=max_instances);
        let width = rng.random_range(1..=max_features);
        let n_classes = rng.random_range(2..=3);
        let features: Vec<FeatureMeta> = (0..width)
            .map(|f| {
                if rng.random_bool(0.5) {
                    FeatureMeta::numeric(format!("f{f}"), f % 2 == 0)
                } else {
                    FeatureMeta::categoric(format!("f{f}"), rng.random_range(2..=4), f % 2 == 0)
                }
            })
            .collect();
        let rows: Vec<Vec<Value>> = (0..n)
            .map(|_| {
                features
                    .iter()
                    .map(|meta| match meta.kind {
                        // Coarse grid so distance ties actually occur.
                        FeatureKind::Numeric => Value::Num(rng.random_range(0..5) as f64 * 0.25),
                        FeatureKind::Categoric { domain_size } => {
                            if missing && rng.random_bool(0.1) {
                                Value::Missing
                            } else {
                                Value::Cat(rng.random_range(0..domain_size))
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let mut classes: Vec<usize> = (0..n).map(|_| rng.random_range(0..n_classes)).collect();
        classes[0] = 0;
        classes[1] = 1;
        if let Ok(ds) = Dataset::new(features, rows, classes, n_classes) {
            if Metric::new(&ds).is_ok() {
                return ds;
            }
        }
    }
}

/// Straightforward diff: range-normalized numeric, overlap categoric, and
/// class-conditional probabilities for missing categoric values.
pub fn oracle_diff(ds: &Dataset, f: usize, i: usize, j: usize) -> f64 {
    let n = ds.n_instances();
    match ds.feature(f).kind {
        FeatureKind::Numeric => {
            let xs: Vec<f64> = (0..n)
                .filter_map(|r| match ds.value(r, f) {
                    Value::Num(x) => Some(x),
                    _ => None,
                })
                .collect();
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (Value::Num(a), Value::Num(b)) = (ds.value(i, f), ds.value(j, f)) else {
                panic!("numeric oracle needs present values");
            };
            if hi == lo {
                0.0
            } else {
                ((a - b).abs() / (hi - lo)).min(1.0)
            }
        }
        FeatureKind::Categoric { domain_size } => {
            let p = |v: u32, c: usize| {
                let of_class: Vec<Value> = (0..n)
                    .filter(|&r| ds.class_of(r) == c)
                    .map(|r| ds.value(r, f))
                    .filter(|v| !v.is_missing())
                    .collect();
                of_class.iter().filter(|&&x| x == Value::Cat(v)).count() as f64
                    / of_class.len() as f64
            };
            match (ds.value(i, f), ds.value(j, f)) {
                (Value::Cat(a), Value::Cat(b)) => (a != b) as u8 as f64,
                (Value::Missing, Value::Cat(b)) => 1.0 - p(b, ds.class_of(i)),
                (Value::Cat(a), Value::Missing) => 1.0 - p(a, ds.class_of(j)),
                _ => {
                    let (ci, cj) = (ds.class_of(i), ds.class_of(j));
                    1.0 - (0..domain_size).map(|v| p(v, ci) * p(v, cj)).sum::<f64>()
                }
            }
        }
    }
}

pub fn oracle_distance(ds: &Dataset, i: usize, j: usize) -> f64 {
    (0..ds.n_features()).map(|f| oracle_diff(ds, f, i, j)).sum()
}

/// The `k` nearest instances of `class` to `r` (excluding `r`), ties broken
/// by index, found by sorting every candidate.
pub fn oracle_nearest(ds: &Dataset, r: usize, class: usize, k: usize, dist: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut cands: Vec<(f64, usize)> = (0..ds.n_instances())
        .filter(|&j| j != r && ds.class_of(j) == class)
        .map(|j| (dist(r, j), j))
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cands.into_iter().take(k).map(|(_, j)| j).collect()
}

/// ReliefF over a given sample order:
/// `W[A] -= sum_hits diff / (m k)` and
/// `W[A] += sum_{C != class(R)} P(C) / (1 - P(class(R))) * sum_misses diff / (m k)`.
pub fn oracle_relieff(ds: &Dataset, order: &[usize], k: usize) -> Vec<f64> {
    let n = ds.n_instances() as f64;
    let prior = |c: usize| ds.classes().iter().filter(|&&x| x == c).count() as f64 / n;
    let mk = (order.len() * k) as f64;
    let mut w = vec![0.0; ds.n_features()];
    for &r in order {
        let own = ds.class_of(r);
        let dist = |a: usize, b: usize| oracle_distance(ds, a, b);
        let hits = oracle_nearest(ds, r, own, k, dist);
        for (a, wa) in w.iter_mut().enumerate() {
            let mut delta = 0.0;
            for &h in &hits {
                delta -= oracle_diff(ds, a, r, h) / mk;
            }
            for c in (0..ds.n_classes()).filter(|&c| c != own) {
                let scale = prior(c) / (1.0 - prior(own));
                for m in oracle_nearest(ds, r, c, k, dist) {
                    delta += scale * oracle_diff(ds, a, r, m) / mk;
                }
            }
            *wa += delta;
        }
    }
    w
}

/// Maximum relevant weight minus maximum irrelevant weight.
pub fn oracle_separability(w: &[f64], relevant: &[bool]) -> f64 {
    let max_of = |want: bool| {
        w.iter()
            .zip(relevant)
            .filter(|(_, &r)| r == want)
            .map(|(&x, _)| x)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    max_of(true) - max_of(false)
}
