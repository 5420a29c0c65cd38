//! The Relief family: Relief, Relieved, ReliefF and the two feedback
//! variants dReliefF and pdReliefF.
//!
//! All variants share the ReliefF update. For every sampled instance `R`
//! with `k` nearest hits `H_j` and, per foreign class `C`, `k` nearest
//! misses `M_j(C)`:
//!
//! ```text
//! W[A] -= sum_j diff(A, R, H_j) / (m k)
//! W[A] += sum_{C != class(R)} P(C) / (1 - P(class(R))) sum_j diff(A, R, M_j(C)) / (m k)
//! ```
//!
//! They differ in how instances are visited and in the distance used to
//! find the neighbors:
//!
//! | variant   | visiting order              | distance at iteration `t` (0-based) |
//! |-----------|-----------------------------|-------------------------------------|
//! | Relief    | seeded sample, 2 classes    | plain, `k = 1`                      |
//! | Relieved  | every instance in order     | plain                               |
//! | ReliefF   | seeded sample               | plain                               |
//! | dReliefF  | seeded sample               | plain at `t = 0`, then `max(W_t, 0)` |
//! | pdReliefF | seeded sample               | `max(f(W_t, t), 0)`                 |
//!
//! `W_t` is the raw running sum after `t` completed iterations.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::diff::{f_progress, ponderate, Metric, ProgressiveSchedule};
use crate::error::{Error, Result};
use crate::neighbors::{nearest_by_class, NeighborSet};
use crate::rng::seeded;

pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Relief,
    Relieved,
    ReliefF,
    DReliefF,
    PdReliefF,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Relief,
        Variant::Relieved,
        Variant::ReliefF,
        Variant::DReliefF,
        Variant::PdReliefF,
    ];

    /// The three algorithms compared by the experiment design.
    pub const COMPARED: [Variant; 3] = [Variant::ReliefF, Variant::DReliefF, Variant::PdReliefF];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Relief => "relief",
            Variant::Relieved => "relieved",
            Variant::ReliefF => "relieff",
            Variant::DReliefF => "drelieff",
            Variant::PdReliefF => "pdrelieff",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm '{s}'")))
    }
}

/// Ponderation used by pdReliefF.
///
/// `Closed` is the schedule `f(w, t)` with `m` taken from the run. The two
/// forced forms recover the other algorithms: `Unit` (`f ≡ 1`) is ReliefF and
/// `Raw` (`f(w, t) = w` for `t > 0`, `f(w, 0) = 1`) is dReliefF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Progression {
    Closed { s: f64, a: f64 },
    Unit,
    Raw,
}

impl Default for Progression {
    fn default() -> Self {
        Progression::Closed {
            s: ProgressiveSchedule::DEFAULT_S,
            a: ProgressiveSchedule::DEFAULT_A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliefConfig {
    pub variant: Variant,
    /// Number of sampled instances; `None` uses every instance.
    pub m: Option<usize>,
    pub k: usize,
    pub seed: u64,
    pub progression: Progression,
}

impl ReliefConfig {
    pub fn new(variant: Variant) -> Self {
        ReliefConfig {
            variant,
            m: None,
            k: DEFAULT_K,
            seed: 0,
            progression: Progression::default(),
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_progression(mut self, progression: Progression) -> Self {
        self.progression = progression;
        self
    }

    fn sample_size(&self, n: usize) -> Result<usize> {
        let m = self.m.unwrap_or(n);
        if m == 0 || m > n {
            return Err(Error::InvalidConfig(format!(
                "m must lie in 1..={n}, got {m}"
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        Ok(m)
    }
}

/// Per-feature relevance estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// First `m` entries of a seeded Fisher-Yates permutation of `0..n`.
pub fn sample_order(n: usize, m: usize, seed: u64) -> Result<Vec<usize>> {
    if m > n {
        return Err(Error::InvalidConfig(format!(
            "cannot sample {m} of {n} instances"
        )));
    }
    let mut rng = seeded(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm.truncate(m);
    Ok(perm)
}

/// Runs the variant selected in `config`.
pub fn weigh(ds: &Dataset, config: &ReliefConfig) -> Result<WeightVector> {
    match config.variant {
        Variant::Relief => relief(ds, config),
        Variant::Relieved => relieved(ds, config),
        Variant::ReliefF => relieff(ds, config),
        Variant::DReliefF => drelieff(ds, config),
        Variant::PdReliefF => pdrelieff(ds, config),
    }
}

/// Original two-class Relief: one nearest hit and one nearest miss.
pub fn relief(ds: &Dataset, config: &ReliefConfig) -> Result<WeightVector> {
    ds.require_two_present_classes()?;
    if ds.present_classes() != 2 {
        return Err(Error::NotTwoClass {
            found: ds.present_classes(),
        });
    }
    let metric = Metric::new(ds)?;
    let m = config.sample_size(ds.n_instances())?;
    let order = sample_order(ds.n_instances(), m, config.seed)?;
    let mf = m as f64;
    let mut w = vec![0.0; ds.n_features()];
    for &r in &order {
        let nb = nearest_by_class(ds, r, 1, |a, b| metric.distance_plain(a, b));
        let hit = nb.hits.first().copied();
        let miss = nb
            .misses_by_class
            .iter()
            .find_map(|list| list.first().copied())
            .expect("two populated classes guarantee a miss");
        for (a, wa) in w.iter_mut().enumerate() {
            if let Some(h) = hit {
                *wa -= metric.diff(a, r, h) / mf;
            }
            *wa += metric.diff(a, r, miss) / mf;
        }
    }
    Ok(finish(w))
}

/// Deterministic ReliefF over every instance in index order.
pub fn relieved(ds: &Dataset, config: &ReliefConfig) -> Result<WeightVector> {
    ds.require_two_present_classes()?;
    if config.k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let metric = Metric::new(ds)?;
    let order: Vec<usize> = (0..ds.n_instances()).collect();
    Ok(run_relieff(&metric, &order, config.k, Feedback::None))
}

pub fn relieff(ds: &Dataset, config: &ReliefConfig) -> Result<WeightVector> {
    let (metric, order) = prepare(ds, config)?;
    Ok(run_relieff(&metric, &order, config.k, Feedback::None))
}

pub fn drelieff(ds: &Dataset, config: &ReliefConfig) -> Result<WeightVector> {
    let (metric, order) = prepare(ds, config)?;
    Ok(run_relieff(&metric, &order, config.k, Feedback::Raw))
}

pub fn pdrelieff(ds: &Dataset, config: &ReliefConfig) -> Result<WeightVector> {
    let (metric, order) = prepare(ds, config)?;
    let ponder = match config.progression {
        Progression::Closed { s, a } => {
            Ponder::Closed(ProgressiveSchedule::new(s, a, order.len() as u64)?)
        }
        Progression::Unit => Ponder::Unit,
        Progression::Raw => Ponder::Raw,
    };
    Ok(run_relieff(
        &metric,
        &order,
        config.k,
        Feedback::Progressive(ponder),
    ))
}

fn prepare<'a>(ds: &'a Dataset, config: &ReliefConfig) -> Result<(Metric<'a>, Vec<usize>)> {
    ds.require_two_present_classes()?;
    let m = config.sample_size(ds.n_instances())?;
    let metric = Metric::new(ds)?;
    let order = sample_order(ds.n_instances(), m, config.seed)?;
    Ok((metric, order))
}

#[derive(Debug, Clone, Copy)]
enum Ponder {
    Closed(ProgressiveSchedule),
    Unit,
    Raw,
}

#[derive(Debug, Clone, Copy)]
enum Feedback {
    None,
    Raw,
    Progressive(Ponder),
}

fn run_relieff(metric: &Metric<'_>, order: &[usize], k: usize, feedback: Feedback) -> WeightVector {
    let ds = metric.dataset();
    let n_features = ds.n_features();
    let mk = (order.len() * k) as f64;
    let mut w = vec![0.0; n_features];
    let mut pond = vec![1.0; n_features];

    for (t, &r) in order.iter().enumerate() {
        let nb = match feedback {
            Feedback::None => nearest_by_class(ds, r, k, |a, b| metric.distance_plain(a, b)),
            Feedback::Raw if t == 0 => {
                nearest_by_class(ds, r, k, |a, b| metric.distance_plain(a, b))
            }
            Feedback::Raw => nearest_by_class(ds, r, k, |a, b| metric.distance_weighted(a, b, &w)),
            Feedback::Progressive(p) => {
                for (pf, &wf) in pond.iter_mut().zip(&w) {
                    *pf = ponderate(match p {
                        Ponder::Closed(sched) => f_progress(wf, t as f64, &sched),
                        Ponder::Unit => 1.0,
                        Ponder::Raw if t == 0 => 1.0,
                        Ponder::Raw => wf,
                    });
                }
                nearest_by_class(ds, r, k, |a, b| metric.distance_ponderated(a, b, &pond))
            }
        };
        update(metric, r, &nb, mk, &mut w);
    }
    finish(w)
}

fn update(metric: &Metric<'_>, r: usize, nb: &NeighborSet, mk: f64, w: &mut [f64]) {
    let ds = metric.dataset();
    let counts = ds.class_counts();
    let own = ds.class_of(r);
    // P(C) / (1 - P(class(R))) in counts, exact when only one foreign class.
    let foreign = (ds.n_instances() - counts[own]) as f64;
    for (a, wa) in w.iter_mut().enumerate() {
        let hit: f64 = nb.hits.iter().map(|&h| metric.diff(a, r, h)).sum();
        let miss: f64 = nb
            .misses_by_class
            .iter()
            .enumerate()
            .filter(|(c, list)| *c != own && !list.is_empty())
            .map(|(c, list)| {
                let factor = counts[c] as f64 / foreign;
                factor * list.iter().map(|&j| metric.diff(a, r, j)).sum::<f64>()
            })
            .sum();
        *wa = *wa - hit / mk + miss / mk;
    }
}

/// Rounding can leave a maximal estimate a few ulp outside `[-1, 1]`.
fn finish(mut w: Vec<f64>) -> WeightVector {
    for x in &mut w {
        *x = x.clamp(-1.0, 1.0);
    }
    WeightVector(w)
}
