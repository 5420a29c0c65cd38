//! Per-feature difference functions and the instance distances built on
//! them, including the progressive ponderation schedule.
//!
//! Every `diff` lies in `[0, 1]`:
//! * categoric features use the overlap metric (0 when equal, 1 otherwise);
//! * numeric features use `|x - y| / (max - min)` over the observed range,
//!   with a constant feature contributing 0;
//! * a missing categoric value is compared through the class-conditional
//!   value probabilities (`1 - P(v | class)` for one missing value,
//!   `1 - sum_a P(a | c1) P(a | c2)` for two).
//!
//! Ponderations are clamped at zero before they multiply a diff, so a
//! negative weight removes a feature from the distance instead of
//! rewarding disagreement on it.

use serde::{Deserialize, Serialize};

use crate::data::{class_conditional_table, ConditionalTable, Dataset, FeatureKind, FeatureMeta, Value};
use crate::error::{Error, Result};

/// Parameters of `f(w, t) = (w - 1) c(t) / (c(t) + s) + 1` with
/// `c(t) = (t / m)^a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressiveSchedule {
    s: f64,
    a: f64,
    m: u64,
}

impl ProgressiveSchedule {
    /// Steepness value that leaves one third of the area between `f ≡ 1`
    /// and `f ≡ w` under the curve when `a = 2`.
    pub const CALIBRATED_S: f64 = 0.0633657;
    pub const DEFAULT_S: f64 = 0.06;
    pub const DEFAULT_A: f64 = 2.0;

    pub fn new(s: f64, a: f64, m: u64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidConfig(format!("schedule s must be > 0, got {s}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidConfig(format!("schedule a must be > 0, got {a}")));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("schedule m must be >= 1".into()));
        }
        Ok(ProgressiveSchedule { s, a, m })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

pub fn c_progress(t: f64, sched: &ProgressiveSchedule) -> f64 {
    (t / sched.m as f64).powf(sched.a)
}

pub fn f_progress(w: f64, t: f64, sched: &ProgressiveSchedule) -> f64 {
    let c = c_progress(t, sched);
    (w - 1.0) * c / (c + sched.s) + 1.0
}

#[inline]
pub(crate) fn ponderate(w: f64) -> f64 {
    w.max(0.0)
}

/// Fraction of the area between `f ≡ w` and `f ≡ 1` over `[1, m]` that
/// lies below `f`. The ratio does not depend on the reference weight.
pub fn area_ratio(sched: &ProgressiveSchedule) -> Result<f64> {
    area_ratio_of(|w, t| f_progress(w, t, sched), 0.5, sched.m)
}

/// [`area_ratio`] for an arbitrary ponderation `f(w, t)`, evaluated at the
/// reference weight `w < 1`.
pub fn area_ratio_of(f: impl Fn(f64, f64) -> f64, w: f64, m: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidConfig(format!(
            "area ratio needs m >= 2, got {m}"
        )));
    }
    if w.is_nan() || w >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "reference weight must be < 1, got {w}"
        )));
    }
    let span = m as f64 - 1.0;
    let area_f = simpson(|t| f(w, t), 1.0, m as f64, 10_000);
    Ok((area_f - span * w) / (span - span * w))
}

/// Composite Simpson rule over `intervals` (even) subintervals.
fn simpson(g: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (hi - lo) / n as f64;
    let mut acc = g(lo) + g(hi);
    for i in 1..n {
        let x = lo + h * i as f64;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
    }
    acc * h / 3.0
}

pub fn diff_overlap(v1: Value, v2: Value) -> Result<f64> {
    match (v1, v2) {
        (Value::Cat(a), Value::Cat(b)) => Ok(if a == b { 0.0 } else { 1.0 }),
        (Value::Missing, _) | (_, Value::Missing) => Err(Error::MissingValue),
        _ => Err(Error::Malformed(
            "overlap diff needs two categoric values".into(),
        )),
    }
}

#[inline]
fn numeric_kernel(x: f64, y: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        ((x - y).abs() / (hi - lo)).min(1.0)
    } else {
        0.0
    }
}

pub fn diff_numeric(meta: &FeatureMeta, v1: Value, v2: Value) -> Result<f64> {
    let (x, y) = match (v1, v2) {
        (Value::Num(x), Value::Num(y)) => (x, y),
        (Value::Missing, _) | (_, Value::Missing) => return Err(Error::MissingValue),
        _ => {
            return Err(Error::Malformed(
                "numeric diff needs two numeric values".into(),
            ))
        }
    };
    let (lo, hi) = meta
        .observed_range
        .ok_or(Error::StatsNotComputed { feature: usize::MAX })?;
    Ok(numeric_kernel(x, y, lo, hi))
}

/// Diff where at least one of the two categoric values is missing.
/// Conditioning is on the class of the first instance when only it is
/// missing, so the function is not symmetric in that case.
pub fn diff_missing(ds: &Dataset, feature: usize, i1: usize, i2: usize) -> Result<f64> {
    ds.check_feature(feature)?;
    ds.check_index(i1)?;
    ds.check_index(i2)?;
    if ds.feature(feature).kind.is_numeric() {
        return Err(Error::UnsupportedMissing { feature });
    }
    let table = class_conditional_table(ds, feature)?;
    missing_kernel(&table, ds, feature, i1, i2)
}

fn missing_kernel(
    table: &ConditionalTable,
    ds: &Dataset,
    feature: usize,
    i1: usize,
    i2: usize,
) -> Result<f64> {
    let (c1, c2) = (ds.class_of(i1), ds.class_of(i2));
    let d = match (ds.value(i1, feature), ds.value(i2, feature)) {
        (Value::Missing, Value::Cat(v)) => 1.0 - table.prob(v, c1),
        (Value::Cat(v), Value::Missing) => 1.0 - table.prob(v, c2),
        (Value::Missing, Value::Missing) => {
            let (r1, r2) = match (table.class_row(c1), table.class_row(c2)) {
                (Some(r1), Some(r2)) => (r1, r2),
                _ => unreachable!("instances always belong to populated classes"),
            };
            1.0 - r1.iter().zip(r2).map(|(p, q)| p * q).sum::<f64>()
        }
        _ => return Err(Error::Malformed("diff_missing needs a missing value".into())),
    };
    Ok(d.clamp(0.0, 1.0))
}

/// Dispatches to the overlap, numeric or missing-value diff.
pub fn diff(ds: &Dataset, feature: usize, i1: usize, i2: usize) -> Result<f64> {
    ds.check_feature(feature)?;
    ds.check_index(i1)?;
    ds.check_index(i2)?;
    let (v1, v2) = (ds.value(i1, feature), ds.value(i2, feature));
    if v1.is_missing() || v2.is_missing() {
        return diff_missing(ds, feature, i1, i2);
    }
    let meta = ds.feature(feature);
    match meta.kind {
        FeatureKind::Numeric => diff_numeric(meta, v1, v2).map_err(|e| match e {
            Error::StatsNotComputed { .. } => Error::StatsNotComputed { feature },
            e => e,
        }),
        FeatureKind::Categoric { .. } => diff_overlap(v1, v2),
    }
}

pub fn distance_plain(ds: &Dataset, i1: usize, i2: usize) -> Result<f64> {
    Ok(Metric::new(ds)?.checked(i1, i2)?.distance_plain(i1, i2))
}

pub fn distance_weighted(ds: &Dataset, i1: usize, i2: usize, w: &[f64]) -> Result<f64> {
    let metric = Metric::new(ds)?.checked(i1, i2)?;
    metric.check_len(w)?;
    Ok(metric.distance_weighted(i1, i2, w))
}

pub fn distance_progressive(
    ds: &Dataset,
    i1: usize,
    i2: usize,
    w: &[f64],
    t: f64,
    sched: &ProgressiveSchedule,
) -> Result<f64> {
    let metric = Metric::new(ds)?.checked(i1, i2)?;
    metric.check_len(w)?;
    Ok(metric.distance_progressive(i1, i2, w, t, sched))
}

#[derive(Debug, Clone)]
enum Kernel {
    Numeric { lo: f64, hi: f64 },
    Categoric { missing: Option<ConditionalTable> },
}

/// Validated, infallible diff evaluation over one dataset.
///
/// Construction rejects datasets the diff cannot handle (missing numeric
/// values, degenerate class-conditional statistics) and precomputes the
/// conditional tables needed by missing categoric values.
#[derive(Debug, Clone)]
pub struct Metric<'a> {
    ds: &'a Dataset,
    kernels: Vec<Kernel>,
}

impl<'a> Metric<'a> {
    pub fn new(ds: &'a Dataset) -> Result<Self> {
        let mut kernels = Vec::with_capacity(ds.n_features());
        for (f, meta) in ds.features().iter().enumerate() {
            let has_missing = (0..ds.n_instances()).any(|i| ds.value(i, f).is_missing());
            kernels.push(match meta.kind {
                FeatureKind::Numeric => {
                    if has_missing {
                        return Err(Error::UnsupportedMissing { feature: f });
                    }
                    let (lo, hi) = meta
                        .observed_range
                        .ok_or(Error::StatsNotComputed { feature: f })?;
                    Kernel::Numeric { lo, hi }
                }
                FeatureKind::Categoric { .. } => Kernel::Categoric {
                    missing: if has_missing {
                        Some(class_conditional_table(ds, f)?)
                    } else {
                        None
                    },
                },
            });
        }
        Ok(Metric { ds, kernels })
    }

    fn checked(self, i1: usize, i2: usize) -> Result<Self> {
        self.ds.check_index(i1)?;
        self.ds.check_index(i2)?;
        Ok(self)
    }

    pub(crate) fn check_len(&self, w: &[f64]) -> Result<()> {
        if w.len() == self.kernels.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.kernels.len(),
                found: w.len(),
            })
        }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.ds
    }

    #[inline]
    pub fn diff(&self, feature: usize, i1: usize, i2: usize) -> f64 {
        let v1 = self.ds.value(i1, feature);
        let v2 = self.ds.value(i2, feature);
        match (&self.kernels[feature], v1, v2) {
            (Kernel::Numeric { lo, hi }, Value::Num(x), Value::Num(y)) => {
                numeric_kernel(x, y, *lo, *hi)
            }
            (Kernel::Categoric { .. }, Value::Cat(a), Value::Cat(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            (Kernel::Categoric { missing: Some(t) }, _, _) => {
                missing_kernel(t, self.ds, feature, i1, i2).expect("validated in Metric::new")
            }
            _ => unreachable!("values validated against feature kinds"),
        }
    }

    pub fn distance_plain(&self, i1: usize, i2: usize) -> f64 {
        (0..self.kernels.len()).map(|f| self.diff(f, i1, i2)).sum()
    }

    /// Sum of `p_f * diff_f` with `p` already clamped at zero.
    #[inline]
    pub(crate) fn distance_ponderated(&self, i1: usize, i2: usize, p: &[f64]) -> f64 {
        p.iter()
            .enumerate()
            .map(|(f, &pf)| pf * self.diff(f, i1, i2))
            .sum()
    }

    pub fn distance_weighted(&self, i1: usize, i2: usize, w: &[f64]) -> f64 {
        w.iter()
            .enumerate()
            .map(|(f, &wf)| ponderate(wf) * self.diff(f, i1, i2))
            .sum()
    }

    pub fn distance_progressive(
        &self,
        i1: usize,
        i2: usize,
        w: &[f64],
        t: f64,
        sched: &ProgressiveSchedule,
    ) -> f64 {
        w.iter()
            .enumerate()
            .map(|(f, &wf)| ponderate(f_progress(wf, t, sched)) * self.diff(f, i1, i2))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureMeta;

    fn sched(s: f64, a: f64, m: u64) -> ProgressiveSchedule {
        ProgressiveSchedule::new(s, a, m).unwrap()
    }

    fn two_numeric() -> Dataset {
        // f0 spans [0, 1], f1 spans [0, 2].
        Dataset::new(
            vec![FeatureMeta::numeric("f0", true), FeatureMeta::numeric("f1", false)],
            vec![
                vec![Value::Num(0.0), Value::Num(0.0)],
                vec![Value::Num(0.5), Value::Num(0.5)],
                vec![Value::Num(1.0), Value::Num(2.0)],
            ],
            vec![0, 1, 0],
            2,
        )
        .unwrap()
    }

    #[test]
    fn overlap() {
        assert_eq!(diff_overlap(Value::Cat(3), Value::Cat(3)).unwrap(), 0.0);
        assert_eq!(diff_overlap(Value::Cat(0), Value::Cat(1)).unwrap(), 1.0);
        assert!(matches!(
            diff_overlap(Value::Missing, Value::Cat(1)),
            Err(Error::MissingValue)
        ));
        assert!(diff_overlap(Value::Num(1.0), Value::Cat(1)).is_err());
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(
                    diff_overlap(Value::Cat(a), Value::Cat(b)).unwrap(),
                    diff_overlap(Value::Cat(b), Value::Cat(a)).unwrap()
                );
            }
        }
    }

    #[test]
    fn numeric() {
        let mut meta = FeatureMeta::numeric("x", true);
        meta.observed_range = Some((0.0, 1.0));
        let d = diff_numeric(&meta, Value::Num(0.2), Value::Num(0.7)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(diff_numeric(&meta, Value::Num(0.3), Value::Num(0.3)).unwrap(), 0.0);

        meta.observed_range = Some((0.4, 0.4));
        assert_eq!(diff_numeric(&meta, Value::Num(0.4), Value::Num(0.4)).unwrap(), 0.0);

        meta.observed_range = None;
        assert!(matches!(
            diff_numeric(&meta, Value::Num(0.4), Value::Num(0.4)),
            Err(Error::StatsNotComputed { .. })
        ));
    }

    #[test]
    fn numeric_clamps_out_of_range_values() {
        let mut meta = FeatureMeta::numeric("x", true);
        meta.observed_range = Some((0.0, 1.0));
        assert_eq!(diff_numeric(&meta, Value::Num(-1.0), Value::Num(3.0)).unwrap(), 1.0);
    }

    fn missing_fixture() -> Dataset {
        // Class 0 holds symbols [a, a, b] plus one missing value; class 1
        // holds only symbol a.
        Dataset::new(
            vec![FeatureMeta::categoric("f0", 2, true)],
            vec![
                vec![Value::Cat(0)],
                vec![Value::Cat(0)],
                vec![Value::Cat(1)],
                vec![Value::Missing],
                vec![Value::Cat(0)],
                vec![Value::Missing],
            ],
            vec![0, 0, 0, 0, 1, 1],
            2,
        )
        .unwrap()
    }

    #[test]
    fn missing_one_side() {
        let ds = missing_fixture();
        // I1 = 3 (class 0, missing), I2 = 0 (symbol a): 1 - P(a|0) = 1/3.
        let d = diff_missing(&ds, 0, 3, 0).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        // I1 = 5 (class 1, missing), I2 = 0 (symbol a): P(a|1) = 1 -> 0.
        assert_eq!(diff_missing(&ds, 0, 5, 0).unwrap(), 0.0);
        // Only I2 missing: conditions on I2's class.
        let d = diff_missing(&ds, 0, 2, 3).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn missing_both_sides() {
        let ds = missing_fixture();
        // 1 - (P(a|0) P(a|1) + P(b|0) P(b|1)) = 1 - 2/3.
        let d = diff_missing(&ds, 0, 3, 5).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        // Same class point mass -> 0.
        assert_eq!(diff_missing(&ds, 0, 5, 5).unwrap(), 0.0);
    }

    #[test]
    fn missing_in_numeric_is_unsupported() {
        let ds = Dataset::new(
            vec![FeatureMeta::numeric("f0", true)],
            vec![vec![Value::Num(0.0)], vec![Value::Missing]],
            vec![0, 1],
            2,
        )
        .unwrap();
        assert!(matches!(
            diff_missing(&ds, 0, 1, 0),
            Err(Error::UnsupportedMissing { feature: 0 })
        ));
        assert!(matches!(diff(&ds, 0, 1, 0), Err(Error::UnsupportedMissing { .. })));
        assert!(matches!(Metric::new(&ds), Err(Error::UnsupportedMissing { .. })));
    }

    #[test]
    fn dispatch_routes() {
        let ds = two_numeric();
        assert_eq!(diff(&ds, 0, 0, 1).unwrap(), 0.5);
        let cat = missing_fixture();
        assert_eq!(diff(&cat, 0, 0, 2).unwrap(), 1.0);
        assert_eq!(diff(&cat, 0, 3, 0).unwrap(), diff_missing(&cat, 0, 3, 0).unwrap());
        assert!(matches!(diff(&ds, 7, 0, 1), Err(Error::OutOfBounds { .. })));
        assert!(matches!(diff(&ds, 0, 0, 9), Err(Error::OutOfBounds { .. })));
    }

    #[test]
    fn plain_distance() {
        let ds = two_numeric();
        assert_eq!(distance_plain(&ds, 1, 1).unwrap(), 0.0);
        // diffs 0.5 and 0.25
        assert_eq!(distance_plain(&ds, 0, 1).unwrap(), 0.75);

        let bin = Dataset::new(
            (0..3).map(|f| FeatureMeta::categoric(format!("f{f}"), 2, true)).collect(),
            vec![vec![Value::Cat(0); 3], vec![Value::Cat(1); 3]],
            vec![0, 1],
            2,
        )
        .unwrap();
        assert_eq!(distance_plain(&bin, 0, 1).unwrap(), 3.0);
    }

    #[test]
    fn weighted_distance() {
        let ds = two_numeric();
        assert_eq!(
            distance_weighted(&ds, 0, 2, &[1.0, 1.0]).unwrap(),
            distance_plain(&ds, 0, 2).unwrap()
        );
        assert_eq!(distance_weighted(&ds, 0, 2, &[0.0, 0.0]).unwrap(), 0.0);
        // diffs [1, 1]; the negative weight is clamped away.
        assert_eq!(distance_weighted(&ds, 0, 2, &[0.5, 0.0]).unwrap(), 0.5);
        assert_eq!(distance_weighted(&ds, 0, 2, &[0.5, -3.0]).unwrap(), 0.5);
        assert!(matches!(
            distance_weighted(&ds, 0, 2, &[1.0]),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn progressive_distance_limits() {
        let ds = two_numeric();
        let w = [0.3, 0.8];
        let sc = sched(0.06, 2.0, 10);
        assert_eq!(
            distance_progressive(&ds, 0, 1, &w, 0.0, &sc).unwrap(),
            distance_plain(&ds, 0, 1).unwrap()
        );
        for t in 0..=10 {
            assert_eq!(
                distance_progressive(&ds, 0, 1, &[1.0, 1.0], t as f64, &sc).unwrap(),
                distance_plain(&ds, 0, 1).unwrap()
            );
        }
        let sharp = sched(1e-12, 2.0, 10);
        let p = distance_progressive(&ds, 0, 1, &w, 10.0, &sharp).unwrap();
        let q = distance_weighted(&ds, 0, 1, &w).unwrap();
        assert!((p - q).abs() < 1e-9);
    }

    #[test]
    fn schedule_functions() {
        let sc = sched(0.06, 2.0, 10);
        assert_eq!(c_progress(0.0, &sc), 0.0);
        assert_eq!(c_progress(10.0, &sc), 1.0);
        assert_eq!(c_progress(5.0, &sc), 0.25);
        for w in [-0.7, 0.0, 0.5, 1.0, 2.5] {
            assert_eq!(f_progress(w, 0.0, &sc), 1.0);
        }
        for t in 0..=10 {
            assert_eq!(f_progress(1.0, t as f64, &sc), 1.0);
        }
        let v = f_progress(0.5, 10.0, &sc);
        assert!((v - (1.0 - 0.5 / 1.06)).abs() < 1e-15);
        assert!((v - 0.5283).abs() < 1e-4);
    }

    #[test]
    fn schedule_validation() {
        assert!(ProgressiveSchedule::new(0.0, 2.0, 10).is_err());
        assert!(ProgressiveSchedule::new(0.06, -1.0, 10).is_err());
        assert!(ProgressiveSchedule::new(0.06, 2.0, 0).is_err());
    }

    #[test]
    fn area_ratio_extremes() {
        assert!((area_ratio_of(|_, _| 1.0, 0.5, 100).unwrap() - 1.0).abs() < 1e-12);
        assert!(area_ratio_of(|w, _| w, 0.5, 100).unwrap().abs() < 1e-12);
        assert!(area_ratio(&sched(0.06, 2.0, 1)).is_err());
    }

    #[test]
    fn area_ratio_is_weight_independent() {
        let sc = sched(0.0633657, 2.0, 50);
        let lo = area_ratio_of(|w, t| f_progress(w, t, &sc), 0.2, 50).unwrap();
        let hi = area_ratio_of(|w, t| f_progress(w, t, &sc), 0.8, 50).unwrap();
        assert!((lo - hi).abs() < 1e-9, "{lo} vs {hi}");
    }
}
