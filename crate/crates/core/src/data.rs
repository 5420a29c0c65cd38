//! Immutable tabular dataset shared by the weighting algorithms, the
//! generators and the experiment harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class labels are dense indices `0..n_classes`.
pub type ClassLabel = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    /// Symbols are indices in `0..domain_size`.
    Categoric { domain_size: u32 },
}

impl FeatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureKind::Numeric => "numeric",
            FeatureKind::Categoric { .. } => "categoric",
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, FeatureKind::Numeric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMeta {
    pub name: String,
    pub kind: FeatureKind,
    /// Ground-truth relevance marker, set by the generators.
    pub relevant: bool,
    /// `(min, max)` over the non-missing values; numeric features only.
    pub observed_range: Option<(f64, f64)>,
}

impl FeatureMeta {
    pub fn numeric(name: impl Into<String>, relevant: bool) -> Self {
        FeatureMeta {
            name: name.into(),
            kind: FeatureKind::Numeric,
            relevant,
            observed_range: None,
        }
    }

    pub fn categoric(name: impl Into<String>, domain_size: u32, relevant: bool) -> Self {
        FeatureMeta {
            name: name.into(),
            kind: FeatureKind::Categoric { domain_size },
            relevant,
            observed_range: None,
        }
    }
}

/// Row-major instance matrix plus class labels and class priors.
///
/// Construction validates every structural invariant and computes the
/// per-feature statistics; afterwards the dataset is read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<FeatureMeta>,
    values: Vec<Value>,
    classes: Vec<ClassLabel>,
    n_classes: usize,
    class_counts: Vec<usize>,
    class_priors: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from rows and labels. `n_classes` is the size of the
    /// label set; classes with no instances get a prior of zero.
    pub fn new(
        features: Vec<FeatureMeta>,
        rows: Vec<Vec<Value>>,
        classes: Vec<ClassLabel>,
        n_classes: usize,
    ) -> Result<Self> {
        let width = features.len();
        if rows.len() != classes.len() {
            return Err(Error::Malformed(format!(
                "{} rows but {} class labels",
                rows.len(),
                classes.len()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * width);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::Malformed(format!(
                    "row {r} has {} values, expected {width}",
                    row.len()
                )));
            }
            values.extend(row);
        }
        Self::from_flat(features, values, classes, n_classes)
    }

    /// Same as [`Dataset::new`] with the values already flattened row-major.
    pub fn from_flat(
        features: Vec<FeatureMeta>,
        values: Vec<Value>,
        classes: Vec<ClassLabel>,
        n_classes: usize,
    ) -> Result<Self> {
        let width = features.len();
        if values.len() != classes.len() * width {
            return Err(Error::Malformed(format!(
                "{} values do not fill {} rows of width {width}",
                values.len(),
                classes.len()
            )));
        }
        for (f, meta) in features.iter().enumerate() {
            if let FeatureKind::Categoric { domain_size } = meta.kind {
                if domain_size < 2 {
                    return Err(Error::Malformed(format!(
                        "categoric feature {f} has domain size {domain_size} (< 2)"
                    )));
                }
            }
        }
        for (i, v) in values.iter().enumerate() {
            let f = i % width.max(1);
            match (v, features[f].kind) {
                (Value::Missing, _) => {}
                (Value::Num(x), FeatureKind::Numeric) if x.is_finite() => {}
                (Value::Cat(c), FeatureKind::Categoric { domain_size }) if *c < domain_size => {}
                _ => {
                    return Err(Error::Malformed(format!(
                        "value {v:?} invalid for {} feature {f} at row {}",
                        features[f].kind.name(),
                        i / width
                    )))
                }
            }
        }
        if let Some(&bad) = classes.iter().find(|&&c| c >= n_classes) {
            return Err(Error::Malformed(format!(
                "class label {bad} outside 0..{n_classes}"
            )));
        }
        let ds = Dataset {
            features,
            values,
            classes,
            n_classes,
            class_counts: Vec::new(),
            class_priors: Vec::new(),
        };
        compute_stats(ds)
    }

    pub fn n_instances(&self) -> usize {
        self.classes.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &[FeatureMeta] {
        &self.features
    }

    pub fn feature(&self, f: usize) -> &FeatureMeta {
        &self.features[f]
    }

    pub fn value(&self, instance: usize, feature: usize) -> Value {
        self.values[instance * self.features.len() + feature]
    }

    pub fn row(&self, instance: usize) -> &[Value] {
        let w = self.features.len();
        &self.values[instance * w..(instance + 1) * w]
    }

    pub fn class_of(&self, instance: usize) -> ClassLabel {
        self.classes[instance]
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn class_priors(&self) -> &[f64] {
        &self.class_priors
    }

    /// Number of classes with at least one instance.
    pub fn present_classes(&self) -> usize {
        self.class_counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn relevant_flags(&self) -> Vec<bool> {
        self.features.iter().map(|f| f.relevant).collect()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Value::is_missing)
    }

    pub(crate) fn check_index(&self, instance: usize) -> Result<()> {
        if instance < self.n_instances() {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                index: instance,
                len: self.n_instances(),
            })
        }
    }

    pub(crate) fn check_feature(&self, feature: usize) -> Result<()> {
        if feature < self.n_features() {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                index: feature,
                len: self.n_features(),
            })
        }
    }

    /// Fails unless at least two classes have members.
    pub fn require_two_present_classes(&self) -> Result<()> {
        match self.present_classes() {
            n if n >= 2 => Ok(()),
            n => Err(Error::TooFewClasses { found: n }),
        }
    }
}

/// Fills the observed numeric ranges and the class priors.
pub fn compute_stats(mut ds: Dataset) -> Result<Dataset> {
    let n = ds.n_instances();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let width = ds.features.len();
    for f in 0..width {
        if !ds.features[f].kind.is_numeric() {
            ds.features[f].observed_range = None;
            continue;
        }
        let mut range: Option<(f64, f64)> = None;
        for i in 0..n {
            if let Value::Num(x) = ds.values[i * width + f] {
                range = Some(match range {
                    None => (x, x),
                    Some((lo, hi)) => (lo.min(x), hi.max(x)),
                });
            }
        }
        ds.features[f].observed_range = Some(range.ok_or(Error::AllMissing { feature: f })?);
    }

    let mut counts = vec![0usize; ds.n_classes];
    for &c in &ds.classes {
        counts[c] += 1;
    }
    ds.class_priors = counts.iter().map(|&c| c as f64 / n as f64).collect();
    ds.class_counts = counts;
    Ok(ds)
}

/// Maximum-likelihood estimate of `P(value | class)` for one categoric
/// feature. Rows are indexed by class; classes without instances are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    rows: Vec<Option<Vec<f64>>>,
}

impl ConditionalTable {
    /// `P(symbol | class)`; zero for classes without instances.
    pub fn prob(&self, symbol: u32, class: ClassLabel) -> f64 {
        self.rows[class]
            .as_ref()
            .map_or(0.0, |row| row[symbol as usize])
    }

    pub fn class_row(&self, class: ClassLabel) -> Option<&[f64]> {
        self.rows[class].as_deref()
    }
}

pub fn class_conditional_table(ds: &Dataset, feature: usize) -> Result<ConditionalTable> {
    ds.check_feature(feature)?;
    let domain = match ds.features[feature].kind {
        FeatureKind::Categoric { domain_size } => domain_size as usize,
        FeatureKind::Numeric => {
            return Err(Error::KindMismatch {
                feature,
                expected: "categoric",
                found: "numeric",
            })
        }
    };
    let mut counts = vec![vec![0usize; domain]; ds.n_classes];
    for i in 0..ds.n_instances() {
        if let Value::Cat(s) = ds.value(i, feature) {
            counts[ds.classes[i]][s as usize] += 1;
        }
    }
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(class, row)| {
            if ds.class_counts[class] == 0 {
                return Ok(None);
            }
            let total: usize = row.iter().sum();
            if total == 0 {
                return Err(Error::DegenerateStatistics { feature, class });
            }
            Ok(Some(
                row.into_iter().map(|c| c as f64 / total as f64).collect(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_column(xs: &[f64], classes: Vec<usize>) -> Result<Dataset> {
        Dataset::new(
            vec![FeatureMeta::numeric("f0", true)],
            xs.iter().map(|&x| vec![Value::Num(x)]).collect(),
            classes,
            2,
        )
    }

    fn cat_column(symbols: &[Option<u32>], classes: Vec<usize>, domain: u32) -> Dataset {
        Dataset::new(
            vec![FeatureMeta::categoric("f0", domain, true)],
            symbols
                .iter()
                .map(|s| vec![s.map_or(Value::Missing, Value::Cat)])
                .collect(),
            classes,
            2,
        )
        .unwrap()
    }

    #[test]
    fn priors_follow_frequencies() {
        let ds = numeric_column(&[0.1, 0.2, 0.3], vec![0, 0, 1]).unwrap();
        assert_eq!(ds.class_priors(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert!((ds.class_priors().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn observed_range() {
        let ds = numeric_column(&[0.2, 0.7, 0.5], vec![0, 1, 0]).unwrap();
        assert_eq!(ds.feature(0).observed_range, Some((0.2, 0.7)));

        let flat = numeric_column(&[0.4, 0.4], vec![0, 1]).unwrap();
        assert_eq!(flat.feature(0).observed_range, Some((0.4, 0.4)));
    }

    #[test]
    fn range_ignores_missing() {
        let ds = Dataset::new(
            vec![FeatureMeta::numeric("f0", false)],
            vec![vec![Value::Num(0.3)], vec![Value::Missing], vec![Value::Num(0.9)]],
            vec![0, 1, 1],
            2,
        )
        .unwrap();
        assert_eq!(ds.feature(0).observed_range, Some((0.3, 0.9)));
    }

    #[test]
    fn rejects_empty_and_all_missing() {
        assert!(matches!(
            numeric_column(&[], vec![]),
            Err(Error::EmptyDataset)
        ));
        let all_missing = Dataset::new(
            vec![FeatureMeta::numeric("f0", false)],
            vec![vec![Value::Missing], vec![Value::Missing]],
            vec![0, 1],
            2,
        );
        assert!(matches!(all_missing, Err(Error::AllMissing { feature: 0 })));
    }

    #[test]
    fn rejects_structural_violations() {
        let ragged = Dataset::new(
            vec![FeatureMeta::numeric("a", true), FeatureMeta::numeric("b", false)],
            vec![vec![Value::Num(0.0)]],
            vec![0],
            2,
        );
        assert!(matches!(ragged, Err(Error::Malformed(_))));

        let out_of_domain = Dataset::new(
            vec![FeatureMeta::categoric("a", 2, true)],
            vec![vec![Value::Cat(2)]],
            vec![0],
            2,
        );
        assert!(matches!(out_of_domain, Err(Error::Malformed(_))));

        let bad_label = numeric_column(&[0.0], vec![5]);
        assert!(matches!(bad_label, Err(Error::Malformed(_))));

        let unary = Dataset::new(
            vec![FeatureMeta::categoric("a", 1, true)],
            vec![vec![Value::Cat(0)]],
            vec![0],
            2,
        );
        assert!(matches!(unary, Err(Error::Malformed(_))));

        let nan = numeric_column(&[f64::NAN], vec![0]);
        assert!(matches!(nan, Err(Error::Malformed(_))));
    }

    #[test]
    fn conditional_table_frequencies() {
        let ds = cat_column(&[Some(0), Some(0), Some(1), Some(1)], vec![0, 0, 0, 1], 2);
        let t = class_conditional_table(&ds, 0).unwrap();
        assert!((t.prob(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.prob(1, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.prob(1, 1), 1.0);
        assert_eq!(t.prob(0, 1), 0.0);
    }

    #[test]
    fn conditional_table_uniform() {
        let ds = Dataset::new(
            vec![FeatureMeta::categoric("a", 3, true)],
            (0..6).map(|i| vec![Value::Cat(i % 3)]).collect(),
            vec![0, 0, 0, 1, 1, 1],
            2,
        )
        .unwrap();
        let t = class_conditional_table(&ds, 0).unwrap();
        for class in 0..2 {
            let row = t.class_row(class).unwrap();
            assert_eq!(row.len(), 3);
            for p in row {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conditional_table_ignores_missing_and_flags_degenerate_class() {
        let ds = cat_column(&[Some(1), None, None], vec![0, 0, 1], 2);
        let err = class_conditional_table(&ds, 0).unwrap_err();
        assert!(matches!(
            err,
            Error::DegenerateStatistics {
                feature: 0,
                class: 1
            }
        ));

        let ok = cat_column(&[Some(1), None, Some(0)], vec![0, 0, 1], 2);
        let t = class_conditional_table(&ok, 0).unwrap();
        assert_eq!(t.prob(1, 0), 1.0);
    }

    #[test]
    fn conditional_table_rejects_numeric() {
        let ds = numeric_column(&[0.0, 1.0], vec![0, 1]).unwrap();
        assert!(matches!(
            class_conditional_table(&ds, 0),
            Err(Error::KindMismatch { .. })
        ));
    }
}
