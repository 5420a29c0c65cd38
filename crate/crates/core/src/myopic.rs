//! Locality-free ("myopic") ReliefF in closed form.
//!
//! Dropping the nearest-neighbor condition from the probability difference
//! that ReliefF estimates and sampling pairs with replacement gives
//!
//! ```text
//! W'(X) = P_eqval * GG'(X) / (P_samecl * (1 - P_samecl))
//! ```
//!
//! with `P_eqval = sum_x P(x)^2`, `P_samecl = sum_c P(c)^2` and the modified
//! Gini gain
//!
//! ```text
//! GG'(X) = sum_x [P(x)^2 / sum_x P(x)^2] sum_c P(c|x)^2 - sum_c P(c)^2.
//! ```
//!
//! The usual Gini gain weights the value purities by `P(x)`; the squared
//! weighting here, together with the `P_eqval` factor, normalizes for
//! attributes with many values.

use crate::data::{Dataset, FeatureKind, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeStats {
    /// `P(x)` per attribute value.
    pub value_probs: Vec<f64>,
    /// `P(c)` per class.
    pub class_probs: Vec<f64>,
    /// `P(c | x)`, indexed `[x][c]`.
    pub cond_class_probs: Vec<Vec<f64>>,
}

impl AttributeStats {
    /// Empirical statistics of a categoric feature. Values never observed
    /// get `P(x) = 0` and a uniform (unused) conditional row.
    pub fn from_dataset(ds: &Dataset, feature: usize) -> Result<Self> {
        let domain = match ds.feature(feature).kind {
            FeatureKind::Categoric { domain_size } => domain_size as usize,
            FeatureKind::Numeric => {
                return Err(Error::KindMismatch {
                    feature,
                    expected: "categoric",
                    found: "numeric",
                })
            }
        };
        let nc = ds.n_classes();
        let mut joint = vec![vec![0usize; nc]; domain];
        let mut total = 0usize;
        for i in 0..ds.n_instances() {
            match ds.value(i, feature) {
                Value::Cat(x) => {
                    joint[x as usize][ds.class_of(i)] += 1;
                    total += 1;
                }
                Value::Missing => {}
                Value::Num(_) => unreachable!(),
            }
        }
        if total == 0 {
            return Err(Error::EmptyInput("attribute has no observed values"));
        }
        let value_probs = joint
            .iter()
            .map(|row| row.iter().sum::<usize>() as f64 / total as f64)
            .collect();
        let mut class_probs = vec![0.0; nc];
        for row in &joint {
            for (c, &n) in row.iter().enumerate() {
                class_probs[c] += n as f64 / total as f64;
            }
        }
        let cond_class_probs = joint
            .iter()
            .map(|row| {
                let n: usize = row.iter().sum();
                if n == 0 {
                    vec![1.0 / nc as f64; nc]
                } else {
                    row.iter().map(|&k| k as f64 / n as f64).collect()
                }
            })
            .collect();
        Ok(AttributeStats {
            value_probs,
            class_probs,
            cond_class_probs,
        })
    }
}

pub fn p_eqval(stats: &AttributeStats) -> Result<f64> {
    if stats.value_probs.is_empty() {
        return Err(Error::EmptyInput("attribute has an empty domain"));
    }
    Ok(stats.value_probs.iter().map(|p| p * p).sum())
}

pub fn p_samecl(stats: &AttributeStats) -> f64 {
    stats.class_probs.iter().map(|p| p * p).sum()
}

pub fn gini_gain_modified(stats: &AttributeStats) -> Result<f64> {
    let eq = p_eqval(stats)?;
    let purity: f64 = stats
        .value_probs
        .iter()
        .zip(&stats.cond_class_probs)
        .map(|(px, cond)| px * px / eq * cond.iter().map(|p| p * p).sum::<f64>())
        .sum();
    Ok(purity - p_samecl(stats))
}

pub fn myopic_weight(stats: &AttributeStats) -> Result<f64> {
    let same = p_samecl(stats);
    if same <= 0.0 || same >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "degenerate class distribution (P_samecl = {same})"
        )));
    }
    Ok(p_eqval(stats)? * gini_gain_modified(stats)? / (same * (1.0 - same)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(value_probs: Vec<f64>, cond: Vec<Vec<f64>>) -> AttributeStats {
        let nc = cond[0].len();
        let class_probs = (0..nc)
            .map(|c| value_probs.iter().zip(&cond).map(|(px, row)| px * row[c]).sum())
            .collect();
        AttributeStats {
            value_probs,
            class_probs,
            cond_class_probs: cond,
        }
    }

    #[test]
    fn eqval() {
        let s = stats(vec![0.5, 0.5], vec![vec![0.5, 0.5]; 2]);
        assert_eq!(p_eqval(&s).unwrap(), 0.5);
        let s = stats(vec![1.0], vec![vec![0.5, 0.5]]);
        assert_eq!(p_eqval(&s).unwrap(), 1.0);
        let s = stats(vec![0.5, 0.25, 0.25], vec![vec![0.5, 0.5]; 3]);
        assert_eq!(p_eqval(&s).unwrap(), 0.375);
        let empty = AttributeStats {
            value_probs: vec![],
            class_probs: vec![0.5, 0.5],
            cond_class_probs: vec![],
        };
        assert!(p_eqval(&empty).is_err());
    }

    #[test]
    fn independent_attribute_has_no_gain() {
        let s = stats(vec![0.2, 0.3, 0.5], vec![vec![0.7, 0.3]; 3]);
        assert!(gini_gain_modified(&s).unwrap().abs() < 1e-12);
        assert!(myopic_weight(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn determining_attribute() {
        let s = stats(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(gini_gain_modified(&s).unwrap(), 0.5);
        assert_eq!(myopic_weight(&s).unwrap(), 1.0);
    }

    #[test]
    fn single_valued_attribute() {
        let s = stats(vec![1.0], vec![vec![0.3, 0.7]]);
        assert!(gini_gain_modified(&s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn degenerate_class_distribution() {
        let s = stats(vec![0.5, 0.5], vec![vec![1.0, 0.0]; 2]);
        assert!(myopic_weight(&s).is_err());
    }

    #[test]
    fn value_relabeling_is_invisible() {
        let s = stats(
            vec![0.1, 0.6, 0.3],
            vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.5, 0.5]],
        );
        let mut perm = s.clone();
        perm.value_probs.rotate_left(1);
        perm.cond_class_probs.rotate_left(1);
        let a = myopic_weight(&s).unwrap();
        let b = myopic_weight(&perm).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
