//! Seeded synthetic problems with known relevant features.
//!
//! Every generator emits the `n_relevant` relevant features first, followed
//! by `n_irrelevant` features that carry no class information. Features are
//! named `f0, f1, ...`; labels are dense in `0..n_classes`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureMeta, Value};
use crate::error::{Error, Result};
use crate::rng::{seeded, SeededRng};

pub const DEFAULT_INSTANCES: usize = 100;
pub const DEFAULT_MODULUS: u32 = 3;
pub const DEFAULT_CLASSES: usize = 2;
pub const DEFAULT_CENTERS_PER_CLASS: usize = 3;
/// Upper bound on the number of terms in one decision-list rule.
pub const MAX_RULE_TERMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    Rdg1Continuous,
    Rdg1Categoric,
    RandomRbf,
    NonMonotonic,
    MajorityN,
    ModuloP,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::Rdg1Continuous,
        ProblemKind::RandomRbf,
        ProblemKind::NonMonotonic,
        ProblemKind::MajorityN,
        ProblemKind::ModuloP,
        ProblemKind::Rdg1Categoric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Rdg1Continuous => "rdg1-continuous",
            ProblemKind::Rdg1Categoric => "rdg1-categoric",
            ProblemKind::RandomRbf => "random-rbf",
            ProblemKind::NonMonotonic => "non-monotonic",
            ProblemKind::MajorityN => "majority-n",
            ProblemKind::ModuloP => "modulo-p",
        }
    }

    /// Stable small integer used when deriving per-cell seeds.
    pub fn code(&self) -> u64 {
        match self {
            ProblemKind::Rdg1Continuous => 0,
            ProblemKind::RandomRbf => 1,
            ProblemKind::NonMonotonic => 2,
            ProblemKind::MajorityN => 3,
            ProblemKind::ModuloP => 4,
            ProblemKind::Rdg1Categoric => 5,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            ProblemKind::Rdg1Continuous | ProblemKind::RandomRbf | ProblemKind::NonMonotonic
        )
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown problem '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: ProblemKind,
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    pub n_instances: usize,
    pub seed: u64,
    /// Modulus, ModuloP only.
    pub p: u32,
    /// Label-set size for the decision-list and RBF problems.
    pub n_classes: usize,
    /// RBF only.
    pub centers_per_class: usize,
}

impl GeneratorSpec {
    pub fn new(kind: ProblemKind, n_relevant: usize, n_irrelevant: usize) -> Self {
        GeneratorSpec {
            kind,
            n_relevant,
            n_irrelevant,
            n_instances: DEFAULT_INSTANCES,
            seed: 0,
            p: DEFAULT_MODULUS,
            n_classes: DEFAULT_CLASSES,
            centers_per_class: DEFAULT_CENTERS_PER_CLASS,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_instances(mut self, n: usize) -> Self {
        self.n_instances = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_relevant == 0 {
            return bad("at least one relevant feature is required".into());
        }
        if self.n_instances == 0 {
            return bad("at least one instance is required".into());
        }
        match self.kind {
            ProblemKind::ModuloP if self.p < 2 => bad(format!("modulus p must be >= 2, got {}", self.p)),
            ProblemKind::Rdg1Continuous | ProblemKind::Rdg1Categoric | ProblemKind::RandomRbf
                if self.n_classes == 0 =>
            {
                bad("number of classes must be >= 1".into())
            }
            ProblemKind::RandomRbf if self.centers_per_class == 0 => {
                bad("centers per class must be >= 1".into())
            }
            _ => Ok(()),
        }
    }

    fn feature_metas(&self, make: impl Fn(String, bool) -> FeatureMeta) -> Vec<FeatureMeta> {
        (0..self.n_relevant + self.n_irrelevant)
            .map(|f| make(format!("f{f}"), f < self.n_relevant))
            .collect()
    }

    fn check_kind(&self, expected: ProblemKind) -> Result<()> {
        self.validate()?;
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "spec is for {}, expected {expected}",
                self.kind
            )))
        }
    }
}

/// Generates the dataset described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    match spec.kind {
        ProblemKind::Rdg1Continuous => gen_rdg_continuous(spec).map(|o| o.dataset),
        ProblemKind::Rdg1Categoric => gen_rdg_categoric(spec).map(|o| o.dataset),
        ProblemKind::RandomRbf => gen_random_rbf(spec),
        ProblemKind::NonMonotonic => gen_non_monotonic(spec),
        ProblemKind::MajorityN => gen_majority(spec),
        ProblemKind::ModuloP => gen_modulo_p(spec),
    }
}

// Decision lists ----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Term {
    Less { feature: usize, threshold: f64 },
    AtLeast { feature: usize, threshold: f64 },
    Is { feature: usize, value: bool },
}

impl Term {
    pub fn holds(&self, row: &[Value]) -> bool {
        match *self {
            Term::Less { feature, threshold } => {
                matches!(row[feature], Value::Num(x) if x < threshold)
            }
            Term::AtLeast { feature, threshold } => {
                matches!(row[feature], Value::Num(x) if x >= threshold)
            }
            Term::Is { feature, value } => row[feature] == Value::Cat(value as u32),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Less { feature, threshold } => write!(f, "a{feature} < {threshold:.3}"),
            Term::AtLeast { feature, threshold } => write!(f, "a{feature} >= {threshold:.3}"),
            Term::Is { feature, value } => write!(f, "a{feature} = {value}"),
        }
    }
}

/// Conjunction of terms assigning `class`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub terms: Vec<Term>,
    pub class: usize,
}

impl DecisionRule {
    pub fn matches(&self, row: &[Value]) -> bool {
        self.terms.iter().all(|t| t.holds(row))
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{} :=", self.class)?;
        for (i, t) in self.terms.iter().enumerate() {
            write!(f, "{} {t}", if i == 0 { "" } else { " ∧" })?;
        }
        Ok(())
    }
}

/// Class of the first rule matching `row`.
pub fn classify(rules: &[DecisionRule], row: &[Value]) -> Option<usize> {
    rules.iter().find(|r| r.matches(row)).map(|r| r.class)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdgOutput {
    pub dataset: Dataset,
    pub rules: Vec<DecisionRule>,
}

/// `count` distinct indices from `0..n` (partial Fisher-Yates).
fn distinct(rng: &mut SeededRng, n: usize, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

fn term_count(rng: &mut SeededRng, n_relevant: usize) -> usize {
    rng.random_range(1..=MAX_RULE_TERMS.min(n_relevant))
}

fn random_rule(rng: &mut SeededRng, spec: &GeneratorSpec, class: usize, numeric: bool) -> DecisionRule {
    let n = term_count(rng, spec.n_relevant);
    let terms = distinct(rng, spec.n_relevant, n)
        .into_iter()
        .map(|feature| {
            if numeric {
                let threshold: f64 = rng.random();
                if rng.random::<bool>() {
                    Term::Less { feature, threshold }
                } else {
                    Term::AtLeast { feature, threshold }
                }
            } else {
                Term::Is {
                    feature,
                    value: rng.random(),
                }
            }
        })
        .collect();
    DecisionRule { terms, class }
}

/// A rule satisfied by `row`, with a random class.
fn rule_for(rng: &mut SeededRng, spec: &GeneratorSpec, row: &[Value]) -> DecisionRule {
    let n = term_count(rng, spec.n_relevant);
    let terms = distinct(rng, spec.n_relevant, n)
        .into_iter()
        .map(|feature| match row[feature] {
            Value::Num(v) => {
                let u: f64 = rng.random();
                let threshold_lt = 1.0 - u * (1.0 - v);
                if rng.random::<bool>() && v < threshold_lt {
                    Term::Less {
                        feature,
                        threshold: threshold_lt,
                    }
                } else {
                    Term::AtLeast {
                        feature,
                        threshold: u * v,
                    }
                }
            }
            Value::Cat(c) => Term::Is {
                feature,
                value: c == 1,
            },
            Value::Missing => unreachable!("generators never emit missing values"),
        })
        .collect();
    DecisionRule {
        terms,
        class: rng.random_range(0..spec.n_classes),
    }
}

fn gen_rdg(spec: &GeneratorSpec, numeric: bool) -> Result<RdgOutput> {
    let mut rng = seeded(spec.seed);
    let mut rules: Vec<DecisionRule> = (0..spec.n_classes)
        .map(|c| random_rule(&mut rng, spec, c, numeric))
        .collect();
    let width = spec.n_relevant + spec.n_irrelevant;
    let mut values = Vec::with_capacity(spec.n_instances * width);
    let mut classes = Vec::with_capacity(spec.n_instances);
    for _ in 0..spec.n_instances {
        let row: Vec<Value> = (0..width)
            .map(|_| {
                if numeric {
                    Value::Num(rng.random())
                } else {
                    Value::Cat(rng.random::<bool>() as u32)
                }
            })
            .collect();
        let class = match classify(&rules, &row) {
            Some(c) => c,
            None => {
                let rule = rule_for(&mut rng, spec, &row);
                let c = rule.class;
                rules.push(rule);
                c
            }
        };
        values.extend(row);
        classes.push(class);
    }
    let features = if numeric {
        spec.feature_metas(FeatureMeta::numeric)
    } else {
        spec.feature_metas(|name, rel| FeatureMeta::categoric(name, 2, rel))
    };
    Ok(RdgOutput {
        dataset: Dataset::from_flat(features, values, classes, spec.n_classes)?,
        rules,
    })
}

/// Decision-list problem over numeric attributes in `[0, 1)`.
pub fn gen_rdg_continuous(spec: &GeneratorSpec) -> Result<RdgOutput> {
    spec.check_kind(ProblemKind::Rdg1Continuous)?;
    gen_rdg(spec, true)
}

/// Decision-list problem over boolean attributes.
pub fn gen_rdg_categoric(spec: &GeneratorSpec) -> Result<RdgOutput> {
    spec.check_kind(ProblemKind::Rdg1Categoric)?;
    gen_rdg(spec, false)
}

// Gaussian RBF ------------------------------------------------------------

pub fn gaussian_pdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidConfig(format!("sigma must be > 0, got {sigma}")));
    }
    let z = (x - mu) / sigma;
    Ok((-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfCenter {
    pub class: usize,
    pub weight: f64,
    pub centroid: Vec<f64>,
    pub std_dev: f64,
}

impl RbfCenter {
    fn random(rng: &mut SeededRng, class: usize, dims: usize) -> Self {
        RbfCenter {
            class,
            weight: 1.0 - rng.random::<f64>(),
            centroid: (0..dims).map(|_| rng.random()).collect(),
            std_dev: 0.5 * (1.0 - rng.random::<f64>()),
        }
    }

    /// Centroid plus a uniformly oriented offset whose length is
    /// `|N(0, std_dev)|`.
    pub fn sample(&self, rng: &mut SeededRng) -> Vec<f64> {
        let dims = self.centroid.len();
        if dims == 0 {
            return Vec::new();
        }
        let (dir, norm) = loop {
            let dir: Vec<f64> = (0..dims).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                break (dir, norm);
            }
        };
        let z: f64 = rng.sample(StandardNormal);
        let radius = (z * self.std_dev).abs();
        self.centroid
            .iter()
            .zip(dir)
            .map(|(c, d)| c + d / norm * radius)
            .collect()
    }
}

/// Class centers over the relevant attributes plus class-free centers over
/// the irrelevant ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfModel {
    pub centers: Vec<RbfCenter>,
    pub noise_centers: Vec<RbfCenter>,
}

impl RbfModel {
    pub fn random(rng: &mut SeededRng, spec: &GeneratorSpec) -> Self {
        let total = spec.n_classes * spec.centers_per_class;
        let centers = (0..total)
            .map(|i| RbfCenter::random(rng, i / spec.centers_per_class, spec.n_relevant))
            .collect();
        let noise_centers = if spec.n_irrelevant == 0 {
            Vec::new()
        } else {
            (0..total)
                .map(|_| RbfCenter::random(rng, 0, spec.n_irrelevant))
                .collect()
        };
        RbfModel {
            centers,
            noise_centers,
        }
    }

    /// Weight-proportional choice among `centers`.
    pub fn pick(centers: &[RbfCenter], rng: &mut SeededRng) -> usize {
        let total: f64 = centers.iter().map(|c| c.weight).sum();
        let mut u = rng.random::<f64>() * total;
        for (i, c) in centers.iter().enumerate() {
            if u < c.weight {
                return i;
            }
            u -= c.weight;
        }
        centers.len() - 1
    }
}

pub fn gen_random_rbf(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.check_kind(ProblemKind::RandomRbf)?;
    let mut rng = seeded(spec.seed);
    let model = RbfModel::random(&mut rng, spec);
    sample_rbf(spec, &model, &mut rng)
}

/// Samples `spec.n_instances` points from a fixed model.
pub fn gen_random_rbf_with(spec: &GeneratorSpec, model: &RbfModel) -> Result<Dataset> {
    spec.check_kind(ProblemKind::RandomRbf)?;
    let mut rng = seeded(spec.seed);
    sample_rbf(spec, model, &mut rng)
}

fn sample_rbf(spec: &GeneratorSpec, model: &RbfModel, rng: &mut SeededRng) -> Result<Dataset> {
    if model.centers.is_empty() || (spec.n_irrelevant > 0 && model.noise_centers.is_empty()) {
        return Err(Error::InvalidConfig("RBF model has no centers".into()));
    }
    let width = spec.n_relevant + spec.n_irrelevant;
    let mut values = Vec::with_capacity(spec.n_instances * width);
    let mut classes = Vec::with_capacity(spec.n_instances);
    for _ in 0..spec.n_instances {
        let center = &model.centers[RbfModel::pick(&model.centers, rng)];
        values.extend(center.sample(rng).into_iter().map(Value::Num));
        if spec.n_irrelevant > 0 {
            let noise = &model.noise_centers[RbfModel::pick(&model.noise_centers, rng)];
            values.extend(noise.sample(rng).into_iter().map(Value::Num));
        }
        classes.push(center.class);
    }
    Dataset::from_flat(
        spec.feature_metas(FeatureMeta::numeric),
        values,
        classes,
        spec.n_classes,
    )
}

// Arithmetic problems -----------------------------------------------------

/// Value of a relevant NonMonotonic attribute for the 1-based instance
/// `index`.
pub fn non_monotonic_value(r_a: f64, r_i: f64, index: usize) -> f64 {
    if !index.is_multiple_of(2) {
        r_a * r_i
    } else {
        r_a * r_i.sqrt()
    }
}

/// Integer part of `r_i`, kept inside `0..n_relevant`.
pub fn non_monotonic_class(r_i: f64, n_relevant: usize) -> usize {
    (r_i.floor() as usize).min(n_relevant - 1)
}

pub fn gen_non_monotonic(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.check_kind(ProblemKind::NonMonotonic)?;
    let mut rng = seeded(spec.seed);
    let n = spec.n_relevant;
    let ponderators: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let width = n + spec.n_irrelevant;
    let mut values = Vec::with_capacity(spec.n_instances * width);
    let mut classes = Vec::with_capacity(spec.n_instances);
    for index in 1..=spec.n_instances {
        let r_i = rng.random::<f64>() * n as f64;
        values.extend(
            ponderators
                .iter()
                .map(|&r_a| Value::Num(non_monotonic_value(r_a, r_i, index))),
        );
        values.extend((0..spec.n_irrelevant).map(|_| Value::Num(rng.random())));
        classes.push(non_monotonic_class(r_i, n));
    }
    Dataset::from_flat(spec.feature_metas(FeatureMeta::numeric), values, classes, n)
}

/// 1 when strictly more than half of the bits are set.
pub fn majority_class(bits: &[u32]) -> usize {
    let ones = bits.iter().filter(|&&b| b == 1).count();
    (2 * ones > bits.len()) as usize
}

pub fn gen_majority(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.check_kind(ProblemKind::MajorityN)?;
    let mut rng = seeded(spec.seed);
    let width = spec.n_relevant + spec.n_irrelevant;
    let mut values = Vec::with_capacity(spec.n_instances * width);
    let mut classes = Vec::with_capacity(spec.n_instances);
    for _ in 0..spec.n_instances {
        let row: Vec<u32> = (0..width).map(|_| rng.random::<bool>() as u32).collect();
        classes.push(majority_class(&row[..spec.n_relevant]));
        values.extend(row.into_iter().map(Value::Cat));
    }
    Dataset::from_flat(
        spec.feature_metas(|name, rel| FeatureMeta::categoric(name, 2, rel)),
        values,
        classes,
        2,
    )
}

/// `(sum of values) mod p`.
pub fn modulo_class(values: &[u32], p: u32) -> usize {
    (values.iter().map(|&v| v as u64).sum::<u64>() % p as u64) as usize
}

pub fn gen_modulo_p(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.check_kind(ProblemKind::ModuloP)?;
    let mut rng = seeded(spec.seed);
    let width = spec.n_relevant + spec.n_irrelevant;
    let mut values = Vec::with_capacity(spec.n_instances * width);
    let mut classes = Vec::with_capacity(spec.n_instances);
    for _ in 0..spec.n_instances {
        let row: Vec<u32> = (0..width).map(|_| rng.random_range(0..spec.p)).collect();
        classes.push(modulo_class(&row[..spec.n_relevant], spec.p));
        values.extend(row.into_iter().map(Value::Cat));
    }
    Dataset::from_flat(
        spec.feature_metas(|name, rel| FeatureMeta::categoric(name, spec.p, rel)),
        values,
        classes,
        spec.p as usize,
    )
}
