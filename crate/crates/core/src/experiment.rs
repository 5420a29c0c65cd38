//! Full blocking design over problems, attribute counts and data
//! replications, scored by separability.
//!
//! For every problem, `n_relevant` in `1..=max_relevant`, `n_irrelevant` in
//! `1..=irr_multiplier * n_relevant` and `iteration` in `1..=iterations`, one
//! dataset is generated and weighed by ReliefF, dReliefF and pdReliefF. Per
//! problem that is `3 * iterations * sum_{n=1..N} (irr_multiplier * n)`
//! runs; the default design gives 76,500.
//!
//! A cell's dataset seed is
//! `derive_seed(base_seed, [problem code, n_relevant, n_irrelevant, iteration])`
//! (see [`crate::rng::derive_seed`]); the same value seeds the three
//! algorithms, so they visit instances in the same order.
//!
//! A cell whose dataset ends up with a single populated class cannot be
//! weighed; its records carry no weights and a NaN separability, and the
//! plotting reductions skip them.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorSpec, ProblemKind, DEFAULT_INSTANCES};
use crate::relief::{weigh, Progression, ReliefConfig, Variant, WeightVector, DEFAULT_K};
use crate::rng::derive_seed;

pub const RECORD_HEADER: [&str; 9] = [
    "problem",
    "algorithm",
    "n_relevant",
    "n_irrelevant",
    "iteration",
    "seed",
    "separability",
    "walltime_ms",
    "weights",
];

/// Cells processed concurrently before their records are handed to the sink.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub problems: Vec<ProblemKind>,
    pub max_relevant: usize,
    pub irr_multiplier: usize,
    pub iterations: usize,
    pub n_instances: usize,
    pub k: usize,
    pub progression: Progression,
    pub base_seed: u64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            problems: ProblemKind::ALL.to_vec(),
            max_relevant: 50,
            irr_multiplier: 2,
            iterations: 10,
            n_instances: DEFAULT_INSTANCES,
            k: DEFAULT_K,
            progression: Progression::default(),
            base_seed: 0,
        }
    }
}

impl DesignConfig {
    /// Reduced design: up to 10 relevant attributes, 3 replications.
    pub fn smoke() -> Self {
        DesignConfig {
            max_relevant: 10,
            iterations: 3,
            ..DesignConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_relevant == 0 || self.iterations == 0 || self.irr_multiplier == 0 {
            return Err(Error::InvalidConfig(
                "max_relevant, irr_multiplier and iterations must be >= 1".into(),
            ));
        }
        if self.problems.is_empty() {
            return Err(Error::InvalidConfig("no problems selected".into()));
        }
        if self.n_instances < 2 || self.k == 0 {
            return Err(Error::InvalidConfig(
                "design needs >= 2 instances and k >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Cells in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.problems.iter().flat_map(move |&problem| {
            (1..=self.max_relevant).flat_map(move |n_relevant| {
                (1..=self.irr_multiplier * n_relevant).flat_map(move |n_irrelevant| {
                    (1..=self.iterations).map(move |iteration| Cell {
                        problem,
                        n_relevant,
                        n_irrelevant,
                        iteration,
                    })
                })
            })
        })
    }

    /// Records produced per problem.
    pub fn runs_per_problem(&self) -> usize {
        let n = self.max_relevant;
        Variant::COMPARED.len() * self.iterations * self.irr_multiplier * n * (n + 1) / 2
    }

    pub fn seed_of(&self, cell: &Cell) -> u64 {
        derive_seed(
            self.base_seed,
            &[
                cell.problem.code(),
                cell.n_relevant as u64,
                cell.n_irrelevant as u64,
                cell.iteration as u64,
            ],
        )
    }

    pub fn spec_of(&self, cell: &Cell) -> GeneratorSpec {
        GeneratorSpec::new(cell.problem, cell.n_relevant, cell.n_irrelevant)
            .with_instances(self.n_instances)
            .with_seed(self.seed_of(cell))
    }

    pub fn dataset_of(&self, cell: &Cell) -> Result<Dataset> {
        generate(&self.spec_of(cell))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub problem: ProblemKind,
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub problem: ProblemKind,
    pub algorithm: Variant,
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    pub iteration: usize,
    pub seed: u64,
    pub separability: f64,
    pub wall_time_ms: f64,
    pub weights: WeightVector,
}

impl ExperimentRecord {
    pub fn total_attributes(&self) -> usize {
        self.n_relevant + self.n_irrelevant
    }

    /// Equality on everything except wall time. NaN separabilities compare
    /// equal to each other.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.problem == other.problem
            && self.algorithm == other.algorithm
            && self.n_relevant == other.n_relevant
            && self.n_irrelevant == other.n_irrelevant
            && self.iteration == other.iteration
            && self.seed == other.seed
            && self.separability.to_bits() == other.separability.to_bits()
            && self.weights == other.weights
    }
}

/// Max relevant weight minus max irrelevant weight.
pub fn separability(weights: &[f64], relevant: &[bool]) -> Result<f64> {
    if weights.len() != relevant.len() {
        return Err(Error::LengthMismatch {
            expected: relevant.len(),
            found: weights.len(),
        });
    }
    let max_of = |want: bool| {
        weights
            .iter()
            .zip(relevant)
            .filter(|(_, &r)| r == want)
            .map(|(&w, _)| w)
            .fold(None, |acc: Option<f64>, w| Some(acc.map_or(w, |a| a.max(w))))
    };
    match (max_of(true), max_of(false)) {
        (Some(r), Some(i)) => Ok(r - i),
        (None, _) => Err(Error::EmptyInput("no relevant features")),
        (_, None) => Err(Error::EmptyInput("no irrelevant features")),
    }
}

/// Averages points sharing an x, in ascending x. NaN values are ignored; an
/// x with no finite value is dropped.
pub fn average_by_x(points: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for &(x, s) in points {
        if s.is_finite() {
            let e = acc.entry(x).or_insert((0.0, 0));
            e.0 += s;
            e.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(x, (sum, n))| (x, sum / n as f64))
        .collect()
}

/// Running sum of the per-x averaged separabilities.
pub fn accumulate_separability(points: &[(usize, f64)]) -> Result<Vec<(usize, f64)>> {
    let averaged = average_by_x(points);
    if averaged.is_empty() {
        return Err(Error::EmptyInput("no separability values to accumulate"));
    }
    let mut total = 0.0;
    Ok(averaged
        .into_iter()
        .map(|(x, s)| {
            total += s;
            (x, total)
        })
        .collect())
}

fn run_cell(config: &DesignConfig, cell: &Cell) -> Result<Vec<ExperimentRecord>> {
    let seed = config.seed_of(cell);
    let ds = config.dataset_of(cell)?;
    let relevant = ds.relevant_flags();
    let weighable = ds.present_classes() >= 2;
    Variant::COMPARED
        .iter()
        .map(|&algorithm| {
            let started = Instant::now();
            let (weights, sep) = if weighable {
                let cfg = ReliefConfig::new(algorithm)
                    .with_k(config.k)
                    .with_seed(seed)
                    .with_progression(config.progression);
                let w = weigh(&ds, &cfg)?;
                let s = separability(w.as_slice(), &relevant)?;
                (w, s)
            } else {
                (WeightVector(Vec::new()), f64::NAN)
            };
            Ok(ExperimentRecord {
                problem: cell.problem,
                algorithm,
                n_relevant: cell.n_relevant,
                n_irrelevant: cell.n_irrelevant,
                iteration: cell.iteration,
                seed,
                separability: sep,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
                weights: WeightVector(w_round(weights.into_inner())),
            })
        })
        .collect()
}

fn w_round(w: Vec<f64>) -> Vec<f64> {
    w.into_iter().map(round_significant).collect()
}

/// Rounds to the 9 significant digits kept in record files.
pub fn round_significant(x: f64) -> f64 {
    format_weight(x).parse().expect("formatted weight parses")
}

fn format_weight(x: f64) -> String {
    format!("{x:.8e}")
}

/// Runs the design, handing records to `sink` in canonical order. Cells
/// run on a pool of `threads` workers (`0` picks the rayon default).
pub fn run_design_with(
    config: &DesignConfig,
    threads: usize,
    mut sink: impl FnMut(ExperimentRecord) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let cells: Vec<Cell> = config.cells().collect();
    for chunk in cells.chunks(CHUNK) {
        let results: Vec<Result<Vec<ExperimentRecord>>> =
            pool.install(|| chunk.par_iter().map(|c| run_cell(config, c)).collect());
        for records in results {
            for r in records? {
                sink(r)?;
            }
        }
    }
    Ok(())
}

pub fn run_design(config: &DesignConfig, threads: usize) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::with_capacity(config.problems.len() * config.runs_per_problem());
    run_design_with(config, threads, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

// Record files ------------------------------------------------------------

fn record_fields(r: &ExperimentRecord, timing: bool) -> [String; 9] {
    [
        r.problem.name().to_string(),
        r.algorithm.name().to_string(),
        r.n_relevant.to_string(),
        r.n_irrelevant.to_string(),
        r.iteration.to_string(),
        r.seed.to_string(),
        r.separability.to_string(),
        if timing { r.wall_time_ms.to_string() } else { "0".into() },
        r.weights
            .as_slice()
            .iter()
            .map(|&w| format_weight(w))
            .collect::<Vec<_>>()
            .join(";"),
    ]
}

/// Streaming record writer. With `timing` off, wall times are written as 0
/// so that reruns produce byte-identical files.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
    timing: bool,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, write_header: bool, timing: bool) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().from_writer(out);
        if write_header {
            inner.write_record(RECORD_HEADER)?;
        }
        Ok(RecordWriter { inner, timing })
    }

    pub fn write(&mut self, r: &ExperimentRecord) -> Result<()> {
        self.inner.write_record(record_fields(r, self.timing))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner
            .flush()
            .map_err(|e| Error::io("<record writer>", e))
    }
}

pub fn render_records(records: &[ExperimentRecord], timing: bool) -> Result<String> {
    let mut w = RecordWriter::new(Vec::new(), true, timing)?;
    for r in records {
        w.write(r)?;
    }
    let bytes = w
        .inner
        .into_inner()
        .map_err(|e| Error::Malformed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("records are utf-8"))
}

pub fn write_records(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    fs::write(path, render_records(records, true)?).map_err(|e| Error::io(path, e))
}

/// Appends to `path`, writing the header only when the file is new or empty.
pub fn append_records(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = RecordWriter::new(file, fresh, true)?;
    for r in records {
        w.write(r)?;
    }
    w.flush()
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text)
}

pub fn parse_records(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(RECORD_HEADER.iter().copied()) {
        return Err(Error::Schema(format!(
            "records header {:?} does not match {RECORD_HEADER:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    reader
        .records()
        .enumerate()
        .map(|(row, rec)| parse_record(&rec?, row))
        .collect()
}

fn parse_record(rec: &csv::StringRecord, row: usize) -> Result<ExperimentRecord> {
    if rec.len() != RECORD_HEADER.len() {
        return Err(Error::Malformed(format!(
            "record {row} has {} fields, expected {}",
            rec.len(),
            RECORD_HEADER.len()
        )));
    }
    let bad = |col: usize| {
        Error::Malformed(format!(
            "record {row}: bad {} '{}'",
            RECORD_HEADER[col], &rec[col]
        ))
    };
    let int = |col: usize| rec[col].parse::<usize>().map_err(|_| bad(col));
    let real = |col: usize| rec[col].parse::<f64>().map_err(|_| bad(col));
    let weights = if rec[8].is_empty() {
        Vec::new()
    } else {
        rec[8]
            .split(';')
            .map(|w| w.parse::<f64>().map_err(|_| bad(8)))
            .collect::<Result<Vec<_>>>()?
    };
    let separability = real(6)?;
    if !(separability.is_nan() || (-2.0..=2.0).contains(&separability)) {
        return Err(bad(6));
    }
    Ok(ExperimentRecord {
        problem: rec[0].parse().map_err(|_| bad(0))?,
        algorithm: rec[1].parse().map_err(|_| bad(1))?,
        n_relevant: int(2)?,
        n_irrelevant: int(3)?,
        iteration: int(4)?,
        seed: rec[5].parse().map_err(|_| bad(5))?,
        separability,
        wall_time_ms: real(7)?,
        weights: WeightVector(weights),
    })
}

// Manifest ----------------------------------------------------------------

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    pub config: DesignConfig,
    pub records: String,
    pub record_count: usize,
    /// How same-x cells are reduced before plotting.
    pub aggregation: String,
}

impl Manifest {
    pub fn new(config: DesignConfig, records: &str, record_count: usize) -> Self {
        Manifest {
            version: ARTIFACT_VERSION.to_string(),
            config,
            records: records.to_string(),
            record_count,
            aggregation: "mean separability per (problem, algorithm, total attributes); \
                          NaN cells skipped"
                .to_string(),
        }
    }
}

pub fn parse_manifest(json: &str) -> Result<Manifest> {
    let m: Manifest = serde_json::from_str(json)?;
    if m.version != ARTIFACT_VERSION {
        return Err(Error::Schema(format!(
            "manifest version {} does not match {ARTIFACT_VERSION}",
            m.version
        )));
    }
    Ok(m)
}

pub fn write_manifest(m: &Manifest, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(m)?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text)
}
