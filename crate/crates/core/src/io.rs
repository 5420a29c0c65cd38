//! Dataset files: a CSV table with header `f0,f1,...,class` plus a JSON
//! sidecar `<name>.meta.json` describing the features.
//!
//! ```json
//! {"features":[{"name":"f0","kind":"numeric","relevant":true},
//!              {"name":"f1","kind":"categoric","domainSize":3,"relevant":false}],
//!  "classes":2}
//! ```
//!
//! Missing values are empty CSV fields.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureKind, FeatureMeta, Value};
use crate::error::{Error, Result};

/// Largest accepted label-set or categoric domain size in a sidecar.
pub const MAX_SYMBOLS: usize = 4096;

const CLASS_COLUMN: &str = "class";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Numeric,
    Categoric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SidecarFeature {
    name: String,
    kind: KindTag,
    #[serde(rename = "domainSize", default, skip_serializing_if = "Option::is_none")]
    domain_size: Option<u64>,
    relevant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    features: Vec<SidecarFeature>,
    classes: u64,
}

/// Feature metadata and label-set size read from a sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub features: Vec<FeatureMeta>,
    pub n_classes: usize,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv_path.with_file_name(format!("{stem}.meta.json"))
}

pub fn parse_sidecar(json: &str) -> Result<Schema> {
    let sidecar: Sidecar = serde_json::from_str(json)?;
    let n_classes = usize::try_from(sidecar.classes).unwrap_or(usize::MAX);
    if n_classes == 0 || n_classes > MAX_SYMBOLS {
        return Err(Error::Schema(format!(
            "class count must lie in 1..={MAX_SYMBOLS}, got {}",
            sidecar.classes
        )));
    }
    let features = sidecar
        .features
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let kind = match (f.kind, f.domain_size) {
                (KindTag::Numeric, None) => FeatureKind::Numeric,
                (KindTag::Numeric, Some(_)) => {
                    return Err(Error::Schema(format!(
                        "numeric feature {i} must not carry a domainSize"
                    )))
                }
                (KindTag::Categoric, Some(d)) if (2..=MAX_SYMBOLS as u64).contains(&d) => {
                    FeatureKind::Categoric {
                        domain_size: d as u32,
                    }
                }
                (KindTag::Categoric, d) => {
                    return Err(Error::Schema(format!(
                        "categoric feature {i} needs a domainSize in 2..={MAX_SYMBOLS}, got {d:?}"
                    )))
                }
            };
            Ok(FeatureMeta {
                name: f.name,
                kind,
                relevant: f.relevant,
                observed_range: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Schema {
        features,
        n_classes,
    })
}

pub fn render_sidecar(ds: &Dataset) -> String {
    let sidecar = Sidecar {
        features: ds
            .features()
            .iter()
            .map(|f| SidecarFeature {
                name: f.name.clone(),
                kind: match f.kind {
                    FeatureKind::Numeric => KindTag::Numeric,
                    FeatureKind::Categoric { .. } => KindTag::Categoric,
                },
                domain_size: match f.kind {
                    FeatureKind::Numeric => None,
                    FeatureKind::Categoric { domain_size } => Some(domain_size as u64),
                },
                relevant: f.relevant,
            })
            .collect(),
        classes: ds.n_classes() as u64,
    };
    serde_json::to_string_pretty(&sidecar).expect("sidecar serializes")
}

fn parse_value(field: &str, kind: FeatureKind, row: usize, col: usize) -> Result<Value> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(Value::Missing);
    }
    let bad = || Error::Malformed(format!("row {row}, column {col}: cannot parse '{field}'"));
    match kind {
        FeatureKind::Numeric => {
            let x: f64 = field.parse().map_err(|_| bad())?;
            if x.is_finite() {
                Ok(Value::Num(x))
            } else {
                Err(bad())
            }
        }
        FeatureKind::Categoric { .. } => field.parse().map(Value::Cat).map_err(|_| bad()),
    }
}

/// Parses a dataset CSV against the schema in its sidecar.
pub fn parse_dataset(csv_text: &str, sidecar_json: &str) -> Result<Dataset> {
    let schema = parse_sidecar(sidecar_json)?;
    parse_dataset_with(csv_text, schema)
}

pub fn parse_dataset_with(csv_text: &str, schema: Schema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(csv_text.as_bytes());
    let header = reader.headers()?.clone();
    let expected: Vec<&str> = schema
        .features
        .iter()
        .map(|f| f.name.as_str())
        .chain(std::iter::once(CLASS_COLUMN))
        .collect();
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Schema(format!(
            "CSV header {:?} does not match sidecar columns {expected:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let width = schema.features.len();
    let mut values = Vec::new();
    let mut classes = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != width + 1 {
            return Err(Error::Malformed(format!(
                "row {row} has {} fields, expected {}",
                record.len(),
                width + 1
            )));
        }
        for (col, meta) in schema.features.iter().enumerate() {
            values.push(parse_value(&record[col], meta.kind, row, col)?);
        }
        let class: usize = record[width]
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("row {row}: bad class '{}'", &record[width])))?;
        classes.push(class);
    }
    Dataset::from_flat(schema.features, values, classes, schema.n_classes)
}

pub fn render_csv(ds: &Dataset) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = ds.features().iter().map(|f| f.name.as_str()).collect();
    header.push(CLASS_COLUMN);
    writer.write_record(&header)?;
    for i in 0..ds.n_instances() {
        let mut fields: Vec<String> = ds
            .row(i)
            .iter()
            .map(|v| match v {
                Value::Num(x) => x.to_string(),
                Value::Cat(c) => c.to_string(),
                Value::Missing => String::new(),
            })
            .collect();
        fields.push(ds.class_of(i).to_string());
        writer.write_record(&fields)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Malformed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `csv_path` and its sidecar next to it.
pub fn write_dataset(ds: &Dataset, csv_path: &Path) -> Result<()> {
    fs::write(csv_path, render_csv(ds)?).map_err(|e| Error::io(csv_path, e))?;
    let side = sidecar_path(csv_path);
    fs::write(&side, render_sidecar(ds)).map_err(|e| Error::io(side, e))
}

pub fn read_dataset(csv_path: &Path) -> Result<Dataset> {
    let csv_text = fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let side = sidecar_path(csv_path);
    let json = fs::read_to_string(&side).map_err(|e| Error::io(side, e))?;
    parse_dataset(&csv_text, &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIDECAR: &str = r#"{"features":[
        {"name":"f0","kind":"numeric","relevant":true},
        {"name":"f1","kind":"categoric","domainSize":3,"relevant":false}],
        "classes":2}"#;

    #[test]
    fn parses_values_and_missing() {
        let ds = parse_dataset("f0,f1,class\n0.5,2,1\n0.25,,0\n", SIDECAR).unwrap();
        assert_eq!(ds.n_instances(), 2);
        assert_eq!(ds.value(0, 0), Value::Num(0.5));
        assert_eq!(ds.value(0, 1), Value::Cat(2));
        assert_eq!(ds.value(1, 1), Value::Missing);
        assert_eq!(ds.classes(), &[1, 0]);
        assert!(ds.feature(0).relevant);
        assert!(!ds.feature(1).relevant);
    }

    #[test]
    fn round_trip() {
        let ds = parse_dataset("f0,f1,class\n0.1,2,1\n0.30000000000000004,,0\n", SIDECAR).unwrap();
        let again = parse_dataset(&render_csv(&ds).unwrap(), &render_sidecar(&ds)).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("f0,f1\n0.1,1\n", SIDECAR),
            ("f0,f1,class\n0.1,1\n", SIDECAR),
            ("f0,f1,class\nabc,1,0\n", SIDECAR),
            ("f0,f1,class\n0.1,3,0\n", SIDECAR),
            ("f0,f1,class\n0.1,1,2\n", SIDECAR),
            ("f0,f1,class\n0.1,1,-1\n", SIDECAR),
            ("f0,f1,class\ninf,1,0\n", SIDECAR),
            ("f0,f1,class\n", SIDECAR),
            ("f0,class\n0.1,0\n", r#"{"features":[{"name":"f0","kind":"numeric","relevant":true}],"classes":0}"#),
            ("f0,class\n1,0\n", r#"{"features":[{"name":"f0","kind":"categoric","relevant":true}],"classes":2}"#),
            ("f0,class\n1,0\n", r#"{"features":[{"name":"f0","kind":"categoric","domainSize":99999,"relevant":true}],"classes":2}"#),
            ("f0,class\n1,0\n", r#"{"features":[{"name":"f0","kind":"numeric","domainSize":2,"relevant":true}],"classes":2}"#),
            ("f0,class\n1,0\n", r#"{"features":[],"classes":2,"extra":1}"#),
            ("f0,class\n1,0\n", "not json"),
        ];
        for (csv_text, json) in cases {
            assert!(parse_dataset(csv_text, json).is_err(), "{csv_text:?} / {json}");
        }
    }

    #[test]
    fn sidecar_sits_next_to_csv() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/x/data.csv")),
            PathBuf::from("/tmp/x/data.meta.json")
        );
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let ds = parse_dataset("f0,f1,class\n0.1,2,1\n0.7,0,0\n", SIDECAR).unwrap();
        write_dataset(&ds, &path).unwrap();
        assert!(dir.path().join("d.meta.json").exists());
        assert_eq!(read_dataset(&path).unwrap(), ds);
        assert!(matches!(
            read_dataset(&dir.path().join("missing.csv")),
            Err(Error::Io { .. })
        ));
    }
}
