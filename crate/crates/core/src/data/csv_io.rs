//! CSV ingestion and export.
//!
//! Dialect: comma separated, UTF-8, one header row, `.` decimal point,
//! standard double-quote escaping. Rows with an empty cell are rejected.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::data::dataset::Dataset;
use crate::data::schema::{Feature, FeatureKind, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindOverride {
    Numeric,
    Categorical,
}

struct RawTable {
    header: Vec<String>,
    /// (file line, cells)
    records: Vec<(usize, Vec<String>)>,
}

fn read_raw(path: &Path) -> Result<RawTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Data(format!("{}: missing header row", path.display())));
    }
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let cells: Vec<String> = rec.iter().map(|c| c.trim().to_string()).collect();
        if let Some(col) = cells.iter().position(String::is_empty) {
            return Err(Error::DataLine {
                line,
                message: format!("empty cell in column `{}`", header[col]),
            });
        }
        records.push((line, cells));
    }
    Ok(RawTable { header, records })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    match line {
        Some(line) => Error::DataLine {
            line,
            message: format!("{}: {e}", path.display()),
        },
        None => Error::Data(format!("{}: {e}", path.display())),
    }
}

fn parse_real(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads a CSV, inferring feature kinds. A column is numeric when every cell
/// parses as a finite real, categorical otherwise; `kind_overrides` wins.
/// Categorical codes and class labels follow first-appearance order.
pub fn load_csv(
    path: impl AsRef<Path>,
    target: &str,
    kind_overrides: &BTreeMap<String, KindOverride>,
) -> Result<Dataset> {
    let path = path.as_ref();
    let raw = read_raw(path)?;
    let target_col = raw
        .header
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::Config(format!("target column `{target}` not found in {}", path.display())))?;
    for name in kind_overrides.keys() {
        if name == target || !raw.header.contains(name) {
            return Err(Error::Config(format!(
                "kind override names unknown feature column `{name}`"
            )));
        }
    }

    let feature_cols: Vec<usize> = (0..raw.header.len()).filter(|&c| c != target_col).collect();
    let mut features = Vec::with_capacity(feature_cols.len());
    let mut encoders: Vec<Option<HashMap<String, usize>>> = Vec::with_capacity(feature_cols.len());
    for &c in &feature_cols {
        let name = raw.header[c].clone();
        let all_numeric = raw.records.iter().all(|(_, r)| parse_real(&r[c]).is_some());
        let kind = match kind_overrides.get(&name) {
            Some(KindOverride::Numeric) => KindOverride::Numeric,
            Some(KindOverride::Categorical) => KindOverride::Categorical,
            None if all_numeric => KindOverride::Numeric,
            None => KindOverride::Categorical,
        };
        match kind {
            KindOverride::Numeric => {
                features.push(Feature::numeric(name));
                encoders.push(None);
            }
            KindOverride::Categorical => {
                let mut levels = Vec::new();
                let mut codes = HashMap::new();
                for (_, r) in &raw.records {
                    if !codes.contains_key(&r[c]) {
                        codes.insert(r[c].clone(), levels.len());
                        levels.push(r[c].clone());
                    }
                }
                if levels.is_empty() {
                    levels.push(String::new());
                }
                features.push(Feature::categorical(name, levels));
                encoders.push(Some(codes));
            }
        }
    }

    let mut class_labels: Vec<String> = Vec::new();
    for (_, r) in &raw.records {
        if !class_labels.contains(&r[target_col]) {
            class_labels.push(r[target_col].clone());
        }
    }
    if class_labels.len() < 2 {
        return Err(Error::Data(format!(
            "target `{target}` has {} distinct value(s); at least 2 are required",
            class_labels.len()
        )));
    }
    let schema = Schema::new(features, target, class_labels)?;
    encode(&raw, &schema, target_col, &feature_cols, |j, cell| {
        encoders[j].as_ref().map(|m| m.get(cell).copied())
    })
}

/// Loads a CSV against an existing schema (for example a persisted model's),
/// so categorical codes and class indices match the schema's tables.
pub fn load_csv_with_schema(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let raw = read_raw(path)?;
    let find = |name: &str| {
        raw.header.iter().position(|h| h == name).ok_or_else(|| {
            Error::Data(format!("column `{name}` not found in {}", path.display()))
        })
    };
    let target_col = find(schema.target())?;
    let feature_cols = schema
        .features()
        .iter()
        .map(|f| find(&f.name))
        .collect::<Result<Vec<_>>>()?;
    let encoders: Vec<Option<HashMap<&str, usize>>> = schema
        .features()
        .iter()
        .map(|f| match &f.kind {
            FeatureKind::Numeric => None,
            FeatureKind::Categorical { levels } => Some(
                levels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.as_str(), i))
                    .collect(),
            ),
        })
        .collect();
    encode(&raw, schema, target_col, &feature_cols, |j, cell| {
        encoders[j].as_ref().map(|m| m.get(cell).copied())
    })
}

/// `lookup(j, cell)` returns `None` for numeric features, `Some(None)` for an
/// unknown categorical level, `Some(Some(code))` otherwise.
fn encode<F>(
    raw: &RawTable,
    schema: &Schema,
    target_col: usize,
    feature_cols: &[usize],
    lookup: F,
) -> Result<Dataset>
where
    F: Fn(usize, &str) -> Option<Option<usize>>,
{
    let class_index: HashMap<&str, usize> = schema
        .class_labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let d = feature_cols.len();
    let mut values = Vec::with_capacity(raw.records.len() * d);
    let mut labels = Vec::with_capacity(raw.records.len());
    for (line, r) in &raw.records {
        for (j, &c) in feature_cols.iter().enumerate() {
            let cell = &r[c];
            let v = match lookup(j, cell) {
                None => parse_real(cell).ok_or_else(|| Error::DataLine {
                    line: *line,
                    message: format!(
                        "value `{cell}` in numeric column `{}` is not a finite real",
                        raw.header[c]
                    ),
                })?,
                Some(Some(code)) => code as f64,
                Some(None) => {
                    return Err(Error::DataLine {
                        line: *line,
                        message: format!("unknown level `{cell}` in column `{}`", raw.header[c]),
                    })
                }
            };
            values.push(v);
        }
        let label = class_index
            .get(r[target_col].as_str())
            .copied()
            .ok_or_else(|| Error::DataLine {
                line: *line,
                message: format!("unknown class label `{}`", r[target_col]),
            })?;
        labels.push(label);
    }
    Dataset::from_flat(schema.clone(), values, labels)
}

/// Writes the dataset in the same dialect `load_csv` reads.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_csv_to(data, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn write_csv_to<W: std::io::Write>(data: &Dataset, out: W) -> Result<()> {
    let schema = data.schema();
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Data(format!("csv write failed: {e}"));
    let mut header: Vec<&str> = schema.feature_names();
    header.push(schema.target());
    w.write_record(&header).map_err(to_err)?;
    let mut cells = Vec::with_capacity(header.len());
    for (i, row) in data.rows().enumerate() {
        cells.clear();
        for (f, &v) in schema.features().iter().zip(row) {
            cells.push(match &f.kind {
                FeatureKind::Numeric => format!("{v}"),
                FeatureKind::Categorical { levels } => levels[v as usize].clone(),
            });
        }
        cells.push(schema.class_labels()[data.label(i)].clone());
        w.write_record(&cells).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Data(format!("csv write failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn infers_kinds_and_first_appearance_codes() {
        let f = write_tmp("age,gender,divorced\n31,female,no\n45,male,yes\n28,female,no\n");
        let ds = load_csv(f.path(), "divorced", &BTreeMap::new()).unwrap();
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.n_rows(), 3);
        let s = ds.schema();
        assert_eq!(s.feature(0).kind, FeatureKind::Numeric);
        assert_eq!(
            s.feature(1).kind,
            FeatureKind::Categorical {
                levels: vec!["female".into(), "male".into()]
            }
        );
        assert_eq!(ds.row(0), &[31.0, 0.0]);
        assert_eq!(ds.row(1), &[45.0, 1.0]);
        assert_eq!(s.class_labels(), &["no".to_string(), "yes".to_string()]);
        assert_eq!(ds.labels(), &[0, 1, 0]);
    }

    #[test]
    fn categorical_override_on_digit_column() {
        let mut text = String::from("generation,y\n");
        for g in 1..=11 {
            text.push_str(&format!("{g},{}\n", if g % 2 == 0 { "a" } else { "b" }));
        }
        let f = write_tmp(&text);
        let mut ov = BTreeMap::new();
        ov.insert("generation".to_string(), KindOverride::Categorical);
        let ds = load_csv(f.path(), "y", &ov).unwrap();
        assert_eq!(ds.schema().feature(0).n_levels(), Some(11));
        let plain = load_csv(f.path(), "y", &BTreeMap::new()).unwrap();
        assert_eq!(plain.schema().feature(0).kind, FeatureKind::Numeric);
    }

    #[test]
    fn empty_cell_reports_line() {
        let f = write_tmp("a,b,y\n1,x,p\n2,x,q\n3,x,p\n4,x,q\n5,y,p\n6,,q\n");
        match load_csv(f.path(), "y", &BTreeMap::new()) {
            Err(Error::DataLine { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected line error, got {other:?}"),
        }
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "y", &BTreeMap::new()),
            Err(Error::Io { .. })
        ));
        let f = write_tmp("a,y\n1,p\n2,p\n");
        assert!(matches!(
            load_csv(f.path(), "missing", &BTreeMap::new()),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            load_csv(f.path(), "y", &BTreeMap::new()),
            Err(Error::Data(_))
        ));
        let mut ov = BTreeMap::new();
        ov.insert("a".to_string(), KindOverride::Numeric);
        let g = write_tmp("a,y\n1,p\nx,q\n");
        assert!(matches!(
            load_csv(g.path(), "y", &ov),
            Err(Error::DataLine { line: 3, .. })
        ));
    }

    #[test]
    fn write_then_load_with_schema_round_trips() {
        let f = write_tmp("age,gender,y\n31.25,\"f, x\",no\n45,male,yes\n28,\"f, x\",no\n");
        let ds = load_csv(f.path(), "y", &BTreeMap::new()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&ds, out.path()).unwrap();
        let back = load_csv_with_schema(out.path(), ds.schema()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn schema_load_rejects_unknown_level() {
        let f = write_tmp("g,y\na,p\nb,q\n");
        let ds = load_csv(f.path(), "y", &BTreeMap::new()).unwrap();
        let g = write_tmp("g,y\na,p\nc,q\n");
        assert!(matches!(
            load_csv_with_schema(g.path(), ds.schema()),
            Err(Error::DataLine { line: 3, .. })
        ));
    }
}
