//! Prediction-file ingestion and id-keyed joining.
//!
//! Files hold one `(instance id, value)` pair per row. `.csv` is
//! comma-separated, `.jsonl`/`.json`/`.ndjson` hold one object per line with
//! `id` (or `instance_id`) and `value` keys, and anything else is read as
//! tab-separated. A delimited file may start with a header row whose first
//! field is `id` or `instance_id`.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::metrics::{LabelValue, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Tsv,
    Csv,
    JsonLines,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => FileFormat::Csv,
            Some("jsonl" | "json" | "ndjson") => FileFormat::JsonLines,
            _ => FileFormat::Tsv,
        }
    }
}

/// Raw cell as it appeared in the file. JSON distinguishes numbers from
/// strings; delimited text does not.
#[derive(Debug, Clone, PartialEq)]
enum RawValue {
    Text(String),
    Number(f64),
}

#[derive(Debug, Clone)]
pub struct PredictionFile {
    pub path: PathBuf,
    pub format: FileFormat,
    rows: Vec<(String, RawValue)>,
}

impl PredictionFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let format = FileFormat::from_path(path);
        let rows = match format {
            FileFormat::Tsv => parse_delimited(&text, b'\t', path)?,
            FileFormat::Csv => parse_delimited(&text, b',', path)?,
            FileFormat::JsonLines => parse_json_lines(&text, path)?,
        };
        let mut seen = HashSet::with_capacity(rows.len());
        for (id, _) in &rows {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId {
                    id: id.clone(),
                    source_name: path.display().to_string(),
                });
            }
        }
        Ok(PredictionFile {
            path: path.to_owned(),
            format,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(id, _)| id.as_str())
    }
}

fn parse_delimited(text: &str, delimiter: u8, path: &Path) -> Result<Vec<(String, RawValue)>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Type(format!(
                "{} line {}: expected 2 fields (id, value), found {}",
                path.display(),
                line + 1,
                record.len()
            )));
        }
        if rows.is_empty() && line == 0 && matches!(&record[0], "id" | "instance_id") {
            continue;
        }
        rows.push((record[0].to_owned(), RawValue::Text(record[1].to_owned())));
    }
    Ok(rows)
}

fn parse_json_lines(text: &str, path: &Path) -> Result<Vec<(String, RawValue)>> {
    let type_err = |line: usize, msg: &str| Error::Type(format!("{} line {}: {msg}", path.display(), line + 1));
    let mut rows = Vec::new();
    for (line, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let obj: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(raw).map_err(|e| type_err(line, &format!("invalid JSON object ({e})")))?;
        let id = match obj.get("id").or_else(|| obj.get("instance_id")) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => return Err(type_err(line, "missing string or integer \"id\"")),
        };
        let value = match obj.get("value") {
            Some(serde_json::Value::String(s)) => RawValue::Text(s.clone()),
            Some(serde_json::Value::Number(n)) => {
                RawValue::Number(n.as_f64().ok_or_else(|| type_err(line, "numeric value out of range"))?)
            }
            _ => return Err(type_err(line, "\"value\" must be a string or number")),
        };
        rows.push((id, value));
    }
    Ok(rows)
}

fn convert(raw: &RawValue, kind: ValueKind, id: &str, path: &Path) -> Result<LabelValue> {
    match (kind, raw) {
        (ValueKind::Categorical, RawValue::Text(s)) => Ok(LabelValue::Label(s.clone())),
        (ValueKind::Categorical, RawValue::Number(x)) => Ok(LabelValue::Label(x.to_string())),
        (ValueKind::Real, RawValue::Number(x)) => Ok(LabelValue::Real(*x)),
        (ValueKind::Real, RawValue::Text(s)) => s.parse::<f64>().map(LabelValue::Real).map_err(|_| {
            Error::Type(format!(
                "{}: value {s:?} for id {id:?} is not a real number",
                path.display()
            ))
        }),
    }
}

/// JSON files must not mix string and numeric values, within a file or
/// across the files of one evaluation set.
fn check_value_types(files: &[&PredictionFile]) -> Result<()> {
    let mut first: Option<(bool, &Path)> = None;
    for file in files.iter().filter(|f| f.format == FileFormat::JsonLines) {
        for (id, raw) in &file.rows {
            let numeric = matches!(raw, RawValue::Number(_));
            match first {
                None => first = Some((numeric, &file.path)),
                Some((expected, origin)) if expected != numeric => {
                    let name = |n: bool| if n { "numeric" } else { "string" };
                    return Err(Error::Type(format!(
                        "{}: id {id:?} has a {} value but {} holds {} values",
                        file.path.display(),
                        name(numeric),
                        origin.display(),
                        name(expected)
                    )));
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Joins gold and system files on instance id. Every system must cover every
/// gold id exactly once and no other ids. Instances are ordered by id, so the
/// set (and every result computed from it) does not depend on row order.
pub fn load_evaluation(gold: &Path, systems: &[(String, PathBuf)], kind: ValueKind) -> Result<PairedEvaluationSet> {
    let gold_file = PredictionFile::read(gold)?;
    if gold_file.is_empty() {
        return Err(Error::Alignment(format!("{} holds no instances", gold.display())));
    }
    let sys_files = systems
        .iter()
        .map(|(name, path)| Ok((name.clone(), PredictionFile::read(path)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<&PredictionFile> = vec![&gold_file];
    all.extend(sys_files.iter().map(|(_, f)| f));
    check_value_types(&all)?;

    let mut order: Vec<usize> = (0..gold_file.len()).collect();
    order.sort_by(|&i, &j| gold_file.rows[i].0.cmp(&gold_file.rows[j].0));
    let ids: Vec<String> = order.iter().map(|&i| gold_file.rows[i].0.clone()).collect();
    let gold_values = order
        .iter()
        .map(|&i| {
            let (id, raw) = &gold_file.rows[i];
            convert(raw, kind, id, gold)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = Vec::with_capacity(sys_files.len());
    for (name, file) in &sys_files {
        let by_id: HashMap<&str, &RawValue> = file.rows.iter().map(|(id, v)| (id.as_str(), v)).collect();
        let values = ids
            .iter()
            .map(|id| {
                let raw = by_id.get(id.as_str()).ok_or_else(|| {
                    Error::Alignment(format!(
                        "id {id:?} from {} is missing in {} (system {name:?})",
                        gold.display(),
                        file.path.display()
                    ))
                })?;
                convert(raw, kind, id, &file.path)
            })
            .collect::<Result<Vec<_>>>()?;
        if file.len() != ids.len() {
            let gold_ids: HashSet<&str> = gold_file.ids().collect();
            let extra = file.ids().find(|id| !gold_ids.contains(id)).unwrap_or_default();
            return Err(Error::Alignment(format!(
                "id {extra:?} in {} (system {name:?}) does not occur in {}",
                file.path.display(),
                gold.display()
            )));
        }
        columns.push((name.clone(), values));
    }
    PairedEvaluationSet::new(ids, gold_values, columns)
}
