use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use tfclust_core::signals::{Dataset, FeatureMatrix, GroupPartition};

use crate::Failure;

/// Floats cross the filesystem as `{:.17e}` literals: 18 significant digits,
/// enough to reproduce every f64 bit-exactly on reload.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.17e}")
}

/// A JSON number node carrying the full-precision literal (the crate's
/// arbitrary-precision mode preserves it verbatim when writing).
pub fn jnum(v: f64) -> Value {
    serde_json::from_str(&fmt_f64(v)).expect("float literal is valid JSON")
}

pub fn jnum_vec(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| jnum(v)).collect())
}

pub fn jusize_vec(vs: &[usize]) -> Value {
    Value::Array(vs.iter().map(|&v| Value::from(v as u64)).collect())
}

fn runtime_at(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::runtime(format!("{}: {e}", path.display()))
}

pub fn write_string(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(runtime_at(path))
}

pub fn read_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(runtime_at(path))
}

pub fn write_json(path: &Path, doc: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_string(path, &text)
}

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = read_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{}: invalid JSON: {e}", path.display())))
}

// Typed field access with path context for every failure.

fn field<'a>(doc: &'a Value, key: &str, path: &Path) -> Result<&'a Value, Failure> {
    doc.get(key).ok_or_else(|| {
        Failure::validation(format!("{}: missing field \"{key}\"", path.display()))
    })
}

fn as_f64(v: &Value, key: &str, path: &Path) -> Result<f64, Failure> {
    v.as_f64().ok_or_else(|| {
        Failure::validation(format!("{}: field \"{key}\" is not a number", path.display()))
    })
}

fn as_usize(v: &Value, key: &str, path: &Path) -> Result<usize, Failure> {
    v.as_u64().map(|u| u as usize).ok_or_else(|| {
        Failure::validation(format!("{}: field \"{key}\" is not an integer", path.display()))
    })
}

fn get_f64(doc: &Value, key: &str, path: &Path) -> Result<f64, Failure> {
    as_f64(field(doc, key, path)?, key, path)
}

fn get_usize(doc: &Value, key: &str, path: &Path) -> Result<usize, Failure> {
    as_usize(field(doc, key, path)?, key, path)
}

fn get_bool(doc: &Value, key: &str, path: &Path) -> Result<bool, Failure> {
    field(doc, key, path)?.as_bool().ok_or_else(|| {
        Failure::validation(format!("{}: field \"{key}\" is not a boolean", path.display()))
    })
}

fn get_str(doc: &Value, key: &str, path: &Path) -> Result<String, Failure> {
    Ok(field(doc, key, path)?
        .as_str()
        .ok_or_else(|| {
            Failure::validation(format!("{}: field \"{key}\" is not a string", path.display()))
        })?
        .to_string())
}

fn get_f64_vec(doc: &Value, key: &str, path: &Path) -> Result<Vec<f64>, Failure> {
    field(doc, key, path)?
        .as_array()
        .ok_or_else(|| {
            Failure::validation(format!("{}: field \"{key}\" is not an array", path.display()))
        })?
        .iter()
        .map(|v| as_f64(v, key, path))
        .collect()
}

fn get_usize_vec(doc: &Value, key: &str, path: &Path) -> Result<Vec<usize>, Failure> {
    field(doc, key, path)?
        .as_array()
        .ok_or_else(|| {
            Failure::validation(format!("{}: field \"{key}\" is not an array", path.display()))
        })?
        .iter()
        .map(|v| as_usize(v, key, path))
        .collect()
}

fn check_schema(doc: &Value, kind: &str, path: &Path) -> Result<(), Failure> {
    let version = get_usize(doc, "schema_version", path)?;
    if version != 1 {
        return Err(Failure::validation(format!(
            "{}: unsupported schema_version {version}",
            path.display()
        )));
    }
    let found = get_str(doc, "kind", path)?;
    if found != kind {
        return Err(Failure::validation(format!(
            "{}: expected a {kind} document, found \"{found}\"",
            path.display()
        )));
    }
    Ok(())
}

/// Sidecar metadata for a signal CSV. Only `g` changes how the CSV is read
/// (G consecutive rows per instance); the rest is provenance echoed from
/// `simulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    pub g: usize,
    pub bench: Option<String>,
    pub sigma: Option<f64>,
    pub n_per_cluster: Option<usize>,
    pub seed: Option<u64>,
}

impl DatasetMeta {
    pub fn univariate() -> Self {
        DatasetMeta { g: 1, bench: None, sigma: None, n_per_cluster: None, seed: None }
    }
}

pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Reads a numeric CSV: UTF-8, comma-separated, optional single header row
/// (detected by a non-numeric field in the first row). Errors carry
/// 1-indexed row and column positions; non-finite values are rejected.
pub fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut header_cols: Option<usize> = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            Failure::validation(format!("{}: row {}: {e}", path.display(), i + 1))
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        let mut header = false;
        for (j, fieldtext) in record.iter().enumerate() {
            match fieldtext.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(_) => {
                    return Err(Failure::validation(format!(
                        "{}: row {}, column {}: non-finite value \"{fieldtext}\"",
                        path.display(),
                        i + 1,
                        j + 1
                    )))
                }
                Err(_) if rows.is_empty() && i == 0 => {
                    // Treat a non-numeric first row as the optional header.
                    header = true;
                    header_cols = Some(record.len());
                    break;
                }
                Err(_) => {
                    return Err(Failure::validation(format!(
                        "{}: row {}, column {}: not a number: \"{fieldtext}\"",
                        path.display(),
                        i + 1,
                        j + 1
                    )))
                }
            }
        }
        if header {
            continue;
        }
        let expected = rows.first().map(Vec::len).or(header_cols);
        if let Some(expected) = expected {
            if row.len() != expected {
                return Err(Failure::validation(format!(
                    "{}: row {} has {} columns, expected {}",
                    path.display(),
                    i + 1,
                    row.len(),
                    expected
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::validation(format!(
            "{}: no numeric rows",
            path.display()
        )));
    }
    Ok(rows)
}

/// Loads a dataset from a signal CSV plus its optional `.meta.json` sidecar.
/// Without a sidecar the layout is univariate (one row per instance); with
/// one, each instance is `g` consecutive rows.
pub fn load_dataset(path: &Path) -> Result<(Dataset, DatasetMeta), Failure> {
    let meta = match fs::metadata(meta_path(path)) {
        Ok(_) => read_dataset_meta(&meta_path(path))?,
        Err(_) => DatasetMeta::univariate(),
    };
    let rows = read_numeric_csv(path)?;
    if meta.g == 0 || rows.len() % meta.g != 0 {
        return Err(Failure::validation(format!(
            "{}: {} rows do not divide into blocks of g = {}",
            path.display(),
            rows.len(),
            meta.g
        )));
    }
    let t = rows[0].len();
    let instances: Vec<Vec<f64>> = rows
        .chunks(meta.g)
        .map(|block| block.concat())
        .collect();
    let dataset = Dataset::new(meta.g, t, instances, None)?;
    Ok((dataset, meta))
}

pub fn read_dataset_meta(path: &Path) -> Result<DatasetMeta, Failure> {
    let doc = read_json(path)?;
    check_schema(&doc, "dataset", path)?;
    Ok(DatasetMeta {
        g: get_usize(&doc, "g", path)?,
        bench: doc.get("bench").and_then(|v| v.as_str()).map(String::from),
        sigma: doc.get("sigma").and_then(|v| v.as_f64()),
        n_per_cluster: doc.get("n_per_cluster").and_then(|v| v.as_u64()).map(|v| v as usize),
        seed: doc.get("seed").and_then(|v| v.as_u64()),
    })
}

pub fn write_dataset_meta(path: &Path, dataset: &Dataset, meta: &DatasetMeta) -> Result<(), Failure> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), Value::from(1));
    doc.insert("kind".into(), Value::from("dataset"));
    doc.insert("g".into(), Value::from(meta.g as u64));
    doc.insert("t".into(), Value::from(dataset.t as u64));
    doc.insert("n".into(), Value::from(dataset.n() as u64));
    if let Some(ref bench) = meta.bench {
        doc.insert("bench".into(), Value::from(bench.as_str()));
    }
    if let Some(sigma) = meta.sigma {
        doc.insert("sigma".into(), jnum(sigma));
    }
    if let Some(npc) = meta.n_per_cluster {
        doc.insert("n_per_cluster".into(), Value::from(npc as u64));
    }
    if let Some(seed) = meta.seed {
        doc.insert("seed".into(), Value::from(seed));
    }
    write_json(path, &Value::Object(doc))
}

/// Writes a dataset as a signal CSV, one block of `g` rows per instance.
pub fn write_dataset_csv(path: &Path, dataset: &Dataset) -> Result<(), Failure> {
    let mut out = String::new();
    for instance in &dataset.instances {
        for row in instance.chunks(dataset.t) {
            let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
    }
    write_string(path, &out)
}

/// Labels come either from a single-column CSV or from the `labels` field of
/// a result document (by `.json` extension).
pub fn read_labels(path: &Path) -> Result<Vec<usize>, Failure> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let doc = read_json(path)?;
        return get_usize_vec(&doc, "labels", path);
    }
    let rows = read_numeric_csv(path)?;
    let mut labels = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 1 {
            return Err(Failure::validation(format!(
                "{}: row {} has {} columns, label files have exactly one",
                path.display(),
                i + 1,
                row.len()
            )));
        }
        let v = row[0];
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Failure::validation(format!(
                "{}: row {}: label {v} is not a nonnegative integer",
                path.display(),
                i + 1
            )));
        }
        labels.push(v as usize);
    }
    Ok(labels)
}

/// Refit labels, if the file is a result document that carries them.
pub fn read_refit_labels(path: &Path) -> Option<Vec<usize>> {
    if path.extension().and_then(|e| e.to_str()) != Some("json") {
        return None;
    }
    let doc = read_json(path).ok()?;
    if doc.get("kind")?.as_str()? != "result" {
        return None;
    }
    let refit = doc.get("refit")?;
    if refit.is_null() {
        return None;
    }
    get_usize_vec(refit, "labels", path).ok()
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<(), Failure> {
    let mut out = String::new();
    for &l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    write_string(path, &out)
}

/// A feature matrix on disk: the matrix itself, the source signal shape, and
/// the resolved transform config.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDoc {
    pub matrix: FeatureMatrix,
    pub g: usize,
    pub t: usize,
    pub config: Value,
}

pub fn write_feature_doc(path: &Path, doc: &FeatureDoc) -> Result<(), Failure> {
    let mut root = Map::new();
    root.insert("schema_version".into(), Value::from(1));
    root.insert("kind".into(), Value::from("features"));
    root.insert("transform_tag".into(), Value::from(doc.matrix.transform_tag.as_str()));
    root.insert("n".into(), Value::from(doc.matrix.n as u64));
    root.insert("p".into(), Value::from(doc.matrix.p as u64));
    root.insert("g".into(), Value::from(doc.g as u64));
    root.insert("t".into(), Value::from(doc.t as u64));
    root.insert("groups".into(), groups_to_json(doc.matrix.groups.as_ref()));
    root.insert("config".into(), doc.config.clone());
    let rows: Vec<Value> = (0..doc.matrix.n).map(|i| jnum_vec(doc.matrix.row(i))).collect();
    root.insert("values".into(), Value::Array(rows));
    write_json(path, &Value::Object(root))
}

pub fn read_feature_doc(path: &Path) -> Result<FeatureDoc, Failure> {
    let doc = read_json(path)?;
    check_schema(&doc, "features", path)?;
    let n = get_usize(&doc, "n", path)?;
    let p = get_usize(&doc, "p", path)?;
    let tag = get_str(&doc, "transform_tag", path)?;
    let groups = groups_from_json(field(&doc, "groups", path)?, path)?;
    let rows_json = field(&doc, "values", path)?
        .as_array()
        .ok_or_else(|| Failure::validation(format!("{}: \"values\" is not an array", path.display())))?;
    if rows_json.len() != n {
        return Err(Failure::validation(format!(
            "{}: {} value rows for n = {n}",
            path.display(),
            rows_json.len()
        )));
    }
    let mut values = Vec::with_capacity(n * p);
    for row in rows_json {
        let row = row.as_array().ok_or_else(|| {
            Failure::validation(format!("{}: value row is not an array", path.display()))
        })?;
        if row.len() != p {
            return Err(Failure::validation(format!(
                "{}: value row has {} entries for p = {p}",
                path.display(),
                row.len()
            )));
        }
        for v in row {
            values.push(as_f64(v, "values", path)?);
        }
    }
    let matrix = FeatureMatrix::new(n, p, values, tag, groups)?;
    Ok(FeatureDoc {
        matrix,
        g: get_usize(&doc, "g", path)?,
        t: get_usize(&doc, "t", path)?,
        config: field(&doc, "config", path)?.clone(),
    })
}

fn groups_to_json(groups: Option<&GroupPartition>) -> Value {
    match groups {
        None => Value::Null,
        Some(part) => {
            let mut obj = Map::new();
            obj.insert(
                "groups".into(),
                Value::Array(part.groups.iter().map(|g| jusize_vec(g)).collect()),
            );
            match &part.names {
                Some(names) => obj.insert(
                    "names".into(),
                    Value::Array(names.iter().map(|n| Value::from(n.as_str())).collect()),
                ),
                None => obj.insert("names".into(), Value::Null),
            };
            Value::Object(obj)
        }
    }
}

fn groups_from_json(v: &Value, path: &Path) -> Result<Option<GroupPartition>, Failure> {
    if v.is_null() {
        return Ok(None);
    }
    let groups = get_usize_vec_vec(v, "groups", path)?;
    let names = match v.get("names") {
        None | Some(Value::Null) => None,
        Some(Value::Array(items)) => Some(
            items
                .iter()
                .map(|n| {
                    n.as_str().map(String::from).ok_or_else(|| {
                        Failure::validation(format!(
                            "{}: group name is not a string",
                            path.display()
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(_) => {
            return Err(Failure::validation(format!(
                "{}: \"names\" is not an array",
                path.display()
            )))
        }
    };
    Ok(Some(GroupPartition::new(groups, names)?))
}

fn get_usize_vec_vec(doc: &Value, key: &str, path: &Path) -> Result<Vec<Vec<usize>>, Failure> {
    field(doc, key, path)?
        .as_array()
        .ok_or_else(|| {
            Failure::validation(format!("{}: field \"{key}\" is not an array", path.display()))
        })?
        .iter()
        .map(|inner| {
            inner
                .as_array()
                .ok_or_else(|| {
                    Failure::validation(format!(
                        "{}: field \"{key}\" entries are not arrays",
                        path.display()
                    ))
                })?
                .iter()
                .map(|v| as_usize(v, key, path))
                .collect()
        })
        .collect()
}

/// Model-selection profile embedded in a result document when `s` was chosen
/// by the permutation gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapDoc {
    pub grid: Vec<f64>,
    pub observed: Vec<f64>,
    pub perm_mean: Vec<f64>,
    pub perm_std: Vec<f64>,
    pub gap: Vec<f64>,
    pub chosen_index: usize,
    pub chosen_s: f64,
    pub permutations: usize,
    pub no_structure: bool,
    pub skipped: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefitDoc {
    pub threshold: f64,
    pub selected: Vec<usize>,
    pub labels: Vec<usize>,
}

/// A clustering run on disk: assignments, weights, the objective trace, and
/// the fully resolved config needed to reproduce the run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultDoc {
    pub method: String,
    pub transform_tag: String,
    pub k: usize,
    pub seed: u64,
    pub s: Option<f64>,
    pub labels: Vec<usize>,
    pub weights: Option<Vec<f64>>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub gap: Option<GapDoc>,
    pub refit: Option<RefitDoc>,
    pub config: Value,
}

pub fn write_result_doc(path: &Path, doc: &ResultDoc) -> Result<(), Failure> {
    let mut root = Map::new();
    root.insert("schema_version".into(), Value::from(1));
    root.insert("kind".into(), Value::from("result"));
    root.insert("method".into(), Value::from(doc.method.as_str()));
    root.insert("transform_tag".into(), Value::from(doc.transform_tag.as_str()));
    root.insert("k".into(), Value::from(doc.k as u64));
    root.insert("seed".into(), Value::from(doc.seed));
    root.insert("s".into(), doc.s.map(jnum).unwrap_or(Value::Null));
    root.insert("labels".into(), jusize_vec(&doc.labels));
    root.insert(
        "weights".into(),
        doc.weights.as_deref().map(jnum_vec).unwrap_or(Value::Null),
    );
    root.insert("objective_trace".into(), jnum_vec(&doc.objective_trace));
    root.insert("iterations".into(), Value::from(doc.iterations as u64));
    root.insert("converged".into(), Value::from(doc.converged));
    root.insert(
        "gap".into(),
        match &doc.gap {
            None => Value::Null,
            Some(gap) => {
                let mut obj = Map::new();
                obj.insert("grid".into(), jnum_vec(&gap.grid));
                obj.insert("observed".into(), jnum_vec(&gap.observed));
                obj.insert("perm_mean".into(), jnum_vec(&gap.perm_mean));
                obj.insert("perm_std".into(), jnum_vec(&gap.perm_std));
                obj.insert("gap".into(), jnum_vec(&gap.gap));
                obj.insert("chosen_index".into(), Value::from(gap.chosen_index as u64));
                obj.insert("chosen_s".into(), jnum(gap.chosen_s));
                obj.insert("permutations".into(), Value::from(gap.permutations as u64));
                obj.insert("no_structure".into(), Value::from(gap.no_structure));
                obj.insert("skipped".into(), jnum_vec(&gap.skipped));
                Value::Object(obj)
            }
        },
    );
    root.insert(
        "refit".into(),
        match &doc.refit {
            None => Value::Null,
            Some(refit) => {
                let mut obj = Map::new();
                obj.insert("threshold".into(), jnum(refit.threshold));
                obj.insert("selected".into(), jusize_vec(&refit.selected));
                obj.insert("labels".into(), jusize_vec(&refit.labels));
                Value::Object(obj)
            }
        },
    );
    root.insert("config".into(), doc.config.clone());
    write_json(path, &Value::Object(root))
}

pub fn read_result_doc(path: &Path) -> Result<ResultDoc, Failure> {
    let doc = read_json(path)?;
    check_schema(&doc, "result", path)?;
    let gap = match field(&doc, "gap", path)? {
        Value::Null => None,
        gap => Some(GapDoc {
            grid: get_f64_vec(gap, "grid", path)?,
            observed: get_f64_vec(gap, "observed", path)?,
            perm_mean: get_f64_vec(gap, "perm_mean", path)?,
            perm_std: get_f64_vec(gap, "perm_std", path)?,
            gap: get_f64_vec(gap, "gap", path)?,
            chosen_index: get_usize(gap, "chosen_index", path)?,
            chosen_s: get_f64(gap, "chosen_s", path)?,
            permutations: get_usize(gap, "permutations", path)?,
            no_structure: get_bool(gap, "no_structure", path)?,
            skipped: get_f64_vec(gap, "skipped", path)?,
        }),
    };
    let refit = match field(&doc, "refit", path)? {
        Value::Null => None,
        refit => Some(RefitDoc {
            threshold: get_f64(refit, "threshold", path)?,
            selected: get_usize_vec(refit, "selected", path)?,
            labels: get_usize_vec(refit, "labels", path)?,
        }),
    };
    Ok(ResultDoc {
        method: get_str(&doc, "method", path)?,
        transform_tag: get_str(&doc, "transform_tag", path)?,
        k: get_usize(&doc, "k", path)?,
        seed: field(&doc, "seed", path)?.as_u64().ok_or_else(|| {
            Failure::validation(format!("{}: field \"seed\" is not an integer", path.display()))
        })?,
        s: match field(&doc, "s", path)? {
            Value::Null => None,
            v => Some(as_f64(v, "s", path)?),
        },
        labels: get_usize_vec(&doc, "labels", path)?,
        weights: match field(&doc, "weights", path)? {
            Value::Null => None,
            v => Some(
                v.as_array()
                    .ok_or_else(|| {
                        Failure::validation(format!(
                            "{}: \"weights\" is not an array",
                            path.display()
                        ))
                    })?
                    .iter()
                    .map(|x| as_f64(x, "weights", path))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        },
        objective_trace: get_f64_vec(&doc, "objective_trace", path)?,
        iterations: get_usize(&doc, "iterations", path)?,
        converged: get_bool(&doc, "converged", path)?,
        gap,
        refit,
        config: field(&doc, "config", path)?.clone(),
    })
}
