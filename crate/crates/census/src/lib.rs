//! Linearity census over a corpus of JSON schemas: convert each schema to a
//! CFG, classify it as linear or general, attribute non-linearity to
//! structural features, and aggregate per split and per class.

mod convert;
mod features;

pub use convert::{schema_to_cfg, Conversion, FIXED_ARRAY_UNROLL_CAP};
pub use features::{schema_features, Features};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("bad split manifest {path}: {msg}")]
    BadManifest { path: PathBuf, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrammarClass {
    Linear,
    General,
}

impl std::fmt::Display for GrammarClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GrammarClass::Linear => "linear",
            GrammarClass::General => "general",
        })
    }
}

/// One schema's census result.
#[derive(Debug, Clone)]
pub struct CensusRow {
    pub id: String,
    pub split: String,
    pub dataset: String,
    pub class: GrammarClass,
    pub productions: usize,
    pub nonterminals: usize,
    pub bytes: usize,
    pub features: Features,
    pub warnings: usize,
}

/// Classify one parsed schema document. The grammar class collapses the
/// grammar form: linear whenever every production has at most one
/// nonterminal (all-terminal grammars included); features come from the
/// schema walk, not from the grammar.
pub fn classify_schema(id: &str, split: &str, bytes: usize, doc: &Value) -> CensusRow {
    let conv = schema_to_cfg(doc);
    let class = if conv.grammar.is_linear() {
        GrammarClass::Linear
    } else {
        GrammarClass::General
    };
    CensusRow {
        id: id.to_string(),
        split: split.to_string(),
        dataset: String::new(),
        class,
        productions: conv.grammar.productions().len(),
        nonterminals: conv.grammar.num_nonterminals(),
        bytes,
        features: schema_features(doc),
        warnings: conv.warnings.len(),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SplitStats {
    pub name: String,
    pub total: usize,
    pub linear: usize,
    pub general: usize,
    pub avg_productions: f64,
}

impl SplitStats {
    pub fn pct_linear(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.linear as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassStats {
    pub count: usize,
    pub avg_productions: f64,
    pub avg_nonterminals: f64,
    pub avg_bytes: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistStats {
    pub median: f64,
    pub mean: f64,
    pub p95: f64,
    pub max: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregate {
    pub total: usize,
    pub linear: usize,
    pub general: usize,
    pub per_split: Vec<SplitStats>,
    pub linear_stats: ClassStats,
    pub general_stats: ClassStats,
    pub production_dist: DistStats,
    pub nonterminal_dist: DistStats,
    /// Feature counts among non-linear schemas only.
    pub nonlinear_variable_length_array: usize,
    pub nonlinear_nested_object: usize,
    pub nonlinear_recursive_ref: usize,
}

impl Aggregate {
    pub fn pct_linear(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.linear as f64 / self.total as f64
        }
    }
}

#[derive(Debug)]
pub struct CensusReport {
    pub rows: Vec<CensusRow>,
    pub aggregate: Aggregate,
    /// Files skipped because they could not be read or parsed.
    pub skipped: Vec<String>,
}

fn dist_stats(mut values: Vec<usize>) -> DistStats {
    if values.is_empty() {
        return DistStats::default();
    }
    values.sort_unstable();
    let n = values.len();
    let median = if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    };
    let mean = values.iter().sum::<usize>() as f64 / n as f64;
    let p95_idx = ((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1;
    DistStats {
        median,
        mean,
        p95: values[p95_idx] as f64,
        max: values[n - 1],
    }
}

fn class_stats(rows: &[&CensusRow]) -> ClassStats {
    if rows.is_empty() {
        return ClassStats::default();
    }
    let n = rows.len() as f64;
    ClassStats {
        count: rows.len(),
        avg_productions: rows.iter().map(|r| r.productions).sum::<usize>() as f64 / n,
        avg_nonterminals: rows.iter().map(|r| r.nonterminals).sum::<usize>() as f64 / n,
        avg_bytes: rows.iter().map(|r| r.bytes).sum::<usize>() as f64 / n,
    }
}

pub fn aggregate_rows(rows: &[CensusRow]) -> Aggregate {
    let linear_rows: Vec<&CensusRow> = rows
        .iter()
        .filter(|r| r.class == GrammarClass::Linear)
        .collect();
    let general_rows: Vec<&CensusRow> = rows
        .iter()
        .filter(|r| r.class == GrammarClass::General)
        .collect();

    let mut splits: BTreeMap<&str, SplitStats> = BTreeMap::new();
    for r in rows {
        let s = splits.entry(&r.split).or_insert_with(|| SplitStats {
            name: r.split.clone(),
            ..Default::default()
        });
        s.total += 1;
        match r.class {
            GrammarClass::Linear => s.linear += 1,
            GrammarClass::General => s.general += 1,
        }
        s.avg_productions += r.productions as f64;
    }
    let per_split = splits
        .into_values()
        .map(|mut s| {
            s.avg_productions /= s.total as f64;
            s
        })
        .collect();

    Aggregate {
        total: rows.len(),
        linear: linear_rows.len(),
        general: general_rows.len(),
        per_split,
        linear_stats: class_stats(&linear_rows),
        general_stats: class_stats(&general_rows),
        production_dist: dist_stats(rows.iter().map(|r| r.productions).collect()),
        nonterminal_dist: dist_stats(rows.iter().map(|r| r.nonterminals).collect()),
        nonlinear_variable_length_array: general_rows
            .iter()
            .filter(|r| r.features.variable_length_array)
            .count(),
        nonlinear_nested_object: general_rows
            .iter()
            .filter(|r| r.features.nested_object)
            .count(),
        nonlinear_recursive_ref: general_rows
            .iter()
            .filter(|r| r.features.recursive_ref)
            .count(),
    }
}

fn split_of(rel: &Path) -> String {
    for comp in rel.components() {
        if let Some(name) = comp.as_os_str().to_str() {
            let lower = name.to_ascii_lowercase();
            if lower == "train" || lower == "validation" || lower == "test" {
                return lower;
            }
        }
    }
    "other".to_string()
}

fn dataset_of(rel: &Path) -> String {
    let comps: Vec<_> = rel.components().collect();
    if comps.len() >= 2 {
        comps[0].as_os_str().to_string_lossy().into_owned()
    } else {
        "root".to_string()
    }
}

/// Walk a directory of `.json` schemas, classify each, aggregate, and write
/// the report files (`census.csv`, `aggregate.txt`, `class_by_dataset.csv`,
/// `size_vs_class.csv`) into `out_dir`. Unreadable or unparsable files are
/// skipped and reported, not fatal. An optional manifest maps schema ids to
/// splits and overrides the directory-based split detection.
pub fn run_census(
    dir: &Path,
    manifest: Option<&Path>,
    out_dir: &Path,
) -> Result<CensusReport, CensusError> {
    if !dir.is_dir() {
        return Err(CensusError::NotADirectory(dir.to_path_buf()));
    }
    let manifest_map: BTreeMap<String, String> = match manifest {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CensusError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| CensusError::BadManifest {
                    path: path.to_path_buf(),
                    msg: e.to_string(),
                })?;
            match value {
                Value::Object(map) => map
                    .into_iter()
                    .filter_map(|(k, v)| v.as_str().map(|s| (k, s.to_string())))
                    .collect(),
                _ => {
                    return Err(CensusError::BadManifest {
                        path: path.to_path_buf(),
                        msg: "expected a JSON object mapping ids to splits".into(),
                    })
                }
            }
        }
        None => BTreeMap::new(),
    };

    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for path in files {
        let rel = path.strip_prefix(dir).unwrap_or(&path);
        let id = rel.with_extension("").to_string_lossy().replace('\\', "/");
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) => {
                skipped.push(id);
                continue;
            }
        };
        let doc: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(_) => {
                skipped.push(id);
                continue;
            }
        };
        let split = manifest_map
            .get(&id)
            .cloned()
            .unwrap_or_else(|| split_of(rel));
        let mut row = classify_schema(&id, &split, text.len(), &doc);
        row.dataset = dataset_of(rel);
        rows.push(row);
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id));

    let aggregate = aggregate_rows(&rows);
    let report = CensusReport {
        rows,
        aggregate,
        skipped,
    };

    fs::create_dir_all(out_dir).map_err(|source| CensusError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let write = |name: &str, contents: String| -> Result<(), CensusError> {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|source| CensusError::Io { path, source })
    };
    write("census.csv", render_census_csv(&report.rows))?;
    write("aggregate.txt", render_aggregate(&report))?;
    write(
        "class_by_dataset.csv",
        render_class_by_dataset(&report.rows),
    )?;
    write("size_vs_class.csv", render_size_vs_class(&report.rows))?;

    Ok(report)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("id,split,class,productions,nonterminals,bytes,features\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&r.id),
            csv_field(&r.split),
            r.class,
            r.productions,
            r.nonterminals,
            r.bytes,
            r.features.names().join(";")
        )
        .unwrap();
    }
    out
}

pub fn render_class_by_dataset(rows: &[CensusRow]) -> String {
    let mut sets: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in rows {
        let e = sets.entry(&r.dataset).or_default();
        match r.class {
            GrammarClass::Linear => e.0 += 1,
            GrammarClass::General => e.1 += 1,
        }
    }
    let mut out = String::from("dataset,total,linear,general,pct_linear\n");
    for (name, (lin, gen)) in sets {
        let total = lin + gen;
        writeln!(
            out,
            "{},{},{},{},{:.1}",
            csv_field(name),
            total,
            lin,
            gen,
            100.0 * lin as f64 / total as f64
        )
        .unwrap();
    }
    out
}

pub fn render_size_vs_class(rows: &[CensusRow]) -> String {
    let mut out = String::from("id,class,bytes\n");
    for r in rows {
        writeln!(out, "{},{},{}", csv_field(&r.id), r.class, r.bytes).unwrap();
    }
    out
}

pub fn render_aggregate(report: &CensusReport) -> String {
    let a = &report.aggregate;
    let mut out = String::new();
    writeln!(out, "schemas: {}", a.total).unwrap();
    writeln!(out, "skipped: {}", report.skipped.len()).unwrap();
    writeln!(out, "linear: {} ({:.1}%)", a.linear, a.pct_linear()).unwrap();
    writeln!(
        out,
        "general: {} ({:.1}%)",
        a.general,
        100.0 - if a.total == 0 { 100.0 } else { a.pct_linear() }
    )
    .unwrap();
    writeln!(out).unwrap();

    writeln!(
        out,
        "split          total  linear  general  %linear  avg|P|"
    )
    .unwrap();
    for s in &a.per_split {
        writeln!(
            out,
            "{:<14} {:>5} {:>7} {:>8} {:>8.1} {:>7.1}",
            s.name,
            s.total,
            s.linear,
            s.general,
            s.pct_linear(),
            s.avg_productions
        )
        .unwrap();
    }
    writeln!(
        out,
        "{:<14} {:>5} {:>7} {:>8} {:>8.1}",
        "total",
        a.total,
        a.linear,
        a.general,
        a.pct_linear()
    )
    .unwrap();
    writeln!(out).unwrap();

    writeln!(out, "class     count  avg|P|  avg|N|  avg_bytes").unwrap();
    for (name, st) in [("linear", &a.linear_stats), ("general", &a.general_stats)] {
        writeln!(
            out,
            "{:<8} {:>6} {:>7.1} {:>7.1} {:>10.1}",
            name, st.count, st.avg_productions, st.avg_nonterminals, st.avg_bytes
        )
        .unwrap();
    }
    writeln!(out).unwrap();

    for (name, d) in [("|P|", &a.production_dist), ("|N|", &a.nonterminal_dist)] {
        writeln!(
            out,
            "{name} distribution: median={} mean={:.1} p95={} max={}",
            d.median, d.mean, d.p95, d.max
        )
        .unwrap();
    }
    writeln!(out).unwrap();

    writeln!(out, "features among non-linear schemas:").unwrap();
    let nl = a.general.max(1) as f64;
    for (name, count) in [
        ("variable_length_array", a.nonlinear_variable_length_array),
        ("nested_object", a.nonlinear_nested_object),
        ("recursive_ref", a.nonlinear_recursive_ref),
    ] {
        writeln!(
            out,
            "{name:<22} {count:>4}  ({:.1}% of non-linear)",
            100.0 * count as f64 / nl
        )
        .unwrap();
    }
    out
}
