//! Versioned text serialization for built indices.
//!
//! The format is line-oriented and stable: symbol tables in interner order,
//! then one line per true entry in first-insertion order, so loading restores
//! both the relations and the witness-table ordering that the shared-DAG
//! wrapper depends on. Distance indices carry the distance in each entry
//! line; a missing entry means infinite distance.
//!
//! ```text
//! cflr-index 1
//! kind sat
//! vertices 4
//! terminals a b
//! nonterminals S t#a S#0#1
//! start S
//! entries 3
//! S 0 1 term a
//! S 2 2 eps
//! S 0 2 bin t#a S#0#1 1
//! end
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::grammar::NtId;
use crate::lindist::{DistanceIndex, INFINITE_DISTANCE};
use crate::relations::{BuiltIndex, RelationSet, WitnessRecord, WitnessTable};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    Sat,
    Lin,
    LinDist,
}

impl IndexKind {
    fn as_str(self) -> &'static str {
        match self {
            IndexKind::Sat => "sat",
            IndexKind::Lin => "lin",
            IndexKind::LinDist => "lindist",
        }
    }
}

#[derive(Debug, Error)]
pub enum IndexIoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported index format version `{0}`")]
    Version(String),
    #[error("inconsistent index file: {0}")]
    Inconsistent(String),
}

/// A self-contained serialized index: enough to answer queries, extract
/// witnesses, and rebuild the shared witness DAG, without the input files.
#[derive(Debug, Clone)]
pub struct IndexFile {
    pub kind: IndexKind,
    pub n: usize,
    pub term_names: Vec<String>,
    pub nt_names: Vec<String>,
    pub start: NtId,
    pub relations: RelationSet,
    pub witnesses: WitnessTable,
    /// Finite distances per entry, in witness order (`LinDist` only).
    pub distances: Option<Vec<u32>>,
}

impl IndexFile {
    pub fn from_built(kind: IndexKind, g: &crate::grammar::Grammar, built: &BuiltIndex) -> Self {
        IndexFile {
            kind,
            n: built.relations.num_vertices(),
            term_names: g.term_names().to_vec(),
            nt_names: g.nt_names().to_vec(),
            start: g.start(),
            relations: built.relations.clone(),
            witnesses: built.witnesses.clone(),
            distances: None,
        }
    }

    pub fn from_distance(g: &crate::grammar::Grammar, idx: &DistanceIndex) -> Self {
        let parents = idx.parents().clone();
        let mut relations = RelationSet::new(idx.num_nonterminals(), idx.num_vertices());
        let mut distances = Vec::with_capacity(parents.len());
        for &(nt, u, v) in parents.order() {
            relations.set(nt, u, v);
            distances.push(idx.distance(nt, u, v));
        }
        IndexFile {
            kind: IndexKind::LinDist,
            n: idx.num_vertices(),
            term_names: g.term_names().to_vec(),
            nt_names: g.nt_names().to_vec(),
            start: g.start(),
            relations,
            witnesses: parents,
            distances: Some(distances),
        }
    }

    /// Reassemble a distance table (entries absent from the file are
    /// infinite).
    pub fn distance_table(&self) -> Option<Vec<Vec<u32>>> {
        let ds = self.distances.as_ref()?;
        let mut table = vec![vec![INFINITE_DISTANCE; self.n * self.n]; self.nt_names.len()];
        for (&(nt, u, v), &d) in self.witnesses.order().iter().zip(ds) {
            table[nt.index()][u as usize * self.n + v as usize] = d;
        }
        Some(table)
    }
}

pub fn write_index(idx: &IndexFile) -> String {
    let mut s = String::new();
    writeln!(s, "cflr-index {FORMAT_VERSION}").unwrap();
    writeln!(s, "kind {}", idx.kind.as_str()).unwrap();
    writeln!(s, "vertices {}", idx.n).unwrap();
    writeln!(s, "terminals {}", idx.term_names.join(" ")).unwrap();
    writeln!(s, "nonterminals {}", idx.nt_names.join(" ")).unwrap();
    writeln!(s, "start {}", idx.nt_names[idx.start.index()]).unwrap();
    writeln!(s, "entries {}", idx.witnesses.len()).unwrap();
    for (i, &(nt, u, v)) in idx.witnesses.order().iter().enumerate() {
        write!(s, "{} {} {}", idx.nt_names[nt.index()], u, v).unwrap();
        if let Some(ds) = &idx.distances {
            write!(s, " {}", ds[i]).unwrap();
        }
        let rec = idx.witnesses.get(nt, u, v).expect("ordered entry");
        match rec {
            WitnessRecord::Term { label } => {
                write!(s, " term {}", idx.term_names[label.index()]).unwrap()
            }
            WitnessRecord::Eps => write!(s, " eps").unwrap(),
            WitnessRecord::Bin { left, right, mid } => write!(
                s,
                " bin {} {} {}",
                idx.nt_names[left.index()],
                idx.nt_names[right.index()],
                mid
            )
            .unwrap(),
            WitnessRecord::LinL { label, via, body } => write!(
                s,
                " linl {} {} {}",
                idx.term_names[label.index()],
                via,
                idx.nt_names[body.index()]
            )
            .unwrap(),
            WitnessRecord::LinR { body, label, via } => write!(
                s,
                " linr {} {} {}",
                idx.nt_names[body.index()],
                idx.term_names[label.index()],
                via
            )
            .unwrap(),
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

pub fn read_index(text: &str) -> Result<IndexFile, IndexIoError> {
    use std::collections::HashMap;

    let err = |line: usize, msg: &str| IndexIoError::Parse {
        line,
        msg: msg.to_string(),
    };

    let mut lines = text.lines().enumerate();
    let mut next = |expect: &str| -> Result<(usize, String), IndexIoError> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l.to_string())),
            None => Err(IndexIoError::Parse {
                line: 0,
                msg: format!("unexpected end of file, expected {expect}"),
            }),
        }
    };

    let (line, header) = next("header")?;
    let version = header
        .strip_prefix("cflr-index ")
        .ok_or_else(|| err(line, "missing `cflr-index` header"))?;
    if version.trim() != FORMAT_VERSION.to_string() {
        return Err(IndexIoError::Version(version.trim().to_string()));
    }

    let (line, kind_line) = next("kind")?;
    let kind = match kind_line.strip_prefix("kind ").map(str::trim) {
        Some("sat") => IndexKind::Sat,
        Some("lin") => IndexKind::Lin,
        Some("lindist") => IndexKind::LinDist,
        _ => return Err(err(line, "expected `kind sat|lin|lindist`")),
    };

    let (line, n_line) = next("vertices")?;
    let n: usize = n_line
        .strip_prefix("vertices ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| err(line, "expected `vertices <n>`"))?;

    let (line, t_line) = next("terminals")?;
    let term_names: Vec<String> = t_line
        .strip_prefix("terminals")
        .ok_or_else(|| err(line, "expected `terminals ...`"))?
        .split_whitespace()
        .map(String::from)
        .collect();

    let (line, nt_line) = next("nonterminals")?;
    let nt_names: Vec<String> = nt_line
        .strip_prefix("nonterminals")
        .ok_or_else(|| err(line, "expected `nonterminals ...`"))?
        .split_whitespace()
        .map(String::from)
        .collect();

    let term_ids: HashMap<&str, crate::grammar::TermId> = term_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), crate::grammar::TermId(i as u32)))
        .collect();
    let nt_ids: HashMap<&str, NtId> = nt_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), NtId(i as u32)))
        .collect();

    let (line, start_line) = next("start")?;
    let start = start_line
        .strip_prefix("start ")
        .map(str::trim)
        .and_then(|s| nt_ids.get(s).copied())
        .ok_or_else(|| err(line, "expected `start <nonterminal>`"))?;

    let (line, e_line) = next("entries")?;
    let entry_count: usize = e_line
        .strip_prefix("entries ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| err(line, "expected `entries <count>`"))?;

    let mut relations = RelationSet::new(nt_names.len(), n);
    let mut witnesses = WitnessTable::new(nt_names.len(), n);
    let mut distances = if kind == IndexKind::LinDist {
        Some(Vec::with_capacity(entry_count))
    } else {
        None
    };

    for _ in 0..entry_count {
        let (line, entry) = next("entry")?;
        let toks: Vec<&str> = entry.split_whitespace().collect();
        let base = if distances.is_some() { 4 } else { 3 };
        if toks.len() < base + 1 {
            return Err(err(line, "truncated entry"));
        }
        let nt = *nt_ids
            .get(toks[0])
            .ok_or_else(|| err(line, "unknown nonterminal"))?;
        let u: u32 = toks[1].parse().map_err(|_| err(line, "bad vertex"))?;
        let v: u32 = toks[2].parse().map_err(|_| err(line, "bad vertex"))?;
        if u as usize >= n || v as usize >= n {
            return Err(err(line, "vertex out of range"));
        }
        if let Some(ds) = &mut distances {
            let d: u32 = toks[3].parse().map_err(|_| err(line, "bad distance"))?;
            ds.push(d);
        }
        let rec = match toks[base] {
            "term" => {
                let label = *toks
                    .get(base + 1)
                    .and_then(|t| term_ids.get(t))
                    .ok_or_else(|| err(line, "bad term record"))?;
                WitnessRecord::Term { label }
            }
            "eps" => WitnessRecord::Eps,
            "bin" => {
                if toks.len() != base + 4 {
                    return Err(err(line, "bad bin record"));
                }
                let left = *nt_ids
                    .get(toks[base + 1])
                    .ok_or_else(|| err(line, "bad bin record"))?;
                let right = *nt_ids
                    .get(toks[base + 2])
                    .ok_or_else(|| err(line, "bad bin record"))?;
                let mid: u32 = toks[base + 3]
                    .parse()
                    .map_err(|_| err(line, "bad bin record"))?;
                WitnessRecord::Bin { left, right, mid }
            }
            "linl" => {
                if toks.len() != base + 4 {
                    return Err(err(line, "bad linl record"));
                }
                let label = *term_ids
                    .get(toks[base + 1])
                    .ok_or_else(|| err(line, "bad linl record"))?;
                let via: u32 = toks[base + 2]
                    .parse()
                    .map_err(|_| err(line, "bad linl record"))?;
                let body = *nt_ids
                    .get(toks[base + 3])
                    .ok_or_else(|| err(line, "bad linl record"))?;
                WitnessRecord::LinL { label, via, body }
            }
            "linr" => {
                if toks.len() != base + 4 {
                    return Err(err(line, "bad linr record"));
                }
                let body = *nt_ids
                    .get(toks[base + 1])
                    .ok_or_else(|| err(line, "bad linr record"))?;
                let label = *term_ids
                    .get(toks[base + 2])
                    .ok_or_else(|| err(line, "bad linr record"))?;
                let via: u32 = toks[base + 3]
                    .parse()
                    .map_err(|_| err(line, "bad linr record"))?;
                WitnessRecord::LinR { body, label, via }
            }
            other => return Err(err(line, &format!("unknown record kind `{other}`"))),
        };
        if !relations.set(nt, u, v) {
            return Err(IndexIoError::Inconsistent(format!(
                "duplicate entry for ({}, {u}, {v})",
                nt_names[nt.index()]
            )));
        }
        witnesses.insert(nt, u, v, rec);
    }

    let (line, end) = next("end")?;
    if end.trim() != "end" {
        return Err(err(line, "expected `end`"));
    }

    Ok(IndexFile {
        kind,
        n,
        term_names,
        nt_names,
        start,
        relations,
        witnesses,
        distances,
    })
}
