//! Edge-labeled directed graphs with label-partitioned adjacency.

use std::fmt::Write as _;

use thiserror::Error;

use crate::grammar::{Grammar, TermId};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: label `{token}` is not a terminal of the grammar")]
    UnknownLabel { line: usize, token: String },
    #[error("line {line}: vertex {id} out of range (graph declares {n} vertices)")]
    VertexOutOfRange { line: usize, id: u64, n: usize },
}

/// One labeled edge `from --label--> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub label: TermId,
}

/// Immutable graph with per-label predecessor and successor lists, the shape
/// the terminal-anchored propagation scans.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    n: usize,
    edges: Vec<Edge>,
    out_by_label: Vec<Vec<Vec<u32>>>,
    in_by_label: Vec<Vec<Vec<u32>>>,
    m_by_label: Vec<usize>,
}

impl LabeledGraph {
    /// Build from an edge list. Edges are deduplicated on the full
    /// `(from, to, label)` triple and stored in canonical sorted order.
    pub fn from_edges(n: usize, num_labels: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort();
        edges.dedup();
        for e in &edges {
            assert!(
                (e.from as usize) < n && (e.to as usize) < n,
                "edge endpoint out of range"
            );
            assert!(e.label.index() < num_labels, "edge label out of range");
        }
        let mut out_by_label = vec![vec![Vec::new(); n]; num_labels];
        let mut in_by_label = vec![vec![Vec::new(); n]; num_labels];
        let mut m_by_label = vec![0usize; num_labels];
        for e in &edges {
            out_by_label[e.label.index()][e.from as usize].push(e.to);
            in_by_label[e.label.index()][e.to as usize].push(e.from);
            m_by_label[e.label.index()] += 1;
        }
        for lists in out_by_label.iter_mut().chain(in_by_label.iter_mut()) {
            for l in lists.iter_mut() {
                l.sort_unstable();
            }
        }
        LabeledGraph {
            n,
            edges,
            out_by_label,
            in_by_label,
            m_by_label,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_labels(&self) -> usize {
        self.m_by_label.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count_for_label(&self, label: TermId) -> usize {
        self.m_by_label[label.index()]
    }

    /// Predecessors `u` with an edge `u --label--> v`.
    pub fn in_neighbors(&self, label: TermId, v: u32) -> &[u32] {
        &self.in_by_label[label.index()][v as usize]
    }

    /// Successors `w` with an edge `u --label--> w`.
    pub fn out_neighbors(&self, label: TermId, u: u32) -> &[u32] {
        &self.out_by_label[label.index()][u as usize]
    }

    pub fn has_edge(&self, from: u32, to: u32, label: TermId) -> bool {
        self.edges.binary_search(&Edge { from, to, label }).is_ok()
    }

    /// Canonical text form (re-parses to an identical graph).
    pub fn serialize(&self, g: &Grammar) -> String {
        let mut s = String::new();
        writeln!(s, "@vertices {}", self.n).unwrap();
        for e in &self.edges {
            writeln!(s, "{} {} {}", e.from, e.to, g.term_name(e.label)).unwrap();
        }
        s
    }
}

/// A walk through the graph: consecutive edges share endpoints. The empty
/// path at `start` is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: u32,
    pub edges: Vec<Edge>,
}

impl Path {
    pub fn empty(at: u32) -> Self {
        Path {
            start: at,
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self) -> u32 {
        self.edges.last().map_or(self.start, |e| e.to)
    }

    /// Concatenation of edge labels along the walk.
    pub fn trace(&self) -> Vec<TermId> {
        self.edges.iter().map(|e| e.label).collect()
    }

    /// Endpoints chain correctly and every edge exists in `graph`.
    pub fn is_valid_walk(&self, graph: &LabeledGraph) -> bool {
        let mut at = self.start;
        if (at as usize) >= graph.num_vertices() {
            return false;
        }
        for e in &self.edges {
            if e.from != at || !graph.has_edge(e.from, e.to, e.label) {
                return false;
            }
            at = e.to;
        }
        true
    }
}

/// Parse an edge list: one `u v label` triple per line, an optional
/// `@vertices N` header, `#` comment lines. Vertex ids are nonnegative
/// integers used as given; without the header the vertex count is
/// `max id + 1`. Labels must be terminals of `grammar`.
pub fn parse_graph(text: &str, grammar: &Grammar) -> Result<LabeledGraph, GraphError> {
    let mut declared_n: Option<usize> = None;
    let mut raw: Vec<(usize, u64, u64, TermId)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@vertices") {
            let n: usize = rest.trim().parse().map_err(|_| GraphError::Syntax {
                line: line_no,
                msg: "@vertices expects a nonnegative integer".into(),
            })?;
            declared_n = Some(n);
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(GraphError::Syntax {
                line: line_no,
                msg: "expected `u v label`".into(),
            });
        }
        let u: u64 = toks[0].parse().map_err(|_| GraphError::Syntax {
            line: line_no,
            msg: format!("bad vertex id `{}`", toks[0]),
        })?;
        let v: u64 = toks[1].parse().map_err(|_| GraphError::Syntax {
            line: line_no,
            msg: format!("bad vertex id `{}`", toks[1]),
        })?;
        let label = grammar
            .term_id(toks[2])
            .ok_or_else(|| GraphError::UnknownLabel {
                line: line_no,
                token: toks[2].to_string(),
            })?;
        raw.push((line_no, u, v, label));
    }

    let max_id = raw.iter().map(|&(_, u, v, _)| u.max(v)).max();
    let n = match declared_n {
        Some(n) => {
            for &(line, u, v, _) in &raw {
                let id = u.max(v);
                if id >= n as u64 {
                    return Err(GraphError::VertexOutOfRange { line, id, n });
                }
            }
            n
        }
        None => max_id.map_or(0, |m| usize::try_from(m + 1).expect("vertex id overflow")),
    };
    if let Some(m) = max_id {
        if u32::try_from(m).is_err() {
            let (line, u, v, _) = raw[raw.iter().position(|&(_, u, v, _)| u.max(v) == m).unwrap()];
            return Err(GraphError::VertexOutOfRange {
                line,
                id: u.max(v),
                n,
            });
        }
    }

    let edges = raw
        .into_iter()
        .map(|(_, u, v, label)| Edge {
            from: u as u32,
            to: v as u32,
            label,
        })
        .collect();
    Ok(LabeledGraph::from_edges(n, grammar.num_terminals(), edges))
}
