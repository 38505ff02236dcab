//! Distance-aware index for TALNF grammars: exact shortest accepted path
//! lengths per nonterminal and vertex pair, with parent pointers for
//! extraction.
//!
//! Distances are shortest paths in an implicit dependency graph over triples
//! `(A, u, v)`. `S -> eps` diagonal triples are sources at distance 0 and
//! terminal-rule triples are sources at distance 1; every propagation step
//! prepends or appends exactly one graph edge, so all dependency edges have
//! unit weight and a plain FIFO BFS (0-sources seeded before 1-sources)
//! settles every triple at its exact distance, once.

use std::collections::VecDeque;

use crate::grammar::{Grammar, NtId, TermId};
use crate::graph::{LabeledGraph, Path};
use crate::relations::{extract_path, BuildStats, IndexError, WitnessRecord, WitnessTable};

/// Sentinel for "no accepted path".
pub const INFINITE_DISTANCE: u32 = u32::MAX;

/// Shortest accepted path lengths `D_A[u, v]` with parent pointers. A
/// distance is finite exactly when the boolean relation holds.
#[derive(Debug, Clone)]
pub struct DistanceIndex {
    n: usize,
    start: NtId,
    dist: Vec<Vec<u32>>,
    parents: WitnessTable,
    pub stats: BuildStats,
}

impl DistanceIndex {
    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_nonterminals(&self) -> usize {
        self.dist.len()
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    /// `D_A[u, v]`, or [`INFINITE_DISTANCE`].
    pub fn distance(&self, nt: NtId, u: u32, v: u32) -> u32 {
        self.dist[nt.index()][u as usize * self.n + v as usize]
    }

    pub fn parents(&self) -> &WitnessTable {
        &self.parents
    }

    /// Shortest accepted path distance from the start symbol, range-checked.
    pub fn query_distance(&self, s: u32, t: u32) -> Result<u32, IndexError> {
        if (s as usize) >= self.n {
            return Err(IndexError::VertexOutOfRange { v: s, n: self.n });
        }
        if (t as usize) >= self.n {
            return Err(IndexError::VertexOutOfRange { v: t, n: self.n });
        }
        Ok(self.distance(self.start, s, t))
    }

    /// A shortest accepted path from `s` to `t`, or `None` when no accepted
    /// path exists. The returned path has length exactly `D_S[s, t]`;
    /// extraction follows parent pointers and is linear in that length.
    pub fn shortest_accepted_path(&self, s: u32, t: u32) -> Result<Option<Path>, IndexError> {
        let d = self.query_distance(s, t)?;
        if d == INFINITE_DISTANCE {
            return Ok(None);
        }
        let path = extract_path(&self.parents, self.start, s, t)?;
        debug_assert_eq!(path.len() as u32, d);
        Ok(Some(path))
    }
}

/// Build the distance table for a TALNF grammar by multi-source BFS; the
/// dependency graph is generated on the fly from the label-partitioned
/// adjacency, never materialized.
pub fn lindist_build(g: &Grammar, graph: &LabeledGraph) -> Result<DistanceIndex, IndexError> {
    if !g.is_talnf() {
        return Err(IndexError::GrammarNotTalnf);
    }
    let n = graph.num_vertices();
    let num_nts = g.num_nonterminals();
    let mut dist = vec![vec![INFINITE_DISTANCE; n * n]; num_nts];
    let mut parents = WitnessTable::new(num_nts, n);
    let mut queue: VecDeque<(NtId, u32, u32)> = VecDeque::new();
    let mut stats = BuildStats::default();

    let mut by_term: Vec<Vec<NtId>> = vec![Vec::new(); g.num_terminals()];
    let mut left_rules: Vec<Vec<(NtId, TermId)>> = vec![Vec::new(); num_nts];
    let mut right_rules: Vec<Vec<(NtId, TermId)>> = vec![Vec::new(); num_nts];
    for p in g.productions() {
        if let Some(t) = p.as_terminal_rule() {
            by_term[t.index()].push(p.lhs);
        } else if let Some((a, b)) = p.as_term_nt_rule() {
            left_rules[b.index()].push((p.lhs, a));
        } else if let Some((b, a)) = p.as_nt_term_rule() {
            right_rules[b.index()].push((p.lhs, a));
        }
    }

    let discover = |dist: &mut Vec<Vec<u32>>,
                    parents: &mut WitnessTable,
                    queue: &mut VecDeque<(NtId, u32, u32)>,
                    nt: NtId,
                    u: u32,
                    v: u32,
                    d: u32,
                    rec: WitnessRecord| {
        let slot = &mut dist[nt.index()][u as usize * n + v as usize];
        if *slot == INFINITE_DISTANCE {
            *slot = d;
            parents.insert(nt, u, v, rec);
            queue.push_back((nt, u, v));
        }
    };

    // Distance-0 sources first, then distance-1 sources, keeping the queue
    // monotone.
    if g.has_eps_rule() {
        for u in 0..n as u32 {
            discover(
                &mut dist,
                &mut parents,
                &mut queue,
                g.start(),
                u,
                u,
                0,
                WitnessRecord::Eps,
            );
        }
    }
    for e in graph.edges() {
        for &a in &by_term[e.label.index()] {
            discover(
                &mut dist,
                &mut parents,
                &mut queue,
                a,
                e.from,
                e.to,
                1,
                WitnessRecord::Term { label: e.label },
            );
        }
    }

    while let Some((b, x, v)) = queue.pop_front() {
        stats.dequeues += 1;
        let d = dist[b.index()][x as usize * n + v as usize];
        for &(a, label) in &left_rules[b.index()] {
            let preds = graph.in_neighbors(label, x);
            stats.inner_iterations += preds.len() as u64;
            for &u in preds {
                discover(
                    &mut dist,
                    &mut parents,
                    &mut queue,
                    a,
                    u,
                    v,
                    d + 1,
                    WitnessRecord::LinL {
                        label,
                        via: x,
                        body: b,
                    },
                );
            }
        }
        for &(a, label) in &right_rules[b.index()] {
            let succs = graph.out_neighbors(label, v);
            stats.inner_iterations += succs.len() as u64;
            for &w in succs {
                discover(
                    &mut dist,
                    &mut parents,
                    &mut queue,
                    a,
                    x,
                    w,
                    d + 1,
                    WitnessRecord::LinR {
                        body: b,
                        label,
                        via: v,
                    },
                );
            }
        }
    }

    stats.entries = parents.len();
    Ok(DistanceIndex {
        n,
        start: g.start(),
        dist,
        parents,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{derives, parse_grammar, to_talnf};
    use crate::graph::parse_graph;

    #[test]
    fn anbn_distances_on_four_cycle() {
        let g = to_talnf(&parse_grammar("S -> a S b | a b").unwrap()).unwrap();
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 b\n3 0 b", &g).unwrap();
        let idx = lindist_build(&g, &graph).unwrap();
        let s = g.start();
        assert_eq!(idx.distance(s, 1, 3), 2);
        assert_eq!(idx.distance(s, 0, 0), 4);
        assert_eq!(idx.distance(s, 0, 3), INFINITE_DISTANCE);
    }

    #[test]
    fn eps_grammar_zero_on_diagonal() {
        let g = parse_grammar("S -> eps").unwrap();
        let graph = parse_graph("@vertices 4\n", &g).unwrap();
        let idx = lindist_build(&g, &graph).unwrap();
        let s = g.start();
        for u in 0..4u32 {
            for v in 0..4u32 {
                let expect = if u == v { 0 } else { INFINITE_DISTANCE };
                assert_eq!(idx.distance(s, u, v), expect);
            }
        }
        let p = idx.shortest_accepted_path(2, 2).unwrap().unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn a_plus_path_graph_distances() {
        let g = parse_grammar("S -> a S | a").unwrap();
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 a", &g).unwrap();
        let idx = lindist_build(&g, &graph).unwrap();
        let s = g.start();
        for i in 0..4u32 {
            for j in 0..4u32 {
                let expect = if i < j { j - i } else { INFINITE_DISTANCE };
                assert_eq!(idx.distance(s, i, j), expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn extracted_shortest_path_is_exact_and_accepted() {
        let g = to_talnf(&parse_grammar("S -> a S b | a b").unwrap()).unwrap();
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 b\n3 0 b", &g).unwrap();
        let idx = lindist_build(&g, &graph).unwrap();
        let p = idx.shortest_accepted_path(1, 3).unwrap().unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.is_valid_walk(&graph));
        assert!(derives(&g, g.start(), &p.trace()));
        assert!(idx.shortest_accepted_path(0, 3).unwrap().is_none());
        assert!(idx.shortest_accepted_path(0, 99).is_err());
    }

    #[test]
    fn settles_each_triple_once() {
        let g = to_talnf(&parse_grammar("S -> a S b | a b").unwrap()).unwrap();
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 b\n3 0 b\n3 2 a", &g).unwrap();
        let idx = lindist_build(&g, &graph).unwrap();
        assert_eq!(idx.stats.dequeues, idx.stats.entries);
        assert!(idx.stats.dequeues <= g.num_nonterminals() * 16);
    }
}
