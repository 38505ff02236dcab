//! Baseline worklist saturation for CNF grammars.
//!
//! Each newly true entry `(X, i, j)` is enqueued once. Dequeuing applies every
//! binary rule `A -> B C`: with `X = B` it scans row `j` of `M_C` for
//! successors, with `X = C` it scans column `i` of `M_B` (via a transposed
//! copy) for predecessors. Witnesses are first-writer-wins, so they are
//! arbitrary valid derivations, not shortest ones.

use std::collections::VecDeque;

use crate::grammar::{Grammar, NtId};
use crate::graph::LabeledGraph;
use crate::relations::{
    iter_set_bits, BitMatrix, BuildStats, BuiltIndex, IndexError, RelationSet, WitnessRecord,
    WitnessTable,
};

struct SatState {
    rels: RelationSet,
    transposed: Vec<BitMatrix>,
    witnesses: WitnessTable,
    queue: VecDeque<(NtId, u32, u32)>,
}

impl SatState {
    fn insert(&mut self, nt: NtId, u: u32, v: u32, rec: WitnessRecord) {
        if self.rels.set(nt, u, v) {
            self.transposed[nt.index()].set(v as usize, u as usize);
            self.witnesses.insert(nt, u, v, rec);
            self.queue.push_back((nt, u, v));
        }
    }
}

/// Build the all-pairs relations and witness table for a CNF grammar.
/// Instrumentation counts the cells examined by the row/column scans, the
/// quantity behind the cubic preprocessing bound.
pub fn sat_build(g: &Grammar, graph: &LabeledGraph) -> Result<BuiltIndex, IndexError> {
    if !g.is_cnf() {
        return Err(IndexError::GrammarNotCnf);
    }
    let n = graph.num_vertices();
    let num_nts = g.num_nonterminals();
    let mut st = SatState {
        rels: RelationSet::new(num_nts, n),
        transposed: vec![BitMatrix::new(n); num_nts],
        witnesses: WitnessTable::new(num_nts, n),
        queue: VecDeque::new(),
    };
    let mut stats = BuildStats::default();

    // Terminal rules, grouped by label so each edge list is scanned once per
    // producing nonterminal.
    let mut by_term: Vec<Vec<NtId>> = vec![Vec::new(); g.num_terminals()];
    let mut binary: Vec<(NtId, NtId, NtId)> = Vec::new();
    for p in g.productions() {
        if let Some(t) = p.as_terminal_rule() {
            by_term[t.index()].push(p.lhs);
        } else if let Some((b, c)) = p.as_binary_rule() {
            binary.push((p.lhs, b, c));
        }
    }
    for e in graph.edges() {
        for &a in &by_term[e.label.index()] {
            st.insert(a, e.from, e.to, WitnessRecord::Term { label: e.label });
        }
    }
    if g.has_eps_rule() {
        for u in 0..n as u32 {
            st.insert(g.start(), u, u, WitnessRecord::Eps);
        }
    }

    let mut scratch = vec![0u64; n.div_ceil(64)];
    while let Some((x, i, j)) = st.queue.pop_front() {
        stats.dequeues += 1;
        for &(a, b, c) in &binary {
            if x == b {
                // New fact (B, i, j): combine with row j of M_C.
                stats.inner_iterations += n as u64;
                scratch.copy_from_slice(st.rels.matrix(c).row_words(j as usize));
                for k in iter_set_bits(&scratch) {
                    st.insert(
                        a,
                        i,
                        k as u32,
                        WitnessRecord::Bin {
                            left: b,
                            right: c,
                            mid: j,
                        },
                    );
                }
            }
            if x == c {
                // New fact (C, i, j): combine with column i of M_B.
                stats.inner_iterations += n as u64;
                scratch.copy_from_slice(st.transposed[b.index()].row_words(i as usize));
                for h in iter_set_bits(&scratch) {
                    st.insert(
                        a,
                        h as u32,
                        j,
                        WitnessRecord::Bin {
                            left: b,
                            right: c,
                            mid: i,
                        },
                    );
                }
            }
        }
    }

    stats.entries = st.witnesses.len();
    debug_assert_eq!(stats.entries, st.rels.true_count());
    Ok(BuiltIndex {
        relations: st.rels,
        witnesses: st.witnesses,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, to_cnf};
    use crate::graph::parse_graph;
    use crate::relations::extract_path;

    #[test]
    fn eps_grammar_yields_identity() {
        let g = parse_grammar("S -> eps").unwrap();
        assert!(g.is_cnf());
        let graph = parse_graph("@vertices 3\n", &g).unwrap();
        let built = sat_build(&g, &graph).unwrap();
        let s = g.start();
        for u in 0..3u32 {
            for v in 0..3u32 {
                assert_eq!(built.relations.get(s, u, v), u == v);
            }
        }
        assert_eq!(built.stats.entries, 3);
        for u in 0..3u32 {
            assert_eq!(built.witnesses.get(s, u, u), Some(WitnessRecord::Eps));
        }
    }

    #[test]
    fn anbn_on_four_cycle() {
        let orig = parse_grammar("S -> a S b | a b").unwrap();
        let g = to_cnf(&orig);
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 b\n3 0 b", &g).unwrap();
        let built = sat_build(&g, &graph).unwrap();
        let s = g.start();
        assert!(built.relations.get(s, 1, 3)); // trace "ab"
        assert!(built.relations.get(s, 0, 0)); // trace "aabb"
        assert!(!built.relations.get(s, 0, 3));
        // Query interface.
        assert!(built.relations.query(s, 1, 3).unwrap());
        assert!(!built.relations.query(s, 0, 1).unwrap());
        assert!(built.relations.query(s, 99, 0).is_err());
        // Witness for (1, 3) is the two-edge path.
        let p = extract_path(&built.witnesses, s, 1, 3).unwrap();
        assert!(p.is_valid_walk(&graph));
        assert_eq!(p.start, 1);
        assert_eq!(p.end(), 3);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn dyck_on_single_open_edge_stays_diagonal() {
        let g = to_cnf(&parse_grammar("S -> S S | ( S ) | eps").unwrap());
        let graph = parse_graph("0 1 (", &g).unwrap();
        let built = sat_build(&g, &graph).unwrap();
        let s = g.start();
        for u in 0..2u32 {
            for v in 0..2u32 {
                assert_eq!(built.relations.get(s, u, v), u == v, "({u},{v})");
            }
        }
    }

    #[test]
    fn rejects_non_cnf_grammar() {
        let g = parse_grammar("S -> a S b").unwrap();
        let graph = parse_graph("0 1 a", &g).unwrap();
        assert!(matches!(
            sat_build(&g, &graph),
            Err(IndexError::GrammarNotCnf)
        ));
    }

    #[test]
    fn dequeues_bounded_by_entries() {
        let g = to_cnf(&parse_grammar("S -> a S b | a b").unwrap());
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 b\n3 0 b\n1 0 b", &g).unwrap();
        let built = sat_build(&g, &graph).unwrap();
        assert_eq!(built.stats.dequeues, built.stats.entries);
        assert!(built.stats.dequeues <= g.num_nonterminals() * 16);
    }
}
