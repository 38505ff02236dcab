//! Terminal-anchored worklist propagation for TALNF grammars.
//!
//! On dequeue of `(B, x, v)`, a rule `A -> a B` scans the `a`-labeled
//! predecessors of `x` and a rule `A -> B a` scans the `a`-labeled successors
//! of `v`. Productions are pre-indexed by their body nonterminal, so a
//! dequeue touches only the rules that can fire; the inner loops iterate
//! adjacency lists rather than whole vertex rows, which is where the
//! subcubic bound on sparse graphs comes from.

use std::collections::VecDeque;

use crate::grammar::{Grammar, NtId, TermId};
use crate::graph::LabeledGraph;
use crate::relations::{
    BuildStats, BuiltIndex, IndexError, RelationSet, WitnessRecord, WitnessTable,
};

struct LinState {
    rels: RelationSet,
    witnesses: WitnessTable,
    queue: VecDeque<(NtId, u32, u32)>,
}

impl LinState {
    fn insert(&mut self, nt: NtId, u: u32, v: u32, rec: WitnessRecord) {
        if self.rels.set(nt, u, v) {
            self.witnesses.insert(nt, u, v, rec);
            self.queue.push_back((nt, u, v));
        }
    }
}

/// Build the all-pairs relations and witness table for a TALNF grammar in
/// time proportional to productions x edges x vertices.
pub fn lin_build(g: &Grammar, graph: &LabeledGraph) -> Result<BuiltIndex, IndexError> {
    if !g.is_talnf() {
        return Err(IndexError::GrammarNotTalnf);
    }
    let n = graph.num_vertices();
    let num_nts = g.num_nonterminals();
    let mut st = LinState {
        rels: RelationSet::new(num_nts, n),
        witnesses: WitnessTable::new(num_nts, n),
        queue: VecDeque::new(),
    };
    let mut stats = BuildStats::default();

    // Dispatch tables: rules indexed by the nonterminal on their right-hand
    // side, so each dequeue looks at exactly the applicable productions.
    let mut by_term: Vec<Vec<NtId>> = vec![Vec::new(); g.num_terminals()];
    let mut left_rules: Vec<Vec<(NtId, TermId)>> = vec![Vec::new(); num_nts]; // A -> a B, keyed by B
    let mut right_rules: Vec<Vec<(NtId, TermId)>> = vec![Vec::new(); num_nts]; // A -> B a, keyed by B
    for p in g.productions() {
        if let Some(t) = p.as_terminal_rule() {
            by_term[t.index()].push(p.lhs);
        } else if let Some((a, b)) = p.as_term_nt_rule() {
            left_rules[b.index()].push((p.lhs, a));
        } else if let Some((b, a)) = p.as_nt_term_rule() {
            right_rules[b.index()].push((p.lhs, a));
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

    while let Some((b, x, v)) = st.queue.pop_front() {
        stats.dequeues += 1;
        for &(a, label) in &left_rules[b.index()] {
            let preds = graph.in_neighbors(label, x);
            stats.inner_iterations += preds.len() as u64;
            for &u in preds {
                st.insert(
                    a,
                    u,
                    v,
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
                st.insert(
                    a,
                    x,
                    w,
                    WitnessRecord::LinR {
                        body: b,
                        label,
                        via: v,
                    },
                );
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
