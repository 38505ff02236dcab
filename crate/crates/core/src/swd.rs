//! Shared witness DAG: hash-consed Edge/Eps/Concat nodes over an append-only
//! arena, with one root handle per true relation entry. Expansion yields the
//! explicit path; EmitSLP yields a straight-line program for the trace.

use std::collections::HashMap;

use crate::grammar::{NtId, TermId};
use crate::graph::{Edge, Path};
use crate::relations::{IndexError, RelationSet, WitnessRecord, WitnessTable};

/// Stable handle into the node arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DagNode {
    Edge { from: u32, to: u32, label: TermId },
    Eps { at: u32 },
    Concat { left: NodeId, right: NodeId },
}

/// Hash-consed witness DAG. Structurally identical constructor calls return
/// the same handle; nodes are immutable once created, so handles created
/// earlier never reference later ones and the graph is acyclic.
#[derive(Debug, Default)]
pub struct WitnessDag {
    nodes: Vec<DagNode>,
    spans: Vec<(u32, u32)>,
    cons: HashMap<DagNode, NodeId>,
    roots: HashMap<(NtId, u32, u32), NodeId>,
}

impl WitnessDag {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, node: DagNode, span: (u32, u32)) -> NodeId {
        if let Some(&id) = self.cons.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.spans.push(span);
        self.cons.insert(node, id);
        id
    }

    pub fn edge(&mut self, from: u32, to: u32, label: TermId) -> NodeId {
        self.intern(DagNode::Edge { from, to, label }, (from, to))
    }

    /// Empty path at a vertex. Eps nodes are per-vertex because Concat
    /// endpoints must compose.
    pub fn eps(&mut self, at: u32) -> NodeId {
        self.intern(DagNode::Eps { at }, (at, at))
    }

    pub fn concat(&mut self, left: NodeId, right: NodeId) -> NodeId {
        let (ls, le) = self.spans[left.index()];
        let (rs, re) = self.spans[right.index()];
        assert_eq!(le, rs, "concat endpoints do not compose");
        self.intern(DagNode::Concat { left, right }, (ls, re))
    }

    pub fn node(&self, id: NodeId) -> Option<DagNode> {
        self.nodes.get(id.index()).copied()
    }

    /// `(start vertex, end vertex)` of the path a node denotes.
    pub fn span(&self, id: NodeId) -> (u32, u32) {
        self.spans[id.index()]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn root(&self, nt: NtId, u: u32, v: u32) -> Option<NodeId> {
        self.roots.get(&(nt, u, v)).copied()
    }

    pub fn roots(&self) -> impl Iterator<Item = (&(NtId, u32, u32), &NodeId)> {
        self.roots.iter()
    }
}

/// Convert a witness table into a shared DAG: every true entry gets a root.
/// Entries are processed in insertion order, so the sub-witnesses a record
/// references are already materialized when it is reached.
pub fn swd_wrap(
    relations: &RelationSet,
    witnesses: &WitnessTable,
) -> Result<WitnessDag, IndexError> {
    let mut dag = WitnessDag::new();
    for &(nt, u, v) in witnesses.order() {
        let rec = witnesses
            .get(nt, u, v)
            .ok_or(IndexError::MissingWitness { nt, u, v })?;
        let node = match rec {
            WitnessRecord::Term { label } => dag.edge(u, v, label),
            WitnessRecord::Eps => dag.eps(u),
            WitnessRecord::Bin { left, right, mid } => {
                let l = dag.root(left, u, mid).ok_or(IndexError::MissingWitness {
                    nt: left,
                    u,
                    v: mid,
                })?;
                let r = dag.root(right, mid, v).ok_or(IndexError::MissingWitness {
                    nt: right,
                    u: mid,
                    v,
                })?;
                dag.concat(l, r)
            }
            WitnessRecord::LinL { label, via, body } => {
                let e = dag.edge(u, via, label);
                let b = dag.root(body, via, v).ok_or(IndexError::MissingWitness {
                    nt: body,
                    u: via,
                    v,
                })?;
                dag.concat(e, b)
            }
            WitnessRecord::LinR { body, label, via } => {
                let b = dag.root(body, u, via).ok_or(IndexError::MissingWitness {
                    nt: body,
                    u,
                    v: via,
                })?;
                let e = dag.edge(via, v, label);
                dag.concat(b, e)
            }
        };
        dag.roots.insert((nt, u, v), node);
    }

    // The table must cover exactly the true entries.
    if witnesses.len() != relations.true_count() {
        for a in 0..relations.num_nonterminals() {
            let nt = NtId(a as u32);
            for u in 0..relations.num_vertices() as u32 {
                for v in 0..relations.num_vertices() as u32 {
                    if relations.get(nt, u, v) && dag.root(nt, u, v).is_none() {
                        return Err(IndexError::MissingWitness { nt, u, v });
                    }
                }
            }
        }
    }
    Ok(dag)
}

/// Expand a root to its explicit path. Each output edge is visited exactly
/// once; an explicit stack avoids recursion on deep chains.
pub fn expand_explicit(dag: &WitnessDag, root: NodeId) -> Result<Path, IndexError> {
    if root.index() >= dag.node_count() {
        return Err(IndexError::InvalidHandle(root.0));
    }
    let start = dag.span(root).0;
    let mut edges = Vec::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        match dag.nodes[id.index()] {
            DagNode::Edge { from, to, label } => edges.push(Edge { from, to, label }),
            DagNode::Eps { .. } => {}
            DagNode::Concat { left, right } => {
                stack.push(right);
                stack.push(left);
            }
        }
    }
    Ok(Path { start, edges })
}

/// One straight-line-program rule; `Concat` operands index earlier rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlpRule {
    Term(TermId),
    Eps,
    Concat(usize, usize),
}

/// A straight-line program: every rule references strictly earlier rules and
/// the last rule is the start symbol, so expansion is well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    pub rules: Vec<SlpRule>,
}

impl Slp {
    pub fn start(&self) -> usize {
        self.rules.len() - 1
    }

    /// Full expansion of the start rule. Intended for tests and small
    /// witnesses; the result length can be exponential in the rule count.
    pub fn expand(&self) -> Vec<TermId> {
        let mut exps: Vec<Vec<TermId>> = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            let e = match *rule {
                SlpRule::Term(t) => vec![t],
                SlpRule::Eps => Vec::new(),
                SlpRule::Concat(p, q) => {
                    let mut e = exps[p].clone();
                    e.extend_from_slice(&exps[q]);
                    e
                }
            };
            exps.push(e);
        }
        exps.pop().unwrap_or_default()
    }

    /// Text form, one rule per line, start symbol last:
    /// `Xi -> a`, `Xi -> eps`, or `Xi -> Xj Xk`.
    pub fn to_text(&self, term_names: &[String]) -> String {
        let mut s = String::new();
        for (i, rule) in self.rules.iter().enumerate() {
            let line = match *rule {
                SlpRule::Term(t) => format!("X{} -> {}", i + 1, term_names[t.index()]),
                SlpRule::Eps => format!("X{} -> eps", i + 1),
                SlpRule::Concat(p, q) => format!("X{} -> X{} X{}", i + 1, p + 1, q + 1),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }
}

/// Emit a straight-line program for the trace of `root`: nodes reachable from
/// the root are topologically ordered (children first) and each becomes one
/// rule. Runtime is linear in the size of the reachable sub-DAG.
pub fn emit_slp(dag: &WitnessDag, root: NodeId) -> Result<Slp, IndexError> {
    if root.index() >= dag.node_count() {
        return Err(IndexError::InvalidHandle(root.0));
    }
    let mut rule_of: HashMap<NodeId, usize> = HashMap::new();
    let mut rules = Vec::new();
    // Iterative post-order; `expanded` marks nodes whose children are done.
    let mut stack = vec![(root, false)];
    while let Some((id, expanded)) = stack.pop() {
        if rule_of.contains_key(&id) {
            continue;
        }
        match dag.nodes[id.index()] {
            DagNode::Edge { label, .. } => {
                rule_of.insert(id, rules.len());
                rules.push(SlpRule::Term(label));
            }
            DagNode::Eps { .. } => {
                rule_of.insert(id, rules.len());
                rules.push(SlpRule::Eps);
            }
            DagNode::Concat { left, right } => {
                if expanded {
                    let p = rule_of[&left];
                    let q = rule_of[&right];
                    rule_of.insert(id, rules.len());
                    rules.push(SlpRule::Concat(p, q));
                } else {
                    stack.push((id, true));
                    stack.push((right, false));
                    stack.push((left, false));
                }
            }
        }
    }
    Ok(Slp { rules })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, to_cnf};
    use crate::graph::parse_graph;
    use crate::relations::extract_path;
    use crate::sat::sat_build;

    #[test]
    fn hash_consing_shares_nodes() {
        let mut dag = WitnessDag::new();
        let e1 = dag.edge(0, 1, TermId(0));
        let e2 = dag.edge(0, 1, TermId(0));
        assert_eq!(e1, e2);
        assert_eq!(dag.node_count(), 1);
        let e3 = dag.edge(1, 2, TermId(1));
        let c1 = dag.concat(e1, e3);
        let c2 = dag.concat(e2, e3);
        assert_eq!(c1, c2);
        assert_eq!(dag.node_count(), 3);
    }

    #[test]
    #[should_panic(expected = "do not compose")]
    fn concat_requires_matching_endpoints() {
        let mut dag = WitnessDag::new();
        let a = dag.edge(0, 1, TermId(0));
        let b = dag.edge(2, 3, TermId(0));
        dag.concat(a, b);
    }

    #[test]
    fn expand_trivial_nodes() {
        let mut dag = WitnessDag::new();
        let eps = dag.eps(7);
        let p = expand_explicit(&dag, eps).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.start, 7);

        let a = dag.edge(1, 2, TermId(0));
        let b = dag.edge(2, 3, TermId(1));
        let c = dag.concat(a, b);
        let p = expand_explicit(&dag, c).unwrap();
        assert_eq!(p.start, 1);
        assert_eq!(p.end(), 3);
        assert_eq!(p.trace(), vec![TermId(0), TermId(1)]);
    }

    #[test]
    fn slp_for_single_edge_and_pair() {
        let mut dag = WitnessDag::new();
        let a = dag.edge(1, 2, TermId(0));
        let slp = emit_slp(&dag, a).unwrap();
        assert_eq!(slp.rules, vec![SlpRule::Term(TermId(0))]);
        assert_eq!(slp.start(), 0);

        let b = dag.edge(2, 3, TermId(1));
        let c = dag.concat(a, b);
        let slp = emit_slp(&dag, c).unwrap();
        assert_eq!(slp.rules.len(), 3);
        assert_eq!(slp.expand(), vec![TermId(0), TermId(1)]);
        let text = slp.to_text(&["a".into(), "b".into()]);
        assert_eq!(text, "X1 -> a\nX2 -> b\nX3 -> X1 X2\n");
    }

    #[test]
    fn doubling_chain_compresses() {
        // Self-loop edge doubled k times: explicit length 2^k, DAG size k+1.
        let mut dag = WitnessDag::new();
        let mut node = dag.edge(0, 0, TermId(0));
        let depth = 10;
        for _ in 0..depth {
            node = dag.concat(node, node);
        }
        assert_eq!(dag.node_count(), depth + 1);
        let slp = emit_slp(&dag, node).unwrap();
        assert_eq!(slp.rules.len(), depth + 1);
        assert!(slp.rules.len() <= 2 * depth + 1);
        let expanded = slp.expand();
        assert_eq!(expanded.len(), 1 << depth);
        let explicit = expand_explicit(&dag, node).unwrap();
        assert_eq!(explicit.len(), 1 << depth);
        assert_eq!(explicit.trace(), expanded);
    }

    #[test]
    fn wrap_sat_index_and_compare_expansions() {
        let g = to_cnf(&parse_grammar("S -> a S b | a b").unwrap());
        let graph = parse_graph("0 1 a\n1 2 a\n2 3 b\n3 0 b", &g).unwrap();
        let built = sat_build(&g, &graph).unwrap();
        let dag = swd_wrap(&built.relations, &built.witnesses).unwrap();
        let s = g.start();
        let root = dag.root(s, 0, 0).unwrap();
        let via_dag = expand_explicit(&dag, root).unwrap();
        let via_table = extract_path(&built.witnesses, s, 0, 0).unwrap();
        assert_eq!(via_dag, via_table);
        assert_eq!(via_dag.len(), 4); // the 0 -> 1 -> 2 -> 3 -> 0 walk
                                      // Every true entry has a root; SLP expansion matches the explicit trace.
        for &(nt, u, v) in built.witnesses.order() {
            let r = dag.root(nt, u, v).unwrap();
            let slp = emit_slp(&dag, r).unwrap();
            assert_eq!(slp.expand(), expand_explicit(&dag, r).unwrap().trace());
        }
    }

    #[test]
    fn shared_subwitness_uses_one_handle() {
        // Two Bin entries over the same (B, 2, 3) sub-witness.
        let (s, a, b) = (NtId(0), NtId(1), NtId(2));
        let mut rels = RelationSet::new(3, 4);
        let mut w = WitnessTable::new(3, 4);
        for (nt, u, v, rec) in [
            (a, 1, 2, WitnessRecord::Term { label: TermId(0) }),
            (a, 0, 2, WitnessRecord::Term { label: TermId(0) }),
            (b, 2, 3, WitnessRecord::Term { label: TermId(1) }),
            (
                s,
                1,
                3,
                WitnessRecord::Bin {
                    left: a,
                    right: b,
                    mid: 2,
                },
            ),
            (
                s,
                0,
                3,
                WitnessRecord::Bin {
                    left: a,
                    right: b,
                    mid: 2,
                },
            ),
        ] {
            rels.set(nt, u, v);
            w.insert(nt, u, v, rec);
        }
        let dag = swd_wrap(&rels, &w).unwrap();
        let r1 = dag.root(s, 1, 3).unwrap();
        let r2 = dag.root(s, 0, 3).unwrap();
        let shared = dag.root(b, 2, 3).unwrap();
        for r in [r1, r2] {
            match dag.node(r).unwrap() {
                DagNode::Concat { right, .. } => assert_eq!(right, shared),
                other => panic!("expected concat, got {other:?}"),
            }
        }
    }

    #[test]
    fn wrap_single_term_entry() {
        let mut rels = RelationSet::new(1, 2);
        rels.set(NtId(0), 0, 1);
        let mut w = WitnessTable::new(1, 2);
        w.insert(NtId(0), 0, 1, WitnessRecord::Term { label: TermId(0) });
        let dag = swd_wrap(&rels, &w).unwrap();
        assert_eq!(dag.node_count(), 1);
        assert!(matches!(
            dag.node(dag.root(NtId(0), 0, 1).unwrap()),
            Some(DagNode::Edge { from: 0, to: 1, .. })
        ));
    }

    #[test]
    fn wrap_detects_missing_witness() {
        let mut rels = RelationSet::new(1, 2);
        rels.set(NtId(0), 0, 1);
        let w = WitnessTable::new(1, 2);
        assert!(matches!(
            swd_wrap(&rels, &w),
            Err(IndexError::MissingWitness { .. })
        ));
    }
}
