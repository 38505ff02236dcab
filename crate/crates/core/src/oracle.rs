//! Independent reference implementations for the property suites: a naive
//! full-rescan fixpoint over the inference rules and exhaustive bounded walk
//! enumeration with membership checking. Deliberately simple; everything here
//! trades speed for obviousness.

use thiserror::Error;

use crate::grammar::{recognize, to_cnf, Grammar, NtId};
use crate::graph::{Edge, LabeledGraph, Path};
use crate::relations::RelationSet;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("naive fixpoint supports only CNF/TALNF production shapes")]
    UnsupportedForm,
    #[error("walk enumeration exceeded its expansion budget ({0} expansions)")]
    BudgetExceeded(u64),
}

/// Expansion budget for [`enumerate_accepted`]; the walk count is exponential
/// in the length bound, so runaway instances fail fast instead of hanging.
pub const ENUMERATION_BUDGET: u64 = 2_000_000;

/// Least fixpoint of the grammar's inference rules, computed by full re-scan
/// rounds over plain boolean grids (no worklist, no witnesses). Accepts any
/// mix of CNF and TALNF production shapes.
pub fn naive_fixpoint(g: &Grammar, graph: &LabeledGraph) -> Result<RelationSet, OracleError> {
    enum Rule {
        Term(NtId, crate::grammar::TermId),
        Eps(NtId),
        Bin(NtId, NtId, NtId),
        TermNt(NtId, crate::grammar::TermId, NtId),
        NtTerm(NtId, NtId, crate::grammar::TermId),
    }

    let mut rules = Vec::new();
    for p in g.productions() {
        let rule = if let Some(t) = p.as_terminal_rule() {
            Rule::Term(p.lhs, t)
        } else if let Some((b, c)) = p.as_binary_rule() {
            Rule::Bin(p.lhs, b, c)
        } else if let Some((a, b)) = p.as_term_nt_rule() {
            Rule::TermNt(p.lhs, a, b)
        } else if let Some((b, a)) = p.as_nt_term_rule() {
            Rule::NtTerm(p.lhs, b, a)
        } else if p.is_eps() && p.lhs == g.start() {
            Rule::Eps(p.lhs)
        } else {
            return Err(OracleError::UnsupportedForm);
        };
        rules.push(rule);
    }

    let n = graph.num_vertices();
    let mut rel = vec![vec![false; n * n]; g.num_nonterminals()];
    let mut changed = true;
    while changed {
        changed = false;
        let set = |rel: &mut Vec<Vec<bool>>, a: NtId, u: usize, v: usize| {
            let slot = &mut rel[a.index()][u * n + v];
            if !*slot {
                *slot = true;
                true
            } else {
                false
            }
        };
        for rule in &rules {
            match *rule {
                Rule::Term(a, t) => {
                    for e in graph.edges() {
                        if e.label == t {
                            changed |= set(&mut rel, a, e.from as usize, e.to as usize);
                        }
                    }
                }
                Rule::Eps(a) => {
                    for u in 0..n {
                        changed |= set(&mut rel, a, u, u);
                    }
                }
                Rule::Bin(a, b, c) => {
                    for u in 0..n {
                        for m in 0..n {
                            if !rel[b.index()][u * n + m] {
                                continue;
                            }
                            for v in 0..n {
                                if rel[c.index()][m * n + v] {
                                    changed |= set(&mut rel, a, u, v);
                                }
                            }
                        }
                    }
                }
                Rule::TermNt(a, t, b) => {
                    for e in graph.edges() {
                        if e.label != t {
                            continue;
                        }
                        for v in 0..n {
                            if rel[b.index()][e.to as usize * n + v] {
                                changed |= set(&mut rel, a, e.from as usize, v);
                            }
                        }
                    }
                }
                Rule::NtTerm(a, b, t) => {
                    for e in graph.edges() {
                        if e.label != t {
                            continue;
                        }
                        for u in 0..n {
                            if rel[b.index()][u * n + e.from as usize] {
                                changed |= set(&mut rel, a, u, e.to as usize);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut out = RelationSet::new(g.num_nonterminals(), n);
    for (a, grid) in rel.iter().enumerate() {
        for u in 0..n {
            for v in 0..n {
                if grid[u * n + v] {
                    out.set(NtId(a as u32), u as u32, v as u32);
                }
            }
        }
    }
    Ok(out)
}

/// All walks from `s` to `t` of length at most `max_len` whose trace the
/// grammar accepts from its start symbol, sorted by length. Ground truth for
/// the shortest-path index on small instances. `g` may be any grammar; it is
/// converted to CNF internally for the membership checks.
pub fn enumerate_accepted(
    g: &Grammar,
    graph: &LabeledGraph,
    s: u32,
    t: u32,
    max_len: usize,
) -> Result<Vec<(usize, Path)>, OracleError> {
    assert!(
        max_len <= 12,
        "walk enumeration is exponential; keep the bound small"
    );
    let cnf = if g.is_cnf() { g.clone() } else { to_cnf(g) };

    struct WalkEnum<'a> {
        graph: &'a LabeledGraph,
        cnf: &'a Grammar,
        start: u32,
        target: u32,
        max_len: usize,
        edges: Vec<Edge>,
        accepted: Vec<(usize, Path)>,
        expansions: u64,
    }

    impl WalkEnum<'_> {
        fn dfs(&mut self, at: u32) -> Result<(), OracleError> {
            if at == self.target {
                let path = Path {
                    start: self.start,
                    edges: self.edges.clone(),
                };
                if recognize(self.cnf, &path.trace()) {
                    self.accepted.push((path.len(), path));
                }
            }
            if self.edges.len() == self.max_len {
                return Ok(());
            }
            for label_idx in 0..self.graph.num_labels() {
                let label = crate::grammar::TermId(label_idx as u32);
                for &next in self.graph.out_neighbors(label, at) {
                    self.expansions += 1;
                    if self.expansions > ENUMERATION_BUDGET {
                        return Err(OracleError::BudgetExceeded(ENUMERATION_BUDGET));
                    }
                    self.edges.push(Edge {
                        from: at,
                        to: next,
                        label,
                    });
                    self.dfs(next)?;
                    self.edges.pop();
                }
            }
            Ok(())
        }
    }

    let mut walk = WalkEnum {
        graph,
        cnf: &cnf,
        start: s,
        target: t,
        max_len,
        edges: Vec::new(),
        accepted: Vec::new(),
        expansions: 0,
    };
    if (s as usize) < graph.num_vertices() {
        walk.dfs(s)?;
    }
    let mut accepted = walk.accepted;
    accepted.sort_by_key(|(len, _)| *len);
    Ok(accepted)
}
