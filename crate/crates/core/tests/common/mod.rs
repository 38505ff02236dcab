//! Shared instance generators and helpers for the randomized suites.

#![allow(dead_code)]

use cflr_core::{Edge, Grammar, GrammarBuilder, LabeledGraph, Symbol, TermId};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const NT_NAMES: [&str; 4] = ["S", "A", "B", "C"];
const TERM_NAMES: [&str; 3] = ["a", "b", "c"];

fn seed_builder(rng: &mut ChaCha8Rng, max_nts: usize) -> (GrammarBuilder, usize, usize) {
    let num_nts = rng.gen_range(1..=max_nts);
    let num_terms = rng.gen_range(1..=TERM_NAMES.len());
    let mut b = GrammarBuilder::new();
    for name in NT_NAMES.iter().take(num_nts) {
        b.nonterminal(name);
    }
    for name in TERM_NAMES.iter().take(num_terms) {
        b.terminal(name);
    }
    (b, num_nts, num_terms)
}

/// Random CNF grammar: |N| <= 4, |P| <= 8, |Sigma| <= 3. The epsilon rule is
/// added only when the start symbol stays off every right-hand side, keeping
/// the CNF checker satisfied.
pub fn gen_cnf_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    loop {
        let (mut b, num_nts, num_terms) = seed_builder(rng, 4);
        let p_count = rng.gen_range(1..=7);
        let mut start_on_rhs = false;
        for _ in 0..p_count {
            let lhs = nt_id(&mut b, rng.gen_range(0..num_nts));
            if rng.gen_bool(0.55) {
                let l = rng.gen_range(0..num_nts);
                let r = rng.gen_range(0..num_nts);
                start_on_rhs |= l == 0 || r == 0;
                let rhs = vec![Symbol::Nt(nt_id(&mut b, l)), Symbol::Nt(nt_id(&mut b, r))];
                b.production(lhs, rhs);
            } else {
                let t = term_id(&mut b, rng.gen_range(0..num_terms));
                b.production(lhs, vec![Symbol::Term(t)]);
            }
        }
        if rng.gen_bool(0.3) && !start_on_rhs {
            let s = nt_id(&mut b, 0);
            b.production(s, Vec::new());
        }
        let s = nt_id(&mut b, 0);
        b.start(s);
        let g = b.build();
        if g.is_cnf() && !g.productions().is_empty() {
            return g;
        }
    }
}

/// Random linear grammar with size measure <= 12; includes epsilon and unit
/// productions so the normalization pipeline gets exercised end to end.
pub fn gen_linear_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let (mut b, num_nts, num_terms) = seed_builder(rng, 4);
    let mut size = 0usize;
    let mut prods = 0usize;
    while prods < 8 {
        let lhs = nt_id(&mut b, rng.gen_range(0..num_nts));
        let roll: f64 = rng.gen();
        let rhs: Vec<Symbol> = if roll < 0.15 {
            Vec::new()
        } else if roll < 0.30 {
            vec![Symbol::Nt(nt_id(&mut b, rng.gen_range(0..num_nts)))]
        } else if roll < 0.65 {
            let len = rng.gen_range(1..=3);
            (0..len)
                .map(|_| Symbol::Term(term_id(&mut b, rng.gen_range(0..num_terms))))
                .collect()
        } else {
            let p = rng.gen_range(0..=2);
            let q = rng.gen_range(0..=2);
            let mut rhs = Vec::new();
            for _ in 0..p {
                rhs.push(Symbol::Term(term_id(&mut b, rng.gen_range(0..num_terms))));
            }
            rhs.push(Symbol::Nt(nt_id(&mut b, rng.gen_range(0..num_nts))));
            for _ in 0..q {
                rhs.push(Symbol::Term(term_id(&mut b, rng.gen_range(0..num_terms))));
            }
            rhs
        };
        if size + rhs.len() > 12 {
            break;
        }
        size += rhs.len();
        prods += 1;
        b.production(lhs, rhs);
        if prods >= 1 && rng.gen_bool(0.25) {
            break;
        }
    }
    if prods == 0 {
        let lhs = nt_id(&mut b, 0);
        let t = term_id(&mut b, 0);
        b.production(lhs, vec![Symbol::Term(t)]);
    }
    let s = nt_id(&mut b, 0);
    b.start(s);
    let g = b.build();
    assert!(g.is_linear());
    g
}

/// Random grammar already in TALNF.
pub fn gen_talnf_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let (mut b, num_nts, num_terms) = seed_builder(rng, 4);
    let p_count = rng.gen_range(1..=7);
    for _ in 0..p_count {
        let lhs = nt_id(&mut b, rng.gen_range(0..num_nts));
        let t = Symbol::Term(term_id(&mut b, rng.gen_range(0..num_terms)));
        let rhs = match rng.gen_range(0..3) {
            0 => vec![t],
            1 => vec![t, Symbol::Nt(nt_id(&mut b, rng.gen_range(0..num_nts)))],
            _ => vec![Symbol::Nt(nt_id(&mut b, rng.gen_range(0..num_nts))), t],
        };
        b.production(lhs, rhs);
    }
    if rng.gen_bool(0.3) {
        let s = nt_id(&mut b, 0);
        b.production(s, Vec::new());
    }
    let s = nt_id(&mut b, 0);
    b.start(s);
    let g = b.build();
    assert!(g.is_talnf());
    g
}

/// Random graph over the grammar's alphabet: up to `max_n` vertices and
/// `max_m` distinct labeled edges.
pub fn gen_graph(rng: &mut ChaCha8Rng, g: &Grammar, max_n: usize, max_m: usize) -> LabeledGraph {
    let n = rng.gen_range(2..=max_n);
    let num_labels = g.num_terminals();
    let mut edges = Vec::new();
    if num_labels > 0 {
        let m = rng.gen_range(0..=max_m);
        for _ in 0..m {
            edges.push(Edge {
                from: rng.gen_range(0..n) as u32,
                to: rng.gen_range(0..n) as u32,
                label: TermId(rng.gen_range(0..num_labels) as u32),
            });
        }
    }
    LabeledGraph::from_edges(n, num_labels, edges)
}

/// Directed path 0 -> 1 -> ... -> n-1 with every edge labeled by the
/// grammar's first terminal.
pub fn path_graph(g: &Grammar, n: usize) -> LabeledGraph {
    let label = TermId(0);
    assert!(g.num_terminals() >= 1);
    let edges = (0..n - 1)
        .map(|i| Edge {
            from: i as u32,
            to: i as u32 + 1,
            label,
        })
        .collect();
    LabeledGraph::from_edges(n, g.num_terminals(), edges)
}

/// Every word over the grammar's terminals with length <= max_len, shortest
/// first.
pub fn all_words(g: &Grammar, max_len: usize) -> Vec<Vec<TermId>> {
    let mut words: Vec<Vec<TermId>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<TermId>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for t in 0..g.num_terminals() {
                let mut w2 = w.clone();
                w2.push(TermId(t as u32));
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let den: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    num / den
}

fn nt_id(b: &mut GrammarBuilder, i: usize) -> cflr_core::NtId {
    b.nonterminal(NT_NAMES[i])
}

fn term_id(b: &mut GrammarBuilder, i: usize) -> TermId {
    b.terminal(TERM_NAMES[i])
}
