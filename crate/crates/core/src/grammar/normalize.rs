//! Grammar normalization: Chomsky normal form and the terminal-anchored
//! linear normal form (TALNF) used by the subcubic index.
//!
//! Fresh nonterminals use the deterministic scheme `<lhs>#<ruleIndex>#<pos>`
//! so repeated runs produce identical grammars.

use std::collections::{HashSet, VecDeque};

use super::{Grammar, GrammarBuilder, GrammarError, NtId, Production, Symbol, TermId};

/// Bound asserted by the size tests: `|P'| <= TALNF_SIZE_FACTOR * size + 1`
/// where `size` is the total right-hand-side length of the input and the
/// trailing `+ 1` covers the retained `S -> eps` rule (which contributes
/// nothing to the measure). Measured, not proved; the unit-closure step is
/// what drives it above the per-rule chain cost.
pub const TALNF_SIZE_FACTOR: usize = 16;

/// Nonterminals that can derive the empty word.
fn nullable_set(prods: &[Production], num_nts: usize) -> Vec<bool> {
    let mut nullable = vec![false; num_nts];
    let mut changed = true;
    while changed {
        changed = false;
        for p in prods {
            if nullable[p.lhs.index()] {
                continue;
            }
            let all = p.rhs.iter().all(|s| match s {
                Symbol::Nt(n) => nullable[n.index()],
                Symbol::Term(_) => false,
            });
            if all {
                nullable[p.lhs.index()] = true;
                changed = true;
            }
        }
    }
    nullable
}

/// Unit-closure: for each nonterminal, the set reachable through `A -> B`
/// chains (including itself).
fn unit_closure(prods: &[Production], num_nts: usize) -> Vec<Vec<NtId>> {
    let mut direct: Vec<Vec<NtId>> = vec![Vec::new(); num_nts];
    for p in prods {
        if let [Symbol::Nt(b)] = p.rhs.as_slice() {
            direct[p.lhs.index()].push(*b);
        }
    }
    (0..num_nts)
        .map(|a| {
            let mut seen = vec![false; num_nts];
            let mut order = Vec::new();
            let mut queue = VecDeque::new();
            seen[a] = true;
            order.push(NtId(a as u32));
            queue.push_back(NtId(a as u32));
            while let Some(x) = queue.pop_front() {
                for &b in &direct[x.index()] {
                    if !seen[b.index()] {
                        seen[b.index()] = true;
                        order.push(b);
                        queue.push_back(b);
                    }
                }
            }
            order
        })
        .collect()
}

fn dedup_productions(prods: Vec<Production>) -> Vec<Production> {
    let mut seen = HashSet::new();
    prods
        .into_iter()
        .filter(|p| seen.insert(p.clone()))
        .collect()
}

/// Replace `A -> B` chains by copying every unit-reachable nonterminal's
/// non-unit productions; drops the unit rules themselves.
fn apply_unit_closure(prods: &[Production], num_nts: usize) -> Vec<Production> {
    let closure = unit_closure(prods, num_nts);
    let mut out = Vec::new();
    for (a, reachable) in closure.iter().enumerate() {
        for &b in reachable {
            for p in prods {
                if p.lhs == b && !matches!(p.rhs.as_slice(), [Symbol::Nt(_)]) {
                    out.push(Production {
                        lhs: NtId(a as u32),
                        rhs: p.rhs.clone(),
                    });
                }
            }
        }
    }
    dedup_productions(out)
}

/// Convert an arbitrary grammar to Chomsky normal form. The pass order is
/// TERM (terminal isolation), BIN (binarization), DEL (epsilon elimination),
/// UNIT (unit-rule closure); epsilon survives only as `S -> eps`, on a fresh
/// start symbol if the old one occurs on a right-hand side. The conversion is
/// total and preserves the generated language.
pub fn to_cnf(g: &Grammar) -> Grammar {
    let mut builder = GrammarBuilder::from_symbols(g);
    let mut prods: Vec<Production> = g.productions().to_vec();

    // TERM: in right-hand sides of length >= 2, replace each terminal by a
    // wrapper nonterminal `t#<name>` (one per terminal, collision-safe).
    let mut wrappers: std::collections::HashMap<TermId, NtId> = Default::default();
    for p in &mut prods {
        if p.rhs.len() < 2 {
            continue;
        }
        for sym in &mut p.rhs {
            if let Symbol::Term(t) = *sym {
                let wrapper = *wrappers
                    .entry(t)
                    .or_insert_with(|| builder.fresh_nonterminal(&format!("t#{}", g.term_name(t))));
                *sym = Symbol::Nt(wrapper);
            }
        }
    }
    let mut wrapper_rules: Vec<(TermId, NtId)> = wrappers.into_iter().collect();
    wrapper_rules.sort_by_key(|&(t, _)| t);
    for (t, nt) in wrapper_rules {
        prods.push(Production {
            lhs: nt,
            rhs: vec![Symbol::Term(t)],
        });
    }

    // BIN: split right-hand sides of length >= 3 into chains of pairs.
    let mut binarized = Vec::new();
    for (rule_idx, p) in prods.iter().enumerate() {
        if p.rhs.len() <= 2 {
            binarized.push(p.clone());
            continue;
        }
        let lhs_name = builder_nt_name(&builder, p.lhs).to_string();
        let mut lhs = p.lhs;
        for k in 0..p.rhs.len() - 2 {
            let cont = builder.fresh_nonterminal(&format!("{lhs_name}#{rule_idx}#{k}"));
            binarized.push(Production {
                lhs,
                rhs: vec![p.rhs[k], Symbol::Nt(cont)],
            });
            lhs = cont;
        }
        binarized.push(Production {
            lhs,
            rhs: p.rhs[p.rhs.len() - 2..].to_vec(),
        });
    }
    let mut prods = dedup_productions(binarized);

    // DEL: drop epsilon productions, adding variants that omit nullable
    // symbols. Right-hand sides have length <= 2 here.
    let num_nts = builder_num_nts(&builder);
    let nullable = nullable_set(&prods, num_nts);
    let eps_in_lang = nullable[g.start().index()];
    let mut after_del = Vec::new();
    for p in &prods {
        if p.is_eps() {
            continue;
        }
        after_del.push(p.clone());
        if p.rhs.len() == 2 {
            let (x, y) = (p.rhs[0], p.rhs[1]);
            let x_null = matches!(x, Symbol::Nt(n) if nullable[n.index()]);
            let y_null = matches!(y, Symbol::Nt(n) if nullable[n.index()]);
            if x_null {
                after_del.push(Production {
                    lhs: p.lhs,
                    rhs: vec![y],
                });
            }
            if y_null {
                after_del.push(Production {
                    lhs: p.lhs,
                    rhs: vec![x],
                });
            }
        }
    }
    prods = dedup_productions(after_del);

    // UNIT.
    prods = apply_unit_closure(&prods, num_nts);

    // Epsilon handling: keep the empty word only as an epsilon rule on a
    // start symbol that never occurs on a right-hand side.
    let mut start = g.start();
    if eps_in_lang {
        let start_on_rhs = prods.iter().any(|p| p.rhs.contains(&Symbol::Nt(start)));
        if start_on_rhs {
            let fresh = builder.fresh_nonterminal(&format!("{}'", g.nt_name(start)));
            let copied: Vec<Production> = prods
                .iter()
                .filter(|p| p.lhs == start)
                .map(|p| Production {
                    lhs: fresh,
                    rhs: p.rhs.clone(),
                })
                .collect();
            prods.extend(copied);
            start = fresh;
        }
        prods.push(Production {
            lhs: start,
            rhs: Vec::new(),
        });
    }

    builder.start(start);
    for p in dedup_productions(prods) {
        builder.production(p.lhs, p.rhs);
    }
    let out = builder.build();
    debug_assert!(out.is_cnf(), "to_cnf output failed the CNF checker");
    out
}

/// Convert a linear grammar to terminal-anchored linear normal form:
/// every production becomes `A -> a`, `A -> a B`, `A -> B a`, or `S -> eps`.
/// Epsilon and unit productions are eliminated first, then each remaining
/// production `A -> x B y` is replaced by a prefix chain emitting `x` and a
/// suffix chain appending `y`. Fails with [`GrammarError::NotLinear`] if some
/// production has two or more nonterminals. The output size is linear in the
/// input size measure (see [`TALNF_SIZE_FACTOR`]).
pub fn to_talnf(g: &Grammar) -> Result<Grammar, GrammarError> {
    if let Some(bad) = g.productions().iter().find(|p| p.nonterminal_count() > 1) {
        let (lhs, rhs) = (
            g.nt_name(bad.lhs).to_string(),
            bad.rhs
                .iter()
                .map(|s| match s {
                    Symbol::Nt(n) => g.nt_name(*n),
                    Symbol::Term(t) => g.term_name(*t),
                })
                .collect::<Vec<_>>()
                .join(" "),
        );
        return Err(GrammarError::NotLinear {
            production: format!("{lhs} -> {rhs}"),
        });
    }

    let mut builder = GrammarBuilder::from_symbols(g);
    let num_nts = g.num_nonterminals();
    let mut prods: Vec<Production> = g.productions().to_vec();

    // DEL: a linear right-hand side holds at most one nonterminal, so each
    // production gets at most one omission variant.
    let nullable = nullable_set(&prods, num_nts);
    let eps_in_lang = nullable[g.start().index()];
    let mut after_del = Vec::new();
    for p in &prods {
        if p.is_eps() {
            continue;
        }
        after_del.push(p.clone());
        if let Some(pos) = p
            .rhs
            .iter()
            .position(|s| matches!(s, Symbol::Nt(n) if nullable[n.index()]))
        {
            let mut rhs = p.rhs.clone();
            rhs.remove(pos);
            if !rhs.is_empty() {
                after_del.push(Production { lhs: p.lhs, rhs });
            }
        }
    }
    prods = dedup_productions(after_del);

    // UNIT.
    prods = apply_unit_closure(&prods, num_nts);

    // Anchor every remaining production to terminals. Productions are now
    // `A -> a_1..a_p` (p >= 1) or `A -> a_1..a_p B b_1..b_q` (p + q >= 1).
    let mut out = Vec::new();
    for (rule_idx, p) in prods.iter().enumerate() {
        let lhs_name = builder_nt_name(&builder, p.lhs).to_string();
        let nt_pos = p.rhs.iter().position(|s| s.as_nt().is_some());
        match nt_pos {
            None => {
                // Terminal-only rule: keep `A -> a`, chain longer strings.
                let terms: Vec<_> = p.rhs.iter().map(|s| s.as_term().unwrap()).collect();
                if terms.len() == 1 {
                    out.push(p.clone());
                } else {
                    let mut lhs = p.lhs;
                    for (k, &a) in terms.iter().enumerate().take(terms.len() - 1) {
                        let cont =
                            builder.fresh_nonterminal(&format!("{lhs_name}#{rule_idx}#p{}", k + 1));
                        out.push(Production {
                            lhs,
                            rhs: vec![Symbol::Term(a), Symbol::Nt(cont)],
                        });
                        lhs = cont;
                    }
                    out.push(Production {
                        lhs,
                        rhs: vec![Symbol::Term(*terms.last().unwrap())],
                    });
                }
            }
            Some(pos) => {
                let body = p.rhs[pos].as_nt().unwrap();
                let prefix: Vec<_> = p.rhs[..pos].iter().map(|s| s.as_term().unwrap()).collect();
                let suffix: Vec<_> = p.rhs[pos + 1..]
                    .iter()
                    .map(|s| s.as_term().unwrap())
                    .collect();
                let (p_len, q_len) = (prefix.len(), suffix.len());

                if q_len == 0 {
                    // `A -> x B`: prefix chain ending in B.
                    debug_assert!(p_len >= 1, "unit rules were removed");
                    let mut lhs = p.lhs;
                    for (k, &a) in prefix.iter().enumerate().take(p_len - 1) {
                        let cont =
                            builder.fresh_nonterminal(&format!("{lhs_name}#{rule_idx}#p{}", k + 1));
                        out.push(Production {
                            lhs,
                            rhs: vec![Symbol::Term(a), Symbol::Nt(cont)],
                        });
                        lhs = cont;
                    }
                    out.push(Production {
                        lhs,
                        rhs: vec![Symbol::Term(prefix[p_len - 1]), Symbol::Nt(body)],
                    });
                } else if p_len == 0 {
                    // `A -> B y`: suffix chain with A as the final node.
                    let mut cur = body;
                    for (k, &b) in suffix.iter().enumerate().take(q_len - 1) {
                        let step =
                            builder.fresh_nonterminal(&format!("{lhs_name}#{rule_idx}#s{}", k + 1));
                        out.push(Production {
                            lhs: step,
                            rhs: vec![Symbol::Nt(cur), Symbol::Term(b)],
                        });
                        cur = step;
                    }
                    out.push(Production {
                        lhs: p.lhs,
                        rhs: vec![Symbol::Nt(cur), Symbol::Term(suffix[q_len - 1])],
                    });
                } else {
                    // `A -> x B y`: suffix nonterminals B^(1)..B^(q), then the
                    // prefix chain ends in B^(q).
                    let mut cur = body;
                    for (k, &b) in suffix.iter().enumerate() {
                        let step =
                            builder.fresh_nonterminal(&format!("{lhs_name}#{rule_idx}#s{}", k + 1));
                        out.push(Production {
                            lhs: step,
                            rhs: vec![Symbol::Nt(cur), Symbol::Term(b)],
                        });
                        cur = step;
                    }
                    let mut lhs = p.lhs;
                    for (k, &a) in prefix.iter().enumerate().take(p_len - 1) {
                        let cont =
                            builder.fresh_nonterminal(&format!("{lhs_name}#{rule_idx}#p{}", k + 1));
                        out.push(Production {
                            lhs,
                            rhs: vec![Symbol::Term(a), Symbol::Nt(cont)],
                        });
                        lhs = cont;
                    }
                    out.push(Production {
                        lhs,
                        rhs: vec![Symbol::Term(prefix[p_len - 1]), Symbol::Nt(cur)],
                    });
                }
            }
        }
    }

    if eps_in_lang {
        // In the transformed grammar only the start symbol is nullable, and
        // it may still occur inside anchored rules. Add the omission
        // variants now so the conversion is idempotent: a second run's
        // epsilon-elimination would otherwise introduce them.
        let s = g.start();
        let mut variants = Vec::new();
        for p in &out {
            match p.rhs.as_slice() {
                [Symbol::Term(a), Symbol::Nt(b)] | [Symbol::Nt(b), Symbol::Term(a)] if *b == s => {
                    variants.push(Production {
                        lhs: p.lhs,
                        rhs: vec![Symbol::Term(*a)],
                    });
                }
                _ => {}
            }
        }
        out.extend(variants);
        out.push(Production {
            lhs: s,
            rhs: Vec::new(),
        });
    }

    builder.start(g.start());
    for p in dedup_productions(out) {
        builder.production(p.lhs, p.rhs);
    }
    let result = builder.build();
    debug_assert!(
        result.is_talnf(),
        "to_talnf output failed the TALNF checker"
    );
    Ok(result)
}

fn builder_nt_name(b: &GrammarBuilder, nt: NtId) -> &str {
    &b.nt_names[nt.index()]
}

fn builder_num_nts(b: &GrammarBuilder) -> usize {
    b.nt_names.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, recognize, GrammarForm};

    fn g(text: &str) -> Grammar {
        parse_grammar(text).unwrap()
    }

    #[test]
    fn cnf_of_two_terminals_binarizes() {
        let c = to_cnf(&g("S -> a b"));
        assert!(c.is_cnf());
        assert_eq!(c.productions().len(), 3); // S -> A B, A -> a, B -> b
    }

    #[test]
    fn cnf_preserves_anbn_membership() {
        let c = to_cnf(&g("S -> a S b | a b"));
        assert!(c.is_cnf());
        let a = c.term_id("a").unwrap();
        let b = c.term_id("b").unwrap();
        assert!(recognize(&c, &[a, b]));
        assert!(recognize(&c, &[a, a, b, b]));
        assert!(!recognize(&c, &[a, a, b]));
    }

    #[test]
    fn cnf_of_eps_only_language() {
        let c = to_cnf(&g("S -> eps"));
        assert!(c.is_cnf());
        assert!(c.has_eps_rule());
        assert!(recognize(&c, &[]));
        assert_eq!(c.productions().len(), 1);
    }

    #[test]
    fn cnf_introduces_fresh_start_when_needed() {
        // Dyck-1: epsilon is in the language and S occurs on right-hand sides.
        let c = to_cnf(&g("S -> S S | ( S ) | eps"));
        assert!(c.is_cnf());
        assert!(recognize(&c, &[]));
        let l = c.term_id("(").unwrap();
        let r = c.term_id(")").unwrap();
        assert!(recognize(&c, &[l, r]));
        assert!(recognize(&c, &[l, l, r, r]));
        assert!(recognize(&c, &[l, r, l, r]));
        assert!(!recognize(&c, &[l, l, r]));
        assert!(!recognize(&c, &[r, l]));
    }

    #[test]
    fn talnf_of_anbn_has_expected_shapes() {
        let t = to_talnf(&g("S -> a S b | a b")).unwrap();
        assert!(t.is_talnf());
        assert_eq!(t.classify(), GrammarForm::Talnf);
        // Shape check: {S -> a X, X -> S b, S -> a T, T -> b} up to naming.
        let named = t.named_productions();
        assert_eq!(named.len(), 4);
        let a_then = named
            .iter()
            .filter(|(lhs, rhs)| lhs == "S" && rhs.len() == 2 && rhs[0] == "a")
            .count();
        assert_eq!(a_then, 2);
    }

    #[test]
    fn talnf_leaves_single_terminal_rule_alone() {
        let t = to_talnf(&g("S -> a")).unwrap();
        assert_eq!(t.named_productions(), vec![("S".into(), vec!["a".into()])]);
    }

    #[test]
    fn talnf_mixed_rule_prefix_chain_ends_in_suffix_nonterminal() {
        // A -> a b B c  becomes  A -> a A1, A1 -> b B1, B1 -> B c  up to naming.
        let mut b = GrammarBuilder::new();
        let a_nt = b.nonterminal("A");
        let b_nt = b.nonterminal("B");
        let ta = b.terminal("a");
        let tb = b.terminal("b");
        let tc = b.terminal("c");
        b.production(
            a_nt,
            vec![
                Symbol::Term(ta),
                Symbol::Term(tb),
                Symbol::Nt(b_nt),
                Symbol::Term(tc),
            ],
        );
        b.start(a_nt);
        let t = to_talnf(&b.build()).unwrap();
        let named = t.named_productions();
        assert_eq!(named.len(), 3);
        assert!(named.iter().any(|(l, r)| l == "A" && r[0] == "a"));
        assert!(named
            .iter()
            .any(|(_, r)| r.len() == 2 && r[0] == "B" && r[1] == "c"));
        // The chain threads: A -> a X, X -> b Y, Y -> B c.
        let x = &named.iter().find(|(l, _)| l == "A").unwrap().1[1];
        let y = &named.iter().find(|(l, _)| l == x.as_str()).unwrap().1[1];
        assert_eq!(
            named.iter().find(|(l, _)| l == y.as_str()).unwrap().1[0],
            "B"
        );
    }

    #[test]
    fn talnf_rejects_nonlinear() {
        let err = to_talnf(&g("S -> S S | a")).unwrap_err();
        assert!(matches!(err, GrammarError::NotLinear { .. }));
    }

    #[test]
    fn talnf_membership_matches_original() {
        let orig = g("S -> a S b | a b");
        let t = to_talnf(&orig).unwrap();
        let co = to_cnf(&orig);
        let ct = to_cnf(&t);
        let a = co.term_id("a").unwrap();
        let b = co.term_id("b").unwrap();
        for word in [vec![a, b], vec![a, a, b, b], vec![a, b, a, b]] {
            assert_eq!(recognize(&co, &word), recognize(&ct, &word));
        }
        assert!(recognize(&ct, &[a, b]));
        assert!(!recognize(&ct, &[a, b, a, b]));
    }

    #[test]
    fn talnf_handles_eps_and_units() {
        // S -> A, A -> a A b | eps ; language {a^n b^n : n >= 0}.
        let t = to_talnf(&g("S -> A\nA -> a A b | eps")).unwrap();
        assert!(t.is_talnf());
        assert!(t.has_eps_rule());
        let c = to_cnf(&t);
        let a = c.term_id("a").unwrap();
        let b = c.term_id("b").unwrap();
        assert!(recognize(&c, &[]));
        assert!(recognize(&c, &[a, b]));
        assert!(recognize(&c, &[a, a, b, b]));
        assert!(!recognize(&c, &[a]));
    }
}
