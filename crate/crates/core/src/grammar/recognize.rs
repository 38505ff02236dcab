//! String membership: a CYK recognizer for CNF grammars and an interval
//! dynamic program for TALNF grammars. Both answer membership from an
//! arbitrary nonterminal, which the witness-soundness checks rely on.

use super::{Grammar, NtId, TermId};

/// Bit set over nonterminals, packed into words.
#[derive(Clone, PartialEq)]
struct NtSet {
    words: Vec<u64>,
}

impl NtSet {
    fn new(num_nts: usize) -> Self {
        NtSet {
            words: vec![0; num_nts.div_ceil(64)],
        }
    }

    fn insert(&mut self, nt: NtId) -> bool {
        let (w, b) = (nt.index() / 64, nt.index() % 64);
        let prev = self.words[w];
        self.words[w] |= 1 << b;
        self.words[w] != prev
    }

    fn contains(&self, nt: NtId) -> bool {
        let (w, b) = (nt.index() / 64, nt.index() % 64);
        self.words[w] >> b & 1 == 1
    }
}

/// Does `word` belong to the language of the start symbol? The grammar must
/// be in CNF or TALNF; run [`super::to_cnf`] first otherwise.
pub fn recognize(g: &Grammar, word: &[TermId]) -> bool {
    derives(g, g.start(), word)
}

/// Does `from` derive `word`? Dispatches on the grammar's normal form.
pub fn derives(g: &Grammar, from: NtId, word: &[TermId]) -> bool {
    if g.is_talnf() {
        derives_talnf(g, from, word)
    } else if g.is_cnf() {
        derives_cnf(g, from, word)
    } else {
        panic!("derives: grammar must be in CNF or TALNF");
    }
}

fn derives_cnf(g: &Grammar, from: NtId, word: &[TermId]) -> bool {
    let n = word.len();
    if n == 0 {
        // Only the optional start epsilon rule derives the empty word, and
        // CNF keeps the start symbol off right-hand sides in that case.
        return from == g.start() && g.has_eps_rule();
    }

    let mut by_term: Vec<Vec<NtId>> = vec![Vec::new(); g.num_terminals()];
    let mut binary: Vec<(NtId, NtId, NtId)> = Vec::new();
    for p in g.productions() {
        if let Some(t) = p.as_terminal_rule() {
            by_term[t.index()].push(p.lhs);
        } else if let Some((b, c)) = p.as_binary_rule() {
            binary.push((p.lhs, b, c));
        }
    }

    // table[i][j] = nonterminals deriving word[i..=i+j] (j = len - 1).
    let empty = NtSet::new(g.num_nonterminals());
    let mut table = vec![vec![empty.clone(); n]; n];
    for (i, t) in word.iter().enumerate() {
        for &a in &by_term[t.index()] {
            table[i][0].insert(a);
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let mut cell = empty.clone();
            for split in 1..len {
                let left = &table[i][split - 1];
                let right = &table[i + split][len - split - 1];
                for &(a, b, c) in &binary {
                    if left.contains(b) && right.contains(c) {
                        cell.insert(a);
                    }
                }
            }
            table[i][len - 1] = cell;
        }
    }
    table[0][n - 1].contains(from)
}

fn derives_talnf(g: &Grammar, from: NtId, word: &[TermId]) -> bool {
    let n = word.len();
    let eps = g.has_eps_rule();
    if n == 0 {
        return from == g.start() && eps;
    }

    // m[len][i] = nonterminals deriving word[i..i+len]. Empty intervals are
    // derivable only by the start symbol via `S -> eps`, which matters for
    // rules like `A -> a S`: the step `A -> a B` consumes one terminal, so
    // each level depends only on strictly shorter intervals.
    let empty = NtSet::new(g.num_nonterminals());
    let mut by_len: Vec<Vec<NtSet>> = Vec::with_capacity(n + 1);
    let mut diag = vec![empty.clone(); n + 1];
    if eps {
        for cell in &mut diag {
            cell.insert(g.start());
        }
    }
    by_len.push(diag);

    for len in 1..=n {
        let mut level = vec![empty.clone(); n - len + 1];
        for (i, cell) in level.iter_mut().enumerate() {
            let j = i + len;
            for p in g.productions() {
                if let Some(t) = p.as_terminal_rule() {
                    if len == 1 && word[i] == t {
                        cell.insert(p.lhs);
                    }
                } else if let Some((a, b)) = p.as_term_nt_rule() {
                    if word[i] == a && by_len[len - 1][i + 1].contains(b) {
                        cell.insert(p.lhs);
                    }
                } else if let Some((b, a)) = p.as_nt_term_rule() {
                    if word[j - 1] == a && by_len[len - 1][i].contains(b) {
                        cell.insert(p.lhs);
                    }
                }
            }
        }
        by_len.push(level);
    }
    by_len[n][0].contains(from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_grammar, to_cnf, to_talnf};

    fn words(names: &[&str], g: &Grammar) -> Vec<TermId> {
        names.iter().map(|n| g.term_id(n).unwrap()).collect()
    }

    #[test]
    fn anbn_accepts_aabb() {
        let g = to_cnf(&parse_grammar("S -> a S b | a b").unwrap());
        assert!(recognize(&g, &words(&["a", "a", "b", "b"], &g)));
    }

    #[test]
    fn eps_rule_accepts_empty_word() {
        let g = parse_grammar("S -> a\nS -> eps").unwrap();
        assert!(recognize(&g, &[]));
    }

    #[test]
    fn anbn_rejects_aba() {
        let g = to_cnf(&parse_grammar("S -> a S b | a b").unwrap());
        assert!(!recognize(&g, &words(&["a", "b", "a"], &g)));
    }

    #[test]
    fn talnf_dp_agrees_with_cyk() {
        let orig = parse_grammar("S -> a S b | a b | eps").unwrap();
        let t = to_talnf(&orig).unwrap();
        let c = to_cnf(&orig);
        let a = c.term_id("a").unwrap();
        let b = c.term_id("b").unwrap();
        let alphabet = [a, b];
        // All words of length <= 6 over {a, b}.
        let mut stack = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            assert_eq!(recognize(&t, &w), recognize(&c, &w), "word {w:?}");
            if w.len() < 6 {
                for &s in &alphabet {
                    let mut w2 = w.clone();
                    w2.push(s);
                    stack.push(w2);
                }
            }
        }
    }

    #[test]
    fn talnf_eps_usable_mid_derivation() {
        // A -> a S with S -> eps: "a" is derivable from A.
        let g = parse_grammar("S -> a S\nS -> eps").unwrap();
        assert!(g.is_talnf());
        let a = g.term_id("a").unwrap();
        assert!(recognize(&g, &[a]));
        assert!(recognize(&g, &[a, a]));
        assert!(recognize(&g, &[]));
    }

    #[test]
    fn derives_from_non_start() {
        let g = parse_grammar("S -> A B\nA -> a\nB -> b").unwrap();
        let a_nt = g.nt_id("A").unwrap();
        let a = g.term_id("a").unwrap();
        let b = g.term_id("b").unwrap();
        assert!(derives(&g, a_nt, &[a]));
        assert!(!derives(&g, a_nt, &[b]));
    }
}
