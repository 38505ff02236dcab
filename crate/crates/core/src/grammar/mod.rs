//! Context-free grammars with interned symbols, normal-form classification,
//! and the normalization passes the indices depend on (CNF and the
//! terminal-anchored linear normal form).

mod normalize;
mod parse;
mod recognize;

pub use normalize::{to_cnf, to_talnf, TALNF_SIZE_FACTOR};
pub use parse::parse_grammar;
pub use recognize::{derives, recognize};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense index of a nonterminal within a grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

/// Dense index of a terminal within a grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl NtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A grammar symbol. Terminal and nonterminal id spaces are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Nt(NtId),
    Term(TermId),
}

impl Symbol {
    pub fn as_nt(self) -> Option<NtId> {
        match self {
            Symbol::Nt(n) => Some(n),
            Symbol::Term(_) => None,
        }
    }

    pub fn as_term(self) -> Option<TermId> {
        match self {
            Symbol::Term(t) => Some(t),
            Symbol::Nt(_) => None,
        }
    }
}

/// One production `lhs -> rhs`. An empty `rhs` is the epsilon production.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub lhs: NtId,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn is_eps(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn nonterminal_count(&self) -> usize {
        self.rhs.iter().filter(|s| s.as_nt().is_some()).count()
    }

    /// `A -> a`
    pub fn as_terminal_rule(&self) -> Option<TermId> {
        match self.rhs.as_slice() {
            [Symbol::Term(t)] => Some(*t),
            _ => None,
        }
    }

    /// `A -> B C`
    pub fn as_binary_rule(&self) -> Option<(NtId, NtId)> {
        match self.rhs.as_slice() {
            [Symbol::Nt(b), Symbol::Nt(c)] => Some((*b, *c)),
            _ => None,
        }
    }

    /// `A -> a B`
    pub fn as_term_nt_rule(&self) -> Option<(TermId, NtId)> {
        match self.rhs.as_slice() {
            [Symbol::Term(a), Symbol::Nt(b)] => Some((*a, *b)),
            _ => None,
        }
    }

    /// `A -> B a`
    pub fn as_nt_term_rule(&self) -> Option<(NtId, TermId)> {
        match self.rhs.as_slice() {
            [Symbol::Nt(b), Symbol::Term(a)] => Some((*b, *a)),
            _ => None,
        }
    }
}

/// Most specific normal form a grammar satisfies. When several predicates
/// hold at once the precedence is TALNF > CNF > Linear > General; the
/// individual predicates stay available through [`Grammar::is_cnf`] and
/// friends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrammarForm {
    General,
    Cnf,
    Linear,
    Talnf,
}

impl fmt::Display for GrammarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GrammarForm::General => "general",
            GrammarForm::Cnf => "cnf",
            GrammarForm::Linear => "linear",
            GrammarForm::Talnf => "talnf",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("start symbol `{name}` is not declared as a nonterminal (no rule has it on the left)")]
    UndeclaredStart { name: String },
    #[error("line {line}: duplicate @start directive")]
    DuplicateStart { line: usize },
    #[error("grammar has no rules")]
    Empty,
    #[error("grammar is not linear: production `{production}` has more than one nonterminal")]
    NotLinear { production: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct FormFlags {
    cnf: bool,
    linear: bool,
    talnf: bool,
}

/// An immutable context-free grammar. Transforms produce new grammars and
/// always preserve the terminal table, so a graph parsed against the original
/// grammar stays valid for every normalized version of it.
#[derive(Debug, Clone)]
pub struct Grammar {
    nt_names: Vec<String>,
    term_names: Vec<String>,
    nt_lookup: HashMap<String, NtId>,
    term_lookup: HashMap<String, TermId>,
    productions: Vec<Production>,
    start: NtId,
    flags: FormFlags,
}

impl Grammar {
    pub fn num_nonterminals(&self) -> usize {
        self.nt_names.len()
    }

    pub fn num_terminals(&self) -> usize {
        self.term_names.len()
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn nt_name(&self, nt: NtId) -> &str {
        &self.nt_names[nt.index()]
    }

    pub fn term_name(&self, t: TermId) -> &str {
        &self.term_names[t.index()]
    }

    pub fn nt_names(&self) -> &[String] {
        &self.nt_names
    }

    pub fn term_names(&self) -> &[String] {
        &self.term_names
    }

    pub fn nt_id(&self, name: &str) -> Option<NtId> {
        self.nt_lookup.get(name).copied()
    }

    pub fn term_id(&self, name: &str) -> Option<TermId> {
        self.term_lookup.get(name).copied()
    }

    /// Total right-hand-side length over all productions (the standard size
    /// measure; epsilon productions contribute zero).
    pub fn size_measure(&self) -> usize {
        self.productions.iter().map(|p| p.rhs.len()).sum()
    }

    /// Every production has at most one nonterminal on its right-hand side.
    pub fn is_linear(&self) -> bool {
        self.flags.linear
    }

    /// Every production is `A -> B C`, `A -> a`, or `S -> eps`, and when the
    /// epsilon rule is present the start symbol does not occur on any
    /// right-hand side (which is what makes the CYK recognizer sound).
    pub fn is_cnf(&self) -> bool {
        self.flags.cnf
    }

    /// Every production is `A -> a`, `A -> a B`, `A -> B a`, or `S -> eps`.
    /// Unlike CNF the start symbol may still occur on right-hand sides
    /// together with `S -> eps`; the terminal-anchored propagation handles
    /// the diagonal seeds without special cases.
    pub fn is_talnf(&self) -> bool {
        self.flags.talnf
    }

    /// `S -> eps` is a production.
    pub fn has_eps_rule(&self) -> bool {
        self.productions
            .iter()
            .any(|p| p.is_eps() && p.lhs == self.start)
    }

    pub fn classify(&self) -> GrammarForm {
        if self.flags.talnf {
            GrammarForm::Talnf
        } else if self.flags.cnf {
            GrammarForm::Cnf
        } else if self.flags.linear {
            GrammarForm::Linear
        } else {
            GrammarForm::General
        }
    }

    fn occurs_on_rhs(&self, nt: NtId) -> bool {
        self.productions
            .iter()
            .any(|p| p.rhs.contains(&Symbol::Nt(nt)))
    }

    /// Productions rendered with symbol names, in declaration order. Useful
    /// for snapshot comparisons and debugging output.
    pub fn named_productions(&self) -> Vec<(String, Vec<String>)> {
        self.productions
            .iter()
            .map(|p| {
                let rhs = p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        Symbol::Nt(n) => self.nt_name(*n).to_string(),
                        Symbol::Term(t) => self.term_name(*t).to_string(),
                    })
                    .collect();
                (self.nt_name(p.lhs).to_string(), rhs)
            })
            .collect()
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@start {}", self.nt_name(self.start))?;
        for p in &self.productions {
            write!(f, "{} ->", self.nt_name(p.lhs))?;
            if p.rhs.is_empty() {
                write!(f, " eps")?;
            } else {
                for s in &p.rhs {
                    match s {
                        Symbol::Nt(n) => write!(f, " {}", self.nt_name(*n))?,
                        Symbol::Term(t) => write!(f, " {}", self.term_name(*t))?,
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Incremental construction of a [`Grammar`]; interns symbol names and
/// deduplicates productions while keeping first-occurrence order.
#[derive(Debug, Default)]
pub struct GrammarBuilder {
    nt_names: Vec<String>,
    term_names: Vec<String>,
    nt_lookup: HashMap<String, NtId>,
    term_lookup: HashMap<String, TermId>,
    productions: Vec<Production>,
    start: Option<NtId>,
}

impl GrammarBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder seeded with another grammar's symbol tables (no productions).
    /// The terminal table is copied verbatim so terminal ids stay stable
    /// across transforms.
    pub fn from_symbols(g: &Grammar) -> Self {
        GrammarBuilder {
            nt_names: g.nt_names.clone(),
            term_names: g.term_names.clone(),
            nt_lookup: g.nt_lookup.clone(),
            term_lookup: g.term_lookup.clone(),
            productions: Vec::new(),
            start: None,
        }
    }

    pub fn nonterminal(&mut self, name: &str) -> NtId {
        if let Some(&id) = self.nt_lookup.get(name) {
            return id;
        }
        let id = NtId(self.nt_names.len() as u32);
        self.nt_names.push(name.to_string());
        self.nt_lookup.insert(name.to_string(), id);
        id
    }

    /// A nonterminal named `base`, disambiguated with trailing apostrophes if
    /// the name is already taken.
    pub fn fresh_nonterminal(&mut self, base: &str) -> NtId {
        let mut name = base.to_string();
        while self.nt_lookup.contains_key(&name) {
            name.push('\'');
        }
        self.nonterminal(&name)
    }

    pub fn terminal(&mut self, name: &str) -> TermId {
        if let Some(&id) = self.term_lookup.get(name) {
            return id;
        }
        let id = TermId(self.term_names.len() as u32);
        self.term_names.push(name.to_string());
        self.term_lookup.insert(name.to_string(), id);
        id
    }

    pub fn production(&mut self, lhs: NtId, rhs: Vec<Symbol>) {
        self.productions.push(Production { lhs, rhs });
    }

    pub fn start(&mut self, nt: NtId) {
        self.start = Some(nt);
    }

    pub fn build(self) -> Grammar {
        let start = self.start.expect("grammar builder: start symbol not set");
        let mut seen = std::collections::HashSet::new();
        let mut productions = Vec::with_capacity(self.productions.len());
        for p in self.productions {
            debug_assert!(p.lhs.index() < self.nt_names.len());
            debug_assert!(p.rhs.iter().all(|s| match s {
                Symbol::Nt(n) => n.index() < self.nt_names.len(),
                Symbol::Term(t) => t.index() < self.term_names.len(),
            }));
            if seen.insert(p.clone()) {
                productions.push(p);
            }
        }
        let mut g = Grammar {
            nt_names: self.nt_names,
            term_names: self.term_names,
            nt_lookup: self.nt_lookup,
            term_lookup: self.term_lookup,
            productions,
            start,
            flags: FormFlags::default(),
        };
        g.flags = compute_flags(&g);
        g
    }
}

fn compute_flags(g: &Grammar) -> FormFlags {
    let linear = g.productions.iter().all(|p| p.nonterminal_count() <= 1);
    let talnf = g.productions.iter().all(|p| {
        p.as_terminal_rule().is_some()
            || p.as_term_nt_rule().is_some()
            || p.as_nt_term_rule().is_some()
            || (p.is_eps() && p.lhs == g.start)
    });
    let cnf_shapes = g.productions.iter().all(|p| {
        p.as_terminal_rule().is_some()
            || p.as_binary_rule().is_some()
            || (p.is_eps() && p.lhs == g.start)
    });
    let cnf = cnf_shapes && (!g.has_eps_rule() || !g.occurs_on_rhs(g.start));
    FormFlags { cnf, linear, talnf }
}
