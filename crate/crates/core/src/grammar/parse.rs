//! Grammar file parser.
//!
//! One rule per line: `LHS -> sym sym ... | sym ...`. Tokens are separated by
//! whitespace. `eps` (or `ε`) standing alone denotes the empty right-hand
//! side. The first rule's left-hand side is the start symbol unless a
//! `@start X` directive appears. Lines beginning with `#` are comments.
//! Terminals are exactly the tokens that never appear as a left-hand side.

use super::{Grammar, GrammarBuilder, GrammarError, Symbol};

fn is_eps_token(tok: &str) -> bool {
    tok == "eps" || tok == "ε"
}

pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    struct RawRule<'a> {
        line: usize,
        lhs: &'a str,
        alternatives: Vec<Vec<&'a str>>,
    }

    let mut rules: Vec<RawRule> = Vec::new();
    let mut start_name: Option<&str> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@start") {
            let name = rest.trim();
            if name.is_empty() || name.split_whitespace().count() != 1 {
                return Err(GrammarError::Syntax {
                    line: line_no,
                    msg: "@start expects exactly one symbol".into(),
                });
            }
            if start_name.is_some() {
                return Err(GrammarError::DuplicateStart { line: line_no });
            }
            start_name = Some(name);
            continue;
        }
        let (lhs_part, rhs_part) = line.split_once("->").ok_or_else(|| GrammarError::Syntax {
            line: line_no,
            msg: "expected `LHS -> rhs`".into(),
        })?;
        let lhs_tokens: Vec<&str> = lhs_part.split_whitespace().collect();
        if lhs_tokens.len() != 1 {
            return Err(GrammarError::Syntax {
                line: line_no,
                msg: "left-hand side must be a single symbol".into(),
            });
        }
        let lhs = lhs_tokens[0];
        if is_eps_token(lhs) {
            return Err(GrammarError::Syntax {
                line: line_no,
                msg: "`eps` cannot be a left-hand side".into(),
            });
        }
        let mut alternatives = Vec::new();
        for alt in rhs_part.split('|') {
            let tokens: Vec<&str> = alt.split_whitespace().collect();
            if tokens.is_empty() {
                return Err(GrammarError::Syntax {
                    line: line_no,
                    msg: "empty alternative; write `eps` for the empty right-hand side".into(),
                });
            }
            if tokens.iter().any(|t| is_eps_token(t)) {
                if tokens.len() != 1 {
                    return Err(GrammarError::Syntax {
                        line: line_no,
                        msg: "`eps` must stand alone in an alternative".into(),
                    });
                }
                alternatives.push(Vec::new());
            } else {
                alternatives.push(tokens);
            }
        }
        rules.push(RawRule {
            line: line_no,
            lhs,
            alternatives,
        });
    }

    if rules.is_empty() {
        return Err(GrammarError::Empty);
    }

    // Nonterminals are the set of left-hand sides.
    let mut builder = GrammarBuilder::new();
    for r in &rules {
        builder.nonterminal(r.lhs);
    }
    let start_name = start_name.unwrap_or(rules[0].lhs);
    let start = builder.nonterminal_if_declared(start_name).ok_or_else(|| {
        GrammarError::UndeclaredStart {
            name: start_name.to_string(),
        }
    })?;
    builder.start(start);

    for r in &rules {
        let lhs = builder.nonterminal(r.lhs);
        for alt in &r.alternatives {
            let mut rhs = Vec::with_capacity(alt.len());
            for tok in alt {
                let sym = match builder.nonterminal_if_declared(tok) {
                    Some(nt) => Symbol::Nt(nt),
                    None => Symbol::Term(builder.terminal(tok)),
                };
                rhs.push(sym);
            }
            let _ = r.line;
            builder.production(lhs, rhs);
        }
    }

    Ok(builder.build())
}

impl GrammarBuilder {
    fn nonterminal_if_declared(&self, name: &str) -> Option<super::NtId> {
        self.nt_lookup.get(name).copied()
    }
}
