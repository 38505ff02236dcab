//! Deterministic structural mapping from JSON schemas to context-free
//! grammars.
//!
//! The conversion threads a continuation nonterminal through the schema, so
//! fixed structure (object properties in key order, tuple arrays, unions)
//! becomes chains of productions with at most one nonterminal each.
//! Variable-length repetition is the exception: a single-schema `items` (and
//! explicitly permissive `additionalProperties`/`patternProperties`) emits
//! the two-nonterminal rule `Items -> Item | Item , Items`, which is what
//! pushes a grammar out of the linear class. `$ref` reuses one definition
//! nonterminal per target (cycles allowed); a reference in non-tail position
//! needs its continuation alongside, which also breaks linearity.
//!
//! Tokens are abstract: primitives map to `STR`/`NUM`/`BOOL`/`NULL`/`ANY`,
//! enum and const values to one terminal per literal, punctuation to
//! `{ } [ ] , :`. Comma placement around skipped optional properties is
//! approximate; only branching and nesting matter here, not byte-accurate
//! JSON.

use std::collections::{HashMap, HashSet};

use cflr_core::{Grammar, GrammarBuilder, NtId, Symbol};
use serde_json::Value;

/// Fixed-size arrays (`minItems == maxItems`) are unrolled up to this many
/// elements; larger ones are treated as variable-length with a warning.
pub const FIXED_ARRAY_UNROLL_CAP: u64 = 16;

/// A converted grammar plus non-fatal notes about ignored or approximated
/// keywords.
#[derive(Debug)]
pub struct Conversion {
    pub grammar: Grammar,
    pub warnings: Vec<String>,
}

/// Convert one schema document. Total: every JSON value yields a grammar;
/// unresolvable references leave an unproductive nonterminal and a warning.
pub fn schema_to_cfg(schema: &Value) -> Conversion {
    let mut conv = Converter {
        root: schema,
        builder: GrammarBuilder::new(),
        warnings: Vec::new(),
        counter: 0,
        ref_defs: HashMap::new(),
    };
    let start = conv.emit(schema, None);
    conv.builder.start(start);
    Conversion {
        grammar: conv.builder.build(),
        warnings: conv.warnings,
    }
}

/// `$ref` value of a schema node, when present.
pub(crate) fn ref_of(node: &Value) -> Option<&str> {
    node.get("$ref").and_then(Value::as_str)
}

/// Resolve a `#`-rooted JSON pointer within `root`.
pub(crate) fn resolve_pointer<'v>(root: &'v Value, pointer: &str) -> Option<&'v Value> {
    let rest = pointer.strip_prefix('#')?;
    if rest.is_empty() {
        return Some(root);
    }
    let rest = rest.strip_prefix('/')?;
    let mut at = root;
    for raw in rest.split('/') {
        let token = raw.replace("~1", "/").replace("~0", "~");
        at = match at {
            Value::Object(map) => map.get(&token)?,
            Value::Array(items) => items.get(token.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(at)
}

struct Converter<'a> {
    root: &'a Value,
    builder: GrammarBuilder,
    warnings: Vec<String>,
    counter: usize,
    ref_defs: HashMap<String, NtId>,
}

impl Converter<'_> {
    fn fresh(&mut self, role: &str) -> NtId {
        let name = format!("{role}{}", self.counter);
        self.counter += 1;
        self.builder.fresh_nonterminal(&name)
    }

    fn term(&mut self, name: &str) -> Symbol {
        Symbol::Term(self.builder.terminal(name))
    }

    fn key_term(&mut self, key: &str) -> Symbol {
        let name = serde_json::to_string(key).expect("key serializes");
        self.term(&name)
    }

    fn lit_term(&mut self, value: &Value) -> Symbol {
        let name = format!(
            "lit:{}",
            serde_json::to_string(value).expect("literal serializes")
        );
        self.term(&name)
    }

    fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// Add `lhs -> rhs ++ continuation`.
    fn prod(&mut self, lhs: NtId, mut rhs: Vec<Symbol>, k: Option<NtId>) {
        if let Some(k) = k {
            rhs.push(Symbol::Nt(k));
        }
        self.builder.production(lhs, rhs);
    }

    fn any_rule(&mut self, x: NtId, k: Option<NtId>) {
        let any = self.term("ANY");
        self.prod(x, vec![any], k);
    }

    /// Nonterminal deriving `node`'s language followed by `k`'s. A tail
    /// `$ref` (no continuation) returns the definition nonterminal directly,
    /// without a wrapper.
    fn emit(&mut self, node: &Value, k: Option<NtId>) -> NtId {
        if let (Some(r), None) = (ref_of(node), k) {
            return self.ref_def(r);
        }
        let x = self.fresh("n");
        self.emit_into(x, node, k);
        x
    }

    /// One definition nonterminal per reference target, inserted into the
    /// memo table before the target is emitted so that cycles terminate.
    fn ref_def(&mut self, pointer: &str) -> NtId {
        if let Some(&nt) = self.ref_defs.get(pointer) {
            return nt;
        }
        let nt = self.fresh("def");
        self.ref_defs.insert(pointer.to_string(), nt);
        let root = self.root;
        match resolve_pointer(root, pointer) {
            Some(target) => self.emit_into(nt, target, None),
            None => self.warn(format!(
                "unresolvable $ref `{pointer}`; nonterminal left unproductive"
            )),
        }
        nt
    }

    fn emit_into(&mut self, x: NtId, node: &Value, k: Option<NtId>) {
        match node {
            Value::Bool(true) => self.any_rule(x, k),
            Value::Bool(false) => {
                self.warn("`false` schema admits nothing; nonterminal left unproductive");
            }
            Value::Object(map) => self.emit_map(x, map, k),
            _ => {
                self.warn("non-schema value treated as any");
                self.any_rule(x, k);
            }
        }
    }

    fn emit_map(&mut self, x: NtId, map: &serde_json::Map<String, Value>, k: Option<NtId>) {
        if let Some(r) = map.get("$ref").and_then(Value::as_str) {
            let def = self.ref_def(r);
            self.prod(x, vec![Symbol::Nt(def)], k);
            return;
        }
        if let Some(values) = map.get("enum").and_then(Value::as_array) {
            if values.is_empty() {
                self.warn("empty enum; nonterminal left unproductive");
            }
            for v in values {
                let lit = self.lit_term(v);
                self.prod(x, vec![lit], k);
            }
            return;
        }
        if let Some(v) = map.get("const") {
            let lit = self.lit_term(v);
            self.prod(x, vec![lit], k);
            return;
        }
        for union_kw in ["oneOf", "anyOf", "allOf"] {
            if let Some(branches) = map.get(union_kw).and_then(Value::as_array) {
                if union_kw == "allOf" {
                    self.warn("allOf treated as alternatives");
                }
                for branch in branches {
                    let v = self.emit(branch, k);
                    self.builder.production(x, vec![Symbol::Nt(v)]);
                }
                return;
            }
        }
        match map.get("type") {
            Some(Value::String(ty)) => self.emit_with_type(x, map, &ty.clone(), k),
            Some(Value::Array(types)) => {
                for ty in types.clone() {
                    if let Value::String(ty) = ty {
                        let mut narrowed = map.clone();
                        narrowed.insert("type".into(), Value::String(ty.clone()));
                        let narrowed = Value::Object(narrowed);
                        let v = self.fresh("n");
                        self.emit_into(v, &narrowed, k);
                        self.builder.production(x, vec![Symbol::Nt(v)]);
                    } else {
                        self.warn("non-string entry in type array ignored");
                    }
                }
            }
            Some(_) => {
                self.warn("malformed `type`; treated as any");
                self.any_rule(x, k);
            }
            None => {
                if map.contains_key("properties")
                    || map.contains_key("additionalProperties")
                    || map.contains_key("patternProperties")
                    || map.contains_key("required")
                {
                    self.emit_object(x, map, k);
                } else if map.contains_key("items")
                    || map.contains_key("minItems")
                    || map.contains_key("maxItems")
                {
                    self.emit_array(x, map, k);
                } else {
                    self.any_rule(x, k);
                }
            }
        }
    }

    fn emit_with_type(
        &mut self,
        x: NtId,
        map: &serde_json::Map<String, Value>,
        ty: &str,
        k: Option<NtId>,
    ) {
        match ty {
            "string" => {
                let t = self.term("STR");
                self.prod(x, vec![t], k);
            }
            "number" | "integer" => {
                let t = self.term("NUM");
                self.prod(x, vec![t], k);
            }
            "boolean" => {
                let t = self.term("BOOL");
                self.prod(x, vec![t], k);
            }
            "null" => {
                let t = self.term("NULL");
                self.prod(x, vec![t], k);
            }
            "object" => self.emit_object(x, map, k),
            "array" => self.emit_array(x, map, k),
            other => {
                self.warn(format!("unknown type `{other}` treated as any"));
                self.any_rule(x, k);
            }
        }
    }

    /// Fixed properties chain in key order, each production carrying at most
    /// one nonterminal continuation. Explicitly permissive extra properties
    /// become a pair repetition before the closing brace.
    fn emit_object(&mut self, x: NtId, map: &serde_json::Map<String, Value>, k: Option<NtId>) {
        let mut extra_schemas: Vec<Value> = Vec::new();
        match map.get("additionalProperties") {
            None | Some(Value::Bool(false)) => {}
            Some(other) => extra_schemas.push(other.clone()),
        }
        if let Some(pp) = map.get("patternProperties").and_then(Value::as_object) {
            for (_, schema) in pp {
                extra_schemas.push(schema.clone());
            }
        }

        let close = self.fresh("objend");
        let rbrace = self.term("}");
        if extra_schemas.is_empty() {
            self.prod(close, vec![rbrace], k);
        } else {
            self.warn(
                "permissive additionalProperties/patternProperties treated as variable-length repetition",
            );
            let brace = self.fresh("objbrace");
            self.prod(brace, vec![rbrace], k);
            let pair = self.fresh("pair");
            for schema in &extra_schemas {
                let v = self.emit(schema, None);
                let key = self.term("STR");
                let colon = self.term(":");
                self.builder
                    .production(pair, vec![key, colon, Symbol::Nt(v)]);
            }
            let rep = self.fresh("props");
            let comma = self.term(",");
            self.builder.production(rep, vec![Symbol::Nt(pair)]);
            self.builder
                .production(rep, vec![Symbol::Nt(pair), comma, Symbol::Nt(rep)]);
            self.builder.production(close, vec![Symbol::Nt(brace)]);
            self.builder
                .production(close, vec![Symbol::Nt(rep), Symbol::Nt(brace)]);
        }

        let required: HashSet<&str> = map
            .get("required")
            .and_then(Value::as_array)
            .map(|names| names.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();

        let mut cur = close;
        if let Some(props) = map.get("properties").and_then(Value::as_object) {
            let entries: Vec<(&String, &Value)> = props.iter().collect();
            for (i, (key, sub)) in entries.iter().enumerate().rev() {
                let prop = self.fresh("prop");
                let v = self.emit(sub, Some(cur));
                let mut rhs = Vec::new();
                if i > 0 {
                    rhs.push(self.term(","));
                }
                rhs.push(self.key_term(key));
                rhs.push(self.term(":"));
                rhs.push(Symbol::Nt(v));
                self.builder.production(prop, rhs);
                if !required.contains(key.as_str()) {
                    self.builder.production(prop, vec![Symbol::Nt(cur)]);
                }
                cur = prop;
            }
        }
        let lbrace = self.term("{");
        self.builder.production(x, vec![lbrace, Symbol::Nt(cur)]);
    }

    /// Tuple `items` and small fixed counts unroll to a linear chain; a
    /// single-schema `items` without a fixed length emits the repetition
    /// rule `Items -> Item | Item , Items`.
    fn emit_array(&mut self, x: NtId, map: &serde_json::Map<String, Value>, k: Option<NtId>) {
        let lbrack = self.term("[");
        let rbrack = self.term("]");
        if let Some(Value::Array(elems)) = map.get("items") {
            if map
                .get("additionalItems")
                .is_some_and(|v| v != &Value::Bool(false))
            {
                self.warn("additionalItems ignored");
            }
            let close = self.fresh("arrend");
            self.prod(close, vec![rbrack], k);
            let mut cur = close;
            let elems: Vec<Value> = elems.clone();
            for (i, sub) in elems.iter().enumerate().rev() {
                let el = self.fresh("elem");
                let v = self.emit(sub, Some(cur));
                let mut rhs = Vec::new();
                if i > 0 {
                    rhs.push(self.term(","));
                }
                rhs.push(Symbol::Nt(v));
                self.builder.production(el, rhs);
                cur = el;
            }
            self.builder.production(x, vec![lbrack, Symbol::Nt(cur)]);
            return;
        }

        let items = map.get("items").cloned();
        let min = map.get("minItems").and_then(Value::as_u64);
        let max = map.get("maxItems").and_then(Value::as_u64);
        let fixed_len = match (min, max) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        };

        if let Some(count) = fixed_len.filter(|&c| c <= FIXED_ARRAY_UNROLL_CAP) {
            let close = self.fresh("arrend");
            self.prod(close, vec![rbrack], k);
            let mut cur = close;
            for i in (0..count as usize).rev() {
                let el = self.fresh("elem");
                let v = match &items {
                    Some(schema) => self.emit(schema, Some(cur)),
                    None => {
                        let w = self.fresh("n");
                        self.any_rule(w, Some(cur));
                        w
                    }
                };
                let mut rhs = Vec::new();
                if i > 0 {
                    rhs.push(self.term(","));
                }
                rhs.push(Symbol::Nt(v));
                self.builder.production(el, rhs);
                cur = el;
            }
            self.builder.production(x, vec![lbrack, Symbol::Nt(cur)]);
            return;
        }
        if fixed_len.is_some() {
            self.warn("fixed-length array above the unroll cap treated as variable-length");
        }

        let item = match &items {
            Some(schema) => self.emit(schema, None),
            None => {
                let w = self.fresh("item");
                self.any_rule(w, None);
                w
            }
        };
        let rep = self.fresh("items");
        let comma = self.term(",");
        self.builder.production(rep, vec![Symbol::Nt(item)]);
        self.builder
            .production(rep, vec![Symbol::Nt(item), comma, Symbol::Nt(rep)]);
        let close = self.fresh("arrend");
        self.prod(close, vec![rbrack], k);
        let body = self.fresh("arrbody");
        if min.unwrap_or(0) == 0 {
            self.builder.production(body, vec![Symbol::Nt(close)]);
        }
        self.builder
            .production(body, vec![Symbol::Nt(rep), Symbol::Nt(close)]);
        self.builder.production(x, vec![lbrack, Symbol::Nt(body)]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn convert(v: Value) -> Conversion {
        schema_to_cfg(&v)
    }

    #[test]
    fn flat_object_is_linear() {
        let c = convert(json!({
            "type": "object",
            "properties": {"x": {"type": "integer"}}
        }));
        assert!(c.grammar.is_linear());
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn variable_array_is_general() {
        let c = convert(json!({"type": "array", "items": {"type": "string"}}));
        assert!(!c.grammar.is_linear());
    }

    #[test]
    fn bare_string_is_linear() {
        let c = convert(json!({"type": "string"}));
        assert!(c.grammar.is_linear());
        assert_eq!(c.grammar.productions().len(), 1);
    }

    #[test]
    fn nested_object_stays_linear() {
        let c = convert(json!({
            "type": "object",
            "properties": {
                "inner": {"type": "object", "properties": {"x": {"type": "string"}}}
            }
        }));
        assert!(c.grammar.is_linear());
    }

    #[test]
    fn tail_ref_is_linear_and_reuses_definition() {
        let c = convert(json!({
            "definitions": {"name": {"type": "string"}},
            "$ref": "#/definitions/name"
        }));
        assert!(c.grammar.is_linear());
    }

    #[test]
    fn ref_with_continuation_is_general() {
        let c = convert(json!({
            "type": "object",
            "properties": {"child": {"$ref": "#"}}
        }));
        assert!(!c.grammar.is_linear());
    }

    #[test]
    fn unresolvable_ref_warns_and_stays_total() {
        let c = convert(json!({"$ref": "#/definitions/missing"}));
        assert!(c.warnings.iter().any(|w| w.contains("unresolvable")));
    }

    #[test]
    fn tuple_items_unroll_linearly() {
        let c = convert(json!({
            "type": "array",
            "items": [{"type": "string"}, {"type": "number"}]
        }));
        assert!(c.grammar.is_linear());
    }

    #[test]
    fn fixed_count_array_unrolls() {
        let c = convert(json!({
            "type": "array", "items": {"type": "number"},
            "minItems": 3, "maxItems": 3
        }));
        assert!(c.grammar.is_linear());
    }

    #[test]
    fn oversized_fixed_array_falls_back_to_repetition() {
        let c = convert(json!({
            "type": "array", "items": {"type": "number"},
            "minItems": 40, "maxItems": 40
        }));
        assert!(!c.grammar.is_linear());
        assert!(c.warnings.iter().any(|w| w.contains("unroll cap")));
    }

    #[test]
    fn permissive_additional_properties_is_general() {
        let c = convert(json!({"type": "object", "additionalProperties": true}));
        assert!(!c.grammar.is_linear());
    }

    #[test]
    fn union_of_primitives_is_linear() {
        let c = convert(json!({"oneOf": [{"type": "string"}, {"type": "null"}]}));
        assert!(c.grammar.is_linear());
    }

    #[test]
    fn conversion_is_deterministic() {
        let v = json!({
            "type": "object",
            "properties": {
                "b": {"type": "array", "items": {"type": "string"}},
                "a": {"enum": [1, 2]}
            },
            "required": ["a"]
        });
        let c1 = schema_to_cfg(&v);
        let c2 = schema_to_cfg(&v);
        assert_eq!(c1.grammar.to_string(), c2.grammar.to_string());
        assert_eq!(c1.warnings, c2.warnings);
    }

    #[test]
    fn pointer_resolution_handles_escapes() {
        let v = json!({"a~b": {"x/y": 5}});
        assert_eq!(resolve_pointer(&v, "#/a~0b/x~1y"), Some(&Value::from(5)));
        assert_eq!(resolve_pointer(&v, "#"), Some(&v));
        assert_eq!(resolve_pointer(&v, "#/nope"), None);
        assert_eq!(resolve_pointer(&v, "http://x"), None);
    }
}
