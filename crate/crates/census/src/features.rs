//! Structural feature attribution, computed from a walk of the schema rather
//! than from the converted grammar. The walk visits exactly the positions the
//! converter visits (properties, items, unions, permissive extras) and
//! follows `$ref` targets with cycle detection, so feature presence lines up
//! with what the conversion saw.

use std::collections::HashSet;

use serde_json::Value;

use crate::convert::{ref_of, resolve_pointer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Features {
    /// A single-schema `items` without a fixed length (`minItems == maxItems`).
    pub variable_length_array: bool,
    /// Some object property is itself object-typed (following `$ref` chains).
    pub nested_object: bool,
    /// The reference graph reachable from the root has a cycle.
    pub recursive_ref: bool,
}

impl Features {
    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.variable_length_array {
            out.push("variable_length_array");
        }
        if self.nested_object {
            out.push("nested_object");
        }
        if self.recursive_ref {
            out.push("recursive_ref");
        }
        out
    }

    pub fn parse(text: &str) -> Features {
        let mut f = Features::default();
        for name in text.split(';').filter(|s| !s.is_empty()) {
            match name {
                "variable_length_array" => f.variable_length_array = true,
                "nested_object" => f.nested_object = true,
                "recursive_ref" => f.recursive_ref = true,
                _ => {}
            }
        }
        f
    }
}

pub fn schema_features(root: &Value) -> Features {
    let mut walk = Walk {
        root,
        features: Features::default(),
        open_refs: vec!["#".to_string()],
        done_refs: HashSet::new(),
    };
    walk.visit(root);
    walk.features
}

struct Walk<'a> {
    root: &'a Value,
    features: Features,
    open_refs: Vec<String>,
    done_refs: HashSet<String>,
}

fn is_object_typed(node: &Value) -> bool {
    match node {
        Value::Object(map) => {
            matches!(map.get("type"), Some(Value::String(t)) if t == "object")
                || matches!(map.get("type"), Some(Value::Array(ts))
                    if ts.iter().any(|t| t == "object"))
                || (map.get("type").is_none()
                    && (map.contains_key("properties")
                        || map.contains_key("additionalProperties")
                        || map.contains_key("patternProperties")
                        || map.contains_key("required")))
        }
        _ => false,
    }
}

/// Single-schema `items` (not the tuple form) with no fixed length.
fn is_variable_length_array(map: &serde_json::Map<String, Value>) -> bool {
    match map.get("items") {
        Some(Value::Object(_)) | Some(Value::Bool(_)) => {
            let min = map.get("minItems").and_then(Value::as_u64);
            let max = map.get("maxItems").and_then(Value::as_u64);
            !(min.is_some() && min == max)
        }
        _ => false,
    }
}

impl Walk<'_> {
    /// Follow a `$ref` chain to the node it denotes, without marking
    /// anything visited; used for typing lookups only.
    fn resolve_shallow<'v>(&self, mut node: &'v Value) -> &'v Value
    where
        Self: 'v,
    {
        let mut seen = HashSet::new();
        while let Some(r) = ref_of(node) {
            if !seen.insert(r.to_string()) {
                break;
            }
            match resolve_pointer(self.root, r) {
                Some(target) => node = target,
                None => break,
            }
        }
        node
    }

    fn visit(&mut self, node: &Value) {
        let map = match node {
            Value::Object(map) => map,
            _ => return,
        };

        if let Some(r) = ref_of(node) {
            if self.open_refs.iter().any(|open| open == r) {
                self.features.recursive_ref = true;
            } else if !self.done_refs.contains(r) {
                if let Some(target) = resolve_pointer(self.root, r) {
                    self.open_refs.push(r.to_string());
                    self.visit(target);
                    self.open_refs.pop();
                }
                self.done_refs.insert(r.to_string());
            }
            return;
        }

        if is_variable_length_array(map) {
            self.features.variable_length_array = true;
        }

        if let Some(props) = map.get("properties").and_then(Value::as_object) {
            let object_here = is_object_typed(node);
            for (_, sub) in props {
                if object_here && is_object_typed(self.resolve_shallow(sub)) {
                    self.features.nested_object = true;
                }
                self.visit(sub);
            }
        }
        if let Some(pp) = map.get("patternProperties").and_then(Value::as_object) {
            for (_, sub) in pp {
                self.visit(sub);
            }
        }
        if let Some(ap) = map.get("additionalProperties") {
            if ap != &Value::Bool(false) {
                self.visit(ap);
            }
        }
        match map.get("items") {
            Some(Value::Array(elems)) => {
                for sub in elems {
                    self.visit(sub);
                }
            }
            Some(single) => self.visit(single),
            None => {}
        }
        for union_kw in ["oneOf", "anyOf", "allOf"] {
            if let Some(branches) = map.get(union_kw).and_then(Value::as_array) {
                for branch in branches {
                    self.visit(branch);
                }
            }
        }
    }
}
