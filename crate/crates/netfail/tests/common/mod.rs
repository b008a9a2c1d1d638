//! Shared fixtures for the integration suites: a named graph corpus and a
//! small JSON-schema checker for the subset of draft-07 used by the shipped
//! schemas.
#![allow(dead_code)]

use netfail::graph::Graph;
use netfail::random_graph;
use serde_json::Value;

/// Named structured families: paths, cycles, stars, wheels, complete graphs.
/// All connected by construction.
pub fn family_corpus() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 2..=10 {
        out.push((format!("path-{n}"), Graph::path(n)));
    }
    for n in 3..=10 {
        out.push((format!("cycle-{n}"), Graph::cycle(n)));
    }
    for leaves in 2..=9 {
        out.push((format!("star-{}", leaves + 1), Graph::star(leaves)));
    }
    for ring in 3..=9 {
        out.push((format!("wheel-{}", ring + 1), Graph::wheel(ring)));
    }
    for n in 2..=8 {
        out.push((format!("complete-{n}"), Graph::complete(n)));
    }
    out
}

/// `count` connected G(n, p) samples; seeds are scanned deterministically
/// starting from `master_seed` so the corpus never changes between runs.
pub fn random_connected(count: usize, n: usize, p: f64, master_seed: u64) -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    let mut seed = master_seed;
    while out.len() < count {
        let g = random_graph::gnp(n, p, seed).expect("valid gnp parameters");
        if g.is_connected() {
            out.push((format!("gnp-{n}-seed{seed}"), g));
        }
        seed += 1;
    }
    out
}

/// The full acceptance corpus: structured families plus 50 random
/// connected graphs.
pub fn corpus() -> Vec<(String, Graph)> {
    let mut out = family_corpus();
    out.extend(random_connected(50, 30, 0.15, 9000));
    out
}

/// Corpus members with at most `max_n` vertices (all are connected).
pub fn corpus_up_to(max_n: usize) -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = family_corpus()
        .into_iter()
        .filter(|(_, g)| g.n() <= max_n)
        .collect();
    out.extend(random_connected(3, max_n, 0.4, 500).into_iter());
    out
}

/// Load one of the schemas shipped in `schemas/`.
pub fn load_schema(name: &str) -> Value {
    let path = format!("{}/schemas/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parsing {path}: {e}"))
}

/// Check `value` against the subset of JSON Schema the repo's schemas use:
/// `type` (single or list), `properties` + `required` + `additionalProperties:
/// false`, `items`, `enum`, and `minItems`/`maxItems`.
pub fn validate_schema(schema: &Value, value: &Value) -> Result<(), String> {
    validate_at(schema, value, "$")
}

fn validate_at(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{path}: {value} not in enum {options:?}"));
        }
    }
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
            other => return Err(format!("{path}: malformed type {other}")),
        };
        if !allowed.iter().any(|t| type_matches(t, value)) {
            return Err(format!("{path}: {value} is not of type {allowed:?}"));
        }
    }
    match value {
        Value::Object(map) => {
            if let Some(required) = schema.get("required").and_then(Value::as_array) {
                for name in required.iter().filter_map(Value::as_str) {
                    if !map.contains_key(name) {
                        return Err(format!("{path}: missing required field {name:?}"));
                    }
                }
            }
            let props = schema.get("properties").and_then(Value::as_object);
            let sealed = schema.get("additionalProperties") == Some(&Value::Bool(false));
            for (key, sub_value) in map {
                match props.and_then(|p| p.get(key)) {
                    Some(sub_schema) => {
                        validate_at(sub_schema, sub_value, &format!("{path}.{key}"))?
                    }
                    None if sealed => {
                        return Err(format!("{path}: unexpected field {key:?}"));
                    }
                    None => {}
                }
            }
        }
        Value::Array(items) => {
            if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < min {
                    return Err(format!("{path}: fewer than {min} items"));
                }
            }
            if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
                if (items.len() as u64) > max {
                    return Err(format!("{path}: more than {max} items"));
                }
            }
            if let Some(item_schema) = schema.get("items") {
                for (i, item) in items.iter().enumerate() {
                    validate_at(item_schema, item, &format!("{path}[{i}]"))?;
                }
            }
        }
        _ => {}
    }
    Ok(())
}

fn type_matches(ty: &str, value: &Value) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
        "number" => value.is_number(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        _ => false,
    }
}
