//! Scenario registry. Each scenario owns a parameter struct with defaults;
//! unknown or ill-typed parameters are usage errors.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ScenarioConfig;
use crate::report::Outcome;
use crate::UsageError;

mod cantor_potential;
mod green_identity;
mod hartogs_scan;
mod levi_check;
mod mollify_sweep;
mod slice_check;
mod staircase_build;

pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    defaults: fn() -> Value,
    normalize: fn(&Value) -> Result<Value, serde_json::Error>,
    pub run: fn(&Value, &ScenarioConfig) -> anyhow::Result<Outcome>,
}

pub const ALL: &[Scenario] = &[
    levi_check::SCENARIO,
    mollify_sweep::SCENARIO,
    staircase_build::SCENARIO,
    hartogs_scan::SCENARIO,
    cantor_potential::SCENARIO,
    green_identity::SCENARIO,
    slice_check::SCENARIO,
];

fn defaults_of<P: Default + Serialize>() -> Value {
    serde_json::to_value(P::default()).expect("defaults serialize")
}

fn normalize_of<P: DeserializeOwned + Serialize>(v: &Value) -> Result<Value, serde_json::Error> {
    let p: P = serde_json::from_value(v.clone())?;
    serde_json::to_value(p)
}

/// Parses already-normalized parameters into the scenario's struct.
fn params<P: DeserializeOwned>(v: &Value) -> anyhow::Result<P> {
    Ok(serde_json::from_value(v.clone())?)
}

pub fn find(name: &str) -> Result<&'static Scenario, UsageError> {
    ALL.iter().find(|s| s.name == name).ok_or_else(|| {
        let names: Vec<&str> = ALL.iter().map(|s| s.name).collect();
        UsageError(format!(
            "unknown scenario `{name}`; valid scenarios: {}",
            names.join(", ")
        ))
    })
}

/// Fills in defaults and echoes the complete parameter set.
pub fn merge_defaults(scenario: &Scenario, given: &Value) -> Result<Value, UsageError> {
    if !given.is_object() {
        return Err(UsageError("`params` must be a JSON object".into()));
    }
    (scenario.normalize)(given)
        .map_err(|e| UsageError(format!("invalid parameters for {}: {e}", scenario.name)))
}

fn type_of(v: &Value) -> Value {
    match v {
        Value::Null => json!(["number", "null"]),
        Value::Bool(_) => json!("boolean"),
        Value::Number(n) if n.is_u64() => json!("integer"),
        Value::Number(_) => json!("number"),
        Value::String(_) => json!("string"),
        Value::Array(_) => json!("array"),
        Value::Object(_) => json!("object"),
    }
}

/// One JSON schema per scenario, derived from its defaults.
pub fn schema() -> Value {
    let list: Vec<Value> = ALL
        .iter()
        .map(|s| {
            let defaults = (s.defaults)();
            let props: Map<String, Value> = defaults
                .as_object()
                .expect("parameters are objects")
                .iter()
                .map(|(k, v)| (k.clone(), json!({ "type": type_of(v), "default": v })))
                .collect();
            json!({
                "name": s.name,
                "description": s.description,
                "parameters": {
                    "type": "object",
                    "properties": props,
                    "additionalProperties": false,
                },
            })
        })
        .collect();
    Value::Array(list)
}
