use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::UsageError;

/// One scenario run, read from a JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Inverts the violation assertions of counterexample scenarios.
    #[serde(default)]
    pub expect_violation: bool,
    #[serde(default = "empty_object")]
    pub params: Value,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))
    }

    /// Applies `key=value` overrides. Keys are dotted paths into the config,
    /// values are parsed as JSON and fall back to plain strings.
    pub fn apply_overrides(self, overrides: &[String]) -> Result<Self, UsageError> {
        let mut doc = serde_json::to_value(&self).expect("config serializes");
        for item in overrides {
            let (key, raw) = item.split_once('=').ok_or_else(|| {
                UsageError(format!("override `{item}` is not of the form key=value"))
            })?;
            let value =
                serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let mut slot = &mut doc;
            for part in key.split('.') {
                let obj = slot.as_object_mut().ok_or_else(|| {
                    UsageError(format!("override `{key}` does not address an object field"))
                })?;
                slot = obj.entry(part.to_string()).or_insert(Value::Null);
            }
            *slot = value;
        }
        serde_json::from_value(doc).map_err(|e| UsageError(format!("invalid overrides: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_reach_nested_params() {
        let c: ScenarioConfig =
            serde_json::from_str(r#"{"scenario": "levi-check", "params": {"spacing": 0.1}}"#)
                .unwrap();
        let c = c
            .apply_overrides(&[
                "params.spacing=0.05".into(),
                "seed=7".into(),
                "params.domain=g2".into(),
            ])
            .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.params["spacing"], 0.05);
        assert_eq!(c.params["domain"], "g2");
        assert!(c.clone().apply_overrides(&["nonsense".into()]).is_err());
        assert!(c.apply_overrides(&["bogus=1".into()]).is_err());
    }
}
