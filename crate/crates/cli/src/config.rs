//! Config files and parameter resolution.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// A parsed TOML config: top-level keys apply to every command, a table
/// named after the command applies to that command only.
#[derive(Debug, Default)]
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let table = text
            .parse::<toml::Table>()
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(Self { table })
    }

    fn top_level(&self) -> Map<String, Value> {
        self.table
            .iter()
            .filter(|(_, v)| !v.is_table())
            .map(|(k, v)| (k.clone(), to_json(v)))
            .collect()
    }

    fn section(&self, name: &str) -> Result<Map<String, Value>> {
        match self.table.get(name) {
            None => Ok(Map::new()),
            Some(toml::Value::Table(t)) => Ok(t.iter().map(|(k, v)| (k.clone(), to_json(v))).collect()),
            Some(_) => bail!("config key `{name}` must be a table"),
        }
    }
}

fn to_json(v: &toml::Value) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn object<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("parameter records serialize to objects"),
    }
}

/// Defaults, overlaid by the config's top-level keys the command knows,
/// then by its own table (where unknown keys are an error), then by every
/// flag that was given.
pub fn resolve<F, R>(command: &str, flags: &F, config: Option<&ConfigFile>) -> Result<R>
where
    F: Serialize,
    R: Serialize + DeserializeOwned + Default,
{
    let mut merged = object(&R::default());
    if let Some(cfg) = config {
        for (k, v) in cfg.top_level() {
            if merged.contains_key(&k) {
                merged.insert(k, v);
            }
        }
        for (k, v) in cfg.section(command)? {
            if !merged.contains_key(&k) {
                bail!("unknown key `{k}` in config table [{command}]");
            }
            merged.insert(k, v);
        }
    }
    for (k, v) in object(flags) {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).with_context(|| format!("invalid parameters for `{command}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Keys, KeysArgs};

    fn config(text: &str) -> ConfigFile {
        ConfigFile {
            table: text.parse().unwrap(),
        }
    }

    #[test]
    fn defaults_apply_without_config_or_flags() {
        let r: Keys = resolve("keys", &KeysArgs::default(), None).unwrap();
        assert_eq!(r, Keys::default());
    }

    #[test]
    fn each_layer_overrides_the_previous() {
        let cfg = config("d = 64\nseed = 1\n[keys]\nseed = 2\n");
        let r: Keys = resolve("keys", &KeysArgs::default(), Some(&cfg)).unwrap();
        assert_eq!((r.d, r.seed), (64, 2));
        let flags = KeysArgs {
            seed: Some(3),
            ..Default::default()
        };
        let r: Keys = resolve("keys", &flags, Some(&cfg)).unwrap();
        assert_eq!((r.d, r.seed), (64, 3));
    }

    #[test]
    fn unknown_table_keys_and_bad_types_are_rejected() {
        let none = KeysArgs::default();
        assert!(resolve::<_, Keys>("keys", &none, Some(&config("[keys]\nsed = 1\n"))).is_err());
        assert!(resolve::<_, Keys>("keys", &none, Some(&config("[keys]\nd = \"big\"\n"))).is_err());
        assert!(resolve::<_, Keys>("keys", &none, Some(&config("keys = 3\n"))).is_err());
        // Unknown top-level keys may belong to other commands.
        assert!(resolve::<_, Keys>("keys", &none, Some(&config("trials = 3\n"))).is_ok());
    }
}
