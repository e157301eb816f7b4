use std::collections::BTreeMap;
use std::fmt::Write;

use super::config::{RunConfig, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(u64),
    Float(f64),
    Str(String),
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Num(v)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Num(v as u64)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Num(v as u64)
    }
}

impl From<u128> for Value {
    fn from(v: u128) -> Self {
        u64::try_from(v).map_or_else(|_| Value::Str(v.to_string()), Value::Num)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Value::Float(v)
        } else {
            Value::Str(v.to_string())
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
        }
    }
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Ordered key=value records; the summary is the same map with sorted keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        let mut r = Report {
            entries: Vec::new(),
        };
        r.set("format", FORMAT_VERSION);
        r.set("command", command);
        r.set("config.p", config.p);
        r.set("config.n", config.n);
        r.set("config.seed", config.seed);
        r.set("config.mode", config.mode.to_string());
        r.set("config.trials", config.trials);
        r.set("config.restart-cap", config.restart_cap);
        r
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        let key = key.into();
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    pub fn summary_json(&self) -> String {
        let map: BTreeMap<&str, serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, v)| {
                let j = match v {
                    Value::Num(n) => serde_json::Value::from(*n),
                    Value::Float(x) => serde_json::Value::from(*x),
                    Value::Str(s) => serde_json::Value::from(s.as_str()),
                };
                (k.as_str(), j)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&map).expect("string keys");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldMode;

    #[test]
    fn text_keeps_order_and_json_sorts() {
        let cfg = RunConfig {
            p: 11,
            n: 2,
            seed: 7,
            mode: FieldMode::Standard,
            trials: 1,
            restart_cap: 1000,
        };
        let mut r = Report::new("demo", &cfg);
        r.set("zeta", 1u64);
        r.set("alpha", 0.5);
        r.set("zeta", 2u64);
        let text = r.text();
        assert!(text.starts_with("format=lrs-report v1\ncommand=demo\nconfig.p=11\n"));
        assert!(text.ends_with("zeta=2\nalpha=0.5\n"));
        let json: serde_json::Value = serde_json::from_str(&r.summary_json()).unwrap();
        assert_eq!(json["config.seed"], 7);
        assert_eq!(json["format"], "lrs-report v1");
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(Value::from(u128::MAX), Value::Str(u128::MAX.to_string()));
    }
}
