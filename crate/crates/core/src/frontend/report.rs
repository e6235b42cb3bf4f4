//! Machine-readable command reports.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
    Ok,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Accept | Verdict::Ok => 0,
            Verdict::Reject => 1,
            Verdict::Error => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub command: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub sizes: BTreeMap<String, u64>,
    pub details: BTreeMap<String, Value>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: format!("algproof {}", env!("CARGO_PKG_VERSION")),
            command,
            verdict: Verdict::Ok,
            reason: None,
            sizes: BTreeMap::new(),
            details: BTreeMap::new(),
            seed,
            timings_ms: None,
        }
    }

    pub fn size(&mut self, key: &str, v: usize) -> &mut Self {
        self.sizes.insert(key.to_string(), v as u64);
        self
    }

    pub fn detail(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.details.insert(key.to_string(), v.into());
        self
    }

    pub fn accept(&mut self) {
        self.verdict = Verdict::Accept;
    }

    pub fn reject(&mut self, reason: impl Into<String>) {
        self.verdict = Verdict::Reject;
        self.reason = Some(reason.into());
    }

    pub fn error(&mut self, reason: impl Into<String>) {
        self.verdict = Verdict::Error;
        self.reason = Some(reason.into());
    }

    pub fn timing(&mut self, key: &str, ms: f64) {
        self.timings_ms.get_or_insert_with(BTreeMap::new).insert(key.to_string(), ms);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let v = serde_json::to_value(self.verdict).unwrap();
        writeln!(s, "verdict: {}", v.as_str().unwrap()).unwrap();
        if let Some(r) = &self.reason {
            writeln!(s, "reason: {r}").unwrap();
        }
        for (k, v) in &self.sizes {
            writeln!(s, "size.{k}: {v}").unwrap();
        }
        for (k, v) in &self.details {
            match v {
                Value::String(t) => writeln!(s, "{k}: {t}").unwrap(),
                other => writeln!(s, "{k}: {other}").unwrap(),
            }
        }
        if let Some(t) = &self.timings_ms {
            for (k, v) in t {
                writeln!(s, "time.{k}: {v:.3} ms").unwrap();
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_has_schema_version() {
        let mut r = Report::new(vec!["verify-cps".into()], 7);
        r.size("proof", 12).detail("mode", "exact");
        r.reject("not conic");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["verdict"], "reject");
        assert_eq!(v["sizes"]["proof"], 12);
        assert!(v.get("timings_ms").is_none());
        assert_eq!(r.verdict.exit_code(), 1);
        assert!(r.to_text().starts_with("verdict: reject\nreason: not conic\n"));
    }
}
