//! Verification reports and canonical JSON.
//!
//! A [`Report`] is a list of assertion [`Entry`]s. Each entry names the
//! property it checks through an anchor drawn from
//! [`ANCHORS`], its status, and the worst slack seen (threshold minus
//! observed; negative means violated).
//!
//! Canonical JSON sorts object keys and prints every float with 17
//! significant digits, so equal reports serialize to equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Every anchor a report entry may carry.
pub const ANCHORS: &[&str] = &[
    // directed systems
    "directed-index-set",
    "dims-monotone",
    "identity-embedding",
    "composition-law",
    "injective-embedding",
    "involution-preserving",
    "order-preserving",
    "schwarz-inequality",
    "contractive-embedding",
    "positivity-reflecting",
    "unit-in-range",
    // elements
    "coherence",
    "bounded-closure",
    "involution-isometric",
    "completeness",
    "hermitian-decomposition",
    // order
    "pre-unit",
    "pre-unit-uniqueness",
    "bounded-iff-order-bounded",
    "p-equals-bounded-norm",
    "missing-representative",
    "real-imaginary-bounds",
    // multiplication
    "unit-criterion",
    "banach-inequality",
    "c-star-property",
    "partiality",
    // functionals
    "functional-coherence",
    "functional-positivity",
    "kernel-reflecting",
    "order-bound-to-functional-bound",
    "order-bound-to-squared-bound",
    "functional-bound-to-order-bound",
    "p-upper-bound",
    // representations
    "hilbert-injective",
    "hilbert-contractive",
    "hilbert-identity",
    "hilbert-cocycle",
    "star-homomorphism",
    "representation-coherence",
    "faithfulness",
    "componentwise-faithfulness",
    "representation-bound",
    "faithful-representation-isometry",
    "direct-sum-isometry",
    // rigged model
    "graph-norm-pairing",
    "scale-contraction",
    "transport-identity",
    "bounded-norm-at-zero-weight",
    "bounded-iff-closable-bounded",
    "bounded-iff-order-bounded-scale",
    "positivity-transport",
    "cross-model-consistency",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Informational result, not a hard assertion.
    Reported,
    /// Holds for structural reasons at finite dimension; nothing to test.
    Automatic,
    /// Not evaluated; the entry's witness says why.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub worst_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
}

impl Entry {
    /// Pass/fail entry from a worst slack (pass iff `slack >= 0`).
    pub fn check(id: impl Into<String>, anchor: &str, worst_slack: f64) -> Self {
        let status = if worst_slack >= 0.0 { Status::Pass } else { Status::Fail };
        Self::with_status(id, anchor, status, worst_slack)
    }

    pub fn with_status(id: impl Into<String>, anchor: &str, status: Status, worst_slack: f64) -> Self {
        debug_assert!(ANCHORS.contains(&anchor), "unknown anchor {anchor}");
        Self {
            id: id.into(),
            anchor: anchor.to_string(),
            status,
            worst_slack,
            witness: None,
        }
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Running minimum of slacks with the witness of the worst case.
#[derive(Debug, Clone, Default)]
pub struct SlackTracker {
    worst: Option<f64>,
    witness: Option<Value>,
    count: usize,
}

impl SlackTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, slack: f64, witness: impl FnOnce() -> Value) {
        self.count += 1;
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        if self.worst.is_none_or(|w| slack < w) {
            self.worst = Some(slack);
            if slack < 0.0 {
                self.witness = Some(witness());
            }
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn worst(&self) -> f64 {
        self.worst.unwrap_or(f64::INFINITY)
    }

    pub fn entry(self, id: impl Into<String>, anchor: &str) -> Entry {
        let mut e = Entry::check(id, anchor, self.worst());
        e.witness = self.witness;
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub system_id: String,
    pub trials: usize,
    pub entries: Vec<Entry>,
    /// Named scalar results (constants, empirical ratios, counts).
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(suite: impl Into<String>, system_id: impl Into<String>, trials: usize) -> Self {
        Self {
            suite: suite.into(),
            system_id: system_id.into(),
            trials,
            entries: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    /// Merges `other`, prefixing its entry ids and metric names with its
    /// suite name.
    pub fn extend(&mut self, other: Report) {
        for mut e in other.entries {
            e.id = format!("{}.{}", other.suite, e.id);
            self.entries.push(e);
        }
        for (k, v) in other.metrics {
            self.metrics.insert(format!("{}.{}", other.suite, k), v);
        }
    }

    pub fn passes(&self) -> usize {
        self.entries.iter().filter(|e| e.status == Status::Pass).count()
    }

    pub fn failures(&self) -> Vec<&Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(Entry::passed)
    }

    pub fn entry(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// JSON object with derived `passes` and `failures` fields.
    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let obj = v.as_object_mut().expect("report is an object");
        obj.insert("passes".into(), Value::from(self.passes()));
        obj.insert(
            "failures".into(),
            serde_json::to_value(self.failures()).expect("entries serialize"),
        );
        v
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&self.to_value())
    }

    /// One line per entry, `PASS`/`FAIL`/... followed by id and slack.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let tag = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Reported => "INFO",
                Status::Automatic => "AUTO",
                Status::Skipped => "SKIP",
            };
            let _ = writeln!(
                s,
                "{tag} {}/{} [{}] slack={:e}",
                self.suite, e.id, e.anchor, e.worst_slack
            );
        }
        s
    }
}

/// Serializes with sorted keys and 17-significant-digit floats.
/// Non-finite floats become `null`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Hex SHA-256 of the canonical JSON form.
pub fn fingerprint(v: &Value) -> String {
    let digest = Sha256::digest(canonical_json(v).as_bytes());
    hex::encode(digest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_sorts_keys_and_fixes_floats() {
        let v = json!({"b": 1.5, "a": [1, -0.1, "x"], "c": null});
        assert_eq!(
            canonical_json(&v),
            r#"{"a":[1,-1.0000000000000001e-1,"x"],"b":1.5000000000000000e0,"c":null}"#
        );
        let reparsed: Value = serde_json::from_str(&canonical_json(&v)).unwrap();
        assert_eq!(reparsed["b"].as_f64(), Some(1.5));
    }

    #[test]
    fn tracker_keeps_worst_witness() {
        let mut t = SlackTracker::new();
        t.observe(0.5, || json!(1));
        t.observe(-0.25, || json!(2));
        t.observe(-0.1, || json!(3));
        let e = t.entry("x", "coherence");
        assert_eq!(e.status, Status::Fail);
        assert_eq!(e.worst_slack, -0.25);
        assert_eq!(e.witness, Some(json!(2)));
    }

    #[test]
    fn report_counts() {
        let mut r = Report::new("s", "sys", 3);
        r.push(Entry::check("a", "coherence", 1.0));
        r.push(Entry::check("b", "coherence", -1.0));
        r.push(Entry::with_status("c", "coherence", Status::Reported, 0.0));
        assert_eq!(r.passes(), 1);
        assert_eq!(r.failures().len(), 1);
        assert!(!r.all_passed());
        let v = r.to_value();
        assert_eq!(v["passes"], json!(1));
        assert_eq!(v["failures"].as_array().unwrap().len(), 1);
    }
}
