use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::corpus::{CorpusSpec, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub family: Family,
    pub size: usize,
    pub seed: u64,
    pub mean_zero: bool,
}

impl From<&CorpusSpec> for CorpusInfo {
    fn from(c: &CorpusSpec) -> Self {
        Self {
            family: c.family,
            size: c.size,
            seed: c.seed,
            mean_zero: c.mean_zero,
        }
    }
}

/// Outcome of one empirical check. Contains no timings, so identical inputs
/// serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    /// The inequality or identity being tested, written out.
    pub anchor: String,
    pub corpus: Option<CorpusInfo>,
    pub empirical: BTreeMap<String, f64>,
    pub theoretical: Option<f64>,
    pub worst_sample: Option<usize>,
    pub worst_value: Option<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, anchor: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            anchor: anchor.into(),
            corpus: None,
            empirical: BTreeMap::new(),
            theoretical: None,
            worst_sample: None,
            worst_value: None,
            verdict: Verdict::Fail,
            notes: Vec::new(),
        }
    }

    pub fn with_corpus(mut self, corpus: Option<CorpusInfo>) -> Self {
        self.corpus = corpus;
        self
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.empirical.insert(key.to_string(), v);
        self
    }

    pub fn set(&mut self, key: &str, v: f64) {
        self.empirical.insert(key.to_string(), v);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn worst(mut self, arg: Option<(f64, usize)>) -> Self {
        if let Some((v, i)) = arg {
            self.worst_value = Some(v);
            self.worst_sample = Some(i);
        }
        self
    }

    pub fn verdict(mut self, ok: bool) -> Self {
        self.verdict = Verdict::from_bool(ok);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}
