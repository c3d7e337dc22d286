//! Classification results shared by the equivalence, classifier and catalog layers.

use serde::{Deserialize, Serialize};

use crate::codes::AdditiveCode;
use crate::equivalence::Fingerprint;
use crate::error::Result;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    /// Representative in the code text format.
    pub representative: String,
    pub size: usize,
    pub fingerprint: Fingerprint,
    pub members: Vec<String>,
    /// Free-form origin labels, e.g. the seeds a code was grown from.
    #[serde(default)]
    pub provenance: Vec<String>,
}

impl ClassEntry {
    pub fn code(&self) -> Result<AdditiveCode> {
        AdditiveCode::parse_text(&self.representative)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub elapsed_ms: u64,
    pub nodes: u64,
    pub equivalence_tests: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub version: u32,
    pub q: u32,
    pub m: usize,
    pub n: usize,
    pub d: Option<usize>,
    /// False when a budget ran out or the seed set cannot certify exhaustiveness.
    pub complete: bool,
    pub classes: Vec<ClassEntry>,
    pub stats: SearchStats,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn new(q: u32, m: usize, n: usize, d: Option<usize>) -> ClassificationReport {
        ClassificationReport {
            version: REPORT_VERSION,
            q,
            m,
            n,
            d,
            complete: true,
            classes: Vec::new(),
            stats: SearchStats::default(),
            notes: Vec::new(),
        }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn representatives(&self) -> Result<Vec<AdditiveCode>> {
        self.classes.iter().map(ClassEntry::code).collect()
    }
}
