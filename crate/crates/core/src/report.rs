//! The JSON report shared by every command.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::constructions::ConditionReport;
use crate::membership::Certificate;
use crate::params::ClassParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub artifact: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ClassParams>,
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConditionReport>,
    /// Command-specific fields, kept after the common ones.
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Report {
    pub fn new(artifact: impl Into<String>, params: Option<ClassParams>) -> Self {
        Self { artifact: artifact.into(), params, certificates: Vec::new(), construction: None, extra: Map::new() }
    }

    pub fn push(&mut self, cert: Certificate) -> &mut Self {
        self.certificates.push(cert);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.extra.insert(key.to_owned(), value);
        self
    }

    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
