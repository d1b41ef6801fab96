//! Institutional co-authorship networks: corpus cleaning, network
//! construction, structural metrics, centrality, facet tables, synthetic
//! corpora and export.

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod category;
pub mod centrality;
pub mod export;
pub mod facets;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod network;
pub mod powerlaw;
pub mod subject;
pub mod synth;

pub use category::Category;
pub use network::{build_network, BuildOptions, CollabNetwork};
pub use subject::Subject;

/// Canonical institution identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstitutionId(String);

impl InstitutionId {
    pub fn new(id: impl Into<String>) -> Self {
        InstitutionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for InstitutionId {
    fn from(s: &str) -> Self {
        InstitutionId(s.to_string())
    }
}

impl From<String> for InstitutionId {
    fn from(s: String) -> Self {
        InstitutionId(s)
    }
}

impl From<&String> for InstitutionId {
    fn from(s: &String) -> Self {
        InstitutionId(s.clone())
    }
}

impl AsRef<str> for InstitutionId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for InstitutionId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InstitutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
