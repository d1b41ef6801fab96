//! Per-institution collaboration tables split by counterpart category or by
//! subject, in tidy long format.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::network::{CollabNetwork, NetworkError};
use crate::subject::Subject;
use crate::InstitutionId;

const DEFAULT_FOCUS: &str = include_str!("../data/focus_nz.txt");

/// What each institution's proportions are normalized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetBasis {
    /// Total collaboration records (weighted degree).
    WeightedDegree,
    /// Sum of the institution's per-subject counts.
    SubjectTotal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetRow {
    pub institution: InstitutionId,
    pub facet: String,
    pub count: u64,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetTable {
    pub basis: FacetBasis,
    pub rows: Vec<FacetRow>,
    /// Institutions whose basis total is 0; their proportions are all 0.
    pub zero_basis: Vec<InstitutionId>,
}

impl FacetTable {
    fn new(basis: FacetBasis) -> Self {
        FacetTable { basis, rows: Vec::new(), zero_basis: Vec::new() }
    }

    fn push_institution(&mut self, id: &InstitutionId, counts: impl IntoIterator<Item = (String, u64)>) {
        let counts: Vec<(String, u64)> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            self.zero_basis.push(id.clone());
        }
        for (facet, count) in counts {
            let proportion = if total == 0 { 0.0 } else { count as f64 / total as f64 };
            self.rows.push(FacetRow { institution: id.clone(), facet, count, proportion });
        }
    }

    /// `institution,facet,count,proportion` CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["institution", "facet", "count", "proportion"])?;
        for row in &self.rows {
            w.write_record([
                row.institution.as_str(),
                row.facet.as_str(),
                &row.count.to_string(),
                &row.proportion.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Collaboration records of each institution by counterpart category.
pub fn category_facets(net: &CollabNetwork, institutions: &[InstitutionId]) -> Result<FacetTable, NetworkError> {
    let mut table = FacetTable::new(FacetBasis::WeightedDegree);
    for id in institutions {
        let counts = net.aggregate_by_category(id)?;
        table.push_institution(id, counts.iter().map(|(c, n)| (c.token().to_string(), n)));
    }
    Ok(table)
}

/// Collaboration records of each institution per subject class; every
/// subject gets a row, zeros included.
pub fn subject_facets(net: &CollabNetwork, institutions: &[InstitutionId]) -> Result<FacetTable, NetworkError> {
    if !net.has_subjects() {
        return Err(NetworkError::SubjectsUnavailable);
    }
    let mut table = FacetTable::new(FacetBasis::SubjectTotal);
    for id in institutions {
        let per = net.aggregate_by_subject(id)?;
        table.push_institution(
            id,
            Subject::ALL.iter().map(|s| (s.name().to_string(), per.get(s).copied().unwrap_or(0))),
        );
    }
    Ok(table)
}

/// Parses a focus list: one entry per line, `#` comments and blank lines skipped.
pub fn parse_focus_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn load_focus_list(path: impl AsRef<Path>) -> io::Result<Vec<String>> {
    Ok(parse_focus_list(&std::fs::read_to_string(path)?))
}

/// The fifteen universities and Crown Research Institutes, in reporting order.
pub fn default_focus_list() -> Vec<String> {
    parse_focus_list(DEFAULT_FOCUS)
}

/// Resolves focus entries (IDs or names) against the network.
pub fn resolve_focus(net: &CollabNetwork, entries: &[String]) -> Result<Vec<InstitutionId>, NetworkError> {
    entries.iter().map(|e| net.lookup(e)).collect()
}
