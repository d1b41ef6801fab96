//! Publication-record ingestion and affiliation resolution.
//!
//! Two inputs feed the pipeline:
//!
//! * a mapping CSV (`affiliation_id,institution_id,institution_name,category`)
//!   that groups many raw affiliation IDs under one canonical institution, and
//! * a JSON Lines file of publications, each listing its authors and the raw
//!   affiliation IDs they published under.
//!
//! [`ingest_records`] joins the two, applies the year window, drops
//! unresolvable affiliations and duplicate publication IDs, and records every
//! dropped publication in an [`ExclusionLog`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::category::Category;
use crate::subject::Subject;
use crate::InstitutionId;

pub const MAPPING_HEADER: [&str; 4] = ["affiliation_id", "institution_id", "institution_name", "category"];

/// Inclusive default publication-year window.
pub const DEFAULT_YEAR_RANGE: (i32, i32) = (2010, 2015);

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("mapping line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("mapping line {line}: unknown category `{token}`")]
    UnknownCategory { line: u64, token: String },
    #[error("mapping line {line}: {detail}")]
    ConflictingMapping { line: u64, detail: String },
    #[error("records line {line}: {reason}")]
    MalformedLine { line: u64, reason: String },
    #[error("invalid year range {min}..={max}")]
    InvalidYearRange { min: i32, max: i32 },
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io { path: path.to_path_buf(), source }
    }
}

/// A mapped institution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Institution {
    pub id: InstitutionId,
    pub name: String,
    pub category: Category,
}

/// Case- and whitespace-insensitive form used for name uniqueness.
pub fn canonical_name(name: &str) -> String {
    name.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Affiliation ID to institution mapping plus institution metadata.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstitutionRegistry {
    affiliations: BTreeMap<String, InstitutionId>,
    institutions: BTreeMap<InstitutionId, Institution>,
    names: BTreeMap<String, InstitutionId>,
}

impl InstitutionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one mapping row. `line` is only used in error messages.
    pub fn insert(
        &mut self,
        line: u64,
        affiliation_id: &str,
        institution_id: &str,
        name: &str,
        category: Category,
    ) -> Result<(), IngestError> {
        let inst = InstitutionId::from(institution_id);
        if let Some(existing) = self.affiliations.get(affiliation_id) {
            if *existing != inst {
                return Err(IngestError::ConflictingMapping {
                    line,
                    detail: format!(
                        "affiliation `{affiliation_id}` already maps to `{existing}`, not `{inst}`"
                    ),
                });
            }
        }
        let canon = canonical_name(name);
        match self.institutions.get(&inst) {
            Some(known) => {
                if canonical_name(&known.name) != canon || known.category != category {
                    return Err(IngestError::ConflictingMapping {
                        line,
                        detail: format!(
                            "institution `{inst}` redefined as ({name}, {category}); was ({}, {})",
                            known.name, known.category
                        ),
                    });
                }
            }
            None => {
                if let Some(other) = self.names.get(&canon) {
                    return Err(IngestError::ConflictingMapping {
                        line,
                        detail: format!("institution name `{name}` already used by `{other}`"),
                    });
                }
                self.names.insert(canon, inst.clone());
                self.institutions.insert(
                    inst.clone(),
                    Institution { id: inst.clone(), name: name.trim().to_string(), category },
                );
            }
        }
        self.affiliations.insert(affiliation_id.to_string(), inst);
        Ok(())
    }

    pub fn resolve(&self, affiliation_id: &str) -> Option<&InstitutionId> {
        self.affiliations.get(affiliation_id)
    }

    pub fn institution(&self, id: &InstitutionId) -> Option<&Institution> {
        self.institutions.get(id)
    }

    pub fn institutions(&self) -> impl Iterator<Item = &Institution> {
        self.institutions.values()
    }

    /// Finds an institution by exact ID or by canonicalized name.
    pub fn lookup(&self, key: &str) -> Option<&Institution> {
        self.institutions
            .get(&InstitutionId::from(key))
            .or_else(|| self.names.get(&canonical_name(key)).and_then(|id| self.institutions.get(id)))
    }

    /// Smallest affiliation ID mapped to `id`.
    pub fn representative_affiliation(&self, id: &InstitutionId) -> Option<&str> {
        self.affiliations
            .iter()
            .find(|(_, inst)| *inst == id)
            .map(|(aff, _)| aff.as_str())
    }

    pub fn affiliation_count(&self) -> usize {
        self.affiliations.len()
    }

    pub fn institution_count(&self) -> usize {
        self.institutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.affiliations.is_empty()
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut registry = InstitutionRegistry::new();
        let mut seen_header = false;
        for result in rdr.records() {
            let record = result.map_err(|e| IngestError::MalformedRow {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                reason: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if !seen_header {
                let header: Vec<&str> = record.iter().map(str::trim).collect();
                if header != MAPPING_HEADER {
                    return Err(IngestError::MalformedRow {
                        line,
                        reason: format!("expected header `{}`", MAPPING_HEADER.join(",")),
                    });
                }
                seen_header = true;
                continue;
            }
            if record.len() != 4 {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("expected 4 columns, found {}", record.len()),
                });
            }
            let aff = record[0].trim();
            let inst = record[1].trim();
            let name = record[2].trim();
            let token = record[3].trim();
            if aff.is_empty() || inst.is_empty() || name.is_empty() {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: "empty affiliation_id, institution_id or institution_name".into(),
                });
            }
            let category: Category = token
                .parse()
                .map_err(|_| IngestError::UnknownCategory { line, token: token.to_string() })?;
            registry.insert(line, aff, inst, name, category)?;
        }
        Ok(registry)
    }

    /// Writes the registry back out in mapping-CSV form, sorted by affiliation ID.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(MAPPING_HEADER)?;
        for (aff, inst) in &self.affiliations {
            let info = &self.institutions[inst];
            w.write_record([aff.as_str(), inst.as_str(), info.name.as_str(), info.category.token()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a mapping CSV.
pub fn load_mapping(path: impl AsRef<Path>) -> Result<InstitutionRegistry, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    InstitutionRegistry::from_reader(BufReader::new(file))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAuthor {
    author_id: String,
    #[serde(default)]
    affiliation_ids: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawRecord {
    pub_id: String,
    year: i32,
    #[serde(default)]
    subjects: Vec<String>,
    #[serde(default)]
    authors: Vec<RawAuthor>,
}

/// One publication as read from the records file, before resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub year: i32,
    pub subjects: Vec<String>,
    /// `(author_id, affiliation_id)` pairs, deduplicated, in input order.
    pub authorships: Vec<(String, String)>,
}

impl PublicationRecord {
    fn from_raw(raw: RawRecord, line: u64) -> Result<Self, IngestError> {
        if raw.pub_id.trim().is_empty() {
            return Err(IngestError::MalformedLine { line, reason: "empty pub_id".into() });
        }
        let mut seen = HashSet::new();
        let mut authorships = Vec::new();
        for author in raw.authors {
            if author.author_id.trim().is_empty() {
                return Err(IngestError::MalformedLine { line, reason: "empty author_id".into() });
            }
            for aff in author.affiliation_ids {
                let pair = (author.author_id.clone(), aff);
                if seen.insert(pair.clone()) {
                    authorships.push(pair);
                }
            }
        }
        Ok(PublicationRecord {
            pub_id: raw.pub_id,
            year: raw.year,
            subjects: raw.subjects,
            authorships,
        })
    }
}

/// Parses a JSON Lines stream. Blank lines are skipped.
pub fn read_records<R: BufRead>(reader: R) -> impl Iterator<Item = Result<PublicationRecord, IngestError>> {
    reader.lines().enumerate().filter_map(|(idx, line)| {
        let line_no = idx as u64 + 1;
        let text = match line {
            Ok(t) => t,
            Err(e) => {
                return Some(Err(IngestError::MalformedLine { line: line_no, reason: e.to_string() }))
            }
        };
        if text.trim().is_empty() {
            return None;
        }
        Some(
            serde_json::from_str::<RawRecord>(&text)
                .map_err(|e| IngestError::MalformedLine { line: line_no, reason: e.to_string() })
                .and_then(|raw| PublicationRecord::from_raw(raw, line_no)),
        )
    })
}

/// An author of a clean record with their resolved, deduplicated institutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedAuthor {
    pub author_id: String,
    pub institutions: BTreeSet<InstitutionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanRecord {
    pub pub_id: String,
    pub year: i32,
    pub subjects: BTreeSet<Subject>,
    pub authors: Vec<ResolvedAuthor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExclusionReason {
    /// Publication year outside the requested window.
    OutOfRange,
    /// No authorship could be resolved to a mapped institution.
    Unresolvable,
    /// Repeated `pub_id`; the first occurrence is kept.
    Duplicate,
}

impl ExclusionReason {
    pub const ALL: [ExclusionReason; 3] =
        [ExclusionReason::OutOfRange, ExclusionReason::Unresolvable, ExclusionReason::Duplicate];

    pub fn token(self) -> &'static str {
        match self {
            ExclusionReason::OutOfRange => "out_of_range",
            ExclusionReason::Unresolvable => "unresolvable",
            ExclusionReason::Duplicate => "duplicate",
        }
    }
}

/// Per-reason counts of dropped publications.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExclusionLog {
    counts: BTreeMap<ExclusionReason, usize>,
}

impl ExclusionLog {
    pub fn record(&mut self, reason: ExclusionReason) {
        *self.counts.entry(reason).or_default() += 1;
    }

    pub fn get(&self, reason: ExclusionReason) -> usize {
        self.counts.get(&reason).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// `reason,count` CSV with one row per reason, zeros included.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["reason", "count"])?;
        for reason in ExclusionReason::ALL {
            w.write_record([reason.token(), &self.get(reason).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Resolved, filtered corpus ready for network construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanCorpus {
    pub records: Vec<CleanRecord>,
    pub year_range: (i32, i32),
    pub exclusion_log: ExclusionLog,
    /// Number of publications read before filtering.
    pub input_count: usize,
    /// Authorships dropped because their affiliation ID is not mapped.
    pub dropped_authorships: usize,
    /// Subject tags that are not ASJC classes; they are ignored.
    pub ignored_subject_tags: usize,
    /// Metadata for every institution referenced by `records`.
    pub institutions: BTreeMap<InstitutionId, Institution>,
}

impl CleanCorpus {
    pub fn empty(year_range: (i32, i32)) -> Self {
        CleanCorpus {
            records: Vec::new(),
            year_range,
            exclusion_log: ExclusionLog::default(),
            input_count: 0,
            dropped_authorships: 0,
            ignored_subject_tags: 0,
            institutions: BTreeMap::new(),
        }
    }

    pub fn category_of(&self, id: &InstitutionId) -> Option<Category> {
        self.institutions.get(id).map(|i| i.category)
    }

    /// Writes the corpus back out as JSON Lines, using each institution's
    /// smallest affiliation ID so that re-ingestion reproduces the records.
    pub fn write_jsonl<W: Write>(&self, registry: &InstitutionRegistry, mut writer: W) -> std::io::Result<()> {
        for rec in &self.records {
            let raw = RawRecord {
                pub_id: rec.pub_id.clone(),
                year: rec.year,
                subjects: rec.subjects.iter().map(|s| s.name().to_string()).collect(),
                authors: rec
                    .authors
                    .iter()
                    .map(|a| RawAuthor {
                        author_id: a.author_id.clone(),
                        affiliation_ids: a
                            .institutions
                            .iter()
                            .filter_map(|i| registry.representative_affiliation(i).map(str::to_string))
                            .collect(),
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut writer, &raw)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Resolves and filters a stream of parsed publications.
pub fn clean_records<I>(
    records: I,
    registry: &InstitutionRegistry,
    year_range: (i32, i32),
) -> Result<CleanCorpus, IngestError>
where
    I: IntoIterator<Item = Result<PublicationRecord, IngestError>>,
{
    let (min, max) = year_range;
    if min > max {
        return Err(IngestError::InvalidYearRange { min, max });
    }
    let mut corpus = CleanCorpus::empty(year_range);
    let mut seen_ids = HashSet::new();
    for rec in records {
        let rec = rec?;
        corpus.input_count += 1;
        if !seen_ids.insert(rec.pub_id.clone()) {
            log::warn!("duplicate pub_id `{}`; keeping first occurrence", rec.pub_id);
            corpus.exclusion_log.record(ExclusionReason::Duplicate);
            continue;
        }
        if rec.year < min || rec.year > max {
            corpus.exclusion_log.record(ExclusionReason::OutOfRange);
            continue;
        }

        let mut authors: Vec<ResolvedAuthor> = Vec::new();
        for (author_id, aff) in &rec.authorships {
            let Some(inst) = registry.resolve(aff) else {
                corpus.dropped_authorships += 1;
                continue;
            };
            match authors.iter_mut().find(|a| &a.author_id == author_id) {
                Some(a) => {
                    a.institutions.insert(inst.clone());
                }
                None => authors.push(ResolvedAuthor {
                    author_id: author_id.clone(),
                    institutions: BTreeSet::from([inst.clone()]),
                }),
            }
        }
        if authors.is_empty() {
            corpus.exclusion_log.record(ExclusionReason::Unresolvable);
            continue;
        }

        let mut subjects = BTreeSet::new();
        for tag in &rec.subjects {
            match tag.parse::<Subject>() {
                Ok(s) => {
                    subjects.insert(s);
                }
                Err(_) => corpus.ignored_subject_tags += 1,
            }
        }
        for a in &authors {
            for inst in &a.institutions {
                if !corpus.institutions.contains_key(inst) {
                    let info = registry.institution(inst).expect("registry maps to known institutions");
                    corpus.institutions.insert(inst.clone(), info.clone());
                }
            }
        }
        corpus.records.push(CleanRecord { pub_id: rec.pub_id, year: rec.year, subjects, authors });
    }
    Ok(corpus)
}

/// Reads a JSON Lines records file and resolves it against `registry`.
pub fn ingest_records(
    records_file: impl AsRef<Path>,
    registry: &InstitutionRegistry,
    year_range: (i32, i32),
) -> Result<CleanCorpus, IngestError> {
    let path = records_file.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    clean_records(read_records(BufReader::new(file)), registry, year_range)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub records: usize,
    pub institutions: usize,
    pub authors: usize,
    pub per_category: BTreeMap<Category, usize>,
}

pub fn corpus_summary(corpus: &CleanCorpus) -> CorpusSummary {
    let mut institutions = BTreeSet::new();
    let mut authors = BTreeSet::new();
    for rec in &corpus.records {
        for a in &rec.authors {
            authors.insert(a.author_id.as_str());
            institutions.extend(a.institutions.iter());
        }
    }
    let mut per_category = BTreeMap::new();
    for inst in &institutions {
        if let Some(c) = corpus.category_of(inst) {
            *per_category.entry(c).or_insert(0) += 1;
        }
    }
    CorpusSummary {
        records: corpus.records.len(),
        institutions: institutions.len(),
        authors: authors.len(),
        per_category,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAPPING: &str = "\
affiliation_id,institution_id,institution_name,category
AF_AUT,aut,AUT University,HigherEducation
AF_ESR,esr,ESR,Government
AF_GNS,gns,GNS Science,Government
AF_GNS2,gns,GNS Science,Government
";

    fn registry() -> InstitutionRegistry {
        InstitutionRegistry::from_reader(MAPPING.as_bytes()).unwrap()
    }

    fn clean(lines: &str, reg: &InstitutionRegistry) -> CleanCorpus {
        clean_records(read_records(lines.as_bytes()), reg, DEFAULT_YEAR_RANGE).unwrap()
    }

    #[test]
    fn many_affiliations_one_institution() {
        let reg = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n\
             AF81,uoa,University of Auckland,HigherEducation\n\
             AF82,uoa,University of Auckland,HigherEducation\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(reg.resolve("AF81").unwrap().as_str(), "uoa");
        assert_eq!(reg.resolve("AF82").unwrap().as_str(), "uoa");
        assert_eq!(reg.institution_count(), 1);
        assert_eq!(reg.representative_affiliation(&"uoa".into()), Some("AF81"));
    }

    #[test]
    fn header_only_is_empty() {
        let reg = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n".as_bytes(),
        )
        .unwrap();
        assert!(reg.is_empty());
        assert!(InstitutionRegistry::from_reader("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn conflicting_affiliation() {
        let err = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n\
             AF1,a,Alpha,Government\n\
             AF1,b,Beta,Government\n"
                .as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::ConflictingMapping { line: 3, .. }), "{err}");
    }

    #[test]
    fn conflicting_category_or_name() {
        let err = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n\
             AF1,a,Alpha,Government\n\
             AF2,a,Alpha,HigherEducation\n"
                .as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::ConflictingMapping { .. }));

        let err = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n\
             AF1,a,Alpha Institute,Government\n\
             AF2,b,alpha  institute,Government\n"
                .as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::ConflictingMapping { .. }));
    }

    #[test]
    fn malformed_rows() {
        let err = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\nAF1,a,Alpha\n".as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }), "{err}");

        let err = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n,a,Alpha,Government\n".as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { .. }));

        let err = InstitutionRegistry::from_reader("aff,inst,name,cat\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 1, .. }));
    }

    #[test]
    fn unknown_category_rejected() {
        let err = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\nAF1,a,Alpha,Gov\n".as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::UnknownCategory { ref token, .. } if token == "Gov"));
    }

    #[test]
    fn quoted_names() {
        let reg = InstitutionRegistry::from_reader(
            "affiliation_id,institution_id,institution_name,category\n\
             AF1,pf,\"Plant and Food Research, NZ\",Government\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(reg.lookup("pf").unwrap().name, "Plant and Food Research, NZ");
        assert_eq!(reg.lookup("plant and food research, nz").unwrap().id.as_str(), "pf");
    }

    #[test]
    fn three_institution_publication() {
        let reg = registry();
        let corpus = clean(
            r#"{"pub_id":"p1","year":2012,"subjects":["Medicine"],"authors":[{"author_id":"a1","affiliation_ids":["AF_AUT"]},{"author_id":"a2","affiliation_ids":["AF_ESR"]},{"author_id":"a3","affiliation_ids":["AF_GNS"]}]}"#,
            &reg,
        );
        assert_eq!(corpus.records.len(), 1);
        let rec = &corpus.records[0];
        assert_eq!(rec.authors.len(), 3);
        assert!(rec.authors.iter().all(|a| a.institutions.len() == 1));
        assert_eq!(corpus.exclusion_log.total(), 0);
    }

    #[test]
    fn unmapped_only_affiliation_excluded() {
        let reg = registry();
        let corpus = clean(
            r#"{"pub_id":"p1","year":2012,"authors":[{"author_id":"a1","affiliation_ids":["AF_UNKNOWN"]}]}"#,
            &reg,
        );
        assert!(corpus.records.is_empty());
        assert_eq!(corpus.exclusion_log.get(ExclusionReason::Unresolvable), 1);
        assert_eq!(corpus.dropped_authorships, 1);
    }

    #[test]
    fn partial_resolution_keeps_record() {
        let reg = registry();
        let corpus = clean(
            r#"{"pub_id":"p1","year":2012,"authors":[{"author_id":"a1","affiliation_ids":["AF_UNKNOWN","AF_AUT"]},{"author_id":"a2","affiliation_ids":["AF_X"]}]}"#,
            &reg,
        );
        assert_eq!(corpus.records.len(), 1);
        assert_eq!(corpus.records[0].authors.len(), 1);
        assert_eq!(corpus.dropped_authorships, 2);
    }

    #[test]
    fn same_institution_affiliations_collapse() {
        let reg = registry();
        let corpus = clean(
            r#"{"pub_id":"p1","year":2012,"authors":[{"author_id":"a1","affiliation_ids":["AF_GNS","AF_GNS2"]}]}"#,
            &reg,
        );
        assert_eq!(corpus.records[0].authors[0].institutions.len(), 1);
    }

    #[test]
    fn empty_input() {
        let corpus = clean("", &registry());
        assert!(corpus.records.is_empty());
        assert_eq!(corpus.input_count, 0);
        let s = corpus_summary(&corpus);
        assert_eq!((s.records, s.institutions, s.authors), (0, 0, 0));
        assert!(s.per_category.is_empty());
    }

    #[test]
    fn year_window_inclusive() {
        let reg = registry();
        let lines = [2009, 2010, 2015, 2016]
            .iter()
            .map(|y| {
                format!(
                    r#"{{"pub_id":"p{y}","year":{y},"authors":[{{"author_id":"a","affiliation_ids":["AF_AUT"]}}]}}"#
                )
            })
            .collect::<Vec<_>>()
            .join("\n");
        let corpus = clean(&lines, &reg);
        let years: Vec<i32> = corpus.records.iter().map(|r| r.year).collect();
        assert_eq!(years, vec![2010, 2015]);
        assert_eq!(corpus.exclusion_log.get(ExclusionReason::OutOfRange), 2);
    }

    #[test]
    fn invalid_year_range() {
        let err = clean_records(read_records("".as_bytes()), &registry(), (2015, 2010)).unwrap_err();
        assert!(matches!(err, IngestError::InvalidYearRange { .. }));
    }

    #[test]
    fn duplicate_pub_id_keeps_first() {
        let reg = registry();
        let corpus = clean(
            "{\"pub_id\":\"p1\",\"year\":2012,\"authors\":[{\"author_id\":\"a1\",\"affiliation_ids\":[\"AF_AUT\"]}]}\n\
             {\"pub_id\":\"p1\",\"year\":2013,\"authors\":[{\"author_id\":\"a2\",\"affiliation_ids\":[\"AF_ESR\"]}]}\n",
            &reg,
        );
        assert_eq!(corpus.records.len(), 1);
        assert_eq!(corpus.records[0].year, 2012);
        assert_eq!(corpus.exclusion_log.get(ExclusionReason::Duplicate), 1);
        assert_eq!(corpus_summary(&corpus).records, 1);
        assert_eq!(corpus.input_count, corpus.records.len() + corpus.exclusion_log.total());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let reg = registry();
        let text = "{\"pub_id\":\"p1\",\"year\":2012,\"authors\":[]}\n\nnot json\n";
        let err = clean_records(read_records(text.as_bytes()), &reg, DEFAULT_YEAR_RANGE).unwrap_err();
        assert!(matches!(err, IngestError::MalformedLine { line: 3, .. }), "{err}");

        let text = "{\"pub_id\":\"\",\"year\":2012,\"authors\":[]}\n";
        let err = clean_records(read_records(text.as_bytes()), &reg, DEFAULT_YEAR_RANGE).unwrap_err();
        assert!(matches!(err, IngestError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn summary_counts_categories() {
        let reg = registry();
        let corpus = clean(
            r#"{"pub_id":"p1","year":2012,"authors":[{"author_id":"a1","affiliation_ids":["AF_AUT"]},{"author_id":"a2","affiliation_ids":["AF_ESR"]},{"author_id":"a3","affiliation_ids":["AF_GNS"]}]}"#,
            &reg,
        );
        let s = corpus_summary(&corpus);
        assert_eq!((s.records, s.institutions, s.authors), (1, 3, 3));
        assert_eq!(s.per_category.get(&Category::Government), Some(&2));
        assert_eq!(s.per_category.get(&Category::HigherEducation), Some(&1));
        assert_eq!(s.per_category.len(), 2);
    }

    #[test]
    fn unknown_subjects_ignored() {
        let reg = registry();
        let corpus = clean(
            r#"{"pub_id":"p1","year":2012,"subjects":["Medicine","Alchemy"],"authors":[{"author_id":"a1","affiliation_ids":["AF_AUT"]}]}"#,
            &reg,
        );
        assert_eq!(corpus.ignored_subject_tags, 1);
        assert_eq!(corpus.records[0].subjects, BTreeSet::from([Subject::Medicine]));
    }

    #[test]
    fn exclusion_csv() {
        let mut log = ExclusionLog::default();
        log.record(ExclusionReason::Unresolvable);
        log.record(ExclusionReason::Unresolvable);
        let mut out = Vec::new();
        log.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "reason,count\nout_of_range,0\nunresolvable,2\nduplicate,0\n"
        );
    }

    #[test]
    fn reingest_exported_corpus_is_identical() {
        let reg = registry();
        let corpus = clean(
            "{\"pub_id\":\"p1\",\"year\":2012,\"subjects\":[\"Medicine\"],\"authors\":[{\"author_id\":\"a1\",\"affiliation_ids\":[\"AF_GNS2\",\"AF_AUT\",\"AF_NOPE\"]},{\"author_id\":\"a2\",\"affiliation_ids\":[\"AF_ESR\"]}]}\n\
             {\"pub_id\":\"p2\",\"year\":2020,\"authors\":[{\"author_id\":\"a1\",\"affiliation_ids\":[\"AF_AUT\"]}]}\n",
            &reg,
        );
        let mut buf = Vec::new();
        corpus.write_jsonl(&reg, &mut buf).unwrap();
        let again = clean_records(read_records(buf.as_slice()), &reg, DEFAULT_YEAR_RANGE).unwrap();
        assert_eq!(again.records, corpus.records);
        assert_eq!(again.institutions, corpus.institutions);
        assert_eq!(again.exclusion_log.total(), 0);
    }
}
