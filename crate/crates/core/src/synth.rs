//! Deterministic synthetic corpora with heavy-tailed institutional
//! participation.
//!
//! Every author picks an institution with probability proportional to
//! `participation + attachment_bias`, where `participation` counts the
//! authorships the institution has received so far. Small biases give a
//! rich-get-richer process and heavy-tailed degrees.
//!
//! Randomness comes from [`SplitMix64`] so that the byte output for a given
//! seed is fixed and reproducible outside Rust.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::category::Category;
use crate::ingest::MAPPING_HEADER;
use crate::subject::Subject;

/// SplitMix64 (Steele, Lea & Flood): `state += 0x9E3779B97F4A7C15`, then the
/// output is `z ^ (z >> 31)` after two xor-shift-multiply rounds with
/// `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, n) by multiply-shift: `(next * n) >> 64`.
    pub fn below(&mut self, n: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Uniform in [lo, hi].
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Institution counts in [`Category::ALL`] order: business, PNP,
    /// government, higher education.
    pub institutions: [usize; 4],
    pub n_publications: usize,
    pub authors_per_pub: (usize, usize),
    pub attachment_bias: f64,
    pub subjects_per_pub: (usize, usize),
    /// Inclusive range that publication years are drawn from.
    pub years: (i32, i32),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            institutions: [1336, 370, 222, 72],
            n_publications: 2000,
            authors_per_pub: (2, 6),
            attachment_bias: 1.0,
            subjects_per_pub: (1, 3),
            years: (2010, 2015),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.to_string()));
        if self.authors_per_pub.0 > self.authors_per_pub.1 {
            return bad("authors_per_pub min exceeds max");
        }
        if self.authors_per_pub.0 == 0 {
            return bad("publications need at least one author");
        }
        if self.subjects_per_pub.0 > self.subjects_per_pub.1 {
            return bad("subjects_per_pub min exceeds max");
        }
        if self.subjects_per_pub.1 > Subject::ALL.len() {
            return bad("subjects_per_pub max exceeds the number of subject classes");
        }
        if self.years.0 > self.years.1 {
            return bad("year range min exceeds max");
        }
        if !(self.attachment_bias >= 0.0 && self.attachment_bias.is_finite()) {
            return bad("attachment_bias must be finite and non-negative");
        }
        if self.n_publications > 0 && self.institutions.iter().sum::<usize>() < 2 {
            return bad("need at least two institutions");
        }
        Ok(())
    }
}

struct SynthInstitution {
    id: String,
    name: String,
    category: Category,
    affiliations: Vec<String>,
}

fn institutions(config: &SynthConfig) -> Vec<SynthInstitution> {
    let mut out = Vec::new();
    for (category, &count) in Category::ALL.iter().zip(&config.institutions) {
        let (prefix, label) = match category {
            Category::BusinessEnterprise => ("be", "Business Enterprise"),
            Category::PrivateNotForProfit => ("pnp", "Private Not For Profit"),
            Category::Government => ("gov", "Government Institution"),
            Category::HigherEducation => ("he", "Higher Education Provider"),
        };
        for i in 1..=count {
            let id = format!("{prefix}-{i:04}");
            // one to three raw affiliation IDs per institution
            let affiliations = (1..=1 + (i - 1) % 3).map(|k| format!("AF-{id}-{k}")).collect();
            out.push(SynthInstitution { id, name: format!("{label} {i}"), category: *category, affiliations });
        }
    }
    out
}

#[derive(Serialize)]
struct AuthorLine<'a> {
    author_id: String,
    affiliation_ids: [&'a str; 1],
}

#[derive(Serialize)]
struct RecordLine<'a> {
    pub_id: String,
    year: i32,
    subjects: Vec<&'static str>,
    authors: Vec<AuthorLine<'a>>,
}

/// Draws from `active` with probability proportional to participation + bias;
/// uniform when every weight is zero.
fn pick_weighted(rng: &mut SplitMix64, active: &[usize], participation: &[u64], bias: f64) -> usize {
    let total: f64 = active.iter().map(|&i| participation[i] as f64 + bias).sum();
    if total <= 0.0 {
        return active[rng.below(active.len() as u64) as usize];
    }
    let target = rng.next_f64() * total;
    let mut acc = 0.0;
    for &i in active {
        acc += participation[i] as f64 + bias;
        if target < acc {
            return i;
        }
    }
    active[active.len() - 1]
}

/// Writes the records (JSON Lines) and mapping (CSV) streams.
pub fn generate_to<R: Write, M: Write>(config: &SynthConfig, mut records: R, mapping: M) -> Result<(), SynthError> {
    config.validate()?;
    let io_err = |source| SynthError::Io { path: PathBuf::from("<stream>"), source };
    let insts = institutions(config);

    let mut map = csv::Writer::from_writer(mapping);
    let csv_err = |e: csv::Error| io_err(std::io::Error::other(e));
    map.write_record(MAPPING_HEADER).map_err(csv_err)?;
    for inst in &insts {
        for aff in &inst.affiliations {
            map.write_record([aff.as_str(), inst.id.as_str(), inst.name.as_str(), inst.category.token()])
                .map_err(csv_err)?;
        }
    }
    map.flush().map_err(io_err)?;

    let mut rng = SplitMix64::new(config.seed);
    // Institutions enter in a seeded random order spread evenly over the
    // publications; each takes an author slot on its entry publication and
    // is afterwards chosen with weight participation + attachment_bias.
    let mut order: Vec<usize> = (0..insts.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let entry_pub = |rank: usize| rank * config.n_publications / insts.len().max(1);
    let mut active: Vec<usize> = Vec::with_capacity(insts.len());
    let mut next_entry = 0;
    let mut participation = vec![0u64; insts.len()];
    let mut pool: Vec<Subject> = Subject::ALL.to_vec();
    let year_span = (config.years.1 - config.years.0) as u64;

    for p in 0..config.n_publications {
        let mut newcomers = Vec::new();
        while next_entry < order.len() && entry_pub(next_entry) <= p {
            newcomers.push(order[next_entry]);
            active.push(order[next_entry]);
            next_entry += 1;
        }
        let year = config.years.0 + rng.range_inclusive(0, year_span) as i32;
        let n_authors =
            rng.range_inclusive(config.authors_per_pub.0 as u64, config.authors_per_pub.1 as u64) as usize;
        let mut authors = Vec::with_capacity(n_authors);
        for k in 0..n_authors {
            let chosen = if k < newcomers.len() {
                newcomers[k]
            } else {
                pick_weighted(&mut rng, &active, &participation, config.attachment_bias)
            };
            participation[chosen] += 1;
            let affs = &insts[chosen].affiliations;
            let aff = &affs[rng.below(affs.len() as u64) as usize];
            authors.push(AuthorLine { author_id: format!("au-{p:06}-{k}"), affiliation_ids: [aff.as_str()] });
        }

        let n_subjects =
            rng.range_inclusive(config.subjects_per_pub.0 as u64, config.subjects_per_pub.1 as u64) as usize;
        // partial Fisher-Yates over the subject pool
        for i in 0..n_subjects {
            let j = i + rng.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        let mut subjects: Vec<Subject> = pool[..n_subjects].to_vec();
        subjects.sort();

        let line = RecordLine {
            pub_id: format!("synth-{p:06}"),
            year,
            subjects: subjects.iter().map(|s| s.name()).collect(),
            authors,
        };
        serde_json::to_writer(&mut records, &line).map_err(|e| io_err(e.into()))?;
        records.write_all(b"\n").map_err(io_err)?;
    }
    records.flush().map_err(io_err)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOutput {
    pub records: PathBuf,
    pub mapping: PathBuf,
}

fn io_error(path: &Path, source: std::io::Error) -> SynthError {
    SynthError::Io { path: path.to_path_buf(), source }
}

/// Writes `records.jsonl` and `mapping.csv` into `out_dir`.
pub fn generate(config: &SynthConfig, out_dir: impl AsRef<Path>) -> Result<SynthOutput, SynthError> {
    config.validate()?;
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| io_error(dir, source))?;
    let out = SynthOutput { records: dir.join("records.jsonl"), mapping: dir.join("mapping.csv") };
    let records = File::create(&out.records).map_err(|source| io_error(&out.records, source))?;
    let mapping = File::create(&out.mapping).map_err(|source| io_error(&out.mapping, source))?;
    generate_to(config, BufWriter::new(records), BufWriter::new(mapping))?;
    Ok(out)
}
