//! Weighted undirected institution collaboration network.
//!
//! Edge weight is the number of publications jointly authored by the two
//! institutions ("collaboration records").
//!
//! # Counting rule
//!
//! For a publication P, the unordered pair {I, J} gains exactly 1 iff there
//! exist two *distinct* authors a ≠ b of P with I among a's institutions and J
//! among b's. An author affiliated to several institutions does not by
//! themselves link those institutions; the pair is still credited when a
//! second author independently evidences one side. A publication contributes
//! at most 1 to any pair, however many author pairs span it.

use std::collections::{BTreeMap, BTreeSet};

use crate::category::Category;
use crate::ingest::{canonical_name, CleanCorpus, CleanRecord};
use crate::subject::Subject;
use crate::InstitutionId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("unknown institution `{0}`")]
    UnknownInstitution(String),
    #[error("unknown subject `{0}`")]
    UnknownSubject(String),
    #[error("network was built without subject breakdowns")]
    SubjectsUnavailable,
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("edge {0}-{1} has zero weight")]
    ZeroWeight(String, String),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(String, String),
    #[error("node `{0}` redefined with different name or category")]
    ConflictingNode(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub name: String,
    pub category: Category,
    weighted_degree: u64,
}

impl NodeInfo {
    pub fn weighted_degree(&self) -> u64 {
        self.weighted_degree
    }
}

/// Per-category sums, indexed by [`Category::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CategoryCounts(pub [u64; 4]);

impl CategoryCounts {
    pub fn get(&self, c: Category) -> u64 {
        self.0[c.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Category, u64)> + '_ {
        Category::ALL.into_iter().map(|c| (c, self.get(c)))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Keep a per-edge count of joint publications per subject.
    pub with_subjects: bool,
    /// Add institutions that appear in the corpus but never collaborate.
    pub include_isolates: bool,
}

fn ordered(a: &InstitutionId, b: &InstitutionId) -> (InstitutionId, InstitutionId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollabNetwork {
    nodes: BTreeMap<InstitutionId, NodeInfo>,
    adj: BTreeMap<InstitutionId, BTreeMap<InstitutionId, u64>>,
    /// Present iff the network carries subject breakdowns.
    edge_subjects: Option<BTreeMap<(InstitutionId, InstitutionId), BTreeMap<Subject, u64>>>,
}

impl CollabNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_subjects() -> Self {
        CollabNetwork { edge_subjects: Some(BTreeMap::new()), ..Self::default() }
    }

    /// Adds a node. Re-adding an identical node is a no-op.
    pub fn add_node(
        &mut self,
        id: impl Into<InstitutionId>,
        name: impl Into<String>,
        category: Category,
    ) -> Result<(), NetworkError> {
        let id = id.into();
        let name = name.into();
        if let Some(existing) = self.nodes.get(&id) {
            if existing.name != name || existing.category != category {
                return Err(NetworkError::ConflictingNode(id.to_string()));
            }
            return Ok(());
        }
        self.nodes.insert(id.clone(), NodeInfo { name, category, weighted_degree: 0 });
        self.adj.insert(id, BTreeMap::new());
        Ok(())
    }

    /// Inserts a new edge between existing nodes.
    pub fn add_edge(&mut self, a: &str, b: &str, weight: u64) -> Result<(), NetworkError> {
        let (a, b) = (InstitutionId::from(a), InstitutionId::from(b));
        for id in [&a, &b] {
            if !self.nodes.contains_key(id) {
                return Err(NetworkError::UnknownInstitution(id.to_string()));
            }
        }
        if a == b {
            return Err(NetworkError::SelfLoop(a.to_string()));
        }
        if weight == 0 {
            return Err(NetworkError::ZeroWeight(a.to_string(), b.to_string()));
        }
        if self.adj[&a].contains_key(&b) {
            return Err(NetworkError::DuplicateEdge(a.to_string(), b.to_string()));
        }
        self.bump(&a, &b, weight);
        Ok(())
    }

    /// Adds `by` to the pair's weight, creating the edge if needed.
    fn bump(&mut self, a: &InstitutionId, b: &InstitutionId, by: u64) {
        *self.adj.get_mut(a).unwrap().entry(b.clone()).or_insert(0) += by;
        *self.adj.get_mut(b).unwrap().entry(a.clone()).or_insert(0) += by;
        self.nodes.get_mut(a).unwrap().weighted_degree += by;
        self.nodes.get_mut(b).unwrap().weighted_degree += by;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn has_subjects(&self) -> bool {
        self.edge_subjects.is_some()
    }

    pub fn contains(&self, id: &InstitutionId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &InstitutionId) -> Option<&NodeInfo> {
        self.nodes.get(id)
    }

    /// Nodes in ascending ID order.
    pub fn nodes(&self) -> impl Iterator<Item = (&InstitutionId, &NodeInfo)> {
        self.nodes.iter()
    }

    /// Each undirected edge once as `(a, b, weight)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (&InstitutionId, &InstitutionId, u64)> {
        self.adj
            .iter()
            .flat_map(|(a, nbrs)| nbrs.iter().filter(move |(b, _)| a < *b).map(move |(b, w)| (a, b, *w)))
    }

    pub fn weight(&self, a: &InstitutionId, b: &InstitutionId) -> Option<u64> {
        self.adj.get(a).and_then(|n| n.get(b)).copied()
    }

    pub fn neighbors(&self, id: &InstitutionId) -> impl Iterator<Item = (&InstitutionId, u64)> {
        self.adj.get(id).into_iter().flat_map(|n| n.iter().map(|(b, w)| (b, *w)))
    }

    pub fn degree(&self, id: &InstitutionId) -> usize {
        self.adj.get(id).map_or(0, BTreeMap::len)
    }

    pub fn weighted_degree(&self, id: &InstitutionId) -> u64 {
        self.nodes.get(id).map_or(0, |n| n.weighted_degree)
    }

    /// Per-subject counts for an edge, if the network carries subjects.
    pub fn edge_subjects(&self, a: &InstitutionId, b: &InstitutionId) -> Option<&BTreeMap<Subject, u64>> {
        self.edge_subjects.as_ref().and_then(|m| m.get(&ordered(a, b)))
    }

    /// Resolves a user-supplied key: exact institution ID first, then name.
    pub fn lookup(&self, key: &str) -> Result<InstitutionId, NetworkError> {
        let id = InstitutionId::from(key);
        if self.nodes.contains_key(&id) {
            return Ok(id);
        }
        let canon = canonical_name(key);
        self.nodes
            .iter()
            .find(|(_, info)| canonical_name(&info.name) == canon)
            .map(|(id, _)| id.clone())
            .ok_or_else(|| NetworkError::UnknownInstitution(key.to_string()))
    }

    fn require(&self, id: &InstitutionId) -> Result<(), NetworkError> {
        if self.nodes.contains_key(id) {
            Ok(())
        } else {
            Err(NetworkError::UnknownInstitution(id.to_string()))
        }
    }

    /// Sums the institution's edge weights by the neighbour's category.
    pub fn aggregate_by_category(&self, id: &InstitutionId) -> Result<CategoryCounts, NetworkError> {
        self.require(id)?;
        let mut counts = CategoryCounts::default();
        for (nbr, w) in self.neighbors(id) {
            counts.0[self.nodes[nbr].category.index()] += w;
        }
        Ok(counts)
    }

    /// Sums the institution's per-subject edge counts.
    pub fn aggregate_by_subject(&self, id: &InstitutionId) -> Result<BTreeMap<Subject, u64>, NetworkError> {
        self.require(id)?;
        let Some(subjects) = &self.edge_subjects else {
            return Err(NetworkError::SubjectsUnavailable);
        };
        let mut out = BTreeMap::new();
        for (nbr, _) in self.neighbors(id) {
            if let Some(per) = subjects.get(&ordered(id, nbr)) {
                for (s, c) in per {
                    *out.entry(*s).or_insert(0) += c;
                }
            }
        }
        Ok(out)
    }

    /// Induced subgraph over `members` (unknown IDs are ignored).
    pub fn induced(&self, members: &BTreeSet<InstitutionId>) -> CollabNetwork {
        let mut sub = CollabNetwork {
            edge_subjects: self.edge_subjects.as_ref().map(|_| BTreeMap::new()),
            ..CollabNetwork::default()
        };
        for id in members {
            if let Some(info) = self.nodes.get(id) {
                sub.nodes.insert(id.clone(), NodeInfo { weighted_degree: 0, ..info.clone() });
                sub.adj.insert(id.clone(), BTreeMap::new());
            }
        }
        let kept: Vec<_> = self
            .edges()
            .filter(|(a, b, _)| sub.nodes.contains_key(*a) && sub.nodes.contains_key(*b))
            .map(|(a, b, w)| (a.clone(), b.clone(), w))
            .collect();
        for (a, b, w) in kept {
            sub.bump(&a, &b, w);
            if let (Some(dst), Some(src)) = (sub.edge_subjects.as_mut(), self.edge_subjects.as_ref()) {
                if let Some(per) = src.get(&(a.clone(), b.clone())) {
                    dst.insert((a, b), per.clone());
                }
            }
        }
        sub
    }

    /// The center, its neighbours, and every edge among them.
    pub fn ego_subgraph(&self, center: &InstitutionId) -> Result<EgoSubgraph, NetworkError> {
        self.require(center)?;
        let mut members: BTreeSet<InstitutionId> = self.adj[center].keys().cloned().collect();
        members.insert(center.clone());
        Ok(EgoSubgraph { center: center.clone(), network: self.induced(&members) })
    }

    /// Network whose weights are the named subject's per-edge counts.
    /// Edges with no such publications, and nodes left isolated, are dropped.
    pub fn filter_by_subject(&self, subject: &str) -> Result<CollabNetwork, NetworkError> {
        let subject: Subject =
            subject.parse().map_err(|_| NetworkError::UnknownSubject(subject.to_string()))?;
        self.filter_subject(subject)
    }

    pub fn filter_subject(&self, subject: Subject) -> Result<CollabNetwork, NetworkError> {
        let Some(subjects) = &self.edge_subjects else {
            return Err(NetworkError::SubjectsUnavailable);
        };
        let mut out = CollabNetwork::with_subjects();
        for ((a, b), per) in subjects {
            let Some(&count) = per.get(&subject) else { continue };
            if count == 0 {
                continue;
            }
            for id in [a, b] {
                let info = &self.nodes[id];
                out.add_node(id.clone(), info.name.clone(), info.category)?;
            }
            out.bump(a, b, count);
            out.edge_subjects
                .as_mut()
                .unwrap()
                .insert((a.clone(), b.clone()), BTreeMap::from([(subject, count)]));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoSubgraph {
    pub center: InstitutionId,
    pub network: CollabNetwork,
}

/// Institution pairs credited by one publication, each as `(a, b)` with `a < b`.
pub fn publication_pairs(record: &CleanRecord) -> BTreeSet<(InstitutionId, InstitutionId)> {
    // institution -> set of author positions evidencing it
    let mut evidence: BTreeMap<&InstitutionId, BTreeSet<usize>> = BTreeMap::new();
    let mut author_index: BTreeMap<&str, usize> = BTreeMap::new();
    for author in &record.authors {
        let next = author_index.len();
        let idx = *author_index.entry(author.author_id.as_str()).or_insert(next);
        for inst in &author.institutions {
            evidence.entry(inst).or_default().insert(idx);
        }
    }
    let insts: Vec<_> = evidence.iter().collect();
    let mut pairs: BTreeSet<(InstitutionId, InstitutionId)> = BTreeSet::new();
    for (i, (a, authors_a)) in insts.iter().enumerate() {
        for (b, authors_b) in &insts[i + 1..] {
            // Fails only when both sides rest on the same single author.
            let same_single = authors_a.len() == 1 && *authors_a == *authors_b;
            if !same_single {
                pairs.insert(((**a).clone(), (**b).clone()));
            }
        }
    }
    pairs
}

/// Builds the collaboration network from a clean corpus.
pub fn build_network(corpus: &CleanCorpus, options: BuildOptions) -> CollabNetwork {
    let mut net = if options.with_subjects { CollabNetwork::with_subjects() } else { CollabNetwork::new() };
    let node_for = |net: &mut CollabNetwork, id: &InstitutionId| {
        if !net.nodes.contains_key(id) {
            let info = &corpus.institutions[id];
            net.add_node(id.clone(), info.name.clone(), info.category)
                .expect("fresh node cannot conflict");
        }
    };
    for record in &corpus.records {
        if options.include_isolates {
            for author in &record.authors {
                for inst in &author.institutions {
                    node_for(&mut net, inst);
                }
            }
        }
        for (a, b) in publication_pairs(record) {
            node_for(&mut net, &a);
            node_for(&mut net, &b);
            net.bump(&a, &b, 1);
            if let Some(subjects) = net.edge_subjects.as_mut() {
                let per = subjects.entry((a, b)).or_default();
                for s in &record.subjects {
                    *per.entry(*s).or_insert(0) += 1;
                }
            }
        }
    }
    net
}
