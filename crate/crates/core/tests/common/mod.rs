// Shared fixtures and naive reference implementations for the integration
// tests and the acceptance runner. Not every test binary uses every helper.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use collabnet::ingest::{CleanCorpus, CleanRecord, Institution, ResolvedAuthor};
use collabnet::{Category, CollabNetwork, InstitutionId, Subject};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node_id(i: usize) -> String {
    format!("n{i:02}")
}

/// Simple graph on `n` nodes; node `i` has ID `n{i:02}` so sorted ID order
/// equals index order.
#[derive(Debug, Clone)]
pub struct SmallGraph {
    pub n: usize,
    /// `(i, j, weight)` with `i < j`.
    pub edges: Vec<(usize, usize, u64)>,
}

impl SmallGraph {
    pub fn network(&self) -> CollabNetwork {
        let mut net = CollabNetwork::new();
        for i in 0..self.n {
            net.add_node(node_id(i), format!("Node {i}"), Category::ALL[i % 4]).unwrap();
        }
        for &(a, b, w) in &self.edges {
            net.add_edge(&node_id(a), &node_id(b), w).unwrap();
        }
        net
    }

    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0; self.n]; self.n];
        for &(a, b, w) in &self.edges {
            m[a][b] = w;
            m[b][a] = w;
        }
        m
    }
}

/// G(n, p) with unit weights.
pub fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SmallGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j, 1));
            }
        }
    }
    SmallGraph { n, edges }
}

/// G(n, p) with weights drawn from `weights`.
pub fn gnp_weighted(rng: &mut ChaCha8Rng, n: usize, p: f64, weights: &[u64]) -> SmallGraph {
    let mut g = gnp(rng, n, p);
    for e in &mut g.edges {
        e.2 = weights[rng.gen_range(0..weights.len())];
    }
    g
}

/// Connected weighted graph: a random spanning tree plus G(n, p) extras.
pub fn connected_weighted(rng: &mut ChaCha8Rng, n: usize, p: f64, max_weight: u64) -> SmallGraph {
    let mut present = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present.insert((u, v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                present.insert((i, j));
            }
        }
    }
    let edges = present.into_iter().map(|(a, b)| (a, b, rng.gen_range(1..=max_weight))).collect();
    SmallGraph { n, edges }
}

// ------------------------------------------------------------------ oracles

/// All-pairs shortest path lengths with integer edge lengths; `None` if unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, u64)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b, len) in edges {
        d[a][b] = Some(len);
        d[b][a] = Some(len);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Betweenness by enumerating every shortest path between every unordered
/// pair. `length(w)` maps an edge weight to an integer edge length.
pub fn betweenness_oracle(g: &SmallGraph, length: impl Fn(u64) -> u64) -> Vec<f64> {
    let n = g.n;
    let lengths: Vec<(usize, usize, u64)> = g.edges.iter().map(|&(a, b, w)| (a, b, length(w))).collect();
    let dist = floyd_warshall(n, &lengths);
    let mut len_matrix = vec![vec![None; n]; n];
    for &(a, b, l) in &lengths {
        len_matrix[a][b] = Some(l);
        len_matrix[b][a] = Some(l);
    }

    fn walk(
        v: usize,
        t: usize,
        path: &mut Vec<usize>,
        dist: &[Vec<Option<u64>>],
        len: &[Vec<Option<u64>>],
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for u in 0..len.len() {
            if let (Some(l), Some(du), Some(dv)) = (len[v][u], dist[u][t], dist[v][t]) {
                if l + du == dv {
                    path.push(u);
                    walk(u, t, path, dist, len, out);
                    path.pop();
                }
            }
        }
    }

    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if dist[s][t].is_none() {
                continue;
            }
            let mut paths = Vec::new();
            walk(s, t, &mut vec![s], &dist, &len_matrix, &mut paths);
            let total = paths.len() as f64;
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                score[v] += through[v] as f64 / total;
            }
        }
    }
    score
}

/// Components via the transitive closure of `I + A` (repeated boolean squaring).
pub fn components_oracle(g: &SmallGraph) -> BTreeSet<BTreeSet<usize>> {
    let n = g.n;
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b, _) in &g.edges {
        r[a][b] = true;
        r[b][a] = true;
    }
    let mut steps = 1;
    while steps < n {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).any(|k| r[i][k] && r[k][j]);
            }
        }
        r = next;
        steps *= 2;
    }
    (0..n).map(|i| (0..n).filter(|&j| r[i][j]).collect()).collect()
}

/// Largest component; among equal sizes the one containing the smallest node.
pub fn giant_oracle(g: &SmallGraph) -> BTreeSet<usize> {
    components_oracle(g)
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.first().cmp(&a.first())))
        .unwrap_or_default()
}

/// `(sum of hop distances over unordered giant pairs, pair count, diameter)`.
pub fn path_oracle(g: &SmallGraph) -> Option<(u64, u64, u64)> {
    let giant = giant_oracle(g);
    if giant.len() < 2 {
        return None;
    }
    let unit: Vec<_> = g.edges.iter().map(|&(a, b, _)| (a, b, 1)).collect();
    let d = floyd_warshall(g.n, &unit);
    let members: Vec<usize> = giant.into_iter().collect();
    let (mut sum, mut pairs, mut diameter) = (0, 0, 0);
    for (i, &s) in members.iter().enumerate() {
        for &t in &members[i + 1..] {
            let x = d[s][t].unwrap();
            sum += x;
            pairs += 1;
            diameter = diameter.max(x);
        }
    }
    Some((sum, pairs, diameter))
}

/// Local clustering by enumerating neighbour pairs.
pub fn clustering_oracle(g: &SmallGraph) -> Vec<f64> {
    let m = g.matrix();
    (0..g.n)
        .map(|v| {
            let nbrs: Vec<usize> = (0..g.n).filter(|&u| m[v][u] > 0).collect();
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            let mut closed = 0;
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if m[a][b] > 0 {
                        closed += 1;
                    }
                }
            }
            closed as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

// ------------------------------------------------------------------ corpora

/// A publication as lists of institution indices per author.
#[derive(Debug, Clone)]
pub struct PubSpec {
    pub authors: Vec<Vec<usize>>,
    pub subjects: Vec<Subject>,
}

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub categories: Vec<Category>,
    pub pubs: Vec<PubSpec>,
}

pub fn inst_id(i: usize) -> InstitutionId {
    InstitutionId::from(format!("i{i:02}"))
}

impl CorpusSpec {
    pub fn corpus(&self) -> CleanCorpus {
        let mut c = CleanCorpus::empty((2010, 2015));
        for (p, spec) in self.pubs.iter().enumerate() {
            let authors: Vec<ResolvedAuthor> = spec
                .authors
                .iter()
                .enumerate()
                .map(|(k, insts)| ResolvedAuthor {
                    author_id: format!("p{p}-a{k}"),
                    institutions: insts.iter().map(|&i| inst_id(i)).collect(),
                })
                .collect();
            for a in &authors {
                for id in &a.institutions {
                    let i: usize = id.as_str()[1..].parse().unwrap();
                    c.institutions.insert(
                        id.clone(),
                        Institution { id: id.clone(), name: format!("Institution {i}"), category: self.categories[i] },
                    );
                }
            }
            c.records.push(CleanRecord {
                pub_id: format!("p{p}"),
                year: 2012,
                subjects: spec.subjects.iter().copied().collect(),
                authors,
            });
        }
        c
    }
}

/// Edge weights by the literal rule: a pair is credited once per
/// publication when two different authors evidence its two institutions.
pub fn build_oracle(spec: &CorpusSpec) -> BTreeMap<(usize, usize), u64> {
    let mut weights = BTreeMap::new();
    for p in &spec.pubs {
        let mut pairs = BTreeSet::new();
        for (x, ix) in p.authors.iter().enumerate() {
            for (y, iy) in p.authors.iter().enumerate() {
                if x == y {
                    continue;
                }
                for &i in ix {
                    for &j in iy {
                        if i != j {
                            pairs.insert((i.min(j), i.max(j)));
                        }
                    }
                }
            }
        }
        for pair in pairs {
            *weights.entry(pair).or_insert(0) += 1;
        }
    }
    weights
}

pub fn corpus_strategy(max_inst: usize, max_pubs: usize) -> impl Strategy<Value = CorpusSpec> {
    (2..=max_inst).prop_flat_map(move |n_inst| {
        let categories = proptest::collection::vec(proptest::sample::select(Category::ALL.to_vec()), n_inst);
        let author = proptest::collection::vec(0..n_inst, 1..=2);
        let publication = (
            proptest::collection::vec(author, 1..=4),
            proptest::collection::vec(proptest::sample::select(Subject::ALL.to_vec()), 0..=3),
        )
            .prop_map(|(authors, subjects)| PubSpec { authors, subjects });
        (categories, proptest::collection::vec(publication, 0..=max_pubs))
            .prop_map(|(categories, pubs)| CorpusSpec { categories, pubs })
    })
}

// ------------------------------------------------------------------ invariants

pub mod invariants {
    use super::*;
    use collabnet::export;
    use collabnet::facets;
    use collabnet::{build_network, BuildOptions};
    use proptest::test_runner::TestCaseError;
    use rand::seq::SliceRandom;

    fn full(spec: &CorpusSpec) -> CollabNetwork {
        build_network(&spec.corpus(), BuildOptions { with_subjects: true, include_isolates: true })
    }

    /// Sum of weighted degrees is twice the total weight; sum of degrees is twice the edge count.
    pub fn handshake(spec: &CorpusSpec) -> Result<(), TestCaseError> {
        let net = full(spec);
        let total: u64 = net.edges().map(|e| e.2).sum();
        let wdeg: u64 = net.nodes().map(|(id, _)| net.weighted_degree(id)).sum();
        let deg: usize = net.nodes().map(|(id, _)| net.degree(id)).sum();
        prop_assert_eq!(wdeg, 2 * total);
        prop_assert_eq!(deg, 2 * net.edge_count());
        Ok(())
    }

    /// One publication credits each pair at most once.
    pub fn pair_cap(spec: &CorpusSpec) -> Result<(), TestCaseError> {
        let corpus = spec.corpus();
        let net = build_network(&corpus, BuildOptions::default());
        for (_, _, w) in net.edges() {
            prop_assert!(w <= corpus.records.len() as u64);
        }
        let mut before = CollabNetwork::new();
        let mut partial = corpus.clone();
        partial.records.clear();
        for record in &corpus.records {
            partial.records.push(record.clone());
            let after = build_network(&partial, BuildOptions::default());
            for (a, b, w) in after.edges() {
                let old = before.weight(a, b).unwrap_or(0);
                prop_assert!(w == old || w == old + 1, "pair {a}-{b}: {old} -> {w}");
            }
            before = after;
        }
        Ok(())
    }

    /// Counterpart-category counts partition each node's weighted degree.
    pub fn category_partition(spec: &CorpusSpec) -> Result<(), TestCaseError> {
        let net = full(spec);
        for (id, _) in net.nodes() {
            let counts = net.aggregate_by_category(id).unwrap();
            prop_assert_eq!(counts.total(), net.weighted_degree(id));
        }
        Ok(())
    }

    /// Facet proportions of every institution with a non-zero basis sum to 1.
    pub fn facet_sums(spec: &CorpusSpec) -> Result<(), TestCaseError> {
        let net = full(spec);
        let ids: Vec<InstitutionId> = net.nodes().map(|(id, _)| id.clone()).collect();
        for table in [facets::category_facets(&net, &ids).unwrap(), facets::subject_facets(&net, &ids).unwrap()] {
            let mut sums: BTreeMap<&InstitutionId, f64> = BTreeMap::new();
            for row in &table.rows {
                *sums.entry(&row.institution).or_insert(0.0) += row.proportion;
            }
            for (id, sum) in sums {
                if table.zero_basis.contains(id) {
                    prop_assert_eq!(sum, 0.0);
                } else {
                    prop_assert!((sum - 1.0).abs() <= 1e-12, "{id}: {sum}");
                }
            }
        }
        Ok(())
    }

    /// Edge/node CSV and GEXF both reproduce the network exactly.
    pub fn round_trips(spec: &CorpusSpec) -> Result<(), TestCaseError> {
        let net = build_network(&spec.corpus(), BuildOptions { with_subjects: false, include_isolates: true });
        let (mut e, mut n) = (Vec::new(), Vec::new());
        export::write_edge_csv(&net, &mut e).unwrap();
        export::write_node_csv(&net, &mut n).unwrap();
        let back = export::read_network_csv(e.as_slice(), n.as_slice()).unwrap();
        prop_assert_eq!(&back, &net);

        let mut g = Vec::new();
        export::write_gexf(&net, &mut g).unwrap();
        let back = export::read_gexf(std::str::from_utf8(&g).unwrap()).unwrap();
        prop_assert_eq!(&back, &net);
        Ok(())
    }

    /// Shuffling records and authors leaves the network unchanged.
    pub fn permutation(spec: &CorpusSpec, seed: u64) -> Result<(), TestCaseError> {
        let opts = BuildOptions { with_subjects: true, include_isolates: true };
        let corpus = spec.corpus();
        let mut shuffled = corpus.clone();
        let mut r = rng(seed);
        shuffled.records.shuffle(&mut r);
        for record in &mut shuffled.records {
            record.authors.shuffle(&mut r);
        }
        prop_assert_eq!(build_network(&shuffled, opts), build_network(&corpus, opts));
        Ok(())
    }

    pub fn all(spec: &CorpusSpec, seed: u64) -> Result<(), TestCaseError> {
        handshake(spec)?;
        pair_cap(spec)?;
        category_partition(spec)?;
        facet_sums(spec)?;
        round_trips(spec)?;
        permutation(spec, seed)
    }
}
