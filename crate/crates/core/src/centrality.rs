//! Betweenness, eigenvector and degree centrality with ranked reports.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::IndexedGraph;
use crate::network::CollabNetwork;
use crate::InstitutionId;

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const EIGEN_MAX_ITERATIONS: usize = 10_000;
/// Plain power iterations before switching to damped updates.
pub const EIGEN_DAMPING_AFTER: usize = 1_000;

/// Sources per work unit in the parallel Brandes sweep. Fixed so that the
/// floating-point summation order does not depend on the thread count.
const SOURCE_CHUNK: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CentralityError {
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Betweenness,
    Eigenvector,
    Degree,
    WeightedDegree,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Betweenness => "betweenness",
            Measure::Eigenvector => "eigenvector",
            Measure::Degree => "degree",
            Measure::WeightedDegree => "weighted-degree",
        })
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "betweenness" => Ok(Measure::Betweenness),
            "eigenvector" => Ok(Measure::Eigenvector),
            "degree" => Ok(Measure::Degree),
            "weighted-degree" => Ok(Measure::WeightedDegree),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Raw values (pair counts for betweenness, edge counts or weights for degree).
    None,
    /// Betweenness divided by (n-1)(n-2)/2.
    PairFraction,
    /// Scaled so the largest score is exactly 1.
    MaxOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEntry {
    pub institution: InstitutionId,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    pub measure: Measure,
    pub weighted: bool,
    pub normalization: Normalization,
    pub scores: BTreeMap<InstitutionId, f64>,
    /// Every node, by score descending then name ascending.
    pub ranking: Vec<RankedEntry>,
}

impl CentralityReport {
    fn new(
        g: &IndexedGraph,
        measure: Measure,
        weighted: bool,
        normalization: Normalization,
        values: Vec<f64>,
    ) -> Self {
        let mut ranking: Vec<RankedEntry> = values
            .iter()
            .enumerate()
            .map(|(v, &score)| RankedEntry { institution: g.ids[v].clone(), name: g.names[v].clone(), score })
            .collect();
        ranking.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.name.cmp(&b.name))
                .then_with(|| a.institution.cmp(&b.institution))
        });
        let scores = g.ids.iter().cloned().zip(values).collect();
        CentralityReport { measure, weighted, normalization, scores, ranking }
    }

    pub fn top_k(&self, k: usize) -> &[RankedEntry] {
        &self.ranking[..k.min(self.ranking.len())]
    }
}

/// First `min(k, n)` entries of the report's ranking.
pub fn top_k(report: &CentralityReport, k: usize) -> &[RankedEntry] {
    report.top_k(k)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BetweennessOptions {
    /// Use 1/weight as the edge length instead of hop counts.
    pub weighted: bool,
    /// Divide by the number of node pairs excluding the node itself.
    pub normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node index
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Shortest-path DAG from `s`: visit order, path counts and predecessors.
fn shortest_path_dag(g: &IndexedGraph, s: usize, weighted: bool) -> (Vec<usize>, Vec<f64>, Vec<Vec<usize>>) {
    let n = g.len();
    let mut order = Vec::with_capacity(n);
    let mut sigma = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    sigma[s] = 1.0;

    if !weighted {
        let mut dist: Vec<Option<u32>> = vec![None; n];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v].unwrap();
            for w in g.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
                if dist[w] == Some(dv + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
    } else {
        let mut dist: Vec<Option<f64>> = vec![None; n];
        let mut done = vec![false; n];
        dist[s] = Some(0.0);
        let mut heap = BinaryHeap::from([HeapItem { dist: 0.0, node: s }]);
        while let Some(HeapItem { dist: d, node: v }) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            order.push(v);
            for &(w, weight) in &g.adj[v] {
                if done[w] {
                    continue;
                }
                let nd = d + 1.0 / weight as f64;
                match dist[w] {
                    Some(dw) if same_length(nd, dw) => {
                        sigma[w] += sigma[v];
                        preds[w].push(v);
                    }
                    Some(dw) if nd > dw => {}
                    _ => {
                        dist[w] = Some(nd);
                        sigma[w] = sigma[v];
                        preds[w].clear();
                        preds[w].push(v);
                        heap.push(HeapItem { dist: nd, node: w });
                    }
                }
            }
        }
    }
    (order, sigma, preds)
}

/// Brandes dependency accumulation for one source, added into `acc`.
fn accumulate_source(g: &IndexedGraph, s: usize, weighted: bool, acc: &mut [f64]) {
    let (order, sigma, preds) = shortest_path_dag(g, s, weighted);
    let mut delta = vec![0.0; g.len()];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            acc[w] += delta[w];
        }
    }
}

fn betweenness_values(g: &IndexedGraph, weighted: bool) -> Vec<f64> {
    let n = g.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for &s in chunk {
                accumulate_source(g, s, weighted, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    // every unordered pair was visited from both ends
    total.iter_mut().for_each(|x| *x /= 2.0);
    total
}

/// Exact betweenness centrality (Brandes).
pub fn betweenness(net: &CollabNetwork, options: BetweennessOptions) -> CentralityReport {
    let g = IndexedGraph::from_network(net);
    let mut values = betweenness_values(&g, options.weighted);
    let normalization = if options.normalized {
        let n = g.len() as f64;
        if g.len() > 2 {
            let pairs = (n - 1.0) * (n - 2.0) / 2.0;
            values.iter_mut().for_each(|x| *x /= pairs);
        }
        Normalization::PairFraction
    } else {
        Normalization::None
    };
    CentralityReport::new(&g, Measure::Betweenness, options.weighted, normalization, values)
}

/// Principal eigenvector of a weighted adjacency (local indices) by power
/// iteration from the uniform vector, max-normalized.
fn principal_eigenvector(adj: &[Vec<(usize, f64)>]) -> Result<Vec<f64>, CentralityError> {
    let n = adj.len();
    let mut x = vec![1.0; n];
    let multiply = |x: &[f64]| -> Vec<f64> {
        adj.iter().map(|row| row.iter().map(|&(u, w)| w * x[u]).sum()).collect()
    };
    let max_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(a.abs()));

    for iteration in 1..=EIGEN_MAX_ITERATIONS {
        let mut y = multiply(&x);
        let m = max_norm(&y);
        if m == 0.0 {
            // no edges: every vector is an eigenvector
            return Ok(x);
        }
        y.iter_mut().for_each(|a| *a /= m);
        if iteration > EIGEN_DAMPING_AFTER {
            // averaging with the previous iterate suppresses the -lambda
            // mode that makes bipartite components oscillate
            for (a, &b) in y.iter_mut().zip(&x) {
                *a = 0.5 * *a + 0.5 * b;
            }
            let m = max_norm(&y);
            y.iter_mut().for_each(|a| *a /= m);
        }
        let diff = y.iter().zip(&x).fold(0.0f64, |d, (a, b)| d.max((a - b).abs()));
        x = y;
        if diff < EIGEN_TOLERANCE {
            let m = max_norm(&x);
            x.iter_mut().for_each(|a| *a /= m);
            return Ok(x);
        }
    }
    Err(CentralityError::NoConvergence {
        iterations: EIGEN_MAX_ITERATIONS,
        residual: eigen_residual(adj, &x),
    })
}

/// `||Ax - lambda x||_inf` with lambda the Rayleigh quotient.
pub fn eigen_residual(adj: &[Vec<(usize, f64)>], x: &[f64]) -> f64 {
    let ax: Vec<f64> = adj.iter().map(|row| row.iter().map(|&(u, w)| w * x[u]).sum()).collect();
    let num: f64 = ax.iter().zip(x).map(|(a, b)| a * b).sum();
    let den: f64 = x.iter().map(|a| a * a).sum();
    let lambda = num / den;
    ax.iter().zip(x).fold(0.0f64, |r, (a, b)| r.max((a - lambda * b).abs()))
}

/// Weighted eigenvector centrality on the largest component; nodes outside
/// it score 0.
pub fn eigenvector(net: &CollabNetwork) -> Result<CentralityReport, CentralityError> {
    let g = IndexedGraph::from_network(net);
    let mut values = vec![0.0; g.len()];
    if let Some(giant) = g.giant_component() {
        if giant.len() < g.len() {
            log::warn!(
                "eigenvector centrality computed on the largest component ({} of {} nodes); others score 0",
                giant.len(),
                g.len()
            );
        }
        let local: BTreeMap<usize, usize> = giant.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj: Vec<Vec<(usize, f64)>> = giant
            .iter()
            .map(|&v| g.adj[v].iter().map(|&(u, w)| (local[&u], w as f64)).collect())
            .collect();
        let x = principal_eigenvector(&adj)?;
        for (&v, score) in giant.iter().zip(x) {
            values[v] = score;
        }
    }
    Ok(CentralityReport::new(&g, Measure::Eigenvector, true, Normalization::MaxOne, values))
}

pub fn degree(net: &CollabNetwork, weighted: bool) -> CentralityReport {
    let g = IndexedGraph::from_network(net);
    let values = (0..g.len())
        .map(|v| if weighted { g.weighted_degree(v) as f64 } else { g.degree(v) as f64 })
        .collect();
    let measure = if weighted { Measure::WeightedDegree } else { Measure::Degree };
    CentralityReport::new(&g, measure, weighted, Normalization::None, values)
}

/// Dispatches on `measure`. `weighted` only affects betweenness.
pub fn compute(
    net: &CollabNetwork,
    measure: Measure,
    betweenness_options: BetweennessOptions,
) -> Result<CentralityReport, CentralityError> {
    Ok(match measure {
        Measure::Betweenness => betweenness(net, betweenness_options),
        Measure::Eigenvector => eigenvector(net)?,
        Measure::Degree => degree(net, false),
        Measure::WeightedDegree => degree(net, true),
    })
}
