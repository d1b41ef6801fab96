//! Whole-network statistics: density, degrees, clustering, components and
//! giant-component path metrics.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::category::Category;
use crate::graph::IndexedGraph;
use crate::network::CollabNetwork;
use crate::powerlaw::{fit_power_law, PowerLawFit};
use crate::InstitutionId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("largest component has {0} node(s); path metrics need at least 2")]
    DegenerateComponent(usize),
    #[error("network has no nodes")]
    EmptyNetwork,
}

/// Which nodes enter the average clustering coefficient.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringConvention {
    /// Every node counts; degree < 2 contributes 0.
    #[default]
    IncludeAll,
    /// Average only over nodes of degree ≥ 2.
    ExcludeLowDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathMetrics {
    pub avg_path_length: f64,
    pub diameter: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub avg_weighted_degree: f64,
    pub avg_clustering: f64,
    pub clustering_convention: ClusteringConvention,
    /// Component sizes, largest first.
    pub component_census: Vec<usize>,
    pub giant_avg_path_length: Option<f64>,
    pub giant_diameter: Option<u32>,
    pub category_proportions: BTreeMap<Category, f64>,
    /// Fit of the unweighted degree sequence; `None` when the tail is too
    /// short or degenerate.
    pub power_law: Option<PowerLawFit>,
}

impl NetworkSummary {
    /// `size -> number of components of that size`.
    pub fn component_size_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for &s in &self.component_census {
            *out.entry(s).or_insert(0) += 1;
        }
        out
    }
}

pub fn density(node_count: usize, edge_count: usize) -> f64 {
    if node_count < 2 {
        return 0.0;
    }
    2.0 * edge_count as f64 / (node_count as f64 * (node_count as f64 - 1.0))
}

pub fn summarize(net: &CollabNetwork, clustering: ClusteringConvention) -> NetworkSummary {
    let g = IndexedGraph::from_network(net);
    let n = g.len();
    let m = net.edge_count();
    let total_weight: u64 = (0..n).map(|v| g.weighted_degree(v)).sum();
    let (avg_degree, avg_weighted_degree) = if n == 0 {
        (0.0, 0.0)
    } else {
        (2.0 * m as f64 / n as f64, total_weight as f64 / n as f64)
    };
    let mut census: Vec<usize> = g.components().iter().map(Vec::len).collect();
    census.sort_unstable_by(|a, b| b.cmp(a));
    let paths = path_metrics(&g).ok();
    let degrees: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    NetworkSummary {
        node_count: n,
        edge_count: m,
        density: density(n, m),
        avg_degree,
        avg_weighted_degree,
        avg_clustering: average_clustering(&g, clustering),
        clustering_convention: clustering,
        component_census: census,
        giant_avg_path_length: paths.map(|p| p.avg_path_length),
        giant_diameter: paths.map(|p| p.diameter),
        category_proportions: category_proportions(net).unwrap_or_default(),
        power_law: fit_power_law(&degrees).ok(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeEntry {
    pub institution: InstitutionId,
    pub name: String,
    pub degree: u64,
}

/// Degrees in descending order, ties by name then ID.
pub fn degree_sequence(net: &CollabNetwork, weighted: bool) -> Vec<DegreeEntry> {
    let mut out: Vec<DegreeEntry> = net
        .nodes()
        .map(|(id, info)| DegreeEntry {
            institution: id.clone(),
            name: info.name.clone(),
            degree: if weighted { info.weighted_degree() } else { net.degree(id) as u64 },
        })
        .collect();
    out.sort_by(|a, b| {
        b.degree
            .cmp(&a.degree)
            .then_with(|| a.name.cmp(&b.name))
            .then_with(|| a.institution.cmp(&b.institution))
    });
    out
}

/// Components largest first; equal sizes ordered by smallest member ID.
pub fn connected_components(net: &CollabNetwork) -> Vec<BTreeSet<InstitutionId>> {
    let g = IndexedGraph::from_network(net);
    let mut comps = g.components();
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    comps
        .into_iter()
        .map(|c| c.into_iter().map(|v| g.ids[v].clone()).collect())
        .collect()
}

/// Unweighted local clustering coefficient per node (0 for degree < 2).
pub fn local_clustering(g: &IndexedGraph) -> Vec<f64> {
    let mut mark = vec![false; g.len()];
    (0..g.len())
        .map(|v| {
            let k = g.degree(v);
            if k < 2 {
                return 0.0;
            }
            for u in g.neighbors(v) {
                mark[u] = true;
            }
            let mut links = 0usize;
            for u in g.neighbors(v) {
                links += g.neighbors(u).filter(|&w| mark[w]).count();
            }
            for u in g.neighbors(v) {
                mark[u] = false;
            }
            // every neighbour-neighbour edge was seen from both ends
            let triangles = links / 2;
            triangles as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

fn average_clustering(g: &IndexedGraph, convention: ClusteringConvention) -> f64 {
    let local = local_clustering(g);
    let values: Vec<f64> = match convention {
        ClusteringConvention::IncludeAll => local,
        ClusteringConvention::ExcludeLowDegree => {
            local.into_iter().enumerate().filter(|&(v, _)| g.degree(v) >= 2).map(|(_, c)| c).collect()
        }
    };
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn avg_clustering(net: &CollabNetwork, convention: ClusteringConvention) -> f64 {
    average_clustering(&IndexedGraph::from_network(net), convention)
}

fn path_metrics(g: &IndexedGraph) -> Result<PathMetrics, MetricsError> {
    let giant = g.giant_component().ok_or(MetricsError::DegenerateComponent(0))?;
    if giant.len() < 2 {
        return Err(MetricsError::DegenerateComponent(giant.len()));
    }
    let per_source: Vec<(u64, u32)> = giant
        .par_iter()
        .map(|&s| {
            let dist = g.bfs(s);
            let mut sum = 0u64;
            let mut max = 0u32;
            for &t in &giant {
                if t > s {
                    let d = dist[t].expect("same component");
                    sum += u64::from(d);
                    max = max.max(d);
                }
            }
            (sum, max)
        })
        .collect();
    let total: u64 = per_source.iter().map(|p| p.0).sum();
    let diameter = per_source.iter().map(|p| p.1).max().unwrap_or(0);
    let k = giant.len() as u64;
    let pairs = k * (k - 1) / 2;
    Ok(PathMetrics { avg_path_length: total as f64 / pairs as f64, diameter })
}

/// Hop-count average path length and diameter of the largest component.
pub fn giant_path_metrics(net: &CollabNetwork) -> Result<PathMetrics, MetricsError> {
    path_metrics(&IndexedGraph::from_network(net))
}

/// Share of nodes in each category; all four keys are present.
pub fn category_proportions(net: &CollabNetwork) -> Result<BTreeMap<Category, f64>, MetricsError> {
    if net.is_empty() {
        return Err(MetricsError::EmptyNetwork);
    }
    let mut counts = [0usize; 4];
    for (_, info) in net.nodes() {
        counts[info.category.index()] += 1;
    }
    let n = net.node_count() as f64;
    Ok(Category::ALL.into_iter().map(|c| (c, counts[c.index()] as f64 / n)).collect())
}
