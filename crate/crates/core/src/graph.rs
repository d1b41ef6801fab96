//! Dense-index adjacency view used by the analytics.

use std::collections::VecDeque;

use crate::category::Category;
use crate::network::CollabNetwork;
use crate::InstitutionId;

/// Nodes are numbered by ascending institution ID; neighbour lists are sorted.
#[derive(Debug, Clone)]
pub struct IndexedGraph {
    pub ids: Vec<InstitutionId>,
    pub names: Vec<String>,
    pub categories: Vec<Category>,
    pub adj: Vec<Vec<(usize, u64)>>,
}

impl IndexedGraph {
    pub fn from_network(net: &CollabNetwork) -> Self {
        let ids: Vec<InstitutionId> = net.nodes().map(|(id, _)| id.clone()).collect();
        let names = net.nodes().map(|(_, n)| n.name.clone()).collect();
        let categories = net.nodes().map(|(_, n)| n.category).collect();
        let adj = ids
            .iter()
            .map(|id| {
                net.neighbors(id)
                    .map(|(nbr, w)| (ids.binary_search(nbr).expect("neighbour is a node"), w))
                    .collect()
            })
            .collect();
        IndexedGraph { ids, names, categories, adj }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn weighted_degree(&self, v: usize) -> u64 {
        self.adj[v].iter().map(|&(_, w)| w).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for u in self.neighbors(v) {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Connected components as sorted index lists, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Largest component; ties go to the one with the smallest member.
    pub fn giant_component(&self) -> Option<Vec<usize>> {
        let comps = self.components();
        let mut best: Option<Vec<usize>> = None;
        for c in comps {
            if best.as_ref().is_none_or(|b| c.len() > b.len()) {
                best = Some(c);
            }
        }
        best
    }
}
