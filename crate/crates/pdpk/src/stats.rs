//! Graph statistics over the entity graph of a knowledge graph: edge,
//! vertex and relation counts plus closeness centrality, degree centrality,
//! average neighbour degree and average degree, each as mean ± population
//! standard deviation over vertices.
//!
//! The graph is treated as undirected and simple, built from the structural
//! triples only; literals and the literal-anchor layer are counted
//! separately and excluded here.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{KnowledgeGraph, TripleTail};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("statistics are undefined on an empty graph")]
    EmptyGraph,
}

/// Which degree-centrality formula to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeCentralityMode {
    /// `(|V| − 1) / deg(x)`, the reciprocal form.
    #[default]
    Reciprocal,
    /// `deg(x) / (|V| − 1)`, the conventional normalised degree.
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub edge_count: usize,
    pub vertex_count: usize,
    pub relation_count: usize,
    pub closeness_mean: f64,
    pub closeness_std: f64,
    pub degree_centrality_mean: f64,
    pub degree_centrality_std: f64,
    pub avg_neighbour_degree_mean: f64,
    pub avg_neighbour_degree_std: f64,
    pub avg_degree_mean: f64,
    pub avg_degree_std: f64,
    /// Vertices skipped by the degree-based centralities because their
    /// degree is zero. Cannot occur for graphs built from triples.
    pub isolated_vertices: usize,
}

/// Undirected simple graph on contiguous vertex ids.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![BTreeSet::new(); vertex_count];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        SimpleGraph { adjacency }
    }

    /// Project the structural triples onto an undirected entity graph.
    pub fn from_kg(kg: &KnowledgeGraph) -> Self {
        let vertices: Vec<_> = kg.structural_entities().into_iter().collect();
        let index = |id| vertices.binary_search(&id).expect("structural entity");
        let mut adjacency = vec![BTreeSet::new(); vertices.len()];
        for t in kg.structural_triples() {
            if let TripleTail::Entity(tail) = t.tail {
                let (a, b) = (index(t.head), index(tail));
                if a != b {
                    adjacency[a].insert(b);
                    adjacency[b].insert(a);
                }
            }
        }
        SimpleGraph { adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    /// Breadth-first distances from `source`; unreachable vertices are None.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adjacency.len()];
        dist[source] = Some(0);
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for n in self.neighbours(v) {
                if dist[n].is_none() {
                    dist[n] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Closeness with the Wasserman-Faust correction: the per-component
    /// closeness `(r − 1) / Σ d` scaled by `(r − 1) / (|V| − 1)`, where `r`
    /// is the size of the vertex's reachable set. Isolated vertices score 0.
    pub fn closeness(&self, v: usize) -> f64 {
        let n = self.adjacency.len();
        if n <= 1 {
            return 0.0;
        }
        let dist = self.bfs_distances(v);
        let reachable: Vec<usize> = dist.iter().flatten().copied().collect();
        let r = reachable.len();
        if r <= 1 {
            return 0.0;
        }
        let sum: usize = reachable.iter().sum();
        let within = (r - 1) as f64 / sum as f64;
        within * (r - 1) as f64 / (n - 1) as f64
    }

    /// Mean degree over the vertex's neighbours.
    pub fn avg_neighbour_degree(&self, v: usize) -> f64 {
        let neighbours: Vec<usize> = self.neighbours(v).collect();
        if neighbours.is_empty() {
            return 0.0;
        }
        neighbours.iter().map(|&n| self.degree(n) as f64).sum::<f64>() / neighbours.len() as f64
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

/// Compute the full statistics block for a knowledge graph.
pub fn compute_stats(
    kg: &KnowledgeGraph,
    mode: DegreeCentralityMode,
) -> Result<GraphStats, StatsError> {
    let graph = SimpleGraph::from_kg(kg);
    let n = graph.vertex_count();
    if n == 0 {
        return Err(StatsError::EmptyGraph);
    }

    let closeness: Vec<f64> = (0..n).map(|v| graph.closeness(v)).collect();
    let degrees: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64).collect();
    let isolated = degrees.iter().filter(|&&d| d == 0.0).count();
    let degree_centrality: Vec<f64> = (0..n)
        .filter(|&v| graph.degree(v) > 0)
        .map(|v| match mode {
            DegreeCentralityMode::Reciprocal => (n - 1) as f64 / graph.degree(v) as f64,
            DegreeCentralityMode::Standard => graph.degree(v) as f64 / (n - 1).max(1) as f64,
        })
        .collect();
    let neighbour_degree: Vec<f64> = (0..n)
        .filter(|&v| graph.degree(v) > 0)
        .map(|v| graph.avg_neighbour_degree(v))
        .collect();

    let (closeness_mean, closeness_std) = mean_std(&closeness);
    let (degree_centrality_mean, degree_centrality_std) = mean_std(&degree_centrality);
    let (avg_neighbour_degree_mean, avg_neighbour_degree_std) = mean_std(&neighbour_degree);
    let (avg_degree_mean, avg_degree_std) = mean_std(&degrees);

    Ok(GraphStats {
        edge_count: kg.edge_count(),
        vertex_count: kg.vertex_count(),
        relation_count: kg.relation_count(),
        closeness_mean,
        closeness_std,
        degree_centrality_mean,
        degree_centrality_std,
        avg_neighbour_degree_mean,
        avg_neighbour_degree_std,
        avg_degree_mean,
        avg_degree_std,
        isolated_vertices: isolated,
    })
}
