//! State-dependent proximity graphs and hop-count queries.
//!
//! Agents are identified by their index `0..n` in the position list.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Norm, Point};

/// Undirected simple graph over `0..n`, stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

/// Hop count between two agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}

impl Graph {
    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Self-loops and duplicates are
    /// dropped; ids must be below `n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            for id in [i, j] {
                if id >= n {
                    return Err(Error::AgentOutOfRange { id, n });
                }
            }
            if i != j {
                g.adjacency[i].push(j);
                g.adjacency[j].push(i);
            }
        }
        for nbrs in &mut g.adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n() && self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Hop counts from `source` to every agent.
    pub fn bfs(&self, source: usize) -> Vec<Distance> {
        self.multi_source_bfs(std::iter::once(source))
    }

    /// Hop count from every agent to the nearest of `sources`.
    pub fn multi_source_bfs(&self, sources: impl IntoIterator<Item = usize>) -> Vec<Distance> {
        let mut dist = vec![Distance::Unreachable; self.n()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s] == Distance::Unreachable {
                dist[s] = Distance::Finite(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let Distance::Finite(du) = dist[u] else { unreachable!() };
            for &v in &self.adjacency[u] {
                if dist[v] == Distance::Unreachable {
                    dist[v] = Distance::Finite(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

fn proximity_graph(positions: &[Point], r_cmm: f64, norm: Norm) -> Result<Graph> {
    if !(r_cmm > 0.0) {
        return Err(invalid("r_cmm", format!("must be positive, got {r_cmm}")));
    }
    let n = positions.len();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if positions[i].distance(&positions[j], norm) <= r_cmm {
                g.adjacency[i].push(j);
                g.adjacency[j].push(i);
            }
        }
    }
    for nbrs in &mut g.adjacency {
        nbrs.sort_unstable();
    }
    Ok(g)
}

/// Edge iff the Euclidean distance is at most `r_cmm`.
pub fn disk_graph(positions: &[Point], r_cmm: f64) -> Result<Graph> {
    proximity_graph(positions, r_cmm, Norm::TwoNorm)
}

/// Edge iff the infinity-norm distance is at most `r_cmm`.
pub fn cube_graph(positions: &[Point], r_cmm: f64) -> Result<Graph> {
    proximity_graph(positions, r_cmm, Norm::InfNorm)
}

pub fn complete_graph(n: usize) -> Graph {
    Graph {
        adjacency: (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect(),
    }
}

pub fn topological_distance(g: &Graph, i: usize, j: usize) -> Result<Distance> {
    let n = g.n();
    for id in [i, j] {
        if id >= n {
            return Err(Error::AgentOutOfRange { id, n });
        }
    }
    Ok(g.bfs(i)[j])
}

/// Largest pairwise hop count; `Unreachable` when the graph is disconnected.
pub fn graph_diameter(g: &Graph) -> Distance {
    let mut diam = 0;
    for s in 0..g.n() {
        for d in g.bfs(s) {
            match d {
                Distance::Finite(d) => diam = diam.max(d),
                Distance::Unreachable => return Distance::Unreachable,
            }
        }
    }
    Distance::Finite(diam)
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() == 0 || g.bfs(0).iter().all(|d| *d != Distance::Unreachable)
}
