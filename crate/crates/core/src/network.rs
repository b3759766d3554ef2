//! Undirected communication graphs: construction, structural queries, and the
//! topology generators used by the experiments.
//!
//! Vertices are 0-indexed internally and 1-indexed in every human-facing
//! format (edge lists, CSV columns).

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A simple undirected graph.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// The topology families the harness knows how to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologySpec {
    Line(usize),
    Ring(usize),
    Circulant(usize, Vec<usize>),
    Tree(usize, u64),
    RandomRegular(usize, usize, u64),
    Complete(usize),
}

impl Graph {
    /// Builds a graph from an edge list, deduplicating and rejecting
    /// self-loops and out-of-range endpoints.
    pub fn from_edges(n: usize, raw_edges: &[(usize, usize)]) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(raw_edges.len());
        for &(a, b) in raw_edges {
            if a == b {
                return Err(Error::InfeasibleTopology(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InfeasibleTopology(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(Graph { n, edges, adjacency })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Maximum vertex degree deg(G).
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    fn bfs_dists(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_dists(0).iter().all(|d| d.is_some())
    }

    /// Connected and |E| = N − 1.
    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.n
    }

    /// Maximum over vertex pairs of the BFS hop distance.
    pub fn diameter(&self) -> Result<usize> {
        let mut diameter = 0;
        for start in 0..self.n {
            for d in self.bfs_dists(start) {
                match d {
                    Some(d) => diameter = diameter.max(d),
                    None => return Err(Error::DisconnectedGraph),
                }
            }
        }
        Ok(diameter)
    }

    /// Edge-list text format: first line `N`, then one `i j` pair per line,
    /// 1-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n);
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("vertex count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let a: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("edge endpoint: {e}")))?;
            let b: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("edge endpoint: {e}")))?;
            if a == 0 || b == 0 {
                return Err(Error::Parse("edge list vertices are 1-indexed".into()));
            }
            edges.push((a - 1, b - 1));
        }
        Graph::from_edges(n, &edges)
    }
}

/// Builds a connected graph of the requested family.
pub fn make_topology(spec: &TopologySpec) -> Result<Graph> {
    match *spec {
        TopologySpec::Line(n) => {
            require(n >= 2, "line needs at least 2 vertices")?;
            let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            Graph::from_edges(n, &edges)
        }
        TopologySpec::Ring(n) => {
            require(n >= 3, "ring needs at least 3 vertices")?;
            let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            edges.push((n - 1, 0));
            Graph::from_edges(n, &edges)
        }
        TopologySpec::Circulant(n, ref offsets) => {
            require(n >= 3, "circulant needs at least 3 vertices")?;
            require(!offsets.is_empty(), "circulant needs at least one offset")?;
            let mut edges = Vec::new();
            for &k in offsets {
                require(k >= 1 && 2 * k <= n, "circulant offset out of range")?;
                for i in 0..n {
                    edges.push((i, (i + k) % n));
                }
            }
            Graph::from_edges(n, &edges)
        }
        TopologySpec::Tree(n, seed) => {
            require(n >= 2, "tree needs at least 2 vertices")?;
            Ok(random_tree(n, seed))
        }
        TopologySpec::RandomRegular(n, k, seed) => random_regular(n, k, seed),
        TopologySpec::Complete(n) => {
            require(n >= 2, "complete graph needs at least 2 vertices")?;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            Graph::from_edges(n, &edges)
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InfeasibleTopology(msg.into()))
    }
}

/// Uniform random labelled tree via a random Pruefer-style attachment,
/// deterministic in the seed.
fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n - 1);
    // attach each new vertex to a uniformly random earlier one
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        edges.push((parent, v));
    }
    Graph::from_edges(n, &edges).expect("tree edges are valid")
}

/// k-regular graph via the pairing model, rejecting until simple and
/// connected. Deterministic in the seed.
fn random_regular(n: usize, k: usize, seed: u64) -> Result<Graph> {
    require(k >= 1 && k < n, "regular degree must satisfy 1 <= k < n")?;
    require(n * k % 2 == 0, "n*k must be even for a k-regular graph")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..10_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(k)).collect();
        stubs.shuffle(&mut rng);
        let pairs: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if pairs.iter().any(|&(a, b)| a == b) {
            continue;
        }
        let graph = Graph::from_edges(n, &pairs)?;
        // dedup inside from_edges shrinks multi-edges; reject those too
        if graph.edges().len() != pairs.len() {
            continue;
        }
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(Error::InfeasibleTopology(
        "failed to sample a simple connected regular graph".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_edges() {
        let g = make_topology(&TopologySpec::Line(5)).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(g.is_connected());
        assert!(g.is_tree());
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.diameter().unwrap(), 4);
    }

    #[test]
    fn ring_is_line_plus_closing_edge() {
        let g = make_topology(&TopologySpec::Ring(5)).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
        assert!(g.is_connected());
        assert!(!g.is_tree());
        assert_eq!(g.max_degree(), 2);
    }

    #[test]
    fn circulant_15_1_2() {
        let g = make_topology(&TopologySpec::Circulant(15, vec![1, 2])).unwrap();
        assert_eq!(g.edges().len(), 30);
        for i in 0..15 {
            assert_eq!(g.degree(i), 4);
        }
        assert_eq!(g.max_degree(), 4);
        assert_eq!(g.diameter().unwrap(), 4);
    }

    #[test]
    fn complete_graph_diameter() {
        let g = make_topology(&TopologySpec::Complete(4)).unwrap();
        assert_eq!(g.diameter().unwrap(), 1);
        assert_eq!(g.max_degree(), 3);
    }

    #[test]
    fn disconnected_graph_reports() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        assert!(matches!(g.diameter(), Err(Error::DisconnectedGraph)));
    }

    #[test]
    fn line_and_ring_diameters_match_bfs_formula() {
        for n in 2..=50 {
            let line = make_topology(&TopologySpec::Line(n)).unwrap();
            assert_eq!(line.diameter().unwrap(), n - 1);
        }
        for n in 3..=50 {
            let ring = make_topology(&TopologySpec::Ring(n)).unwrap();
            assert_eq!(ring.diameter().unwrap(), n / 2);
        }
    }

    #[test]
    fn random_regular_degrees() {
        let g = make_topology(&TopologySpec::RandomRegular(15, 4, 7)).unwrap();
        for i in 0..15 {
            assert_eq!(g.degree(i), 4);
        }
        assert!(g.is_connected());
        // determinism
        let g2 = make_topology(&TopologySpec::RandomRegular(15, 4, 7)).unwrap();
        assert_eq!(g.edges(), g2.edges());
    }

    #[test]
    fn random_regular_infeasible() {
        assert!(make_topology(&TopologySpec::RandomRegular(5, 3, 0)).is_err());
        assert!(make_topology(&TopologySpec::RandomRegular(4, 4, 0)).is_err());
    }

    #[test]
    fn random_trees_are_trees() {
        for seed in 0..20 {
            let g = make_topology(&TopologySpec::Tree(12, seed)).unwrap();
            assert!(g.is_tree());
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = make_topology(&TopologySpec::Circulant(7, vec![1, 2])).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with("7\n"));
        let g2 = Graph::from_edge_list(&text).unwrap();
        assert_eq!(g.edges(), g2.edges());
    }
}
