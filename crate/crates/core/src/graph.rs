//! Labeled simple graphs, tree checks, all-pairs distances, diameter and
//! diameter-path extraction.
//!
//! Vertices are dense integer labels `0..n-1`. Family constructors attach an
//! optional role map (e.g. `"u1" -> 4`) so that downstream checks can address
//! vertices by their structural role. Distances are kept as exact integers;
//! floating point only appears once a matrix reaches the spectral module.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on the order of any graph we materialize a dense matrix for.
pub const MAX_ORDER: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph order must be at least 1")]
    EmptyGraph,
    #[error("graph order {n} exceeds the dense-matrix cap {max}")]
    TooLarge { n: usize, max: usize },
    #[error("vertex {v} out of range for order {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("not connected")]
    NotConnected,
    #[error("not a tree")]
    NotATree,
    #[error("vertex sequence is not a path of the graph")]
    NotAPath,
}

/// Simple undirected graph with an optional role-label map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    labels: BTreeMap<String, usize>,
}

/// Serialized form: `{"n": 4, "edges": [[0,1],...], "labels": {"v1": 2}?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if n > MAX_ORDER {
            return Err(GraphError::TooLarge { n, max: MAX_ORDER });
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(GraphError::VertexOutOfRange { v: a, n });
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange { v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if adj[a].contains(&b) {
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            adj,
            labels: BTreeMap::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as sorted `(a, b)` pairs with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adj[a].contains(&b)
    }

    /// Role-label map (role name to vertex id).
    pub fn labels(&self) -> &BTreeMap<String, usize> {
        &self.labels
    }

    pub fn label_of(&self, role: &str) -> Option<usize> {
        self.labels.get(role).copied()
    }

    pub fn set_label(&mut self, role: impl Into<String>, v: usize) {
        debug_assert!(v < self.n);
        self.labels.insert(role.into(), v);
    }

    pub fn clear_labels(&mut self) {
        self.labels.clear();
    }

    /// Keeps only the labels whose vertex satisfies `keep`.
    pub fn retain_labels(&mut self, mut keep: impl FnMut(usize) -> bool) {
        self.labels.retain(|_, &mut v| keep(v));
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// A tree is a connected graph with exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.edge_count() == self.n - 1 && self.is_connected()
    }

    /// Hop counts from `source` to every vertex.
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<u32>, GraphError> {
        if source >= self.n {
            return Err(GraphError::VertexOutOfRange {
                v: source,
                n: self.n,
            });
        }
        let (dist, _) = self.bfs_with_parents(source);
        if dist.contains(&u32::MAX) {
            return Err(GraphError::NotConnected);
        }
        Ok(dist)
    }

    fn bfs_with_parents(&self, source: usize) -> (Vec<u32>, Vec<usize>) {
        let mut dist = vec![u32::MAX; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Dense all-pairs distance matrix assembled from one BFS per row.
    pub fn distance_matrix(&self) -> Result<DistanceMatrix, GraphError> {
        let mut entries = Vec::with_capacity(self.n * self.n);
        for v in 0..self.n {
            entries.extend_from_slice(&self.bfs_distances(v)?);
        }
        Ok(DistanceMatrix { n: self.n, entries })
    }

    /// Maximum pairwise distance.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        let mut max = 0u32;
        for v in 0..self.n {
            let row = self.bfs_distances(v)?;
            max = max.max(row.into_iter().max().unwrap_or(0));
        }
        Ok(max as usize)
    }

    /// A path realizing the diameter, found by double BFS (exact on trees;
    /// unspecified for general graphs). Ties between farthest vertices are
    /// broken toward the smallest label, starting from vertex 0.
    pub fn d_path(&self) -> Result<VertexPath, GraphError> {
        let first = self.bfs_distances(0)?;
        let x = farthest_smallest(&first);
        let (dist, parent) = self.bfs_with_parents(x);
        let y = farthest_smallest(&dist);
        let mut vertices = vec![y];
        let mut v = y;
        while v != x {
            v = parent[v];
            vertices.push(v);
        }
        vertices.reverse();
        VertexPath::new(self, vertices)
    }

    /// The unique tree path between `a` and `b` (by BFS parent walk).
    pub fn tree_path(&self, a: usize, b: usize) -> Result<VertexPath, GraphError> {
        if !self.is_tree() {
            return Err(GraphError::NotATree);
        }
        let (dist, parent) = self.bfs_with_parents(a);
        if b >= self.n || dist[b] == u32::MAX {
            return Err(GraphError::VertexOutOfRange { v: b, n: self.n });
        }
        let mut vertices = vec![b];
        let mut v = b;
        while v != a {
            v = parent[v];
            vertices.push(v);
        }
        vertices.reverse();
        VertexPath::new(self, vertices)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges().iter().map(|&(a, b)| [a, b]).collect(),
            labels: if self.labels.is_empty() {
                None
            } else {
                Some(self.labels.clone())
            },
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|&[a, b]| (a, b)).collect();
        let mut g = Graph::new(j.n, &edges)?;
        if let Some(labels) = &j.labels {
            for (role, &v) in labels {
                if v >= g.n {
                    return Err(GraphError::VertexOutOfRange { v, n: g.n });
                }
                g.set_label(role.clone(), v);
            }
        }
        Ok(g)
    }

    /// DOT export: an undirected `graph` block, vertex ids as node names and
    /// role labels as node labels.
    pub fn to_dot(&self) -> String {
        let mut by_vertex: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (role, &v) in &self.labels {
            by_vertex.entry(v).or_default().push(role);
        }
        let mut out = String::from("graph g {\n");
        for v in 0..self.n {
            match by_vertex.get(&v) {
                Some(roles) => {
                    let _ = writeln!(out, "  {} [label=\"{}\"];", v, roles.join(","));
                }
                None => {
                    let _ = writeln!(out, "  {};", v);
                }
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {} -- {};", a, b);
        }
        out.push_str("}\n");
        out
    }
}

fn farthest_smallest(dist: &[u32]) -> usize {
    let max = dist.iter().copied().max().unwrap_or(0);
    dist.iter().position(|&d| d == max).unwrap_or(0)
}

/// Dense symmetric matrix of pairwise hop counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<u32>,
}

impl DistanceMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// Sum of the squares of all entries (the squared Frobenius norm).
    pub fn square_sum(&self) -> f64 {
        self.entries.iter().map(|&d| (d as f64) * (d as f64)).sum()
    }
}

/// Ordered vertex sequence whose consecutive pairs are adjacent, vertices
/// pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPath(Vec<usize>);

impl VertexPath {
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::NotAPath);
        }
        let mut seen = vec![false; g.order()];
        for &v in &vertices {
            if v >= g.order() {
                return Err(GraphError::VertexOutOfRange { v, n: g.order() });
            }
            if seen[v] {
                return Err(GraphError::NotAPath);
            }
            seen[v] = true;
        }
        for w in vertices.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(GraphError::NotAPath);
            }
        }
        Ok(VertexPath(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Path length as an edge count.
    pub fn edge_count(&self) -> usize {
        self.0.len() - 1
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.0[0], *self.0.last().unwrap())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges).unwrap()
    }

    fn star_graph(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert_eq!(Graph::new(0, &[]), Err(GraphError::EmptyGraph));
        assert_eq!(
            Graph::new(3, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange { v: 3, n: 3 })
        );
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::new(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
    }

    #[test]
    fn tree_recognition() {
        assert!(path_graph(4).is_tree());
        let cycle = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!cycle.is_tree());
        let disjoint = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!disjoint.is_tree());
    }

    #[test]
    fn bfs_rows() {
        let p4 = path_graph(4);
        assert_eq!(p4.bfs_distances(0).unwrap(), vec![0, 1, 2, 3]);
        let star = star_graph(5);
        assert_eq!(star.bfs_distances(0).unwrap(), vec![0, 1, 1, 1, 1]);
        assert_eq!(star.bfs_distances(1).unwrap(), vec![1, 0, 2, 2, 2]);
    }

    #[test]
    fn bfs_errors() {
        let disjoint = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(disjoint.bfs_distances(0), Err(GraphError::NotConnected));
        let p2 = path_graph(2);
        assert_eq!(
            p2.bfs_distances(5),
            Err(GraphError::VertexOutOfRange { v: 5, n: 2 })
        );
    }

    #[test]
    fn distance_matrices() {
        let p2 = path_graph(2).distance_matrix().unwrap();
        assert_eq!(p2.row(0), &[0, 1]);
        assert_eq!(p2.row(1), &[1, 0]);

        let p3 = path_graph(3).distance_matrix().unwrap();
        assert_eq!(p3.row(0), &[0, 1, 2]);
        assert_eq!(p3.row(1), &[1, 0, 1]);
        assert_eq!(p3.row(2), &[2, 1, 0]);

        let k13 = star_graph(4).distance_matrix().unwrap();
        assert_eq!(k13.row(0), &[0, 1, 1, 1]);
        assert_eq!(k13.row(1), &[1, 0, 2, 2]);
        assert_eq!(k13.row(2), &[1, 2, 0, 2]);
        assert_eq!(k13.row(3), &[1, 2, 2, 0]);
    }

    #[test]
    fn diameters() {
        for n in 2..=8 {
            assert_eq!(path_graph(n).diameter().unwrap(), n - 1);
        }
        for m in 2..=5 {
            assert_eq!(star_graph(m + 1).diameter().unwrap(), 2);
        }
        let single = Graph::new(1, &[]).unwrap();
        assert_eq!(single.diameter().unwrap(), 0);
    }

    #[test]
    fn d_path_on_paths_and_stars() {
        let p5 = path_graph(5);
        let dp = p5.d_path().unwrap();
        assert_eq!(dp.edge_count(), 4);
        let mut verts = dp.vertices().to_vec();
        verts.sort_unstable();
        assert_eq!(verts, vec![0, 1, 2, 3, 4]);

        // smallest-label tie-break picks leaves 1 and 2
        let star = star_graph(4);
        let dp = star.d_path().unwrap();
        assert_eq!(dp.edge_count(), 2);
        assert_eq!(dp.endpoints(), (1, 2));
    }

    #[test]
    fn d_path_single_vertex() {
        let single = Graph::new(1, &[]).unwrap();
        let dp = single.d_path().unwrap();
        assert_eq!(dp.edge_count(), 0);
        assert_eq!(dp.vertices(), &[0]);
    }

    #[test]
    fn vertex_path_validation() {
        let p4 = path_graph(4);
        assert!(VertexPath::new(&p4, vec![0, 1, 2]).is_ok());
        assert_eq!(VertexPath::new(&p4, vec![0, 2]), Err(GraphError::NotAPath));
        assert_eq!(
            VertexPath::new(&p4, vec![0, 1, 0]),
            Err(GraphError::NotAPath)
        );
        assert_eq!(VertexPath::new(&p4, vec![]), Err(GraphError::NotAPath));
    }

    #[test]
    fn json_round_trip_with_labels() {
        let mut g = path_graph(3);
        g.set_label("v1", 1);
        let j = g.to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1],[1,2]],"labels":{"v1":1}}"#);
        let back = Graph::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_rejects_bad_label() {
        let j: GraphJson =
            serde_json::from_str(r#"{"n":2,"edges":[[0,1]],"labels":{"x":7}}"#).unwrap();
        assert_eq!(
            Graph::from_json(&j),
            Err(GraphError::VertexOutOfRange { v: 7, n: 2 })
        );
    }

    #[test]
    fn dot_export() {
        let mut g = path_graph(3);
        g.set_label("v1", 1);
        let dot = g.to_dot();
        assert_eq!(
            dot,
            "graph g {\n  0;\n  1 [label=\"v1\"];\n  2;\n  0 -- 1;\n  1 -- 2;\n}\n"
        );
    }

    #[test]
    fn tree_path_reconstruction() {
        let p5 = path_graph(5);
        let tp = p5.tree_path(1, 4).unwrap();
        assert_eq!(tp.vertices(), &[1, 2, 3, 4]);
        assert_eq!(tp.edge_count() as u32, p5.bfs_distances(1).unwrap()[4]);
    }
}
