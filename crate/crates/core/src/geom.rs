//! Robot positions, the disk-model communication graph and the graph
//! primitives shared by every other module.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance of the "within radius" predicate, in meters.
pub const EPS: f64 = 1e-9;

/// A 2D or 3D point. 2D points keep a zero third coordinate so that all
/// vector arithmetic is dimension-agnostic.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    /// Builds a point from a coordinate slice of length 2 or 3.
    pub fn from_slice(c: &[f64]) -> Option<Self> {
        match *c {
            [x, y] => Some(Point::new2(x, y)),
            [x, y, z] => Some(Point::new3(x, y, z)),
            _ => None,
        }
    }

    pub fn coords(&self, dim: usize) -> &[f64] {
        &self.0[..dim]
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let d = self.sub(other);
        d.dot(&d)
    }

    pub fn sub(&self, other: &Point) -> Point {
        let [a, b, c] = self.0;
        let [x, y, z] = other.0;
        Point([a - x, b - y, c - z])
    }

    pub fn add(&self, other: &Point) -> Point {
        let [a, b, c] = self.0;
        let [x, y, z] = other.0;
        Point([a + x, b + y, c + z])
    }

    pub fn scale(&self, s: f64) -> Point {
        let [a, b, c] = self.0;
        Point([a * s, b * s, c * s])
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Moves `self` a distance `d` along the straight line toward `target`.
    /// Returns `None` when the two points coincide.
    pub fn step_toward(&self, target: &Point, d: f64) -> Option<Point> {
        let dir = target.sub(self);
        let len = dir.norm();
        if len == 0.0 {
            return None;
        }
        Some(self.add(&dir.scale(d / len)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn centroid<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Point> {
        let mut sum = Point::default();
        let mut count = 0usize;
        for p in points {
            sum = sum.add(p);
            count += 1;
        }
        (count > 0).then(|| sum.scale(1.0 / count as f64))
    }
}

/// A restoration problem instance: robot positions and communication radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    dim: usize,
    h: f64,
    positions: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    dim: usize,
    h: f64,
    positions: Vec<Vec<f64>>,
}

impl Instance {
    pub fn new(dim: usize, h: f64, positions: Vec<Point>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidInstance(format!("dim must be 2 or 3, got {dim}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInstance(format!("radius must be positive, got {h}")));
        }
        if positions.is_empty() {
            return Err(Error::InvalidInstance("at least one robot is required".into()));
        }
        for (i, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidInstance(format!("robot {i} has a non-finite coordinate")));
            }
            if dim == 2 && p.0[2] != 0.0 {
                return Err(Error::InvalidInstance(format!("robot {i} has a third coordinate in a 2D instance")));
            }
        }
        Ok(Instance { dim, h, positions })
    }

    /// Convenience constructor for 2D instances.
    pub fn planar(h: f64, xy: &[(f64, f64)]) -> Result<Self> {
        Instance::new(2, h, xy.iter().map(|&(x, y)| Point::new2(x, y)).collect())
    }

    /// Builds an instance from raw coordinate rows; the dimension is taken
    /// from the first row.
    pub fn from_rows(h: f64, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(2, Vec::len);
        let positions = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != dim {
                    return Err(Error::InvalidInstance(format!(
                        "robot {i} has {} coordinates, expected {dim}",
                        r.len()
                    )));
                }
                Point::from_slice(r)
                    .ok_or_else(|| Error::InvalidInstance(format!("robot {i}: dim must be 2 or 3")))
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(dim, h, positions)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Same radius and dimension, new positions.
    pub fn with_positions(&self, positions: Vec<Point>) -> Result<Self> {
        if positions.len() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "expected {} positions, got {}",
                self.n(),
                positions.len()
            )));
        }
        Instance::new(self.dim, self.h, positions)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.positions.iter().map(|p| p.coords(self.dim).to_vec()).collect()
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile { dim: self.dim, h: self.h, positions: self.rows() };
        serde_json::to_string_pretty(&file).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let inst = Instance::from_rows(file.h, &file.positions)?;
        if inst.dim != file.dim {
            return Err(Error::InvalidInstance(format!(
                "declared dim {} but coordinates have {}",
                file.dim, inst.dim
            )));
        }
        Ok(inst)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Instance::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn within_radius(&self, i: usize, j: usize) -> bool {
        within(&self.positions[i], &self.positions[j], self.h)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.positions[i].dist(&self.positions[j])
    }
}

/// The communication predicate: distance at most `h`, up to [`EPS`].
pub fn within(a: &Point, b: &Point, h: f64) -> bool {
    a.dist(b) <= h + EPS
}

/// An undirected simple graph on vertices `0..n` with sorted adjacency lists
/// and a dense adjacency matrix for constant-time edge queries.
#[derive(Clone, PartialEq, Eq)]
pub struct CommGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    m: usize,
}

impl fmt::Debug for CommGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CommGraph").field("n", &self.n).field("edges", &self.edges()).finish()
    }
}

impl CommGraph {
    pub fn empty(n: usize) -> Self {
        CommGraph { n, adj: vec![Vec::new(); n], matrix: vec![false; n * n], m: 0 }
    }

    /// Builds a graph from an edge list. Self-loops and out-of-range
    /// endpoints are rejected; duplicates are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = CommGraph::empty(n);
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = CommGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.n + v]
    }

    /// Inserts edge `(u, v)`; returns false if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v && u < self.n && v < self.n);
        if self.has_edge(u, v) {
            return false;
        }
        self.matrix[u * self.n + v] = true;
        self.matrix[v * self.n + u] = true;
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a];
            let pos = list.partition_point(|&x| x < b);
            list.insert(pos, b);
        }
        self.m += 1;
        true
    }

    /// Removes edge `(u, v)`; returns false if it was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.has_edge(u, v) {
            return false;
        }
        self.matrix[u * self.n + v] = false;
        self.matrix[v * self.n + u] = false;
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a];
            if let Ok(pos) = list.binary_search(&b) {
                list.remove(pos);
            }
        }
        self.m -= 1;
        true
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }
}

/// Builds the communication graph: an edge joins every pair of robots at
/// distance at most `h` (inclusive, up to [`EPS`]).
pub fn build_comm_graph(instance: &Instance) -> CommGraph {
    graph_within(instance.positions(), instance.h())
}

/// Disk graph over arbitrary positions with radius `h`.
pub fn graph_within(positions: &[Point], h: f64) -> CommGraph {
    let n = positions.len();
    let mut g = CommGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if within(&positions[i], &positions[j], h) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Hop distance of vertices not reachable from the root.
pub const UNREACHABLE: usize = usize::MAX;

/// Breadth-first search tree rooted at a single vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsTree {
    pub root: usize,
    /// Hop count from the root, [`UNREACHABLE`] if not reached.
    pub dist: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Reached vertices in visiting order (non-decreasing `dist`).
    pub order: Vec<usize>,
}

impl BfsTree {
    pub fn reachable(&self, v: usize) -> bool {
        self.dist[v] != UNREACHABLE
    }
}

/// BFS from `root`, scanning neighbors in ascending index order.
pub fn bfs(graph: &CommGraph, root: usize) -> Result<BfsTree> {
    graph.check_vertex(root)?;
    let n = graph.n();
    let mut dist = vec![UNREACHABLE; n];
    let mut parent = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in graph.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    Ok(BfsTree { root, dist, parent, order })
}

/// A robot pair that is not adjacent in the communication graph, weighted by
/// its Euclidean distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedNonEdge {
    pub i: usize,
    pub j: usize,
    #[serde(rename = "w")]
    pub weight: f64,
}

/// All non-adjacent pairs `(i, j)`, `i < j`, sorted by ascending weight with
/// ties broken lexicographically by `(i, j)`.
pub fn complement_edges(instance: &Instance, graph: &CommGraph) -> Vec<WeightedNonEdge> {
    let n = instance.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2 - graph.edge_count().min(n * (n - 1) / 2));
    for i in 0..n {
        for j in i + 1..n {
            if !graph.has_edge(i, j) {
                out.push(WeightedNonEdge { i, j, weight: instance.distance(i, j) });
            }
        }
    }
    out.sort_by(|a, b| a.weight.total_cmp(&b.weight).then((a.i, a.j).cmp(&(b.i, b.j))));
    out
}
