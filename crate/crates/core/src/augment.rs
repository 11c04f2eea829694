//! Graph topology optimization: choose missing edges whose addition makes
//! the communication graph k-connected while keeping the heaviest added
//! edge as light as possible.

use serde::Serialize;

use crate::connectivity::{is_k_connected, ConnectivityMethod};
use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::geom::{build_comm_graph, complement_edges, CommGraph, Instance, WeightedNonEdge, EPS};

/// Edges to add to `G(X)` to reach k-connectivity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AugmentationSet {
    /// In ascending weight order (the order they were inserted).
    pub edges: Vec<WeightedNonEdge>,
    /// Heaviest edge weight, 0 when empty.
    pub bottleneck: f64,
    pub k: usize,
}

impl AugmentationSet {
    pub fn new(edges: Vec<WeightedNonEdge>, k: usize) -> Self {
        let bottleneck = edges.iter().map(|e| e.weight).fold(0.0, f64::max);
        AugmentationSet { edges, bottleneck, k }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// `{"i":..,"j":..,"w":..}` records.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.edges).expect("edges serialize")
    }

    /// Reads the output of [`AugmentationSet::to_json`].
    pub fn from_json(text: &str, k: usize) -> Result<Self> {
        let edges: Vec<WeightedNonEdge> = serde_json::from_str(text)?;
        Ok(AugmentationSet::new(edges, k))
    }

    /// `base` plus every augmentation edge.
    pub fn augmented(&self, base: &CommGraph) -> CommGraph {
        let mut g = base.clone();
        for e in &self.edges {
            g.add_edge(e.i, e.j);
        }
        g
    }
}

pub(crate) fn check_feasible_k(n: usize, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n <= k {
        return Err(Error::Infeasible { n, k });
    }
    Ok(())
}

/// Edge augmentation.
///
/// Adds complement edges in ascending weight order until the graph is
/// k-connected, then walks the added edges in the same order and drops every
/// edge whose removal keeps the graph k-connected.
///
/// The shortest k-connected prefix is found by binary search, which picks
/// the same prefix as adding edges one at a time since k-connectivity is
/// monotone under edge insertion. Removing `uv` from a k-connected graph
/// keeps it k-connected exactly when `k` vertex-disjoint `u`-`v` paths
/// remain, so each pruning step is a single bounded max-flow.
pub fn edge_augmentation(instance: &Instance, k: usize) -> Result<AugmentationSet> {
    check_feasible_k(instance.n(), k)?;
    let base = build_comm_graph(instance);
    let candidates = complement_edges(instance, &base);
    let method = ConnectivityMethod::Auto;
    let prefix = |len: usize| {
        let mut g = base.clone();
        for e in &candidates[..len] {
            g.add_edge(e.i, e.j);
        }
        g
    };

    // n > k makes the complete graph k-connected, so the full list suffices.
    let (mut lo, mut hi) = (0, candidates.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if is_k_connected(&prefix(mid), k, method)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let count = lo;
    let mut graph = prefix(count);

    let mut kept = Vec::new();
    for e in &candidates[..count] {
        graph.remove_edge(e.i, e.j);
        if (disjoint_paths(&graph, e.i, e.j, k as u32) as usize) < k {
            graph.add_edge(e.i, e.j);
            kept.push(*e);
        }
    }
    debug_assert!(is_k_connected(&graph, k, method)?);
    Ok(AugmentationSet::new(kept, k))
}

/// Smallest distance `t >= h` such that joining every pair at distance at
/// most `t` yields a k-connected graph. Any augmentation set reaching
/// k-connectivity has a bottleneck of at least this value.
pub fn bottleneck_threshold(instance: &Instance, k: usize) -> Result<f64> {
    check_feasible_k(instance.n(), k)?;
    let h = instance.h();
    let base = build_comm_graph(instance);
    let candidates = complement_edges(instance, &base);

    let mut thresholds = vec![h];
    for e in &candidates {
        if thresholds.last().is_some_and(|&t| e.weight > t) {
            thresholds.push(e.weight);
        }
    }
    let graph_at = |t: f64| {
        let mut g = base.clone();
        for e in candidates.iter().take_while(|e| e.weight <= t + EPS) {
            g.add_edge(e.i, e.j);
        }
        g
    };
    // The last threshold yields the complete graph, which is k-connected.
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if is_k_connected(&graph_at(thresholds[mid]), k, ConnectivityMethod::Auto)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(thresholds[lo])
}

/// Outcome of [`verify_augmentation`].
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentationReport {
    /// `G(X)` plus the set is k-connected.
    pub achieves_k: bool,
    /// Edges whose removal keeps the augmented graph k-connected.
    pub redundant_edges: Vec<(usize, usize)>,
    /// Edges that are already present in `G(X)`.
    pub existing_edges: Vec<(usize, usize)>,
    pub bottleneck: f64,
    pub threshold: f64,
}

impl AugmentationReport {
    pub fn is_minimal(&self) -> bool {
        self.redundant_edges.is_empty()
    }

    /// The bottleneck matches the threshold. An empty set is optimal when
    /// no edge was needed at all (threshold equal to the radius).
    pub fn bottleneck_optimal(&self, h: f64) -> bool {
        if self.bottleneck == 0.0 {
            (self.threshold - h).abs() <= EPS
        } else {
            (self.bottleneck - self.threshold).abs() <= EPS
        }
    }

    pub fn passed(&self) -> bool {
        self.achieves_k && self.is_minimal() && self.existing_edges.is_empty()
    }
}

/// Checks achievability and per-edge minimality of `aug`, and compares its
/// bottleneck with [`bottleneck_threshold`].
pub fn verify_augmentation(instance: &Instance, k: usize, aug: &AugmentationSet) -> Result<AugmentationReport> {
    let base = build_comm_graph(instance);
    let existing_edges = aug.edges.iter().filter(|e| base.has_edge(e.i, e.j)).map(|e| (e.i, e.j)).collect();
    let mut graph = aug.augmented(&base);
    let achieves_k = is_k_connected(&graph, k, ConnectivityMethod::Auto)?;
    let mut redundant_edges = Vec::new();
    if achieves_k {
        for e in &aug.edges {
            if base.has_edge(e.i, e.j) {
                continue;
            }
            graph.remove_edge(e.i, e.j);
            if is_k_connected(&graph, k, ConnectivityMethod::Auto)? {
                redundant_edges.push((e.i, e.j));
            }
            graph.add_edge(e.i, e.j);
        }
    }
    let threshold = if instance.n() > k { bottleneck_threshold(instance, k)? } else { f64::INFINITY };
    Ok(AugmentationReport { achieves_k, redundant_edges, existing_edges, bottleneck: aug.bottleneck, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::brute_force_k_connected;

    fn line3() -> Instance {
        Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()
    }

    fn unit_square() -> Instance {
        Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn collinear_augmentation() {
        let inst = line3();
        let aug = edge_augmentation(&inst, 2).unwrap();
        assert_eq!(aug.edges.iter().map(|e| (e.i, e.j)).collect::<Vec<_>>(), vec![(0, 2)]);
        assert_eq!(aug.bottleneck, 2.0);
        let g = aug.augmented(&build_comm_graph(&inst));
        assert!(brute_force_k_connected(&g, 2).unwrap());
        assert_eq!(bottleneck_threshold(&inst, 2).unwrap(), 2.0);
    }

    #[test]
    fn already_connected_cycle() {
        let inst = unit_square();
        let aug = edge_augmentation(&inst, 2).unwrap();
        assert!(aug.is_empty());
        assert_eq!(aug.bottleneck, 0.0);
        assert_eq!(bottleneck_threshold(&inst, 2).unwrap(), 1.0);
        let report = verify_augmentation(&inst, 2, &aug).unwrap();
        assert!(report.passed() && report.bottleneck_optimal(1.0));
    }

    #[test]
    fn square_needs_both_diagonals_for_k3() {
        let inst = unit_square();
        let aug = edge_augmentation(&inst, 3).unwrap();
        assert_eq!(aug.len(), 2);
        assert!((bottleneck_threshold(&inst, 3).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn infeasible_sizes() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let inst = Instance::planar(1.0, &pts).unwrap();
        assert!(matches!(edge_augmentation(&inst, 5), Err(Error::Infeasible { n: 5, k: 5 })));
        assert!(matches!(bottleneck_threshold(&inst, 6), Err(Error::Infeasible { .. })));
        assert!(edge_augmentation(&inst, 4).is_ok());
    }

    #[test]
    fn verifier_flags_redundant_and_missing_edges() {
        // Path of four points 0.9 apart; k = 2 closes the path into a cycle.
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (0.9, 0.0), (1.8, 0.0), (2.7, 0.0)]).unwrap();
        let aug = edge_augmentation(&inst, 2).unwrap();
        let report = verify_augmentation(&inst, 2, &aug).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.bottleneck_optimal(1.0));

        let mut extra = aug.edges.clone();
        let have: Vec<_> = extra.iter().map(|e| (e.i, e.j)).collect();
        let spare = complement_edges(&inst, &build_comm_graph(&inst))
            .into_iter()
            .find(|e| !have.contains(&(e.i, e.j)))
            .unwrap();
        extra.push(spare);
        let report = verify_augmentation(&inst, 2, &AugmentationSet::new(extra, 2)).unwrap();
        assert!(report.achieves_k && !report.is_minimal());

        let mut missing = aug.edges.clone();
        missing.pop();
        let report = verify_augmentation(&inst, 2, &AugmentationSet::new(missing, 2)).unwrap();
        assert!(!report.achieves_k && !report.passed());
    }

    #[test]
    fn json_dump_shape() {
        let aug = edge_augmentation(&line3(), 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&aug.to_json()).unwrap();
        assert_eq!(v, serde_json::json!([{"i": 0, "j": 2, "w": 2.0}]));
    }
}
