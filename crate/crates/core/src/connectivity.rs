//! k-vertex-connectivity tests.
//!
//! Three routes are available: linear-time DFS for `k <= 2`, the
//! vertex-removal reduction (remove one vertex, test `k - 1`), and a global
//! max-flow test built on Menger's theorem. A brute-force enumeration of all
//! `(k - 1)`-subsets serves as the reference oracle on small graphs.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::geom::CommGraph;

/// Largest graph accepted by [`brute_force_k_connected`].
pub const BRUTE_FORCE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConnectivityMethod {
    /// `k = 1` BFS, `k = 2` DFS low-points, `k = 3` vertex removal, `k >= 4` max-flow.
    #[default]
    Auto,
    DfsSpecialized,
    VertexRemovalReduction,
    MaxFlow,
    BruteForce,
}

impl ConnectivityMethod {
    pub fn name(self) -> &'static str {
        match self {
            ConnectivityMethod::Auto => "auto",
            ConnectivityMethod::DfsSpecialized => "dfs",
            ConnectivityMethod::VertexRemovalReduction => "reduction",
            ConnectivityMethod::MaxFlow => "maxflow",
            ConnectivityMethod::BruteForce => "brute",
        }
    }
}

impl fmt::Display for ConnectivityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConnectivityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => ConnectivityMethod::Auto,
            "dfs" => ConnectivityMethod::DfsSpecialized,
            "reduction" => ConnectivityMethod::VertexRemovalReduction,
            "maxflow" => ConnectivityMethod::MaxFlow,
            "brute" => ConnectivityMethod::BruteForce,
            other => return Err(Error::InvalidArgument(format!("unknown connectivity method `{other}`"))),
        })
    }
}

/// True iff a BFS from vertex 0 reaches every vertex.
pub fn is_connected(graph: &CommGraph) -> bool {
    connected_without(graph, &vec![false; graph.n()])
}

/// Connectivity of the subgraph induced by the vertices not in `removed`.
/// An empty remainder counts as connected.
pub(crate) fn connected_without(graph: &CommGraph, removed: &[bool]) -> bool {
    let n = graph.n();
    let Some(start) = (0..n).find(|&v| !removed[v]) else {
        return true;
    };
    let mut seen = removed.to_vec();
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for &v in graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                stack.push(v);
            }
        }
    }
    reached == removed.iter().filter(|&&r| !r).count()
}

/// True iff the graph is connected, has at least 3 vertices, and has no
/// articulation vertex.
pub fn is_biconnected(graph: &CommGraph) -> bool {
    biconnected_without(graph, &vec![false; graph.n()])
}

/// Iterative Hopcroft-Tarjan low-point test on the subgraph that excludes
/// `removed` vertices. O(n + m).
pub(crate) fn biconnected_without(graph: &CommGraph, removed: &[bool]) -> bool {
    let n = graph.n();
    let remaining = removed.iter().filter(|&&r| !r).count();
    if remaining < 3 {
        return false;
    }
    let root = (0..n).find(|&v| !removed[v]).expect("remaining > 0");
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut root_children = 0;
    // (vertex, parent, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, UNSEEN, 0)];
    disc[root] = 0;
    low[root] = 0;
    timer += 1;

    while let Some(top) = stack.last_mut() {
        let (u, parent, pos) = *top;
        let nbrs = graph.neighbors(u);
        if pos < nbrs.len() {
            top.2 += 1;
            let v = nbrs[pos];
            if removed[v] || v == parent {
                continue;
            }
            if disc[v] == UNSEEN {
                disc[v] = timer;
                low[v] = timer;
                timer += 1;
                if u == root {
                    root_children += 1;
                }
                stack.push((v, u, 0));
            } else {
                low[u] = low[u].min(disc[v]);
            }
        } else {
            stack.pop();
            if parent != UNSEEN {
                low[parent] = low[parent].min(low[u]);
                if parent != root && low[u] >= disc[parent] {
                    return false;
                }
            }
        }
    }
    timer == remaining && root_children == 1
}

/// Size of a minimum `s`-`t` vertex cut, i.e. the maximum number of
/// internally vertex-disjoint `s`-`t` paths.
pub fn min_vertex_cut(graph: &CommGraph, s: usize, t: usize) -> Result<usize> {
    graph.check_vertex(s)?;
    graph.check_vertex(t)?;
    if s == t {
        return Err(Error::InvalidArgument("vertex cut needs two distinct vertices".into()));
    }
    if graph.has_edge(s, t) {
        return Err(Error::InvalidArgument(format!("vertices {s} and {t} are adjacent; no vertex cut separates them")));
    }
    Ok(disjoint_paths(graph, s, t, graph.n() as u32) as usize)
}

/// k-vertex-connectivity: more than `k` vertices, and no set of `k - 1`
/// vertices whose removal disconnects the graph.
pub fn is_k_connected(graph: &CommGraph, k: usize, method: ConnectivityMethod) -> Result<bool> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    match method {
        ConnectivityMethod::DfsSpecialized if k > 2 => {
            return Err(Error::UnsupportedMethod { method: method.name(), k })
        }
        ConnectivityMethod::VertexRemovalReduction if k < 2 => {
            return Err(Error::UnsupportedMethod { method: method.name(), k })
        }
        ConnectivityMethod::BruteForce => return brute_force_k_connected(graph, k),
        _ => {}
    }
    let n = graph.n();
    if n <= k {
        return Ok(false);
    }
    // Every vertex of a k-connected graph has degree >= k.
    if graph.min_degree() < k {
        return Ok(false);
    }
    Ok(match (method, k) {
        (ConnectivityMethod::Auto | ConnectivityMethod::DfsSpecialized, 1) => is_connected(graph),
        (ConnectivityMethod::Auto | ConnectivityMethod::DfsSpecialized, 2) => is_biconnected(graph),
        (ConnectivityMethod::Auto, 3) | (ConnectivityMethod::VertexRemovalReduction, _) => {
            reduction_without(graph, &mut vec![false; n], k)
        }
        _ => max_flow_k_connected(graph, k),
    })
}

/// Removes each remaining vertex in turn and tests `(k - 1)`-connectivity of
/// the rest, bottoming out at the biconnectivity test.
fn reduction_without(graph: &CommGraph, removed: &mut [bool], k: usize) -> bool {
    let remaining = removed.iter().filter(|&&r| !r).count();
    if remaining <= k {
        return false;
    }
    match k {
        1 => connected_without(graph, removed),
        2 => biconnected_without(graph, removed),
        _ => {
            if !biconnected_without(graph, removed) {
                return false;
            }
            for v in 0..graph.n() {
                if removed[v] {
                    continue;
                }
                removed[v] = true;
                let ok = reduction_without(graph, removed, k - 1);
                removed[v] = false;
                if !ok {
                    return false;
                }
            }
            true
        }
    }
}

/// Global test with a minimum-degree pivot `s`: `s` against every
/// non-neighbor, then every non-adjacent pair of neighbors of `s`. A separator of size `< k` either
/// misses `s`, splitting it from some non-neighbor, or (being minimal)
/// contains `s`, in which case `s` has neighbors on both sides.
fn max_flow_k_connected(graph: &CommGraph, k: usize) -> bool {
    let n = graph.n();
    let s = (0..n).min_by_key(|&v| graph.degree(v)).expect("n > k >= 1");
    let need = k as u32;
    for t in (0..n).filter(|&t| t != s) {
        if !graph.has_edge(s, t) && disjoint_paths(graph, s, t, need) < need {
            return false;
        }
    }
    let nbrs = graph.neighbors(s);
    for (ai, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[ai + 1..] {
            if !graph.has_edge(a, b) && disjoint_paths(graph, a, b, need) < need {
                return false;
            }
        }
    }
    true
}

/// Reference oracle: enumerates every `(k - 1)`-subset of vertices.
pub fn brute_force_k_connected(graph: &CommGraph, k: usize) -> Result<bool> {
    let n = graph.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GraphTooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n <= k {
        return Ok(false);
    }
    let mut removed = vec![false; n];
    for subset in (0..n).combinations(k - 1) {
        subset.iter().for_each(|&v| removed[v] = true);
        let ok = connected_without(graph, &removed);
        subset.iter().for_each(|&v| removed[v] = false);
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `k` for which the graph is k-connected; 0 if disconnected.
pub fn vertex_connectivity(graph: &CommGraph) -> Result<usize> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidArgument("vertex connectivity needs at least 2 vertices".into()));
    }
    // Invariant: k-connected for k = lo, not for k = hi.
    let (mut lo, mut hi) = (0, n);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if is_k_connected(graph, mid, ConnectivityMethod::Auto)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> CommGraph {
        CommGraph::from_edges(n, edges).unwrap()
    }

    fn cycle(n: usize) -> CommGraph {
        g(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    const ALL: [ConnectivityMethod; 5] = [
        ConnectivityMethod::Auto,
        ConnectivityMethod::DfsSpecialized,
        ConnectivityMethod::VertexRemovalReduction,
        ConnectivityMethod::MaxFlow,
        ConnectivityMethod::BruteForce,
    ];

    #[test]
    fn connected_examples() {
        assert!(is_connected(&g(3, &[(0, 1), (1, 2)])));
        assert!(!is_connected(&g(3, &[(0, 1)])));
        assert!(is_connected(&CommGraph::empty(1)));
    }

    #[test]
    fn biconnected_examples() {
        assert!(is_biconnected(&cycle(3)));
        assert!(!is_biconnected(&g(3, &[(0, 1), (1, 2)])));
        assert!(is_biconnected(&cycle(4)));
        assert!(!is_biconnected(&g(2, &[(0, 1)])));
        // Two triangles sharing vertex 2.
        assert!(!is_biconnected(&g(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])));
        // Articulation point deep in the DFS tree.
        assert!(!is_biconnected(&g(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])));
    }

    #[test]
    fn min_cut_examples() {
        assert_eq!(min_vertex_cut(&g(3, &[(0, 1), (1, 2)]), 0, 2).unwrap(), 1);
        assert_eq!(min_vertex_cut(&cycle(4), 0, 2).unwrap(), 2);
        // K_{2,3}: sides {0,1} and {2,3,4}; two vertices on the 3-side are
        // joined through 0 and through 1.
        let k23 = g(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
        assert_eq!(min_vertex_cut(&k23, 2, 3).unwrap(), 2);
        assert_eq!(min_vertex_cut(&k23, 0, 1).unwrap(), 3);
        assert!(min_vertex_cut(&k23, 2, 2).is_err());
        assert!(min_vertex_cut(&k23, 0, 2).is_err());
    }

    #[test]
    fn k_connected_examples() {
        let k5 = CommGraph::complete(5);
        for m in ALL {
            if m == ConnectivityMethod::DfsSpecialized {
                continue;
            }
            assert!(is_k_connected(&k5, 4, m).unwrap(), "{m}");
            assert!(!is_k_connected(&k5, 5, m).unwrap(), "{m}");
            assert!(!is_k_connected(&cycle(4), 3, m).unwrap(), "{m}");
        }
        for m in [ConnectivityMethod::Auto, ConnectivityMethod::DfsSpecialized, ConnectivityMethod::MaxFlow] {
            assert!(!is_k_connected(&g(4, &[(0, 1), (1, 2), (2, 3)]), 2, m).unwrap());
            assert!(is_k_connected(&g(4, &[(0, 1), (1, 2), (2, 3)]), 1, m).unwrap());
        }
        assert!(is_k_connected(&k5, 0, ConnectivityMethod::Auto).is_err());
        assert!(matches!(
            is_k_connected(&k5, 3, ConnectivityMethod::DfsSpecialized),
            Err(Error::UnsupportedMethod { .. })
        ));
        assert!(is_k_connected(&k5, 1, ConnectivityMethod::VertexRemovalReduction).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_k_connected(&cycle(3), 2).unwrap());
        let mut k4_minus = CommGraph::complete(4);
        k4_minus.remove_edge(0, 1);
        // Removing {2, 3} isolates 0 from 1.
        assert!(!brute_force_k_connected(&k4_minus, 3).unwrap());
        assert!(brute_force_k_connected(&k4_minus, 2).unwrap());
        for n in 1..6 {
            assert!(!brute_force_k_connected(&CommGraph::complete(n), n).unwrap());
        }
        assert!(matches!(brute_force_k_connected(&CommGraph::empty(17), 2), Err(Error::GraphTooLarge { .. })));
    }

    #[test]
    fn vertex_connectivity_examples() {
        assert_eq!(vertex_connectivity(&g(3, &[(0, 1), (1, 2)])).unwrap(), 1);
        assert_eq!(vertex_connectivity(&cycle(4)).unwrap(), 2);
        assert_eq!(vertex_connectivity(&CommGraph::complete(5)).unwrap(), 4);
        assert_eq!(vertex_connectivity(&g(4, &[(0, 1), (2, 3)])).unwrap(), 0);
        assert!(vertex_connectivity(&CommGraph::empty(1)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in ALL {
            assert_eq!(m.name().parse::<ConnectivityMethod>().unwrap(), m);
        }
    }
}
