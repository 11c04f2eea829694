//! Unit-capacity max-flow on the vertex-split digraph of a [`CommGraph`].

use std::collections::{HashSet, VecDeque};

use crate::geom::CommGraph;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

/// Vertex-split network for a source/sink pair.
///
/// Vertex `v` becomes `in(v) = 2v` and `out(v) = 2v + 1`. Every vertex
/// other than the terminals gets an `in -> out` arc of capacity 1, and every
/// graph edge `{u, v}` becomes arcs `out(u) -> in(v)` and `out(v) -> in(u)`.
/// Flow leaves `out(s)` and enters `in(t)`.
pub(crate) struct SplitNetwork {
    arcs: Vec<Vec<Arc>>,
    source: usize,
    sink: usize,
    /// Position of the `out(u) -> in(v)` arc inside `arcs[out(u)]`, per edge.
    edge_arcs: Vec<(usize, usize, usize)>,
    initial_caps: Vec<Vec<u32>>,
}

impl SplitNetwork {
    pub fn new(graph: &CommGraph, s: usize, t: usize, edge_cap: u32) -> Self {
        let n = graph.n();
        let mut net = SplitNetwork {
            arcs: vec![Vec::new(); 2 * n],
            source: 2 * s + 1,
            sink: 2 * t,
            edge_arcs: Vec::with_capacity(2 * graph.edge_count()),
            initial_caps: Vec::new(),
        };
        for v in 0..n {
            if v != s && v != t {
                net.add_arc(2 * v, 2 * v + 1, 1);
            }
        }
        for u in 0..n {
            for &v in graph.neighbors(u) {
                let idx = net.add_arc(2 * u + 1, 2 * v, edge_cap);
                net.edge_arcs.push((u, v, idx));
            }
        }
        net.initial_caps = net.arcs.iter().map(|a| a.iter().map(|x| x.cap).collect()).collect();
        net
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let fwd = self.arcs[from].len();
        let bwd = self.arcs[to].len();
        self.arcs[from].push(Arc { to, cap, rev: bwd });
        self.arcs[to].push(Arc { to: from, cap: 0, rev: fwd });
        fwd
    }

    /// Augments along shortest residual paths until `limit` units flow or no
    /// path remains. Returns the flow value.
    pub fn max_flow(&mut self, limit: u32) -> u32 {
        let nodes = self.arcs.len();
        let mut flow = 0;
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
        let mut queue = VecDeque::new();
        while flow < limit {
            prev.iter_mut().for_each(|p| *p = None);
            queue.clear();
            queue.push_back(self.source);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for (idx, arc) in self.arcs[u].iter().enumerate() {
                    if arc.cap > 0 && arc.to != self.source && prev[arc.to].is_none() {
                        prev[arc.to] = Some((u, idx));
                        if arc.to == self.sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(arc.to);
                    }
                }
            }
            if !found {
                break;
            }
            let mut v = self.sink;
            while let Some((u, idx)) = prev[v] {
                let rev = self.arcs[u][idx].rev;
                self.arcs[u][idx].cap -= 1;
                self.arcs[v][rev].cap += 1;
                v = u;
                if v == self.source {
                    break;
                }
            }
            flow += 1;
        }
        flow
    }

    /// Directed graph edges `(u, v)` carrying one unit of flow after
    /// [`max_flow`](Self::max_flow). Opposite flows on the same edge cancel.
    pub fn edge_flows(&self) -> Vec<(usize, usize)> {
        let carried: HashSet<(usize, usize)> = self
            .edge_arcs
            .iter()
            .filter(|&&(u, _, idx)| self.arcs[2 * u + 1][idx].cap < self.initial_caps[2 * u + 1][idx])
            .map(|&(u, v, _)| (u, v))
            .collect();
        let mut out: Vec<_> = carried.iter().copied().filter(|&(u, v)| !carried.contains(&(v, u))).collect();
        out.sort_unstable();
        out
    }
}

/// Number of internally vertex-disjoint `s`-`t` paths, capped at `limit`.
pub(crate) fn disjoint_paths(graph: &CommGraph, s: usize, t: usize, limit: u32) -> u32 {
    SplitNetwork::new(graph, s, t, graph.n() as u32 + 1).max_flow(limit)
}
