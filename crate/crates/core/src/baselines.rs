//! The two comparison algorithms: Net-Builder (NB) and Block Translation (BT).
//!
//! Both are reimplementations from their published descriptions; the
//! original reference code and constants are not reproduced.
//!
//! NB contracts the `k + 1` robots nearest the centroid into a clique by a
//! homothety about the centroid, then adds the remaining robots in order of
//! distance to the centroid, sliding each one toward the centroid just far
//! enough to see `k` already-placed robots.
//!
//! BT repeatedly takes a leaf block of the block-cut tree and moves it toward
//! its cut vertex until it gains a second attachment to the rest of the
//! graph, which merges it with its parent.

use std::collections::BTreeSet;

use crate::augment::check_feasible_k;
use crate::connectivity::{is_biconnected, is_connected};
use crate::error::{Error, Result};
use crate::geom::{build_comm_graph, graph_within, CommGraph, Instance, Point, EPS};
use crate::relocation::RestorationPlan;

/// Net-Builder.
pub fn net_builder(instance: &Instance, k: usize) -> Result<RestorationPlan> {
    let n = instance.n();
    check_feasible_k(n, k)?;
    let h = instance.h();
    let orig = instance.positions();
    let center = Point::centroid(orig).expect("n >= 1");

    let mut by_center: Vec<usize> = (0..n).collect();
    by_center.sort_by(|&a, &b| orig[a].dist(&center).total_cmp(&orig[b].dist(&center)).then(a.cmp(&b)));
    let (core, rest) = by_center.split_at(k + 1);

    let mut pos = orig.to_vec();
    let diameter = core
        .iter()
        .flat_map(|&a| core.iter().map(move |&b| (a, b)))
        .map(|(a, b)| orig[a].dist(&orig[b]))
        .fold(0.0, f64::max);
    let ratio = if diameter > h { h / diameter } else { 1.0 };
    for &v in core {
        pos[v] = center.add(&orig[v].sub(&center).scale(ratio));
    }

    let core_centroid = Point::centroid(core.iter().map(|&v| &pos[v])).expect("k + 1 >= 2");
    let mut placed: Vec<usize> = core.to_vec();
    for &v in rest {
        let others: Vec<Point> = placed.iter().map(|&u| pos[u]).collect();
        pos[v] = join_along(&pos[v], &center, &others, h, k)
            .or_else(|| join_along(&pos[v], &core_centroid, &others, h, k))
            // The core centroid is strictly within h of all k + 1 core robots.
            .unwrap_or(core_centroid);
        placed.push(v);
    }
    RestorationPlan::new(instance, pos)
}

/// First point on the segment `from -> to` within `h` of at least `k` of
/// `others`, if any.
fn join_along(from: &Point, to: &Point, others: &[Point], h: f64, k: usize) -> Option<Point> {
    let seg = to.sub(from);
    let len = seg.norm();
    if others.iter().filter(|p| from.dist(p) <= h + EPS).count() >= k {
        return Some(*from);
    }
    if len == 0.0 {
        return None;
    }
    let dir = seg.scale(1.0 / len);
    // Each placed robot covers an interval of the ray; sweep the entry points.
    let intervals: Vec<(f64, f64)> = others.iter().filter_map(|p| ray_ball(from, &dir, p, h)).collect();
    let mut entries: Vec<f64> = intervals.iter().map(|iv| iv.0.max(0.0)).filter(|&t| t <= len).collect();
    entries.sort_by(f64::total_cmp);
    entries
        .into_iter()
        .find(|&t| intervals.iter().filter(|iv| iv.0 <= t + EPS && t <= iv.1 + EPS).count() >= k)
        .map(|t| from.add(&dir.scale(t)))
}

/// Parameter interval `[t0, t1]` where `from + t * dir` (unit `dir`) lies
/// within distance `h` of `center`.
fn ray_ball(from: &Point, dir: &Point, center: &Point, h: f64) -> Option<(f64, f64)> {
    let w = from.sub(center);
    let b = w.dot(dir);
    let c = w.dot(&w) - h * h;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((-b - s, -b + s))
}

/// Blocks (maximal biconnected subgraphs and bridges) and cut vertices of a
/// connected graph, with the bipartite block/cut-vertex tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCutTree {
    /// Sorted vertex lists, ordered by smallest vertex.
    pub blocks: Vec<Vec<usize>>,
    pub cut_vertices: BTreeSet<usize>,
    /// `(block index, cut vertex)` tree edges.
    pub tree_edges: Vec<(usize, usize)>,
}

impl BlockCutTree {
    /// Blocks containing exactly one cut vertex, with that vertex.
    pub fn leaf_blocks(&self) -> Vec<(usize, usize)> {
        if self.blocks.len() < 2 {
            return Vec::new();
        }
        self.blocks
            .iter()
            .enumerate()
            .filter_map(|(b, verts)| {
                let cuts: Vec<usize> = verts.iter().copied().filter(|v| self.cut_vertices.contains(v)).collect();
                (cuts.len() == 1).then(|| (b, cuts[0]))
            })
            .collect()
    }
}

/// Block decomposition by DFS low-points (edge-stack variant).
pub fn block_cut_tree(graph: &CommGraph) -> Result<BlockCutTree> {
    let n = graph.n();
    if !is_connected(graph) {
        return Err(Error::Disconnected);
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut cut_vertices = BTreeSet::new();
    if n == 1 {
        blocks.push(vec![0]);
    } else {
        const UNSEEN: usize = usize::MAX;
        let mut disc = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut edge_stack: Vec<(usize, usize)> = Vec::new();
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, UNSEEN, 0)];
        let mut root_children = 0;
        disc[0] = timer;
        low[0] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (u, parent, pos) = *top;
            let nbrs = graph.neighbors(u);
            if pos < nbrs.len() {
                top.2 += 1;
                let v = nbrs[pos];
                if v == parent {
                    continue;
                }
                if disc[v] == UNSEEN {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    if u == 0 {
                        root_children += 1;
                    }
                    edge_stack.push((u, v));
                    stack.push((v, u, 0));
                } else if disc[v] < disc[u] {
                    low[u] = low[u].min(disc[v]);
                    edge_stack.push((u, v));
                }
            } else {
                stack.pop();
                if parent == UNSEEN {
                    continue;
                }
                low[parent] = low[parent].min(low[u]);
                if low[u] >= disc[parent] {
                    if parent != 0 {
                        cut_vertices.insert(parent);
                    }
                    let mut verts = BTreeSet::new();
                    while let Some((a, b)) = edge_stack.pop() {
                        verts.insert(a);
                        verts.insert(b);
                        if (a, b) == (parent, u) {
                            break;
                        }
                    }
                    blocks.push(verts.into_iter().collect());
                }
            }
        }
        if root_children > 1 {
            cut_vertices.insert(0);
        }
    }
    blocks.sort();
    let tree_edges = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, verts)| verts.iter().filter(|v| cut_vertices.contains(v)).map(move |&v| (b, v)))
        .collect();
    Ok(BlockCutTree { blocks, cut_vertices, tree_edges })
}

/// Block Translation for `k = 2`.
pub fn block_translation(instance: &Instance) -> Result<RestorationPlan> {
    let n = instance.n();
    check_feasible_k(n, 2)?;
    let h = instance.h();
    let mut pos = instance.positions().to_vec();
    let mut graph = build_comm_graph(instance);
    if !is_connected(&graph) {
        return Err(Error::Disconnected);
    }
    let mut tree = block_cut_tree(&graph)?;
    let mut iterations = 0;
    while !is_biconnected(&graph) {
        iterations += 1;
        if iterations > n {
            return Err(Error::Unsupported(format!("block translation did not converge after {n} iterations")));
        }
        let leaves = tree.leaf_blocks();
        // Blocks are sorted, so the first leaf has the smallest vertex.
        let &(leaf, cut) = leaves.first().expect("a tree with >= 2 blocks has leaves");
        let moving: Vec<usize> = tree.blocks[leaf].iter().copied().filter(|&v| v != cut).collect();
        let in_leaf: BTreeSet<usize> = tree.blocks[leaf].iter().copied().collect();
        let anchors: Vec<usize> = (0..n).filter(|v| !in_leaf.contains(v)).collect();

        if !translate_leaf(&mut pos, &graph, h, &moving, cut, &anchors) {
            contract_leaf(&mut pos, h, &moving, cut, &anchors);
        }
        let next_graph = graph_within(&pos, h);
        let next_tree = block_cut_tree(&next_graph)?;
        if next_tree.blocks.len() >= tree.blocks.len() && !is_biconnected(&next_graph) {
            log::warn!("block translation made no progress: {} blocks before, {} after", tree.blocks.len(), next_tree.blocks.len());
            return Err(Error::Unsupported("block translation failed to merge a leaf block".into()));
        }
        graph = next_graph;
        tree = next_tree;
    }
    RestorationPlan::new(instance, pos)
}

/// Rigid translation of the leaf (without its cut vertex) along the direction
/// from its centroid to the cut vertex, by the shortest step that brings some
/// leaf robot within `h` of a robot outside the leaf. Refused (returns false)
/// when that step would stretch a link to the cut vertex.
fn translate_leaf(pos: &mut [Point], graph: &CommGraph, h: f64, moving: &[usize], cut: usize, anchors: &[usize]) -> bool {
    let centroid = Point::centroid(moving.iter().map(|&v| &pos[v])).expect("leaf has a non-cut vertex");
    let to_cut = pos[cut].sub(&centroid);
    let len = to_cut.norm();
    if len == 0.0 {
        return false;
    }
    let dir = to_cut.scale(1.0 / len);

    // Links to the cut vertex hold while the step stays below each exit point.
    let cap = moving
        .iter()
        .filter(|&&v| graph.has_edge(v, cut))
        .filter_map(|&v| ray_ball(&pos[v], &dir, &pos[cut], h).map(|iv| iv.1))
        .fold(f64::INFINITY, f64::min);
    let step = moving
        .iter()
        .flat_map(|&a| anchors.iter().map(move |&b| (a, b)))
        .filter_map(|(a, b)| ray_ball(&pos[a], &dir, &pos[b], h))
        .filter(|iv| iv.1 >= 0.0)
        .map(|iv| iv.0.max(0.0))
        .fold(f64::INFINITY, f64::min);
    if !step.is_finite() || step > cap {
        return false;
    }
    for &v in moving {
        pos[v] = pos[v].add(&dir.scale(step));
    }
    true
}

/// Fallback: homothety of the leaf about its cut vertex with the largest
/// ratio that attaches a leaf robot to a robot outside the leaf. Shrinking
/// keeps every leaf link and every link to the cut vertex, and at ratio 0 the
/// leaf sits on the cut vertex, which has neighbors outside the leaf.
fn contract_leaf(pos: &mut [Point], h: f64, moving: &[usize], cut: usize, anchors: &[usize]) {
    let c = pos[cut];
    let mut best = 0.0f64;
    for &a in moving {
        let w = pos[a].sub(&c);
        for &b in anchors {
            let q = pos[b].sub(&c);
            // |ratio * w - q|^2 <= h^2, largest ratio in [0, 1].
            let aa = w.dot(&w);
            let bb = -2.0 * w.dot(&q);
            let cc = q.dot(&q) - h * h;
            if aa == 0.0 {
                continue;
            }
            let disc = bb * bb - 4.0 * aa * cc;
            if disc < 0.0 {
                continue;
            }
            let hi = (-bb + disc.sqrt()) / (2.0 * aa);
            let lo = (-bb - disc.sqrt()) / (2.0 * aa);
            if hi >= 0.0 && lo <= 1.0 {
                best = best.max(hi.min(1.0));
            }
        }
    }
    for &v in moving {
        pos[v] = c.add(&pos[v].sub(&c).scale(best));
    }
}
