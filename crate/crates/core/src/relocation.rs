//! Movement minimization: realize an augmentation set by moving robots while
//! keeping every existing communication link.
//!
//! Each augmentation edge `(i, j)` is closed by two cascaded relocations:
//! `i` steps toward `j`, then `j` toward `i`, each covering half of the gap.
//! A cascaded relocation moves one robot and then, in BFS order from it,
//! pulls every robot whose BFS-parent link got stretched beyond `h` back to
//! exactly `h` from the parent.

use serde::{Deserialize, Serialize};

use crate::augment::AugmentationSet;
use crate::connectivity::{is_k_connected, ConnectivityMethod};
use crate::error::{Error, Result};
use crate::geom::{bfs, build_comm_graph, graph_within, within, CommGraph, Instance, Point, EPS};

/// New positions for every robot together with the movement metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct RestorationPlan {
    pub original: Instance,
    pub final_positions: Vec<Point>,
    pub per_robot_displacement: Vec<f64>,
    /// Largest single displacement.
    pub minmax: f64,
    /// Sum of displacements.
    pub total: f64,
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    final_positions: Vec<Vec<f64>>,
    minmax: f64,
    total: f64,
    per_robot: Vec<f64>,
}

impl RestorationPlan {
    pub fn new(original: &Instance, final_positions: Vec<Point>) -> Result<Self> {
        if final_positions.len() != original.n() {
            return Err(Error::InvalidArgument(format!(
                "plan has {} positions for {} robots",
                final_positions.len(),
                original.n()
            )));
        }
        let per_robot_displacement: Vec<f64> =
            original.positions().iter().zip(&final_positions).map(|(a, b)| a.dist(b)).collect();
        let minmax = per_robot_displacement.iter().copied().fold(0.0, f64::max);
        let total = per_robot_displacement.iter().sum();
        Ok(RestorationPlan { original: original.clone(), final_positions, per_robot_displacement, minmax, total })
    }

    /// The plan that moves nobody.
    pub fn identity(original: &Instance) -> Self {
        RestorationPlan::new(original, original.positions().to_vec()).expect("same length")
    }

    pub fn final_instance(&self) -> Result<Instance> {
        self.original.with_positions(self.final_positions.clone())
    }

    pub fn to_json(&self) -> String {
        let dim = self.original.dim();
        let file = PlanFile {
            final_positions: self.final_positions.iter().map(|p| p.coords(dim).to_vec()).collect(),
            minmax: self.minmax,
            total: self.total,
            per_robot: self.per_robot_displacement.clone(),
        };
        serde_json::to_string_pretty(&file).expect("plan serializes")
    }

    /// Reads a plan file. Metrics are taken verbatim from the file so that
    /// [`verify_plan`] can check them.
    pub fn from_json(original: &Instance, text: &str) -> Result<Self> {
        let file: PlanFile = serde_json::from_str(text)?;
        let dim = original.dim();
        let final_positions = file
            .final_positions
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != dim {
                    return Err(Error::InvalidArgument(format!("plan position {i} has {} coordinates, expected {dim}", r.len())));
                }
                Point::from_slice(r).ok_or_else(|| Error::InvalidArgument(format!("plan position {i} is malformed")))
            })
            .collect::<Result<Vec<_>>>()?;
        if final_positions.len() != original.n() {
            return Err(Error::InvalidArgument(format!(
                "plan has {} positions for {} robots",
                final_positions.len(),
                original.n()
            )));
        }
        Ok(RestorationPlan {
            original: original.clone(),
            final_positions,
            per_robot_displacement: file.per_robot,
            minmax: file.minmax,
            total: file.total,
        })
    }
}

/// Work counters for one relocation, used to check the linear cost bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RelocateStats {
    /// Vertices dequeued by the BFS.
    pub bfs_visits: usize,
    /// Parent links inspected by the cascade.
    pub cascade_checks: usize,
    /// Robots pulled toward their parent.
    pub cascade_moves: usize,
    /// Extra sweeps needed to restore non-tree links.
    pub repair_passes: usize,
    pub repair_moves: usize,
    /// Links still longer than `h` after the repair budget ran out.
    pub unresolved: usize,
}

impl std::ops::AddAssign for RelocateStats {
    fn add_assign(&mut self, o: Self) {
        self.bfs_visits += o.bfs_visits;
        self.cascade_checks += o.cascade_checks;
        self.cascade_moves += o.cascade_moves;
        self.repair_passes += o.repair_passes;
        self.repair_moves += o.repair_moves;
        self.unresolved += o.unresolved;
    }
}

/// Cascaded relocation: moves robot `i` a distance `d` toward robot `j`, then
/// restores the links of `graph` in BFS order from `i`.
///
/// Robots outside the BFS component of `i` never move. Repairing only the
/// BFS-parent link can leave a non-tree link stretched; in that case the
/// robots are swept again in BFS order, each projected back within `h` of its
/// already-placed neighbors, for at most `n` sweeps.
pub fn relocate(
    positions: &mut [Point],
    h: f64,
    graph: &CommGraph,
    i: usize,
    j: usize,
    d: f64,
) -> Result<RelocateStats> {
    graph.check_vertex(i)?;
    graph.check_vertex(j)?;
    if positions.len() != graph.n() {
        return Err(Error::InvalidArgument("positions and graph sizes differ".into()));
    }
    if i == j {
        return Err(Error::InvalidArgument("cannot relocate a robot toward itself".into()));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("relocation distance must be finite and >= 0, got {d}")));
    }
    if positions[i] == positions[j] {
        return Err(Error::DegenerateDirection { i, j });
    }
    let mut stats = RelocateStats::default();
    if d == 0.0 {
        return Ok(stats);
    }

    let tree = bfs(graph, i)?;
    stats.bfs_visits = tree.order.len();
    positions[i] = positions[i].step_toward(&positions[j], d).expect("distinct points");

    for &v in &tree.order[1..] {
        let p = tree.parent[v].expect("non-root BFS vertex has a parent");
        stats.cascade_checks += 1;
        let gap = positions[v].dist(&positions[p]) - h;
        if gap > 0.0 {
            positions[v] = positions[v].step_toward(&positions[p], gap).expect("gap > 0 implies distinct");
            stats.cascade_moves += 1;
        }
    }

    if stretched_links(positions, h, graph, &tree.order) > 0 {
        repair(positions, h, graph, &tree.order, &mut stats);
    }
    Ok(stats)
}

fn stretched_links(positions: &[Point], h: f64, graph: &CommGraph, order: &[usize]) -> usize {
    order
        .iter()
        .flat_map(|&u| graph.neighbors(u).iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| u < v && !within(&positions[u], &positions[v], h))
        .count()
}

const PROJECTION_SWEEPS: usize = 64;

fn repair(positions: &mut [Point], h: f64, graph: &CommGraph, order: &[usize], stats: &mut RelocateStats) {
    let n = graph.n();
    let mut rank = vec![usize::MAX; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    for _ in 0..n.max(1) {
        stats.repair_passes += 1;
        for &v in &order[1..] {
            let earlier: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&u| rank[u] < rank[v]).collect();
            for _ in 0..PROJECTION_SWEEPS {
                let mut moved = false;
                for &u in &earlier {
                    let gap = positions[v].dist(&positions[u]) - h;
                    if gap > EPS / 2.0 {
                        positions[v] = positions[v].step_toward(&positions[u], gap).expect("gap > 0");
                        stats.repair_moves += 1;
                        moved = true;
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        if stretched_links(positions, h, graph, order) == 0 {
            log::debug!("relocation repair converged after {} passes", stats.repair_passes);
            return;
        }
    }
    stats.unresolved = stretched_links(positions, h, graph, order);
    log::warn!("relocation left {} links longer than h after {} repair passes", stats.unresolved, stats.repair_passes);
}

/// Bounded number of close attempts per augmentation edge; a single round
/// suffices unless a cascade drags the partner robot.
const CLOSE_ROUNDS: usize = 8;

/// Sequential cascaded relocation over the augmentation set, lightest edge
/// first. Each established edge joins the set of links later relocations
/// must preserve.
pub fn scr(instance: &Instance, aug: &AugmentationSet) -> Result<RestorationPlan> {
    scr_with_stats(instance, aug).map(|(plan, _)| plan)
}

pub fn scr_with_stats(instance: &Instance, aug: &AugmentationSet) -> Result<(RestorationPlan, RelocateStats)> {
    let h = instance.h();
    let mut positions = instance.positions().to_vec();
    let mut preserved = build_comm_graph(instance);
    let mut stats = RelocateStats::default();
    let n = instance.n();

    let mut edges = aug.edges.clone();
    edges.sort_by(|a, b| a.weight.total_cmp(&b.weight).then((a.i, a.j).cmp(&(b.i, b.j))));
    for e in &edges {
        let (i, j) = (e.i, e.j);
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidArgument(format!("augmentation edge ({i}, {j}) is invalid for {n} robots")));
        }
        for _ in 0..CLOSE_ROUNDS {
            let d = positions[i].dist(&positions[j]) - h;
            if d <= EPS {
                break;
            }
            stats += relocate(&mut positions, h, &preserved, i, j, d / 2.0)?;
            // Normally exactly d/2 remains; if the cascade moved j, close
            // whatever gap is left.
            let rest = positions[j].dist(&positions[i]) - h;
            if rest > 0.0 {
                stats += relocate(&mut positions, h, &preserved, j, i, rest)?;
            }
        }
        if !within(&positions[i], &positions[j], h) {
            log::warn!("augmentation edge ({i}, {j}) not established after {CLOSE_ROUNDS} rounds");
        }
        preserved.add_edge(i, j);
    }
    Ok((RestorationPlan::new(instance, positions)?, stats))
}

/// Outcome of [`verify_plan`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanReport {
    /// Links of `G(X)` longer than `h` at the final positions, with length.
    pub original_edge_violations: Vec<(usize, usize, f64)>,
    pub augmentation_edge_violations: Vec<(usize, usize, f64)>,
    /// `G(X*)` is k-connected.
    pub k_connected: bool,
    /// Disagreements between the stored and recomputed metrics.
    pub metric_errors: Vec<String>,
    /// Whether original-edge retention counts toward [`passed`](Self::passed).
    pub retention_required: bool,
}

impl PlanReport {
    pub fn passed(&self) -> bool {
        self.k_connected
            && self.metric_errors.is_empty()
            && self.augmentation_edge_violations.is_empty()
            && (!self.retention_required || self.original_edge_violations.is_empty())
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.k_connected {
            parts.push("final graph is not k-connected".to_string());
        }
        if self.retention_required && !self.original_edge_violations.is_empty() {
            parts.push(format!("{} original links broken", self.original_edge_violations.len()));
        }
        if !self.augmentation_edge_violations.is_empty() {
            parts.push(format!("{} augmentation links not established", self.augmentation_edge_violations.len()));
        }
        parts.extend(self.metric_errors.iter().cloned());
        if parts.is_empty() {
            "ok".into()
        } else {
            parts.join("; ")
        }
    }
}

const METRIC_TOL: f64 = 1e-9;

/// Checks a plan: the final graph is k-connected, the stored metrics match the
/// positions, and, when an augmentation set is given, every original link and
/// every augmentation link holds at the final positions.
pub fn verify_plan(instance: &Instance, plan: &RestorationPlan, aug: Option<&AugmentationSet>, k: usize) -> Result<PlanReport> {
    let mut report = PlanReport { retention_required: aug.is_some(), ..PlanReport::default() };
    let n = instance.n();
    if plan.final_positions.len() != n {
        report.metric_errors.push(format!("plan has {} positions for {n} robots", plan.final_positions.len()));
        return Ok(report);
    }
    let h = instance.h();
    let fin = &plan.final_positions;

    for (u, v) in build_comm_graph(instance).edges() {
        let len = fin[u].dist(&fin[v]);
        if len > h + EPS {
            report.original_edge_violations.push((u, v, len));
        }
    }
    if let Some(aug) = aug {
        for e in &aug.edges {
            let len = fin[e.i].dist(&fin[e.j]);
            if len > h + EPS {
                report.augmentation_edge_violations.push((e.i, e.j, len));
            }
        }
    }
    report.k_connected = is_k_connected(&graph_within(fin, h), k, ConnectivityMethod::Auto)?;

    let expected = RestorationPlan::new(instance, fin.clone())?;
    if plan.per_robot_displacement.len() != n {
        report.metric_errors.push("per-robot displacement length mismatch".into());
    } else if let Some(i) = (0..n)
        .find(|&i| (plan.per_robot_displacement[i] - expected.per_robot_displacement[i]).abs() > METRIC_TOL)
    {
        report.metric_errors.push(format!("displacement of robot {i} is inconsistent"));
    }
    if (plan.minmax - expected.minmax).abs() > METRIC_TOL {
        report.metric_errors.push(format!("minmax {} != {}", plan.minmax, expected.minmax));
    }
    if (plan.total - expected.total).abs() > METRIC_TOL * n as f64 {
        report.metric_errors.push(format!("total {} != {}", plan.total, expected.total));
    }
    if plan.minmax > plan.total + METRIC_TOL || plan.total > n as f64 * plan.minmax + METRIC_TOL * n as f64 {
        report.metric_errors.push("metrics violate minmax <= total <= n * minmax".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::edge_augmentation;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64) -> Point {
        Point::new2(x, y)
    }

    #[test]
    fn cascade_pulls_neighbor() {
        // Robot 0 at the origin linked to robot 3 one meter to its left;
        // stepping 0.5 toward robot 1 stretches (0, 3) by 0.5.
        let mut pos = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(5.0, 5.0), pt(-1.0, 0.0)];
        let g = CommGraph::from_edges(4, &[(0, 3)]).unwrap();
        let stats = relocate(&mut pos, 1.0, &g, 0, 1, 0.5).unwrap();
        assert_abs_diff_eq!(pos[0].0[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pos[3].0[0], -0.5, epsilon = 1e-12);
        assert_eq!(pos[1], pt(2.0, 0.0));
        assert_eq!(pos[2], pt(5.0, 5.0));
        assert_eq!(stats.cascade_moves, 1);
    }

    #[test]
    fn isolated_robot_moves_alone() {
        let mut pos = vec![pt(0.0, 0.0), pt(3.0, 0.0), pt(3.0, 0.5)];
        let g = CommGraph::from_edges(3, &[(1, 2)]).unwrap();
        relocate(&mut pos, 1.0, &g, 0, 1, 0.3).unwrap();
        assert_abs_diff_eq!(pos[0].0[0], 0.3, epsilon = 1e-12);
        assert_eq!(&pos[1..], &[pt(3.0, 0.0), pt(3.0, 0.5)]);
    }

    #[test]
    fn zero_distance_is_a_no_op() {
        let mut pos = vec![pt(0.0, 0.0), pt(3.0, 0.0)];
        let before = pos.clone();
        relocate(&mut pos, 1.0, &CommGraph::empty(2), 0, 1, 0.0).unwrap();
        assert_eq!(pos, before);
    }

    #[test]
    fn coincident_robots_are_rejected() {
        let mut pos = vec![pt(1.0, 1.0), pt(1.0, 1.0)];
        let err = relocate(&mut pos, 1.0, &CommGraph::empty(2), 0, 1, 0.5).unwrap_err();
        assert!(matches!(err, Error::DegenerateDirection { i: 0, j: 1 }));
        assert!(relocate(&mut pos, 1.0, &CommGraph::empty(2), 0, 0, 0.5).is_err());
        assert!(relocate(&mut pos, 1.0, &CommGraph::empty(2), 0, 5, 0.5).is_err());
    }

    #[test]
    fn collinear_scr_trace() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        let aug = edge_augmentation(&inst, 2).unwrap();
        let plan = scr(&inst, &aug).unwrap();
        assert_abs_diff_eq!(plan.final_positions[0].0[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(plan.final_positions[1].0[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(plan.final_positions[2].0[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(plan.minmax, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(plan.total, 1.0, epsilon = 1e-12);
        assert!(verify_plan(&inst, &plan, Some(&aug), 2).unwrap().passed());
    }

    #[test]
    fn empty_augmentation_is_identity() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]).unwrap();
        let aug = AugmentationSet::new(vec![], 2);
        let plan = scr(&inst, &aug).unwrap();
        assert_eq!(plan, RestorationPlan::identity(&inst));
        assert_eq!(plan.minmax, 0.0);
        let report = verify_plan(&inst, &plan, Some(&aug), 2).unwrap();
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn teleported_robot_is_flagged() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]).unwrap();
        let mut fin = inst.positions().to_vec();
        fin[2] = pt(50.0, 50.0);
        let plan = RestorationPlan::new(&inst, fin).unwrap();
        let report = verify_plan(&inst, &plan, Some(&AugmentationSet::new(vec![], 2)), 2).unwrap();
        assert!(!report.passed());
        assert_eq!(report.original_edge_violations.len(), 2);
        assert!(!report.k_connected);
    }

    #[test]
    fn tampered_metrics_are_flagged() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]).unwrap();
        let mut plan = RestorationPlan::identity(&inst);
        plan.minmax = 0.25;
        let report = verify_plan(&inst, &plan, None, 2).unwrap();
        assert!(!report.metric_errors.is_empty());
    }

    #[test]
    fn plan_json_round_trip() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        let plan = scr(&inst, &edge_augmentation(&inst, 2).unwrap()).unwrap();
        let back = RestorationPlan::from_json(&inst, &plan.to_json()).unwrap();
        assert_eq!(back, plan);
        let v: serde_json::Value = serde_json::from_str(&plan.to_json()).unwrap();
        for key in ["final_positions", "minmax", "total", "per_robot"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
