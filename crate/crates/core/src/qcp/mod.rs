//! The exact quadratically constrained model of the restoration problem.
//!
//! Variables: a binary link indicator `e[i][j]` per ordered pair `i != j`,
//! a binary flow indicator `z[s][d][i][j]` per ordered terminal pair `s != d`
//! and ordered pair `i != j`, the new coordinates `x[i][a]`, and the epigraph
//! variable `zstar` bounding every squared displacement.
//!
//! Constraint families:
//! - movement: `|x*_i - x_i|^2 <= zstar`
//! - link indicator (two sides): `-M e_ij <= |x*_i - x*_j|^2 - h^2 <= M (1 - e_ij)`
//! - flow uses link: `z_sdij <= e_ij`
//! - flow conservation: out - in = `k` at `s`, `-k` at `d`, 0 elsewhere
//! - vertex-disjointness: out-flow of every internal vertex is at most 1
//!
//! The self indicator `e[i][i]` is fixed to zero and carries no variable,
//! and so is `z[s][d][i][i]`.
//!
//! Nothing here solves the model. [`export_qcp`] writes it for an external
//! solver, [`check_feasible`] evaluates a candidate solution against every
//! constraint, and [`fcr_lower_bound`] gives a certified lower bound on the
//! optimal max displacement.

mod text;

use std::collections::BTreeMap;
use std::fmt;

pub use text::{export_qcp, parse_qcp, ExportFormat};

use crate::augment::{bottleneck_threshold, check_feasible_k};
use crate::error::{Error, Result};
use crate::flow::SplitNetwork;
use crate::geom::{graph_within, within, Instance, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Movement,
    LinkLower,
    LinkUpper,
    FlowUsesLink,
    FlowConservation,
    VertexDisjoint,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Movement,
        Family::LinkLower,
        Family::LinkUpper,
        Family::FlowUsesLink,
        Family::FlowConservation,
        Family::VertexDisjoint,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Movement => "move",
            Family::LinkLower => "link_lo",
            Family::LinkUpper => "link_hi",
            Family::FlowUsesLink => "flow_link",
            Family::FlowConservation => "flow_cons",
            Family::VertexDisjoint => "disjoint",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// `sum(linear) + sum(quadratic) <sense> rhs`, over variable indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub family: Family,
    /// The index tuple that instantiated the constraint, e.g. `[s, d, i]`.
    pub indices: Vec<usize>,
    pub linear: Vec<(usize, f64)>,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    fn lhs(&self, values: &[f64]) -> f64 {
        let lin: f64 = self.linear.iter().map(|&(v, c)| c * values[v]).sum();
        let quad: f64 = self.quadratic.iter().map(|&(a, b, c)| c * values[a] * values[b]).sum();
        lin + quad
    }

    /// Amount by which the constraint is violated (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Link indicator lookup result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkVar {
    Var(usize),
    /// `e[i][i]`, fixed to 0.
    FixedZero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QcpModel {
    pub n: usize,
    pub dim: usize,
    pub h: f64,
    pub k: usize,
    pub big_m: f64,
    /// Original robot positions.
    pub origin: Vec<Point>,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl QcpModel {
    fn pairs(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Rank of ordered pair `(a, b)`, `a != b`, in row-major order.
    fn pair_rank(&self, a: usize, b: usize) -> usize {
        a * (self.n - 1) + if b < a { b } else { b - 1 }
    }

    pub fn link_var(&self, i: usize, j: usize) -> LinkVar {
        if i == j {
            LinkVar::FixedZero
        } else {
            LinkVar::Var(self.pair_rank(i, j))
        }
    }

    pub fn flow_var(&self, s: usize, d: usize, i: usize, j: usize) -> Option<usize> {
        (s != d && i != j).then(|| self.pairs() + self.pair_rank(s, d) * self.pairs() + self.pair_rank(i, j))
    }

    pub fn coord_var(&self, i: usize, axis: usize) -> usize {
        self.pairs() * (1 + self.pairs()) + i * self.dim + axis
    }

    pub fn zstar_var(&self) -> usize {
        self.variables.len() - 1
    }

    pub fn binary_count(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn family_counts(&self) -> BTreeMap<Family, usize> {
        let mut counts = BTreeMap::new();
        for c in &self.constraints {
            *counts.entry(c.family).or_insert(0) += 1;
        }
        counts
    }
}

/// `M = (D + h)^2` with `D` the largest pairwise distance plus twice the
/// bounding-box diagonal of the original positions.
pub fn big_m(instance: &Instance) -> f64 {
    let p = instance.positions();
    let n = p.len();
    let mut max_pair = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            max_pair = max_pair.max(p[i].dist(&p[j]));
        }
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for q in p {
        for a in 0..3 {
            lo[a] = lo[a].min(q.0[a]);
            hi[a] = hi[a].max(q.0[a]);
        }
    }
    let diag = Point([hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]]).norm();
    let d = max_pair + 2.0 * diag;
    (d + instance.h()).powi(2)
}

/// Instantiates every variable and constraint family for the instance.
pub fn build_qcp(instance: &Instance, k: usize) -> Result<QcpModel> {
    let n = instance.n();
    check_feasible_k(n, k)?;
    let dim = instance.dim();
    let h = instance.h();
    let mut model = QcpModel {
        n,
        dim,
        h,
        k,
        big_m: big_m(instance),
        origin: instance.positions().to_vec(),
        variables: Vec::new(),
        constraints: Vec::new(),
    };
    let binary = |name: String| Variable { name, kind: VarKind::Binary, lower: 0.0, upper: 1.0 };
    let ordered = |n: usize| (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)));

    for (i, j) in ordered(n) {
        model.variables.push(binary(format!("e_{i}_{j}")));
    }
    for (s, d) in ordered(n) {
        for (i, j) in ordered(n) {
            model.variables.push(binary(format!("z_{s}_{d}_{i}_{j}")));
        }
    }
    for i in 0..n {
        for a in 0..dim {
            model.variables.push(Variable {
                name: format!("x_{i}_{a}"),
                kind: VarKind::Continuous,
                lower: f64::NEG_INFINITY,
                upper: f64::INFINITY,
            });
        }
    }
    model.variables.push(Variable { name: "zstar".into(), kind: VarKind::Continuous, lower: 0.0, upper: f64::INFINITY });
    let zstar = model.zstar_var();
    debug_assert_eq!(model.coord_var(n - 1, dim - 1) + 1, zstar);

    let link = |m: &QcpModel, i: usize, j: usize| match m.link_var(i, j) {
        LinkVar::Var(v) => v,
        LinkVar::FixedZero => unreachable!("i != j"),
    };
    let mut cons = Vec::new();

    // |x*_i - x_i|^2 - zstar <= 0, expanded.
    for i in 0..n {
        let x = model.origin[i].coords(dim).to_vec();
        let mut linear: Vec<(usize, f64)> =
            (0..dim).filter(|&a| x[a] != 0.0).map(|a| (model.coord_var(i, a), -2.0 * x[a])).collect();
        linear.push((zstar, -1.0));
        let quadratic = (0..dim).map(|a| (model.coord_var(i, a), model.coord_var(i, a), 1.0)).collect();
        let norm_sq: f64 = x.iter().map(|c| c * c).sum();
        cons.push(Constraint { family: Family::Movement, indices: vec![i], linear, quadratic, sense: Sense::Le, rhs: 0.0 - norm_sq });
    }

    // |x*_i - x*_j|^2 + M e_ij >= h^2  and  |x*_i - x*_j|^2 + M e_ij <= M + h^2.
    let m = model.big_m;
    for (i, j) in ordered(n) {
        let quadratic: Vec<(usize, usize, f64)> = (0..dim)
            .flat_map(|a| {
                let (xi, xj) = (model.coord_var(i, a), model.coord_var(j, a));
                [(xi, xi, 1.0), (xj, xj, 1.0), (xi, xj, -2.0)]
            })
            .collect();
        let e = link(&model, i, j);
        cons.push(Constraint {
            family: Family::LinkLower,
            indices: vec![i, j],
            linear: vec![(e, m)],
            quadratic: quadratic.clone(),
            sense: Sense::Ge,
            rhs: h * h,
        });
        cons.push(Constraint {
            family: Family::LinkUpper,
            indices: vec![i, j],
            linear: vec![(e, m)],
            quadratic,
            sense: Sense::Le,
            rhs: m + h * h,
        });
    }

    // z_sdij - e_ij <= 0.
    for (s, d) in ordered(n) {
        for (i, j) in ordered(n) {
            let z = model.flow_var(s, d, i, j).expect("s != d, i != j");
            cons.push(Constraint {
                family: Family::FlowUsesLink,
                indices: vec![s, d, i, j],
                linear: vec![(z, 1.0), (link(&model, i, j), -1.0)],
                quadratic: vec![],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }

    let kf = k as f64;
    for (s, d) in ordered(n) {
        for i in 0..n {
            let mut linear = Vec::with_capacity(2 * (n - 1));
            for j in (0..n).filter(|&j| j != i) {
                linear.push((model.flow_var(s, d, i, j).expect("i != j"), 1.0));
            }
            for j in (0..n).filter(|&j| j != i) {
                linear.push((model.flow_var(s, d, j, i).expect("i != j"), -1.0));
            }
            let rhs = if i == s {
                kf
            } else if i == d {
                -kf
            } else {
                0.0
            };
            cons.push(Constraint { family: Family::FlowConservation, indices: vec![s, d, i], linear, quadratic: vec![], sense: Sense::Eq, rhs });
        }
    }

    for (s, d) in ordered(n) {
        for i in (0..n).filter(|&i| i != s && i != d) {
            let linear = (0..n).filter(|&j| j != i).map(|j| (model.flow_var(s, d, i, j).expect("i != j"), 1.0)).collect();
            cons.push(Constraint { family: Family::VertexDisjoint, indices: vec![s, d, i], linear, quadratic: vec![], sense: Sense::Le, rhs: 1.0 });
        }
    }

    model.constraints = cons;
    Ok(model)
}

/// How [`check_feasible`] fills in the flow variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AssignmentStrategy {
    /// `k` internally vertex-disjoint paths per terminal pair from a unit
    /// max-flow on the candidate's communication graph.
    #[default]
    MaxFlowWitness,
}

/// Absolute tolerance on constraint residuals.
pub const CONSTRAINT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub family: Family,
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Variables outside their bounds or binaries not exactly 0/1, by name.
    pub domain_violations: Vec<(String, f64)>,
    /// Largest squared displacement of the candidate.
    pub objective_zstar: f64,
}

impl FeasibilityReport {
    pub fn violated_families(&self) -> Vec<Family> {
        let mut fams: Vec<Family> = self.violations.iter().map(|v| v.family).collect();
        fams.sort();
        fams.dedup();
        fams
    }
}

/// Full variable assignment derived from candidate positions: link
/// indicators from geometry, flow indicators from the chosen strategy.
pub fn derive_assignment(model: &QcpModel, candidate: &[Point], strategy: AssignmentStrategy) -> Result<Vec<f64>> {
    let n = model.n;
    if candidate.len() != n {
        return Err(Error::InvalidArgument(format!("candidate has {} positions, model has {n}", candidate.len())));
    }
    if model.dim == 2 && candidate.iter().any(|p| p.0[2] != 0.0) {
        return Err(Error::InvalidArgument("candidate has 3D coordinates for a 2D model".into()));
    }
    let mut values = vec![0.0; model.variables.len()];
    for i in 0..n {
        for a in 0..model.dim {
            values[model.coord_var(i, a)] = candidate[i].0[a];
        }
        for j in (0..n).filter(|&j| j != i) {
            if within(&candidate[i], &candidate[j], model.h) {
                if let LinkVar::Var(v) = model.link_var(i, j) {
                    values[v] = 1.0;
                }
            }
        }
    }
    values[model.zstar_var()] = candidate.iter().zip(&model.origin).map(|(a, b)| a.dist_sq(b)).fold(0.0, f64::max);

    match strategy {
        AssignmentStrategy::MaxFlowWitness => {
            let graph = graph_within(candidate, model.h);
            for s in 0..n {
                for d in (0..n).filter(|&d| d != s) {
                    let mut net = SplitNetwork::new(&graph, s, d, 1);
                    net.max_flow(model.k as u32);
                    for (i, j) in net.edge_flows() {
                        values[model.flow_var(s, d, i, j).expect("graph edges join distinct vertices")] = 1.0;
                    }
                }
            }
        }
    }
    Ok(values)
}

/// Evaluates every constraint of `model` at the given assignment.
pub fn evaluate(model: &QcpModel, values: &[f64]) -> FeasibilityReport {
    let violations: Vec<Violation> = model
        .constraints
        .iter()
        .filter_map(|c| {
            let r = c.violation(values);
            (r > CONSTRAINT_TOL).then(|| Violation { family: c.family, indices: c.indices.clone(), residual: r })
        })
        .collect();
    let domain_violations: Vec<(String, f64)> = model
        .variables
        .iter()
        .zip(values)
        .filter(|&(var, &x)| {
            let bad_binary = var.kind == VarKind::Binary && x != 0.0 && x != 1.0;
            bad_binary || x < var.lower - CONSTRAINT_TOL || x > var.upper + CONSTRAINT_TOL
        })
        .map(|(var, &x)| (var.name.clone(), x))
        .collect();
    FeasibilityReport {
        feasible: violations.is_empty() && domain_violations.is_empty(),
        violations,
        domain_violations,
        objective_zstar: values[model.zstar_var()],
    }
}

/// Derives a full assignment from candidate positions and checks it.
pub fn check_feasible(model: &QcpModel, candidate: &[Point], strategy: AssignmentStrategy) -> Result<FeasibilityReport> {
    let values = derive_assignment(model, candidate, strategy)?;
    Ok(evaluate(model, &values))
}

/// Certified lower bound on the optimal max displacement:
/// `max(0, (t* - h) / 2)` with `t*` the bottleneck threshold.
///
/// If every robot moves at most `mu`, any link of the final graph joins
/// robots that started at most `h + 2 mu` apart. The final graph is therefore
/// a subgraph of the `(h + 2 mu)`-threshold graph of the original positions,
/// which must then be k-connected, so `h + 2 mu >= t*`.
pub fn fcr_lower_bound(instance: &Instance, k: usize) -> Result<f64> {
    let t = bottleneck_threshold(instance, k)?;
    Ok(((t - instance.h()) / 2.0).max(0.0))
}

#[cfg(test)]
mod tests;
