use super::*;
use crate::geom::{build_comm_graph, Point};
use crate::restore::eascr;

fn line3() -> Instance {
    Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()
}

/// Cardinalities of every index set, counted by plain enumeration of the
/// tuples each family ranges over.
fn enumerated_counts(n: usize) -> BTreeMap<Family, usize> {
    let r = 0..n;
    let mut counts = BTreeMap::new();
    let pairs = r.clone().flat_map(|i| r.clone().map(move |j| (i, j))).filter(|(i, j)| i != j).count();
    let mut quads = 0;
    let mut triples = 0;
    let mut internal = 0;
    for s in 0..n {
        for d in 0..n {
            for i in 0..n {
                if s != d {
                    triples += 1;
                    if i != s && i != d {
                        internal += 1;
                    }
                }
                for j in 0..n {
                    if s != d && i != j {
                        quads += 1;
                    }
                }
            }
        }
    }
    counts.insert(Family::Movement, n);
    counts.insert(Family::LinkLower, pairs);
    counts.insert(Family::LinkUpper, pairs);
    counts.insert(Family::FlowUsesLink, quads);
    counts.insert(Family::FlowConservation, triples);
    counts.insert(Family::VertexDisjoint, internal);
    counts
}

#[test]
fn small_model_sizes() {
    let model = build_qcp(&line3(), 2).unwrap();
    let binaries = model.binary_count();
    assert_eq!(binaries, 6 + 36);
    assert_eq!(model.variables.iter().filter(|v| v.name.starts_with("e_")).count(), 6);
    assert_eq!(model.variables.iter().filter(|v| v.name.starts_with("z_")).count(), 36);
    assert_eq!(model.variables.iter().filter(|v| v.name.starts_with("x_")).count(), 6);
    assert_eq!(model.variables.last().unwrap().name, "zstar");
    assert_eq!(model.family_counts(), enumerated_counts(3));
    assert_eq!(model.constraints.len(), 75);
}

#[test]
fn eight_robot_family_counts() {
    let pts: Vec<(f64, f64)> = (0..8).map(|i| ((i % 4) as f64 * 0.9, (i / 4) as f64 * 0.9)).collect();
    let inst = Instance::planar(1.0, &pts).unwrap();
    let model = build_qcp(&inst, 2).unwrap();
    let counts = model.family_counts();
    log::info!("n = 8 constraint families: {counts:?}");
    assert_eq!(counts, enumerated_counts(8));
    assert_eq!(model.binary_count(), 8 * 7 + 64 * 49);
}

#[test]
fn self_links_are_fixed() {
    let model = build_qcp(&line3(), 2).unwrap();
    for i in 0..3 {
        assert_eq!(model.link_var(i, i), LinkVar::FixedZero);
        assert_eq!(model.flow_var(0, 1, i, i), None);
    }
    assert_eq!(model.flow_var(1, 1, 0, 2), None);
    let LinkVar::Var(v) = model.link_var(2, 0) else { panic!() };
    assert_eq!(model.variables[v].name, "e_2_0");
    assert_eq!(model.variables[model.flow_var(2, 1, 0, 2).unwrap()].name, "z_2_1_0_2");
    assert_eq!(model.variables[model.coord_var(1, 1)].name, "x_1_1");
}

#[test]
fn infeasible_sizes_are_rejected() {
    assert!(matches!(build_qcp(&line3(), 3), Err(Error::Infeasible { .. })));
    assert!(matches!(fcr_lower_bound(&line3(), 3), Err(Error::Infeasible { .. })));
}

#[test]
fn export_round_trip_and_determinism() {
    let model = build_qcp(&line3(), 2).unwrap();
    let text = export_qcp(&model, ExportFormat::Text);
    assert_eq!(text, export_qcp(&build_qcp(&line3(), 2).unwrap(), ExportFormat::Text));
    assert_eq!(parse_qcp(&text).unwrap(), model);

    let inst3 = Instance::from_rows(0.8, &[vec![0.1, 0.2, 0.3], vec![1.0, -0.5, 2.0], vec![0.0, 0.0, 1.25]]).unwrap();
    let model3 = build_qcp(&inst3, 1).unwrap();
    assert_eq!(parse_qcp(&export_qcp(&model3, ExportFormat::Text)).unwrap(), model3);
    assert!("lp".parse::<ExportFormat>().is_err());
}

#[test]
fn parse_rejects_garbage() {
    assert!(parse_qcp("").is_err());
    let text = export_qcp(&build_qcp(&line3(), 2).unwrap(), ExportFormat::Text);
    let broken = text.replace("flow_cons", "flow_bogus");
    assert!(matches!(parse_qcp(&broken), Err(Error::Parse { .. })));
    let truncated: String = text.lines().take(20).collect::<Vec<_>>().join("\n");
    assert!(parse_qcp(&truncated).is_err());
}

#[test]
fn original_positions_of_connected_instance_are_feasible() {
    let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8), (0.5, -0.8)]).unwrap();
    let model = build_qcp(&inst, 2).unwrap();
    let report = check_feasible(&model, inst.positions(), AssignmentStrategy::MaxFlowWitness).unwrap();
    assert!(report.feasible, "{:?}", report.violations.first());
    assert_eq!(report.objective_zstar, 0.0);
}

#[test]
fn eascr_output_is_feasible() {
    let inst = line3();
    let (_, plan) = eascr(&inst, 2).unwrap();
    let model = build_qcp(&inst, 2).unwrap();
    let report = check_feasible(&model, &plan.final_positions, AssignmentStrategy::MaxFlowWitness).unwrap();
    assert!(report.feasible);
    assert!((report.objective_zstar - 0.25).abs() < 1e-12);
}

#[test]
fn broken_connectivity_fails_flow_families() {
    let inst = line3();
    let model = build_qcp(&inst, 2).unwrap();
    // The original path is only 1-connected.
    let report = check_feasible(&model, inst.positions(), AssignmentStrategy::MaxFlowWitness).unwrap();
    assert!(!report.feasible);
    assert_eq!(report.violated_families(), vec![Family::FlowConservation]);
    // Robot 2 pushed far away: no flow reaches it at all.
    let mut far = inst.positions().to_vec();
    far[2] = Point::new2(6.0, 0.0);
    let report = check_feasible(&model, &far, AssignmentStrategy::MaxFlowWitness).unwrap();
    assert!(report.violated_families().contains(&Family::FlowConservation));
}

#[test]
fn candidate_shape_is_checked() {
    let model = build_qcp(&line3(), 2).unwrap();
    assert!(check_feasible(&model, &line3().positions()[..2], AssignmentStrategy::MaxFlowWitness).is_err());
    let lifted = vec![Point::new3(0.0, 0.0, 1.0); 3];
    assert!(check_feasible(&model, &lifted, AssignmentStrategy::MaxFlowWitness).is_err());
}

#[test]
fn tampered_assignment_is_caught() {
    let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]).unwrap();
    let model = build_qcp(&inst, 2).unwrap();
    let mut values = derive_assignment(&model, inst.positions(), AssignmentStrategy::MaxFlowWitness).unwrap();
    assert!(evaluate(&model, &values).feasible);

    // A link indicator that disagrees with geometry violates the link family.
    let LinkVar::Var(e) = model.link_var(0, 2) else { panic!() };
    values[e] = 0.0;
    let fams = evaluate(&model, &values).violated_families();
    assert!(fams.contains(&Family::LinkLower));

    let mut values = derive_assignment(&model, inst.positions(), AssignmentStrategy::MaxFlowWitness).unwrap();
    values[model.zstar_var()] = -1.0;
    assert!(!evaluate(&model, &values).domain_violations.is_empty());

    let mut values = derive_assignment(&model, inst.positions(), AssignmentStrategy::MaxFlowWitness).unwrap();
    values[model.flow_var(0, 1, 0, 1).unwrap()] = 0.5;
    let report = evaluate(&model, &values);
    assert!(!report.feasible && !report.domain_violations.is_empty());
}

#[test]
fn lower_bound_examples() {
    assert_eq!(fcr_lower_bound(&line3(), 2).unwrap(), 0.5);
    let (_, plan) = eascr(&line3(), 2).unwrap();
    assert!((plan.minmax - 0.5).abs() < 1e-12);
    let square = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
    assert!(crate::connectivity::is_biconnected(&build_comm_graph(&square)));
    assert_eq!(fcr_lower_bound(&square, 2).unwrap(), 0.0);
}

#[test]
fn big_m_dominates_link_expressions() {
    let inst = line3();
    // max pair 2, bounding-box diagonal 2: D = 6, M = (6 + 1)^2.
    assert_eq!(big_m(&inst), 49.0);
}
