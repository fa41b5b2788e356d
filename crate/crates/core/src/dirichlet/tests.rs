use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graph::gen;
use crate::npc::MetricTree;

fn unit_path(n: usize, eps: f64) -> Arc<MetricMeasureGraph> {
    let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Arc::new(MetricMeasureGraph::new(n, edges, vec![1.0; n], eps).unwrap())
}

fn scalar_boundary(values: &[(usize, f64)]) -> Vec<(usize, NpcPoint)> {
    values
        .iter()
        .map(|&(v, t)| (v, NpcPoint::scalar(t)))
        .collect()
}

#[test]
fn path_solve_matches_oracle_and_hand_computation() {
    let graph = unit_path(5, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));
    let domain = DomainSpec::from_boundary(5, &[0, 4]).unwrap();
    let boundary = scalar_boundary(&[(0, 0.0), (4, 1.0)]);

    let options = SolveOptions::with_tol(1e-12);
    let (solution, report) =
        solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
    assert!(report.converged);

    let oracle = scalar_laplacian_oracle(&graph, &domain, &[(0, 0.0), (4, 1.0)]).unwrap();
    for v in 0..5 {
        let got = solution.value(v).as_scalar().unwrap();
        assert!(
            (got - oracle[v]).abs() < 1e-9,
            "vertex {v}: {got} vs {}",
            oracle[v]
        );
    }

    // Independent flux computation: constant flux phi through the chain
    // gives u = (0, 2/9, 1/2, 7/9, 1) for these ball weights.
    for (v, expected) in [(1, 2.0 / 9.0), (2, 0.5), (3, 7.0 / 9.0)] {
        assert!((oracle[v] - expected).abs() < 1e-13);
    }
}

#[test]
fn oracle_trivial_cases() {
    let graph = unit_path(3, 1.5);
    let domain = DomainSpec::from_boundary(3, &[0, 2]).unwrap();
    let oracle = scalar_laplacian_oracle(&graph, &domain, &[(0, 0.0), (2, 2.0)]).unwrap();
    assert!((oracle[1] - 1.0).abs() < 1e-14);

    let constant = scalar_laplacian_oracle(&graph, &domain, &[(0, 3.0), (2, 3.0)]).unwrap();
    assert!(constant.iter().all(|&v| (v - 3.0).abs() < 1e-13));
}

#[test]
fn grid_center_is_the_mean_of_its_neighbors() {
    let build = gen::grid_graph(3, 3);
    let graph = Arc::new(
        MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 9], 1.1).unwrap(),
    );
    let domain = DomainSpec::from_boundary(9, &build.boundary_hint).unwrap();
    // boundary set to the x-coordinate
    let boundary: Vec<(usize, f64)> = build
        .boundary_hint
        .iter()
        .map(|&v| (v, build.positions[v].0))
        .collect();
    let solution = scalar_laplacian_oracle(&graph, &domain, &boundary).unwrap();
    // single interior vertex 4: harmonicity forces the weighted neighbor
    // mean; weights are symmetric here so it is the plain mean
    let form = DirichletForm::new(&graph);
    let mean: f64 = form
        .neighbors(4)
        .iter()
        .map(|&(y, c)| c * solution[y])
        .sum::<f64>()
        / form.weight_sum(4);
    assert!((solution[4] - mean).abs() < 1e-13);
    assert!((solution[4] - 1.0).abs() < 1e-12, "center of x in [0,2]");
}

#[test]
fn constant_boundary_solves_to_the_constant() {
    let graph = unit_path(6, 1.5);
    let target = Arc::new(NpcSpace::euclidean(2));
    let domain = DomainSpec::from_boundary(6, &[0, 5]).unwrap();
    let p = NpcPoint::Euclidean(vec![1.0, -2.0]);
    let boundary = vec![(0, p.clone()), (5, p.clone())];
    let (solution, report) = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::default(),
    )
    .unwrap();
    for v in 0..6 {
        assert_eq!(solution.value(v), &p);
    }
    assert_eq!(report.energy, 0.0);
}

#[test]
fn star_into_tripod_maps_hub_to_hub() {
    let build = gen::star_graph(3, 2);
    let graph = Arc::new(
        MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 7], 1.25).unwrap(),
    );
    let tree = MetricTree::tripod(1.0);
    let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
    let domain = DomainSpec::from_boundary(7, &build.boundary_hint).unwrap();
    let boundary: Vec<(usize, NpcPoint)> = build
        .boundary_hint
        .iter()
        .enumerate()
        .map(|(leg, &tip)| (tip, tree.point_on_edge(leg, 1.0).unwrap()))
        .collect();
    let (solution, _) = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::with_tol(1e-11),
    )
    .unwrap();
    let hub = tree.vertex_point(0);
    assert!(
        target.dist(solution.value(0), &hub).unwrap() < 1e-9,
        "hub should map to the branch point"
    );
}

#[test]
fn euclidean_solves_match_the_oracle_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..5 {
        let n = 10 + 6 * trial;
        let build = gen::random_connected_graph(n, n / 3, &mut rng);
        let measure: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let eps = gen::admissible_eps(n, &build.edges);
        let graph =
            Arc::new(MetricMeasureGraph::new(n, build.edges.clone(), measure, eps).unwrap());
        let domain = DomainSpec::from_boundary(n, &build.boundary_hint).unwrap();
        let boundary: Vec<(usize, NpcPoint)> = build
            .boundary_hint
            .iter()
            .map(|&v| {
                (
                    v,
                    NpcPoint::Euclidean(vec![
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ]),
                )
            })
            .collect();
        let target = Arc::new(NpcSpace::euclidean(2));
        let (solution, _) = solve_dirichlet_from_boundary(
            &graph,
            &target,
            &domain,
            &boundary,
            &SolveOptions::with_tol(1e-12),
        )
        .unwrap();
        let oracle = euclidean_dirichlet_oracle(&graph, &domain, &boundary).unwrap();
        for v in 0..n {
            let d = target.dist(solution.value(v), &oracle[v]).unwrap();
            assert!(d < 1e-8, "trial {trial} vertex {v}: {d}");
        }
    }
}

#[test]
fn sweeps_never_increase_energy() {
    let build = gen::grid_graph(4, 4);
    let graph = Arc::new(
        MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 16], 1.1).unwrap(),
    );
    let tree = MetricTree::tripod(1.0);
    let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
    let domain = DomainSpec::from_boundary(16, &build.boundary_hint).unwrap();
    let boundary: Vec<(usize, NpcPoint)> = build
        .boundary_hint
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, tree.point_on_edge(i % 3, 1.0).unwrap()))
        .collect();
    let (_, report) = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::default(),
    )
    .unwrap();
    for w in report.energy_per_sweep.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "energy rose: {} -> {}", w[0], w[1]);
    }
    assert!(report.optimality_residual < 1e-8);
}

#[test]
fn maximum_principle_is_exact_for_scalar_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..10 {
        let n = rng.random_range(8..30);
        let build = gen::random_connected_graph(n, n / 4, &mut rng);
        let eps = gen::admissible_eps(n, &build.edges);
        let graph =
            Arc::new(MetricMeasureGraph::new(n, build.edges.clone(), vec![1.0; n], eps).unwrap());
        let domain = DomainSpec::from_boundary(n, &build.boundary_hint).unwrap();
        let boundary: Vec<(usize, NpcPoint)> = build
            .boundary_hint
            .iter()
            .map(|&v| (v, NpcPoint::scalar(rng.random_range(-5.0..5.0))))
            .collect();
        let target = Arc::new(NpcSpace::euclidean(1));
        let (solution, _) = solve_dirichlet_from_boundary(
            &graph,
            &target,
            &domain,
            &boundary,
            &SolveOptions::default(),
        )
        .unwrap();
        let lo = boundary
            .iter()
            .map(|(_, p)| p.as_scalar().unwrap())
            .fold(f64::INFINITY, f64::min);
        let hi = boundary
            .iter()
            .map(|(_, p)| p.as_scalar().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        for v in 0..n {
            let value = solution.value(v).as_scalar().unwrap();
            assert!(
                value >= lo && value <= hi,
                "value {value} outside [{lo}, {hi}]"
            );
        }
    }
}

#[test]
fn single_vertex_perturbations_increase_energy() {
    let graph = unit_path(6, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));
    let domain = DomainSpec::from_boundary(6, &[0, 5]).unwrap();
    let boundary = scalar_boundary(&[(0, 0.0), (5, 2.0)]);
    let (solution, report) = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::with_tol(1e-12),
    )
    .unwrap();
    for x in domain.interior_vertices() {
        for delta in [-1e-3, 1e-3] {
            let mut probe = solution.clone();
            let bumped = solution.value(x).as_scalar().unwrap() + delta;
            probe
                .set_interior_value(x, NpcPoint::scalar(bumped))
                .unwrap();
            let energy = ks_energy(&probe, None).unwrap();
            assert!(
                energy >= report.energy - 1e-12,
                "perturbing {x} by {delta} lowered the energy"
            );
        }
    }
}

#[test]
fn uniqueness_for_scalar_and_tree_targets() {
    let graph = unit_path(5, 1.5);
    let domain = DomainSpec::from_boundary(5, &[0, 4]).unwrap();

    let target = Arc::new(NpcSpace::euclidean(1));
    let boundary = scalar_boundary(&[(0, 0.0), (4, 1.0)]);
    let report = uniqueness_check(
        &graph,
        &target,
        &domain,
        &boundary,
        4,
        &SolveOptions::with_tol(1e-12),
        7,
    )
    .unwrap();
    assert!(report.max_pairwise_sup <= 1e-8);

    // constant boundary: every restart is exactly the constant map
    let constant = scalar_boundary(&[(0, 2.0), (4, 2.0)]);
    let report = uniqueness_check(
        &graph,
        &target,
        &domain,
        &constant,
        3,
        &SolveOptions::default(),
        7,
    )
    .unwrap();
    assert_eq!(report.max_pairwise_sup, 0.0);

    let tree = MetricTree::tripod(1.0);
    let ttarget = Arc::new(NpcSpace::MetricTree(tree.clone()));
    let tboundary = vec![
        (0, tree.point_on_edge(0, 1.0).unwrap()),
        (4, tree.point_on_edge(1, 1.0).unwrap()),
    ];
    let report = uniqueness_check(
        &graph,
        &ttarget,
        &domain,
        &tboundary,
        5,
        &SolveOptions::with_tol(1e-12),
        11,
    )
    .unwrap();
    assert!(
        report.max_pairwise_sup <= 1e-8,
        "{}",
        report.max_pairwise_sup
    );
}

#[test]
fn solver_reports_divergence_with_residual() {
    let graph = unit_path(5, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));
    let domain = DomainSpec::from_boundary(5, &[0, 4]).unwrap();
    let boundary = scalar_boundary(&[(0, 0.0), (4, 1.0)]);
    let init =
        Mapping::from_boundary_barycenter(graph.clone(), target.clone(), domain.clone(), &boundary)
            .unwrap();
    let mut options = SolveOptions::with_tol(1e-15);
    options.max_sweeps = 1;
    match solve_dirichlet(&init, &options) {
        Err(Error::SolverDiverged { sweeps, residual }) => {
            assert_eq!(sweeps, 1);
            assert!(residual > 0.0);
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn solve_requires_a_boundary() {
    let graph = unit_path(4, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));
    let u = Mapping::constant(
        graph,
        target,
        DomainSpec::all_interior(4),
        NpcPoint::scalar(0.0),
    )
    .unwrap();
    assert!(matches!(
        solve_dirichlet(&u, &SolveOptions::default()),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn jacobi_mode_agrees_with_gauss_seidel() {
    let graph = unit_path(6, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));
    let domain = DomainSpec::from_boundary(6, &[0, 5]).unwrap();
    let boundary = scalar_boundary(&[(0, 0.0), (5, 1.0)]);
    let gs = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::with_tol(1e-12),
    )
    .unwrap()
    .0;
    let mut options = SolveOptions::with_tol(1e-12);
    options.mode = SweepMode::Jacobi;
    let jacobi = solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options)
        .unwrap()
        .0;
    assert!(gs.sup_distance(&jacobi).unwrap() < 1e-10);
}

#[test]
fn oscillation_decay_reports() {
    let graph = unit_path(9, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));

    // constant map: all diameters zero, no exponent
    let constant = Mapping::constant(
        graph.clone(),
        target.clone(),
        DomainSpec::all_interior(9),
        NpcPoint::scalar(1.0),
    )
    .unwrap();
    let report = oscillation_decay(&constant, 4, &[3.5, 2.5, 1.5]);
    assert!(report.entries.iter().all(|&(_, d)| d == 0.0));
    assert!(report.alpha.is_none());

    // linear map: diameters by direct enumeration over realized balls
    let values: Vec<NpcPoint> = (0..9).map(|i| NpcPoint::scalar(i as f64)).collect();
    let linear = Mapping::new(graph.clone(), target, values, DomainSpec::all_interior(9)).unwrap();
    let report = oscillation_decay(&linear, 4, &[3.5, 2.5, 1.5]);
    assert_eq!(report.entries[0].1, 6.0);
    assert_eq!(report.entries[1].1, 4.0);
    assert_eq!(report.entries[2].1, 2.0);
    let alpha = report.alpha.unwrap();
    assert!(alpha > 0.0, "diameters shrink with the radius");
}
