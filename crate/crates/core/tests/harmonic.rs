//! Cross-module behavior of solved (harmonic) maps: distance pullbacks are
//! weakly subharmonic, the strengthened lower bound holds, Poincare probe
//! constants grow with the domain, and constrained flows land on the
//! Dirichlet solution for non-flat targets.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use harmap::analysis::DirichletForm;
use harmap::dirichlet::{solve_dirichlet_from_boundary, uniqueness_check, SolveOptions};
use harmap::energy::{distance_pullback, Mapping};
use harmap::flow::{run_flow, FlowOptions};
use harmap::graph::{gen, poincare_constant, DomainSpec, MetricMeasureGraph};
use harmap::npc::{MetricTree, NpcPoint, NpcSpace};

fn unit_path(n: usize, eps: f64) -> Arc<MetricMeasureGraph> {
    let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Arc::new(MetricMeasureGraph::new(n, edges, vec![1.0; n], eps).unwrap())
}

/// Random points in the geodesic hull of the solved map's image.
fn hull_probes(u: &Mapping, count: usize, rng: &mut ChaCha8Rng) -> Vec<NpcPoint> {
    let values = u.values();
    (0..count)
        .map(|_| {
            let a = &values[rng.random_range(0..values.len())];
            let b = &values[rng.random_range(0..values.len())];
            let t: f64 = rng.random_range(0.0..=1.0);
            u.target().geodesic_point_unchecked(a, b, t)
        })
        .collect()
}

struct SolvedProblem {
    name: &'static str,
    map: Mapping,
    form: DirichletForm,
}

/// A spread of solved problems across the implemented target kinds, all on
/// sources whose interior ball measures dominate their neighbors'.
fn solved_problems() -> Vec<SolvedProblem> {
    let options = SolveOptions::with_tol(1e-12);
    let mut out = Vec::new();

    // path into the real line
    {
        let graph = unit_path(9, 1.5);
        let target = Arc::new(NpcSpace::euclidean(1));
        let domain = DomainSpec::from_boundary(9, &[0, 8]).unwrap();
        let boundary = vec![(0, NpcPoint::scalar(0.0)), (8, NpcPoint::scalar(1.0))];
        let form = DirichletForm::new(&graph);
        let (map, _) =
            solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
        out.push(SolvedProblem {
            name: "path-into-line",
            map,
            form,
        });
    }

    // grid into the plane (coordinates as boundary data)
    {
        let build = gen::grid_graph(5, 5);
        let graph = Arc::new(
            MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 25], 1.1).unwrap(),
        );
        let target = Arc::new(NpcSpace::euclidean(2));
        let domain = DomainSpec::from_boundary(25, &build.boundary_hint).unwrap();
        let boundary: Vec<(usize, NpcPoint)> = build
            .boundary_hint
            .iter()
            .map(|&v| {
                let (x, y) = build.positions[v];
                (v, NpcPoint::Euclidean(vec![x, y]))
            })
            .collect();
        let form = DirichletForm::new(&graph);
        let (map, _) =
            solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
        out.push(SolvedProblem {
            name: "grid-into-plane",
            map,
            form,
        });
    }

    // short star into the tripod
    {
        let build = gen::star_graph(3, 1);
        let graph = Arc::new(
            MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 4], 1.5).unwrap(),
        );
        let tree = MetricTree::tripod(1.0);
        let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
        let domain = DomainSpec::from_boundary(4, &build.boundary_hint).unwrap();
        let boundary: Vec<(usize, NpcPoint)> = build
            .boundary_hint
            .iter()
            .enumerate()
            .map(|(leg, &tip)| (tip, tree.point_on_edge(leg, 1.0).unwrap()))
            .collect();
        let form = DirichletForm::new(&graph);
        let (map, _) =
            solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
        out.push(SolvedProblem {
            name: "star-into-tripod",
            map,
            form,
        });
    }

    // grid into the tripod with three-sector boundary data
    {
        let build = gen::grid_graph(6, 6);
        let graph = Arc::new(
            MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 36], 1.1).unwrap(),
        );
        let tree = MetricTree::tripod(1.0);
        let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
        let domain = DomainSpec::from_boundary(36, &build.boundary_hint).unwrap();
        let center = (2.5, 2.5);
        let boundary: Vec<(usize, NpcPoint)> = build
            .boundary_hint
            .iter()
            .map(|&v| {
                let (x, y) = build.positions[v];
                let angle = (y - center.1).atan2(x - center.0) + std::f64::consts::PI;
                let sector = ((angle / (std::f64::consts::TAU / 3.0)) as usize).min(2);
                (v, tree.point_on_edge(sector, 1.0).unwrap())
            })
            .collect();
        let form = DirichletForm::new(&graph);
        let (map, _) =
            solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
        out.push(SolvedProblem {
            name: "grid-into-tripod-sectors",
            map,
            form,
        });
    }

    // path into the hyperbolic plane
    {
        let graph = unit_path(7, 1.5);
        let target = Arc::new(NpcSpace::HyperbolicPlane);
        let domain = DomainSpec::from_boundary(7, &[0, 6]).unwrap();
        let boundary = vec![
            (0, NpcPoint::Hyperbolic([1.0, 0.0, 0.0])),
            (6, NpcPoint::Hyperbolic([2.0f64.cosh(), 2.0f64.sinh(), 0.0])),
        ];
        let form = DirichletForm::new(&graph);
        let (map, _) =
            solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
        out.push(SolvedProblem {
            name: "path-into-hyperbolic",
            map,
            form,
        });
    }

    // small grid into tripod x line
    {
        let build = gen::grid_graph(4, 4);
        let graph = Arc::new(
            MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 16], 1.1).unwrap(),
        );
        let tree = MetricTree::tripod(1.0);
        let target = Arc::new(NpcSpace::Product(vec![
            NpcSpace::MetricTree(tree.clone()),
            NpcSpace::euclidean(1),
        ]));
        let domain = DomainSpec::from_boundary(16, &build.boundary_hint).unwrap();
        let boundary: Vec<(usize, NpcPoint)> = build
            .boundary_hint
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (x, _) = build.positions[v];
                (
                    v,
                    NpcPoint::Product(vec![
                        tree.point_on_edge(i % 3, 1.0).unwrap(),
                        NpcPoint::scalar(x),
                    ]),
                )
            })
            .collect();
        let form = DirichletForm::new(&graph);
        let (map, _) =
            solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
        out.push(SolvedProblem {
            name: "grid-into-tripod-x-line",
            map,
            form,
        });
    }

    out
}

#[test]
fn distance_pullbacks_of_solved_maps_are_weakly_subharmonic() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for problem in solved_problems() {
        let probes = hull_probes(&problem.map, 10, &mut rng);
        for y0 in &probes {
            let squared = distance_pullback(&problem.map, y0, 2).unwrap();
            let report = problem
                .form
                .check_weak_subharmonic(&squared, problem.map.domain(), 1e-9);
            assert!(
                report.min_defect >= -1e-9,
                "{}: squared pullback defect {}",
                problem.name,
                report.min_defect
            );

            let plain = distance_pullback(&problem.map, y0, 1).unwrap();
            let report = problem
                .form
                .check_weak_subharmonic(&plain, problem.map.domain(), 1e-9);
            assert!(
                report.min_defect >= -1e-9,
                "{}: distance pullback defect {}",
                problem.name,
                report.min_defect
            );
        }
    }
}

#[test]
fn strengthened_subharmonicity_gap_holds_on_solved_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for problem in solved_problems() {
        let probes = hull_probes(&problem.map, 10, &mut rng);
        for y0 in &probes {
            let gaps = problem
                .form
                .strengthened_subharmonicity_gap(&problem.map, y0)
                .unwrap();
            for (vertex, gap) in gaps {
                assert!(
                    gap >= -1e-9,
                    "{}: gap {gap} at vertex {vertex}",
                    problem.name
                );
            }
        }
    }
}

#[test]
fn strengthened_gap_scales_quartically_with_the_target_metric() {
    // doubling the target metric multiplies both sides by 4
    let graph = unit_path(7, 1.5);
    let target = Arc::new(NpcSpace::euclidean(1));
    let domain = DomainSpec::from_boundary(7, &[0, 6]).unwrap();
    let options = SolveOptions::with_tol(1e-12);
    let form = DirichletForm::new(&graph);

    let boundary = vec![(0, NpcPoint::scalar(0.0)), (6, NpcPoint::scalar(1.0))];
    let (u1, _) =
        solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &options).unwrap();
    let boundary2 = vec![(0, NpcPoint::scalar(0.0)), (6, NpcPoint::scalar(2.0))];
    let (u2, _) =
        solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary2, &options).unwrap();

    let y0 = NpcPoint::scalar(0.0);
    let g1 = form.strengthened_subharmonicity_gap(&u1, &y0).unwrap();
    let g2 = form.strengthened_subharmonicity_gap(&u2, &y0).unwrap();
    for ((_, a), (_, b)) in g1.iter().zip(&g2) {
        assert!((b - 4.0 * a).abs() < 1e-9, "{b} vs 4*{a}");
        assert!(*a >= -1e-12);
    }
}

#[test]
fn poincare_constant_examples_and_monotonicity() {
    let graph = unit_path(7, 1.5);
    let form = DirichletForm::new(&graph);

    let small = DomainSpec::from_interior(7, &[2, 3, 4]).unwrap();
    let large = DomainSpec::from_interior(7, &[1, 2, 3, 4, 5]).unwrap();
    let c_small = poincare_constant(&graph, &small, &form);
    let c_large = poincare_constant(&graph, &large, &form);
    assert!(c_small.is_finite() && c_small > 0.0);
    assert!(
        c_large >= c_small - 1e-13,
        "probe constant should grow with the domain: {c_small} vs {c_large}"
    );

    // the hat probe at the center realizes 1/sqrt(sum of its weights)
    let hat_ratio = 1.0 / form.weight_sum(3).sqrt();
    assert!(c_small >= hat_ratio - 1e-13);
}

#[test]
fn uniqueness_on_hyperbolic_and_product_targets() {
    let graph = unit_path(5, 1.5);
    let domain = DomainSpec::from_boundary(5, &[0, 4]).unwrap();
    let options = SolveOptions::with_tol(1e-12);

    let target = Arc::new(NpcSpace::HyperbolicPlane);
    let boundary = vec![
        (0, NpcPoint::Hyperbolic([1.0, 0.0, 0.0])),
        (4, NpcPoint::Hyperbolic([1.5f64.cosh(), 0.0, 1.5f64.sinh()])),
    ];
    let report = uniqueness_check(&graph, &target, &domain, &boundary, 4, &options, 5).unwrap();
    assert!(
        report.max_pairwise_sup <= 1e-8,
        "{}",
        report.max_pairwise_sup
    );

    let tree = MetricTree::tripod(1.0);
    let target = Arc::new(NpcSpace::Product(vec![
        NpcSpace::MetricTree(tree.clone()),
        NpcSpace::euclidean(1),
    ]));
    let boundary = vec![
        (
            0,
            NpcPoint::Product(vec![
                tree.point_on_edge(0, 1.0).unwrap(),
                NpcPoint::scalar(0.0),
            ]),
        ),
        (
            4,
            NpcPoint::Product(vec![
                tree.point_on_edge(1, 1.0).unwrap(),
                NpcPoint::scalar(1.0),
            ]),
        ),
    ];
    let report = uniqueness_check(&graph, &target, &domain, &boundary, 4, &options, 5).unwrap();
    assert!(
        report.max_pairwise_sup <= 1e-8,
        "{}",
        report.max_pairwise_sup
    );
}

#[test]
fn constrained_flow_agrees_with_the_solver_on_tree_targets() {
    let build = gen::star_graph(3, 1);
    let graph = Arc::new(
        MetricMeasureGraph::new(build.vertex_count, build.edges, vec![1.0; 4], 1.5).unwrap(),
    );
    let tree = MetricTree::tripod(1.0);
    let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
    let domain = DomainSpec::from_boundary(4, &build.boundary_hint).unwrap();
    let boundary: Vec<(usize, NpcPoint)> = build
        .boundary_hint
        .iter()
        .enumerate()
        .map(|(leg, &tip)| (tip, tree.point_on_edge(leg, 0.7).unwrap()))
        .collect();
    let (harmonic, _) = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::with_tol(1e-12),
    )
    .unwrap();

    let u0 =
        Mapping::from_boundary_barycenter(graph.clone(), target.clone(), domain.clone(), &boundary)
            .unwrap();
    let options = FlowOptions {
        stop_displacement: Some(1e-13),
        ..FlowOptions::default()
    };
    let trajectory = run_flow(&u0, 0.1, 5000, true, &options).unwrap();
    let gap = trajectory.final_map.sup_distance(&harmonic).unwrap();
    assert!(gap <= 1e-8, "flow terminal state off by {gap}");
}

#[test]
fn oscillation_decay_on_sector_problem_is_monotone() {
    let problem = solved_problems()
        .into_iter()
        .find(|p| p.name == "grid-into-tripod-sectors")
        .unwrap();
    let graph = problem.map.graph().clone();
    // center-ish vertex of the 6x6 grid
    let x0 = 2 * 6 + 2;
    let radii: Vec<f64> = [3.2, 2.2, 1.2]
        .iter()
        .copied()
        .filter(|&r| r < graph.diameter())
        .collect();
    let report = harmap::dirichlet::oscillation_decay(&problem.map, x0, &radii);
    for w in report.entries.windows(2) {
        assert!(
            w[1].1 <= w[0].1 + 1e-12,
            "diameters must shrink with the radius"
        );
    }
    if let Some(alpha) = report.alpha {
        assert!(alpha > 0.0);
    }
}

#[test]
fn path_into_hyperbolic_reduces_to_the_scalar_profile() {
    // The image of a harmonic map from a path lies on the geodesic between
    // the boundary values (nearest-point projection onto the geodesic is
    // 1-Lipschitz, so projecting can only lower the energy; uniqueness does
    // the rest). Along the geodesic the problem is isometric to an interval,
    // so the positions are the scalar solution's fractions of the distance.
    let graph = unit_path(5, 1.5);
    let domain = DomainSpec::from_boundary(5, &[0, 4]).unwrap();
    let target = Arc::new(NpcSpace::HyperbolicPlane);
    let b0 = NpcPoint::Hyperbolic([1.0, 0.0, 0.0]);
    let b1 = NpcPoint::Hyperbolic([3.0f64.cosh(), 3.0f64.sinh() * 0.6, 3.0f64.sinh() * 0.8]);
    let boundary = vec![(0, b0.clone()), (4, b1.clone())];
    let (solution, _) = solve_dirichlet_from_boundary(
        &graph,
        &target,
        &domain,
        &boundary,
        &SolveOptions::with_tol(1e-13),
    )
    .unwrap();

    let fractions =
        harmap::dirichlet::scalar_laplacian_oracle(&graph, &domain, &[(0, 0.0), (4, 1.0)])
            .unwrap();
    for (v, &fraction) in fractions.iter().enumerate() {
        let expected = target.geodesic_point(&b0, &b1, fraction).unwrap();
        let gap = target.dist(solution.value(v), &expected).unwrap();
        assert!(gap < 1e-8, "vertex {v}: {gap} off the geodesic profile");
    }
}

#[test]
fn tree_barycenter_beats_a_brute_force_grid() {
    // Exact per-edge quadratic sweep against a fine sampling of the
    // objective over the whole tripod.
    let tree = MetricTree::new(4, &[(0, 1, 1.5), (0, 2, 0.7), (0, 3, 2.2)]).unwrap();
    let space = NpcSpace::MetricTree(tree.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for _ in 0..50 {
        let points: Vec<NpcPoint> = (0..5).map(|_| space.sample_point(&mut rng)).collect();
        let weights: Vec<f64> = (0..5).map(|_| rng.random_range(0.1..2.0)).collect();
        let wp = harmap::npc::WeightedPoints::new(points, weights).unwrap();
        let bary = space.barycenter(&wp, 1e-12, 10_000).unwrap();
        let best = wp.objective(&space, &bary);
        for edge in 0..3 {
            let len = tree.edge_length(edge);
            for step in 0..=200 {
                let probe = tree.point_on_edge(edge, len * step as f64 / 200.0).unwrap();
                let value = wp.objective(&space, &probe);
                assert!(
                    best <= value + 1e-12,
                    "grid point beats the exact barycenter: {best} > {value}"
                );
            }
        }
    }
}
