use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use harmap::analysis::DirichletForm;
use harmap::dirichlet::{solve_dirichlet_from_boundary, SolveOptions};
use harmap::energy::{ks_energy, Mapping};
use harmap::flow::{prox_step, FlowOptions};
use harmap::graph::{gen, DomainSpec, MetricMeasureGraph};
use harmap::npc::{MetricTree, NpcPoint, NpcSpace, WeightedPoints};

fn grid_problem(rows: usize) -> (Arc<MetricMeasureGraph>, DomainSpec, Vec<(usize, NpcPoint)>) {
    let build = gen::grid_graph(rows, rows);
    let graph = Arc::new(
        MetricMeasureGraph::new(
            build.vertex_count,
            build.edges,
            vec![1.0; build.vertex_count],
            1.1,
        )
        .unwrap(),
    );
    let domain = DomainSpec::from_boundary(graph.vertex_count(), &build.boundary_hint).unwrap();
    let boundary: Vec<(usize, NpcPoint)> = build
        .boundary_hint
        .iter()
        .map(|&v| (v, NpcPoint::scalar(build.positions[v].0)))
        .collect();
    (graph, domain, boundary)
}

fn bench_barycenters(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tree_space = NpcSpace::MetricTree(MetricTree::tripod(1.0));
    let tree_points: Vec<NpcPoint> = (0..8).map(|_| tree_space.sample_point(&mut rng)).collect();
    let hyper = NpcSpace::HyperbolicPlane;
    let hyper_points: Vec<NpcPoint> = (0..8).map(|_| hyper.sample_point(&mut rng)).collect();
    let weights: Vec<f64> = (0..8).map(|_| rng.random_range(0.1..2.0)).collect();

    c.bench_function("tripod_barycenter_8pts", |b| {
        let wp = WeightedPoints::new(tree_points.clone(), weights.clone()).unwrap();
        b.iter(|| {
            tree_space
                .barycenter(black_box(&wp), 1e-12, 10_000)
                .unwrap()
        })
    });
    c.bench_function("hyperbolic_barycenter_8pts", |b| {
        let wp = WeightedPoints::new(hyper_points.clone(), weights.clone()).unwrap();
        b.iter(|| hyper.barycenter(black_box(&wp), 1e-12, 10_000).unwrap())
    });
}

fn bench_comparison_defect(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let space = NpcSpace::MetricTree(MetricTree::tripod(1.0));
    let triples: Vec<[NpcPoint; 3]> = (0..256)
        .map(|_| {
            [
                space.sample_point(&mut rng),
                space.sample_point(&mut rng),
                space.sample_point(&mut rng),
            ]
        })
        .collect();
    c.bench_function("tripod_comparison_defect_256", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for [p, q, r] in &triples {
                acc += space.comparison_defect(p, q, r, 0.5).unwrap();
            }
            black_box(acc)
        })
    });
}

fn bench_scalar_solve(c: &mut Criterion) {
    let (graph, domain, boundary) = grid_problem(16);
    let target = Arc::new(NpcSpace::euclidean(1));
    c.bench_function("grid16_scalar_dirichlet_solve", |b| {
        b.iter(|| {
            solve_dirichlet_from_boundary(
                black_box(&graph),
                &target,
                &domain,
                &boundary,
                &SolveOptions::with_tol(1e-10),
            )
            .unwrap()
        })
    });
}

fn bench_energy_and_prox(c: &mut Criterion) {
    let (graph, _, _) = grid_problem(16);
    let tree = MetricTree::tripod(1.0);
    let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
    let space = NpcSpace::MetricTree(tree);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let values: Vec<NpcPoint> = (0..graph.vertex_count())
        .map(|_| space.sample_point(&mut rng))
        .collect();
    let u = Mapping::new(
        graph.clone(),
        target,
        values,
        DomainSpec::all_interior(graph.vertex_count()),
    )
    .unwrap();

    c.bench_function("grid16_tripod_energy", |b| {
        b.iter(|| ks_energy(black_box(&u), None).unwrap())
    });
    c.bench_function("grid16_tripod_prox_step", |b| {
        b.iter(|| prox_step(black_box(&u), 0.1, false, &FlowOptions::default()).unwrap())
    });
}

fn bench_form_assembly(c: &mut Criterion) {
    let (graph, _, _) = grid_problem(32);
    c.bench_function("grid32_form_assembly", |b| {
        b.iter(|| DirichletForm::new(black_box(&graph)))
    });
}

criterion_group!(
    benches,
    bench_barycenters,
    bench_comparison_defect,
    bench_scalar_solve,
    bench_energy_and_prox,
    bench_form_assembly
);
criterion_main!(benches);
