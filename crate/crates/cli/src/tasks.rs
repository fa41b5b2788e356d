//! Task pipelines: `solve`, `flow`, `diag`, `suite`, `gen-graph`. Each
//! writes a JSON summary plus CSV artifacts into the output directory;
//! given the same config and seed the bytes are identical run to run.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use harmap::analysis::{harnack_diagnostic, liouville_diagnostic, DirichletForm};
use harmap::dirichlet::{
    euclidean_dirichlet_oracle, oscillation_decay, solve_dirichlet, uniqueness_check, SolveOptions,
};
use harmap::energy::{
    convexity_defect, distance_pullback, energy_report, ks_energy, kuwae_shioya_energy,
    scalar_ks_energy, KuwaeShioyaVariant, Mapping, RateFunction,
};
use harmap::flow::{run_flow, FlowOptions};
use harmap::graph::{gen, io, poincare_constant, DomainSpec};
use harmap::npc::{NpcPoint, NpcSpace};

use crate::config::{build_boundary, build_graph, build_target, BuiltGraph, ProblemConfig};
use crate::report::{write_json, write_text, SummaryHeader};

pub struct TaskContext {
    pub config: ProblemConfig,
    pub built: BuiltGraph,
    pub target: Arc<NpcSpace>,
    pub seed: u64,
    pub solve_options: SolveOptions,
}

impl TaskContext {
    pub fn prepare(
        config_path: &Path,
        seed: Option<u64>,
        tol: Option<f64>,
        max_iter: Option<usize>,
    ) -> Result<Self> {
        let mut config = ProblemConfig::load(config_path)?;
        if let Some(seed) = seed {
            config.tolerances.seed = seed;
        }
        if let Some(tol) = tol {
            config.tolerances.tol = tol;
        }
        if let Some(max_iter) = max_iter {
            config.tolerances.max_sweeps = max_iter;
        }
        let base_dir = config_path.parent().unwrap_or(Path::new("."));
        let built = build_graph(&config.graph, base_dir)?;
        let target = Arc::new(build_target(&config.target)?);
        let seed = config.tolerances.seed;
        let solve_options = SolveOptions {
            tol: config.tolerances.tol,
            max_sweeps: config.tolerances.max_sweeps,
            ..SolveOptions::default()
        };
        Ok(Self {
            config,
            built,
            target,
            seed,
            solve_options,
        })
    }

    fn header(&self, task: &str) -> SummaryHeader {
        SummaryHeader::new(
            task,
            self.seed,
            self.solve_options.tol,
            self.solve_options.max_sweeps,
            &self.built.graph,
            &self.target,
        )
    }

    fn boundary(&self) -> Result<(DomainSpec, Vec<(usize, NpcPoint)>)> {
        let config = self
            .config
            .boundary
            .as_ref()
            .context("this task needs a [boundary] section")?;
        build_boundary(config, &self.built, &self.target)
    }

    fn solve(&self) -> Result<(Mapping, harmap::dirichlet::SolveReport)> {
        let (domain, boundary) = self.boundary()?;
        let init = Mapping::from_boundary_barycenter(
            self.built.graph.clone(),
            self.target.clone(),
            domain,
            &boundary,
        )?;
        Ok(solve_dirichlet(&init, &self.solve_options)?)
    }

    /// Most central vertex (smallest eccentricity), or the configured one.
    fn center_vertex(&self) -> usize {
        if let Some(x0) = self.config.task.x0 {
            return x0;
        }
        let graph = &self.built.graph;
        (0..graph.vertex_count())
            .min_by(|&a, &b| {
                let ea = (0..graph.vertex_count())
                    .map(|v| graph.dist(a, v))
                    .fold(0.0f64, f64::max);
                let eb = (0..graph.vertex_count())
                    .map(|v| graph.dist(b, v))
                    .fold(0.0f64, f64::max);
                ea.partial_cmp(&eb).unwrap()
            })
            .unwrap_or(0)
    }

    fn hull_probes(&self, u: &Mapping, count: usize, rng: &mut ChaCha8Rng) -> Vec<NpcPoint> {
        (0..count)
            .map(|_| {
                let a = u.value(rng.random_range(0..u.values().len()));
                let b = u.value(rng.random_range(0..u.values().len()));
                let t: f64 = rng.random_range(0.0..=1.0);
                self.target.geodesic_point_unchecked(a, b, t)
            })
            .collect()
    }
}

#[derive(Serialize)]
struct SolveSummary {
    #[serde(flatten)]
    header: SummaryHeader,
    energy: f64,
    sweeps: usize,
    residual: f64,
    optimality_residual: f64,
    converged: bool,
}

pub fn run_solve(ctx: &TaskContext, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let (solution, report) = ctx.solve()?;
    let density = energy_report(&solution, None)?;
    write_json(
        out,
        "summary.json",
        &SolveSummary {
            header: ctx.header("solve"),
            energy: report.energy,
            sweeps: report.sweeps,
            residual: report.residual,
            optimality_residual: report.optimality_residual,
            converged: report.converged,
        },
    )?;
    write_json(out, "solve_report.json", &report)?;
    write_json(
        out,
        "solution.json",
        &json!({ "values": solution.values() }),
    )?;
    write_text(out, "energy_density.csv", &density.density_csv())?;
    Ok(())
}

#[derive(Serialize)]
struct FlowSummary {
    #[serde(flatten)]
    header: SummaryHeader,
    h: f64,
    constrained: bool,
    steps_taken: usize,
    initial_energy: f64,
    final_energy: f64,
    dissipation: f64,
    final_image_diameter: f64,
}

pub fn run_flow_task(ctx: &TaskContext, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let task = &ctx.config.task;
    let u0 = if task.constrained {
        let (domain, boundary) = ctx.boundary()?;
        Mapping::from_boundary_barycenter(
            ctx.built.graph.clone(),
            ctx.target.clone(),
            domain,
            &boundary,
        )?
    } else {
        // seeded random start
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(3));
        let values: Vec<NpcPoint> = (0..ctx.built.graph.vertex_count())
            .map(|_| ctx.target.sample_point(&mut rng))
            .collect();
        Mapping::new(
            ctx.built.graph.clone(),
            ctx.target.clone(),
            values,
            DomainSpec::all_interior(ctx.built.graph.vertex_count()),
        )?
    };
    let options = FlowOptions {
        tol: ctx.solve_options.tol,
        stop_displacement: Some(ctx.solve_options.tol),
        record_snapshots: task.snapshots,
        ..FlowOptions::default()
    };
    let trajectory = run_flow(&u0, task.h, task.steps, task.constrained, &options)?;
    write_json(
        out,
        "summary.json",
        &FlowSummary {
            header: ctx.header("flow"),
            h: task.h,
            constrained: task.constrained,
            steps_taken: trajectory.steps_taken(),
            initial_energy: trajectory.records[0].energy,
            final_energy: trajectory.final_energy(),
            dissipation: trajectory.dissipation(),
            final_image_diameter: harmap::flow::image_diameter(&trajectory.final_map),
        },
    )?;
    write_text(out, "trajectory.csv", &trajectory.csv())?;
    write_json(
        out,
        "solution.json",
        &json!({ "values": trajectory.final_map.values() }),
    )?;
    if let Some(snapshots) = &trajectory.snapshots {
        let dir = out.join("snapshots");
        std::fs::create_dir_all(&dir)?;
        for (k, map) in snapshots.iter().enumerate() {
            write_json(
                &dir,
                &format!("step_{k:05}.json"),
                &json!({ "values": map.values() }),
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DiagSummary {
    #[serde(flatten)]
    header: SummaryHeader,
    energy: f64,
    kuwae_shioya_ball_normalized: f64,
    kuwae_shioya_chordal: f64,
    doubling_constant: f64,
    poincare_constant: f64,
    x0: usize,
    oscillation: harmap::dirichlet::OscillationReport,
    harnack: harmap::analysis::HarnackReport,
    liouville: harmap::analysis::LiouvilleReport,
    green: Option<GreenDigest>,
    green_skipped_reason: Option<String>,
    subharmonicity_min_defect: f64,
    strengthened_gap_min: f64,
    intrinsic_distance: Option<IntrinsicDigest>,
    uniqueness_max_pairwise_sup: f64,
}

#[derive(Serialize)]
struct GreenDigest {
    r: f64,
    w_min_inner: f64,
    w_max_outer: f64,
    identity_residual: f64,
    nonnegative: bool,
}

#[derive(Serialize)]
struct IntrinsicDigest {
    from: usize,
    to: usize,
    value: f64,
    graph_distance: f64,
}

pub fn run_diag(ctx: &TaskContext, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let graph = &ctx.built.graph;
    let task = &ctx.config.task;
    let (solution, solve_report) = ctx.solve()?;
    let form = DirichletForm::new(graph);
    let (domain, boundary) = ctx.boundary()?;
    let density = energy_report(&solution, None)?;
    let rate = RateFunction::Power { nu: task.rate_nu };

    let x0 = ctx.center_vertex();
    let diameter = graph.diameter();

    // oscillation over realized radii from x0, largest first
    let radii_desc: Vec<f64> = {
        let mut rs: Vec<f64> = (0..graph.vertex_count())
            .map(|v| graph.dist(x0, v))
            .filter(|&d| d > 0.0)
            .collect();
        rs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        rs.dedup();
        rs.truncate(12);
        // open balls: nudge past the realized distance so it is included
        rs.iter().map(|r| r * (1.0 + 1e-12)).collect()
    };
    let oscillation = oscillation_decay(&solution, x0, &radii_desc);

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(1));
    let probes = ctx.hull_probes(&solution, task.probes.max(1), &mut rng);
    let mut subharmonicity_min_defect = f64::INFINITY;
    let mut strengthened_gap_min = f64::INFINITY;
    let mut first_defects = None;
    for y0 in &probes {
        for power in [2u32, 1u32] {
            let pullback = distance_pullback(&solution, y0, power)?;
            let report = form.check_weak_subharmonic(&pullback, &domain, 1e-9);
            subharmonicity_min_defect = subharmonicity_min_defect.min(report.min_defect);
            if first_defects.is_none() && power == 2 {
                first_defects = Some(report.witnesses_csv());
            }
        }
        for (_, gap) in form.strengthened_subharmonicity_gap(&solution, y0)? {
            strengthened_gap_min = strengthened_gap_min.min(gap);
        }
    }

    let v = distance_pullback(&solution, &probes[0], 1)?;
    let harnack = harnack_diagnostic(graph, &v, x0, 0.5 * diameter.max(2.0 * graph.eps()), task.p)?;

    let radii_asc: Vec<f64> = {
        let mut rs: Vec<f64> = (0..graph.vertex_count())
            .map(|v| graph.dist(x0, v))
            .filter(|&d| d > 0.0)
            .map(|d| d * (1.0 + 1e-12))
            .collect();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rs.dedup();
        rs
    };
    let liouville = liouville_diagnostic(&solution, x0, x0, task.p.max(1.5), &radii_asc)?;

    let (green, green_skipped_reason) = {
        let mut result = (None, None);
        let mut r = 0.25 * diameter;
        for _ in 0..6 {
            if graph.ball(x0, 2.0 * r).len() < graph.vertex_count() {
                let g = form.green_function(x0, r)?;
                result = (
                    Some(GreenDigest {
                        r,
                        w_min_inner: g.w_min_inner,
                        w_max_outer: g.w_max_outer,
                        identity_residual: g.identity_residual,
                        nonnegative: g.g.iter().all(|&v| v >= 0.0),
                    }),
                    None,
                );
                break;
            }
            r *= 0.5;
        }
        if result.0.is_none() {
            result.1 = Some("every admissible ball pair covers the graph".to_string());
        }
        result
    };

    let intrinsic = {
        // most distant vertex pair
        let mut best = (0usize, 0usize, 0.0f64);
        for a in 0..graph.vertex_count() {
            for b in a + 1..graph.vertex_count() {
                if graph.dist(a, b) > best.2 {
                    best = (a, b, graph.dist(a, b));
                }
            }
        }
        form.intrinsic_distance(best.0, best.1, None, 1e-6, 1_000_000)
            .ok()
            .map(|r| IntrinsicDigest {
                from: best.0,
                to: best.1,
                value: r.value,
                graph_distance: best.2,
            })
    };

    let uniqueness = uniqueness_check(
        graph,
        &ctx.target,
        &domain,
        &boundary,
        task.restarts.max(2),
        &ctx.solve_options,
        ctx.seed,
    )?;

    write_json(
        out,
        "summary.json",
        &DiagSummary {
            header: ctx.header("diag"),
            energy: solve_report.energy,
            kuwae_shioya_ball_normalized: kuwae_shioya_energy(
                &solution,
                None,
                &rate,
                KuwaeShioyaVariant::BallNormalized,
            )?,
            kuwae_shioya_chordal: kuwae_shioya_energy(
                &solution,
                None,
                &rate,
                KuwaeShioyaVariant::Chordal,
            )?,
            doubling_constant: graph.doubling_constant(diameter.max(graph.eps())),
            poincare_constant: poincare_constant(graph, &domain, &form),
            x0,
            oscillation,
            harnack,
            liouville,
            green,
            green_skipped_reason,
            subharmonicity_min_defect,
            strengthened_gap_min,
            intrinsic_distance: intrinsic,
            uniqueness_max_pairwise_sup: uniqueness.max_pairwise_sup,
        },
    )?;
    write_text(out, "energy_density.csv", &density.density_csv())?;
    if let Some(defects) = first_defects {
        write_text(out, "subharmonic_defects.csv", &defects)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SuiteCheck {
    name: &'static str,
    pass: bool,
    details: serde_json::Value,
}

#[derive(Serialize)]
struct SuiteSummary {
    #[serde(flatten)]
    header: SummaryHeader,
    all_pass: bool,
    checks: Vec<SuiteCheck>,
}

/// Structural-theorem checks on the configured problem: comparison
/// inequality, geodesic consistency, energy convexity, uniqueness, oracle
/// agreement, maximum principle, form algebra, subharmonicity, flow
/// inequalities and the Green function, each with a pass flag. All
/// randomness flows from the seed.
pub fn run_suite(ctx: &TaskContext, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let graph = &ctx.built.graph;
    let target = &ctx.target;
    let task = &ctx.config.task;
    let tol = ctx.solve_options.tol;
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(2));

    // 1. comparison inequality on the target
    {
        let mut min_defect = f64::INFINITY;
        for _ in 0..task.samples {
            let p = target.sample_point(&mut rng);
            let q = target.sample_point(&mut rng);
            let r = target.sample_point(&mut rng);
            let lambda: f64 = rng.random_range(0.0..=1.0);
            min_defect = min_defect.min(target.comparison_defect(&p, &q, &r, lambda)?);
        }
        checks.push(SuiteCheck {
            name: "npc_comparison",
            pass: min_defect >= -1e-10,
            details: json!({ "min_defect": min_defect, "samples": task.samples }),
        });
    }

    // 2. geodesic length consistency
    {
        let mut worst = 0.0f64;
        for _ in 0..task.samples / 4 {
            let p = target.sample_point(&mut rng);
            let q = target.sample_point(&mut rng);
            let t: f64 = rng.random_range(0.0..=1.0);
            let r = target.geodesic_point(&p, &q, t)?;
            let d = target.dist(&p, &q)?;
            worst = worst.max((target.dist(&p, &r)? - t * d).abs());
            worst = worst.max((target.dist(&r, &q)? - (1.0 - t) * d).abs());
        }
        checks.push(SuiteCheck {
            name: "geodesic_consistency",
            pass: worst <= 1e-9,
            details: json!({ "max_error": worst }),
        });
    }

    let (domain, boundary) = ctx.boundary()?;

    // 3. energy convexity along midpoint maps
    {
        let mut min_defect = f64::INFINITY;
        let pairs = (task.samples / 10).max(20);
        for _ in 0..pairs {
            let make = |rng: &mut ChaCha8Rng| -> Result<Mapping> {
                Ok(Mapping::from_boundary_and_interior(
                    graph.clone(),
                    target.clone(),
                    domain.clone(),
                    &boundary,
                    |_| target.sample_point(rng),
                )?)
            };
            let u = make(&mut rng)?;
            let v = make(&mut rng)?;
            min_defect = min_defect.min(convexity_defect(&u, &v, None)?);
        }
        checks.push(SuiteCheck {
            name: "energy_convexity",
            pass: min_defect >= -1e-10,
            details: json!({ "min_defect": min_defect, "pairs": pairs }),
        });
    }

    // solve once for the map-based checks
    let tight = SolveOptions {
        tol: tol.min(1e-11),
        ..ctx.solve_options.clone()
    };
    let init = Mapping::from_boundary_barycenter(
        graph.clone(),
        target.clone(),
        domain.clone(),
        &boundary,
    )?;
    let (solution, solve_report) = solve_dirichlet(&init, &tight)?;

    // 4. uniqueness under restarts
    {
        let report = uniqueness_check(
            graph,
            target,
            &domain,
            &boundary,
            task.restarts.max(2),
            &tight,
            ctx.seed,
        )?;
        checks.push(SuiteCheck {
            name: "uniqueness",
            pass: report.max_pairwise_sup <= 10.0 * tol,
            details: json!({
                "max_pairwise_sup": report.max_pairwise_sup,
                "restarts": report.restarts,
            }),
        });
    }

    // 5. oracle agreement (euclidean targets)
    {
        let euclidean = matches!(**target, NpcSpace::Euclidean { .. });
        if euclidean {
            let oracle = euclidean_dirichlet_oracle(graph, &domain, &boundary)?;
            let mut sup = 0.0f64;
            for (value, reference) in solution.values().iter().zip(&oracle) {
                sup = sup.max(target.dist(value, reference)?);
            }
            checks.push(SuiteCheck {
                name: "oracle_agreement",
                pass: sup <= 1e-8,
                details: json!({ "sup_error": sup }),
            });
        } else {
            checks.push(SuiteCheck {
                name: "oracle_agreement",
                pass: true,
                details: json!({ "skipped": "non-euclidean target" }),
            });
        }
    }

    // 6. maximum principle (scalar targets)
    {
        let scalar = matches!(**target, NpcSpace::Euclidean { dim: 1 });
        if scalar {
            let lo = boundary
                .iter()
                .map(|(_, p)| p.as_scalar().unwrap())
                .fold(f64::INFINITY, f64::min);
            let hi = boundary
                .iter()
                .map(|(_, p)| p.as_scalar().unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            let inside = solution
                .values()
                .iter()
                .all(|p| (lo..=hi).contains(&p.as_scalar().unwrap()));
            checks.push(SuiteCheck {
                name: "maximum_principle",
                pass: inside,
                details: json!({ "range": [lo, hi] }),
            });
        } else {
            checks.push(SuiteCheck {
                name: "maximum_principle",
                pass: true,
                details: json!({ "skipped": "non-scalar target" }),
            });
        }
    }

    // 7. form algebra: polarization + scalar energy consistency
    {
        let form = DirichletForm::new(graph);
        let n = graph.vertex_count();
        let mut polarization = 0.0f64;
        let mut consistency = 0.0f64;
        for _ in 0..50 {
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let phi: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let gamma = form.energy_measure(&u, &v);
            let lhs: f64 = phi.iter().zip(&gamma).map(|(p, g)| p * g).sum();
            let phiv: Vec<f64> = phi.iter().zip(&v).map(|(p, b)| p * b).collect();
            let phiu: Vec<f64> = phi.iter().zip(&u).map(|(p, a)| p * a).collect();
            let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
            let rhs = 0.5
                * (form.form_value(&u, &phiv) + form.form_value(&v, &phiu)
                    - form.form_value(&uv, &phi));
            polarization = polarization.max((lhs - rhs).abs());
            let e0 = form.form_value(&u, &u);
            let ks = scalar_ks_energy(graph, &u, None)?;
            consistency = consistency.max((e0 - ks).abs() / (1.0 + ks.abs()));
        }
        checks.push(SuiteCheck {
            name: "dirichlet_form_algebra",
            pass: polarization <= 1e-12 && consistency <= 1e-12,
            details: json!({
                "polarization_residual": polarization,
                "energy_consistency_residual": consistency,
            }),
        });
    }

    // 8. subharmonic pullbacks of the solved map
    {
        let form = DirichletForm::new(graph);
        let probes = ctx.hull_probes(&solution, task.probes.max(1), &mut rng);
        let mut min_defect = f64::INFINITY;
        let mut min_gap = f64::INFINITY;
        for y0 in &probes {
            for power in [2u32, 1u32] {
                let pullback = distance_pullback(&solution, y0, power)?;
                min_defect = min_defect.min(
                    form.check_weak_subharmonic(&pullback, &domain, 1e-9)
                        .min_defect,
                );
            }
            for (_, gap) in form.strengthened_subharmonicity_gap(&solution, y0)? {
                min_gap = min_gap.min(gap);
            }
        }
        checks.push(SuiteCheck {
            name: "subharmonicity",
            pass: min_defect >= -1e-9 && min_gap >= -1e-9,
            details: json!({
                "min_defect": min_defect,
                "min_strengthened_gap": min_gap,
                "probes": probes.len(),
            }),
        });
    }

    // 9. flow: per-step inequality and terminal agreement
    {
        let options = FlowOptions {
            tol,
            stop_displacement: Some((tol * 1e-2).max(1e-13)),
            ..FlowOptions::default()
        };
        let trajectory = run_flow(&init, task.h, task.steps, true, &options)?;
        let mut worst_slack = f64::INFINITY;
        for w in trajectory.records.windows(2) {
            let slack = w[0].energy
                - w[1].energy
                - w[1].l2_displacement * w[1].l2_displacement / (2.0 * task.h);
            worst_slack = worst_slack.min(slack);
        }
        let terminal_gap = trajectory.final_map.sup_distance(&solution)?;
        checks.push(SuiteCheck {
            name: "flow",
            pass: worst_slack >= -1e-12 && terminal_gap <= 10.0 * tol.max(1e-7),
            details: json!({
                "min_step_slack": worst_slack,
                "terminal_gap": terminal_gap,
                "steps": trajectory.steps_taken(),
                "dissipation": trajectory.dissipation(),
                "initial_energy": trajectory.records[0].energy,
            }),
        });
    }

    // 10. Green function at the center
    {
        let form = DirichletForm::new(graph);
        let x0 = ctx.center_vertex();
        let mut r = 0.25 * graph.diameter();
        let mut found = None;
        for _ in 0..6 {
            if r > 0.0 && graph.ball(x0, 2.0 * r).len() < graph.vertex_count() {
                found = Some(form.green_function(x0, r)?);
                break;
            }
            r *= 0.5;
        }
        match found {
            Some(g) => {
                let nonnegative = g.g.iter().all(|&v| v >= 0.0);
                let positive_inner = g.inner_ball.iter().all(|&v| g.g[v] > 0.0);
                checks.push(SuiteCheck {
                    name: "green_function",
                    pass: nonnegative && positive_inner && g.identity_residual <= 1e-10,
                    details: json!({
                        "identity_residual": g.identity_residual,
                        "w_min_inner": g.w_min_inner,
                        "w_max_outer": g.w_max_outer,
                    }),
                });
            }
            None => checks.push(SuiteCheck {
                name: "green_function",
                pass: true,
                details: json!({ "skipped": "no admissible ball pair on this graph" }),
            }),
        }
    }

    // context numbers, reported not asserted
    let form = DirichletForm::new(graph);
    let doubling = graph.doubling_constant(graph.diameter().max(graph.eps()));
    let poincare = poincare_constant(graph, &domain, &form);
    checks.push(SuiteCheck {
        name: "geometry_constants",
        pass: true,
        details: json!({
            "doubling_constant": doubling,
            "poincare_constant": poincare,
            "solve_energy": solve_report.energy,
            "ks_energy": ks_energy(&solution, None)?,
        }),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    write_json(
        out,
        "suite.json",
        &SuiteSummary {
            header: ctx.header("suite"),
            all_pass,
            checks,
        },
    )?;
    if !all_pass {
        bail!("property suite reported failures (see suite.json)");
    }
    Ok(())
}

pub fn run_gen_graph(args: &crate::GenGraphArgs) -> Result<()> {
    let build = match args.kind.as_str() {
        "path" => gen::path_graph(args.n.context("gen-graph path needs --n")?),
        "grid" => {
            let rows = args.n.context("gen-graph grid needs --n")?;
            gen::grid_graph(rows, args.m.unwrap_or(rows))
        }
        "star" => gen::star_graph(
            args.legs.context("gen-graph star needs --legs")?,
            args.arms.unwrap_or(1),
        ),
        other => bail!("unknown graph kind {other:?}"),
    };
    if !(args.length > 0.0 && args.measure > 0.0) {
        bail!("--length and --measure must be positive");
    }
    let out = &args.out;
    std::fs::create_dir_all(out)?;
    let edges: Vec<(usize, usize, f64)> = build
        .edges
        .iter()
        .map(|&(u, v, len)| (u, v, len * args.length))
        .collect();
    write_text(out, "edges.txt", &io::format_edge_list(&edges))?;
    write_text(
        out,
        "measure.txt",
        &io::format_measure(&vec![args.measure; build.vertex_count]),
    )?;
    println!(
        "wrote {} and {} ({} vertices, {} edges; natural boundary: {:?})",
        out.join("edges.txt").display(),
        out.join("measure.txt").display(),
        build.vertex_count,
        edges.len(),
        build.boundary_hint,
    );
    Ok(())
}
