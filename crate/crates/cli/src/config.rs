//! Problem configuration: a TOML file with `[graph]`, `[target]`,
//! `[boundary]`, `[task]` and `[tolerances]` sections, plus the builders
//! that turn it into library objects.
//!
//! Builtin generators (`path`, `grid`, `star` graphs; `tripod`, `star`,
//! `tree`, `hyperbolic`, `product` targets; `sectors`, `star_tips`,
//! `coordinate`, `constant` boundary kinds) make sample problems
//! self-contained; `kind = "file"` graphs read the `u v length` edge-list
//! and `v mu` measure formats.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use harmap::graph::{gen, io, DomainSpec, MetricMeasureGraph};
use harmap::npc::{MetricTree, NpcPoint, NpcSpace};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub graph: GraphConfig,
    pub target: TargetConfig,
    pub boundary: Option<BoundaryConfig>,
    #[serde(default)]
    pub task: TaskConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ProblemConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    /// `path` | `grid` | `star` | `file`.
    pub kind: String,
    /// Vertex count for `path`; rows for `grid`.
    pub n: Option<usize>,
    /// Columns for `grid`.
    pub m: Option<usize>,
    /// Legs and unit edges per leg for `star`.
    pub legs: Option<usize>,
    pub arms: Option<usize>,
    pub edges_file: Option<PathBuf>,
    pub measure_file: Option<PathBuf>,
    pub eps: f64,
    /// Uniform vertex measure (default 1.0) unless a measure file is given.
    pub measure: Option<f64>,
}

/// Graph plus the generator's layout metadata.
pub struct BuiltGraph {
    pub graph: Arc<MetricMeasureGraph>,
    pub positions: Vec<(f64, f64)>,
    pub boundary_hint: Vec<usize>,
}

pub fn build_graph(config: &GraphConfig, base_dir: &Path) -> Result<BuiltGraph> {
    let build = match config.kind.as_str() {
        "path" => {
            let n = config.n.context("[graph] path needs `n` (vertex count)")?;
            gen::path_graph(n)
        }
        "grid" => {
            let rows = config.n.context("[graph] grid needs `n` (rows)")?;
            let cols = config.m.unwrap_or(rows);
            gen::grid_graph(rows, cols)
        }
        "star" => {
            let legs = config.legs.context("[graph] star needs `legs`")?;
            let arms = config.arms.unwrap_or(1);
            gen::star_graph(legs, arms)
        }
        "file" => {
            let edges_path = config
                .edges_file
                .as_ref()
                .context("[graph] file kind needs `edges_file`")?;
            let text = std::fs::read_to_string(base_dir.join(edges_path))
                .with_context(|| format!("reading {}", edges_path.display()))?;
            let (vertex_count, edges) = io::parse_edge_list(&text)?;
            gen::GraphBuild {
                vertex_count,
                edges,
                positions: (0..vertex_count).map(|v| (v as f64, 0.0)).collect(),
                boundary_hint: Vec::new(),
            }
        }
        other => bail!("[graph] unknown kind {other:?}"),
    };
    let measure = match (&config.measure_file, config.measure) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(base_dir.join(path))
                .with_context(|| format!("reading {}", path.display()))?;
            io::parse_measure(&text, build.vertex_count)?
        }
        (None, uniform) => vec![uniform.unwrap_or(1.0); build.vertex_count],
    };
    let graph = Arc::new(MetricMeasureGraph::new(
        build.vertex_count,
        build.edges,
        measure,
        config.eps,
    )?);
    Ok(BuiltGraph {
        graph,
        positions: build.positions,
        boundary_hint: build.boundary_hint,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    /// `euclidean` | `tripod` | `star` | `tree` | `hyperbolic` | `product`.
    pub kind: String,
    pub dim: Option<usize>,
    pub leg_length: Option<f64>,
    pub legs: Option<usize>,
    /// Explicit tree edges `(start, end, length)`.
    pub edges: Option<Vec<(usize, usize, f64)>>,
    pub components: Option<Vec<TargetConfig>>,
}

pub fn build_target(config: &TargetConfig) -> Result<NpcSpace> {
    Ok(match config.kind.as_str() {
        "euclidean" => NpcSpace::euclidean(config.dim.context("[target] euclidean needs `dim`")?),
        "tripod" => NpcSpace::MetricTree(MetricTree::tripod(config.leg_length.unwrap_or(1.0))),
        "star" => NpcSpace::MetricTree(MetricTree::star(
            config.legs.context("[target] star needs `legs`")?,
            config.leg_length.unwrap_or(1.0),
        )),
        "tree" => {
            let edges = config
                .edges
                .as_ref()
                .context("[target] tree needs `edges`")?;
            let vertex_count = edges
                .iter()
                .map(|&(u, v, _)| u.max(v) + 1)
                .max()
                .unwrap_or(0);
            NpcSpace::MetricTree(MetricTree::new(vertex_count, edges)?)
        }
        "hyperbolic" => NpcSpace::HyperbolicPlane,
        "product" => {
            let comps = config
                .components
                .as_ref()
                .context("[target] product needs `components`")?;
            NpcSpace::Product(comps.iter().map(build_target).collect::<Result<_>>()?)
        }
        other => bail!("[target] unknown kind {other:?}"),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// `explicit` | `constant` | `coordinate` | `sectors` | `star_tips`.
    pub kind: String,
    /// Boundary vertex set; defaults to the generator's natural boundary
    /// (grid ring, star tips, path ends).
    pub vertices: Option<Vec<usize>>,
    /// Per-vertex values for `explicit` (space-tagged points).
    pub values: Option<Vec<NpcPoint>>,
    /// The single value for `constant`.
    pub value: Option<NpcPoint>,
    /// Position coordinate used by `coordinate` (0 = x, 1 = y).
    pub axis: Option<usize>,
    /// Leg offset used by `sectors` and `star_tips`.
    pub radius: Option<f64>,
}

pub fn build_boundary(
    config: &BoundaryConfig,
    built: &BuiltGraph,
    target: &NpcSpace,
) -> Result<(DomainSpec, Vec<(usize, NpcPoint)>)> {
    let vertices: Vec<usize> = match &config.vertices {
        Some(v) => v.clone(),
        None => built.boundary_hint.clone(),
    };
    if vertices.is_empty() {
        bail!("[boundary] needs `vertices` (the generator provides none for this graph)");
    }
    let n = built.graph.vertex_count();
    let domain = DomainSpec::from_boundary(n, &vertices)?;

    let tree = || -> Result<&MetricTree> {
        match target {
            NpcSpace::MetricTree(t) => Ok(t),
            _ => bail!(
                "[boundary] kind {:?} needs a metric tree target",
                config.kind
            ),
        }
    };
    let data: Vec<(usize, NpcPoint)> = match config.kind.as_str() {
        "explicit" => {
            let values = config
                .values
                .as_ref()
                .context("[boundary] explicit needs `values`")?;
            if values.len() != vertices.len() {
                bail!(
                    "[boundary] {} vertices but {} values",
                    vertices.len(),
                    values.len()
                );
            }
            vertices
                .iter()
                .copied()
                .zip(values.iter().cloned())
                .collect()
        }
        "constant" => {
            let value = config
                .value
                .as_ref()
                .context("[boundary] constant needs `value`")?;
            vertices.iter().map(|&v| (v, value.clone())).collect()
        }
        "coordinate" => {
            let axis = config.axis.unwrap_or(0);
            if axis > 1 {
                bail!("[boundary] coordinate axis must be 0 or 1");
            }
            vertices
                .iter()
                .map(|&v| {
                    let (x, y) = built.positions[v];
                    (v, NpcPoint::scalar(if axis == 0 { x } else { y }))
                })
                .collect()
        }
        "sectors" => {
            let tree = tree()?;
            let legs = tree.edge_count();
            let radius = config.radius.unwrap_or(1.0);
            let cx =
                built.positions.iter().map(|p| p.0).sum::<f64>() / built.positions.len() as f64;
            let cy =
                built.positions.iter().map(|p| p.1).sum::<f64>() / built.positions.len() as f64;
            vertices
                .iter()
                .map(|&v| {
                    let (x, y) = built.positions[v];
                    let angle = (y - cy).atan2(x - cx) + std::f64::consts::PI;
                    let sector =
                        ((angle / (std::f64::consts::TAU / legs as f64)) as usize).min(legs - 1);
                    Ok((v, tree.point_on_edge(sector, radius)?))
                })
                .collect::<Result<_>>()?
        }
        "star_tips" => {
            let tree = tree()?;
            let radius = config.radius.unwrap_or(1.0);
            if vertices.len() > tree.edge_count() {
                bail!(
                    "[boundary] star_tips: {} tips but the target tree has {} legs",
                    vertices.len(),
                    tree.edge_count()
                );
            }
            vertices
                .iter()
                .enumerate()
                .map(|(leg, &v)| Ok((v, tree.point_on_edge(leg, radius)?)))
                .collect::<Result<_>>()?
        }
        other => bail!("[boundary] unknown kind {other:?}"),
    };
    for (_, p) in &data {
        target.validate_point(p)?;
    }
    Ok((domain, data))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskConfig {
    /// Flow step size.
    pub h: f64,
    /// Flow step budget.
    pub steps: usize,
    pub constrained: bool,
    /// Dump per-step solutions.
    pub snapshots: bool,
    /// Diagnostic exponent (Harnack / growth diagnostics).
    pub p: f64,
    /// Number of pullback probe points.
    pub probes: usize,
    /// Rate-function exponent `b(r) = r^nu`.
    pub rate_nu: f64,
    /// Center vertex for ball diagnostics (defaults to a most-central one).
    pub x0: Option<usize>,
    /// Restarts for the uniqueness check.
    pub restarts: usize,
    /// Sample count for the randomized suite checks.
    pub samples: usize,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            h: 0.1,
            steps: 1000,
            constrained: true,
            snapshots: false,
            p: 2.0,
            probes: 10,
            rate_nu: 2.0,
            x0: None,
            restarts: 3,
            samples: 2000,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_sweeps: 200_000,
            seed: 0,
        }
    }
}
