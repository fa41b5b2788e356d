//! Report plumbing: a summary header carried by every task output so
//! results are self-describing (seed, tolerances, normalization
//! conventions, problem shape), plus deterministic file writers.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use harmap::energy::ENERGY_CONVENTIONS;
use harmap::graph::MetricMeasureGraph;
use harmap::npc::NpcSpace;

#[derive(Debug, Serialize)]
pub struct SummaryHeader {
    pub task: String,
    pub seed: u64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub eps: f64,
    pub conventions: &'static str,
    pub graph: GraphSummary,
    pub target: String,
}

#[derive(Debug, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub total_measure: f64,
    pub diameter: f64,
}

impl SummaryHeader {
    pub fn new(
        task: &str,
        seed: u64,
        tol: f64,
        max_sweeps: usize,
        graph: &MetricMeasureGraph,
        target: &NpcSpace,
    ) -> Self {
        Self {
            task: task.to_string(),
            seed,
            tol,
            max_sweeps,
            eps: graph.eps(),
            conventions: ENERGY_CONVENTIONS,
            graph: GraphSummary {
                vertices: graph.vertex_count(),
                edges: graph.edges().len(),
                total_measure: graph.total_measure(),
                diameter: graph.diameter(),
            },
            target: target.describe(),
        }
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).context("serializing report")?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
