//! Error type shared across the crate.

use crate::npc::NpcPoint;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A point was handed to a space it does not belong to.
    #[error("point does not belong to space: {0}")]
    SpaceMismatch(String),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The edge list does not describe a connected graph.
    #[error("graph is not connected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),

    /// Some punctured ball `B(x,eps) \ {x}` is empty; the energy at scale
    /// `eps` would be undefined at that vertex.
    #[error(
        "punctured ball of vertex {vertex} is empty at eps = {eps}; \
         eps must exceed {min_eps}"
    )]
    EmptyPuncturedBall {
        vertex: usize,
        eps: f64,
        min_eps: f64,
    },

    /// Barycenter iteration ran out of passes. Carries the last iterate.
    #[error("barycenter did not converge after {passes} passes (residual {residual:.3e})")]
    BarycenterDiverged {
        passes: usize,
        residual: f64,
        last: Box<NpcPoint>,
    },

    /// Relaxation solver ran out of sweeps. The residual is the largest
    /// single-vertex movement of the final sweep.
    #[error("solver did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    SolverDiverged { sweeps: usize, residual: f64 },

    /// A problem instance is degenerate (empty boundary, ball covering the
    /// whole graph, singular configuration, ...).
    #[error("degenerate problem: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
