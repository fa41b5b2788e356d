//! Energy-minimizing (harmonic) mappings from finite weighted metric measure
//! graphs into nonpositively curved (NPC) metric targets.
//!
//! The library is organized around a handful of building blocks:
//!
//! * [`npc`] — concrete NPC target spaces (Euclidean space, metric trees, the
//!   hyperbolic plane in the hyperboloid model, finite products) with exact
//!   distances, geodesics, weighted barycenters and the CAT(0) comparison
//!   defect.
//! * [`graph`] — the discretized source space: a finite weighted graph with a
//!   vertex measure, shortest-path metric and a fixed ball radius `eps`.
//! * [`energy`] — the approximating energy at scale `eps` (averaged squared
//!   difference quotients over `eps`-balls), its pointwise density, the
//!   Kuwae–Shioya variants, midpoint maps and distance pullbacks.
//! * [`dirichlet`] — nonlinear Gauss–Seidel solver for the Dirichlet problem
//!   (minimize the energy subject to prescribed values off the domain),
//!   together with an exact linear-system oracle for Euclidean targets.
//! * [`flow`] — the harmonic-mapping flow as a minimizing-movement (proximal)
//!   scheme on the NPC space of square-integrable maps.
//! * [`analysis`] — the discrete Dirichlet-form layer: energy measures,
//!   weak-subharmonicity checks, Green functions, Harnack/Liouville
//!   diagnostics and the intrinsic distance.
//!
//! Normalization conventions, stated once and used everywhere: the energy of
//! a map `u` is `sum_x f(x) mu(x) avg_{y in B(x,eps)} d^2(u(x),u(y)) / eps^2`
//! where the average is with respect to `mu` over the open ball `d < eps`
//! (which contains its center; the center contributes zero). There is no
//! global 1/2. The Kuwae–Shioya functionals carry an explicit `1/(2 b(eps))`
//! and do not average over the ball.
//!
//! ```
//! use std::sync::Arc;
//! use harmap::dirichlet::{solve_dirichlet_from_boundary, SolveOptions};
//! use harmap::graph::{DomainSpec, MetricMeasureGraph};
//! use harmap::npc::{MetricTree, NpcSpace};
//!
//! // a 3-star source, each tip pinned to the tip of a different tripod leg
//! let edges = vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)];
//! let graph = Arc::new(MetricMeasureGraph::new(4, edges, vec![1.0; 4], 1.5)?);
//! let tree = MetricTree::tripod(1.0);
//! let target = Arc::new(NpcSpace::MetricTree(tree.clone()));
//! let domain = DomainSpec::from_boundary(4, &[1, 2, 3])?;
//! let boundary: Vec<_> = (0..3)
//!     .map(|leg| (leg + 1, tree.point_on_edge(leg, 1.0).unwrap()))
//!     .collect();
//!
//! let (solution, report) =
//!     solve_dirichlet_from_boundary(&graph, &target, &domain, &boundary, &SolveOptions::default())?;
//! // the minimizer sends the hub to the branch point
//! assert!(target.dist(solution.value(0), &tree.vertex_point(0))? < 1e-9);
//! assert!(report.converged);
//! # Ok::<(), harmap::Error>(())
//! ```

// vertex data lives in parallel index-aligned arrays; index loops are the
// house style
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod dirichlet;
pub mod energy;
pub mod error;
pub mod flow;
pub mod graph;
pub mod npc;

pub use analysis::DirichletForm;
pub use dirichlet::{scalar_laplacian_oracle, solve_dirichlet, SolveOptions, SolveReport};
pub use energy::{energy_density, ks_energy, EnergyReport, Mapping, RateFunction};
pub use error::{Error, Result};
pub use flow::{l2_distance, prox_step, run_flow, FlowTrajectory};
pub use graph::{DomainSpec, MetricMeasureGraph};
pub use npc::{MetricTree, NpcPoint, NpcSpace, WeightedPoints};
