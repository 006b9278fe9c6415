//! Ising formulations of HPC load-balancing problems and the annealing-style
//! samplers used to solve them.
//!
//! Two workload families are supported: grid workloads (AMR patches weighted
//! by cell count, balanced by number partitioning) and graph workloads
//! (particle cells with task-time node and edge weights, balanced by weighted
//! graph bipartitioning with a Lagrange parameter). Both are turned into an
//! [`IsingModel`], sampled, and recursively split into `2^m` parts.

pub mod embedding;
pub mod error;
pub mod ising;
pub mod metrics;
pub mod partition;
pub mod rng;
pub mod samplers;
pub mod sweep;
pub mod workload;

pub use embedding::{ChainStats, EmbeddedModel, Embedding};
pub use error::{Error, ErrorClass, Result};
pub use ising::{IsingModel, SpinVector};
pub use metrics::ObjectivePoint;
pub use partition::PartitionResult;
pub use samplers::{AnnealParams, Sample, SampleSet, SamplerParams, Solver, SqaParams};
pub use workload::{GraphWorkload, GridWorkload, Workload, WorkloadFile, WorkloadKind};
