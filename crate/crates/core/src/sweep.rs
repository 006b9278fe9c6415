//! Lagrange-parameter sweeps over graph bipartitions.

use crate::error::{Error, Result};
use crate::ising::{graph_objectives, IsingModel, SpinVector};
use crate::metrics::ObjectivePoint;
use crate::rng;
use crate::samplers::Solver;
use crate::workload::GraphWorkload;

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn gamma_values(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    if !(min.is_finite() && max.is_finite() && min >= 0.0 && max >= min) {
        return Err(Error::InvalidArgument(format!(
            "gamma range must satisfy 0 <= min <= max (got {min}..{max})"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                max
            } else {
                min + step * k as f64
            }
        })
        .collect())
}

/// Solution disparity and cut weight of a graph bipartition.
pub fn objective_point(
    g: &GraphWorkload,
    s: &SpinVector,
    source: impl Into<String>,
    gamma: f64,
) -> Result<ObjectivePoint> {
    let (signed, cut) = graph_objectives(g, s)?;
    Ok(ObjectivePoint::new(
        signed / (0.5 * g.total_weight()),
        cut,
        source,
        gamma,
    ))
}

/// Formulates and samples the graph at every `gammas[k]` with seed
/// `derive_seed(seed, k)`, returning one point per sample in step then read
/// order.
pub fn gamma_sweep(
    g: &GraphWorkload,
    gammas: &[f64],
    solver: &Solver,
    seed: u64,
) -> Result<Vec<ObjectivePoint>> {
    let mut points = Vec::new();
    for (k, &gamma) in gammas.iter().enumerate() {
        let model = IsingModel::from_graph_partitioning(g, gamma)?;
        let set = solver.sample(&model, rng::derive_seed(seed, k as u64))?;
        for s in &set.samples {
            let source = format!("{}:step{k}:read{}", solver.name(), s.read_index);
            points.push(objective_point(g, &s.spins, source, gamma)?);
        }
    }
    Ok(points)
}
