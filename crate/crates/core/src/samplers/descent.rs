use crate::error::Result;
use crate::ising::{IsingModel, SpinVector};

use super::{random_spins, run_reads, CouplingGraph, SampleSet, SamplerParams};

/// Greedy descent: each read starts from uniform random spins and repeatedly
/// flips the spin with the largest energy decrease (lowest index on ties)
/// until no single flip lowers the energy.
pub fn steepest_descent(model: &IsingModel, num_reads: usize, seed: u64) -> Result<SampleSet> {
    let graph = CouplingGraph::new(model);
    let tol = tolerance(model);
    run_reads(
        model,
        num_reads,
        seed,
        "steepest_descent",
        SamplerParams::SteepestDescent { num_reads },
        |rng| {
            let mut spins = random_spins(graph.num_vars(), rng);
            descend(&graph, &mut spins, tol);
            spins
        },
    )
}

/// Deterministic descent from a given start state.
pub fn descend_from(model: &IsingModel, start: &SpinVector) -> SpinVector {
    let graph = CouplingGraph::new(model);
    let mut spins = start.as_slice().to_vec();
    descend(&graph, &mut spins, tolerance(model));
    SpinVector::from_raw(spins)
}

// Improvements below this are round-off in the incremental fields.
fn tolerance(model: &IsingModel) -> f64 {
    1e-12 * model.max_abs_coefficient()
}

fn descend(graph: &CouplingGraph, spins: &mut [i8], tol: f64) {
    let mut fields = graph.local_fields(spins);
    loop {
        let mut best = None;
        let mut best_delta = -tol;
        for i in 0..spins.len() {
            let delta = -2.0 * spins[i] as f64 * fields[i];
            if delta < best_delta {
                best_delta = delta;
                best = Some(i);
            }
        }
        match best {
            Some(i) => graph.flip(i, spins, &mut fields),
            None => break,
        }
    }
}
