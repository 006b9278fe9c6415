//! Kernighan-Lin bipartition refinement, used as the classical graph
//! partitioning baseline.
//!
//! The objective is the Ising energy itself (`γ H1 + H2` for graph models), so
//! the result is directly comparable with sampler output. Moves are pairwise
//! swaps, which keep the side sizes of the random balanced start fixed.

use rand::seq::SliceRandom;

use crate::error::Result;
use crate::ising::{IsingModel, SpinVector};
use crate::rng;
use crate::workload::GraphWorkload;

use super::{CouplingGraph, Sample};

pub fn kernighan_lin(g: &GraphWorkload, gamma: f64, seed: u64) -> Result<Sample> {
    let model = IsingModel::from_graph_partitioning(g, gamma)?;
    Ok(kernighan_lin_model(&model, seed))
}

pub fn kernighan_lin_model(model: &IsingModel, seed: u64) -> Sample {
    let n = model.num_vars();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, 0));
    let mut spins = vec![-1i8; n];
    for &i in &order[..n / 2] {
        spins[i] = 1;
    }

    let graph = CouplingGraph::new(model);
    let mut dense = vec![0.0; n * n];
    for (&(i, j), &v) in model.couplings() {
        dense[i * n + j] = v;
        dense[j * n + i] = v;
    }
    let tol = 1e-12 * model.max_abs_coefficient().max(f64::MIN_POSITIVE);
    let mut fields = graph.local_fields(&spins);

    loop {
        let mut locked = vec![false; n];
        let mut swaps = Vec::new();
        let mut cumulative = 0.0;
        let mut best_gain = 0.0;
        let mut best_len = 0;
        loop {
            let mut choice: Option<(f64, usize, usize)> = None;
            for a in (0..n).filter(|&a| !locked[a] && spins[a] == 1) {
                let da = -2.0 * spins[a] as f64 * fields[a];
                for b in (0..n).filter(|&b| !locked[b] && spins[b] == -1) {
                    let db = -2.0 * spins[b] as f64 * fields[b];
                    let delta = da + db + 4.0 * dense[a * n + b] * (spins[a] * spins[b]) as f64;
                    if choice.is_none_or(|(best, _, _)| delta < best) {
                        choice = Some((delta, a, b));
                    }
                }
            }
            let Some((delta, a, b)) = choice else { break };
            graph.flip(a, &mut spins, &mut fields);
            graph.flip(b, &mut spins, &mut fields);
            locked[a] = true;
            locked[b] = true;
            swaps.push((a, b));
            cumulative -= delta;
            if cumulative > best_gain + tol {
                best_gain = cumulative;
                best_len = swaps.len();
            }
        }
        for &(a, b) in swaps[best_len..].iter().rev() {
            graph.flip(b, &mut spins, &mut fields);
            graph.flip(a, &mut spins, &mut fields);
        }
        if best_len == 0 {
            break;
        }
        // resynchronise against drift before the next pass
        fields = graph.local_fields(&spins);
    }

    Sample {
        energy: model.energy_unchecked(&spins),
        spins: SpinVector::from_raw(spins),
        read_index: 0,
    }
}
