use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};

use super::{CouplingGraph, Sample, SampleSet, SamplerParams};

pub const MAX_BRUTE_FORCE_VARS: usize = 26;

/// All ground states by Gray-code enumeration.
///
/// Without linear fields the energy is invariant under a global flip, so the
/// first spin is pinned to `+1` and the mirrored states are added afterwards.
pub fn brute_force(model: &IsingModel) -> Result<SampleSet> {
    let n = model.num_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::TooLarge {
            num_vars: n,
            max: MAX_BRUTE_FORCE_VARS,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("model has no variables".into()));
    }
    let symmetric = !model.has_fields();
    let first_free = usize::from(symmetric);
    let free = n - first_free;

    let graph = CouplingGraph::new(model);
    let mut spins = vec![1i8; n];
    let mut fields = graph.local_fields(&spins);
    let mut energy = graph.energy(&spins);
    let tol = 1e-9 * model.max_abs_coefficient().max(1.0);

    let mut best = energy;
    let mut candidates: Vec<u32> = vec![0];
    for g in 1u32..(1u32 << free) {
        let bit = g.trailing_zeros() as usize;
        let i = first_free + bit;
        energy += -2.0 * spins[i] as f64 * fields[i];
        graph.flip(i, &mut spins, &mut fields);
        if energy < best - tol {
            best = energy;
            candidates.retain(|_| false);
            candidates.push(g ^ (g >> 1));
        } else if energy <= best + tol {
            candidates.push(g ^ (g >> 1));
        }
    }

    // Re-evaluate the candidates directly so incremental round-off cannot
    // admit or exclude a state.
    let decode = |code: u32| -> Vec<i8> {
        (0..n)
            .map(|i| {
                if i < first_free {
                    1
                } else if code >> (i - first_free) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect()
    };
    let mut states: Vec<(f64, Vec<i8>)> = candidates
        .into_iter()
        .map(|code| {
            let s = decode(code);
            (model.energy_unchecked(&s), s)
        })
        .collect();
    let min = states.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    let keep = 1e-12 * min.abs().max(model.max_abs_coefficient()).max(1.0);
    states.retain(|(e, _)| *e <= min + keep);
    if symmetric {
        let mirrored: Vec<(f64, Vec<i8>)> = states
            .iter()
            .map(|(_, s)| {
                let m: Vec<i8> = s.iter().map(|x| -x).collect();
                (model.energy_unchecked(&m), m)
            })
            .collect();
        states.extend(mirrored);
    }
    states.sort_by(|a, b| b.1.cmp(&a.1));

    let samples = states
        .into_iter()
        .enumerate()
        .map(|(read_index, (energy, s))| Sample {
            spins: SpinVector::from_raw(s),
            energy,
            read_index,
        })
        .collect();
    Ok(SampleSet {
        sampler_name: "brute_force".into(),
        params: SamplerParams::BruteForce,
        master_seed: 0,
        samples,
    })
}
