//! Path-integral simulated quantum annealing.
//!
//! The transverse-field Hamiltonian `A(t) Σ σx + B(t) H_problem` is mapped by
//! the Suzuki-Trotter decomposition onto `P` classical replicas of the spin
//! vector coupled in a ring:
//!
//! ```text
//! E_eff(t) = (B(t)/P) Σ_k E_problem(s^k) - J⊥(t) Σ_k Σ_i s_i^k s_i^{k+1}
//! J⊥(t)    = -(T/2) ln tanh(A(t) / (P T))
//! ```
//!
//! sampled by Metropolis at temperature `T`. Each sweep visits every
//! (replica, spin) pair and then proposes one all-replica flip per spin. The
//! schedule is linear, `A = 1 - t`, `B = t`, with `t` running from 0 on the
//! first sweep to 1 on the last.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};
use crate::rng::{self, StreamRng};

use super::{random_spins, CouplingGraph, Sample, SampleSet, SamplerParams};

/// Upper bound on the inter-replica coupling; `ln tanh` diverges as `A -> 0`.
pub const MAX_REPLICA_COUPLING: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// `A(t) = 1 - t`, `B(t) = t`.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqaParams {
    pub num_reads: usize,
    pub num_sweeps: usize,
    pub trotter_slices: usize,
    pub temperature: f64,
    pub schedule: Schedule,
}

impl Default for SqaParams {
    fn default() -> Self {
        Self {
            num_reads: 100,
            num_sweeps: 1000,
            trotter_slices: 20,
            temperature: 0.05,
            schedule: Schedule::Linear,
        }
    }
}

impl SqaParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.num_sweeps == 0 {
            return Err(Error::InvalidArgument(
                "num_reads and num_sweeps must be positive".into(),
            ));
        }
        if self.trotter_slices < 2 {
            return Err(Error::InvalidArgument(format!(
                "trotter_slices must be >= 2 (got {})",
                self.trotter_slices
            )));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive (got {})",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Schedule position of sweep `k`.
    pub fn time(&self, sweep: usize) -> f64 {
        if self.num_sweeps == 1 {
            1.0
        } else {
            sweep as f64 / (self.num_sweeps - 1) as f64
        }
    }

    /// `(A(t), B(t))`.
    pub fn prefactors(&self, t: f64) -> (f64, f64) {
        match self.schedule {
            Schedule::Linear => (1.0 - t, t),
        }
    }

    pub fn replica_coupling(&self, a: f64) -> f64 {
        let p = self.trotter_slices as f64;
        let t = self.temperature;
        if a <= 0.0 {
            return MAX_REPLICA_COUPLING;
        }
        let j = -0.5 * t * (a / (p * t)).tanh().ln();
        j.min(MAX_REPLICA_COUPLING)
    }
}

/// Per-read diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SqaStats {
    /// Fraction of spins on which the replicas do not all agree at the end of the anneal.
    pub replica_disagreement: Vec<f64>,
}

impl SqaStats {
    pub fn mean_disagreement(&self) -> f64 {
        self.replica_disagreement.iter().sum::<f64>() / self.replica_disagreement.len() as f64
    }
}

pub fn simulated_quantum_annealing(
    model: &IsingModel,
    params: &SqaParams,
    seed: u64,
) -> Result<SampleSet> {
    simulated_quantum_annealing_with_stats(model, params, seed).map(|(set, _)| set)
}

pub fn simulated_quantum_annealing_with_stats(
    model: &IsingModel,
    params: &SqaParams,
    seed: u64,
) -> Result<(SampleSet, SqaStats)> {
    params.validate()?;
    let graph = match model.normalize() {
        Ok(normalized) => CouplingGraph::new(&normalized),
        Err(Error::ZeroModel) => CouplingGraph::new(model),
        Err(e) => return Err(e),
    };
    let reads: Vec<(Sample, f64)> = (0..params.num_reads)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, r as u64);
            let (spins, disagreement) = anneal(&graph, params, &mut rng);
            let sample = Sample {
                energy: model.energy_unchecked(&spins),
                spins: SpinVector::from_raw(spins),
                read_index: r,
            };
            (sample, disagreement)
        })
        .collect();
    let (samples, replica_disagreement) = reads.into_iter().unzip();
    Ok((
        SampleSet {
            sampler_name: "simulated_quantum_annealing".into(),
            params: SamplerParams::SimulatedQuantumAnnealing(*params),
            master_seed: seed,
            samples,
        },
        SqaStats {
            replica_disagreement,
        },
    ))
}

fn anneal(graph: &CouplingGraph, params: &SqaParams, rng: &mut StreamRng) -> (Vec<i8>, f64) {
    let n = graph.num_vars();
    let p = params.trotter_slices;
    let temp = params.temperature;
    let mut spins: Vec<Vec<i8>> = (0..p).map(|_| random_spins(n, rng)).collect();
    let mut fields: Vec<Vec<f64>> = spins.iter().map(|s| graph.local_fields(s)).collect();

    for sweep in 0..params.num_sweeps {
        let (a, b) = params.prefactors(params.time(sweep));
        let jperp = params.replica_coupling(a);
        let problem = b / p as f64;

        for k in 0..p {
            let (prev, next) = ((k + p - 1) % p, (k + 1) % p);
            for i in 0..n {
                let s = spins[k][i] as f64;
                let ring = (spins[prev][i] + spins[next][i]) as f64;
                let delta = -2.0 * s * problem * fields[k][i] + 2.0 * jperp * s * ring;
                if delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp() {
                    graph.flip(i, &mut spins[k], &mut fields[k]);
                }
            }
        }

        // all-replica moves leave the ring energy unchanged
        for i in 0..n {
            let delta: f64 = (0..p)
                .map(|k| -2.0 * spins[k][i] as f64 * problem * fields[k][i])
                .sum();
            if delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp() {
                for k in 0..p {
                    graph.flip(i, &mut spins[k], &mut fields[k]);
                }
            }
        }
    }

    let disagreeing = (0..n)
        .filter(|&i| (1..p).any(|k| spins[k][i] != spins[0][i]))
        .count();
    let best = (0..p)
        .map(|k| (graph.energy(&spins[k]), k))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(_, k)| k)
        .expect("at least two replicas");
    let disagreement = if n == 0 {
        0.0
    } else {
        disagreeing as f64 / n as f64
    };
    (spins.swap_remove(best), disagreement)
}
