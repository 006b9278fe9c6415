//! Solution strategies for Ising-formulated load balancing.
//!
//! Every stochastic sampler follows the same contract: read `r` of a call with
//! master seed `s` draws only from [`rng::stream(s, r)`](crate::rng::stream),
//! so a read's outcome is independent of how many other reads run and in what
//! order. Reads execute on the rayon pool and are collected in read order.

mod anneal;
mod descent;
mod exact;
mod fields;
mod kl;
mod sqa;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use anneal::{simulated_annealing, AnnealParams};
pub use descent::{descend_from, steepest_descent};
pub use exact::{brute_force, MAX_BRUTE_FORCE_VARS};
pub use kl::{kernighan_lin, kernighan_lin_model};
pub use sqa::{
    simulated_quantum_annealing, simulated_quantum_annealing_with_stats, SqaParams, SqaStats,
};

pub(crate) use fields::CouplingGraph;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};
use crate::rng::{self, StreamRng};
use crate::workload::GridWorkload;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub spins: SpinVector,
    pub energy: f64,
    pub read_index: usize,
}

/// Parameters a sample set was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum SamplerParams {
    SteepestDescent { num_reads: usize },
    SimulatedAnnealing(AnnealParams),
    SimulatedQuantumAnnealing(SqaParams),
    BruteForce,
    KernighanLin,
    RoundRobin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub sampler_name: String,
    pub params: SamplerParams,
    pub master_seed: u64,
    pub samples: Vec<Sample>,
}

impl SampleSet {
    /// Lowest-energy sample; ties go to the lowest read index.
    pub fn best(&self) -> &Sample {
        self.samples
            .iter()
            .min_by(|a, b| {
                a.energy
                    .total_cmp(&b.energy)
                    .then(a.read_index.cmp(&b.read_index))
            })
            .expect("sample sets are non-empty")
    }

    /// Samples ordered by energy, ties by read index.
    pub fn sorted_by_energy(&self) -> Vec<&Sample> {
        let mut v: Vec<&Sample> = self.samples.iter().collect();
        v.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(a.read_index.cmp(&b.read_index))
        });
        v
    }

    /// The first `n` reads, which is exactly what a call with `num_reads = n` returns.
    pub fn truncated(&self, n: usize) -> SampleSet {
        let n = n.min(self.samples.len());
        let params = match &self.params {
            SamplerParams::SteepestDescent { .. } => {
                SamplerParams::SteepestDescent { num_reads: n }
            }
            SamplerParams::SimulatedAnnealing(p) => {
                SamplerParams::SimulatedAnnealing(AnnealParams { num_reads: n, ..*p })
            }
            SamplerParams::SimulatedQuantumAnnealing(p) => {
                SamplerParams::SimulatedQuantumAnnealing(SqaParams { num_reads: n, ..*p })
            }
            other => other.clone(),
        };
        SampleSet {
            sampler_name: self.sampler_name.clone(),
            params,
            master_seed: self.master_seed,
            samples: self.samples[..n].to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Which solver to run on a model, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum Solver {
    RoundRobin,
    SteepestDescent { num_reads: usize },
    SimulatedAnnealing(AnnealParams),
    SimulatedQuantumAnnealing(SqaParams),
    BruteForce,
    KernighanLin,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::RoundRobin => "round_robin",
            Solver::SteepestDescent { .. } => "steepest_descent",
            Solver::SimulatedAnnealing(_) => "simulated_annealing",
            Solver::SimulatedQuantumAnnealing(_) => "simulated_quantum_annealing",
            Solver::BruteForce => "brute_force",
            Solver::KernighanLin => "kernighan_lin",
        }
    }

    /// Samples `model`. Round robin ignores the couplings and returns the
    /// cyclic bipartition of the variables in index order.
    pub fn sample(&self, model: &IsingModel, seed: u64) -> Result<SampleSet> {
        match self {
            Solver::RoundRobin => {
                let spins = SpinVector::from_bools((0..model.num_vars()).map(|k| k % 2 == 0));
                Ok(SampleSet {
                    sampler_name: self.name().into(),
                    params: SamplerParams::RoundRobin,
                    master_seed: seed,
                    samples: vec![Sample {
                        energy: model.energy(&spins)?,
                        spins,
                        read_index: 0,
                    }],
                })
            }
            Solver::SteepestDescent { num_reads } => steepest_descent(model, *num_reads, seed),
            Solver::SimulatedAnnealing(p) => simulated_annealing(model, p, seed),
            Solver::SimulatedQuantumAnnealing(p) => simulated_quantum_annealing(model, p, seed),
            Solver::BruteForce => brute_force(model),
            Solver::KernighanLin => {
                let sample = kernighan_lin_model(model, seed);
                Ok(SampleSet {
                    sampler_name: self.name().into(),
                    params: SamplerParams::KernighanLin,
                    master_seed: seed,
                    samples: vec![sample],
                })
            }
        }
    }
}

/// Item `k` goes to part `k mod parts`, in input order.
pub fn round_robin(w: &GridWorkload, parts: usize) -> Result<Vec<usize>> {
    if parts < 2 {
        return Err(Error::InvalidArgument(format!(
            "parts must be >= 2 (got {parts})"
        )));
    }
    Ok((0..w.len()).map(|k| k % parts).collect())
}

/// Runs `num_reads` independent reads and assembles the sample set, with
/// energies recomputed against `model`.
pub(crate) fn run_reads<F>(
    model: &IsingModel,
    num_reads: usize,
    seed: u64,
    sampler_name: &str,
    params: SamplerParams,
    read: F,
) -> Result<SampleSet>
where
    F: Fn(&mut StreamRng) -> Vec<i8> + Sync,
{
    if num_reads == 0 {
        return Err(Error::InvalidArgument("num_reads must be positive".into()));
    }
    let samples = (0..num_reads)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, r as u64);
            let spins = read(&mut rng);
            Sample {
                energy: model.energy_unchecked(&spins),
                spins: SpinVector::from_raw(spins),
                read_index: r,
            }
        })
        .collect();
    Ok(SampleSet {
        sampler_name: sampler_name.into(),
        params,
        master_seed: seed,
        samples,
    })
}

pub(crate) fn random_spins(n: usize, rng: &mut StreamRng) -> Vec<i8> {
    use rand::Rng;
    (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect()
}
