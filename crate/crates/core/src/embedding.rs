//! Uniform-chain minor embedding, chain strength, majority-vote unembedding
//! and chain-break statistics.
//!
//! Logical variable `i` is represented by the physical spins
//! `[i*L, i*L + L)` joined in a line by ferromagnetic couplings `-c`. This is
//! not a hardware embedding; it reproduces the chain-strength trade-off on a
//! fixed, known chain structure.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};
use crate::rng;
use crate::samplers::{Sample, SampleSet, Solver};

pub const DEFAULT_UTC_PREFACTOR: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    chains: Vec<Vec<usize>>,
    chain_length: usize,
}

impl Embedding {
    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn chain_length(&self) -> usize {
        self.chain_length
    }

    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn num_physical(&self) -> usize {
        self.chains.len() * self.chain_length
    }
}

pub fn embed_uniform_chains(model: &IsingModel, chain_length: usize) -> Result<Embedding> {
    if chain_length == 0 {
        return Err(Error::InvalidArgument("chain length must be >= 1".into()));
    }
    let chains = (0..model.num_vars())
        .map(|i| (i * chain_length..(i + 1) * chain_length).collect())
        .collect();
    Ok(Embedding {
        chains,
        chain_length,
    })
}

/// Uniform torque compensation: `prefactor * rms(J) * sqrt(mean degree)`.
pub fn utc_chain_strength(model: &IsingModel, prefactor: f64) -> Result<f64> {
    let j = model.couplings();
    if j.is_empty() {
        return Err(Error::InvalidArgument("model has no couplings".into()));
    }
    let rms = (j.values().map(|v| v * v).sum::<f64>() / j.len() as f64).sqrt();
    let mean_degree = 2.0 * j.len() as f64 / model.num_vars() as f64;
    Ok(prefactor * rms * mean_degree.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedModel {
    pub physical: IsingModel,
    pub embedding: Embedding,
    pub chain_strength: f64,
}

impl EmbeddedModel {
    /// Physical energy minus logical energy for any state with unanimous chains.
    pub fn chain_energy_offset(&self) -> f64 {
        let l = self.embedding.chain_length as f64;
        -self.chain_strength * self.embedding.num_logical() as f64 * (l - 1.0)
    }
}

/// Splits `h_i` evenly over chain `i`, places each `J_ij` on one physical
/// edge between the chains (member indices advance round-robin per chain so
/// couplings spread across members), and joins each chain with `-c`.
pub fn apply_embedding(
    model: &IsingModel,
    embedding: &Embedding,
    chain_strength: f64,
) -> Result<EmbeddedModel> {
    if embedding.num_logical() != model.num_vars() {
        return Err(Error::LengthMismatch {
            expected: model.num_vars(),
            found: embedding.num_logical(),
        });
    }
    if !(chain_strength.is_finite() && chain_strength > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "chain strength must be positive (got {chain_strength})"
        )));
    }
    let l = embedding.chain_length;
    let mut physical = IsingModel::new(embedding.num_physical());
    physical.set_offset(model.offset());
    for (i, chain) in embedding.chains.iter().enumerate() {
        let hi = model.h()[i];
        if hi != 0.0 {
            for &p in chain {
                physical.add_field(p, hi / l as f64)?;
            }
        }
    }
    let mut next_member = vec![0usize; model.num_vars()];
    for (&(i, j), &v) in model.couplings() {
        let a = embedding.chains[i][next_member[i] % l];
        let b = embedding.chains[j][next_member[j] % l];
        next_member[i] += 1;
        next_member[j] += 1;
        physical.add_coupling(a, b, v)?;
    }
    for chain in &embedding.chains {
        for pair in chain.windows(2) {
            physical.add_coupling(pair[0], pair[1], -chain_strength)?;
        }
    }
    Ok(EmbeddedModel {
        physical,
        embedding: embedding.clone(),
        chain_strength,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub chain_break_fraction: f64,
    pub per_read_breaks: Vec<usize>,
}

/// Majority-vote unembedding. Ties on even-length chains are resolved by a
/// coin from `stream(derive_seed(seed, read), chain)`.
pub fn unembed(
    samples: &SampleSet,
    embedding: &Embedding,
    logical: &IsingModel,
    seed: u64,
) -> Result<(SampleSet, ChainStats)> {
    if embedding.num_logical() != logical.num_vars() {
        return Err(Error::LengthMismatch {
            expected: logical.num_vars(),
            found: embedding.num_logical(),
        });
    }
    let mut per_read_breaks = Vec::with_capacity(samples.len());
    let mut out = Vec::with_capacity(samples.len());
    for sample in &samples.samples {
        let phys = sample.spins.as_slice();
        if phys.len() != embedding.num_physical() {
            return Err(Error::LengthMismatch {
                expected: embedding.num_physical(),
                found: phys.len(),
            });
        }
        let mut breaks = 0;
        let spins: Vec<i8> = embedding
            .chains
            .iter()
            .enumerate()
            .map(|(c, chain)| {
                let sum: i32 = chain.iter().map(|&p| phys[p] as i32).sum();
                if sum.unsigned_abs() as usize != chain.len() {
                    breaks += 1;
                }
                match sum.signum() {
                    1 => 1,
                    -1 => -1,
                    _ => {
                        let read_seed = rng::derive_seed(seed, sample.read_index as u64);
                        if rng::stream(read_seed, c as u64).random::<bool>() {
                            1
                        } else {
                            -1
                        }
                    }
                }
            })
            .collect();
        per_read_breaks.push(breaks);
        out.push(Sample {
            energy: logical.energy_unchecked(&spins),
            spins: SpinVector::from_raw(spins),
            read_index: sample.read_index,
        });
    }
    let total: usize = per_read_breaks.iter().sum();
    let denom = embedding.num_logical() * samples.len();
    let chain_break_fraction = if denom == 0 {
        0.0
    } else {
        total as f64 / denom as f64
    };
    Ok((
        SampleSet {
            samples: out,
            ..samples.clone()
        },
        ChainStats {
            chain_break_fraction,
            per_read_breaks,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainExperimentConfig {
    pub chain_length: usize,
    /// Chain strength as a multiple of the largest logical coefficient magnitude.
    pub multipliers: Vec<f64>,
    pub solver: Solver,
    pub repetitions: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub multiplier: f64,
    pub repetition: usize,
    pub chain_break_fraction: f64,
    pub best_disparity: f64,
    pub best_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub multiplier: f64,
    pub mean_chain_break_fraction: f64,
    pub mean_best_disparity: f64,
}

/// For each multiplier and repetition: embed, sample the physical model,
/// unembed, and score the lowest-energy logical sample with `metric`.
/// Repetition `r` uses seed `derive_seed(seed, r)` for every multiplier.
pub fn chain_experiment<F>(
    model: &IsingModel,
    metric: F,
    config: &ChainExperimentConfig,
) -> Result<Vec<ChainRow>>
where
    F: Fn(&SpinVector) -> f64,
{
    if config.multipliers.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one multiplier is required".into(),
        ));
    }
    if config.repetitions == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be positive".into(),
        ));
    }
    if let Some(m) = config
        .multipliers
        .iter()
        .find(|m| !(m.is_finite() && **m > 0.0))
    {
        return Err(Error::InvalidArgument(format!(
            "multipliers must be positive (got {m})"
        )));
    }
    let max_coef = model.max_abs_coefficient();
    if max_coef == 0.0 {
        return Err(Error::ZeroModel);
    }
    let embedding = embed_uniform_chains(model, config.chain_length)?;
    let mut rows = Vec::new();
    for &multiplier in &config.multipliers {
        let embedded = apply_embedding(model, &embedding, multiplier * max_coef)?;
        for repetition in 0..config.repetitions {
            let seed = rng::derive_seed(config.seed, repetition as u64);
            let physical = config.solver.sample(&embedded.physical, seed)?;
            let (logical, stats) = unembed(&physical, &embedding, model, seed)?;
            let best = logical.best();
            rows.push(ChainRow {
                multiplier,
                repetition,
                chain_break_fraction: stats.chain_break_fraction,
                best_disparity: metric(&best.spins),
                best_energy: best.energy,
            });
        }
    }
    Ok(rows)
}

/// Per-multiplier means, in first-appearance order.
pub fn summarize(rows: &[ChainRow]) -> Vec<ChainSummary> {
    let mut order: Vec<f64> = Vec::new();
    for r in rows {
        if !order.contains(&r.multiplier) {
            order.push(r.multiplier);
        }
    }
    order
        .into_iter()
        .map(|multiplier| {
            let group: Vec<&ChainRow> =
                rows.iter().filter(|r| r.multiplier == multiplier).collect();
            let k = group.len() as f64;
            ChainSummary {
                multiplier,
                mean_chain_break_fraction: group
                    .iter()
                    .map(|r| r.chain_break_fraction)
                    .sum::<f64>()
                    / k,
                mean_best_disparity: group.iter().map(|r| r.best_disparity).sum::<f64>() / k,
            }
        })
        .collect()
}
