use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingModel;

use super::{random_spins, run_reads, CouplingGraph, SampleSet, SamplerParams};

/// Metropolis simulated-annealing schedule. Inverse temperatures are in units
/// of the normalised model (largest coefficient magnitude 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub num_reads: usize,
    pub num_sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            num_reads: 100,
            num_sweeps: 1000,
            beta_start: 0.1,
            beta_end: 5.0,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.num_sweeps == 0 {
            return Err(Error::InvalidArgument(
                "num_reads and num_sweeps must be positive".into(),
            ));
        }
        if !(self.beta_start > 0.0 && self.beta_start < self.beta_end && self.beta_end.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "need 0 < beta_start < beta_end (got {} and {})",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// A schedule scaled to `model`: at `beta_start` the costliest single
    /// flip is accepted with probability 1/2, at `beta_end` the cheapest
    /// non-zero flip with probability 1/100. Flip costs are bounded per spin
    /// by `2(|h_i| + Σ_j |J_ij|)` from above and `2 min(|h_i|, |J_ij|)` from
    /// below, on the normalised model.
    pub fn adaptive(model: &IsingModel, num_reads: usize, num_sweeps: usize) -> Result<Self> {
        let f = model.max_abs_coefficient();
        if f == 0.0 {
            return Err(Error::ZeroModel);
        }
        let n = model.num_vars();
        let mut upper = vec![0.0; n];
        let mut lower = vec![f64::INFINITY; n];
        for (i, &h) in model.h().iter().enumerate() {
            upper[i] += h.abs();
            if h != 0.0 {
                lower[i] = h.abs();
            }
        }
        for (&(i, j), &v) in model.couplings() {
            for k in [i, j] {
                upper[k] += v.abs();
                if v != 0.0 {
                    lower[k] = lower[k].min(v.abs());
                }
            }
        }
        let max_delta = 2.0 * upper.iter().copied().fold(0.0, f64::max) / f;
        let min_delta = 2.0 * lower.iter().copied().fold(f64::INFINITY, f64::min) / f;
        let beta_start = 2f64.ln() / max_delta;
        let beta_end = (100f64.ln() / min_delta).max(2.0 * beta_start);
        Ok(Self {
            num_reads,
            num_sweeps,
            beta_start,
            beta_end,
        })
    }

    /// Geometric interpolation from `beta_start` to `beta_end`, one value per sweep.
    pub fn beta_schedule(&self) -> Vec<f64> {
        if self.num_sweeps == 1 {
            return vec![self.beta_end];
        }
        let ratio = (self.beta_end / self.beta_start).ln() / (self.num_sweeps - 1) as f64;
        (0..self.num_sweeps)
            .map(|k| self.beta_start * (ratio * k as f64).exp())
            .collect()
    }
}

pub fn simulated_annealing(
    model: &IsingModel,
    params: &AnnealParams,
    seed: u64,
) -> Result<SampleSet> {
    params.validate()?;
    let graph = match model.normalize() {
        Ok(normalized) => CouplingGraph::new(&normalized),
        // constant model: every state is optimal
        Err(Error::ZeroModel) => CouplingGraph::new(model),
        Err(e) => return Err(e),
    };
    let schedule = params.beta_schedule();
    run_reads(
        model,
        params.num_reads,
        seed,
        "simulated_annealing",
        SamplerParams::SimulatedAnnealing(*params),
        |rng| {
            let n = graph.num_vars();
            let mut spins = random_spins(n, rng);
            let mut fields = graph.local_fields(&spins);
            for &beta in &schedule {
                for i in 0..n {
                    let delta = -2.0 * spins[i] as f64 * fields[i];
                    if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                        graph.flip(i, &mut spins, &mut fields);
                    }
                }
            }
            spins
        },
    )
}
