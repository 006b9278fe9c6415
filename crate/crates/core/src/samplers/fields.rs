use crate::ising::IsingModel;

/// Adjacency-list view of a model for single-spin-flip dynamics.
///
/// `field(i) = h_i + Σ_j J_ij s_j`, and flipping spin `i` changes the energy
/// by `-2 s_i field(i)`.
#[derive(Debug, Clone)]
pub(crate) struct CouplingGraph {
    pub h: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl CouplingGraph {
    pub fn new(model: &IsingModel) -> Self {
        let n = model.num_vars();
        let mut degree = vec![0usize; n];
        for &(i, j) in model.couplings().keys() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for (&(i, j), &v) in model.couplings() {
            targets[cursor[i]] = j as u32;
            weights[cursor[i]] = v;
            cursor[i] += 1;
            targets[cursor[j]] = i as u32;
            weights[cursor[j]] = v;
            cursor[j] += 1;
        }
        Self {
            h: model.h().to_vec(),
            offsets,
            targets,
            weights,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.h.len()
    }

    #[inline]
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&j, &w)| (j as usize, w))
    }

    pub fn local_fields(&self, spins: &[i8]) -> Vec<f64> {
        (0..self.num_vars())
            .map(|i| {
                self.h[i]
                    + self
                        .neighbours(i)
                        .map(|(j, w)| w * spins[j] as f64)
                        .sum::<f64>()
            })
            .collect()
    }

    /// Flips spin `i` and updates the neighbouring fields.
    #[inline]
    pub fn flip(&self, i: usize, spins: &mut [i8], fields: &mut [f64]) {
        spins[i] = -spins[i];
        let delta = 2.0 * spins[i] as f64;
        let range = self.offsets[i]..self.offsets[i + 1];
        for (&j, &w) in self.targets[range.clone()].iter().zip(&self.weights[range]) {
            fields[j as usize] += w * delta;
        }
    }

    /// Energy without the offset.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.num_vars() {
            let si = spins[i] as f64;
            e += self.h[i] * si;
            for (j, w) in self.neighbours(i) {
                if j > i {
                    e += w * si * spins[j] as f64;
                }
            }
        }
        e
    }
}
