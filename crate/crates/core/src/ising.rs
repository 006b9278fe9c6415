//! Ising models over ±1 spins and the two load-balancing formulations.
//!
//! Energy convention: `E(s) = offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::workload::{GraphWorkload, GridWorkload};

/// Assignment of ±1 to every variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(i) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::validation(format!("spins[{i}]"), "must be +1 or -1"));
        }
        Ok(Self(spins))
    }

    /// Spins are `+1` where `bit` is true.
    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(|b| if b { 1 } else { -1 }).collect())
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Internal constructor for sampler output that is ±1 by construction.
    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        Self(spins)
    }
}

impl TryFrom<Vec<i8>> for SpinVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(s: SpinVector) -> Self {
        s.0
    }
}

impl std::ops::Neg for &SpinVector {
    type Output = SpinVector;

    fn neg(self) -> SpinVector {
        self.flipped()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    num_vars: usize,
    h: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
    scale: f64,
}

impl IsingModel {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            h: vec![0.0; num_vars],
            couplings: BTreeMap::new(),
            offset: 0.0,
            scale: 1.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.couplings.get(&key).copied().unwrap_or(0.0)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn set_field(&mut self, i: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        check_finite("h", value)?;
        self.h[i] = value;
        Ok(())
    }

    pub fn add_field(&mut self, i: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        check_finite("h", value)?;
        self.h[i] += value;
        Ok(())
    }

    /// Adds `value` to `J_ij`; the pair is stored with the smaller index first.
    pub fn add_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::validation(format!("J[{i},{j}]"), "self-coupling"));
        }
        check_finite("J", value)?;
        let key = if i < j { (i, j) } else { (j, i) };
        *self.couplings.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.num_vars {
            return Err(Error::validation(
                format!("variable {i}"),
                format!("out of range for {} variables", self.num_vars),
            ));
        }
        Ok(())
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.h
            .iter()
            .chain(self.couplings.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn has_fields(&self) -> bool {
        self.h.iter().any(|&v| v != 0.0)
    }

    pub fn energy(&self, s: &SpinVector) -> Result<f64> {
        if s.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                found: s.len(),
            });
        }
        Ok(self.energy_unchecked(s.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, s: &[i8]) -> f64 {
        let mut e = self.offset;
        for (hi, &si) in self.h.iter().zip(s) {
            if *hi != 0.0 {
                e += hi * si as f64;
            }
        }
        for (&(i, j), &jij) in &self.couplings {
            e += jij * (s[i] * s[j]) as f64;
        }
        e
    }

    /// Divides every coefficient and the offset by the largest coefficient
    /// magnitude. `scale` accumulates the divisor so raw energies can be
    /// recovered as `energy * scale`.
    pub fn normalize(&self) -> Result<IsingModel> {
        let f = self.max_abs_coefficient();
        if f == 0.0 {
            return Err(Error::ZeroModel);
        }
        Ok(IsingModel {
            num_vars: self.num_vars,
            h: self.h.iter().map(|v| v / f).collect(),
            couplings: self.couplings.iter().map(|(&k, v)| (k, v / f)).collect(),
            offset: self.offset / f,
            scale: self.scale * f,
        })
    }

    /// Number partitioning: `E(s) = (Σ n_i s_i)^2`, so `h = 0`,
    /// `J_ij = 2 n_i n_j` and `offset = Σ n_i^2`.
    ///
    /// Coefficients are products of integers and every partial energy sum is
    /// an integer, so energies are exact while `(Σ n_i)^2 < 2^53`.
    pub fn from_number_partitioning(w: &GridWorkload) -> IsingModel {
        let n = w.weights();
        let mut m = IsingModel::new(n.len());
        let mut offset: u128 = 0;
        for (i, &ni) in n.iter().enumerate() {
            offset += (ni as u128) * (ni as u128);
            for (j, &nj) in n.iter().enumerate().skip(i + 1) {
                let jij = 2 * (ni as u128) * (nj as u128);
                m.couplings.insert((i, j), jij as f64);
            }
        }
        m.offset = offset as f64;
        m
    }

    /// Graph bipartitioning `H = γ (Σ w_i s_i)^2 + Σ_E e_uv (1 - s_u s_v) / 2`.
    pub fn from_graph_partitioning(g: &GraphWorkload, gamma: f64) -> Result<IsingModel> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and non-negative (got {gamma})"
            )));
        }
        let w = g.node_weights();
        let mut m = IsingModel::new(w.len());
        let mut offset = 0.0;
        if gamma > 0.0 {
            for (i, &wi) in w.iter().enumerate() {
                offset += gamma * wi * wi;
                for (j, &wj) in w.iter().enumerate().skip(i + 1) {
                    m.couplings.insert((i, j), 2.0 * gamma * wi * wj);
                }
            }
        }
        for e in g.edges() {
            offset += e.weight / 2.0;
            *m.couplings.entry((e.u, e.v)).or_insert(0.0) -= e.weight / 2.0;
        }
        m.offset = offset;
        Ok(m)
    }

    pub fn to_export(&self) -> ModelExport {
        ModelExport {
            num_vars: self.num_vars,
            offset: self.offset,
            scale: self.scale,
            h: self
                .h
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
            couplings: self
                .couplings
                .iter()
                .map(|(&(i, j), &v)| (i, j, v))
                .collect(),
        }
    }
}

fn check_finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(
            what,
            format!("coefficient must be finite (got {v})"),
        ))
    }
}

/// Debug dump of a model: sparse `h` entries and `[i, j, J_ij]` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelExport {
    pub num_vars: usize,
    pub offset: f64,
    pub scale: f64,
    pub h: Vec<(usize, f64)>,
    pub couplings: Vec<(usize, usize, f64)>,
}

/// Raw objectives of a bipartition: `|Σ w_i s_i|` and the total weight of cut edges.
pub fn graph_objectives(g: &GraphWorkload, s: &SpinVector) -> Result<(f64, f64)> {
    if s.len() != g.num_nodes() {
        return Err(Error::LengthMismatch {
            expected: g.num_nodes(),
            found: s.len(),
        });
    }
    let s = s.as_slice();
    let signed: f64 = g
        .node_weights()
        .iter()
        .zip(s)
        .map(|(w, &si)| w * si as f64)
        .sum();
    let cut = g.cut_weight(|u, v| s[u] != s[v]);
    Ok((signed.abs(), cut))
}
