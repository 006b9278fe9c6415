//! Evaluation quantities: imbalance, range, solution disparity, success rate
//! against a baseline, Pareto fronts, dominance counts and performance ratios.
//!
//! Everything here works in raw workload units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::SpinVector;
use crate::samplers::SampleSet;
use crate::workload::Workload;

/// One solution in the (disparity, cut weight) objective plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub disparity: f64,
    pub cut_weight: f64,
    pub source: String,
    pub gamma: f64,
}

impl ObjectivePoint {
    pub fn new(disparity: f64, cut_weight: f64, source: impl Into<String>, gamma: f64) -> Self {
        Self {
            disparity,
            cut_weight,
            source: source.into(),
            gamma,
        }
    }

    /// Weak dominance with at least one strict improvement.
    pub fn dominates(&self, other: &ObjectivePoint) -> bool {
        self.disparity <= other.disparity
            && self.cut_weight <= other.cut_weight
            && (self.disparity < other.disparity || self.cut_weight < other.cut_weight)
    }

    /// Both objectives no worse than `other`'s.
    pub fn weakly_dominates(&self, other: &ObjectivePoint) -> bool {
        self.disparity <= other.disparity && self.cut_weight <= other.cut_weight
    }
}

/// Per-processor `|w_i - mean| / total * 100`.
pub fn imbalance(loads: &[f64]) -> Result<Vec<f64>> {
    if loads.is_empty() {
        return Err(Error::InvalidArgument("no loads".into()));
    }
    let total: f64 = loads.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    let mean = total / loads.len() as f64;
    Ok(loads
        .iter()
        .map(|w| (w - mean).abs() / total * 100.0)
        .collect())
}

/// Largest minus smallest load; 0 for no loads.
pub fn range_metric(loads: &[f64]) -> f64 {
    let max = loads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = loads.iter().copied().fold(f64::INFINITY, f64::min);
    if loads.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// `|w1 - w2| / (0.5 (w1 + w2))`, in `[0, 2]` for nonnegative loads.
pub fn solution_disparity(w1: f64, w2: f64) -> Result<f64> {
    let total = w1 + w2;
    if total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    Ok((w1 - w2).abs() / (0.5 * total))
}

/// Summed item weight on the `+1` and `-1` sides.
pub fn bipartition_loads(workload: &Workload, spins: &SpinVector) -> Result<(f64, f64)> {
    if spins.len() != workload.len() {
        return Err(Error::LengthMismatch {
            expected: workload.len(),
            found: spins.len(),
        });
    }
    let mut loads = (0.0, 0.0);
    for (i, &s) in spins.as_slice().iter().enumerate() {
        if s == 1 {
            loads.0 += workload.item_weight(i);
        } else {
            loads.1 += workload.item_weight(i);
        }
    }
    Ok(loads)
}

pub fn spin_disparity(workload: &Workload, spins: &SpinVector) -> Result<f64> {
    let (a, b) = bipartition_loads(workload, spins)?;
    solution_disparity(a, b)
}

/// Fraction of samples whose disparity is strictly below `baseline_disparity`.
pub fn success_rate(
    samples: &SampleSet,
    baseline_disparity: f64,
    workload: &Workload,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let mut wins = 0usize;
    for s in &samples.samples {
        if spin_disparity(workload, &s.spins)? < baseline_disparity {
            wins += 1;
        }
    }
    Ok(wins as f64 / samples.len() as f64)
}

/// Non-dominated points, sorted by disparity then cut weight. Points with
/// identical objectives are collapsed to the first occurrence.
pub fn pareto_front(points: &[ObjectivePoint]) -> Vec<ObjectivePoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        p.disparity
            .total_cmp(&q.disparity)
            .then(p.cut_weight.total_cmp(&q.cut_weight))
            .then(a.cmp(&b))
    });
    // after the sort a point survives iff its cut is strictly below every
    // earlier survivor's cut
    let mut front: Vec<ObjectivePoint> = Vec::new();
    let mut best_cut = f64::INFINITY;
    for i in order {
        let p = &points[i];
        if p.cut_weight < best_cut {
            best_cut = p.cut_weight;
            front.push(p.clone());
        }
    }
    front
}

/// Fraction of `points` that dominate `reference`.
pub fn dominance_fraction(points: &[ObjectivePoint], reference: &ObjectivePoint) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points".into()));
    }
    let n = points.iter().filter(|p| p.dominates(reference)).count();
    Ok(n as f64 / points.len() as f64)
}

/// One component of a performance ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    /// The candidate component is zero and the baseline's is not.
    Infinite,
}

impl Ratio {
    fn of(num: f64, den: f64) -> Ratio {
        if den == 0.0 {
            if num == 0.0 {
                Ratio::Finite(1.0)
            } else {
                Ratio::Infinite
            }
        } else {
            Ratio::Finite(num / den)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Ratio::Finite(v) => v,
            Ratio::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

/// `(baseline.disparity / candidate.disparity, baseline.cut / candidate.cut)`;
/// values above 1 favour the candidate. `0/0` counts as parity.
pub fn performance_ratio(baseline: &ObjectivePoint, candidate: &ObjectivePoint) -> (Ratio, Ratio) {
    (
        Ratio::of(baseline.disparity, candidate.disparity),
        Ratio::of(baseline.cut_weight, candidate.cut_weight),
    )
}
