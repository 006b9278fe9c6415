//! Spin-to-assignment mapping and recursive bipartitioning into `2^m` parts.
//!
//! Each recursion node has a heap id (root 1, children `2k` and `2k + 1`) and
//! samples with seed `derive_seed(seed, id)`, so the result for `parts = 2`
//! is the first level of the result for any larger `parts` with the same seed.
//! The `+1` side of a split takes the lower half of the part indices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};
use crate::metrics;
use crate::rng;
use crate::samplers::{SampleSet, Solver};
use crate::workload::{Edge, GraphWorkload, Workload};

/// Indices with spin `+1`, then indices with spin `-1`.
pub fn assignment_from_spins(s: &SpinVector) -> (Vec<usize>, Vec<usize>) {
    (0..s.len()).partition(|&i| s.as_slice()[i] == 1)
}

/// The subgraph induced by `subset`, with nodes renumbered in `subset`
/// order. The returned map sends new indices back to original ones.
pub fn induced_subproblem(
    g: &GraphWorkload,
    subset: &[usize],
) -> Result<(GraphWorkload, Vec<usize>)> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("subset must be non-empty".into()));
    }
    let mut local = vec![usize::MAX; g.num_nodes()];
    for (k, &i) in subset.iter().enumerate() {
        if i >= g.num_nodes() {
            return Err(Error::InvalidArgument(format!("node {i} out of range")));
        }
        if local[i] != usize::MAX {
            return Err(Error::InvalidArgument(format!("node {i} listed twice")));
        }
        local[i] = k;
    }
    let nodes = subset.iter().map(|&i| g.node_weights()[i]).collect();
    let edges = g
        .edges()
        .iter()
        .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
        .map(|e| {
            let (a, b) = (local[e.u], local[e.v]);
            Edge {
                u: a.min(b),
                v: a.max(b),
                weight: e.weight,
            }
        })
        .collect();
    Ok((GraphWorkload::new(nodes, edges)?, subset.to_vec()))
}

/// One bipartition performed during the recursion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub node_id: u64,
    /// Original item indices handled by this node.
    pub subset: Vec<usize>,
    pub solver: String,
    /// Energy of the sample used for the split, or of the best sample on fallback.
    pub best_energy: f64,
    pub loads: (f64, f64),
    /// True when the samples offered no split with two non-empty sides.
    pub fallback: bool,
}

impl TraceEntry {
    pub fn disparity(&self) -> Option<f64> {
        metrics::solution_disparity(self.loads.0, self.loads.1).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionResult {
    pub parts: usize,
    /// Part index of every item.
    pub assignment: Vec<usize>,
    pub part_loads: Vec<f64>,
    /// Total weight of edges between different parts; 0 for grids.
    pub cut_weight: f64,
    pub trace: Vec<TraceEntry>,
}

impl PartitionResult {
    pub fn imbalance(&self) -> Result<Vec<f64>> {
        metrics::imbalance(&self.part_loads)
    }

    pub fn range(&self) -> f64 {
        metrics::range_metric(&self.part_loads)
    }

    pub fn members(&self, part: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == part)
            .collect()
    }
}

pub fn recursive_bipartition(
    workload: &Workload,
    parts: usize,
    solver: &Solver,
    gamma: f64,
    seed: u64,
) -> Result<PartitionResult> {
    recursive_bipartition_with_samples(workload, parts, solver, gamma, seed).map(|(r, _)| r)
}

/// As [`recursive_bipartition`], also returning every recursion node's
/// sample set keyed by node id.
pub fn recursive_bipartition_with_samples(
    workload: &Workload,
    parts: usize,
    solver: &Solver,
    gamma: f64,
    seed: u64,
) -> Result<(PartitionResult, Vec<(u64, SampleSet)>)> {
    if parts < 2 || !parts.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "parts must be a power of two >= 2 (got {parts})"
        )));
    }
    if parts > workload.len() {
        return Err(Error::InvalidArgument(format!(
            "parts ({parts}) exceeds the number of items ({})",
            workload.len()
        )));
    }
    let mut assignment = vec![0usize; workload.len()];
    let mut trace = Vec::new();
    let mut sets = Vec::new();
    if let Solver::RoundRobin = solver {
        for (k, a) in assignment.iter_mut().enumerate() {
            *a = k % parts;
        }
    } else {
        let ctx = Context {
            workload,
            solver,
            gamma,
            seed,
        };
        let all: Vec<usize> = (0..workload.len()).collect();
        ctx.split(
            &all,
            1,
            parts.trailing_zeros(),
            0,
            &mut assignment,
            &mut trace,
            &mut sets,
        )?;
    }

    let mut part_loads = vec![0.0; parts];
    for (i, &p) in assignment.iter().enumerate() {
        part_loads[p] += workload.item_weight(i);
    }
    let cut_weight = match workload {
        Workload::Grids(_) => 0.0,
        Workload::Graph(g) => g.cut_weight(|u, v| assignment[u] != assignment[v]),
    };
    Ok((
        PartitionResult {
            parts,
            assignment,
            part_loads,
            cut_weight,
            trace,
        },
        sets,
    ))
}

struct Context<'a> {
    workload: &'a Workload,
    solver: &'a Solver,
    gamma: f64,
    seed: u64,
}

impl Context<'_> {
    #[allow(clippy::too_many_arguments)]
    fn split(
        &self,
        items: &[usize],
        id: u64,
        levels: u32,
        first_part: usize,
        assignment: &mut [usize],
        trace: &mut Vec<TraceEntry>,
        sets: &mut Vec<(u64, SampleSet)>,
    ) -> Result<()> {
        if levels == 0 {
            for &i in items {
                assignment[i] = first_part;
            }
            return Ok(());
        }
        let (left, right) = if items.len() < 2 {
            // nothing to split; the sibling part stays empty
            (items.to_vec(), Vec::new())
        } else {
            let model = self.formulate(items)?;
            let set = self
                .solver
                .sample(&model, rng::derive_seed(self.seed, id))?;
            let chosen = set.sorted_by_energy().into_iter().find_map(|s| {
                let (a, b) = assignment_from_spins(&s.spins);
                (!a.is_empty() && !b.is_empty()).then_some((s.energy, a, b))
            });
            let (best_energy, fallback, a, b) = match chosen {
                Some((e, a, b)) => (e, false, a, b),
                None => {
                    let (a, b) = (0..items.len()).partition(|k| k % 2 == 0);
                    (set.best().energy, true, a, b)
                }
            };
            let left: Vec<usize> = a.iter().map(|&k| items[k]).collect();
            let right: Vec<usize> = b.iter().map(|&k| items[k]).collect();
            let load = |v: &[usize]| v.iter().map(|&i| self.workload.item_weight(i)).sum::<f64>();
            trace.push(TraceEntry {
                node_id: id,
                subset: items.to_vec(),
                solver: self.solver.name().into(),
                best_energy,
                loads: (load(&left), load(&right)),
                fallback,
            });
            sets.push((id, set));
            (left, right)
        };
        let half = 1usize << (levels - 1);
        self.split(
            &left,
            2 * id,
            levels - 1,
            first_part,
            assignment,
            trace,
            sets,
        )?;
        self.split(
            &right,
            2 * id + 1,
            levels - 1,
            first_part + half,
            assignment,
            trace,
            sets,
        )
    }

    fn formulate(&self, items: &[usize]) -> Result<IsingModel> {
        match self.workload {
            Workload::Grids(w) => Ok(IsingModel::from_number_partitioning(&w.subset(items)?)),
            Workload::Graph(g) => {
                let (sub, _) = induced_subproblem(g, items)?;
                IsingModel::from_graph_partitioning(&sub, self.gamma)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{brute_force, AnnealParams};
    use crate::workload::{generate_blastwave_grids, generate_cosmo_clique, GridWorkload};
    use proptest::prelude::*;

    fn grids(w: &[u64]) -> Workload {
        GridWorkload::new(w.to_vec()).unwrap().into()
    }

    #[test]
    fn spins_to_subsets() {
        let s = SpinVector::new(vec![1, -1, 1]).unwrap();
        assert_eq!(assignment_from_spins(&s), (vec![0, 2], vec![1]));
        assert_eq!(assignment_from_spins(&-&s), (vec![1], vec![0, 2]));
        assert_eq!(
            assignment_from_spins(&SpinVector::all_up(3)),
            (vec![0, 1, 2], vec![])
        );
    }

    #[test]
    fn induced_subgraphs() {
        let edges = (0..4)
            .flat_map(|u| {
                (u + 1..4).map(move |v| Edge {
                    u,
                    v,
                    weight: (u + v) as f64,
                })
            })
            .collect();
        let g = GraphWorkload::new(vec![1.0, 2.0, 3.0, 4.0], edges).unwrap();
        let (sub, map) = induced_subproblem(&g, &[0, 1]).unwrap();
        assert_eq!(sub.num_nodes(), 2);
        assert_eq!(sub.edges().len(), 1);
        assert_eq!(map, vec![0, 1]);
        let (single, _) = induced_subproblem(&g, &[2]).unwrap();
        assert_eq!(single.node_weights(), &[3.0]);
        assert!(single.edges().is_empty());
        let (rev, map) = induced_subproblem(&g, &[3, 1]).unwrap();
        assert_eq!(rev.node_weights(), &[4.0, 2.0]);
        assert_eq!(
            rev.edges(),
            &[Edge {
                u: 0,
                v: 1,
                weight: 4.0
            }]
        );
        assert_eq!(map, vec![3, 1]);
        assert!(induced_subproblem(&g, &[]).is_err());
    }

    #[test]
    fn symmetric_four_way() {
        let r = recursive_bipartition(&grids(&[10, 10, 10, 10]), 4, &Solver::BruteForce, 0.0, 0)
            .unwrap();
        assert_eq!(r.part_loads, vec![10.0; 4]);
        let mut parts = r.assignment.clone();
        parts.sort();
        assert_eq!(parts, vec![0, 1, 2, 3]);
        assert_eq!(r.trace.len(), 3);
    }

    #[test]
    fn small_exact_split() {
        let r = recursive_bipartition(&grids(&[1, 2, 3]), 2, &Solver::BruteForce, 0.0, 0).unwrap();
        let mut loads = r.part_loads.clone();
        loads.sort_by(f64::total_cmp);
        assert_eq!(loads, vec![3.0, 3.0]);
        assert_eq!(r.trace[0].disparity(), Some(0.0));
        assert_eq!(r.cut_weight, 0.0);
    }

    #[test]
    fn precondition_errors() {
        let w = grids(&[1, 2, 3, 4]);
        assert!(recursive_bipartition(&w, 3, &Solver::BruteForce, 0.0, 0).is_err());
        assert!(recursive_bipartition(&w, 1, &Solver::BruteForce, 0.0, 0).is_err());
        assert!(recursive_bipartition(&w, 8, &Solver::BruteForce, 0.0, 0).is_err());
    }

    #[test]
    fn round_robin_is_cyclic() {
        let r = recursive_bipartition(&grids(&[5, 1, 4, 2, 3]), 4, &Solver::RoundRobin, 0.0, 0)
            .unwrap();
        assert_eq!(r.assignment, vec![0, 1, 2, 3, 0]);
        assert_eq!(r.part_loads, vec![8.0, 1.0, 4.0, 2.0]);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn empty_side_falls_back_to_alternation() {
        // at gamma 0 the only ground states put everything on one side
        let edges = (0..3)
            .map(|u| Edge {
                u,
                v: u + 1,
                weight: 1.0,
            })
            .collect();
        let g = GraphWorkload::new(vec![1.0, 2.0, 3.0, 4.0], edges).unwrap();
        let r = recursive_bipartition(&g.into(), 2, &Solver::BruteForce, 0.0, 0).unwrap();
        assert!(r.trace[0].fallback);
        assert_eq!(r.trace[0].best_energy, 0.0);
        assert_eq!(r.assignment, vec![0, 1, 0, 1]);
        assert_eq!(r.cut_weight, 3.0);
    }

    #[test]
    fn singleton_subset_leaves_an_empty_part() {
        let r =
            recursive_bipartition(&grids(&[100, 1, 1, 1]), 4, &Solver::BruteForce, 0.0, 0).unwrap();
        assert_eq!(r.trace.len(), 2);
        let mut loads = r.part_loads.clone();
        loads.sort_by(f64::total_cmp);
        assert_eq!(loads, vec![0.0, 1.0, 2.0, 100.0]);
    }

    #[test]
    fn exact_splits_are_locally_optimal() {
        let w = generate_blastwave_grids(12, 5).unwrap();
        let workload: Workload = w.clone().into();
        let r = recursive_bipartition(&workload, 4, &Solver::BruteForce, 0.0, 1).unwrap();
        for entry in &r.trace {
            let sub = w.subset(&entry.subset).unwrap();
            let opt = brute_force(&IsingModel::from_number_partitioning(&sub))
                .unwrap()
                .best()
                .energy;
            assert_eq!(entry.best_energy, opt);
            let diff = entry.loads.0 - entry.loads.1;
            assert_eq!(diff * diff, opt);
        }
    }

    #[test]
    fn two_way_is_prefix_of_deeper_recursions() {
        let g = generate_cosmo_clique(3, 2).unwrap();
        let solver = Solver::SimulatedAnnealing(AnnealParams {
            num_reads: 10,
            num_sweeps: 100,
            ..Default::default()
        });
        let w: Workload = g.into();
        let two = recursive_bipartition(&w, 2, &solver, 1.0, 9).unwrap();
        let eight = recursive_bipartition(&w, 8, &solver, 1.0, 9).unwrap();
        assert_eq!(two.trace[0], eight.trace[0]);
        for (a, b) in two.assignment.iter().zip(&eight.assignment) {
            assert_eq!(*a, b / 4);
        }
        assert!(eight.cut_weight >= two.cut_weight);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn conserves_items_and_work(weights in prop::collection::vec(1u64..1000, 8..14), levels in 1u32..4, seed in 0u64..1000) {
            let w = grids(&weights);
            let parts = 1usize << levels;
            let solver = Solver::SteepestDescent { num_reads: 4 };
            let r = recursive_bipartition(&w, parts, &solver, 0.0, seed).unwrap();
            prop_assert_eq!(r.assignment.len(), weights.len());
            prop_assert!(r.assignment.iter().all(|&p| p < parts));
            let total: u64 = weights.iter().sum();
            prop_assert_eq!(r.part_loads.iter().sum::<f64>(), total as f64);
            let again = recursive_bipartition(&w, parts, &solver, 0.0, seed).unwrap();
            prop_assert_eq!(r, again);
        }
    }
}
