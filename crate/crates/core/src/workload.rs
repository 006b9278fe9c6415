//! Workload representations, the JSON file schema, and synthetic generators.
//!
//! A workload file is a single self-describing JSON document:
//!
//! ```json
//! {"kind": "grids", "weights": [3, 5, 8], "metadata": {"generator": "blastwave"}}
//! {"kind": "graph", "nodes": [1.0, 2.0], "edges": [[0, 1, 0.5]], "metadata": {}}
//! ```
//!
//! `metadata` is optional on input and always written on output.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Cell counts per AMR patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWorkload {
    weights: Vec<u64>,
}

impl GridWorkload {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::validation("weights", "must be non-empty"));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::validation(
                format!("weights[{i}]"),
                "must be >= 1 (got 0)",
            ));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn subset(&self, items: &[usize]) -> Result<Self> {
        Self::new(items.iter().map(|&i| self.weights[i]).collect())
    }
}

/// An undirected weighted edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Cell graph: node weights are intra-cell task times, edge weights inter-cell task times.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphWorkload {
    node_weights: Vec<f64>,
    edges: Vec<Edge>,
}

impl GraphWorkload {
    pub fn new(node_weights: Vec<f64>, edges: Vec<Edge>) -> Result<Self> {
        if node_weights.is_empty() {
            return Err(Error::validation("nodes", "must be non-empty"));
        }
        for (i, &w) in node_weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::validation(
                    format!("nodes[{i}]"),
                    format!("must be positive and finite (got {w})"),
                ));
            }
        }
        let n = node_weights.len();
        let mut seen = BTreeSet::new();
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    format!("node index out of range for {n} nodes"),
                ));
            }
            if e.u == e.v {
                return Err(Error::validation(format!("edges[{k}]"), "self-loop"));
            }
            if e.u > e.v {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    "endpoints must satisfy u < v",
                ));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    format!("weight must be positive and finite (got {})", e.weight),
                ));
            }
            if !seen.insert((e.u, e.v)) {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    format!("duplicate edge ({}, {})", e.u, e.v),
                ));
            }
        }
        Ok(Self {
            node_weights,
            edges,
        })
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.node_weights.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.node_weights.iter().sum()
    }

    /// Total weight of edges whose endpoints `separated` reports as split.
    pub fn cut_weight(&self, separated: impl Fn(usize, usize) -> bool) -> f64 {
        // fold from +0.0; an empty f64 sum is -0.0
        self.edges
            .iter()
            .filter(|e| separated(e.u, e.v))
            .fold(0.0, |acc, e| acc + e.weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkloadKind {
    Grids,
    Graph,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Grids(GridWorkload),
    Graph(GraphWorkload),
}

impl Workload {
    pub fn kind(&self) -> WorkloadKind {
        match self {
            Workload::Grids(_) => WorkloadKind::Grids,
            Workload::Graph(_) => WorkloadKind::Graph,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Workload::Grids(g) => g.len(),
            Workload::Graph(g) => g.num_nodes(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Item weight as a real, whichever the representation.
    pub fn item_weight(&self, i: usize) -> f64 {
        match self {
            Workload::Grids(g) => g.weights()[i] as f64,
            Workload::Graph(g) => g.node_weights()[i],
        }
    }
}

impl From<GridWorkload> for Workload {
    fn from(w: GridWorkload) -> Self {
        Workload::Grids(w)
    }
}

impl From<GraphWorkload> for Workload {
    fn from(g: GraphWorkload) -> Self {
        Workload::Graph(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadFile {
    pub payload: Workload,
    pub metadata: BTreeMap<String, String>,
}

impl WorkloadFile {
    pub fn new(payload: impl Into<Workload>) -> Self {
        Self {
            payload: payload.into(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn kind(&self) -> WorkloadKind {
        self.payload.kind()
    }
}

// Wire form. Integers are read signed so negative weights surface as
// validation errors naming the field rather than as parse errors.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawWorkload {
    Grids {
        weights: Vec<i64>,
        #[serde(default)]
        metadata: BTreeMap<String, String>,
    },
    Graph {
        nodes: Vec<f64>,
        edges: Vec<(i64, i64, f64)>,
        #[serde(default)]
        metadata: BTreeMap<String, String>,
    },
}

pub fn load_workload(bytes: &[u8]) -> Result<WorkloadFile> {
    let raw: RawWorkload =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    match raw {
        RawWorkload::Grids { weights, metadata } => {
            let mut out = Vec::with_capacity(weights.len());
            for (i, w) in weights.into_iter().enumerate() {
                if w < 1 {
                    return Err(Error::validation(
                        format!("weights[{i}]"),
                        format!("must be >= 1 (got {w})"),
                    ));
                }
                out.push(w as u64);
            }
            Ok(WorkloadFile {
                payload: GridWorkload::new(out)?.into(),
                metadata,
            })
        }
        RawWorkload::Graph {
            nodes,
            edges,
            metadata,
        } => {
            let mut out = Vec::with_capacity(edges.len());
            for (k, (u, v, weight)) in edges.into_iter().enumerate() {
                if u < 0 || v < 0 {
                    return Err(Error::validation(
                        format!("edges[{k}]"),
                        "negative node index",
                    ));
                }
                out.push(Edge {
                    u: u as usize,
                    v: v as usize,
                    weight,
                });
            }
            Ok(WorkloadFile {
                payload: GraphWorkload::new(nodes, out)?.into(),
                metadata,
            })
        }
    }
}

pub fn save_workload(file: &WorkloadFile) -> Vec<u8> {
    let raw = match &file.payload {
        Workload::Grids(g) => RawWorkload::Grids {
            weights: g.weights().iter().map(|&w| w as i64).collect(),
            metadata: file.metadata.clone(),
        },
        Workload::Graph(g) => RawWorkload::Graph {
            nodes: g.node_weights().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| (e.u as i64, e.v as i64, e.weight))
                .collect(),
            metadata: file.metadata.clone(),
        },
    };
    let mut bytes = serde_json::to_vec_pretty(&raw).expect("workload serialises");
    bytes.push(b'\n');
    bytes
}

const GENERATOR_STREAM: u64 = 0x6c62_6765_6e00;

/// Heavy-tailed patch sizes: 80% uniform in [500, 5000], 20% uniform in [5000, 50000].
pub fn generate_blastwave_grids(num_patches: usize, seed: u64) -> Result<GridWorkload> {
    if num_patches < 2 {
        return Err(Error::InvalidArgument(format!(
            "num_patches must be >= 2 (got {num_patches})"
        )));
    }
    let mut rng = rng::stream(seed, GENERATOR_STREAM);
    let weights = (0..num_patches)
        .map(|_| {
            if rng.random_bool(0.2) {
                rng.random_range(5_000..=50_000)
            } else {
                rng.random_range(500..=5_000)
            }
        })
        .collect();
    GridWorkload::new(weights)
}

/// Cubic periodic cell grid of `side^3` cells; cells within Chebyshev distance
/// one (with wrap-around) share an edge. For `side == 3` this is the complete
/// graph on 27 nodes.
///
/// Node weights are log-normal(0, 0.75) rescaled to mean 1; edge weights are
/// uniform in [0.01, 0.2].
pub fn generate_cosmo_clique(side: usize, seed: u64) -> Result<GraphWorkload> {
    if side < 3 {
        return Err(Error::InvalidArgument(format!(
            "side must be >= 3 (got {side})"
        )));
    }
    let n = side * side * side;
    let mut rng = rng::stream(seed, GENERATOR_STREAM + 1);
    let lognormal = LogNormal::new(0.0, 0.75).expect("valid log-normal parameters");
    let mut nodes: Vec<f64> = (0..n).map(|_| lognormal.sample(&mut rng)).collect();
    let mean = nodes.iter().sum::<f64>() / n as f64;
    for w in &mut nodes {
        *w /= mean;
    }

    let index = |x: usize, y: usize, z: usize| x + side * (y + side * z);
    let mut pairs = BTreeSet::new();
    for z in 0..side {
        for y in 0..side {
            for x in 0..side {
                let u = index(x, y, z);
                for dz in [side - 1, 0, 1] {
                    for dy in [side - 1, 0, 1] {
                        for dx in [side - 1, 0, 1] {
                            let v = index((x + dx) % side, (y + dy) % side, (z + dz) % side);
                            if u < v {
                                pairs.insert((u, v));
                            }
                        }
                    }
                }
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(u, v)| Edge {
            u,
            v,
            weight: rng.random_range(0.01..=0.2),
        })
        .collect();
    GraphWorkload::new(nodes, edges)
}
