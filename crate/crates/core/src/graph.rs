//! Graph data model, node permutations and the deterministic random stream.
//!
//! A [`Graph`] is a simple graph on nodes `1..=n`. Edge order is part of the
//! value: serializations with a verbatim ordering rule print edges exactly in
//! stored order, so constructors never re-sort.

use std::collections::HashSet;
use std::fmt;

use rand_core::Rng;
use rand_pcg::Pcg32;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub type NodeId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} is outside 1..={n}")]
    NodeOutOfRange { node: i64, n: u32 },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("either every edge carries a weight or none does")]
    MixedWeights,
    #[error("invalid edge weight {0:?}: weights must be finite and positive")]
    InvalidWeight(String),
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("permutation has size {got}, graph has {expected} nodes")]
    PermutationSize { expected: u32, got: u32 },
    #[error("mapping is not a bijection on 1..={0}")]
    NotABijection(u32),
    #[error("cannot draw a permutation of an empty domain")]
    EmptyDomain,
    #[error("no path from node {from} to node {to}")]
    NoPath { from: NodeId, to: NodeId },
    #[error("graph is not a directed acyclic graph")]
    NotADag,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("malformed graph record: {0}")]
    Malformed(String),
}

/// Edge weight kept as the decimal text it was written with.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    text: String,
    value: f64,
}

impl Weight {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let text = text.trim();
        let value: f64 = text.parse().map_err(|_| GraphError::InvalidWeight(text.to_string()))?;
        if !value.is_finite() || value <= 0.0 {
            return Err(GraphError::InvalidWeight(text.to_string()));
        }
        Ok(Weight { text: text.to_string(), value })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: Option<Weight>,
}

impl Edge {
    pub fn new(source: NodeId, target: NodeId) -> Self {
        Edge { source, target, weight: None }
    }

    pub fn weighted(source: NodeId, target: NodeId, weight: Weight) -> Self {
        Edge { source, target, weight: Some(weight) }
    }

    pub fn reversed(&self) -> Self {
        Edge { source: self.target, target: self.source, weight: self.weight.clone() }
    }

    /// Weight as a number, 1 for unweighted edges.
    pub fn cost(&self) -> f64 {
        self.weight.as_ref().map_or(1.0, Weight::value)
    }

    fn key(&self, directed: bool) -> (NodeId, NodeId) {
        if directed || self.source <= self.target {
            (self.source, self.target)
        } else {
            (self.target, self.source)
        }
    }
}

/// Simple graph on nodes `1..=n`, optionally directed and/or weighted.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: u32,
    directed: bool,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: u32, directed: bool, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let weighted = edges.first().is_some_and(|e| e.weight.is_some());
        for e in &edges {
            for node in [e.source, e.target] {
                if node == 0 || node > n {
                    return Err(GraphError::NodeOutOfRange { node: node as i64, n });
                }
            }
            if e.source == e.target {
                return Err(GraphError::SelfLoop(e.source));
            }
            if e.weight.is_some() != weighted {
                return Err(GraphError::MixedWeights);
            }
            let key = e.key(directed);
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
        }
        Ok(Graph { n, directed, edges })
    }

    /// Unweighted graph from `(u, v)` pairs.
    pub fn from_pairs(n: u32, directed: bool, pairs: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        Graph::new(n, directed, pairs.iter().map(|&(u, v)| Edge::new(u, v)).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.edges.first().is_some_and(|e| e.weight.is_some())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        1..=self.n
    }

    /// Same graph with a different stored edge order. The new sequence must
    /// describe exactly the same edge set.
    pub fn with_edge_order(&self, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let g = Graph::new(self.n, self.directed, edges)?;
        if g.canonical_edges() != self.canonical_edges() {
            return Err(GraphError::Malformed("reordered edge sequence changes the edge set".into()));
        }
        Ok(g)
    }

    /// Edges normalized to `(min, max)` for undirected graphs and sorted by
    /// `(source, target)`.
    pub fn canonical_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let (s, t) = e.key(self.directed);
                Edge { source: s, target: t, weight: e.weight.clone() }
            })
            .collect();
        out.sort_by_key(|e| (e.source, e.target));
        out
    }

    pub fn canonical(&self) -> Graph {
        Graph { n: self.n, directed: self.directed, edges: self.canonical_edges() }
    }

    /// Equality of labeled edge sets, ignoring stored order and orientation of
    /// undirected edges.
    pub fn same_edges(&self, other: &Graph) -> bool {
        self.n == other.n && self.directed == other.directed && self.canonical_edges() == other.canonical_edges()
    }

    /// Image of the graph under `p`. The result keeps the image sequence of
    /// the stored edges, it is not re-sorted.
    pub fn relabel(&self, p: &Permutation) -> Result<Graph, GraphError> {
        if p.len() != self.n {
            return Err(GraphError::PermutationSize { expected: self.n, got: p.len() });
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { source: p.apply(e.source), target: p.apply(e.target), weight: e.weight.clone() })
            .collect();
        Ok(Graph { n: self.n, directed: self.directed, edges })
    }

    pub fn record(&self) -> GraphRecord {
        GraphRecord {
            n: self.n,
            directed: self.directed,
            edges: self
                .edges
                .iter()
                .map(|e| {
                    let mut row = vec![serde_json::Value::from(e.source), serde_json::Value::from(e.target)];
                    if let Some(w) = &e.weight {
                        row.push(weight_json(w));
                    }
                    row
                })
                .collect(),
        }
    }
}

fn weight_json(w: &Weight) -> serde_json::Value {
    // integers and plain decimals stay numbers, anything serde would reformat stays text
    match serde_json::from_str::<serde_json::Number>(w.text()) {
        Ok(num) if num.to_string() == w.text() => serde_json::Value::Number(num),
        _ => serde_json::Value::String(w.text().to_string()),
    }
}

/// On-disk graph record: `{"n": int, "directed": bool, "edges": [[u, v], ...]}`
/// with an optional third weight entry per edge. Edge order is preserved.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphRecord {
    pub n: u32,
    #[serde(default)]
    pub directed: bool,
    pub edges: Vec<Vec<serde_json::Value>>,
}

impl TryFrom<&GraphRecord> for Graph {
    type Error = GraphError;

    fn try_from(rec: &GraphRecord) -> Result<Self, Self::Error> {
        let node = |v: &serde_json::Value| -> Result<NodeId, GraphError> {
            let raw = v.as_i64().ok_or_else(|| GraphError::Malformed(format!("node id {v} is not an integer")))?;
            if raw < 1 || raw > rec.n as i64 {
                return Err(GraphError::NodeOutOfRange { node: raw, n: rec.n });
            }
            Ok(raw as NodeId)
        };
        let mut edges = Vec::with_capacity(rec.edges.len());
        for row in &rec.edges {
            let edge = match row.as_slice() {
                [u, v] => Edge::new(node(u)?, node(v)?),
                [u, v, w] => {
                    let text = match w {
                        serde_json::Value::Number(num) => num.to_string(),
                        serde_json::Value::String(s) => s.clone(),
                        other => return Err(GraphError::InvalidWeight(other.to_string())),
                    };
                    Edge::weighted(node(u)?, node(v)?, Weight::parse(&text)?)
                }
                _ => return Err(GraphError::Malformed(format!("edge entry {row:?} must have 2 or 3 items"))),
            };
            edges.push(edge);
        }
        Graph::new(rec.n, rec.directed, edges)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = GraphRecord::deserialize(d)?;
        Graph::try_from(&rec).map_err(serde::de::Error::custom)
    }
}

/// Bijection on `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<NodeId>,
}

impl Permutation {
    pub fn identity(n: u32) -> Self {
        Permutation { mapping: (1..=n).collect() }
    }

    /// `mapping[i]` is the image of node `i + 1`.
    pub fn from_mapping(mapping: Vec<NodeId>) -> Result<Self, GraphError> {
        let n = mapping.len() as u32;
        let mut seen = vec![false; mapping.len() + 1];
        for &v in &mapping {
            if v == 0 || v > n || std::mem::replace(&mut seen[v as usize], true) {
                return Err(GraphError::NotABijection(n));
            }
        }
        Ok(Permutation { mapping })
    }

    /// Uniform permutation via Fisher–Yates.
    pub fn random(n: u32, rng: &mut RngStream) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyDomain);
        }
        let mut mapping: Vec<NodeId> = (1..=n).collect();
        rng.shuffle(&mut mapping);
        Ok(Permutation { mapping })
    }

    pub fn len(&self) -> u32 {
        self.mapping.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, u: NodeId) -> NodeId {
        self.mapping[(u - 1) as usize]
    }

    pub fn mapping(&self) -> &[NodeId] {
        &self.mapping
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &v) in self.mapping.iter().enumerate() {
            inv[(v - 1) as usize] = i as NodeId + 1;
        }
        Permutation { mapping: inv }
    }
}

pub fn random_permutation(n: u32, rng: &mut RngStream) -> Result<Permutation, GraphError> {
    Permutation::random(n, rng)
}

/// Seeded PCG32 (XSH-RR 64/32) stream.
///
/// Bounded integers use rejection sampling on `next_u32` and shuffles are
/// Fisher–Yates from the last index down, so a seed yields the same
/// sequence on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: Pcg32,
}

const PCG_STREAM: u64 = 0x0a02_bdbf_7bb3_c0a7;

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, inner: Pcg32::new(seed, PCG_STREAM) }
    }

    /// Independent stream for a named sub-purpose, e.g. one graph of a run.
    pub fn derive(seed: u64, label: &str) -> Self {
        RngStream::new(derive_seed(seed, label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. Panics on `bound == 0`.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "empty range");
        let zone = u32::MAX - (u32::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u32();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u32 + 1) as usize;
            items.swap(i, j);
        }
    }

    pub fn inner_mut(&mut self) -> &mut Pcg32 {
        &mut self.inner
    }
}

/// Stable 64-bit seed for `(seed, label)`; first 8 bytes of SHA-256.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Approximation of the Erdős default edge order.
///
/// BFS from `start` visiting neighbours in ascending id; each edge is emitted
/// as `(discoverer, neighbour)` the first time one of its endpoints is
/// expanded. Nodes not reached from `start` are expanded by further BFS runs
/// from the smallest unvisited id, so every edge appears exactly once.
pub fn bfs_default_order(g: &Graph, start: NodeId) -> Result<Vec<Edge>, GraphError> {
    let n = g.n();
    if start == 0 || start > n {
        return Err(GraphError::NodeOutOfRange { node: start as i64, n });
    }
    let mut adj: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n as usize + 1];
    for (i, e) in g.edges().iter().enumerate() {
        adj[e.source as usize].push((e.target, i));
        if !g.is_directed() {
            adj[e.target as usize].push((e.source, i));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut visited = vec![false; n as usize + 1];
    let mut emitted = vec![false; g.m()];
    let mut out = Vec::with_capacity(g.m());
    let roots = std::iter::once(start).chain(1..=n);
    for root in roots {
        if visited[root as usize] {
            continue;
        }
        visited[root as usize] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, idx) in &adj[u as usize] {
                if !emitted[idx] {
                    emitted[idx] = true;
                    let w = g.edges()[idx].weight.clone();
                    out.push(Edge { source: u, target: v, weight: w });
                }
                if !visited[v as usize] {
                    visited[v as usize] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(out)
}

/// Seeded G(n, p) sampler used for synthetic datasets and property tests.
pub mod sample {
    use super::*;

    /// Erdős–Rényi G(n, p), edges in canonical order.
    pub fn gnp(n: u32, p: f64, directed: bool, rng: &mut RngStream) -> Graph {
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in 1..=n {
                if u == v || (!directed && v < u) {
                    continue;
                }
                if rng.coin(p) {
                    edges.push(Edge::new(u, v));
                }
            }
        }
        Graph::new(n.max(1), directed, edges).expect("sampler emits valid edges")
    }

    /// Same structure with integer weights drawn uniformly from `1..=max_weight`.
    pub fn with_integer_weights(g: &Graph, max_weight: u32, rng: &mut RngStream) -> Graph {
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                let w = 1 + rng.below(max_weight);
                Edge::weighted(e.source, e.target, Weight::parse(&w.to_string()).expect("positive integer"))
            })
            .collect();
        Graph::new(g.n(), g.is_directed(), edges).expect("same edge set")
    }

    /// Random DAG: G(n, p) oriented along a random topological order.
    pub fn dag(n: u32, p: f64, rng: &mut RngStream) -> Graph {
        let mut order: Vec<NodeId> = (1..=n).collect();
        rng.shuffle(&mut order);
        let mut edges = Vec::new();
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if rng.coin(p) {
                    edges.push(Edge::new(order[i], order[j]));
                }
            }
        }
        Graph::new(n, true, edges).expect("sampler emits valid edges")
    }

    /// Random bipartite graph with shuffled sides.
    pub fn bipartite(n: u32, p: f64, rng: &mut RngStream) -> Graph {
        let mut nodes: Vec<NodeId> = (1..=n).collect();
        rng.shuffle(&mut nodes);
        let split = (n as usize).div_ceil(2);
        let (left, right) = nodes.split_at(split);
        let mut edges = Vec::new();
        for &u in left {
            for &v in right {
                if rng.coin(p) {
                    edges.push(Edge::new(u.min(v), u.max(v)));
                }
            }
        }
        Graph::new(n, false, edges).expect("sampler emits valid edges")
    }

    /// G(n, p) plus a random Hamiltonian path, so one always exists.
    pub fn with_hamiltonian_path(n: u32, p: f64, rng: &mut RngStream) -> Graph {
        let base = gnp(n, p, false, rng);
        let mut order: Vec<NodeId> = (1..=n).collect();
        rng.shuffle(&mut order);
        let mut keys: HashSet<(NodeId, NodeId)> = base.edges().iter().map(|e| (e.source, e.target)).collect();
        for w in order.windows(2) {
            keys.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        let mut pairs: Vec<_> = keys.into_iter().collect();
        pairs.sort_unstable();
        Graph::from_pairs(n, false, &pairs).expect("valid pairs")
    }

    /// Complete graph with integer weights (travelling-salesman instances).
    pub fn complete_weighted(n: u32, max_weight: u32, rng: &mut RngStream) -> Graph {
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                let w = 1 + rng.below(max_weight);
                edges.push(Edge::weighted(u, v, Weight::parse(&w.to_string()).expect("positive")));
            }
        }
        Graph::new(n, false, edges).expect("valid")
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1u32..=20, 0.0f64..0.5, any::<u64>(), any::<bool>())
            .prop_map(|(n, p, seed, directed)| sample::gnp(n, p, directed, &mut RngStream::new(seed)))
    }

    fn arb_case() -> impl Strategy<Value = (Graph, Permutation)> {
        (arb_graph(), any::<u64>()).prop_map(|(g, seed)| {
            let p = Permutation::random(g.n(), &mut RngStream::new(seed)).unwrap();
            (g, p)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn relabel_then_inverse_restores(case in arb_case()) {
            let (g, p) = case;
            let back = g.relabel(&p).unwrap().relabel(&p.inverse()).unwrap();
            prop_assert_eq!(back.canonical(), g.canonical());
        }

        #[test]
        fn canonical_is_idempotent_and_permutation_stable(case in arb_case()) {
            let (g, p) = case;
            prop_assert_eq!(g.canonical().canonical(), g.canonical());
            let mapped = g.canonical().relabel(&p).unwrap().canonical();
            prop_assert_eq!(g.relabel(&p).unwrap().canonical(), mapped);
        }

        #[test]
        fn random_permutation_is_a_bijection(n in 1u32..50, seed in any::<u64>()) {
            let p = random_permutation(n, &mut RngStream::new(seed)).unwrap();
            let mut values = p.mapping().to_vec();
            values.sort_unstable();
            prop_assert_eq!(values, (1..=n).collect::<Vec<_>>());
        }
    }
}
