//! Task catalog, ground-truth solvers, answer checking and dataset ingestion.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algo::{self, ComponentPolicy};
use crate::exact;
use crate::graph::{sample, Graph, GraphError, GraphRecord, NodeId, Permutation, RngStream};
use crate::spectral::{self, SpectralConfig, SpectralError, SpectralTaskId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaskError {
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("{0} has no built-in solver; ingest reference answers for it")]
    UnsupportedTask(String),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("{0} needs a reference answer to check against")]
    MissingReference(String),
    #[error("record {index}: {message}")]
    Ingest { index: usize, message: String },
    #[error("ingested {0} answer cannot be carried through a relabeling")]
    Unmappable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
    Challenging,
}

impl Difficulty {
    pub const ALL: [Difficulty; 4] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard, Difficulty::Challenging];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Integer,
    Float,
    Boolean,
    Node,
    NodeSequence,
    NodeSet,
    EdgeSet,
}

impl AnswerKind {
    pub fn is_numeric(self) -> bool {
        matches!(self, AnswerKind::Integer | AnswerKind::Float)
    }

    pub fn is_scalar(self) -> bool {
        matches!(self, AnswerKind::Integer | AnswerKind::Float | AnswerKind::Boolean)
    }

    pub fn format_instruction(self) -> &'static str {
        match self {
            AnswerKind::Integer => "You need to format your answer as an integer.",
            AnswerKind::Float => "You need to format your answer as a float number.",
            AnswerKind::Boolean => "You need to output True or False.",
            AnswerKind::Node => "You need to format your answer as a single node id.",
            AnswerKind::NodeSequence => {
                "You need to format your answer as a list of nodes, e.g., [node-1, node-2, ..., node-n]."
            }
            AnswerKind::NodeSet => {
                "You need to format your answer as a list of nodes in ascending order, e.g., [node-1, node-2, ..., node-n]."
            }
            AnswerKind::EdgeSet => {
                "You need to format your answer as a list of edges in ascending lexicographical order, e.g., [(u1, v1), (u2, v2), ..., (un, vn)]."
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckerKind {
    Exact,
    TolerantFloat,
    Verifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Topological,
    Spectral,
}

/// Query parameters a task question refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamShape {
    None,
    Node,
    Pair,
}

/// Graph family used when generating synthetic instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Undirected,
    Connected,
    Directed,
    Dag,
    Bipartite,
    MaybeBipartite,
    Weighted,
    WeightedDirected,
    Small,
    SmallWeighted,
    CompleteWeighted,
    Hamiltonian,
    Tournament,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSpec {
    pub id: &'static str,
    pub family: Family,
    pub difficulty: Difficulty,
    pub answer_kind: AnswerKind,
    pub checker: CheckerKind,
    pub params: ParamShape,
    pub graph_kind: GraphKind,
    /// Has a polynomial-time solver in [`solve`].
    pub core: bool,
    pub description: &'static str,
    /// Question with `{node}`, `{u}` and `{v}` slots.
    pub question: &'static str,
}

impl TaskSpec {
    pub fn spectral_id(&self) -> Option<SpectralTaskId> {
        SpectralTaskId::from_name(self.id)
    }

    pub fn question_for(&self, params: &QueryParams) -> String {
        let slot = |x: Option<NodeId>| x.map_or_else(|| "?".to_string(), |v| v.to_string());
        self.question
            .replace("{node}", &slot(params.node))
            .replace("{u}", &slot(params.source))
            .replace("{v}", &slot(params.target))
    }
}

impl Serialize for &'static TaskSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id)
    }
}

impl<'de> Deserialize<'de> for &'static TaskSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let id = String::deserialize(d)?;
        lookup(&id).ok_or_else(|| serde::de::Error::custom(format!("unknown task {id:?}")))
    }
}

macro_rules! task {
    ($id:literal, $diff:ident, $kind:ident, $check:ident, $params:ident, $gk:ident, $core:literal, $desc:literal, $q:literal) => {
        TaskSpec {
            id: $id,
            family: Family::Topological,
            difficulty: Difficulty::$diff,
            answer_kind: AnswerKind::$kind,
            checker: CheckerKind::$check,
            params: ParamShape::$params,
            graph_kind: GraphKind::$gk,
            core: $core,
            description: $desc,
            question: $q,
        }
    };
}

macro_rules! spectral_task {
    ($id:literal, $diff:ident, $desc:literal, $q:literal) => {
        TaskSpec {
            id: $id,
            family: Family::Spectral,
            difficulty: Difficulty::$diff,
            answer_kind: AnswerKind::Float,
            checker: CheckerKind::TolerantFloat,
            params: ParamShape::None,
            graph_kind: GraphKind::Undirected,
            core: true,
            description: $desc,
            question: $q,
        }
    };
}

static CATALOG: &[TaskSpec] = &[
    // Easy
    task!("node_number", Easy, Integer, Exact, None, Undirected, true,
        "The task is to determine the number of nodes in the graph.",
        "How many nodes are in the graph?"),
    task!("dominating_set", Easy, NodeSet, Verifier, None, Small, false,
        "The task is to determine a minimum dominating set of the graph.\n\nA dominating set is a set of nodes such that every node of the graph is either in the set or adjacent to a node in the set.",
        "What is a minimum dominating set of the graph?"),
    task!("common_neighbor", Easy, NodeSet, Exact, Pair, Undirected, true,
        "The task is to determine the common neighbors of two nodes in the graph.",
        "What are the common neighbors between node {u} and node {v}?"),
    task!("edge_number", Easy, Integer, Exact, None, Undirected, true,
        "The task is to determine the number of edges in the graph.",
        "How many edges are in the graph?"),
    task!("neighbor", Easy, NodeSet, Exact, Node, Undirected, true,
        "The task is to determine the neighbors of a node in the graph.",
        "What are the neighbors of node {node}?"),
    task!("bfs", Easy, NodeSequence, Verifier, Node, Undirected, true,
        "The task is to determine the breadth-first search (BFS) traversal order given a starting node.\n\nStop when the BFS cannot be continued.",
        "What is the breadth-first search (BFS) traversal order for the starting node {node}?"),
    task!("has_cycle", Easy, Boolean, Exact, None, Undirected, true,
        "The task is to determine whether the graph contains a cycle.",
        "Does the graph have a cycle?"),
    task!("dfs", Easy, NodeSequence, Verifier, Node, Undirected, true,
        "The task is to determine the depth-first search (DFS) traversal order given a starting node.\n\nStop when the DFS cannot be continued.",
        "What is the depth-first search (DFS) traversal order for the starting node {node}?"),
    task!("minimum_spanning_tree", Easy, EdgeSet, Verifier, None, Weighted, true,
        "The task is to determine the minimum spanning tree of a graph.\n\nA minimum spanning tree is a subset of the edges that connects all the vertices in each component with the minimum total edge weight.",
        "What are the edges of the minimum spanning tree of the graph?"),
    task!("weighted_minimum_spanning_tree", Easy, Float, TolerantFloat, None, Weighted, true,
        "The task is to determine the total weight of the minimum spanning tree of a weighted graph.",
        "What is the total weight of the minimum spanning tree of the graph?"),
    task!("edge_existence", Easy, Boolean, Exact, Pair, Undirected, true,
        "The task is to determine whether there is an edge between two nodes.",
        "Is there an edge between node {u} and node {v}?"),
    task!("is_regular", Easy, Boolean, Exact, None, Undirected, true,
        "The task is to determine whether the graph is regular, i.e. whether every node has the same degree.",
        "Is the graph regular?"),
    task!("degree", Easy, Integer, Exact, Node, Undirected, true,
        "The task is to determine the degree of a node in the graph.",
        "What is the degree of node {node}?"),
    task!("is_tournament", Easy, Boolean, Exact, None, Tournament, false,
        "The task is to determine whether the directed graph is a tournament, i.e. whether every pair of distinct nodes is connected by exactly one directed edge.",
        "Is the graph a tournament?"),
    task!("density", Easy, Float, TolerantFloat, None, Undirected, true,
        "The task is to determine the density of the graph.\n\nDensity is the number of edges divided by the number of possible edges.",
        "What is the density of the graph?"),
    // Medium
    task!("adamic_adar_index", Medium, Float, TolerantFloat, Pair, Undirected, true,
        "The task is to determine the Adamic-Adar index of two nodes.\n\nThe Adamic-Adar index is the sum of 1 / log(degree) over the common neighbors of the two nodes.",
        "What is the Adamic-Adar index between node {u} and node {v}?"),
    task!("clustering_coefficient", Medium, Float, TolerantFloat, Node, Undirected, true,
        "The task is to compute the clustering coefficient for a given node.",
        "What is the clustering coefficient of node {node}?"),
    task!("connected_component_number", Medium, Integer, Exact, None, Undirected, true,
        "The task is to determine the number of connected components in the graph.",
        "How many connected components are there in the graph?"),
    task!("bipartite_maximum_matching", Medium, EdgeSet, Verifier, None, Bipartite, false,
        "The task is to determine a maximum matching of the bipartite graph.\n\nA matching is a set of edges without common nodes.",
        "What is a maximum matching of the graph?"),
    task!("local_connectivity", Medium, Boolean, Exact, Pair, Directed, true,
        "The task is to determine whether one node can reach another node in the graph.",
        "Is there a path from node {u} to node {v}?"),
    task!("jaccard_coefficient", Medium, Float, TolerantFloat, Pair, Undirected, true,
        "The task is to determine the Jaccard coefficient of two nodes.\n\nThe Jaccard coefficient is the number of common neighbors divided by the size of the union of the two neighborhoods.",
        "What is the Jaccard coefficient between node {u} and node {v}?"),
    task!("min_edge_covering", Medium, EdgeSet, Verifier, None, Connected, false,
        "The task is to determine a minimum edge cover of the graph.\n\nAn edge cover is a set of edges such that every node is incident to at least one edge of the set.",
        "What is a minimum edge cover of the graph?"),
    task!("is_eulerian", Medium, Boolean, Exact, None, Undirected, true,
        "The task is to determine whether the graph is Eulerian, i.e. whether it has a closed walk that uses every edge exactly once.",
        "Is the graph Eulerian?"),
    task!("degree_centrality", Medium, Float, TolerantFloat, Node, Undirected, true,
        "The task is to determine the degree centrality of a node in the graph.\n\nDegree centrality is the degree of the node divided by n - 1.",
        "What is the degree centrality of node {node}?"),
    task!("is_bipartite", Medium, Boolean, Exact, None, MaybeBipartite, true,
        "The task is to determine whether the graph is bipartite.",
        "Is the graph bipartite?"),
    task!("resource_allocation_index", Medium, Float, TolerantFloat, Pair, Undirected, true,
        "The task is to determine the resource allocation index of two nodes.\n\nThe resource allocation index is the sum of 1 / degree over the common neighbors of the two nodes.",
        "What is the resource allocation index between node {u} and node {v}?"),
    // Hard
    task!("max_weight_matching", Hard, EdgeSet, Verifier, None, SmallWeighted, false,
        "The task is to determine a maximum weight matching of the graph.\n\nA matching is a set of edges without common nodes; its weight is the sum of its edge weights.",
        "What is a maximum weight matching of the graph?"),
    task!("closeness_centrality", Hard, Float, TolerantFloat, Node, Undirected, true,
        "The task is to calculate the closeness centrality of a node in the graph.\n\nFor a node u, closeness is (r - 1) / (n - 1) times (r - 1) divided by the sum of distances from u to the r - 1 other nodes it reaches.",
        "What is the closeness centrality of node {node}?"),
    task!("traveling_salesman_problem", Hard, NodeSequence, Verifier, None, CompleteWeighted, false,
        "The task is to determine the minimal cost tour that visits every node exactly once and returns to the starting node.",
        "What is the tour with the minimal cost?"),
    task!("strongly_connected_number", Hard, Integer, Exact, None, Directed, true,
        "The task is to determine the number of strongly connected components in the directed graph.",
        "How many strongly connected components are there in the graph?"),
    task!("shortest_path", Hard, NodeSequence, Verifier, Pair, Undirected, true,
        "The task is to determine the shortest path between two nodes.\n\nThe input nodes are guaranteed to be connected.",
        "What is the shortest path between node {u} and node {v}?"),
    task!("weighted_shortest_path", Hard, NodeSequence, Verifier, Pair, Weighted, true,
        "The task is to determine the shortest path between two nodes of a weighted graph, where path length is the sum of edge weights.\n\nThe input nodes are guaranteed to be connected.",
        "What is the shortest path between node {u} and node {v}?"),
    task!("center", Hard, NodeSet, Exact, None, Undirected, true,
        "The task is to determine the center of the graph: the nodes of minimum eccentricity within the largest connected component.",
        "What is the center of the graph?"),
    task!("diameter", Hard, Integer, Exact, None, Undirected, true,
        "The task is to determine the diameter of the graph: the longest shortest-path distance within the largest connected component.",
        "What is the diameter of the graph?"),
    task!("barycenter", Hard, NodeSet, Exact, None, Undirected, true,
        "The task is to determine the barycenter of the graph: the nodes minimizing the sum of distances to all other nodes within the largest connected component.",
        "What is the barycenter of the graph?"),
    task!("radius", Hard, Integer, Exact, None, Undirected, true,
        "The task is to determine the radius of the graph: the minimum eccentricity within the largest connected component.",
        "What is the radius of the graph?"),
    task!("topological_sort", Hard, NodeSequence, Verifier, None, Dag, true,
        "The task is to determine a topological ordering of the directed acyclic graph.",
        "What is a topological ordering of the graph?"),
    task!("periphery", Hard, NodeSet, Exact, None, Undirected, true,
        "The task is to determine the periphery of the graph: the nodes of maximum eccentricity within the largest connected component.",
        "What is the periphery of the graph?"),
    task!("betweenness_centrality", Hard, Float, TolerantFloat, Node, Undirected, true,
        "The task is to determine the normalized betweenness centrality of a node in the graph.",
        "What is the betweenness centrality of node {node}?"),
    task!("triangles", Hard, Integer, Exact, None, Undirected, true,
        "The task is to determine the number of triangles in the graph.",
        "How many triangles are in the graph?"),
    task!("avg_neighbor_degree", Hard, Float, TolerantFloat, Node, Undirected, true,
        "The task is to determine the average degree of the neighbors of a node in the graph.",
        "What is the average neighbor degree of node {node}?"),
    task!("harmonic_centrality", Hard, Float, TolerantFloat, Node, Undirected, true,
        "The task is to determine the harmonic centrality of a node in the graph.\n\nHarmonic centrality is the sum of the reciprocals of the shortest-path distances from the node to all other nodes.",
        "What is the harmonic centrality of node {node}?"),
    task!("bridges", Hard, EdgeSet, Exact, None, Undirected, true,
        "The task is to find all bridges of the graph.\n\nA bridge is an edge whose removal increases the number of connected components.",
        "What are the bridges of the graph?"),
    task!("pagerank", Hard, Float, TolerantFloat, Node, Undirected, true,
        "The task is to determine the PageRank value of a node with damping factor 0.85.",
        "What is the PageRank value of node {node}?"),
    // Challenging
    task!("global_efficiency", Challenging, Float, TolerantFloat, None, Undirected, true,
        "The task is to calculate the global efficiency of the graph.\n\nGlobal efficiency is the average over all ordered node pairs of the reciprocal shortest-path distance, counting unreachable pairs as zero.",
        "What is the global efficiency of the graph?"),
    task!("maximal_independent_set", Challenging, NodeSet, Verifier, None, Undirected, false,
        "The task is to determine a maximal independent set of the graph.\n\nAn independent set is maximal when no further node can be added to it.",
        "What is a maximal independent set of the graph?"),
    task!("maximal_flow", Challenging, Float, TolerantFloat, Pair, WeightedDirected, true,
        "The task is to determine the value of the maximum flow from a source node to a sink node, using edge weights as capacities.",
        "What is the value of the maximum flow from node {u} to node {v}?"),
    task!("wiener_index", Challenging, Integer, Exact, None, Connected, true,
        "The task is to calculate the Wiener index of the graph.\n\nThe Wiener index is the sum of shortest-path distances over all unordered node pairs.",
        "What is the Wiener index of the graph?"),
    task!("hamiltonian_path", Challenging, NodeSequence, Verifier, None, Hamiltonian, false,
        "The task is to return a Hamiltonian path in the graph.\n\nA Hamiltonian path visits every node exactly once.",
        "What is a Hamiltonian path of the graph?"),
    task!("min_vertex_cover", Challenging, NodeSet, Verifier, None, Small, false,
        "The task is to determine a minimum vertex cover of the graph.\n\nA vertex cover is a set of nodes such that every edge has at least one endpoint in the set.",
        "What is a minimum vertex cover of the graph?"),
    // spectral
    spectral_task!("graph_energy", Easy,
        "The task is to compute the graph energy: the sum of the absolute values of the eigenvalues of the adjacency matrix.",
        "What is the graph energy of the graph?"),
    spectral_task!("n_components", Easy,
        "The task is to compute the number of connected components from the spectrum: the multiplicity of the eigenvalue 0 of the Laplacian L = D - A.",
        "How many connected components does the graph have?"),
    spectral_task!("sum_lambda_squared", Easy,
        "The task is to compute the sum of the squared eigenvalues of the adjacency matrix.",
        "What is the sum of the squared adjacency eigenvalues?"),
    spectral_task!("algebraic_connectivity", Medium,
        "The task is to compute the algebraic connectivity: the second-smallest eigenvalue of the Laplacian L = D - A.",
        "What is the algebraic connectivity of the graph?"),
    spectral_task!("estrada_index", Medium,
        "The task is to compute the Estrada index: the sum of exp(lambda) over the adjacency eigenvalues lambda.",
        "What is the Estrada index of the graph?"),
    spectral_task!("laplacian_energy", Medium,
        "The task is to compute the Laplacian energy: the sum of |mu - 2m/n| over the eigenvalues mu of L = D - A, where m is the number of edges and n the number of nodes.",
        "What is the Laplacian energy of the graph?"),
    spectral_task!("natural_connectivity", Medium,
        "The task is to compute the natural connectivity: ln of the mean of exp(lambda) over the adjacency eigenvalues lambda.",
        "What is the natural connectivity of the graph?"),
    spectral_task!("spectral_gap", Medium,
        "The task is to compute the spectral gap: the largest adjacency eigenvalue minus the second largest.",
        "What is the spectral gap of the graph?"),
    spectral_task!("spectral_radius", Medium,
        "The task is to compute the spectral radius: the largest absolute value of an adjacency eigenvalue.",
        "What is the spectral radius of the graph?"),
    spectral_task!("eigenvector_cent_top", Hard,
        "The task is to compute the largest eigenvector centrality value: the maximum entry of the unit-norm principal eigenvector of the adjacency matrix, taken with positive sign, on the largest connected component.",
        "What is the largest eigenvector centrality value in the graph?"),
    spectral_task!("heat_trace_t1", Hard,
        "The task is to compute the heat trace at t = 1: the sum of exp(-mu) over the eigenvalues mu of the Laplacian L = D - A.",
        "What is the heat trace at t = 1 of the graph?"),
    spectral_task!("von_neumann_entropy", Hard,
        "The task is to compute the von Neumann entropy: -sum(s ln s) over the eigenvalues s of L / trace(L), where L = D - A and 0 ln 0 = 0.",
        "What is the von Neumann entropy of the graph?"),
];

/// Names used in some published tables mapped to their catalog ids.
const ALIASES: &[(&str, &str)] = &[
    ("academic_adm_index", "adamic_adar_index"),
    ("faceted_coefficient", "jaccard_coefficient"),
    ("triangles_centrality", "triangles"),
];

pub fn catalog() -> &'static [TaskSpec] {
    CATALOG
}

pub fn lookup(id: &str) -> Option<&'static TaskSpec> {
    let id = ALIASES.iter().find(|(alias, _)| *alias == id).map_or(id, |(_, real)| real);
    CATALOG.iter().find(|t| t.id == id)
}

pub fn topological_tasks() -> impl Iterator<Item = &'static TaskSpec> {
    CATALOG.iter().filter(|t| t.family == Family::Topological)
}

pub fn spectral_tasks() -> impl Iterator<Item = &'static TaskSpec> {
    CATALOG.iter().filter(|t| t.family == Family::Spectral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QueryParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none", alias = "u")]
    pub source: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none", alias = "v")]
    pub target: Option<NodeId>,
}

impl QueryParams {
    pub fn node(u: NodeId) -> Self {
        QueryParams { node: Some(u), ..Default::default() }
    }

    pub fn pair(u: NodeId, v: NodeId) -> Self {
        QueryParams { source: Some(u), target: Some(v), ..Default::default() }
    }

    pub fn relabel(&self, p: &Permutation) -> Self {
        QueryParams {
            node: self.node.map(|u| p.apply(u)),
            source: self.source.map(|u| p.apply(u)),
            target: self.target.map(|u| p.apply(u)),
        }
    }

    fn get_node(&self, g: &Graph) -> Result<NodeId, TaskError> {
        let u = self.node.ok_or_else(|| TaskError::Query("missing `node` parameter".into()))?;
        in_range(g, u)
    }

    fn get_pair(&self, g: &Graph) -> Result<(NodeId, NodeId), TaskError> {
        match (self.source, self.target) {
            (Some(u), Some(v)) => Ok((in_range(g, u)?, in_range(g, v)?)),
            _ => Err(TaskError::Query("missing `source`/`target` parameters".into())),
        }
    }
}

fn in_range(g: &Graph, u: NodeId) -> Result<NodeId, TaskError> {
    if u == 0 || u > g.n() {
        Err(TaskError::Query(format!("node {u} outside 1..={}", g.n())))
    } else {
        Ok(u)
    }
}

/// A task answer. Node sets and edge sets are kept sorted, edges as
/// `(min, max)` for undirected graphs.
#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    Integer(i64),
    Float(f64),
    Boolean(bool),
    Node(NodeId),
    NodeSequence(Vec<NodeId>),
    NodeSet(Vec<NodeId>),
    EdgeSet(Vec<(NodeId, NodeId)>),
}

impl Answer {
    pub fn node_set(mut nodes: Vec<NodeId>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        Answer::NodeSet(nodes)
    }

    pub fn edge_set(edges: Vec<(NodeId, NodeId)>, directed: bool) -> Self {
        let mut edges: Vec<_> =
            edges.into_iter().map(|(u, v)| if directed { (u, v) } else { (u.min(v), u.max(v)) }).collect();
        edges.sort_unstable();
        edges.dedup();
        Answer::EdgeSet(edges)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Answer::Integer(i) => Some(i as f64),
            Answer::Float(x) => Some(x),
            Answer::Boolean(b) => Some(if b { 1.0 } else { 0.0 }),
            Answer::Node(u) => Some(u as f64),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Answer::Integer(i) => Value::from(*i),
            Answer::Float(x) => Value::from(*x),
            Answer::Boolean(b) => Value::from(*b),
            Answer::Node(u) => Value::from(*u),
            Answer::NodeSequence(v) | Answer::NodeSet(v) => Value::from(v.clone()),
            Answer::EdgeSet(e) => Value::Array(e.iter().map(|&(u, v)| Value::from(vec![u, v])).collect()),
        }
    }

    /// Reads a JSON value as `kind`. Verifier references may instead be a
    /// bare number giving the optimal objective value.
    pub fn from_json(kind: AnswerKind, v: &Value, directed: bool) -> Option<Answer> {
        let node = |x: &Value| x.as_u64().and_then(|u| NodeId::try_from(u).ok());
        let nodes = |x: &Value| x.as_array()?.iter().map(node).collect::<Option<Vec<_>>>();
        match kind {
            AnswerKind::Integer => match v {
                Value::Number(n) => n.as_i64().or_else(|| n.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64)),
                Value::String(s) => s.trim().parse().ok(),
                _ => None,
            }
            .map(Answer::Integer),
            AnswerKind::Float => match v {
                Value::Number(n) => n.as_f64(),
                Value::String(s) => s.trim().parse().ok(),
                _ => None,
            }
            .map(Answer::Float),
            AnswerKind::Boolean => match v {
                Value::Bool(b) => Some(*b),
                Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
                    "true" | "yes" => Some(true),
                    "false" | "no" => Some(false),
                    _ => None,
                },
                Value::Number(n) => n.as_u64().filter(|&x| x <= 1).map(|x| x == 1),
                _ => None,
            }
            .map(Answer::Boolean),
            AnswerKind::Node => node(v).map(Answer::Node),
            AnswerKind::NodeSequence => nodes(v).map(Answer::NodeSequence).or_else(|| v.as_f64().map(Answer::Float)),
            AnswerKind::NodeSet => nodes(v).map(Answer::node_set).or_else(|| v.as_f64().map(Answer::Float)),
            AnswerKind::EdgeSet => {
                let edges = v.as_array().and_then(|arr| {
                    arr.iter()
                        .map(|e| {
                            let p = nodes(e)?;
                            (p.len() >= 2).then(|| (p[0], p[1]))
                        })
                        .collect::<Option<Vec<_>>>()
                });
                edges.map(|e| Answer::edge_set(e, directed)).or_else(|| v.as_f64().map(Answer::Float))
            }
        }
    }

    /// Text in the answer format the prompts ask for.
    pub fn format(&self) -> String {
        let list = |v: &[NodeId]| format!("[{}]", v.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(", "));
        match self {
            Answer::Integer(i) => i.to_string(),
            Answer::Float(x) => format_float(*x),
            Answer::Boolean(b) => if *b { "True" } else { "False" }.to_string(),
            Answer::Node(u) => u.to_string(),
            Answer::NodeSequence(v) | Answer::NodeSet(v) => list(v),
            Answer::EdgeSet(e) => {
                format!("[{}]", e.iter().map(|(u, v)| format!("({u}, {v})")).collect::<Vec<_>>().join(", "))
            }
        }
    }

    pub fn map_nodes(&self, p: &Permutation, directed: bool) -> Answer {
        match self {
            Answer::Node(u) => Answer::Node(p.apply(*u)),
            Answer::NodeSequence(v) => Answer::NodeSequence(v.iter().map(|&u| p.apply(u)).collect()),
            Answer::NodeSet(v) => Answer::node_set(v.iter().map(|&u| p.apply(u)).collect()),
            Answer::EdgeSet(e) => {
                Answer::edge_set(e.iter().map(|&(u, v)| (p.apply(u), p.apply(v))).collect(), directed)
            }
            other => other.clone(),
        }
    }
}

/// Ten significant digits, plain decimal notation.
pub fn format_float(x: f64) -> String {
    let rounded = spectral::round_sig(x, 10);
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn nodes_answer(v: Vec<NodeId>) -> Answer {
    Answer::node_set(v)
}

/// Exact ground truth for a task with a built-in solver.
pub fn solve(task: &TaskSpec, g: &Graph, params: &QueryParams) -> Result<Answer, TaskError> {
    solve_with(task, g, params, &SolveConfig::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub components: ComponentPolicy,
    pub spectral: SpectralConfig,
}

pub fn solve_with(task: &TaskSpec, g: &Graph, params: &QueryParams, cfg: &SolveConfig) -> Result<Answer, TaskError> {
    if !task.core {
        return Err(TaskError::UnsupportedTask(task.id.into()));
    }
    if let Some(sid) = task.spectral_id() {
        return Ok(Answer::Float(spectral::spectral_truth_with(sid, g, &cfg.spectral)?));
    }
    let float = |x: f64| Ok(Answer::Float(x));
    let int = |x: usize| Ok(Answer::Integer(x as i64));
    let boolean = |b: bool| Ok(Answer::Boolean(b));
    let ecc = || algo::eccentricities(g, cfg.components);
    match task.id {
        "node_number" => int(g.n() as usize),
        "edge_number" => int(g.m()),
        "degree" => int(algo::degree(g, params.get_node(g)?)?),
        "neighbor" => Ok(nodes_answer(algo::neighbors(g, params.get_node(g)?)?)),
        "common_neighbor" => {
            let (u, v) = params.get_pair(g)?;
            Ok(nodes_answer(algo::common_neighbors(g, u, v)?))
        }
        "edge_existence" => {
            let (u, v) = params.get_pair(g)?;
            boolean(algo::has_edge(g, u, v)?)
        }
        "density" => float(algo::density(g)),
        "is_regular" => boolean(algo::is_regular(g)),
        "is_bipartite" => boolean(algo::is_bipartite(g)),
        "has_cycle" => boolean(algo::has_cycle(g)),
        "connected_component_number" => int(algo::component_count(g)),
        "strongly_connected_number" => int(algo::strongly_connected_count(g)),
        "bfs" => Ok(Answer::NodeSequence(algo::bfs_order(g, params.get_node(g)?)?)),
        "dfs" => Ok(Answer::NodeSequence(algo::dfs_order(g, params.get_node(g)?)?)),
        "shortest_path" => {
            let (u, v) = params.get_pair(g)?;
            Ok(Answer::NodeSequence(algo::shortest_path(g, u, v)?))
        }
        "weighted_shortest_path" => {
            let (u, v) = params.get_pair(g)?;
            Ok(Answer::NodeSequence(algo::weighted_shortest_path(g, u, v)?.0))
        }
        "minimum_spanning_tree" => {
            let (edges, _) = algo::minimum_spanning_forest(g);
            Ok(Answer::edge_set(edges.iter().map(|e| (e.source, e.target)).collect(), false))
        }
        "weighted_minimum_spanning_tree" => float(algo::minimum_spanning_forest(g).1),
        "triangles" => Ok(Answer::Integer(algo::triangle_count(g) as i64)),
        "clustering_coefficient" => float(algo::clustering(g, params.get_node(g)?)?),
        "degree_centrality" => float(algo::degree_centrality(g, params.get_node(g)?)?),
        "avg_neighbor_degree" => float(algo::average_neighbor_degree(g, params.get_node(g)?)?),
        "closeness_centrality" => float(algo::closeness_centrality(g, params.get_node(g)?)?),
        "harmonic_centrality" => float(algo::harmonic_centrality(g, params.get_node(g)?)?),
        "betweenness_centrality" => float(algo::betweenness_centrality(g)[params.get_node(g)? as usize]),
        "pagerank" => float(algo::pagerank(g)[params.get_node(g)? as usize]),
        "diameter" => int(ecc()?.diameter() as usize),
        "radius" => int(ecc()?.radius() as usize),
        "center" => Ok(nodes_answer(ecc()?.center())),
        "periphery" => Ok(nodes_answer(ecc()?.periphery())),
        "barycenter" => Ok(nodes_answer(ecc()?.barycenter())),
        "topological_sort" => Ok(Answer::NodeSequence(algo::topological_sort(g)?)),
        "is_eulerian" => boolean(algo::is_eulerian(g)),
        "bridges" => Ok(Answer::edge_set(algo::bridges(g), false)),
        "wiener_index" => Ok(Answer::Integer(algo::wiener_index(g)? as i64)),
        "global_efficiency" => float(algo::global_efficiency(g)),
        "adamic_adar_index" => {
            let (u, v) = params.get_pair(g)?;
            float(algo::adamic_adar_index(g, u, v)?)
        }
        "jaccard_coefficient" => {
            let (u, v) = params.get_pair(g)?;
            float(algo::jaccard_coefficient(g, u, v)?)
        }
        "resource_allocation_index" => {
            let (u, v) = params.get_pair(g)?;
            float(algo::resource_allocation_index(g, u, v)?)
        }
        "maximal_flow" => {
            let (u, v) = params.get_pair(g)?;
            float(algo::max_flow(g, u, v)?)
        }
        "local_connectivity" => {
            let (u, v) = params.get_pair(g)?;
            boolean(algo::is_reachable(g, u, v)?)
        }
        other => Err(TaskError::UnsupportedTask(other.into())),
    }
}

/// Reference answer for a task without a polynomial solver, computed
/// exhaustively on small graphs.
pub fn reference(task: &TaskSpec, g: &Graph) -> Result<Answer, TaskError> {
    let missing = || TaskError::MissingReference(task.id.into());
    let directed = g.is_directed();
    match task.id {
        "is_tournament" => Ok(Answer::Boolean(is_tournament(g))),
        "dominating_set" => exact::min_dominating_set(g).map(Answer::node_set).ok_or_else(missing),
        "min_vertex_cover" => exact::min_vertex_cover(g).map(Answer::node_set).ok_or_else(missing),
        "maximal_independent_set" => Ok(Answer::node_set(exact::greedy_maximal_independent_set(g))),
        "min_edge_covering" => exact::min_edge_cover(g).map(|e| Answer::edge_set(e, directed)).ok_or_else(missing),
        "bipartite_maximum_matching" => exact::bipartite_maximum_matching(g)
            .map(|e| Answer::edge_set(e, directed))
            .ok_or_else(|| TaskError::Query("graph is not bipartite".into())),
        "max_weight_matching" => {
            exact::max_weight_matching(g).map(|(e, _)| Answer::edge_set(e, directed)).ok_or_else(missing)
        }
        "traveling_salesman_problem" => exact::tsp(g).map(|(o, _)| Answer::NodeSequence(o)).ok_or_else(missing),
        "hamiltonian_path" => exact::hamiltonian_path(g).map(Answer::NodeSequence).ok_or_else(missing),
        _ => Err(TaskError::UnsupportedTask(task.id.into())),
    }
}

fn is_tournament(g: &Graph) -> bool {
    let n = g.n() as usize;
    g.is_directed() && g.m() == n * (n - 1) / 2
}

/// Solver output when one exists, otherwise the exhaustive reference.
pub fn ground_truth(task: &TaskSpec, g: &Graph, params: &QueryParams) -> Result<Answer, TaskError> {
    ground_truth_with(task, g, params, &SolveConfig::default())
}

pub fn ground_truth_with(
    task: &TaskSpec,
    g: &Graph,
    params: &QueryParams,
    cfg: &SolveConfig,
) -> Result<Answer, TaskError> {
    if task.core {
        solve_with(task, g, params, cfg)
    } else {
        reference(task, g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    Incorrect,
    Unparsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { abs_tol: 1e-2, rel_tol: 1e-3 }
    }
}

impl CheckConfig {
    pub fn close(&self, candidate: f64, truth: f64) -> bool {
        (candidate - truth).abs() <= self.abs_tol.max(self.rel_tol * truth.abs())
    }
}

const OBJECTIVE_TOL: f64 = 1e-9;

fn objective_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= OBJECTIVE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Judges `candidate` against `reference`.
///
/// Exact kinds compare canonically, floats within the configured
/// tolerance, and verifier kinds check validity plus, where the task has an
/// objective, equality with the reference optimum.
pub fn check(
    task: &TaskSpec,
    g: &Graph,
    params: &QueryParams,
    candidate: Option<&Answer>,
    reference: Option<&Answer>,
    cfg: &CheckConfig,
) -> Result<Verdict, TaskError> {
    let Some(candidate) = candidate else { return Ok(Verdict::Unparsed) };
    let verdict = |ok: bool| Ok(if ok { Verdict::Correct } else { Verdict::Incorrect });
    match task.checker {
        CheckerKind::Exact => {
            let reference = reference.ok_or_else(|| TaskError::MissingReference(task.id.into()))?;
            let normalized = match candidate {
                Answer::NodeSet(v) => Answer::node_set(v.clone()),
                Answer::EdgeSet(e) => Answer::edge_set(e.clone(), g.is_directed()),
                other => other.clone(),
            };
            verdict(&normalized == reference)
        }
        CheckerKind::TolerantFloat => {
            let truth =
                reference.and_then(Answer::as_f64).ok_or_else(|| TaskError::MissingReference(task.id.into()))?;
            verdict(candidate.as_f64().is_some_and(|c| cfg.close(c, truth)))
        }
        CheckerKind::Verifier => verify(task, g, params, candidate, reference),
    }
}

fn verify(
    task: &TaskSpec,
    g: &Graph,
    params: &QueryParams,
    candidate: &Answer,
    reference: Option<&Answer>,
) -> Result<Verdict, TaskError> {
    let ok = |b: bool| Ok(if b { Verdict::Correct } else { Verdict::Incorrect });
    let missing = || TaskError::MissingReference(task.id.into());
    // objective of the reference: either a bare number or computed from the reference answer
    let reference_objective = |f: &dyn Fn(&Answer) -> Option<f64>| -> Result<f64, TaskError> {
        let r = reference.ok_or_else(missing)?;
        match r {
            Answer::Float(x) => Ok(*x),
            Answer::Integer(i) => Ok(*i as f64),
            other => f(other).ok_or_else(|| TaskError::Query(format!("reference answer for {} is invalid", task.id))),
        }
    };
    let seq = |a: &Answer| match a {
        Answer::NodeSequence(v) | Answer::NodeSet(v) => Some(v.clone()),
        _ => None,
    };
    let edges = |a: &Answer| match a {
        Answer::EdgeSet(e) => Some(e.clone()),
        _ => None,
    };
    match task.id {
        "bfs" => {
            let s = params.get_node(g)?;
            ok(seq(candidate).is_some_and(|o| algo::is_valid_bfs_order(g, s, &o)))
        }
        "dfs" => {
            let s = params.get_node(g)?;
            ok(seq(candidate).is_some_and(|o| algo::is_valid_dfs_order(g, s, &o)))
        }
        "topological_sort" => ok(seq(candidate).is_some_and(|o| algo::is_valid_topological_order(g, &o))),
        "hamiltonian_path" => ok(seq(candidate).is_some_and(|o| exact::is_hamiltonian_path(g, &o))),
        "maximal_independent_set" => ok(seq(candidate).is_some_and(|o| exact::is_maximal_independent_set(g, &o))),
        "shortest_path" | "weighted_shortest_path" => {
            let (u, v) = params.get_pair(g)?;
            let cost = |a: &Answer| {
                let p = seq(a)?;
                (p.first() == Some(&u) && p.last() == Some(&v)).then_some(())?;
                if task.id == "shortest_path" {
                    algo::path_cost(g, &p).map(|_| (p.len() - 1) as f64)
                } else {
                    algo::path_cost(g, &p)
                }
            };
            let best = reference_objective(&cost)?;
            ok(cost(candidate).is_some_and(|c| objective_eq(c, best)))
        }
        "minimum_spanning_tree" => {
            let weight = |a: &Answer| algo::spanning_forest_weight(g, &edges(a)?);
            let best = reference_objective(&weight)?;
            ok(weight(candidate).is_some_and(|w| objective_eq(w, best)))
        }
        "dominating_set" | "min_vertex_cover" => {
            let valid: fn(&Graph, &[NodeId]) -> bool =
                if task.id == "dominating_set" { exact::is_dominating_set } else { exact::is_vertex_cover };
            let size = |a: &Answer| seq(a).filter(|s| valid(g, s)).map(|s| s.len() as f64);
            let best = reference_objective(&size)?;
            ok(size(candidate).is_some_and(|s| objective_eq(s, best)))
        }
        "min_edge_covering" => {
            let size = |a: &Answer| edges(a).filter(|e| exact::is_edge_cover(g, e)).map(|e| e.len() as f64);
            let best = reference_objective(&size)?;
            ok(size(candidate).is_some_and(|s| objective_eq(s, best)))
        }
        "bipartite_maximum_matching" => {
            let size = |a: &Answer| {
                let e = edges(a)?;
                exact::matching_weight(g, &e).map(|_| e.len() as f64)
            };
            let best = reference_objective(&size)?;
            ok(size(candidate).is_some_and(|s| objective_eq(s, best)))
        }
        "max_weight_matching" => {
            let weight = |a: &Answer| exact::matching_weight(g, &edges(a)?);
            let best = reference_objective(&weight)?;
            ok(weight(candidate).is_some_and(|w| objective_eq(w, best)))
        }
        "traveling_salesman_problem" => {
            let cost = |a: &Answer| exact::tour_cost(g, &seq(a)?);
            let best = reference_objective(&cost)?;
            ok(cost(candidate).is_some_and(|c| objective_eq(c, best)))
        }
        other => Err(TaskError::UnsupportedTask(format!("{other} has no verifier"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthSource {
    Computed,
    Ingested,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub task: &'static TaskSpec,
    pub graph_id: String,
    pub graph: Graph,
    #[serde(default)]
    pub params: QueryParams,
    #[serde(with = "answer_json")]
    pub truth: Answer,
    pub source: TruthSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
}

mod answer_json {
    use super::*;

    pub fn serialize<S: serde::Serializer>(a: &Answer, s: S) -> Result<S::Ok, S::Error> {
        a.to_json().serialize(s)
    }

    /// Deserialized answers are re-typed by [`TaskInstance::retype`]; the
    /// raw value is kept as the closest kind here.
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Answer, D::Error> {
        let v = Value::deserialize(d)?;
        Ok(match &v {
            Value::Bool(b) => Answer::Boolean(*b),
            Value::Number(n) if n.is_i64() || n.is_u64() => Answer::Integer(n.as_i64().unwrap_or(i64::MAX)),
            Value::Number(n) => Answer::Float(n.as_f64().unwrap_or(f64::NAN)),
            Value::Array(items) if items.iter().all(Value::is_array) && !items.is_empty() => {
                Answer::from_json(AnswerKind::EdgeSet, &v, false)
                    .ok_or_else(|| serde::de::Error::custom("bad edge list"))?
            }
            Value::Array(_) => Answer::from_json(AnswerKind::NodeSequence, &v, false)
                .ok_or_else(|| serde::de::Error::custom("bad node list"))?,
            _ => return Err(serde::de::Error::custom("unsupported answer value")),
        })
    }
}

impl TaskInstance {
    /// Re-reads the stored answer as the task's declared kind (JSON loses the
    /// distinction between, e.g., node sequences and node sets).
    pub fn retype(mut self) -> Self {
        if let Some(a) = Answer::from_json(self.task.answer_kind, &self.truth.to_json(), self.graph.is_directed()) {
            self.truth = a;
        }
        self
    }

    pub fn question_text(&self) -> String {
        self.question.clone().unwrap_or_else(|| self.task.question_for(&self.params))
    }

    pub fn check(&self, candidate: Option<&Answer>, cfg: &CheckConfig) -> Result<Verdict, TaskError> {
        check(self.task, &self.graph, &self.params, candidate, Some(&self.truth), cfg)
    }
}

/// Instance with its ground truth computed from `(task, graph, params)`.
pub fn make_instance(
    task: &'static TaskSpec,
    graph_id: &str,
    graph: Graph,
    params: QueryParams,
) -> Result<TaskInstance, TaskError> {
    let truth = ground_truth(task, &graph, &params)?;
    Ok(TaskInstance {
        task,
        graph_id: graph_id.into(),
        graph,
        params,
        truth,
        source: TruthSource::Computed,
        question: None,
    })
}

/// Relabels the graph and parameters. Scalar truths carry over; node-valued
/// truths are re-solved when a solver exists and otherwise mapped through
/// `p` (valid for set answers and for verifier references, whose objective
/// is label-independent).
pub fn relabel_instance(inst: &TaskInstance, p: &Permutation) -> Result<TaskInstance, TaskError> {
    let graph = inst.graph.relabel(p)?;
    let params = inst.params.relabel(p);
    let kind = inst.task.answer_kind;
    let truth = if kind.is_scalar() || matches!(inst.truth, Answer::Float(_) | Answer::Integer(_)) {
        inst.truth.clone()
    } else if inst.source == TruthSource::Computed && inst.task.core {
        solve(inst.task, &graph, &params)?
    } else if kind == AnswerKind::NodeSequence && inst.task.checker == CheckerKind::Exact {
        return Err(TaskError::Unmappable(inst.task.id.into()));
    } else {
        inst.truth.map_nodes(p, graph.is_directed())
    };
    Ok(TaskInstance { graph, params, truth, question: None, ..inst.clone() })
}

#[derive(Debug, Clone, Deserialize)]
struct ErdosRecord {
    task: String,
    graph: GraphRecord,
    #[serde(default)]
    params: QueryParams,
    answer: Value,
    #[serde(default)]
    question: Option<String>,
    #[serde(default)]
    graph_id: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub instances: Vec<TaskInstance>,
    pub warnings: Vec<String>,
}

/// Loads a JSON-lines dataset, preserving each graph's edge order.
pub fn ingest_erdos(path: &Path) -> Result<Vec<TaskInstance>, TaskError> {
    let text = std::fs::read_to_string(path).map_err(|e| TaskError::Ingest { index: 0, message: e.to_string() })?;
    let report = ingest_erdos_str(&text)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    Ok(report.instances)
}

pub fn ingest_erdos_str(text: &str) -> Result<IngestReport, TaskError> {
    let mut report = IngestReport::default();
    for (index, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |message: String| TaskError::Ingest { index, message };
        let rec: ErdosRecord = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let task = lookup(&rec.task).ok_or_else(|| bad(format!("unknown task {:?}", rec.task)))?;
        let graph = Graph::try_from(&rec.graph).map_err(|e| bad(e.to_string()))?;
        let answer = Answer::from_json(task.answer_kind, &rec.answer, graph.is_directed())
            .ok_or_else(|| bad(format!("answer {} does not fit {:?}", rec.answer, task.answer_kind)))?;
        let mut truth = answer;
        if task.core {
            let computed = solve(task, &graph, &rec.params).map_err(|e| bad(e.to_string()))?;
            let agrees = check(task, &graph, &rec.params, Some(&truth), Some(&computed), &CheckConfig::default())
                .map(|v| v == Verdict::Correct)
                .unwrap_or(false);
            if !agrees {
                report.warnings.push(format!(
                    "record {index} ({}): ingested answer {} conflicts with computed {}; using computed",
                    task.id,
                    truth.format(),
                    computed.format()
                ));
                truth = computed;
            }
        }
        report.instances.push(TaskInstance {
            task,
            graph_id: rec.graph_id.unwrap_or_else(|| format!("g{index}")),
            graph,
            params: rec.params,
            truth,
            source: TruthSource::Ingested,
            question: rec.question,
        });
    }
    Ok(report)
}

/// Random graph of the family a task is posed on.
pub fn sample_graph(kind: GraphKind, rng: &mut RngStream) -> Graph {
    let n = |rng: &mut RngStream, lo: u32, hi: u32| lo + rng.below(hi - lo + 1);
    match kind {
        GraphKind::Undirected => {
            let k = n(rng, 5, 15);
            sample::gnp(k, 0.3, false, rng)
        }
        GraphKind::Connected => {
            let k = n(rng, 5, 12);
            sample::with_hamiltonian_path(k, 0.2, rng)
        }
        GraphKind::Directed => {
            let k = n(rng, 5, 12);
            sample::gnp(k, 0.2, true, rng)
        }
        GraphKind::Dag => {
            let k = n(rng, 5, 12);
            sample::dag(k, 0.3, rng)
        }
        GraphKind::Bipartite => {
            let k = n(rng, 5, 14);
            sample::bipartite(k, 0.4, rng)
        }
        GraphKind::MaybeBipartite => {
            let k = n(rng, 5, 12);
            if rng.coin(0.5) {
                sample::bipartite(k, 0.4, rng)
            } else {
                sample::gnp(k, 0.3, false, rng)
            }
        }
        GraphKind::Weighted => {
            let k = n(rng, 5, 12);
            let g = sample::with_hamiltonian_path(k, 0.25, rng);
            sample::with_integer_weights(&g, 10, rng)
        }
        GraphKind::WeightedDirected => {
            let k = n(rng, 5, 10);
            let g = sample::gnp(k, 0.35, true, rng);
            if g.m() == 0 {
                g
            } else {
                sample::with_integer_weights(&g, 10, rng)
            }
        }
        GraphKind::Small => {
            let k = n(rng, 4, 10);
            sample::gnp(k, 0.35, false, rng)
        }
        GraphKind::SmallWeighted => {
            let k = n(rng, 4, 10);
            let g = sample::gnp(k, 0.4, false, rng);
            if g.m() == 0 {
                g
            } else {
                sample::with_integer_weights(&g, 10, rng)
            }
        }
        GraphKind::CompleteWeighted => {
            let k = n(rng, 4, 8);
            sample::complete_weighted(k, 20, rng)
        }
        GraphKind::Hamiltonian => {
            let k = n(rng, 4, 10);
            sample::with_hamiltonian_path(k, 0.2, rng)
        }
        GraphKind::Tournament => {
            let k = n(rng, 4, 8);
            let mut pairs = Vec::new();
            for u in 1..=k {
                for v in u + 1..=k {
                    // occasionally drop an arc so both answers occur
                    if rng.coin(0.97) {
                        pairs.push(if rng.coin(0.5) { (u, v) } else { (v, u) });
                    }
                }
            }
            Graph::from_pairs(k, true, &pairs).expect("one arc per pair")
        }
    }
}

fn sample_params(task: &TaskSpec, g: &Graph, rng: &mut RngStream) -> QueryParams {
    let pick = |rng: &mut RngStream| 1 + rng.below(g.n());
    match task.params {
        ParamShape::None => QueryParams::default(),
        ParamShape::Node => QueryParams::node(pick(rng)),
        ParamShape::Pair => {
            let u = pick(rng);
            let mut v = pick(rng);
            if g.n() > 1 {
                while v == u {
                    v = pick(rng);
                }
            }
            QueryParams::pair(u, v)
        }
    }
}

/// `count` seeded synthetic instances of `task`. Draws whose ground truth is
/// undefined (for example a disconnected query pair) are redrawn.
pub fn generate_instances(task: &'static TaskSpec, count: usize, seed: u64) -> Vec<TaskInstance> {
    let mut rng = RngStream::derive(seed, task.id);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 50 {
        attempts += 1;
        let g = sample_graph(task.graph_kind, &mut rng);
        let params = sample_params(task, &g, &mut rng);
        let id = format!("{}-{}", task.id, out.len());
        match make_instance(task, &id, g, params) {
            Ok(inst) => out.push(inst),
            Err(e) => log::debug!("redrawing {} instance: {e}", task.id),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::serialize::parse;

    const APPENDIX: &str = "Here is an undirected graph containing nodes from 1 to 19. The edges are: (1, 7), (1, 12), (1, 6), (1, 3), (1, 2), (7, 3), (7, 6), (7, 12), (12, 3), (6, 17), (6, 9), (3, 2), (4, 5), (4, 8), (4, 10), (4, 11), (5, 15), (5, 16), (5, 8), (5, 10), (5, 13), (5, 11), (5, 14), (8, 10), (10, 11), (10, 14), (11, 16), (11, 13), (16, 18), (13, 18), (17, 9), (17, 19), (9, 19).";

    fn appendix() -> Graph {
        parse(APPENDIX).unwrap().graph
    }

    fn t(id: &str) -> &'static TaskSpec {
        lookup(id).unwrap()
    }

    #[test]
    fn catalog_shape() {
        let topo: Vec<_> = topological_tasks().collect();
        assert_eq!(topo.len(), 50, "49 benchmark tasks plus pagerank");
        let count = |d| topo.iter().filter(|t| t.difficulty == d && t.id != "pagerank").count();
        assert_eq!(
            [
                count(Difficulty::Easy),
                count(Difficulty::Medium),
                count(Difficulty::Hard),
                count(Difficulty::Challenging)
            ],
            [15, 11, 17, 6]
        );
        assert_eq!(topo.iter().filter(|t| t.core).count(), 41);
        assert_eq!(spectral_tasks().count(), 12);
        assert_eq!(lookup("academic_adm_index").unwrap().id, "adamic_adar_index");
        let ids: BTreeSet<_> = catalog().iter().map(|t| t.id).collect();
        assert_eq!(ids.len(), catalog().len());
    }

    #[test]
    fn appendix_examples() {
        let g = appendix();
        let none = QueryParams::default();
        assert_eq!(solve(t("node_number"), &g, &none).unwrap(), Answer::Integer(19));
        assert_eq!(solve(t("edge_existence"), &g, &QueryParams::pair(1, 7)).unwrap(), Answer::Boolean(true));
        let Answer::Float(d) = solve(t("density"), &g, &none).unwrap() else { panic!() };
        assert!((d - 33.0 / 171.0).abs() < 1e-15);
        let sp = QueryParams::pair(12, 19);
        let path = solve(t("shortest_path"), &g, &sp).unwrap();
        let Answer::NodeSequence(p) = &path else { panic!() };
        assert_eq!(p.len(), 5);
        let cfg = CheckConfig::default();
        let cand = Answer::NodeSequence(vec![12, 1, 6, 17, 19]);
        assert_eq!(check(t("shortest_path"), &g, &sp, Some(&cand), Some(&path), &cfg).unwrap(), Verdict::Correct);
        let long = Answer::NodeSequence(vec![12, 3, 1, 6, 9, 19]);
        assert_eq!(check(t("shortest_path"), &g, &sp, Some(&long), Some(&path), &cfg).unwrap(), Verdict::Incorrect);
        let truth = solve(t("density"), &g, &none).unwrap();
        assert_eq!(
            check(t("density"), &g, &none, Some(&Answer::Float(0.19)), Some(&truth), &cfg).unwrap(),
            Verdict::Correct
        );
        assert_eq!(
            check(t("node_number"), &g, &none, None, Some(&Answer::Integer(19)), &cfg).unwrap(),
            Verdict::Unparsed
        );
    }

    #[test]
    fn unsupported_and_missing_reference() {
        let g = appendix();
        let none = QueryParams::default();
        assert_eq!(solve(t("hamiltonian_path"), &g, &none), Err(TaskError::UnsupportedTask("hamiltonian_path".into())));
        assert_eq!(reference(t("dominating_set"), &g), Err(TaskError::MissingReference("dominating_set".into())));
        let cand = Answer::node_set(vec![1, 5]);
        assert!(matches!(
            check(t("dominating_set"), &g, &none, Some(&cand), None, &CheckConfig::default()),
            Err(TaskError::MissingReference(_))
        ));
        assert!(matches!(solve(t("degree"), &g, &none), Err(TaskError::Query(_))));
    }

    #[test]
    fn ingest_examples() {
        let rec = r#"{"task": "shortest_path", "graph": {"n": 3, "edges": [[2, 1], [2, 3]]}, "params": {"source": 1, "target": 3}, "answer": [1, 2, 3]}"#;
        let report = ingest_erdos_str(rec).unwrap();
        assert_eq!(report.instances.len(), 1);
        assert_eq!(report.instances[0].source, TruthSource::Ingested);
        assert_eq!(report.instances[0].graph.edges()[0].source, 2, "edge order and orientation kept");
        assert!(report.warnings.is_empty());
        let wrong = r#"{"task": "edge_number", "graph": {"n": 3, "edges": [[1, 2]]}, "answer": 5}"#;
        let report = ingest_erdos_str(wrong).unwrap();
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.instances[0].truth, Answer::Integer(1));
        let broken = "{\"task\": \"edge_number\"}\n{\"task\": \"nope\"}";
        assert!(matches!(ingest_erdos_str(broken), Err(TaskError::Ingest { index: 0, .. })));
        let unknown = r#"{"task": "nope", "graph": {"n": 1, "edges": []}, "answer": 1}"#;
        assert!(matches!(ingest_erdos_str(unknown), Err(TaskError::Ingest { index: 0, .. })));
    }

    #[test]
    fn relabel_examples() {
        let g = appendix();
        let p = Permutation::random(19, &mut RngStream::new(5)).unwrap();
        let density = make_instance(t("density"), "a", g.clone(), QueryParams::default()).unwrap();
        assert_eq!(relabel_instance(&density, &p).unwrap().truth, density.truth);
        let sp = make_instance(t("shortest_path"), "a", g.clone(), QueryParams::pair(12, 19)).unwrap();
        let moved = relabel_instance(&sp, &p).unwrap();
        assert_eq!(moved.params, QueryParams::pair(p.apply(12), p.apply(19)));
        let Answer::NodeSequence(path) = &moved.truth else { panic!() };
        assert_eq!(path.len(), 5);
        let bfs = make_instance(t("bfs"), "a", g, QueryParams::node(3)).unwrap();
        let moved = relabel_instance(&bfs, &p).unwrap();
        let mapped = bfs.truth.map_nodes(&p, false);
        assert_eq!(moved.check(Some(&mapped), &CheckConfig::default()).unwrap(), Verdict::Correct);
    }

    #[test]
    fn answer_json_and_format() {
        let a = Answer::edge_set(vec![(3, 1), (1, 2)], false);
        assert_eq!(a.format(), "[(1, 2), (1, 3)]");
        assert_eq!(Answer::from_json(AnswerKind::EdgeSet, &a.to_json(), false), Some(a));
        assert_eq!(format_float(1.0 / 3.0), "0.3333333333");
        assert_eq!(Answer::Boolean(true).format(), "True");
        assert_eq!(Answer::from_json(AnswerKind::Boolean, &Value::from("yes"), false), Some(Answer::Boolean(true)));
        assert_eq!(Answer::from_json(AnswerKind::NodeSet, &Value::from(4), false), Some(Answer::Float(4.0)));
    }

    #[test]
    fn instance_round_trips_through_json() {
        let inst = make_instance(
            t("bridges"),
            "x",
            Graph::from_pairs(3, false, &[(1, 2), (2, 3)]).unwrap(),
            QueryParams::default(),
        )
        .unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        let back: TaskInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back.retype(), inst);
    }
}
