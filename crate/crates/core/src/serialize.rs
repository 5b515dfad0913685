//! Text encodings of graphs and the matching parser.
//!
//! An [`EncodingSpec`] picks a structure (edge list, adjacency list,
//! adjacency matrix), an ordering rule, whether undirected edges are listed in
//! both directions, and a surface syntax. [`render`] is byte-deterministic for
//! a given spec and seed; [`parse`] inverts every render.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bfs_default_order, Edge, Graph, GraphError, NodeId, RngStream, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SerializeError {
    #[error("invalid encoding spec: {0}")]
    InvalidSpec(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("node {node} is inconsistent with a graph on nodes 1..={n}")]
    Consistency { n: u32, node: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    EdgeList,
    AdjList,
    AdjMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderRule {
    SortedSourceTarget,
    SortedSourceShuffledTarget,
    SortedTargetShuffledSource,
    ShuffledAll,
    ErdosDefault,
    Verbatim,
}

impl OrderRule {
    pub const ALL: [OrderRule; 6] = [
        OrderRule::SortedSourceTarget,
        OrderRule::SortedSourceShuffledTarget,
        OrderRule::SortedTargetShuffledSource,
        OrderRule::ShuffledAll,
        OrderRule::ErdosDefault,
        OrderRule::Verbatim,
    ];

    pub fn is_shuffled(self) -> bool {
        matches!(
            self,
            OrderRule::SortedSourceShuffledTarget | OrderRule::SortedTargetShuffledSource | OrderRule::ShuffledAll
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Syntax {
    ErdosPlain,
    Json,
    NetworkxCode,
    PygCode,
}

impl Syntax {
    pub const ALL: [Syntax; 4] = [Syntax::ErdosPlain, Syntax::Json, Syntax::NetworkxCode, Syntax::PygCode];
}

impl Structure {
    pub const ALL: [Structure; 3] = [Structure::EdgeList, Structure::AdjList, Structure::AdjMatrix];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub structure: Structure,
    pub order: OrderRule,
    pub replicate_undirected: bool,
    pub syntax: Syntax,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shuffle_seed: Option<u64>,
}

impl EncodingSpec {
    pub fn new(structure: Structure, order: OrderRule, replicate_undirected: bool, syntax: Syntax) -> Self {
        EncodingSpec { structure, order, replicate_undirected, syntax, shuffle_seed: None }
    }

    /// Plain edge list in stored order: the Erdős prompt encoding.
    pub fn erdos() -> Self {
        EncodingSpec::new(Structure::EdgeList, OrderRule::Verbatim, false, Syntax::ErdosPlain)
    }

    pub fn with_shuffle_seed(mut self, seed: u64) -> Self {
        self.shuffle_seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<(), SerializeError> {
        if self.syntax != Syntax::ErdosPlain && self.structure != Structure::EdgeList {
            return Err(SerializeError::InvalidSpec(format!(
                "{:?} syntax requires the edge_list structure",
                self.syntax
            )));
        }
        if self.order.is_shuffled() && self.shuffle_seed.is_none() && self.structure != Structure::AdjMatrix {
            return Err(SerializeError::InvalidSpec(format!("{:?} requires a shuffle seed", self.order)));
        }
        Ok(())
    }

    /// Short stable identifier, e.g. `edge_list-sorted_source_target-rep-erdos_plain`.
    pub fn id(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            snake(&self.structure),
            snake(&self.order),
            if self.replicate_undirected { "rep" } else { "once" },
            snake(&self.syntax)
        )
    }
}

fn snake<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("unit enum variants serialize as strings"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedGraphBlock {
    pub text: String,
    pub spec: EncodingSpec,
    pub n: u32,
}

const MATRIX_HEADER: &str =
    "This is the binary adjacency matrix representation of the graph where 1 denotes an edge between nodes:";
const WEIGHTED_MATRIX_HEADER: &str =
    "This is the weighted adjacency matrix representation of the graph where each entry is the edge weight and 0 denotes no edge:";
const JSON_HEADER: &str = "This is the JSON form representation of the graph:";
const NETWORKX_HEADER: &str = "This is the NetworkX code representation of the graph:";
const PYG_HEADER: &str = "This is the PyG code representation of the graph:";
const EDGES_HEADER: &str = "The edges are:";
const REPLICATED_HEADER: &str = "The edges are (each undirected edge is listed in both directions):";
const ADJ_HEADER: &str = "The adjacency list is:";
const JSON_WIDTH: usize = 120;

pub fn render(g: &Graph, spec: &EncodingSpec) -> Result<RenderedGraphBlock, SerializeError> {
    spec.validate()?;
    let mut text = graph_header(g);
    text.push(' ');
    match (spec.structure, spec.syntax) {
        (Structure::EdgeList, Syntax::ErdosPlain) => {
            let replicated = spec.replicate_undirected && !g.is_directed();
            let edges = ordered_edges(g, spec)?;
            text.push_str(if replicated { REPLICATED_HEADER } else { EDGES_HEADER });
            if edges.is_empty() {
                text.push_str(" none.");
            } else {
                text.push(' ');
                text.push_str(&join(edges.iter().map(tuple)));
                text.push('.');
            }
        }
        (Structure::AdjList, _) => {
            text.push_str(ADJ_HEADER);
            for (u, nbrs) in adjacency_lines(g, spec)? {
                let items = join(nbrs.iter().map(|(v, w)| match w {
                    Some(w) => format!("{v} ({w})"),
                    None => v.to_string(),
                }));
                let _ = write!(text, "\n- node {u} is connected to ({items}),");
            }
        }
        (Structure::AdjMatrix, _) => render_matrix(g, &mut text),
        (Structure::EdgeList, Syntax::Json) => {
            let edges = ordered_edges(g, spec)?;
            text.push_str(JSON_HEADER);
            text.push_str("\n{\n");
            let nodes: Vec<String> = g.nodes().map(|u| format!("\"{u}\"")).collect();
            text.push_str(&wrapped_array("  \"nodes\": [ ", &nodes));
            text.push('\n');
            let items: Vec<String> = edges
                .iter()
                .map(|e| match &e.weight {
                    Some(w) => format!("[ {}, {}, {} ]", e.source, e.target, w),
                    None => format!("[ {}, {} ]", e.source, e.target),
                })
                .collect();
            text.push_str(&wrapped_array("  \"edges\": [ ", &items));
            let _ = write!(text, "\n  \"directed\": {}\n}}", g.is_directed());
        }
        (Structure::EdgeList, Syntax::NetworkxCode) => {
            let edges = ordered_edges(g, spec)?;
            text.push_str(NETWORKX_HEADER);
            text.push_str("\nimport networkx as nx\n");
            text.push_str(if g.is_directed() { "G = nx.DiGraph()\n" } else { "G = nx.Graph()\n" });
            let _ = writeln!(text, "G.add_nodes_from([{}])", join(g.nodes().map(|u| u.to_string())));
            let call = if g.is_weighted() { "add_weighted_edges_from" } else { "add_edges_from" };
            let _ = write!(text, "G.{call}([{}])", join(edges.iter().map(tuple)));
        }
        (Structure::EdgeList, Syntax::PygCode) => {
            // both directions are always listed, so order the single-copy list
            let mut base = *spec;
            base.replicate_undirected = false;
            let edges = ordered_edges(g, &base)?;
            let arcs: Vec<&Edge> = edges.iter().collect();
            let mut sources = Vec::new();
            let mut targets = Vec::new();
            let mut attrs = Vec::new();
            for e in arcs {
                sources.push(e.source);
                targets.push(e.target);
                attrs.extend(e.weight.clone());
                if !g.is_directed() {
                    sources.push(e.target);
                    targets.push(e.source);
                    attrs.extend(e.weight.clone());
                }
            }
            text.push_str(PYG_HEADER);
            text.push_str("\nfrom torch_geometric.data import Data\nimport torch\n");
            let _ = writeln!(
                text,
                "edge_index = torch.tensor([[{}], [{}]], dtype=torch.long).t().contiguous()",
                join(sources.iter().map(|u| u.to_string())),
                join(targets.iter().map(|u| u.to_string()))
            );
            if g.is_weighted() {
                let _ = write!(
                    text,
                    "edge_attr = torch.tensor([{}], dtype=torch.float)\ndata = Data(edge_index=edge_index, edge_attr=edge_attr)",
                    join(attrs.iter().map(|w| w.to_string()))
                );
            } else {
                text.push_str("data = Data(edge_index=edge_index)");
            }
        }
    }
    Ok(RenderedGraphBlock { text, spec: *spec, n: g.n() })
}

fn graph_header(g: &Graph) -> String {
    let kind = if g.is_directed() { "a directed" } else { "an undirected" };
    format!("Here is {kind} graph containing nodes from 1 to {}.", g.n())
}

fn join<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().collect::<Vec<_>>().join(", ")
}

fn tuple(e: &Edge) -> String {
    match &e.weight {
        Some(w) => format!("({}, {}, {})", e.source, e.target, w),
        None => format!("({}, {})", e.source, e.target),
    }
}

/// Greedy wrap at [`JSON_WIDTH`] columns with a four-space continuation indent.
fn wrapped_array(prefix: &str, items: &[String]) -> String {
    if items.is_empty() {
        return format!("{prefix}],");
    }
    let mut out = String::new();
    let mut line = prefix.to_string();
    let mut fresh = true;
    for (i, item) in items.iter().enumerate() {
        let tail = if i + 1 == items.len() { " ]," } else { "," };
        if !fresh && line.len() + 1 + item.len() + tail.len() > JSON_WIDTH {
            out.push_str(&line);
            out.push('\n');
            line = format!("    {item}{tail}");
        } else {
            if !fresh {
                line.push(' ');
            }
            line.push_str(item);
            line.push_str(tail);
        }
        fresh = false;
    }
    out.push_str(&line);
    out
}

fn render_matrix(g: &Graph, text: &mut String) {
    let n = g.n() as usize;
    let mut cells = vec![vec!["0".to_string(); n]; n];
    for e in g.edges() {
        let mark = e.weight.as_ref().map_or_else(|| "1".to_string(), |w| w.to_string());
        let (s, t) = (e.source as usize - 1, e.target as usize - 1);
        cells[s][t] = mark.clone();
        if !g.is_directed() {
            cells[t][s] = mark;
        }
    }
    text.push_str(if g.is_weighted() { WEIGHTED_MATRIX_HEADER } else { MATRIX_HEADER });
    text.push_str("\n[");
    for (i, row) in cells.iter().enumerate() {
        if i > 0 {
            text.push_str(",\n ");
        }
        let _ = write!(text, "[{}]", row.join(", "));
    }
    text.push(']');
}

/// Stable-sort `items` by `key`, then shuffle every run of equal keys.
fn shuffle_within<K: Ord + Copy>(items: &mut [Edge], key: impl Fn(&Edge) -> K, rng: &mut RngStream) {
    items.sort_by_key(|e| key(e));
    let mut start = 0;
    while start < items.len() {
        let k = key(&items[start]);
        let mut end = start + 1;
        while end < items.len() && key(&items[end]) == k {
            end += 1;
        }
        rng.shuffle(&mut items[start..end]);
        start = end;
    }
}

fn shuffle_rng(spec: &EncodingSpec) -> RngStream {
    RngStream::new(spec.shuffle_seed.unwrap_or(0))
}

/// The edge sequence an edge-list encoding prints.
pub fn ordered_edges(g: &Graph, spec: &EncodingSpec) -> Result<Vec<Edge>, SerializeError> {
    spec.validate()?;
    let replicate = spec.replicate_undirected && !g.is_directed();
    let sequence_rule = matches!(spec.order, OrderRule::Verbatim | OrderRule::ErdosDefault);
    if sequence_rule {
        let base = match spec.order {
            OrderRule::Verbatim => g.edges().to_vec(),
            _ => bfs_default_order(g, 1)?,
        };
        if !replicate {
            return Ok(base);
        }
        return Ok(base.iter().flat_map(|e| [e.clone(), e.reversed()]).collect());
    }
    let mut edges = g.canonical_edges();
    if replicate {
        edges = edges.iter().flat_map(|e| [e.clone(), e.reversed()]).collect();
    }
    let mut rng = shuffle_rng(spec);
    match spec.order {
        OrderRule::SortedSourceTarget => edges.sort_by_key(|e| (e.source, e.target)),
        OrderRule::SortedSourceShuffledTarget => shuffle_within(&mut edges, |e| e.source, &mut rng),
        OrderRule::SortedTargetShuffledSource => shuffle_within(&mut edges, |e| e.target, &mut rng),
        OrderRule::ShuffledAll => {
            edges.sort_by_key(|e| (e.source, e.target));
            rng.shuffle(&mut edges);
            if !g.is_directed() && !replicate {
                for e in &mut edges {
                    if rng.coin(0.5) {
                        *e = e.reversed();
                    }
                }
            }
        }
        OrderRule::Verbatim | OrderRule::ErdosDefault => unreachable!("handled above"),
    }
    Ok(edges)
}

type AdjLine = (NodeId, Vec<(NodeId, Option<Weight>)>);

/// Node lines of an adjacency-list encoding. With replication every node
/// lists its full neighbourhood; without it an undirected edge appears once,
/// under its lower endpoint. Nodes with nothing to list get no line.
pub fn adjacency_lines(g: &Graph, spec: &EncodingSpec) -> Result<Vec<AdjLine>, SerializeError> {
    spec.validate()?;
    let symmetric = spec.replicate_undirected && !g.is_directed();
    let arcs: Vec<Edge> = match spec.order {
        OrderRule::Verbatim | OrderRule::ErdosDefault => {
            let mut s = *spec;
            s.replicate_undirected = symmetric;
            ordered_edges(g, &s)?
        }
        _ => {
            let mut arcs = Vec::new();
            for e in g.canonical_edges() {
                if symmetric {
                    arcs.push(e.reversed());
                }
                arcs.push(e);
            }
            arcs.sort_by_key(|e| (e.source, e.target));
            arcs
        }
    };
    // group by source in order of first appearance
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    let mut lines: Vec<AdjLine> = Vec::new();
    for e in arcs {
        let (u, v) = if !g.is_directed() && !symmetric && e.source > e.target {
            (e.target, e.source)
        } else {
            (e.source, e.target)
        };
        let slot = *index.entry(u).or_insert_with(|| {
            lines.push((u, Vec::new()));
            lines.len() - 1
        });
        lines[slot].1.push((v, e.weight));
    }
    let mut rng = shuffle_rng(spec);
    match spec.order {
        OrderRule::SortedSourceShuffledTarget => {
            for (_, nbrs) in &mut lines {
                rng.shuffle(nbrs);
            }
        }
        OrderRule::SortedTargetShuffledSource => rng.shuffle(&mut lines),
        OrderRule::ShuffledAll => {
            rng.shuffle(&mut lines);
            for (_, nbrs) in &mut lines {
                rng.shuffle(nbrs);
            }
        }
        _ => {}
    }
    Ok(lines)
}

/// Result of [`parse`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub structure: Structure,
    pub syntax: Syntax,
    /// Edge-list header announced both directions.
    pub replicated: bool,
}

pub fn parse(text: &str) -> Result<ParsedGraph, SerializeError> {
    let mut c = Cursor { s: text, pos: 0 };
    c.skip_ws();
    c.expect("Here is ")?;
    let directed = if c.eat("an undirected graph") {
        false
    } else if c.eat("a directed graph") {
        true
    } else {
        return Err(c.err("expected \"an undirected graph\" or \"a directed graph\""));
    };
    c.expect(" containing nodes from 1 to ")?;
    let n_at = c.pos;
    let n = c.uint()?;
    let n = u32::try_from(n)
        .ok()
        .filter(|&n| n > 0)
        .ok_or(SerializeError::Parse { offset: n_at, message: "node count must be in 1..=u32::MAX".into() })?;
    c.expect(".")?;
    c.skip_ws();
    let mut sink = EdgeSink::new(n, directed);
    let (structure, syntax, replicated) = if c.eat(REPLICATED_HEADER) {
        parse_tuples(&mut c, &mut sink, true)?;
        (Structure::EdgeList, Syntax::ErdosPlain, true)
    } else if c.eat(EDGES_HEADER) {
        parse_tuples(&mut c, &mut sink, true)?;
        (Structure::EdgeList, Syntax::ErdosPlain, false)
    } else if c.eat(ADJ_HEADER) {
        parse_adj_list(&mut c, &mut sink)?;
        (Structure::AdjList, Syntax::ErdosPlain, false)
    } else if c.eat(MATRIX_HEADER) {
        parse_matrix(&mut c, &mut sink, false)?;
        (Structure::AdjMatrix, Syntax::ErdosPlain, false)
    } else if c.eat(WEIGHTED_MATRIX_HEADER) {
        parse_matrix(&mut c, &mut sink, true)?;
        (Structure::AdjMatrix, Syntax::ErdosPlain, false)
    } else if c.eat(JSON_HEADER) {
        parse_json(&mut c, &mut sink)?;
        (Structure::EdgeList, Syntax::Json, false)
    } else if c.eat(NETWORKX_HEADER) {
        parse_networkx(&mut c, &mut sink)?;
        (Structure::EdgeList, Syntax::NetworkxCode, false)
    } else if c.eat(PYG_HEADER) {
        parse_pyg(&mut c, &mut sink)?;
        (Structure::EdgeList, Syntax::PygCode, false)
    } else {
        return Err(c.err("unrecognized graph encoding"));
    };
    c.skip_ws();
    if c.pos != text.len() {
        return Err(c.err("trailing text after graph block"));
    }
    Ok(ParsedGraph { graph: sink.finish()?, structure, syntax, replicated })
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> SerializeError {
        SerializeError::Parse { offset: self.pos, message: message.into() }
    }

    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), SerializeError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(format!("expected {lit:?}")))
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.s.len() - trimmed.len();
    }

    /// Skips whitespace, then expects `lit`.
    fn token(&mut self, lit: &str) -> Result<(), SerializeError> {
        self.skip_ws();
        self.expect(lit)
    }

    fn peek_token(&mut self, lit: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(lit)
    }

    fn uint(&mut self) -> Result<u64, SerializeError> {
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.err("expected an integer"));
        }
        let value = self.rest()[..len].parse().map_err(|_| self.err("integer out of range"))?;
        self.pos += len;
        Ok(value)
    }

    fn number_text(&mut self) -> Result<&str, SerializeError> {
        let len = self
            .rest()
            .bytes()
            .take_while(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
            .count();
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.s[start..start + len])
    }

    fn node(&mut self, n: u32) -> Result<NodeId, SerializeError> {
        self.skip_ws();
        let v = self.uint()?;
        if v == 0 || v > n as u64 {
            return Err(SerializeError::Consistency { n, node: v });
        }
        Ok(v as NodeId)
    }

    fn weight(&mut self) -> Result<Weight, SerializeError> {
        self.skip_ws();
        let at = self.pos;
        let text = self.number_text()?;
        Weight::parse(text).map_err(|e| SerializeError::Parse { offset: at, message: e.to_string() })
    }
}

/// Accumulates edges in first-seen order, collapsing the reverse copies of
/// undirected edges.
struct EdgeSink {
    n: u32,
    directed: bool,
    edges: Vec<Edge>,
    seen: HashMap<(NodeId, NodeId), usize>,
}

impl EdgeSink {
    fn new(n: u32, directed: bool) -> Self {
        EdgeSink { n, directed, edges: Vec::new(), seen: HashMap::new() }
    }

    fn add(&mut self, c: &Cursor, u: NodeId, v: NodeId, w: Option<Weight>) -> Result<(), SerializeError> {
        if u == v {
            return Err(c.err(format!("self-loop on node {u}")));
        }
        let key = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        if let Some(&i) = self.seen.get(&key) {
            if self.directed {
                return Err(c.err(format!("duplicate arc ({u}, {v})")));
            }
            if self.edges[i].weight != w {
                return Err(c.err(format!("conflicting weights for edge ({u}, {v})")));
            }
            return Ok(());
        }
        self.seen.insert(key, self.edges.len());
        self.edges.push(Edge { source: u, target: v, weight: w });
        Ok(())
    }

    fn finish(self) -> Result<Graph, SerializeError> {
        Ok(Graph::new(self.n, self.directed, self.edges)?)
    }
}

/// `(u, v), (u, v, w), ... .` or `none.`
fn parse_tuples(c: &mut Cursor, sink: &mut EdgeSink, trailing_period: bool) -> Result<(), SerializeError> {
    c.skip_ws();
    if c.eat("none.") {
        return Ok(());
    }
    loop {
        c.token("(")?;
        let u = c.node(sink.n)?;
        c.token(",")?;
        let v = c.node(sink.n)?;
        let w = if c.peek_token(",") {
            c.expect(",")?;
            Some(c.weight()?)
        } else {
            None
        };
        c.token(")")?;
        sink.add(c, u, v, w)?;
        c.skip_ws();
        if c.eat(",") {
            continue;
        }
        if trailing_period {
            c.expect(".")?;
        }
        return Ok(());
    }
}

fn parse_adj_list(c: &mut Cursor, sink: &mut EdgeSink) -> Result<(), SerializeError> {
    while c.peek_token("- node ") {
        c.expect("- node ")?;
        let u = c.node(sink.n)?;
        c.expect(" is connected to (")?;
        if !c.peek_token(")") {
            loop {
                let v = c.node(sink.n)?;
                let w = if c.peek_token("(") {
                    c.expect("(")?;
                    let w = c.weight()?;
                    c.token(")")?;
                    Some(w)
                } else {
                    None
                };
                sink.add(c, u, v, w)?;
                if !c.peek_token(",") {
                    break;
                }
                c.expect(",")?;
            }
        }
        c.token(")")?;
        c.token(",")?;
    }
    Ok(())
}

// rows and columns are parsed in lockstep with the positions they record
#[allow(clippy::needless_range_loop)]
fn parse_matrix(c: &mut Cursor, sink: &mut EdgeSink, weighted: bool) -> Result<(), SerializeError> {
    let n = sink.n as usize;
    // cell[i][j] is Some(weight-or-none) when an edge is present
    let mut cells: Vec<Vec<Option<Option<Weight>>>> = Vec::with_capacity(n);
    let mut at_cell = vec![vec![0usize; n]; n];
    c.token("[")?;
    for i in 0..n {
        if i > 0 {
            c.token(",")?;
        }
        c.token("[")?;
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            if j > 0 {
                c.token(",")?;
            }
            c.skip_ws();
            let at = c.pos;
            at_cell[i][j] = at;
            let cell = c.number_text()?;
            let bad = |message: &str| SerializeError::Parse { offset: at, message: message.into() };
            let entry = match (cell, weighted) {
                ("0", _) => None,
                ("1", false) => Some(None),
                (_, true) => Some(Some(Weight::parse(cell).map_err(|e| bad(&e.to_string()))?)),
                _ => return Err(bad("binary matrix entry must be 0 or 1")),
            };
            if entry.is_some() && i == j {
                return Err(bad("non-zero diagonal entry"));
            }
            row.push(entry);
        }
        c.token("]")?;
        cells.push(row);
    }
    c.token("]")?;
    for i in 0..n {
        for j in 0..n {
            if !sink.directed && cells[i][j] != cells[j][i] {
                let offset = at_cell[i][j];
                return Err(SerializeError::Parse { offset, message: "undirected matrix is not symmetric".into() });
            }
            if let Some(w) = &cells[i][j] {
                if sink.directed || i < j {
                    sink.add(c, i as NodeId + 1, j as NodeId + 1, w.clone())?;
                }
            }
        }
    }
    Ok(())
}

fn parse_json(c: &mut Cursor, sink: &mut EdgeSink) -> Result<(), SerializeError> {
    c.token("{")?;
    c.token("\"nodes\"")?;
    c.token(":")?;
    c.token("[")?;
    let mut expected = 1u64;
    while !c.peek_token("]") {
        if expected > 1 {
            c.expect(",")?;
            c.skip_ws();
        }
        c.expect("\"")?;
        let at = c.pos;
        let id = c.uint()?;
        if id != expected {
            return Err(SerializeError::Parse { offset: at, message: format!("expected node \"{expected}\"") });
        }
        c.expect("\"")?;
        expected += 1;
    }
    c.expect("]")?;
    if expected - 1 != sink.n as u64 {
        return Err(SerializeError::Consistency { n: sink.n, node: expected - 1 });
    }
    c.token(",")?;
    c.token("\"edges\"")?;
    c.token(":")?;
    c.token("[")?;
    let mut first = true;
    while !c.peek_token("]") {
        if !first {
            c.expect(",")?;
        }
        first = false;
        c.token("[")?;
        let u = c.node(sink.n)?;
        c.token(",")?;
        let v = c.node(sink.n)?;
        let w = if c.peek_token(",") {
            c.expect(",")?;
            Some(c.weight()?)
        } else {
            None
        };
        c.token("]")?;
        sink.add(c, u, v, w)?;
    }
    c.expect("]")?;
    c.token(",")?;
    c.token("\"directed\"")?;
    c.token(":")?;
    c.skip_ws();
    let flag = if c.eat("true") {
        true
    } else if c.eat("false") {
        false
    } else {
        return Err(c.err("expected true or false"));
    };
    if flag != sink.directed {
        return Err(c.err("\"directed\" disagrees with the graph header"));
    }
    c.token("}")
}

fn parse_networkx(c: &mut Cursor, sink: &mut EdgeSink) -> Result<(), SerializeError> {
    c.token("import networkx as nx")?;
    c.token(if sink.directed { "G = nx.DiGraph()" } else { "G = nx.Graph()" })?;
    c.token("G.add_nodes_from([")?;
    let mut expected = 1u64;
    while !c.peek_token("]") {
        if expected > 1 {
            c.expect(",")?;
            c.skip_ws();
        }
        let at = c.pos;
        if c.uint()? != expected {
            return Err(SerializeError::Parse { offset: at, message: format!("expected node {expected}") });
        }
        expected += 1;
    }
    c.expect("])")?;
    if expected - 1 != sink.n as u64 {
        return Err(SerializeError::Consistency { n: sink.n, node: expected - 1 });
    }
    c.skip_ws();
    if !(c.eat("G.add_edges_from([") || c.eat("G.add_weighted_edges_from([")) {
        return Err(c.err("expected an add_edges_from call"));
    }
    if !c.peek_token("]") {
        parse_tuples(c, sink, false)?;
    }
    c.token("])")
}

fn parse_int_list(c: &mut Cursor) -> Result<Vec<(usize, u64)>, SerializeError> {
    c.token("[")?;
    let mut out = Vec::new();
    while !c.peek_token("]") {
        if !out.is_empty() {
            c.expect(",")?;
            c.skip_ws();
        }
        out.push((c.pos, c.uint()?));
    }
    c.expect("]")?;
    Ok(out)
}

fn parse_pyg(c: &mut Cursor, sink: &mut EdgeSink) -> Result<(), SerializeError> {
    c.token("from torch_geometric.data import Data")?;
    c.token("import torch")?;
    c.token("edge_index = torch.tensor(")?;
    c.token("[")?;
    let sources = parse_int_list(c)?;
    c.token(",")?;
    let targets = parse_int_list(c)?;
    c.token("]")?;
    c.token(", dtype=torch.long).t().contiguous()")?;
    if sources.len() != targets.len() {
        return Err(c.err("edge_index rows have different lengths"));
    }
    let mut weights: Option<Vec<Weight>> = None;
    if c.peek_token("edge_attr") {
        c.expect("edge_attr = torch.tensor([")?;
        let mut ws = Vec::new();
        while !c.peek_token("]") {
            if !ws.is_empty() {
                c.expect(",")?;
            }
            ws.push(c.weight()?);
        }
        c.expect("]")?;
        c.token(", dtype=torch.float)")?;
        if ws.len() != sources.len() {
            return Err(c.err("edge_attr length differs from edge_index"));
        }
        weights = Some(ws);
        c.token("data = Data(edge_index=edge_index, edge_attr=edge_attr)")?;
    } else {
        c.token("data = Data(edge_index=edge_index)")?;
    }
    let n = sink.n;
    let check = |(_, v): (usize, u64)| -> Result<NodeId, SerializeError> {
        if v == 0 || v > n as u64 {
            Err(SerializeError::Consistency { n, node: v })
        } else {
            Ok(v as NodeId)
        }
    };
    for i in 0..sources.len() {
        let u = check(sources[i])?;
        let v = check(targets[i])?;
        let w = weights.as_ref().map(|ws| ws[i].clone());
        sink.add(c, u, v, w)?;
    }
    Ok(())
}

/// Ablation axes with their encoding grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    StructureSorted,
    Shuffles,
    Replication,
    Syntaxes,
}

impl Ablation {
    pub const ALL: [Ablation; 4] =
        [Ablation::StructureSorted, Ablation::Shuffles, Ablation::Replication, Ablation::Syntaxes];
}

/// Encoding grid of one ablation. Shuffled specs carry seed 0; callers set
/// per-run seeds with [`EncodingSpec::with_shuffle_seed`].
pub fn enumerate_specs(ablation: Ablation) -> Vec<EncodingSpec> {
    use OrderRule::*;
    let plain = |s, o, r| EncodingSpec::new(s, o, r, Syntax::ErdosPlain);
    let seeded = |spec: EncodingSpec| if spec.order.is_shuffled() { spec.with_shuffle_seed(0) } else { spec };
    let specs = match ablation {
        Ablation::StructureSorted => vec![
            plain(Structure::EdgeList, SortedSourceTarget, false),
            plain(Structure::AdjList, SortedSourceTarget, true),
            plain(Structure::AdjMatrix, SortedSourceTarget, false),
        ],
        Ablation::Shuffles => {
            let mut v = Vec::new();
            for order in [SortedSourceShuffledTarget, SortedTargetShuffledSource, ShuffledAll] {
                v.push(plain(Structure::EdgeList, order, false));
                v.push(plain(Structure::EdgeList, order, true));
            }
            for order in [SortedSourceShuffledTarget, SortedTargetShuffledSource, ShuffledAll] {
                v.push(plain(Structure::AdjList, order, true));
            }
            v
        }
        Ablation::Replication => {
            let mut v = Vec::new();
            for order in [SortedSourceTarget, SortedSourceShuffledTarget, ShuffledAll] {
                v.push(plain(Structure::EdgeList, order, false));
                v.push(plain(Structure::EdgeList, order, true));
            }
            v
        }
        Ablation::Syntaxes => {
            Syntax::ALL.iter().map(|&syntax| EncodingSpec::new(Structure::EdgeList, Verbatim, false, syntax)).collect()
        }
    };
    specs.into_iter().map(seeded).collect()
}

/// Baseline plus every ablation grid, without duplicates, in first-seen order.
pub fn full_grid() -> Vec<EncodingSpec> {
    let mut out = vec![EncodingSpec::erdos()];
    for a in Ablation::ALL {
        for spec in enumerate_specs(a) {
            if !out.contains(&spec) {
                out.push(spec);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::from_pairs(2, false, &[(1, 2)]).unwrap()
    }

    #[test]
    fn pyg_block_of_k2_collapses_both_directions() {
        let text = "Here is an undirected graph containing nodes from 1 to 2. This is the PyG code representation of the graph:\nfrom torch_geometric.data import Data\nimport torch\nedge_index = torch.tensor([[1, 2], [2, 1]], dtype=torch.long).t().contiguous()\ndata = Data(edge_index=edge_index)";
        let parsed = parse(text).unwrap();
        assert_eq!(parsed.graph, k2());
        assert_eq!(parsed.syntax, Syntax::PygCode);
        let spec = EncodingSpec::new(Structure::EdgeList, OrderRule::Verbatim, false, Syntax::PygCode);
        assert_eq!(render(&k2(), &spec).unwrap().text, text);
    }

    #[test]
    fn spec_validation() {
        let bad = EncodingSpec::new(Structure::AdjList, OrderRule::Verbatim, true, Syntax::Json);
        assert!(matches!(bad.validate(), Err(SerializeError::InvalidSpec(_))));
        let unseeded = EncodingSpec::new(Structure::EdgeList, OrderRule::ShuffledAll, false, Syntax::ErdosPlain);
        assert!(matches!(render(&k2(), &unseeded), Err(SerializeError::InvalidSpec(_))));
        let matrix = EncodingSpec::new(Structure::AdjMatrix, OrderRule::ShuffledAll, true, Syntax::ErdosPlain);
        assert!(matrix.validate().is_ok());
    }

    #[test]
    fn empty_and_single_node_graphs() {
        let g = Graph::new(1, false, vec![]).unwrap();
        for spec in full_grid() {
            let spec = spec.with_shuffle_seed(3);
            let text = render(&g, &spec).unwrap().text;
            assert_eq!(parse(&text).unwrap().graph, g, "{}", spec.id());
        }
        let edge_list = render(&g, &EncodingSpec::erdos()).unwrap().text;
        assert_eq!(edge_list, "Here is an undirected graph containing nodes from 1 to 1. The edges are: none.");
        let matrix = render(&g, &enumerate_specs(Ablation::StructureSorted)[2]).unwrap().text;
        assert!(matrix.ends_with(":\n[[0]]"));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let text = "Here is an undirected graph containing nodes from 1 to 3. The edges are: (1, 2), (2; 3).";
        match parse(text) {
            Err(SerializeError::Parse { offset, .. }) => assert_eq!(&text[offset..offset + 1], ";"),
            other => panic!("unexpected {other:?}"),
        }
        let text = "Here is an undirected graph containing nodes from 1 to 3. The edges are: (1, 4).";
        assert_eq!(parse(text).unwrap_err(), SerializeError::Consistency { n: 3, node: 4 });
        assert!(matches!(parse("hello"), Err(SerializeError::Parse { offset: 0, .. })));
    }

    #[test]
    fn weighted_and_directed_round_trip() {
        let w = |s: &str| Weight::parse(s).unwrap();
        let g = Graph::new(
            4,
            true,
            vec![Edge::weighted(2, 1, w("2.50")), Edge::weighted(1, 2, w("3")), Edge::weighted(3, 4, w("1e-1"))],
        )
        .unwrap();
        for spec in full_grid() {
            let text = render(&g, &spec.with_shuffle_seed(9)).unwrap().text;
            let back = parse(&text).unwrap().graph;
            assert!(back.same_edges(&g), "{}:\n{text}", spec.id());
        }
    }

    #[test]
    fn ablation_grid_sizes() {
        assert_eq!(enumerate_specs(Ablation::StructureSorted).len(), 3);
        assert_eq!(enumerate_specs(Ablation::Syntaxes).len(), 4);
        let rep = enumerate_specs(Ablation::Replication);
        assert!(rep.chunks(2).all(|p| !p[0].replicate_undirected && p[1].replicate_undirected));
        assert!(full_grid().iter().all(|s| s.validate().is_ok()));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::graph::sample;
    use proptest::prelude::*;

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1u32..=20, 0.0f64..0.5, any::<u64>(), any::<bool>(), any::<bool>()).prop_map(
            |(n, p, seed, directed, weighted)| {
                let mut rng = RngStream::new(seed);
                let g = sample::gnp(n, p, directed, &mut rng);
                if weighted && g.m() > 0 {
                    sample::with_integer_weights(&g, 9, &mut rng)
                } else {
                    g
                }
            },
        )
    }

    fn all_specs(seed: u64) -> Vec<EncodingSpec> {
        let mut out = Vec::new();
        for structure in Structure::ALL {
            for order in OrderRule::ALL {
                for syntax in Syntax::ALL {
                    for rep in [false, true] {
                        let spec = EncodingSpec::new(structure, order, rep, syntax).with_shuffle_seed(seed);
                        if spec.validate().is_ok() {
                            out.push(spec);
                        }
                    }
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip_every_spec(g in arb_graph(), seed in any::<u64>()) {
            let sorted = parse(&render(&g, &EncodingSpec::new(Structure::EdgeList, OrderRule::SortedSourceTarget, false, Syntax::ErdosPlain)).unwrap().text).unwrap().graph;
            for spec in all_specs(seed) {
                let text = render(&g, &spec).unwrap().text;
                prop_assert_eq!(&render(&g, &spec).unwrap().text, &text);
                let back = parse(&text).unwrap();
                prop_assert_eq!(back.graph.canonical(), g.canonical(), "{}", spec.id());
                prop_assert_eq!(back.graph.canonical(), sorted.canonical());
                prop_assert_eq!(back.structure, spec.structure);
            }
        }

        #[test]
        fn shuffle_seed_changes_text(seed in any::<u64>()) {
            let g = sample::gnp(12, 0.4, false, &mut RngStream::new(seed));
            prop_assume!(g.m() >= 6);
            let spec = EncodingSpec::new(Structure::EdgeList, OrderRule::ShuffledAll, false, Syntax::ErdosPlain);
            let a = render(&g, &spec.with_shuffle_seed(1)).unwrap().text;
            let b = render(&g, &spec.with_shuffle_seed(2)).unwrap().text;
            prop_assert_ne!(a, b);
        }
    }
}
