//! Combinatorial primitives the task solvers compose.
//!
//! Tie-breaking is ascending node id everywhere. Directed graphs follow arcs
//! for traversals, paths and centralities; the eccentricity family
//! (diameter, radius, center, periphery, barycenter) and bipartiteness use
//! the underlying undirected graph.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use crate::graph::{Edge, Graph, GraphError, NodeId};

/// Sorted neighbour lists with edge costs, indexed by node id (slot 0 unused).
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub out: Vec<Vec<(NodeId, f64)>>,
    pub inc: Vec<Vec<(NodeId, f64)>>,
    pub undirected: Vec<Vec<NodeId>>,
}

impl Adjacency {
    pub fn new(g: &Graph) -> Self {
        let size = g.n() as usize + 1;
        let mut out = vec![Vec::new(); size];
        let mut inc = vec![Vec::new(); size];
        let mut und = vec![Vec::new(); size];
        for e in g.edges() {
            let c = e.cost();
            out[e.source as usize].push((e.target, c));
            inc[e.target as usize].push((e.source, c));
            if !g.is_directed() {
                out[e.target as usize].push((e.source, c));
                inc[e.source as usize].push((e.target, c));
            }
            und[e.source as usize].push(e.target);
            und[e.target as usize].push(e.source);
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_by_key(|a| a.0);
        }
        for list in &mut und {
            list.sort_unstable();
            list.dedup();
        }
        Adjacency { out, inc, undirected: und }
    }

    pub fn successors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out[u as usize].iter().map(|&(v, _)| v)
    }
}

fn check_node(g: &Graph, u: NodeId) -> Result<(), GraphError> {
    if u == 0 || u > g.n() {
        Err(GraphError::NodeOutOfRange { node: u as i64, n: g.n() })
    } else {
        Ok(())
    }
}

/// Undirected degree, or in-degree plus out-degree for directed graphs.
pub fn degree(g: &Graph, u: NodeId) -> Result<usize, GraphError> {
    check_node(g, u)?;
    Ok(g.edges().iter().filter(|e| e.source == u || e.target == u).count())
}

pub fn degrees(g: &Graph) -> Vec<usize> {
    let mut d = vec![0; g.n() as usize + 1];
    for e in g.edges() {
        d[e.source as usize] += 1;
        d[e.target as usize] += 1;
    }
    d
}

/// Neighbours (successors for directed graphs), ascending.
pub fn neighbors(g: &Graph, u: NodeId) -> Result<Vec<NodeId>, GraphError> {
    check_node(g, u)?;
    Ok(Adjacency::new(g).successors(u).collect())
}

pub fn common_neighbors(g: &Graph, u: NodeId, v: NodeId) -> Result<Vec<NodeId>, GraphError> {
    let a: BTreeSet<_> = neighbors(g, u)?.into_iter().collect();
    let b: BTreeSet<_> = neighbors(g, v)?.into_iter().collect();
    Ok(a.intersection(&b).copied().collect())
}

pub fn has_edge(g: &Graph, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
    check_node(g, u)?;
    check_node(g, v)?;
    Ok(g.edges()
        .iter()
        .any(|e| (e.source == u && e.target == v) || (!g.is_directed() && e.source == v && e.target == u)))
}

pub fn density(g: &Graph) -> f64 {
    let n = g.n() as f64;
    if g.n() < 2 {
        return 0.0;
    }
    let pairs = if g.is_directed() { n * (n - 1.0) } else { n * (n - 1.0) / 2.0 };
    g.m() as f64 / pairs
}

pub fn is_regular(g: &Graph) -> bool {
    if g.is_directed() {
        let adj = Adjacency::new(g);
        let d0 = (adj.out[1].len(), adj.inc[1].len());
        return g.nodes().all(|u| (adj.out[u as usize].len(), adj.inc[u as usize].len()) == d0 && d0.0 == d0.1);
    }
    let d = degrees(g);
    d[1..].iter().all(|&x| x == d[1])
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Weakly connected components, each sorted, ordered by smallest member.
pub fn components(g: &Graph) -> Vec<Vec<NodeId>> {
    let mut uf = UnionFind::new(g.n() as usize + 1);
    for e in g.edges() {
        uf.union(e.source as usize, e.target as usize);
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<NodeId>> = Default::default();
    for u in g.nodes() {
        by_root.entry(uf.find(u as usize)).or_default().push(u);
    }
    let mut comps: Vec<_> = by_root.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

pub fn component_count(g: &Graph) -> usize {
    components(g).len()
}

pub fn is_bipartite(g: &Graph) -> bool {
    let adj = Adjacency::new(g);
    let mut color = vec![-1i8; g.n() as usize + 1];
    for s in g.nodes() {
        if color[s as usize] >= 0 {
            continue;
        }
        color[s as usize] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj.undirected[u as usize] {
                if color[v as usize] < 0 {
                    color[v as usize] = 1 - color[u as usize];
                    q.push_back(v);
                } else if color[v as usize] == color[u as usize] {
                    return false;
                }
            }
        }
    }
    true
}

/// Directed cycle for directed graphs; any cycle for undirected ones.
pub fn has_cycle(g: &Graph) -> bool {
    if g.is_directed() {
        topological_sort(g).is_err()
    } else {
        g.m() + component_count(g) > g.n() as usize
    }
}

/// Tarjan's algorithm, iterative. Undirected graphs count as symmetric digraphs.
pub fn strongly_connected_count(g: &Graph) -> usize {
    let adj = Adjacency::new(g);
    let n = g.n() as usize;
    let mut index = vec![usize::MAX; n + 1];
    let mut low = vec![0usize; n + 1];
    let mut on_stack = vec![false; n + 1];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut count = 0;
    for s in 1..=n {
        if index[s] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(s, 0)];
        index[s] = next;
        low[s] = next;
        next += 1;
        stack.push(s);
        on_stack[s] = true;
        while let Some(&mut (u, ref mut i)) = call.last_mut() {
            if *i < adj.out[u].len() {
                let v = adj.out[u][*i].0 as usize;
                *i += 1;
                if index[v] == usize::MAX {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    count += 1;
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        if w == u {
                            break;
                        }
                    }
                }
            }
        }
    }
    count
}

/// BFS order from `start`, neighbours ascending.
pub fn bfs_order(g: &Graph, start: NodeId) -> Result<Vec<NodeId>, GraphError> {
    check_node(g, start)?;
    let adj = Adjacency::new(g);
    let mut seen = vec![false; g.n() as usize + 1];
    seen[start as usize] = true;
    let mut order = vec![start];
    let mut q = VecDeque::from([start]);
    while let Some(u) = q.pop_front() {
        for v in adj.successors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                order.push(v);
                q.push_back(v);
            }
        }
    }
    Ok(order)
}

/// DFS preorder from `start`, neighbours ascending.
pub fn dfs_order(g: &Graph, start: NodeId) -> Result<Vec<NodeId>, GraphError> {
    check_node(g, start)?;
    let adj = Adjacency::new(g);
    let mut seen = vec![false; g.n() as usize + 1];
    let mut order = Vec::new();
    let mut stack = vec![(start, 0usize)];
    seen[start as usize] = true;
    order.push(start);
    while let Some((u, i)) = stack.last_mut() {
        let list = &adj.out[*u as usize];
        if *i >= list.len() {
            stack.pop();
            continue;
        }
        let v = list[*i].0;
        *i += 1;
        if !seen[v as usize] {
            seen[v as usize] = true;
            order.push(v);
            stack.push((v, 0));
        }
    }
    Ok(order)
}

fn reachable_set(adj: &Adjacency, n: u32, start: NodeId) -> Vec<bool> {
    let mut seen = vec![false; n as usize + 1];
    seen[start as usize] = true;
    let mut q = VecDeque::from([start]);
    while let Some(u) = q.pop_front() {
        for v in adj.successors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                q.push_back(v);
            }
        }
    }
    seen
}

/// Whether `order` is a BFS order from `start` under some tie-break.
pub fn is_valid_bfs_order(g: &Graph, start: NodeId, order: &[NodeId]) -> bool {
    if check_node(g, start).is_err() || order.first() != Some(&start) {
        return false;
    }
    if order.iter().any(|&u| u == 0 || u > g.n()) {
        return false;
    }
    let adj = Adjacency::new(g);
    let reach = reachable_set(&adj, g.n(), start);
    if order.len() != reach.iter().filter(|&&r| r).count() {
        return false;
    }
    let mut seen = vec![false; g.n() as usize + 1];
    seen[start as usize] = true;
    let mut pos = 1;
    let mut head = 0;
    while head < pos {
        let u = order[head];
        head += 1;
        let fresh: BTreeSet<NodeId> = adj.successors(u).filter(|&v| !seen[v as usize]).collect();
        if pos + fresh.len() > order.len() {
            return false;
        }
        let next: BTreeSet<NodeId> = order[pos..pos + fresh.len()].iter().copied().collect();
        if next != fresh {
            return false;
        }
        for &v in &fresh {
            seen[v as usize] = true;
        }
        pos += fresh.len();
    }
    pos == order.len()
}

/// Whether `order` is a DFS preorder from `start` under some tie-break.
pub fn is_valid_dfs_order(g: &Graph, start: NodeId, order: &[NodeId]) -> bool {
    if check_node(g, start).is_err() || order.first() != Some(&start) {
        return false;
    }
    if order.iter().any(|&u| u == 0 || u > g.n()) {
        return false;
    }
    let adj = Adjacency::new(g);
    let reach = reachable_set(&adj, g.n(), start);
    if order.len() != reach.iter().filter(|&&r| r).count() {
        return false;
    }
    let mut seen = vec![false; g.n() as usize + 1];
    seen[start as usize] = true;
    let mut stack = vec![start];
    for &v in &order[1..] {
        if seen[v as usize] {
            return false;
        }
        loop {
            let Some(&top) = stack.last() else { return false };
            if adj.successors(top).any(|w| !seen[w as usize]) {
                break;
            }
            stack.pop();
        }
        let top = *stack.last().expect("non-empty after loop");
        if !adj.successors(top).any(|w| w == v) {
            return false;
        }
        seen[v as usize] = true;
        stack.push(v);
    }
    true
}

/// Hop distances from `s` following arcs; `None` when unreachable.
pub fn bfs_distances(adj: &Adjacency, n: u32, s: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; n as usize + 1];
    dist[s as usize] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        let du = dist[u as usize].expect("queued nodes have a distance");
        for v in adj.successors(u) {
            if dist[v as usize].is_none() {
                dist[v as usize] = Some(du + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

fn undirected_distances(adj: &Adjacency, n: u32, s: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; n as usize + 1];
    dist[s as usize] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        let du = dist[u as usize].expect("queued nodes have a distance");
        for &v in &adj.undirected[u as usize] {
            if dist[v as usize].is_none() {
                dist[v as usize] = Some(du + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Unweighted shortest path; the first-discovered parent wins ties.
pub fn shortest_path(g: &Graph, from: NodeId, to: NodeId) -> Result<Vec<NodeId>, GraphError> {
    check_node(g, from)?;
    check_node(g, to)?;
    let adj = Adjacency::new(g);
    let mut parent = vec![0; g.n() as usize + 1];
    let mut seen = vec![false; g.n() as usize + 1];
    seen[from as usize] = true;
    let mut q = VecDeque::from([from]);
    while let Some(u) = q.pop_front() {
        if u == to {
            break;
        }
        for v in adj.successors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                parent[v as usize] = u;
                q.push_back(v);
            }
        }
    }
    if !seen[to as usize] {
        return Err(GraphError::NoPath { from, to });
    }
    let mut path = vec![to];
    while *path.last().expect("non-empty") != from {
        path.push(parent[*path.last().expect("non-empty") as usize]);
    }
    path.reverse();
    Ok(path)
}

pub fn hop_distance(g: &Graph, from: NodeId, to: NodeId) -> Result<u32, GraphError> {
    check_node(g, from)?;
    check_node(g, to)?;
    bfs_distances(&Adjacency::new(g), g.n(), from)[to as usize].ok_or(GraphError::NoPath { from, to })
}

/// Cost of walking `path` along existing edges; `None` if a step is missing
/// or a node repeats.
pub fn path_cost(g: &Graph, path: &[NodeId]) -> Option<f64> {
    if path.is_empty() || path.iter().any(|&u| u == 0 || u > g.n()) {
        return None;
    }
    let distinct: BTreeSet<_> = path.iter().collect();
    if distinct.len() != path.len() {
        return None;
    }
    let adj = Adjacency::new(g);
    let mut total = 0.0;
    for w in path.windows(2) {
        let (_, c) = adj.out[w[0] as usize].iter().find(|&&(v, _)| v == w[1])?;
        total += c;
    }
    Some(total)
}

/// Dijkstra distances from `s`.
pub fn dijkstra(g: &Graph, s: NodeId) -> Result<(Vec<Option<f64>>, Vec<NodeId>), GraphError> {
    check_node(g, s)?;
    let adj = Adjacency::new(g);
    let size = g.n() as usize + 1;
    let mut dist: Vec<Option<f64>> = vec![None; size];
    let mut parent = vec![0; size];
    let mut done = vec![false; size];
    dist[s as usize] = Some(0.0);
    // keys are (distance bits, node) so ties pop the smaller id first
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((ordered(0.0), s)));
    while let Some(Reverse((_, u))) = heap.pop() {
        if std::mem::replace(&mut done[u as usize], true) {
            continue;
        }
        let du = dist[u as usize].expect("popped nodes have a distance");
        for &(v, c) in &adj.out[u as usize] {
            let cand = du + c;
            if dist[v as usize].is_none_or(|dv| cand < dv) {
                dist[v as usize] = Some(cand);
                parent[v as usize] = u;
                heap.push(Reverse((ordered(cand), v)));
            }
        }
    }
    Ok((dist, parent))
}

fn ordered(x: f64) -> u64 {
    // non-negative floats order like their bit patterns
    x.to_bits()
}

pub fn weighted_shortest_path(g: &Graph, from: NodeId, to: NodeId) -> Result<(Vec<NodeId>, f64), GraphError> {
    check_node(g, to)?;
    let (dist, parent) = dijkstra(g, from)?;
    let d = dist[to as usize].ok_or(GraphError::NoPath { from, to })?;
    let mut path = vec![to];
    while *path.last().expect("non-empty") != from {
        path.push(parent[*path.last().expect("non-empty") as usize]);
    }
    path.reverse();
    Ok((path, d))
}

/// Kruskal spanning forest ordered by (weight, source, target).
pub fn minimum_spanning_forest(g: &Graph) -> (Vec<Edge>, f64) {
    let mut edges = g.canonical_edges();
    edges.sort_by(|a, b| a.cost().total_cmp(&b.cost()).then((a.source, a.target).cmp(&(b.source, b.target))));
    let mut uf = UnionFind::new(g.n() as usize + 1);
    let mut chosen = Vec::new();
    let mut total = 0.0;
    for e in edges {
        if uf.union(e.source as usize, e.target as usize) {
            total += e.cost();
            chosen.push(e);
        }
    }
    (chosen, total)
}

/// Whether `edges` form a spanning forest of `g` (one tree per component).
/// Returns its total weight when valid.
pub fn spanning_forest_weight(g: &Graph, edges: &[(NodeId, NodeId)]) -> Option<f64> {
    let adj = Adjacency::new(g);
    let mut uf = UnionFind::new(g.n() as usize + 1);
    let mut total = 0.0;
    for &(u, v) in edges {
        if u == 0 || v == 0 || u > g.n() || v > g.n() {
            return None;
        }
        let cost =
            adj.out[u as usize].iter().chain(adj.inc[u as usize].iter()).find(|&&(w, _)| w == v).map(|&(_, c)| c)?;
        if !uf.union(u as usize, v as usize) {
            return None;
        }
        total += cost;
    }
    (edges.len() == g.n() as usize - component_count(g)).then_some(total)
}

/// Number of triangles in the undirected view.
pub fn triangle_count(g: &Graph) -> u64 {
    let adj = Adjacency::new(g);
    let mut count = 0;
    for u in g.nodes() {
        for &v in adj.undirected[u as usize].iter().filter(|&&v| v > u) {
            for &w in adj.undirected[v as usize].iter().filter(|&&w| w > v) {
                if adj.undirected[u as usize].binary_search(&w).is_ok() {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Local clustering coefficient in the undirected view.
pub fn clustering(g: &Graph, u: NodeId) -> Result<f64, GraphError> {
    check_node(g, u)?;
    let adj = Adjacency::new(g);
    let nb = &adj.undirected[u as usize];
    let k = nb.len();
    if k < 2 {
        return Ok(0.0);
    }
    let mut links = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if adj.undirected[a as usize].binary_search(&b).is_ok() {
                links += 1;
            }
        }
    }
    Ok(2.0 * links as f64 / (k * (k - 1)) as f64)
}

pub fn average_clustering(g: &Graph) -> f64 {
    let total: f64 = g.nodes().map(|u| clustering(g, u).expect("node in range")).sum();
    total / g.n() as f64
}

/// `degree / (n - 1)`.
pub fn degree_centrality(g: &Graph, u: NodeId) -> Result<f64, GraphError> {
    let d = degree(g, u)?;
    if g.n() < 2 {
        return Ok(1.0);
    }
    Ok(d as f64 / (g.n() - 1) as f64)
}

/// Mean degree of the neighbours of `u`; 0 for isolated nodes.
pub fn average_neighbor_degree(g: &Graph, u: NodeId) -> Result<f64, GraphError> {
    check_node(g, u)?;
    let adj = Adjacency::new(g);
    let nb: Vec<NodeId> = adj.successors(u).collect();
    if nb.is_empty() {
        return Ok(0.0);
    }
    let total: usize = nb.iter().map(|&v| adj.out[v as usize].len()).sum();
    Ok(total as f64 / nb.len() as f64)
}

/// Closeness with the reachable-set correction:
/// `((r - 1) / (n - 1)) * ((r - 1) / sum_of_distances)`.
pub fn closeness_centrality(g: &Graph, u: NodeId) -> Result<f64, GraphError> {
    check_node(g, u)?;
    let dist = bfs_distances(&Adjacency::new(g), g.n(), u);
    let reached: Vec<u32> = dist.iter().flatten().copied().collect();
    let r = reached.len() as f64;
    let total: u32 = reached.iter().sum();
    if total == 0 || g.n() < 2 {
        return Ok(0.0);
    }
    Ok(((r - 1.0) / (g.n() as f64 - 1.0)) * ((r - 1.0) / total as f64))
}

pub fn harmonic_centrality(g: &Graph, u: NodeId) -> Result<f64, GraphError> {
    check_node(g, u)?;
    let dist = bfs_distances(&Adjacency::new(g), g.n(), u);
    Ok(dist.iter().flatten().filter(|&&d| d > 0).map(|&d| 1.0 / d as f64).sum())
}

/// Brandes betweenness for every node (index 0 unused), normalized by
/// `(n - 1)(n - 2)` over ordered source/target pairs.
pub fn betweenness_centrality(g: &Graph) -> Vec<f64> {
    let n = g.n() as usize;
    let adj = Adjacency::new(g);
    let mut cb = vec![0.0; n + 1];
    for s in 1..=n {
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        let mut sigma = vec![0.0f64; n + 1];
        let mut dist = vec![-1i64; n + 1];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            stack.push(v);
            for w in adj.successors(v as NodeId) {
                let w = w as usize;
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0; n + 1];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    if n > 2 {
        let scale = 1.0 / ((n - 1) * (n - 2)) as f64;
        for x in &mut cb {
            *x *= scale;
        }
    }
    cb
}

/// PageRank by power iteration (damping 0.85, at most 100 iterations,
/// stop when the L1 change is below `n * 1e-9`). Dangling mass is spread
/// uniformly; edge weights act as transition weights.
pub fn pagerank(g: &Graph) -> Vec<f64> {
    const ALPHA: f64 = 0.85;
    const MAX_ITER: usize = 100;
    const TOL: f64 = 1e-9;
    let n = g.n() as usize;
    let adj = Adjacency::new(g);
    let out_weight: Vec<f64> = (0..=n).map(|u| adj.out[u].iter().map(|&(_, c)| c).sum()).collect();
    let mut x = vec![1.0 / n as f64; n + 1];
    x[0] = 0.0;
    for _ in 0..MAX_ITER {
        let dangling: f64 = (1..=n).filter(|&u| out_weight[u] == 0.0).map(|u| x[u]).sum();
        let mut next = vec![0.0; n + 1];
        for u in 1..=n {
            if out_weight[u] == 0.0 {
                continue;
            }
            for &(v, c) in &adj.out[u] {
                next[v as usize] += ALPHA * x[u] * c / out_weight[u];
            }
        }
        let base = ALPHA * dangling / n as f64 + (1.0 - ALPHA) / n as f64;
        for v in next.iter_mut().skip(1) {
            *v += base;
        }
        let err: f64 = (1..=n).map(|u| (next[u] - x[u]).abs()).sum();
        x = next;
        if err < n as f64 * TOL {
            break;
        }
    }
    x
}

/// How eccentricity-based tasks treat disconnected graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentPolicy {
    /// Restrict to the components of maximum size.
    #[default]
    LargestComponent,
    /// Reject disconnected graphs.
    Error,
}

/// Eccentricity and distance sum of every node inside the largest
/// component(s); nodes elsewhere are `None`.
#[derive(Debug, Clone)]
pub struct Eccentricities {
    pub ecc: Vec<Option<u32>>,
    pub distance_sum: Vec<Option<u64>>,
}

pub fn eccentricities(g: &Graph, policy: ComponentPolicy) -> Result<Eccentricities, GraphError> {
    let comps = components(g);
    if policy == ComponentPolicy::Error && comps.len() > 1 {
        return Err(GraphError::Disconnected);
    }
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    let adj = Adjacency::new(g);
    let size = g.n() as usize + 1;
    let mut ecc = vec![None; size];
    let mut sums = vec![None; size];
    for comp in comps.iter().filter(|c| c.len() == largest) {
        for &u in comp {
            let dist = undirected_distances(&adj, g.n(), u);
            let reached = dist.iter().flatten();
            ecc[u as usize] = reached.clone().max().copied();
            sums[u as usize] = Some(reached.map(|&d| d as u64).sum());
        }
    }
    Ok(Eccentricities { ecc, distance_sum: sums })
}

impl Eccentricities {
    pub fn diameter(&self) -> u32 {
        self.ecc.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn radius(&self) -> u32 {
        self.ecc.iter().flatten().copied().min().unwrap_or(0)
    }

    pub fn center(&self) -> Vec<NodeId> {
        let r = self.radius();
        self.nodes_where(|e| e == r)
    }

    pub fn periphery(&self) -> Vec<NodeId> {
        let d = self.diameter();
        self.nodes_where(|e| e == d)
    }

    pub fn barycenter(&self) -> Vec<NodeId> {
        let best = self.distance_sum.iter().flatten().copied().min().unwrap_or(0);
        self.distance_sum.iter().enumerate().filter(|(_, s)| **s == Some(best)).map(|(u, _)| u as NodeId).collect()
    }

    fn nodes_where(&self, pred: impl Fn(u32) -> bool) -> Vec<NodeId> {
        self.ecc.iter().enumerate().filter(|(_, e)| e.is_some_and(&pred)).map(|(u, _)| u as NodeId).collect()
    }
}

/// Kahn's algorithm taking the smallest available id first.
pub fn topological_sort(g: &Graph) -> Result<Vec<NodeId>, GraphError> {
    if !g.is_directed() {
        return Err(GraphError::NotADag);
    }
    let adj = Adjacency::new(g);
    let mut indeg: Vec<usize> = (0..=g.n() as usize).map(|u| adj.inc[u].len()).collect();
    let mut heap: BinaryHeap<Reverse<NodeId>> = g.nodes().filter(|&u| indeg[u as usize] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(g.n() as usize);
    while let Some(Reverse(u)) = heap.pop() {
        order.push(u);
        for v in adj.successors(u) {
            indeg[v as usize] -= 1;
            if indeg[v as usize] == 0 {
                heap.push(Reverse(v));
            }
        }
    }
    if order.len() != g.n() as usize {
        return Err(GraphError::NotADag);
    }
    Ok(order)
}

pub fn is_valid_topological_order(g: &Graph, order: &[NodeId]) -> bool {
    if !g.is_directed() || order.len() != g.n() as usize {
        return false;
    }
    let mut pos = vec![usize::MAX; g.n() as usize + 1];
    for (i, &u) in order.iter().enumerate() {
        if u == 0 || u > g.n() || pos[u as usize] != usize::MAX {
            return false;
        }
        pos[u as usize] = i;
    }
    g.edges().iter().all(|e| pos[e.source as usize] < pos[e.target as usize])
}

/// Eulerian circuit exists: connected over all nodes and every degree even
/// (in-degree equal to out-degree and strongly connected when directed).
pub fn is_eulerian(g: &Graph) -> bool {
    if g.is_directed() {
        let adj = Adjacency::new(g);
        return g.nodes().all(|u| adj.out[u as usize].len() == adj.inc[u as usize].len())
            && strongly_connected_count(g) == 1;
    }
    degrees(g)[1..].iter().all(|d| d % 2 == 0) && component_count(g) == 1
}

/// Bridges of the undirected view as `(min, max)` pairs, sorted.
pub fn bridges(g: &Graph) -> Vec<(NodeId, NodeId)> {
    let adj = Adjacency::new(g);
    let n = g.n() as usize;
    let mut disc = vec![0usize; n + 1];
    let mut low = vec![0usize; n + 1];
    let mut timer = 1;
    let mut out = Vec::new();
    for s in 1..=n {
        if disc[s] != 0 {
            continue;
        }
        disc[s] = timer;
        low[s] = timer;
        timer += 1;
        // (node, parent, next neighbour index)
        let mut stack = vec![(s, 0usize, 0usize)];
        while let Some(&mut (u, parent, ref mut i)) = stack.last_mut() {
            if *i < adj.undirected[u].len() {
                let v = adj.undirected[u][*i] as usize;
                *i += 1;
                if v == parent {
                    continue;
                }
                if disc[v] == 0 {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, u, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != 0 {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        out.push(((parent.min(u)) as NodeId, (parent.max(u)) as NodeId));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Sum of hop distances over unordered pairs; disconnected graphs have no
/// finite Wiener index.
pub fn wiener_index(g: &Graph) -> Result<u64, GraphError> {
    if component_count(g) > 1 {
        return Err(GraphError::Disconnected);
    }
    let adj = Adjacency::new(g);
    let mut total = 0u64;
    for u in g.nodes() {
        total += undirected_distances(&adj, g.n(), u).iter().flatten().map(|&d| d as u64).sum::<u64>();
    }
    Ok(total / 2)
}

/// Mean of `1 / d(u, v)` over ordered pairs, unreachable pairs contribute 0.
pub fn global_efficiency(g: &Graph) -> f64 {
    let n = g.n() as usize;
    if n < 2 {
        return 0.0;
    }
    let adj = Adjacency::new(g);
    let mut total = 0.0;
    for u in g.nodes() {
        total +=
            bfs_distances(&adj, g.n(), u).iter().flatten().filter(|&&d| d > 0).map(|&d| 1.0 / d as f64).sum::<f64>();
    }
    total / (n * (n - 1)) as f64
}

pub fn jaccard_coefficient(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, GraphError> {
    let a: BTreeSet<_> = neighbors(g, u)?.into_iter().collect();
    let b: BTreeSet<_> = neighbors(g, v)?.into_iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return Ok(0.0);
    }
    Ok(a.intersection(&b).count() as f64 / union as f64)
}

pub fn adamic_adar_index(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, GraphError> {
    let d = degrees(g);
    Ok(common_neighbors(g, u, v)?.iter().map(|&w| 1.0 / (d[w as usize] as f64).ln()).sum())
}

pub fn resource_allocation_index(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, GraphError> {
    let d = degrees(g);
    Ok(common_neighbors(g, u, v)?.iter().map(|&w| 1.0 / d[w as usize] as f64).sum())
}

/// Edmonds–Karp maximum flow; capacities are edge weights (1 when
/// unweighted), undirected edges carry capacity both ways.
pub fn max_flow(g: &Graph, s: NodeId, t: NodeId) -> Result<f64, GraphError> {
    check_node(g, s)?;
    check_node(g, t)?;
    if s == t {
        return Ok(0.0);
    }
    let n = g.n() as usize + 1;
    let mut cap = vec![vec![0.0f64; n]; n];
    for e in g.edges() {
        cap[e.source as usize][e.target as usize] += e.cost();
        if !g.is_directed() {
            cap[e.target as usize][e.source as usize] += e.cost();
        }
    }
    let mut flow = 0.0;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s as usize] = s as usize;
        let mut q = VecDeque::from([s as usize]);
        while let Some(u) = q.pop_front() {
            for v in 1..n {
                if parent[v] == usize::MAX && cap[u][v] > 1e-12 {
                    parent[v] = u;
                    q.push_back(v);
                }
            }
        }
        if parent[t as usize] == usize::MAX {
            return Ok(flow);
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t as usize;
        while v != s as usize {
            let u = parent[v];
            bottleneck = bottleneck.min(cap[u][v]);
            v = u;
        }
        let mut v = t as usize;
        while v != s as usize {
            let u = parent[v];
            cap[u][v] -= bottleneck;
            cap[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
}

/// Whether `to` is reachable from `from`.
pub fn is_reachable(g: &Graph, from: NodeId, to: NodeId) -> Result<bool, GraphError> {
    check_node(g, from)?;
    check_node(g, to)?;
    Ok(bfs_distances(&Adjacency::new(g), g.n(), from)[to as usize].is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u32) -> Graph {
        let mut pairs = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                pairs.push((u, v));
            }
        }
        Graph::from_pairs(n, false, &pairs).unwrap()
    }

    #[test]
    fn components_and_bipartite() {
        let g = Graph::from_pairs(4, false, &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(component_count(&g), 2);
        assert!(is_bipartite(&g));
        assert!(!is_bipartite(&k(3)));
        assert!(!has_cycle(&g));
        assert!(has_cycle(&k(3)));
    }

    #[test]
    fn triangles_and_clustering() {
        assert_eq!(triangle_count(&k(3)), 1);
        assert_eq!(triangle_count(&k(4)), 4);
        assert_eq!(clustering(&k(4), 1).unwrap(), 1.0);
        let star = Graph::from_pairs(4, false, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(clustering(&star, 1).unwrap(), 0.0);
        assert_eq!(average_clustering(&k(3)), 1.0);
    }

    #[test]
    fn traversal_verifiers_accept_any_tie_break() {
        let g = Graph::from_pairs(4, false, &[(1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(bfs_order(&g, 1).unwrap(), vec![1, 2, 3, 4]);
        assert!(is_valid_bfs_order(&g, 1, &[1, 3, 2, 4]));
        assert!(!is_valid_bfs_order(&g, 1, &[1, 2, 4, 3]));
        assert_eq!(dfs_order(&g, 1).unwrap(), vec![1, 2, 4, 3]);
        assert!(is_valid_dfs_order(&g, 1, &[1, 3, 4, 2]));
        assert!(!is_valid_dfs_order(&g, 1, &[1, 2, 3, 4]));
        assert!(!is_valid_dfs_order(&g, 1, &[1, 2, 4]));
    }

    #[test]
    fn paths() {
        let g = Graph::from_pairs(4, false, &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(shortest_path(&g, 1, 3), Err(GraphError::NoPath { from: 1, to: 3 }));
        assert_eq!(shortest_path(&g, 2, 1).unwrap(), vec![2, 1]);
        assert_eq!(path_cost(&g, &[1, 2]), Some(1.0));
        assert_eq!(path_cost(&g, &[1, 3]), None);
    }

    #[test]
    fn topological_sort_smallest_first() {
        let g = Graph::from_pairs(4, true, &[(3, 1), (2, 1), (1, 4)]).unwrap();
        assert_eq!(topological_sort(&g).unwrap(), vec![2, 3, 1, 4]);
        assert!(is_valid_topological_order(&g, &[3, 2, 1, 4]));
        assert!(!is_valid_topological_order(&g, &[1, 2, 3, 4]));
        let cyc = Graph::from_pairs(2, true, &[(1, 2), (2, 1)]).unwrap();
        assert_eq!(topological_sort(&cyc), Err(GraphError::NotADag));
        assert_eq!(strongly_connected_count(&cyc), 1);
        assert_eq!(strongly_connected_count(&g), 4);
    }

    #[test]
    fn eccentricity_family_on_path() {
        let p = Graph::from_pairs(5, false, &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let e = eccentricities(&p, ComponentPolicy::Error).unwrap();
        assert_eq!(e.diameter(), 4);
        assert_eq!(e.radius(), 2);
        assert_eq!(e.center(), vec![3]);
        assert_eq!(e.periphery(), vec![1, 5]);
        assert_eq!(e.barycenter(), vec![3]);
        assert_eq!(wiener_index(&p).unwrap(), 20);
        let split = Graph::from_pairs(5, false, &[(1, 2), (2, 3), (4, 5)]).unwrap();
        assert_eq!(eccentricities(&split, ComponentPolicy::Error).unwrap_err(), GraphError::Disconnected);
        assert_eq!(eccentricities(&split, ComponentPolicy::LargestComponent).unwrap().diameter(), 2);
    }

    #[test]
    fn bridges_and_euler() {
        let g = Graph::from_pairs(5, false, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5)]).unwrap();
        assert_eq!(bridges(&g), vec![(3, 4), (4, 5)]);
        assert!(is_eulerian(&k(3)));
        assert!(!is_eulerian(&k(4)));
    }

    #[test]
    fn centralities_on_star() {
        let star = Graph::from_pairs(4, false, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(degree_centrality(&star, 1).unwrap(), 1.0);
        assert_eq!(closeness_centrality(&star, 1).unwrap(), 1.0);
        assert_eq!(harmonic_centrality(&star, 2).unwrap(), 1.0 + 0.5 + 0.5);
        let bc = betweenness_centrality(&star);
        assert!((bc[1] - 1.0).abs() < 1e-12);
        assert_eq!(bc[2], 0.0);
        assert_eq!(average_neighbor_degree(&star, 2).unwrap(), 3.0);
        let pr = pagerank(&star);
        assert!((pr[1..].iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pr[1] > pr[2]);
    }

    #[test]
    fn link_prediction_indices() {
        let g = Graph::from_pairs(4, false, &[(1, 3), (2, 3), (1, 4), (2, 4)]).unwrap();
        assert_eq!(common_neighbors(&g, 1, 2).unwrap(), vec![3, 4]);
        assert_eq!(jaccard_coefficient(&g, 1, 2).unwrap(), 1.0);
        assert!((adamic_adar_index(&g, 1, 2).unwrap() - 2.0 / 2f64.ln()).abs() < 1e-12);
        assert_eq!(resource_allocation_index(&g, 1, 2).unwrap(), 1.0);
    }

    #[test]
    fn flow_mst_dijkstra() {
        assert_eq!(max_flow(&k(4), 1, 2).unwrap(), 3.0);
        let (edges, w) = minimum_spanning_forest(&k(4));
        assert_eq!(edges.len(), 3);
        assert_eq!(w, 3.0);
        let pairs: Vec<_> = edges.iter().map(|e| (e.source, e.target)).collect();
        assert_eq!(spanning_forest_weight(&k(4), &pairs), Some(3.0));
        assert_eq!(spanning_forest_weight(&k(4), &[(1, 2), (2, 3), (1, 3)]), None);
        let (path, d) = weighted_shortest_path(&k(4), 1, 4).unwrap();
        assert_eq!((path, d), (vec![1, 4], 1.0));
    }
}
