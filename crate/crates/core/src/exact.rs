//! Exponential-time reference optima for the NP-hard verifier tasks, plus the
//! validity predicates used to judge candidate answers.
//!
//! Subset enumeration is limited to [`EXACT_LIMIT`] nodes and the subset
//! dynamic programs to [`DP_LIMIT`]; larger instances need an ingested
//! reference.

use std::collections::BTreeSet;

use crate::algo::{self, Adjacency};
use crate::graph::{Graph, NodeId};

pub const EXACT_LIMIT: u32 = 12;
/// Node limit for the `O(2^n n)` dynamic programs.
pub const DP_LIMIT: u32 = 16;

fn undirected_masks(g: &Graph) -> Vec<u32> {
    let adj = Adjacency::new(g);
    let mut masks = vec![0u32; g.n() as usize + 1];
    for u in g.nodes() {
        for &v in &adj.undirected[u as usize] {
            masks[u as usize] |= 1 << (v - 1);
        }
    }
    masks
}

fn nodes_of(mask: u32) -> Vec<NodeId> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// Minimum set minimizing `|S|`, lexicographically smallest mask among ties.
fn min_subset(n: u32, ok: impl Fn(u32) -> bool) -> Option<Vec<NodeId>> {
    (0u32..1 << n).filter(|&m| ok(m)).min_by_key(|&m| (m.count_ones(), m.reverse_bits())).map(nodes_of)
}

pub fn min_dominating_set(g: &Graph) -> Option<Vec<NodeId>> {
    if g.n() > EXACT_LIMIT {
        return None;
    }
    let masks = undirected_masks(g);
    let full = (1u32 << g.n()) - 1;
    min_subset(g.n(), |s| {
        let covered = nodes_of(s).iter().fold(s, |acc, &u| acc | masks[u as usize]);
        covered == full
    })
}

pub fn min_vertex_cover(g: &Graph) -> Option<Vec<NodeId>> {
    if g.n() > EXACT_LIMIT {
        return None;
    }
    min_subset(g.n(), |s| g.edges().iter().all(|e| s >> (e.source - 1) & 1 == 1 || s >> (e.target - 1) & 1 == 1))
}

/// Greedy maximal independent set, ascending ids.
pub fn greedy_maximal_independent_set(g: &Graph) -> Vec<NodeId> {
    let adj = Adjacency::new(g);
    let mut blocked = vec![false; g.n() as usize + 1];
    let mut out = Vec::new();
    for u in g.nodes() {
        if !blocked[u as usize] {
            out.push(u);
            blocked[u as usize] = true;
            for &v in &adj.undirected[u as usize] {
                blocked[v as usize] = true;
            }
        }
    }
    out
}

/// Maximum-weight matching by DP over node subsets; unweighted edges weigh 1.
/// Returns the matching edges as `(min, max)` pairs and its total weight.
pub fn max_weight_matching(g: &Graph) -> Option<(Vec<(NodeId, NodeId)>, f64)> {
    if g.n() > DP_LIMIT {
        return None;
    }
    let n = g.n() as usize;
    let mut w = vec![vec![None; n]; n];
    for e in g.edges() {
        let (s, t) = (e.source as usize - 1, e.target as usize - 1);
        w[s][t] = Some(e.cost());
        w[t][s] = Some(e.cost());
    }
    // best[mask] = best weight using only nodes in mask
    let size = 1usize << n;
    let mut best = vec![0.0f64; size];
    let mut choice = vec![usize::MAX; size];
    for mask in 1..size {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        best[mask] = best[rest];
        choice[mask] = usize::MAX;
        for j in i + 1..n {
            if rest >> j & 1 == 1 {
                if let Some(c) = w[i][j] {
                    let cand = c + best[rest & !(1 << j)];
                    if cand > best[mask] + 1e-12 {
                        best[mask] = cand;
                        choice[mask] = j;
                    }
                }
            }
        }
    }
    let mut edges = Vec::new();
    let mut mask = size - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask];
        mask &= !(1 << i);
        if j != usize::MAX {
            edges.push((i as NodeId + 1, j as NodeId + 1));
            mask &= !(1 << j);
        }
    }
    edges.sort_unstable();
    Some((edges, best[size - 1]))
}

/// Maximum matching of a bipartite graph by augmenting paths (any size).
pub fn bipartite_maximum_matching(g: &Graph) -> Option<Vec<(NodeId, NodeId)>> {
    let adj = Adjacency::new(g);
    let n = g.n() as usize;
    let mut side = vec![-1i8; n + 1];
    for s in g.nodes() {
        if side[s as usize] >= 0 {
            continue;
        }
        side[s as usize] = 0;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj.undirected[u as usize] {
                if side[v as usize] < 0 {
                    side[v as usize] = 1 - side[u as usize];
                    stack.push(v);
                } else if side[v as usize] == side[u as usize] {
                    return None;
                }
            }
        }
    }
    let mut mate = vec![0 as NodeId; n + 1];
    fn augment(u: NodeId, adj: &Adjacency, mate: &mut [NodeId], seen: &mut [bool]) -> bool {
        for &v in &adj.undirected[u as usize] {
            if seen[v as usize] {
                continue;
            }
            seen[v as usize] = true;
            let m = mate[v as usize];
            if m == 0 || augment(m, adj, mate, seen) {
                mate[v as usize] = u;
                mate[u as usize] = v;
                return true;
            }
        }
        false
    }
    for u in g.nodes().filter(|&u| side[u as usize] == 0) {
        if mate[u as usize] == 0 {
            let mut seen = vec![false; n + 1];
            augment(u, &adj, &mut mate, &mut seen);
        }
    }
    let mut out: Vec<_> = g
        .nodes()
        .filter(|&u| side[u as usize] == 0 && mate[u as usize] != 0)
        .map(|u| (u.min(mate[u as usize]), u.max(mate[u as usize])))
        .collect();
    out.sort_unstable();
    Some(out)
}

/// Minimum edge cover: a maximum matching plus one edge per unmatched node.
/// `None` when some node is isolated or the graph is too large.
pub fn min_edge_cover(g: &Graph) -> Option<Vec<(NodeId, NodeId)>> {
    let adj = Adjacency::new(g);
    if g.nodes().any(|u| adj.undirected[u as usize].is_empty()) {
        return None;
    }
    let matching = match bipartite_maximum_matching(g) {
        Some(m) => m,
        None => {
            let unit = Graph::from_pairs(
                g.n(),
                false,
                &g.canonical_edges().iter().map(|e| (e.source, e.target)).collect::<Vec<_>>(),
            )
            .ok()?;
            max_weight_matching(&unit)?.0
        }
    };
    let mut covered = vec![false; g.n() as usize + 1];
    for &(u, v) in &matching {
        covered[u as usize] = true;
        covered[v as usize] = true;
    }
    let mut out = matching;
    for u in g.nodes() {
        if !covered[u as usize] {
            let v = adj.undirected[u as usize][0];
            out.push((u.min(v), u.max(v)));
        }
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// Held–Karp optimal tour starting and ending at node 1. Missing edges are
/// impassable. Returns the node order (without the closing node) and cost.
pub fn tsp(g: &Graph) -> Option<(Vec<NodeId>, f64)> {
    let n = g.n() as usize;
    if g.n() > EXACT_LIMIT {
        return None;
    }
    if n == 1 {
        return Some((vec![1], 0.0));
    }
    let mut w = vec![vec![f64::INFINITY; n]; n];
    for e in g.edges() {
        let (s, t) = (e.source as usize - 1, e.target as usize - 1);
        w[s][t] = e.cost();
        if !g.is_directed() {
            w[t][s] = e.cost();
        }
    }
    let size = 1usize << n;
    let mut dp = vec![vec![f64::INFINITY; n]; size];
    let mut parent = vec![vec![usize::MAX; n]; size];
    dp[1][0] = 0.0;
    for mask in 1..size {
        if mask & 1 == 0 {
            continue;
        }
        for last in 0..n {
            let cur = dp[mask][last];
            if !cur.is_finite() {
                continue;
            }
            for next in 0..n {
                if mask >> next & 1 == 1 || !w[last][next].is_finite() {
                    continue;
                }
                let m2 = mask | 1 << next;
                let cand = cur + w[last][next];
                if cand < dp[m2][next] {
                    dp[m2][next] = cand;
                    parent[m2][next] = last;
                }
            }
        }
    }
    let full = size - 1;
    let (mut last, cost) =
        (1..n).map(|l| (l, dp[full][l] + w[l][0])).filter(|(_, c)| c.is_finite()).min_by(|a, b| a.1.total_cmp(&b.1))?;
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    while last != usize::MAX {
        order.push(last as NodeId + 1);
        let prev = parent[mask][last];
        mask &= !(1 << last);
        last = prev;
    }
    order.reverse();
    Some((order, cost))
}

/// Some Hamiltonian path (undirected view for undirected graphs, arcs for
/// directed ones), found by DP over subsets.
pub fn hamiltonian_path(g: &Graph) -> Option<Vec<NodeId>> {
    let n = g.n() as usize;
    if g.n() > DP_LIMIT {
        return None;
    }
    let adj = Adjacency::new(g);
    let size = 1usize << n;
    let mut prev = vec![vec![usize::MAX; n]; size];
    let mut reach = vec![vec![false; n]; size];
    for v in 0..n {
        reach[1 << v][v] = true;
    }
    for mask in 1..size {
        for last in 0..n {
            if !reach[mask][last] {
                continue;
            }
            for (next, _) in &adj.out[last + 1] {
                let next = *next as usize - 1;
                if mask >> next & 1 == 0 && !reach[mask | 1 << next][next] {
                    reach[mask | 1 << next][next] = true;
                    prev[mask | 1 << next][next] = last;
                }
            }
        }
    }
    let full = size - 1;
    let mut last = (0..n).find(|&v| reach[full][v])?;
    let mut mask = full;
    let mut path = Vec::with_capacity(n);
    loop {
        path.push(last as NodeId + 1);
        let p = prev[mask][last];
        mask &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    path.reverse();
    Some(path)
}

// ---- validity predicates ----

fn as_set(nodes: &[NodeId], n: u32) -> Option<BTreeSet<NodeId>> {
    let set: BTreeSet<_> = nodes.iter().copied().collect();
    (set.len() == nodes.len() && set.iter().all(|&u| u >= 1 && u <= n)).then_some(set)
}

pub fn is_dominating_set(g: &Graph, nodes: &[NodeId]) -> bool {
    let Some(set) = as_set(nodes, g.n()) else { return false };
    let adj = Adjacency::new(g);
    g.nodes().all(|u| set.contains(&u) || adj.undirected[u as usize].iter().any(|v| set.contains(v)))
}

pub fn is_vertex_cover(g: &Graph, nodes: &[NodeId]) -> bool {
    let Some(set) = as_set(nodes, g.n()) else { return false };
    g.edges().iter().all(|e| set.contains(&e.source) || set.contains(&e.target))
}

pub fn is_maximal_independent_set(g: &Graph, nodes: &[NodeId]) -> bool {
    let Some(set) = as_set(nodes, g.n()) else { return false };
    let adj = Adjacency::new(g);
    let independent = g.edges().iter().all(|e| !(set.contains(&e.source) && set.contains(&e.target)));
    let maximal = g.nodes().all(|u| set.contains(&u) || adj.undirected[u as usize].iter().any(|v| set.contains(v)));
    independent && maximal
}

/// Total weight of `edges` if they form a matching of `g`.
pub fn matching_weight(g: &Graph, edges: &[(NodeId, NodeId)]) -> Option<f64> {
    let mut used = BTreeSet::new();
    let mut total = 0.0;
    for &(u, v) in edges {
        let e = find_edge(g, u, v)?;
        if !used.insert(u) || !used.insert(v) {
            return None;
        }
        total += e;
    }
    Some(total)
}

pub fn is_edge_cover(g: &Graph, edges: &[(NodeId, NodeId)]) -> bool {
    let mut covered = vec![false; g.n() as usize + 1];
    let distinct: BTreeSet<_> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    if distinct.len() != edges.len() {
        return false;
    }
    for &(u, v) in edges {
        if find_edge(g, u, v).is_none() {
            return false;
        }
        covered[u as usize] = true;
        covered[v as usize] = true;
    }
    covered[1..].iter().all(|&c| c)
}

fn find_edge(g: &Graph, u: NodeId, v: NodeId) -> Option<f64> {
    g.edges()
        .iter()
        .find(|e| (e.source == u && e.target == v) || (!g.is_directed() && e.source == v && e.target == u))
        .map(|e| e.cost())
}

/// Cost of the closed tour through `order` (a trailing copy of the start
/// node is accepted) if it visits every node exactly once.
pub fn tour_cost(g: &Graph, order: &[NodeId]) -> Option<f64> {
    let mut order = order.to_vec();
    if order.len() == g.n() as usize + 1 && order.first() == order.last() {
        order.pop();
    }
    as_set(&order, g.n()).filter(|s| s.len() == g.n() as usize)?;
    if order.len() == 1 {
        return Some(0.0);
    }
    let mut total = 0.0;
    for i in 0..order.len() {
        total += find_edge(g, order[i], order[(i + 1) % order.len()])?;
    }
    Some(total)
}

pub fn is_hamiltonian_path(g: &Graph, path: &[NodeId]) -> bool {
    path.len() == g.n() as usize && algo::path_cost(g, path).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample, RngStream};
    use proptest::prelude::*;

    fn all_subsets(n: u32) -> impl Iterator<Item = Vec<NodeId>> {
        (0u32..1 << n).map(move |m| (1..=n).filter(|&u| m >> (u - 1) & 1 == 1).collect())
    }

    fn brute_matching(g: &Graph) -> f64 {
        let edges: Vec<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.source, e.target)).collect();
        let mut best = 0.0f64;
        for m in 0u64..1 << edges.len().min(20) {
            let chosen: Vec<_> = (0..edges.len()).filter(|&i| m >> i & 1 == 1).map(|i| edges[i]).collect();
            if let Some(w) = matching_weight(g, &chosen) {
                best = best.max(w);
            }
        }
        best
    }

    fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }

    #[test]
    fn small_fixed_cases() {
        let star = Graph::from_pairs(4, false, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(min_dominating_set(&star), Some(vec![1]));
        assert_eq!(min_vertex_cover(&star), Some(vec![1]));
        assert_eq!(greedy_maximal_independent_set(&star), vec![1]);
        assert!(is_maximal_independent_set(&star, &[2, 3, 4]));
        assert!(!is_maximal_independent_set(&star, &[2, 3]));
        assert_eq!(min_edge_cover(&star).unwrap().len(), 3);
        let sq = Graph::from_pairs(4, false, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        assert_eq!(bipartite_maximum_matching(&sq).unwrap().len(), 2);
        assert_eq!(tsp(&sq).unwrap().1, 4.0);
        assert!(is_hamiltonian_path(&sq, &hamiltonian_path(&sq).unwrap()));
        assert_eq!(tour_cost(&sq, &[1, 2, 3, 4, 1]), Some(4.0));
        assert_eq!(tour_cost(&sq, &[1, 3, 2, 4]), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn agree_with_exhaustive_enumeration(n in 1u32..=8, p in 0.0f64..0.7, seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let g = sample::gnp(n, p, false, &mut rng);
            let dom = all_subsets(n).filter(|s| is_dominating_set(&g, s)).map(|s| s.len()).min().unwrap();
            let got = min_dominating_set(&g).unwrap();
            prop_assert!(is_dominating_set(&g, &got));
            prop_assert_eq!(got.len(), dom);
            let cover = all_subsets(n).filter(|s| is_vertex_cover(&g, s)).map(|s| s.len()).min().unwrap();
            let got = min_vertex_cover(&g).unwrap();
            prop_assert!(is_vertex_cover(&g, &got));
            prop_assert_eq!(got.len(), cover);
            prop_assert!(is_maximal_independent_set(&g, &greedy_maximal_independent_set(&g)));
            if g.m() <= 16 {
                let weighted = if g.m() > 0 { sample::with_integer_weights(&g, 9, &mut rng) } else { g.clone() };
                let (edges, w) = max_weight_matching(&weighted).unwrap();
                prop_assert_eq!(matching_weight(&weighted, &edges), Some(w));
                prop_assert!((w - brute_matching(&weighted)).abs() < 1e-9);
            }
            if let Some(cover) = min_edge_cover(&g) {
                prop_assert!(is_edge_cover(&g, &cover));
                let best = (1..=g.m()).find(|&k| {
                    let edges: Vec<_> = g.edges().iter().map(|e| (e.source, e.target)).collect();
                    (0u64..1 << edges.len()).filter(|m| m.count_ones() as usize == k).any(|m| {
                        let chosen: Vec<_> = (0..edges.len()).filter(|&i| m >> i & 1 == 1).map(|i| edges[i]).collect();
                        is_edge_cover(&g, &chosen)
                    })
                });
                if g.m() <= 16 {
                    prop_assert_eq!(Some(cover.len()), best);
                }
            }
        }

        #[test]
        fn tsp_and_hamiltonian_agree_with_permutations(n in 2u32..=7, seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let g = sample::complete_weighted(n, 20, &mut rng);
            let nodes: Vec<NodeId> = (1..=n).collect();
            let best = permutations(&nodes).iter().filter_map(|o| tour_cost(&g, o)).fold(f64::INFINITY, f64::min);
            let (order, cost) = tsp(&g).unwrap();
            prop_assert_eq!(tour_cost(&g, &order), Some(cost));
            prop_assert!((cost - best).abs() < 1e-9);
            let h = sample::gnp(n, 0.4, false, &mut rng);
            let exists = permutations(&nodes).iter().any(|o| is_hamiltonian_path(&h, o));
            match hamiltonian_path(&h) {
                Some(p) => prop_assert!(is_hamiltonian_path(&h, &p)),
                None => prop_assert!(!exists),
            }
        }

        #[test]
        fn bipartite_matching_matches_dp(seed in any::<u64>()) {
            let g = sample::bipartite(10, 0.4, &mut RngStream::new(seed));
            let m = bipartite_maximum_matching(&g).unwrap();
            prop_assert!(matching_weight(&g, &m).is_some());
            prop_assert_eq!(m.len() as f64, max_weight_matching(&g).unwrap().1);
        }
    }
}
