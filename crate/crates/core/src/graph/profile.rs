use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{Budget, Digraph, Meter, UGraph};

/// A path-length measurement: exact, or the best value found before the
/// search budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Exact(usize),
    Capped(usize),
}

impl Measure {
    pub fn value(self) -> usize {
        match self {
            Measure::Exact(v) | Measure::Capped(v) => v,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            Measure::Exact(v) => Some(v),
            Measure::Capped(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Measure::Exact(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralProfile {
    pub in_deg: usize,
    pub out_deg: usize,
    /// Maximum degree of `U(G)`.
    pub deg: usize,
    pub cc_size: usize,
    pub upath_length: Measure,
    pub dpath_length: Measure,
    /// `max(upath_length, in_deg, out_deg)`.
    pub tau: Measure,
}

pub fn structural_profile(g: &Digraph, budget: Budget) -> StructuralProfile {
    let u = g.undirected();
    let in_deg = g.max_in_degree();
    let out_deg = g.max_out_degree();
    let upath_length = longest_undirected_path(&u, budget);
    let dpath_length = longest_directed_path(g, budget);
    let t = upath_length.value().max(in_deg).max(out_deg);
    StructuralProfile {
        in_deg,
        out_deg,
        deg: u.max_degree(),
        cc_size: g.cc_size(),
        upath_length,
        dpath_length,
        tau: if upath_length.is_exact() {
            Measure::Exact(t)
        } else {
            Measure::Capped(t)
        },
    }
}

/// Longest directed path, counted in edges. Exact on DAGs by dynamic
/// programming over a topological order; otherwise a budgeted exhaustive
/// search over simple paths.
pub fn longest_directed_path(g: &Digraph, budget: Budget) -> Measure {
    if let Some(order) = g.topological_order() {
        let mut best: BTreeMap<&str, usize> = BTreeMap::new();
        for v in &order {
            let here = g.predecessors(v).map(|p| best[p] + 1).max().unwrap_or(0);
            best.insert(v.as_str(), here);
        }
        return Measure::Exact(best.values().copied().max().unwrap_or(0));
    }
    let idx = g.indexed();
    let adj: Vec<Vec<usize>> = idx.out.clone();
    longest_simple_path(&adj, budget)
}

/// Longest simple path of an undirected graph, counted in edges. Exact on
/// forests via repeated BFS; otherwise a budgeted exhaustive search.
pub fn longest_undirected_path(u: &UGraph, budget: Budget) -> Measure {
    let names: Vec<&str> = u.vertices().collect();
    let pos: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut adj = vec![Vec::new(); names.len()];
    for (a, b) in u.edges() {
        adj[pos[a]].push(pos[b]);
        adj[pos[b]].push(pos[a]);
    }
    if u.is_forest() {
        let mut seen = vec![false; names.len()];
        let mut best = 0;
        for s in 0..names.len() {
            if seen[s] {
                continue;
            }
            let (far, _, comp) = bfs_far(&adj, s);
            for c in comp {
                seen[c] = true;
            }
            let (_, d, _) = bfs_far(&adj, far);
            best = best.max(d);
        }
        return Measure::Exact(best);
    }
    longest_simple_path(&adj, budget)
}

fn bfs_far(adj: &[Vec<usize>], s: usize) -> (usize, usize, Vec<usize>) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    let mut comp = Vec::new();
    let (mut far, mut fd) = (s, 0);
    while let Some(v) = q.pop_front() {
        comp.push(v);
        if dist[v] > fd {
            far = v;
            fd = dist[v];
        }
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    (far, fd, comp)
}

fn longest_simple_path(adj: &[Vec<usize>], budget: Budget) -> Measure {
    let n = adj.len();
    if n == 0 {
        return Measure::Exact(0);
    }
    let mut meter = Meter::new(budget);
    let mut best = 0;
    let mut on_path = vec![false; n];
    for s in 0..n {
        if best == n - 1 {
            break;
        }
        on_path[s] = true;
        let done = dfs(adj, s, 0, &mut on_path, &mut best, &mut meter);
        on_path[s] = false;
        if !done {
            return Measure::Capped(best);
        }
    }
    Measure::Exact(best)
}

/// Returns false when the budget ran out.
fn dfs(adj: &[Vec<usize>], v: usize, len: usize, on_path: &mut [bool], best: &mut usize, meter: &mut Meter) -> bool {
    if !meter.tick() {
        return false;
    }
    *best = (*best).max(len);
    if *best == adj.len() - 1 {
        return true;
    }
    for &w in &adj[v] {
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        let ok = dfs(adj, w, len + 1, on_path, best, meter);
        on_path[w] = false;
        if !ok {
            return false;
        }
    }
    true
}
