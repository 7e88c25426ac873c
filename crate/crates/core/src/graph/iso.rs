use std::collections::BTreeMap;

use super::{Budget, Digraph, Indexed, Meter, Result};

/// Exact isomorphism test by backtracking with (in, out)-degree pruning.
pub fn is_isomorphic(g: &Digraph, h: &Digraph, budget: Budget) -> Result<bool> {
    Ok(find_isomorphism(g, h, budget)?.is_some())
}

/// A bijection `V(g) -> V(h)` preserving edges in both directions, if any.
pub fn find_isomorphism(g: &Digraph, h: &Digraph, budget: Budget) -> Result<Option<BTreeMap<String, String>>> {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let gi = g.indexed();
    let hi = h.indexed();
    let sig = |x: &Indexed, v: usize| (x.inn[v].len(), x.out[v].len());
    let mut gs: Vec<_> = (0..gi.len()).map(|v| sig(&gi, v)).collect();
    let mut hs: Vec<_> = (0..hi.len()).map(|v| sig(&hi, v)).collect();
    gs.sort_unstable();
    hs.sort_unstable();
    if gs != hs {
        return Ok(None);
    }

    // Visit g's vertices so that each one (after the first of its component)
    // is adjacent to an already placed vertex.
    let n = gi.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let start = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (gi.inn[v].len() + gi.out[v].len(), std::cmp::Reverse(v)))
            .unwrap();
        placed[start] = true;
        order.push(start);
        let mut i = order.len() - 1;
        while i < order.len() {
            for w in gi.undirected_neighbours(order[i]) {
                if !placed[w] {
                    placed[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }

    let mut meter = Meter::new(budget);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let found = extend(&gi, &hi, &order, 0, &mut map, &mut used, &mut meter)?;
    Ok(found.then(|| {
        order
            .iter()
            .map(|&v| (gi.names[v].clone(), hi.names[map[v]].clone()))
            .collect()
    }))
}

fn extend(
    g: &Indexed,
    h: &Indexed,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
    meter: &mut Meter,
) -> Result<bool> {
    if depth == order.len() {
        return Ok(true);
    }
    let v = order[depth];
    for c in 0..h.len() {
        if used[c] || g.inn[v].len() != h.inn[c].len() || g.out[v].len() != h.out[c].len() {
            continue;
        }
        if !meter.tick() {
            return Err(meter.exhausted());
        }
        let consistent = order[..depth].iter().all(|&x| {
            let y = map[x];
            g.adj[v][x] == h.adj[c][y] && g.adj[x][v] == h.adj[y][c]
        });
        if !consistent {
            continue;
        }
        map[v] = c;
        used[c] = true;
        if extend(g, h, order, depth + 1, map, used, meter)? {
            return Ok(true);
        }
        used[c] = false;
        map[v] = usize::MAX;
    }
    Ok(false)
}
