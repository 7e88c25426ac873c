//! SP-graphs: weakly connected in-star or out-star subgraphs, and
//! contractions of polypath subgraphs.
//!
//! Contracting edges of a polypath deletes entries from its direction
//! sequence, so `H` (a polypath) is a contraction of a polypath subgraph of
//! `G` exactly when some simple path of `U(G)`, read with its edge
//! directions, contains the direction sequence of `H` as a subsequence.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{
    classify, contract, is_isomorphic, polypath_walk, Budget, Digraph, GraphError, Indexed, Meter, PolypathWalk,
    Result, ShapeKind, ShapeLabel, Step,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SpWitness {
    InStar { centre: String, leaves: Vec<String> },
    OutStar { centre: String, leaves: Vec<String> },
    /// A polypath subgraph of `G` and the edges to contract, each named in
    /// the graph produced by the previous contractions.
    Polypath { path: PolypathWalk, contractions: Vec<(String, String)> },
}

impl SpWitness {
    /// Rebuilds the SP-graph in `g`'s vertex names, checking every subgraph
    /// claim along the way.
    pub fn replay(&self, g: &Digraph) -> Result<Digraph> {
        match self {
            SpWitness::InStar { centre, leaves } | SpWitness::OutStar { centre, leaves } => {
                let inward = matches!(self, SpWitness::InStar { .. });
                let mut h = Digraph::new();
                h.add_vertex(centre);
                for l in leaves {
                    let (a, b) = if inward { (l, centre) } else { (centre, l) };
                    if !g.has_edge(a, b) {
                        return Err(GraphError::MissingEdge(a.clone(), b.clone()));
                    }
                    h.add_edge(a, b);
                }
                if !g.has_vertex(centre) {
                    return Err(GraphError::BadParameter(format!("no vertex `{centre}`")));
                }
                Ok(h)
            }
            SpWitness::Polypath { path, contractions } => {
                let mut h = path.to_digraph();
                if !h.is_subgraph_of(g) {
                    return Err(GraphError::BadParameter("witness path is not a subgraph".into()));
                }
                h.set_fresh_counter(g.fresh_counter());
                for (a, b) in contractions {
                    h = contract(&h, (a, b))?.0;
                }
                Ok(h)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpVerdict {
    Yes(SpWitness),
    No,
    BudgetExhausted,
}

impl SpVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, SpVerdict::Yes(_))
    }
}

/// Decides whether `h` is an SP-graph of `g`.
pub fn is_sp_graph(h: &Digraph, g: &Digraph, budget: Budget) -> Result<SpVerdict> {
    if h.is_empty() || !h.is_weakly_connected() {
        return Err(GraphError::Disconnected);
    }
    let labels = classify(h);
    let k = h.vertex_count() - 1;
    if labels.contains(&ShapeLabel::InStar) {
        if let Some(centre) = g.vertices().find(|v| g.in_degree(v) >= k) {
            let leaves = g.predecessors(centre).take(k).map(str::to_string).collect();
            return Ok(SpVerdict::Yes(SpWitness::InStar {
                centre: centre.to_string(),
                leaves,
            }));
        }
    }
    if labels.contains(&ShapeLabel::OutStar) {
        if let Some(centre) = g.vertices().find(|v| g.out_degree(v) >= k) {
            let leaves = g.successors(centre).take(k).map(str::to_string).collect();
            return Ok(SpVerdict::Yes(SpWitness::OutStar {
                centre: centre.to_string(),
                leaves,
            }));
        }
    }
    let Some(walk) = polypath_walk(h) else {
        return Ok(SpVerdict::No);
    };
    let target = walk.steps;
    let idx = g.indexed();
    let mut meter = Meter::new(budget);
    let mut found = None;
    let mut exhausted = false;
    let mut path = Vec::new();
    let mut steps = Vec::new();
    let mut on_path = vec![false; idx.len()];
    for s in 0..idx.len() {
        path.push(s);
        on_path[s] = true;
        let r = match_dfs(&idx, &target, 0, &mut path, &mut steps, &mut on_path, &mut meter);
        on_path[s] = false;
        path.pop();
        match r {
            Search::Found(p, st) => {
                found = Some((p, st));
                break;
            }
            Search::Exhausted => {
                exhausted = true;
                break;
            }
            Search::NotFound => {}
        }
    }
    let Some((p, st)) = found else {
        return Ok(if exhausted { SpVerdict::BudgetExhausted } else { SpVerdict::No });
    };
    let path = PolypathWalk {
        vertices: p.iter().map(|&i| idx.names[i].clone()).collect(),
        steps: st,
    };
    let contractions = contraction_plan(g, &path, &target);
    Ok(SpVerdict::Yes(SpWitness::Polypath { path, contractions }))
}

enum Search {
    Found(Vec<usize>, Vec<Step>),
    NotFound,
    Exhausted,
}

fn arcs(idx: &Indexed, v: usize) -> Vec<(usize, Step)> {
    let mut a: Vec<(usize, Step)> = idx.out[v]
        .iter()
        .map(|&w| (w, Step::Forward))
        .chain(idx.inn[v].iter().map(|&w| (w, Step::Backward)))
        .collect();
    a.sort_unstable();
    a
}

fn match_dfs(
    idx: &Indexed,
    target: &[Step],
    matched: usize,
    path: &mut Vec<usize>,
    steps: &mut Vec<Step>,
    on_path: &mut [bool],
    meter: &mut Meter,
) -> Search {
    if matched == target.len() {
        return Search::Found(path.clone(), steps.clone());
    }
    if !meter.tick() {
        return Search::Exhausted;
    }
    let v = *path.last().unwrap();
    for (w, d) in arcs(idx, v) {
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        steps.push(d);
        let next = matched + usize::from(target[matched] == d);
        let r = match_dfs(idx, target, next, path, steps, on_path, meter);
        steps.pop();
        path.pop();
        on_path[w] = false;
        if !matches!(r, Search::NotFound) {
            return r;
        }
    }
    Search::NotFound
}

/// Contractions that reduce `path` to the subsequence `target` (matched
/// greedily from the left), naming edges as they appear after earlier merges.
fn contraction_plan(g: &Digraph, path: &PolypathWalk, target: &[Step]) -> Vec<(String, String)> {
    let mut keep = vec![false; path.steps.len()];
    let mut j = 0;
    for (i, &s) in path.steps.iter().enumerate() {
        if j < target.len() && s == target[j] {
            keep[i] = true;
            j += 1;
        }
    }
    let mut scratch = path.to_digraph();
    scratch.set_fresh_counter(g.fresh_counter());
    let mut rep: Vec<String> = path.vertices.clone();
    let mut out = Vec::new();
    for (i, &s) in path.steps.iter().enumerate() {
        if keep[i] {
            continue;
        }
        let (a, b) = match s {
            Step::Forward => (rep[i].clone(), rep[i + 1].clone()),
            Step::Backward => (rep[i + 1].clone(), rep[i].clone()),
        };
        let (next, w) = contract(&scratch, (&a, &b)).expect("edge exists on the path");
        for r in rep.iter_mut() {
            if *r == a || *r == b {
                *r = w.clone();
            }
        }
        scratch = next;
        out.push((a, b));
    }
    out
}

fn canonical(seq: &[Step]) -> Vec<Step> {
    let rev: Vec<Step> = seq.iter().rev().map(|s| s.flip()).collect();
    if rev.as_slice() < seq {
        rev
    } else {
        seq.to_vec()
    }
}

fn polypath_from_steps(steps: &[Step]) -> Digraph {
    PolypathWalk {
        vertices: (0..=steps.len()).map(|i| format!("q{i}")).collect(),
        steps: steps.to_vec(),
    }
    .to_digraph()
}

/// Every SP-graph of `g` with at most `max_size` vertices, one representative
/// per isomorphism class, ordered by vertex count and then edge list.
pub fn enumerate_sp_graphs(g: &Digraph, max_size: usize, budget: Budget) -> Result<Vec<Digraph>> {
    if g.is_empty() || max_size == 0 {
        return Ok(Vec::new());
    }
    let mut candidates = Vec::new();
    for k in 0..=g.max_in_degree().min(max_size - 1) {
        candidates.push(ShapeKind::InStar(k).build("")?);
    }
    for k in 0..=g.max_out_degree().min(max_size - 1) {
        candidates.push(ShapeKind::OutStar(k).build("")?);
    }

    let max_len = max_size - 1;
    let idx = g.indexed();
    let mut meter = Meter::new(budget);
    let mut seqs: BTreeSet<Vec<Step>> = BTreeSet::new();
    let mut on_path = vec![false; idx.len()];
    for s in 0..idx.len() {
        on_path[s] = true;
        let base: BTreeSet<Vec<Step>> = BTreeSet::from([Vec::new()]);
        let ok = collect_dfs(&idx, s, &base, max_len, &mut on_path, &mut seqs, &mut meter);
        on_path[s] = false;
        if !ok {
            return Err(meter.exhausted());
        }
    }
    seqs.insert(Vec::new());
    for s in &seqs {
        candidates.push(polypath_from_steps(s));
    }

    let mut reps: Vec<Digraph> = Vec::new();
    for c in candidates {
        let mut dup = false;
        for r in &reps {
            if is_isomorphic(r, &c, budget)? {
                dup = true;
                break;
            }
        }
        if !dup {
            reps.push(c);
        }
    }
    reps.sort_by(|a, b| {
        (a.vertex_count(), a.edges().collect::<Vec<_>>()).cmp(&(b.vertex_count(), b.edges().collect::<Vec<_>>()))
    });
    Ok(reps)
}

fn collect_dfs(
    idx: &Indexed,
    v: usize,
    subseqs: &BTreeSet<Vec<Step>>,
    max_len: usize,
    on_path: &mut [bool],
    out: &mut BTreeSet<Vec<Step>>,
    meter: &mut Meter,
) -> bool {
    if !meter.tick() {
        return false;
    }
    for (w, d) in arcs(idx, v) {
        if on_path[w] {
            continue;
        }
        let mut next = subseqs.clone();
        for s in subseqs.iter().filter(|s| s.len() < max_len) {
            let mut e = s.clone();
            e.push(d);
            let c = canonical(&e);
            out.insert(c);
            next.insert(e);
        }
        on_path[w] = true;
        let ok = collect_dfs(idx, w, &next, max_len, on_path, out, meter);
        on_path[w] = false;
        if !ok {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpClosure {
    pub closed: bool,
    /// Index of the offending member and the missing SP-graph.
    pub counterexample: Option<(usize, Digraph)>,
}

/// Checks that every SP-graph (up to `max_size` vertices) of every member is
/// isomorphic to some member. The reported counterexample is the largest
/// missing SP-graph of the first member that has one.
pub fn is_sp_closed(class: &[Digraph], max_size: usize, budget: Budget) -> Result<SpClosure> {
    for (i, g) in class.iter().enumerate() {
        let mut sps = enumerate_sp_graphs(g, max_size, budget)?;
        sps.reverse();
        for h in sps {
            let mut present = false;
            for m in class {
                if is_isomorphic(m, &h, budget)? {
                    present = true;
                    break;
                }
            }
            if !present {
                return Ok(SpClosure {
                    closed: false,
                    counterexample: Some((i, h)),
                });
            }
        }
    }
    Ok(SpClosure {
        closed: true,
        counterexample: None,
    })
}
