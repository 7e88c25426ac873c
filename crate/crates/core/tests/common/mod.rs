//! Random and exhaustive generators shared by the integration tests and the
//! acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeSet;

use causal_forge::graph::{Digraph, PolypathWalk, Step, UGraph};
use causal_forge::sat::{CnfFormula, Literal};
use causal_forge::{Operator, PartialState, PlanningInstance, State, Variable};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_formula(rng: &mut TestRng, n: usize, m: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| [0; 3].map(|_| Literal::new(rng.gen_range(1..=n), rng.gen())))
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// Every formula with exactly `n` variables and `m` clauses, each clause a
/// multiset of literals (sorted), clauses in sequence.
pub fn all_formulas(n: usize, m: usize) -> Vec<CnfFormula> {
    let lits: Vec<Literal> = (1..=n).flat_map(|v| [Literal::new(v, true), Literal::new(v, false)]).collect();
    let mut clauses = Vec::new();
    for a in 0..lits.len() {
        for b in a..lits.len() {
            for c in b..lits.len() {
                clauses.push([lits[a], lits[b], lits[c]]);
            }
        }
    }
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<[Literal; 3]>| {
                clauses.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(*c);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|cs| CnfFormula::new(n, cs).unwrap()).collect()
}

/// `(n, m)` formulas for all `n <= max_n`, `m <= max_m`.
pub fn exhaustive_formulas(max_n: usize, max_m: usize) -> Vec<CnfFormula> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        for m in 0..=max_m {
            if n == 0 && m > 0 {
                continue;
            }
            out.extend(all_formulas(n, m));
        }
    }
    out
}

fn domain(size: usize) -> Vec<String> {
    (0..size).map(|i| i.to_string()).collect()
}

fn random_partial(rng: &mut TestRng, vars: &[Variable], pick: &[usize]) -> PartialState {
    pick.iter()
        .map(|&i| {
            let v = &vars[i];
            (v.name.clone(), v.domain.choose(rng).unwrap().clone())
        })
        .collect()
}

/// Random operator over the variables in `group` (indices into `vars`).
fn random_operator(rng: &mut TestRng, name: String, vars: &[Variable], group: &[usize], max_pre: usize) -> Operator {
    let mut g = group.to_vec();
    g.shuffle(rng);
    let post_var = g[0];
    let pre_count = rng.gen_range(0..=max_pre.min(g.len()));
    let mut pre_vars: Vec<usize> = g.iter().copied().take(pre_count).collect();
    if rng.gen_bool(0.3) && !pre_vars.contains(&post_var) {
        pre_vars.push(post_var);
    }
    let pre = random_partial(rng, vars, &pre_vars);
    let post = random_partial(rng, vars, &[post_var]);
    Operator::new(name, pre, post).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    /// Sizes of the variable groups operators may connect.
    pub groups: &'static [usize],
    pub max_domain: usize,
    pub ops_per_group: (usize, usize),
    pub max_pre: usize,
}

/// Random instance whose causal-graph components lie within the given
/// variable groups.
pub fn random_grouped_instance(rng: &mut TestRng, groups: &[usize], max_domain: usize, ops_per_group: (usize, usize), max_pre: usize) -> PlanningInstance {
    let mut vars = Vec::new();
    let mut group_ix = Vec::new();
    for (g, &size) in groups.iter().enumerate() {
        let mut ix = Vec::new();
        for i in 0..size {
            ix.push(vars.len());
            vars.push(Variable::new(format!("g{g}v{i}"), domain(rng.gen_range(2..=max_domain))));
        }
        group_ix.push(ix);
    }
    let all: Vec<usize> = (0..vars.len()).collect();
    let init = State::from_partial(random_partial(rng, &vars, &all));
    let goal_vars: Vec<usize> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    let goal = random_partial(rng, &vars, &goal_vars);
    let mut ops = Vec::new();
    for (g, ix) in group_ix.iter().enumerate() {
        let count = rng.gen_range(ops_per_group.0..=ops_per_group.1);
        for k in 0..count {
            ops.push(random_operator(rng, format!("o{g}_{k}"), &vars, ix, max_pre));
        }
    }
    PlanningInstance::new(vars, init, goal, ops).unwrap()
}

/// Random instance with up to `max_vars` variables and arbitrary operators.
pub fn random_instance(rng: &mut TestRng, max_vars: usize, max_domain: usize, max_ops: usize) -> PlanningInstance {
    let n = rng.gen_range(1..=max_vars);
    random_grouped_instance(rng, &[n], max_domain, (1, max_ops), 2)
}

pub fn random_walk_steps(rng: &mut TestRng, edges: usize) -> Vec<Step> {
    (0..edges)
        .map(|_| if rng.gen() { Step::Forward } else { Step::Backward })
        .collect()
}

/// Random instance whose causal graph is the polypath `p0 - p1 - ... `
/// with random directions: every operator writes one variable and reads
/// only it and its in-neighbour on the path.
pub fn random_polypath_instance(rng: &mut TestRng, len: usize, max_domain: usize) -> PlanningInstance {
    let steps = random_walk_steps(rng, len - 1);
    let names: Vec<String> = (0..len).map(|i| format!("p{i}")).collect();
    let vars: Vec<Variable> = names
        .iter()
        .map(|n| Variable::new(n.clone(), domain(rng.gen_range(2..=max_domain))))
        .collect();
    let all: Vec<usize> = (0..len).collect();
    let init = State::from_partial(random_partial(rng, &vars, &all));
    let mut goal_vars: Vec<usize> = all.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    if goal_vars.is_empty() {
        goal_vars.push(rng.gen_range(0..len));
    }
    let goal = random_partial(rng, &vars, &goal_vars);
    let mut ops = Vec::new();
    let mut k = 0;
    // one guaranteed operator per edge so the causal graph is the full path
    for (i, s) in steps.iter().enumerate() {
        let (from, to) = match s {
            Step::Forward => (i, i + 1),
            Step::Backward => (i + 1, i),
        };
        for _ in 0..rng.gen_range(1..=3) {
            let mut pick = vec![from];
            if rng.gen_bool(0.5) {
                pick.push(to);
            }
            let pre = random_partial(rng, &vars, &pick);
            let post = random_partial(rng, &vars, &[to]);
            ops.push(Operator::new(format!("e{k}"), pre, post).unwrap());
            k += 1;
        }
    }
    for v in 0..len {
        for _ in 0..rng.gen_range(0..=2) {
            let pre_vars: Vec<usize> = if rng.gen() { vec![v] } else { vec![] };
            let pre = random_partial(rng, &vars, &pre_vars);
            let post = random_partial(rng, &vars, &[v]);
            ops.push(Operator::new(format!("l{k}"), pre, post).unwrap());
            k += 1;
        }
    }
    PlanningInstance::new(vars, init, goal, ops).unwrap()
}

pub fn random_digraph(rng: &mut TestRng, n: usize, p: f64) -> Digraph {
    let mut g = Digraph::new();
    for i in 0..n {
        g.add_vertex(&format!("n{i}"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                g.add_edge(&format!("n{i}"), &format!("n{j}"));
            }
        }
    }
    g
}

pub fn random_dag(rng: &mut TestRng, n: usize, p: f64) -> Digraph {
    let mut g = Digraph::new();
    for i in 0..n {
        g.add_vertex(&format!("n{i}"));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(&format!("n{i}"), &format!("n{j}"));
            }
        }
    }
    g
}

/// Random connected undirected graph: a random spanning tree plus extra
/// edges.
pub fn random_connected_ugraph(rng: &mut TestRng, n: usize, extra: f64) -> UGraph {
    let mut u = UGraph::new();
    let name = |i: usize| format!("n{i}");
    u.add_vertex(&name(0));
    for i in 1..n {
        let j = rng.gen_range(0..i);
        u.add_edge(&name(i), &name(j));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(extra) {
                u.add_edge(&name(i), &name(j));
            }
        }
    }
    u
}

pub fn random_polypath(rng: &mut TestRng, len: usize, prefix: &str) -> Digraph {
    let steps = random_walk_steps(rng, len - 1);
    PolypathWalk {
        vertices: (0..len).map(|i| format!("{prefix}{i}")).collect(),
        steps,
    }
    .to_digraph()
}

pub fn random_tournament(rng: &mut TestRng, n: usize) -> Digraph {
    let mut g = Digraph::new();
    for i in 0..n {
        g.add_vertex(&format!("t{i}"));
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (format!("t{i}"), format!("t{j}"));
            if rng.gen() {
                g.add_edge(&a, &b);
            } else {
                g.add_edge(&b, &a);
            }
        }
    }
    g
}

/// Adds `extra_vertices` new vertices and random edges touching them, and a
/// few random edges among existing vertices, never exceeding `max_vertices`.
pub fn random_supergraph(rng: &mut TestRng, g: &Digraph, extra_vertices: usize, extra_edges: usize) -> Digraph {
    let mut h = g.clone();
    for i in 0..extra_vertices {
        h.add_vertex(&format!("z{i}"));
    }
    let vs: Vec<String> = h.vertices().map(str::to_string).collect();
    if vs.len() < 2 {
        return h;
    }
    for _ in 0..extra_edges {
        let a = vs.choose(rng).unwrap();
        let b = vs.choose(rng).unwrap();
        if a != b {
            h.add_edge(a, b);
        }
    }
    h
}

/// Disjoint union with vertex names kept (callers keep names distinct).
pub fn names(g: &Digraph) -> BTreeSet<String> {
    g.vertices().map(str::to_string).collect()
}

/// Adjacency bit for edge `i -> j` in an `n`-vertex code.
pub fn adj_bit(n: usize, i: usize, j: usize) -> u64 {
    1 << (i * n + j)
}

fn permuted(code: u64, n: usize, perm: &[usize]) -> u64 {
    let mut out = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && code & adj_bit(n, i, j) != 0 {
                out |= adj_bit(n, perm[i], perm[j]);
            }
        }
    }
    out
}

/// Canonical code: vertices are ordered by a degree invariant, then the
/// least code over all orderings within equal-invariant cells.
pub fn canonical_code(code: u64, n: usize) -> u64 {
    let inv: Vec<(u32, u32, u32)> = (0..n)
        .map(|v| {
            let mut out = 0;
            let mut inn = 0;
            let mut both = 0;
            for w in 0..n {
                if w == v {
                    continue;
                }
                let a = code & adj_bit(n, v, w) != 0;
                let b = code & adj_bit(n, w, v) != 0;
                out += a as u32;
                inn += b as u32;
                both += (a && b) as u32;
            }
            (out, inn, both)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| inv[v]);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match cells.last_mut() {
            Some(c) if inv[c[0]] == inv[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    // perm[v] = new position of v
    let mut best = u64::MAX;
    let mut perm = vec![0; n];
    fn rec(cells: &mut [Vec<usize>], ci: usize, pos: usize, perm: &mut [usize], code: u64, n: usize, best: &mut u64) {
        if ci == cells.len() {
            *best = (*best).min(permuted(code, n, perm));
            return;
        }
        let len = cells[ci].len();
        heap_permute(cells, ci, len, pos, perm, code, n, best);
    }
    #[allow(clippy::too_many_arguments)]
    fn heap_permute(cells: &mut [Vec<usize>], ci: usize, k: usize, pos: usize, perm: &mut [usize], code: u64, n: usize, best: &mut u64) {
        if k <= 1 {
            let len = cells[ci].len();
            for (off, &v) in cells[ci].iter().enumerate() {
                perm[v] = pos + off;
            }
            rec(cells, ci + 1, pos + len, perm, code, n, best);
            return;
        }
        for i in 0..k {
            heap_permute(cells, ci, k - 1, pos, perm, code, n, best);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            cells[ci].swap(j, k - 1);
        }
    }
    rec(&mut cells, 0, 0, &mut perm, code, n, &mut best);
    best
}

/// One canonical code per isomorphism class of digraphs on exactly `n`
/// vertices.
pub fn digraph_classes(n: usize) -> Vec<u64> {
    if n <= 1 {
        return vec![0];
    }
    let smaller = digraph_classes(n - 1);
    let mut seen = rustc_hash::FxHashSet::default();
    let new = n - 1;
    for &c in &smaller {
        // re-encode on n vertices
        let mut base = 0;
        for i in 0..new {
            for j in 0..new {
                if i != j && c & adj_bit(new, i, j) != 0 {
                    base |= adj_bit(n, i, j);
                }
            }
        }
        for links in 0..(1u64 << (2 * new)) {
            let mut code = base;
            for w in 0..new {
                if links & (1 << (2 * w)) != 0 {
                    code |= adj_bit(n, w, new);
                }
                if links & (1 << (2 * w + 1)) != 0 {
                    code |= adj_bit(n, new, w);
                }
            }
            seen.insert(canonical_code(code, n));
        }
    }
    let mut out: Vec<u64> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

pub fn code_to_digraph(code: u64, n: usize) -> Digraph {
    let mut g = Digraph::new();
    for i in 0..n {
        g.add_vertex(&format!("n{i}"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && code & adj_bit(n, i, j) != 0 {
                g.add_edge(&format!("n{i}"), &format!("n{j}"));
            }
        }
    }
    g
}

/// An unsatisfiable formula using every variable: `(x x x)`, `(~x ~x ~x)`
/// and random clauses covering the rest, in random order. Needs `m >= 2`
/// and enough spare clauses to mention the other `n - 1` variables.
pub fn unsat_formula(rng: &mut TestRng, n: usize, m: usize) -> Option<CnfFormula> {
    if m < 2 || n == 0 || n - 1 > 3 * (m - 2) {
        return None;
    }
    let x = rng.gen_range(1..=n);
    let mut others: Vec<usize> = (1..=n).filter(|&v| v != x).collect();
    others.shuffle(rng);
    let mut lits: Vec<Literal> = others.into_iter().map(|v| Literal::new(v, rng.gen())).collect();
    while lits.len() < 3 * (m - 2) {
        lits.push(Literal::new(rng.gen_range(1..=n), rng.gen()));
    }
    let mut clauses: Vec<[Literal; 3]> = lits.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    clauses.push([Literal::new(x, true); 3]);
    clauses.push([Literal::new(x, false); 3]);
    clauses.shuffle(rng);
    Some(CnfFormula::new(n, clauses).unwrap())
}
