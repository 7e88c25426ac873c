//! Compiling 3SAT formulas into planning instances whose causal graph is a
//! given target graph, plus the hard-family and tournament constructions.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{classify, is_isomorphic, polypath_walk, Budget, Digraph, GraphError, Meter, PolypathWalk, ShapeKind, ShapeLabel, Step};
use crate::planning::{PlanningError, PlanningInstance};
use crate::sat::{
    chain_instance, fence_sink, fence_source, gadget_fence, gadget_in_star, gadget_out_star, in_star_var, out_star_sink, CnfFormula,
    FenceShape, FenceVariant, SatError, CENTRE_VAR,
};
use crate::transform::{clone_union, extend_to_supergraph, stretch_to_polypath, Subdivision, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("formula variables {0:?} occur in no clause")]
    UnusedVariables(Vec<usize>),
    #[error("target lacks capacity for n={n}, m={m} ({})", if *.proven { "proven by exhaustive search" } else { "none found within the search budget" })]
    InsufficientCapacity {
        n: usize,
        m: usize,
        report: Box<CapacityReport>,
        proven: bool,
    },
    #[error("graph is not a tournament")]
    NotATournament,
    #[error("size mismatch: expected {expected} vertices, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("causal graph is not a directed path on {0} vertices")]
    NotADirectedPath(usize),
    #[error("{0}")]
    BadParameter(String),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Planning(#[from] PlanningError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T, E = EmbedError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarCapacity {
    pub size: usize,
    /// Lexicographically least vertex of maximum degree.
    pub centre: Option<String>,
}

/// The best polypath subgraph found: a simple path of `U(H)` read with its
/// edge directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolypathCapacity {
    pub sinks: usize,
    pub sources: usize,
    pub walk: PolypathWalk,
}

impl PolypathCapacity {
    /// Largest `m` such that the walk holds a fence `F_m^+1` subgraph
    /// after contractions.
    pub fn fence_capacity(&self) -> usize {
        self.sources.saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityReport {
    pub max_in_star: StarCapacity,
    pub max_out_star: StarCapacity,
    pub best_polypath: Option<PolypathCapacity>,
    /// The polypath search ran out of budget; `best_polypath` may not be
    /// optimal.
    pub capped: bool,
}

/// Sources along a walk: vertices whose incident walk edges all point away.
fn walk_sources(steps: &[Step]) -> Vec<usize> {
    let n = steps.len() + 1;
    (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || steps[i - 1] == Step::Backward;
            let right_ok = i == n - 1 || steps[i] == Step::Forward;
            left_ok && right_ok
        })
        .collect()
}

fn walk_sinks(steps: &[Step]) -> usize {
    let flipped: Vec<Step> = steps.iter().map(|s| s.flip()).collect();
    walk_sources(&flipped).len()
}

fn star(degrees: BTreeMap<&str, usize>) -> StarCapacity {
    let best = degrees.values().copied().max();
    StarCapacity {
        size: best.unwrap_or(0),
        centre: best.and_then(|b| degrees.iter().find(|(_, d)| **d == b).map(|(v, _)| v.to_string())),
    }
}

/// Star capacities (exact) and a simple path of `U(h)` with as many sources
/// as the budget allows finding.
pub fn capacity_report(h: &Digraph, budget: Budget) -> CapacityReport {
    let idx = h.indexed();
    let n = idx.len();
    let mut search = PathSearch {
        out: &idx.out,
        inn: &idx.inn,
        best: None,
        best_sources: 0,
        limit: n.div_ceil(2),
        meter: Meter::new(budget),
        on_path: vec![false; n],
        path: Vec::new(),
        steps: Vec::new(),
        capped: false,
    };
    for s in 0..n {
        if search.capped || search.best_sources >= search.limit {
            break;
        }
        search.on_path[s] = true;
        search.path.push(s);
        search.dfs(0);
        search.path.pop();
        search.on_path[s] = false;
    }
    let best_polypath = search.best.map(|(p, steps)| PolypathCapacity {
        sinks: walk_sinks(&steps),
        sources: walk_sources(&steps).len(),
        walk: PolypathWalk {
            vertices: p.iter().map(|&i| idx.names[i].clone()).collect(),
            steps,
        },
    });
    CapacityReport {
        max_in_star: star(h.in_degrees()),
        max_out_star: star(h.out_degrees()),
        best_polypath,
        capped: search.capped,
    }
}

struct PathSearch<'a> {
    out: &'a [Vec<usize>],
    inn: &'a [Vec<usize>],
    best: Option<(Vec<usize>, Vec<Step>)>,
    best_sources: usize,
    /// No simple path has more sources than this.
    limit: usize,
    meter: Meter,
    on_path: Vec<bool>,
    path: Vec<usize>,
    steps: Vec<Step>,
    capped: bool,
}

impl PathSearch<'_> {
    /// `closed` counts sources among path vertices other than the last.
    fn dfs(&mut self, closed: usize) {
        if !self.meter.tick() {
            self.capped = true;
            return;
        }
        let last_is_source = self.steps.last().is_none_or(|&s| s == Step::Backward);
        let here = closed + usize::from(last_is_source);
        if self.best.is_none() || here > self.best_sources {
            self.best_sources = here;
            self.best = Some((self.path.clone(), self.steps.clone()));
        }
        let unvisited = self.on_path.iter().filter(|&&b| !b).count();
        if self.best_sources >= self.limit || closed + (unvisited + 1).div_ceil(2) <= self.best_sources {
            return;
        }
        let v = *self.path.last().unwrap();
        let mut arcs: Vec<(usize, Step)> = self.out[v]
            .iter()
            .map(|&w| (w, Step::Forward))
            .chain(self.inn[v].iter().map(|&w| (w, Step::Backward)))
            .collect();
        arcs.sort_unstable();
        for (w, d) in arcs {
            if self.on_path[w] {
                continue;
            }
            // `v` stops being last: it is a source iff it had no incoming
            // walk edge and the new edge leaves it
            let v_source = last_is_source && d == Step::Forward;
            self.on_path[w] = true;
            self.path.push(w);
            self.steps.push(d);
            self.dfs(closed + usize::from(v_source));
            self.steps.pop();
            self.path.pop();
            self.on_path[w] = false;
            if self.capped || self.best_sources >= self.limit {
                return;
            }
        }
    }
}

/// The sub-walk of `walk` from its first source to its `(m+1)`-th source:
/// a polypath with exactly `m` sinks and `m + 1` sources, both ends sources.
pub fn trim_to_fence(walk: &PolypathWalk, m: usize) -> Option<PolypathWalk> {
    let src = walk_sources(&walk.steps);
    if m == 0 || src.len() < m + 1 {
        return None;
    }
    let (a, b) = (src[0], src[m]);
    Some(PolypathWalk {
        vertices: walk.vertices[a..=b].to_vec(),
        steps: walk.steps[a..b].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompileCase {
    InStar,
    OutStar,
    Fence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub budget: Budget,
    /// Use this case or fail, instead of the first applicable one.
    pub force: Option<CompileCase>,
    pub fence_variant: FenceVariant,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            budget: Budget::default(),
            force: None,
            fence_variant: FenceVariant::Split2,
        }
    }
}

/// How a compiled instance was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompileProvenance {
    pub case: CompileCase,
    /// Gadget variable to target vertex.
    pub placement: BTreeMap<String, String>,
    /// Subdivisions applied to the fence gadget (fence case only).
    pub schedule: Vec<Subdivision>,
    pub report: CapacityReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledInstance {
    pub instance: PlanningInstance,
    pub provenance: CompileProvenance,
}

/// Builds a planning instance with causal graph exactly `h` that is solvable
/// iff `f` is satisfiable: an in-star gadget when `h` has a vertex of
/// in-degree at least `n`, else an out-star gadget when some out-degree is at
/// least `m`, else a fence gadget stretched along a polypath subgraph with at
/// least `m + 1` sources; finally extended to all of `h`.
pub fn compile_to_graph(f: &CnfFormula, h: &Digraph, opts: CompileOptions) -> Result<CompiledInstance> {
    let unused = f.unused_vars();
    if !unused.is_empty() {
        return Err(EmbedError::UnusedVariables(unused));
    }
    let (n, m) = (f.num_vars(), f.num_clauses());
    let report = capacity_report(h, opts.budget);
    let wanted = |c: CompileCase| opts.force.is_none_or(|x| x == c);

    if wanted(CompileCase::InStar) && report.max_in_star.size >= n {
        if let Some(centre) = &report.max_in_star.centre {
            let mut placement = BTreeMap::from([(CENTRE_VAR.to_string(), centre.clone())]);
            for (i, leaf) in h.predecessors(centre).take(n).enumerate() {
                placement.insert(in_star_var(i + 1), leaf.to_string());
            }
            let g = gadget_in_star(f)?.rename_variables(&placement)?;
            return finish(g, h, CompileCase::InStar, placement, Vec::new(), report);
        }
    }
    if wanted(CompileCase::OutStar) && m >= 1 && report.max_out_star.size >= m {
        let centre = report.max_out_star.centre.clone().unwrap();
        let mut placement = BTreeMap::from([(CENTRE_VAR.to_string(), centre.clone())]);
        for (i, leaf) in h.successors(&centre).take(m).enumerate() {
            placement.insert(out_star_sink(i + 1), leaf.to_string());
        }
        let g = gadget_out_star(f)?.rename_variables(&placement)?;
        return finish(g, h, CompileCase::OutStar, placement, Vec::new(), report);
    }
    if wanted(CompileCase::Fence) && n >= 1 {
        if let Some(sub) = report.best_polypath.as_ref().and_then(|p| trim_to_fence(&p.walk, m)) {
            let sources = walk_sources(&sub.steps);
            let mut placement = BTreeMap::new();
            for (j, &s) in sources.iter().enumerate() {
                placement.insert(fence_source(j), sub.vertices[s].clone());
                if j > 0 {
                    // exactly one sink between consecutive sources
                    let k = (sources[j - 1]..s)
                        .find(|&i| sub.steps[i] == Step::Forward && sub.steps[i + 1] == Step::Backward)
                        .map(|i| i + 1)
                        .expect("a sink separates consecutive sources");
                    placement.insert(fence_sink(j), sub.vertices[k].clone());
                }
            }
            let g = gadget_fence(f, FenceShape::Full, opts.fence_variant)?.rename_variables(&placement)?;
            let (stretched, schedule) = stretch_to_polypath(&g, &sub.to_digraph())?;
            return finish(stretched, h, CompileCase::Fence, placement, schedule, report);
        }
    }
    Err(EmbedError::InsufficientCapacity {
        n,
        m,
        proven: !report.capped,
        report: Box::new(report),
    })
}

fn finish(
    g: PlanningInstance,
    h: &Digraph,
    case: CompileCase,
    placement: BTreeMap<String, String>,
    schedule: Vec<Subdivision>,
    report: CapacityReport,
) -> Result<CompiledInstance> {
    let instance = extend_to_supergraph(&g, h)?;
    Ok(CompiledInstance {
        instance,
        provenance: CompileProvenance {
            case,
            placement,
            schedule,
            report,
        },
    })
}

/// `m^(k-1)` renamed copies of `seed` (by default a chain of length `m`),
/// whose causal graph is the family member with `m^k` vertices.
pub fn family_instance(k: u32, m: usize, seed: Option<&PlanningInstance>) -> Result<PlanningInstance> {
    if k < 2 || m < 1 {
        return Err(EmbedError::BadParameter(format!("family needs k >= 2 and m >= 1, got k={k} m={m}")));
    }
    let default;
    let seed = match seed {
        Some(s) => s,
        None => {
            default = chain_instance(m)?;
            &default
        }
    };
    let dp = ShapeKind::DirectedPath(m).build("")?;
    if !is_isomorphic(&seed.causal_graph(), &dp, Budget::default())? {
        return Err(EmbedError::NotADirectedPath(m));
    }
    let copies = m
        .checked_pow(k - 1)
        .ok_or_else(|| EmbedError::BadParameter("family too large".into()))?;
    Ok(clone_union(seed, copies)?)
}

/// A directed Hamiltonian path of a tournament, built by inserting vertices
/// in lexicographic order, each after the first path vertex that points to
/// it and whose successor (if any) it points to, or at the front.
pub fn tournament_ham_path(t: &Digraph) -> Result<Vec<String>> {
    if !classify(t).contains(&ShapeLabel::Tournament) {
        return Err(EmbedError::NotATournament);
    }
    let mut path: Vec<String> = Vec::new();
    for x in t.vertices() {
        let at = (0..path.len()).find(|&i| t.has_edge(&path[i], x) && (i + 1 == path.len() || t.has_edge(x, &path[i + 1])));
        match at {
            Some(i) => path.insert(i + 1, x.to_string()),
            None => path.insert(0, x.to_string()),
        }
    }
    Ok(path)
}

/// Places a directed-path instance along a Hamiltonian path of `t` and
/// extends it so that its causal graph is `t`.
pub fn embed_in_tournament(inst: &PlanningInstance, t: &Digraph) -> Result<PlanningInstance> {
    let cg = inst.causal_graph();
    let len = cg.vertex_count();
    if t.vertex_count() != len {
        return Err(EmbedError::SizeMismatch {
            expected: len,
            found: t.vertex_count(),
        });
    }
    if len == 0 || !classify(&cg).contains(&ShapeLabel::DirectedPath) {
        return Err(EmbedError::NotADirectedPath(len));
    }
    let ham = tournament_ham_path(t)?;
    let walk = polypath_walk(&cg).unwrap();
    let order = if walk.steps.first() == Some(&Step::Backward) {
        walk.reversed().vertices
    } else {
        walk.vertices
    };
    let map: BTreeMap<String, String> = order.into_iter().zip(ham).collect();
    Ok(extend_to_supergraph(&inst.rename_variables(&map)?, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::brute_force_sat;
    use crate::solver::{brute_force_plan_with, Pruning, SearchBudget};

    fn solvable(p: &PlanningInstance) -> bool {
        brute_force_plan_with(p, SearchBudget::default(), Pruning::Reduced)
            .outcome
            .solvable()
            .unwrap()
    }

    #[test]
    fn capacity_examples() {
        let b = Budget::default();
        let r = capacity_report(&ShapeKind::InStar(5).build("").unwrap(), b);
        assert_eq!(r.max_in_star.size, 5);
        assert_eq!(r.max_in_star.centre.as_deref(), Some("c"));
        let r = capacity_report(&ShapeKind::Fence { m: 3, c: 1 }.build("").unwrap(), b);
        let p = r.best_polypath.unwrap();
        assert_eq!((p.sinks, p.sources), (3, 4));
        assert!(!r.capped);
        let r = capacity_report(&ShapeKind::DirectedPath(9).build("").unwrap(), b);
        let p = r.best_polypath.unwrap();
        assert_eq!((p.sinks, p.sources), (1, 1));
        assert_eq!((r.max_in_star.size, r.max_out_star.size), (1, 1));
    }

    #[test]
    fn compile_in_star_case() {
        let f = CnfFormula::from_ints(3, &[[1, 2, -3]]).unwrap();
        let mut h = ShapeKind::InStar(3).build("").unwrap();
        h.add_edge("s1", "extra");
        let c = compile_to_graph(&f, &h, CompileOptions::default()).unwrap();
        assert_eq!(c.provenance.case, CompileCase::InStar);
        assert_eq!(c.instance.causal_graph(), h);
        assert!(solvable(&c.instance));
    }

    #[test]
    fn compile_fence_case() {
        let f = CnfFormula::from_ints(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
        let fence = ShapeKind::Fence { m: 2, c: 1 }.build("").unwrap();
        let mut h = fence.clone();
        for (a, b) in fence.edges() {
            h = crate::graph::subdivide(&h, (a, b)).unwrap().0;
        }
        let opts = CompileOptions {
            force: Some(CompileCase::Fence),
            ..CompileOptions::default()
        };
        let c = compile_to_graph(&f, &h, opts).unwrap();
        assert_eq!(c.provenance.case, CompileCase::Fence);
        assert_eq!(c.instance.causal_graph(), h);
        assert_eq!(solvable(&c.instance), brute_force_sat(&f).unwrap().is_some());
    }

    #[test]
    fn long_directed_path_is_insufficient() {
        let f = CnfFormula::from_ints(2, &[[1, 2, 2], [-1, -2, 1]]).unwrap();
        let h = ShapeKind::DirectedPath(100).build("").unwrap();
        match compile_to_graph(&f, &h, CompileOptions::default()) {
            Err(EmbedError::InsufficientCapacity { proven, .. }) => assert!(proven),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn families() {
        let p = family_instance(2, 3, None).unwrap();
        let cg = p.causal_graph();
        assert_eq!((cg.vertex_count(), cg.cc_size()), (9, 3));
        let q = family_instance(3, 2, None).unwrap();
        assert_eq!(q.causal_graph().vertex_count(), 8);
        assert!(family_instance(1, 2, None).is_err());
    }

    #[test]
    fn tournaments() {
        let t = Digraph::from_edges([("a", "b"), ("b", "c"), ("c", "a")]);
        assert_eq!(tournament_ham_path(&t).unwrap(), ["a", "b", "c"]);
        let tr = Digraph::from_edges([("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]);
        assert_eq!(tournament_ham_path(&tr).unwrap(), ["a", "b", "c", "d"]);
        let mut one = Digraph::new();
        one.add_vertex("z");
        assert_eq!(tournament_ham_path(&one).unwrap(), ["z"]);
        let e = embed_in_tournament(&chain_instance(3).unwrap(), &t).unwrap();
        assert_eq!(e.causal_graph(), t);
        assert!(solvable(&e));
        assert!(tournament_ham_path(&ShapeKind::DirectedPath(3).build("").unwrap()).is_err());
    }
}
