use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{Digraph, GraphError, Result, UGraph};

/// Named graph shapes. The first three describe `U(G)` and are produced by
/// [`classify_undirected`]; the rest are directed shapes from [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeLabel {
    Tree,
    PathGraph,
    Star,
    Acyclic,
    InStar,
    OutStar,
    DirectedPath,
    Polytree,
    Polypath,
    Fence,
    Tournament,
}

impl ShapeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeLabel::Tree => "tree(U)",
            ShapeLabel::PathGraph => "path-graph(U)",
            ShapeLabel::Star => "star(U)",
            ShapeLabel::Acyclic => "acyclic",
            ShapeLabel::InStar => "in-star",
            ShapeLabel::OutStar => "out-star",
            ShapeLabel::DirectedPath => "directed-path",
            ShapeLabel::Polytree => "polytree",
            ShapeLabel::Polypath => "polypath",
            ShapeLabel::Fence => "fence",
            ShapeLabel::Tournament => "tournament",
        }
    }
}

impl fmt::Display for ShapeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ShapeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

pub fn sources(g: &Digraph) -> Vec<String> {
    g.in_degrees()
        .into_iter()
        .filter(|(_, d)| *d == 0)
        .map(|(v, _)| v.to_string())
        .collect()
}

pub fn sinks(g: &Digraph) -> Vec<String> {
    g.out_degrees()
        .into_iter()
        .filter(|(_, d)| *d == 0)
        .map(|(v, _)| v.to_string())
        .collect()
}

fn is_star(u: &UGraph) -> bool {
    if !u.is_tree() {
        return false;
    }
    let nb = u.neighbours();
    let leaves = nb.values().filter(|n| n.len() == 1).count();
    u.vertex_count() <= 2 || leaves == u.vertex_count() - 1
}

fn is_path_graph(u: &UGraph) -> bool {
    u.is_tree() && u.max_degree() <= 2
}

/// Shapes of an undirected graph.
pub fn classify_undirected(u: &UGraph) -> BTreeSet<ShapeLabel> {
    let mut out = BTreeSet::new();
    if u.is_tree() {
        out.insert(ShapeLabel::Tree);
        if is_path_graph(u) {
            out.insert(ShapeLabel::PathGraph);
        }
        if is_star(u) {
            out.insert(ShapeLabel::Star);
        }
    }
    out
}

fn is_tournament(g: &Digraph) -> bool {
    let vs: Vec<&str> = g.vertices().collect();
    if vs.is_empty() {
        return false;
    }
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            if g.has_edge(a, b) == g.has_edge(b, a) {
                return false;
            }
        }
    }
    true
}

/// Directed shape labels of `g`.
///
/// Shape labels need a weakly connected graph; a disconnected input can only
/// be labelled acyclic. The output always respects
/// fence ⇒ polypath ⇒ polytree ⇒ acyclic.
pub fn classify(g: &Digraph) -> BTreeSet<ShapeLabel> {
    let mut out = BTreeSet::new();
    if g.is_acyclic() {
        out.insert(ShapeLabel::Acyclic);
    }
    if !g.is_weakly_connected() {
        return out;
    }
    if is_tournament(g) {
        out.insert(ShapeLabel::Tournament);
    }
    let u = g.undirected();
    // U(G) is a tree and no edge has an antiparallel twin.
    let polytree = u.is_tree() && g.edge_count() == u.edge_count();
    if !polytree {
        return out;
    }
    out.insert(ShapeLabel::Polytree);
    let indeg = g.in_degrees();
    let outdeg = g.out_degrees();
    if is_star(&u) {
        let n = g.vertex_count();
        if n == 1 || indeg.values().any(|&d| d == n - 1) {
            out.insert(ShapeLabel::InStar);
        }
        if n == 1 || outdeg.values().any(|&d| d == n - 1) {
            out.insert(ShapeLabel::OutStar);
        }
    }
    if is_path_graph(&u) {
        out.insert(ShapeLabel::Polypath);
        if indeg.values().all(|&d| d <= 1) && outdeg.values().all(|&d| d <= 1) {
            out.insert(ShapeLabel::DirectedPath);
        }
        if g.vertices().all(|v| indeg[v] == 0 || outdeg[v] == 0) {
            out.insert(ShapeLabel::Fence);
        }
    }
    out
}

/// Direction of one edge when a polypath is read from one end to the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Step {
    /// `v_i -> v_{i+1}`
    Forward,
    /// `v_i <- v_{i+1}`
    Backward,
}

impl Step {
    pub fn flip(self) -> Step {
        match self {
            Step::Forward => Step::Backward,
            Step::Backward => Step::Forward,
        }
    }
}

/// A polypath read as a vertex sequence plus edge directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolypathWalk {
    pub vertices: Vec<String>,
    pub steps: Vec<Step>,
}

impl PolypathWalk {
    /// The same polypath read from the other end.
    pub fn reversed(&self) -> PolypathWalk {
        PolypathWalk {
            vertices: self.vertices.iter().rev().cloned().collect(),
            steps: self.steps.iter().rev().map(|s| s.flip()).collect(),
        }
    }

    /// Maximal runs of equal direction as `(direction, first edge index, length)`.
    pub fn runs(&self) -> Vec<(Step, usize, usize)> {
        let mut runs: Vec<(Step, usize, usize)> = Vec::new();
        for (i, &s) in self.steps.iter().enumerate() {
            match runs.last_mut() {
                Some((d, _, len)) if *d == s => *len += 1,
                _ => runs.push((s, i, 1)),
            }
        }
        runs
    }

    /// Direction of each maximal run, in walk order.
    pub fn signature(&self) -> Vec<Step> {
        self.runs().into_iter().map(|(d, _, _)| d).collect()
    }

    pub fn to_digraph(&self) -> Digraph {
        let mut g = Digraph::new();
        for v in &self.vertices {
            g.add_vertex(v);
        }
        for (i, s) in self.steps.iter().enumerate() {
            let (a, b) = (&self.vertices[i], &self.vertices[i + 1]);
            match s {
                Step::Forward => g.add_edge(a, b),
                Step::Backward => g.add_edge(b, a),
            }
        }
        g
    }
}

/// Reads a polypath from its lexicographically least endpoint; `None` if
/// `g` is not a polypath.
pub fn polypath_walk(g: &Digraph) -> Option<PolypathWalk> {
    if !classify(g).contains(&ShapeLabel::Polypath) {
        return None;
    }
    let u = g.undirected();
    let nb = u.neighbours();
    let start = nb.iter().find(|(_, n)| n.len() <= 1).map(|(v, _)| *v)?;
    let mut vertices = vec![start.to_string()];
    let mut steps = Vec::new();
    let mut prev: Option<&str> = None;
    let mut cur = start;
    while let Some(&next) = nb[cur].iter().find(|&&n| Some(n) != prev) {
        steps.push(if g.has_edge(cur, next) { Step::Forward } else { Step::Backward });
        vertices.push(next.to_string());
        prev = Some(cur);
        cur = next;
    }
    Some(PolypathWalk { vertices, steps })
}

/// Parameterised families with canonical vertex names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    /// Centre plus `k` sources.
    InStar(usize),
    /// Centre plus `k` sinks.
    OutStar(usize),
    /// Directed path on `k >= 1` vertices.
    DirectedPath(usize),
    /// Fence with `m >= 1` sinks and `m + c` sources, `c ∈ {-1, 0, 1}`.
    Fence { m: usize, c: i8 },
    /// `m^(k-1)` disjoint directed paths on `m` vertices, `k >= 2`.
    GkFamily { k: u32, m: usize },
}

impl ShapeKind {
    /// Builds the shape; every vertex name starts with `prefix`.
    pub fn build(self, prefix: &str) -> Result<Digraph> {
        let mut g = Digraph::new();
        match self {
            ShapeKind::InStar(k) => {
                let c = format!("{prefix}c");
                g.add_vertex(&c);
                for i in 1..=k {
                    g.add_edge(&format!("{prefix}s{i}"), &c);
                }
            }
            ShapeKind::OutStar(k) => {
                let c = format!("{prefix}c");
                g.add_vertex(&c);
                for i in 1..=k {
                    g.add_edge(&c, &format!("{prefix}s{i}"));
                }
            }
            ShapeKind::DirectedPath(k) => {
                if k == 0 {
                    return Err(GraphError::BadParameter("directed path needs k >= 1".into()));
                }
                add_dpath(&mut g, k, |i| format!("{prefix}p{i}"));
            }
            ShapeKind::Fence { m, c } => {
                if m == 0 || !(-1..=1).contains(&c) {
                    return Err(GraphError::BadParameter(format!("fence needs m >= 1 and c in -1..=1, got m={m} c={c}")));
                }
                let keep_first = c >= 0;
                let keep_last = c == 1;
                for j in 1..=m {
                    let sink = format!("{prefix}b{j}");
                    g.add_vertex(&sink);
                    if j > 1 || keep_first {
                        g.add_edge(&format!("{prefix}a{}", j - 1), &sink);
                    }
                    if j < m || keep_last {
                        g.add_edge(&format!("{prefix}a{j}"), &sink);
                    }
                }
            }
            ShapeKind::GkFamily { k, m } => {
                if k < 2 || m == 0 {
                    return Err(GraphError::BadParameter("family needs k >= 2 and m >= 1".into()));
                }
                let copies = m
                    .checked_pow(k - 1)
                    .ok_or_else(|| GraphError::BadParameter("family too large".into()))?;
                for copy in 1..=copies {
                    add_dpath(&mut g, m, |i| format!("{prefix}p{i}#{copy}"));
                }
            }
        }
        Ok(g)
    }
}

fn add_dpath(g: &mut Digraph, k: usize, name: impl Fn(usize) -> String) {
    g.add_vertex(&name(1));
    for i in 1..k {
        g.add_edge(&name(i), &name(i + 1));
    }
}
