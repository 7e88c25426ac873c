//! Simple directed graphs over string-named vertices, and the structural
//! machinery built on them: components, profiles, shape recognition,
//! contraction and subdivision, SP-graphs and isomorphism.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

mod bounds;
mod iso;
mod minor;
mod profile;
mod shapes;
mod sp;

pub use bounds::{moore_bound, polypath_bound, Bound};
pub use iso::{find_isomorphism, is_isomorphic};
pub use minor::{contract, subdivide};
pub use profile::{longest_directed_path, longest_undirected_path, structural_profile, Measure, StructuralProfile};
pub use shapes::{
    classify, classify_undirected, polypath_walk, sinks, sources, PolypathWalk, ShapeKind, ShapeLabel, Step,
};
pub use sp::{enumerate_sp_graphs, is_sp_closed, is_sp_graph, SpClosure, SpVerdict, SpWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(String, String),
    #[error("self-loop on `{0}` is not allowed")]
    SelfLoop(String),
    #[error("graph is not weakly connected")]
    Disconnected,
    #[error("search budget of {0} expansions exhausted")]
    BudgetExhausted(u64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Per-call search allowance, counted in node expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(1_000_000)
    }
}

pub(crate) struct Meter {
    left: u64,
    limit: u64,
}

impl Meter {
    pub(crate) fn new(b: Budget) -> Self {
        Meter { left: b.0, limit: b.0 }
    }

    /// Consumes one expansion; false once the budget is gone.
    pub(crate) fn tick(&mut self) -> bool {
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        true
    }

    pub(crate) fn exhausted(&self) -> GraphError {
        GraphError::BudgetExhausted(self.limit)
    }
}

/// A simple directed graph without self-loops.
///
/// Equality compares vertex and edge sets only; the fresh-name counter used
/// by contraction and subdivision is not part of a graph's identity.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    fresh: u64,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Digraph {}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges<'a>(edges: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut g = Digraph::new();
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_vertex(&mut self, v: &str) -> bool {
        self.vertices.insert(v.to_string())
    }

    /// Adds `(u, v)` and its endpoints.
    ///
    /// # Panics
    /// On a self-loop; use [`try_add_edge`](Self::try_add_edge) for untrusted input.
    pub fn add_edge(&mut self, u: &str, v: &str) {
        self.try_add_edge(u, v).expect("self-loop");
    }

    pub fn try_add_edge(&mut self, u: &str, v: &str) -> Result<bool> {
        if u == v {
            return Err(GraphError::SelfLoop(u.to_string()));
        }
        self.add_vertex(u);
        self.add_vertex(v);
        Ok(self.edges.insert((u.to_string(), v.to_string())))
    }

    pub fn remove_edge(&mut self, u: &str, v: &str) -> bool {
        self.edges.remove(&(u.to_string(), v.to_string()))
    }

    pub fn remove_vertex(&mut self, v: &str) -> bool {
        if !self.vertices.remove(v) {
            return false;
        }
        self.edges.retain(|(a, b)| a != v && b != v);
        true
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> + '_ {
        self.vertices.iter().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        self.edges.contains(&(u.to_string(), v.to_string()))
    }

    pub fn successors<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |(a, _)| a == v).map(|(_, b)| b.as_str())
    }

    pub fn predecessors<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |(_, b)| b == v).map(|(a, _)| a.as_str())
    }

    pub fn in_degree(&self, v: &str) -> usize {
        self.predecessors(v).count()
    }

    pub fn out_degree(&self, v: &str) -> usize {
        self.successors(v).count()
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_degrees().into_values().max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.out_degrees().into_values().max().unwrap_or(0)
    }

    pub fn in_degrees(&self) -> BTreeMap<&str, usize> {
        let mut m: BTreeMap<&str, usize> = self.vertices().map(|v| (v, 0)).collect();
        for (_, b) in self.edges() {
            *m.get_mut(b).unwrap() += 1;
        }
        m
    }

    pub fn out_degrees(&self) -> BTreeMap<&str, usize> {
        let mut m: BTreeMap<&str, usize> = self.vertices().map(|v| (v, 0)).collect();
        for (a, _) in self.edges() {
            *m.get_mut(a).unwrap() += 1;
        }
        m
    }

    /// A vertex name not yet in the graph, `w#<counter>`.
    pub fn fresh_vertex(&mut self) -> String {
        let (name, counter) = self.peek_fresh();
        self.fresh = counter;
        name
    }

    /// The name [`Digraph::fresh_vertex`] would return, with the counter
    /// value it would leave behind.
    pub(crate) fn peek_fresh(&self) -> (String, u64) {
        let mut c = self.fresh;
        loop {
            c += 1;
            let name = format!("w#{c}");
            if !self.vertices.contains(&name) {
                return (name, c);
            }
        }
    }

    pub(crate) fn fresh_counter(&self) -> u64 {
        self.fresh
    }

    pub(crate) fn set_fresh_counter(&mut self, c: u64) {
        self.fresh = c;
    }

    /// `U(G)`.
    pub fn undirected(&self) -> UGraph {
        let mut u = UGraph::new();
        for v in self.vertices() {
            u.add_vertex(v);
        }
        for (a, b) in self.edges() {
            u.add_edge(a, b);
        }
        u
    }

    /// Subgraph induced by `keep`.
    pub fn induced<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> Digraph {
        let keep: BTreeSet<&str> = keep.into_iter().collect();
        let mut g = Digraph::new();
        for v in self.vertices().filter(|v| keep.contains(v)) {
            g.add_vertex(v);
        }
        for (a, b) in self.edges() {
            if keep.contains(a) && keep.contains(b) {
                g.add_edge(a, b);
            }
        }
        g.fresh = self.fresh;
        g
    }

    /// True when every vertex and edge of `self` is in `other`.
    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    /// Union of graphs on disjoint vertex sets (shared vertices are merged).
    pub fn union(&self, other: &Digraph) -> Digraph {
        let mut g = self.clone();
        g.vertices.extend(other.vertices.iter().cloned());
        g.edges.extend(other.edges.iter().cloned());
        g.fresh = self.fresh.max(other.fresh);
        g
    }

    /// Copy with every vertex renamed through `f`.
    pub fn map_vertices(&self, f: impl Fn(&str) -> String) -> Digraph {
        let mut g = Digraph::new();
        for v in self.vertices() {
            g.add_vertex(&f(v));
        }
        for (a, b) in self.edges() {
            g.add_edge(&f(a), &f(b));
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn's algorithm; ties resolved by vertex name.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        let mut indeg = self.in_degrees();
        let mut ready: BTreeSet<&str> = indeg.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
        let mut order = Vec::with_capacity(self.vertex_count());
        while let Some(v) = ready.pop_first() {
            order.push(v.to_string());
            for w in self.successors(v) {
                let d = indeg.get_mut(w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.vertex_count()).then_some(order)
    }

    /// Weakly connected components ordered by least vertex name.
    pub fn weak_components(&self) -> Vec<Digraph> {
        let u = self.undirected();
        u.components()
            .into_iter()
            .map(|c| self.induced(c.iter().map(String::as_str)))
            .collect()
    }

    /// Size of the largest weakly connected component (0 for the empty graph).
    pub fn cc_size(&self) -> usize {
        self.undirected().components().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.undirected().components().len() == 1
    }

    /// Edge-list text: one `u v` pair per line in lexicographic order, then
    /// isolated vertices alone on a line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        for v in self.vertices() {
            if self.in_degree(v) == 0 && self.out_degree(v) == 0 {
                let _ = writeln!(out, "{v}");
            }
        }
        out
    }

    /// Parses the edge-list format. Lines whose first non-blank character is
    /// `#` are comments; a single token declares an isolated vertex.
    pub fn from_edge_list(text: &str) -> Result<Digraph> {
        let mut g = Digraph::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [v] => {
                    g.add_vertex(v);
                }
                [a, b] => {
                    g.try_add_edge(a, b).map_err(|e| GraphError::Parse {
                        line: i + 1,
                        message: e.to_string(),
                    })?;
                }
                _ => {
                    return Err(GraphError::Parse {
                        line: i + 1,
                        message: format!("expected `u v` or `u`, found {} tokens", toks.len()),
                    })
                }
            }
        }
        Ok(g)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{}\" {{\n", escape(name));
        for v in self.vertices() {
            let _ = writeln!(out, "  \"{}\";", escape(v));
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(a), escape(b));
        }
        out.push_str("}\n");
        out
    }

    pub(crate) fn indexed(&self) -> Indexed {
        Indexed::new(self)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Index-based adjacency for the search routines.
pub(crate) struct Indexed {
    pub names: Vec<String>,
    pub out: Vec<Vec<usize>>,
    pub inn: Vec<Vec<usize>>,
    pub adj: Vec<Vec<bool>>,
}

impl Indexed {
    fn new(g: &Digraph) -> Self {
        let names: Vec<String> = g.vertices.iter().cloned().collect();
        let pos: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let n = names.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut adj = vec![vec![false; n]; n];
        for (a, b) in g.edges() {
            let (i, j) = (pos[a], pos[b]);
            out[i].push(j);
            inn[j].push(i);
            adj[i][j] = true;
        }
        Indexed { names, out, inn, adj }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Neighbours in `U(G)`, each once, ascending.
    pub fn undirected_neighbours(&self, v: usize) -> Vec<usize> {
        let mut ns: Vec<usize> = self.out[v].iter().chain(&self.inn[v]).copied().collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

/// A simple undirected graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UGraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

impl UGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: &str) {
        self.vertices.insert(v.to_string());
    }

    /// Adds `{u, v}`; self-loops are ignored.
    pub fn add_edge(&mut self, u: &str, v: &str) {
        if u == v {
            return;
        }
        self.add_vertex(u);
        self.add_vertex(v);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.insert((a.to_string(), b.to_string()));
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> + '_ {
        self.vertices.iter().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.contains(&(a.to_string(), b.to_string()))
    }

    pub fn neighbours(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut m: BTreeMap<&str, Vec<&str>> = self.vertices().map(|v| (v, Vec::new())).collect();
        for (a, b) in self.edges() {
            m.get_mut(a).unwrap().push(b);
            m.get_mut(b).unwrap().push(a);
        }
        m
    }

    pub fn degree(&self, v: &str) -> usize {
        self.edges().filter(|(a, b)| *a == v || *b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbours().values().map(Vec::len).max().unwrap_or(0)
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<String>> {
        let nb = self.neighbours();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut comps = Vec::new();
        for start in self.vertices() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.push(v.to_string());
                for &w in &nb[v] {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Connected and `|E| = |V| - 1`.
    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.vertex_count()
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.vertex_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_and_cc_size() {
        let g = Digraph::from_edges([("a", "b"), ("c", "d")]);
        let comps = g.weak_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(g.cc_size(), 2);
        let empty = Digraph::new();
        assert!(empty.weak_components().is_empty());
        assert_eq!(empty.cc_size(), 0);
        let f = ShapeKind::Fence { m: 3, c: 1 }.build("").unwrap();
        assert_eq!(f.weak_components().len(), 1);
        assert_eq!(f.cc_size(), 7);
    }

    #[test]
    fn components_partition_the_graph() {
        let g = Digraph::from_edges([("a", "b"), ("b", "c"), ("x", "y"), ("z", "y")]);
        let mut g = g;
        g.add_vertex("lonely");
        let comps = g.weak_components();
        let mut union = Digraph::new();
        for c in &comps {
            union = union.union(c);
        }
        assert_eq!(union, g);
        let total: usize = comps.iter().map(Digraph::vertex_count).sum();
        assert_eq!(total, g.vertex_count());
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = Digraph::from_edges([("b", "a"), ("a", "c")]);
        g.add_vertex("z");
        let text = g.to_edge_list();
        assert_eq!(text, "a c\nb a\nz\n");
        let parsed = Digraph::from_edge_list(&format!("# comment\n{text}")).unwrap();
        assert_eq!(parsed, g);
        assert!(matches!(
            Digraph::from_edge_list("a b c\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Digraph::from_edge_list("a b\na a\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn dot_is_sorted() {
        let g = Digraph::from_edges([("b", "a"), ("a", "c")]);
        let dot = g.to_dot("G");
        let a = dot.find("\"a\" -> \"c\"").unwrap();
        let b = dot.find("\"b\" -> \"a\"").unwrap();
        assert!(a < b);
    }

    #[test]
    fn fresh_names_skip_existing() {
        let mut g = Digraph::from_edges([("w#1", "x")]);
        assert_eq!(g.fresh_vertex(), "w#2");
    }
}
