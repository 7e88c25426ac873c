use super::{Digraph, GraphError, Result};

/// Contracts `(u, v)` into a fresh vertex.
///
/// Both `(u, v)` and `(v, u)` disappear; every other edge incident to `u` or
/// `v` is redirected to the fresh vertex and parallel edges collapse.
pub fn contract(g: &Digraph, (u, v): (&str, &str)) -> Result<(Digraph, String)> {
    if !g.has_edge(u, v) {
        return Err(GraphError::MissingEdge(u.into(), v.into()));
    }
    let (w, counter) = g.peek_fresh();
    let f = |x: &str| if x == u || x == v { w.clone() } else { x.to_string() };
    let mut out = Digraph::new();
    out.set_fresh_counter(counter);
    for x in g.vertices() {
        out.add_vertex(&f(x));
    }
    for (a, b) in g.edges() {
        if (a == u && b == v) || (a == v && b == u) {
            continue;
        }
        let (fa, fb) = (f(a), f(b));
        // Unreachable for a simple graph: only (u, v) and (v, u) map onto w twice.
        if fa != fb {
            out.add_edge(&fa, &fb);
        }
    }
    Ok((out, w))
}

/// Replaces `(u, v)` by `u -> w -> v` for a fresh `w`.
pub fn subdivide(g: &Digraph, (u, v): (&str, &str)) -> Result<(Digraph, String)> {
    let mut out = g.clone();
    let w = out.fresh_vertex();
    subdivide_named(&mut out, (u, v), &w)?;
    Ok((out, w))
}

pub(crate) fn subdivide_named(g: &mut Digraph, (u, v): (&str, &str), w: &str) -> Result<()> {
    if !g.has_edge(u, v) {
        return Err(GraphError::MissingEdge(u.into(), v.into()));
    }
    if g.has_vertex(w) {
        return Err(GraphError::BadParameter(format!("vertex `{w}` already exists")));
    }
    g.remove_edge(u, v);
    g.add_edge(u, w);
    g.add_edge(w, v);
    Ok(())
}
