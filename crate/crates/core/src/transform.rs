//! Solvability-preserving instance surgery: extension to a causal-graph
//! supergraph, subdivision of a causal edge, stretching a fence onto a
//! longer polypath, reordering plan segments around a variable, and
//! disjoint cloning.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{classify, polypath_walk, Digraph, GraphError, PolypathWalk, ShapeLabel, Step};
use crate::planning::{Operator, PartialState, Plan, PlanningError, PlanningInstance, State, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("causal graph is not a subgraph of the target: missing {0}")]
    NotASubgraph(String),
    #[error("causal graph is not a polypath")]
    NotAPolypath,
    #[error("causal graph is not a fence")]
    NotAFence,
    #[error("target graph is not a polypath")]
    TargetNotAPolypath,
    #[error("no causal edge ({0}, {1})")]
    MissingEdge(String, String),
    #[error("alternation mismatch: fence runs {fence}, target runs {target}")]
    AlternationMismatch { fence: String, target: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("plan is not a solution")]
    NotASolution,
    #[error("segment {start}..{end} is out of range for a plan of {len} steps")]
    BadRange { start: usize, end: usize, len: usize },
    #[error("segment step {index} (`{operator}`) affects `{variable}`")]
    SegmentTouchesVariable {
        index: usize,
        operator: String,
        variable: String,
    },
    #[error("at least one copy is required")]
    NoCopies,
    #[error(transparent)]
    Planning(#[from] PlanningError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T, E = TransformError> = std::result::Result<T, E>;

pub const STAR_TOKEN: &str = "STAR";

/// `STAR`, or `STAR_1`, `STAR_2`, ... if the domain already uses it.
pub fn star_token(domain: &[String]) -> String {
    if !domain.iter().any(|d| d == STAR_TOKEN) {
        return STAR_TOKEN.to_string();
    }
    (1..)
        .map(|i| format!("{STAR_TOKEN}_{i}"))
        .find(|t| !domain.contains(t))
        .unwrap()
}

fn unique_name(base: String, taken: &BTreeSet<String>) -> String {
    if !taken.contains(&base) {
        return base;
    }
    (1..).map(|i| format!("{base}~{i}")).find(|n| !taken.contains(n)).unwrap()
}

fn fresh_var_name(taken: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("w#{i}")).find(|n| !taken.contains(n)).unwrap()
}

fn display_edge(a: &str, b: &str) -> String {
    format!("edge ({a}, {b})")
}

/// Extends `inst` so that its causal graph becomes exactly `g`.
///
/// Vertices of `g` that are not variables become binary variables (init `0`,
/// no goal). Every old domain gains a star value. A new edge `(x, v)` into
/// an old variable gets `star(x,v) = <x = init(x) ; v = STAR>`, and every
/// edge `(x, u)` into a new variable gets `set(x,u) = <x = init(x) ; u = 1>`.
/// Neither kind of operator can help reach the goal, so solvability is
/// unchanged.
pub fn extend_to_supergraph(inst: &PlanningInstance, g: &Digraph) -> Result<PlanningInstance> {
    let cg = inst.causal_graph();
    if let Some(v) = cg.vertices().find(|v| !g.has_vertex(v)) {
        return Err(TransformError::NotASubgraph(format!("vertex {v}")));
    }
    if let Some((a, b)) = cg.edges().find(|(a, b)| !g.has_edge(a, b)) {
        return Err(TransformError::NotASubgraph(display_edge(a, b)));
    }
    let (mut vars, init, goal, mut ops) = inst.clone().into_parts();
    let mut init = init.into_partial();
    let mut star: BTreeMap<String, String> = BTreeMap::new();
    for v in &mut vars {
        let t = star_token(&v.domain);
        v.domain.push(t.clone());
        star.insert(v.name.clone(), t);
    }
    for v in g.vertices().filter(|v| !cg.has_vertex(v)) {
        vars.push(Variable::new(v, ["0", "1"]));
        init.insert(v, "0");
    }
    let mut taken: BTreeSet<String> = ops.iter().map(|o| o.name.clone()).collect();
    for (x, v) in g.edges().filter(|(a, b)| !cg.has_edge(a, b)) {
        let x_init = init.get(x).unwrap().to_string();
        let (name, value) = match star.get(v) {
            Some(t) => (format!("star({x},{v})"), t.clone()),
            None => (format!("set({x},{v})"), "1".to_string()),
        };
        let name = unique_name(name, &taken);
        taken.insert(name.clone());
        ops.push(Operator::from_pairs(name, &[(x, &x_init)], &[(v, &value)])?);
    }
    Ok(PlanningInstance::new(vars, State::from_partial(init), goal, ops)?)
}

/// Subdivides the causal edge `(u, v)` through a fresh variable `w` that
/// copies `u`: operators reading `u` and writing `v` read `w` instead (and
/// keep their names), and `copy(u,w,x) = <u = x ; w = x>` is added for every
/// value `x` of `u`. Returns the new instance and `w`.
///
/// `w` is `name` when given, otherwise the first unused `w#<k>`.
pub fn subdivide_instance(inst: &PlanningInstance, (u, v): (&str, &str), name: Option<&str>) -> Result<(PlanningInstance, String)> {
    let cg = inst.causal_graph();
    if !classify(&cg).contains(&ShapeLabel::Polypath) {
        return Err(TransformError::NotAPolypath);
    }
    if !cg.has_edge(u, v) {
        return Err(TransformError::MissingEdge(u.into(), v.into()));
    }
    let taken: BTreeSet<String> = inst.variable_names().map(str::to_string).collect();
    let w = match name {
        Some(n) if taken.contains(n) => {
            return Err(TransformError::Planning(PlanningError::DuplicateVariables(vec![n.into()])));
        }
        Some(n) => n.to_string(),
        None => fresh_var_name(&taken),
    };
    let (mut vars, init, goal, ops) = inst.clone().into_parts();
    let du = inst.variable(u).unwrap().domain.clone();
    vars.push(Variable::new(&w, du.iter().cloned()));
    let mut init = init.into_partial();
    init.insert(&w, inst.init().get(u).unwrap());

    let mut out = Vec::with_capacity(ops.len() + du.len());
    for op in ops {
        if op.pre.contains(u) && op.post.contains(v) {
            out.push(op.substituted(u, &w));
        } else {
            out.push(op);
        }
    }
    let mut names: BTreeSet<String> = out.iter().map(|o| o.name.clone()).collect();
    for x in &du {
        let name = unique_name(format!("copy({u},{w},{x})"), &names);
        names.insert(name.clone());
        out.push(Operator::from_pairs(name, &[(u, x)], &[(&w, x)])?);
    }
    let result = PlanningInstance::new(vars, State::from_partial(init), goal, out)?;
    Ok((result, w))
}

/// One subdivision of a stretch: edge `(from, to)` gets the new variable `via`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subdivision {
    pub from: String,
    pub to: String,
    pub via: String,
}

/// Pairs the fence's walk with the target's walk when their run directions
/// agree edge-for-run. Returns the fence walk (possibly reversed) and the
/// target walk read from its lexicographically least endpoint.
pub fn align_fence(fence: &Digraph, target: &Digraph) -> Result<(PolypathWalk, PolypathWalk)> {
    let fw = polypath_walk(fence).ok_or(TransformError::NotAFence)?;
    if !classify(fence).contains(&ShapeLabel::Fence) {
        return Err(TransformError::NotAFence);
    }
    let hw = polypath_walk(target).ok_or(TransformError::TargetNotAPolypath)?;
    let sig = hw.signature();
    let show = |s: &[Step]| {
        s.iter()
            .map(|d| if *d == Step::Forward { '>' } else { '<' })
            .collect::<String>()
    };
    let candidates = [fw.clone(), fw.reversed()];
    let matching: Vec<&PolypathWalk> = candidates.iter().filter(|c| c.steps == sig).collect();
    let chosen = matching
        .iter()
        .find(|c| c.vertices.first() == hw.vertices.first())
        .or(matching.first())
        .ok_or_else(|| TransformError::AlternationMismatch {
            fence: show(&fw.steps),
            target: show(&sig),
        })?;
    Ok(((*chosen).clone(), hw))
}

/// The subdivisions that turn the fence causal graph of `inst` into a graph
/// isomorphic to `target`: each fence edge is subdivided once less than the
/// length of the matching run of `target`. New variables take the names of
/// the run's interior vertices in `target` where those are free.
pub fn stretch_schedule(inst: &PlanningInstance, target: &Digraph) -> Result<Vec<Subdivision>> {
    let (fw, hw) = align_fence(&inst.causal_graph(), target)?;
    let mut taken: BTreeSet<String> = inst.variable_names().map(str::to_string).collect();
    let mut schedule = Vec::new();
    for (k, (dir, start, len)) in hw.runs().into_iter().enumerate() {
        let (a, b) = (&fw.vertices[k], &fw.vertices[k + 1]);
        let interior = &hw.vertices[start + 1..start + len];
        // graph order: the tail of the run first
        let (tail, head, names): (&String, &String, Vec<&String>) = match dir {
            Step::Forward => (a, b, interior.iter().collect()),
            Step::Backward => (b, a, interior.iter().rev().collect()),
        };
        let mut from = tail.clone();
        for n in names {
            let via = if taken.contains(n) { fresh_var_name(&taken) } else { n.clone() };
            taken.insert(via.clone());
            schedule.push(Subdivision {
                from: from.clone(),
                to: head.clone(),
                via: via.clone(),
            });
            from = via;
        }
    }
    Ok(schedule)
}

/// Replays subdivisions in order.
pub fn apply_schedule(inst: &PlanningInstance, schedule: &[Subdivision]) -> Result<PlanningInstance> {
    let mut cur = inst.clone();
    for s in schedule {
        cur = subdivide_instance(&cur, (&s.from, &s.to), Some(&s.via))?.0;
    }
    Ok(cur)
}

/// Stretches a fence-shaped instance so that its causal graph is isomorphic
/// to the polypath `target` (equal to it when the fence variables already
/// carry the names of the matching run endpoints of `target`).
pub fn stretch_to_polypath(inst: &PlanningInstance, target: &Digraph) -> Result<(PlanningInstance, Vec<Subdivision>)> {
    let schedule = stretch_schedule(inst, target)?;
    Ok((apply_schedule(inst, &schedule)?, schedule))
}

/// Moves the operators of `plan[start..end]` so that those on the side of
/// `var` holding the lexicographically least other variable come first,
/// keeping relative order on each side. Requires a polypath causal graph, a
/// solution plan, and a segment that never writes `var`.
pub fn reorder_plan_segment(inst: &PlanningInstance, plan: &Plan, var: &str, start: usize, end: usize) -> Result<Plan> {
    let cg = inst.causal_graph();
    if !classify(&cg).contains(&ShapeLabel::Polypath) {
        return Err(TransformError::NotAPolypath);
    }
    if inst.variable(var).is_none() {
        return Err(TransformError::UnknownVariable(var.into()));
    }
    if start > end || end > plan.len() {
        return Err(TransformError::BadRange {
            start,
            end,
            len: plan.len(),
        });
    }
    if !inst.is_solution(plan)? {
        return Err(TransformError::NotASolution);
    }
    let mut rest = cg.clone();
    rest.remove_vertex(var);
    let first_side: BTreeSet<String> = rest
        .weak_components()
        .into_iter()
        .min_by(|a, b| a.vertices().next().cmp(&b.vertices().next()))
        .map(|c| c.vertices().map(str::to_string).collect())
        .unwrap_or_default();

    let mut q1 = Vec::new();
    let mut q2 = Vec::new();
    for (index, name) in plan.steps[start..end].iter().enumerate() {
        let op = inst.operator(name).expect("validated plan");
        if op.post.contains(var) {
            return Err(TransformError::SegmentTouchesVariable {
                index: start + index,
                operator: name.clone(),
                variable: var.into(),
            });
        }
        if op.post.vars().all(|v| first_side.contains(v)) {
            q1.push(name.clone());
        } else {
            q2.push(name.clone());
        }
    }
    let mut steps = plan.steps[..start].to_vec();
    steps.extend(q1);
    steps.extend(q2);
    steps.extend_from_slice(&plan.steps[end..]);
    let out = Plan { steps };
    debug_assert!(inst.is_solution(&out).unwrap_or(false));
    Ok(out)
}

/// Name of `name` in copy `index` of [`clone_union`].
pub fn clone_name(name: &str, index: usize) -> String {
    format!("{name}#{index}")
}

/// Disjoint union of `copies` renamed copies of `inst` (suffix `#1`, `#2`,
/// ... on variables and operators).
pub fn clone_union(inst: &PlanningInstance, copies: usize) -> Result<PlanningInstance> {
    if copies == 0 {
        return Err(TransformError::NoCopies);
    }
    let mut vars = Vec::new();
    let mut init = PartialState::new();
    let mut goal = PartialState::new();
    let mut ops = Vec::new();
    let rename = |p: &PartialState, c: usize| -> PartialState { p.iter().map(|(k, x)| (clone_name(k, c), x.to_string())).collect() };
    for c in 1..=copies {
        for v in inst.variables() {
            vars.push(Variable::new(clone_name(&v.name, c), v.domain.iter().cloned()));
        }
        for (k, x) in rename(inst.init().as_partial(), c).iter() {
            init.insert(k, x);
        }
        for (k, x) in rename(inst.goal(), c).iter() {
            goal.insert(k, x);
        }
        for op in inst.operators() {
            if op.is_dummy() {
                ops.push(Operator::dummy(clone_name(&op.name, c)));
            } else {
                ops.push(Operator::new(clone_name(&op.name, c), rename(&op.pre, c), rename(&op.post, c))?);
            }
        }
    }
    Ok(PlanningInstance::new(vars, State::from_partial(init), goal, ops)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_isomorphic, subdivide, Budget, ShapeKind};
    use crate::sat::{chain_instance, gadget_fence, CnfFormula, FenceShape, FenceVariant};
    use crate::solver::{brute_force_plan, SearchBudget};

    fn solvable(p: &PlanningInstance) -> bool {
        brute_force_plan(p, SearchBudget::default()).outcome.solvable().unwrap()
    }

    fn two_var(with_flip: bool) -> PlanningInstance {
        let vars = vec![Variable::new("u", ["0", "1"]), Variable::new("v", ["0", "1"])];
        let init = State::from_partial([("u", "0"), ("v", "0")].into_iter().collect());
        let mut ops = vec![Operator::from_pairs("push", &[("u", "1")], &[("v", "1")]).unwrap()];
        if with_flip {
            ops.push(Operator::from_pairs("flip", &[("u", "0")], &[("u", "1")]).unwrap());
        }
        PlanningInstance::new(vars, init, [("v", "1")].into_iter().collect(), ops).unwrap()
    }

    #[test]
    fn extend_adds_star_operator() {
        let p = chain_instance(2).unwrap();
        let mut g = p.causal_graph();
        g.add_edge("u", "x_1");
        let e = extend_to_supergraph(&p, &g).unwrap();
        assert_eq!(e.causal_graph(), g);
        let star = e.operator("star(u,x_1)").unwrap();
        assert_eq!(star.post.get("x_1"), Some("STAR"));
        assert!(solvable(&e));
        let same = extend_to_supergraph(&p, &p.causal_graph()).unwrap();
        assert_eq!(same.operators().len(), p.operators().len());
        assert!(same.variables().iter().all(|v| v.domain.contains(&"STAR".to_string())));
        let mut small = Digraph::new();
        small.add_vertex("x_1");
        assert!(matches!(extend_to_supergraph(&p, &small), Err(TransformError::NotASubgraph(_))));
    }

    #[test]
    fn star_token_avoids_collisions() {
        assert_eq!(star_token(&["STAR".into(), "STAR_1".into()]), "STAR_2");
    }

    #[test]
    fn subdivide_two_variables() {
        let p = two_var(true);
        let (s, w) = subdivide_instance(&p, ("u", "v"), None).unwrap();
        assert!(s.operator("copy(u,w#1,0)").is_some() && s.operator("copy(u,w#1,1)").is_some());
        assert_eq!(s.operator("push").unwrap().pre.get(&w), Some("1"));
        let plan = Plan::new(["flip", "copy(u,w#1,1)", "push"]);
        assert!(s.is_strict_solution(&plan).unwrap());
        let (expected, _) = subdivide(&p.causal_graph(), ("u", "v")).unwrap();
        assert!(is_isomorphic(&s.causal_graph(), &expected, Budget::default()).unwrap());
        let (u, _) = subdivide_instance(&two_var(false), ("u", "v"), None).unwrap();
        assert!(!solvable(&u));
        assert!(subdivide_instance(&p, ("v", "u"), None).is_err());
    }

    #[test]
    fn stretch_fence() {
        let f = CnfFormula::from_ints(3, &[[1, 2, -3]]).unwrap();
        let p = gadget_fence(&f, FenceShape::Full, FenceVariant::Base3).unwrap();
        let h = Digraph::from_edges([("s", "a"), ("a", "k"), ("b", "k"), ("t", "b")]);
        let (q, schedule) = stretch_to_polypath(&p, &h).unwrap();
        assert_eq!(schedule.len(), 2);
        assert!(is_isomorphic(&q.causal_graph(), &h, Budget::default()).unwrap());
        assert_eq!(solvable(&p), solvable(&q));
        let same = ShapeKind::Fence { m: 1, c: 1 }.build("").unwrap();
        assert!(stretch_schedule(&p, &same).unwrap().is_empty());
        let dp = ShapeKind::DirectedPath(3).build("").unwrap();
        assert!(matches!(stretch_schedule(&p, &dp), Err(TransformError::AlternationMismatch { .. })));
    }

    #[test]
    fn reorder_chain_segment() {
        // x_1 -> x_2 -> x_3 with independent resets on both ends
        let c = chain_instance(3).unwrap();
        let (vars, init, _, mut ops) = c.into_parts();
        ops.push(Operator::from_pairs("touch(1)", &[], &[("x_1", "1")]).unwrap());
        let goal: PartialState = [("x_1", "1"), ("x_3", "1")].into_iter().collect();
        let p = PlanningInstance::new(vars, init, goal, ops).unwrap();
        let plan = Plan::new(["flip(1)", "flip(2)", "flip(3)", "touch(1)"]);
        let out = reorder_plan_segment(&p, &plan, "x_2", 2, 4).unwrap();
        assert_eq!(out.steps, ["flip(1)", "flip(2)", "touch(1)", "flip(3)"]);
        assert!(p.is_solution(&out).unwrap());
        assert_eq!(reorder_plan_segment(&p, &plan, "x_2", 1, 1).unwrap(), plan);
        assert!(matches!(
            reorder_plan_segment(&p, &plan, "x_2", 0, 2),
            Err(TransformError::SegmentTouchesVariable { index: 1, .. })
        ));
    }

    #[test]
    fn clones() {
        let p = clone_union(&chain_instance(3).unwrap(), 3).unwrap();
        let cg = p.causal_graph();
        assert_eq!((cg.vertex_count(), cg.cc_size()), (9, 3));
        let g3 = ShapeKind::GkFamily { k: 2, m: 3 }.build("").unwrap();
        assert!(is_isomorphic(&cg, &g3, Budget::default()).unwrap());
        assert!(solvable(&p));
        assert_eq!(clone_union(&p, 0), Err(TransformError::NoCopies));
    }
}
