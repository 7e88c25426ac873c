//! Plan existence by breadth-first search over full states, and the
//! component planner that searches each weakly connected component of the
//! causal graph separately.

use std::collections::BTreeMap;

use indexmap::IndexSet;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;
use serde::Serialize;

use crate::planning::{Operator, PartialState, Plan, PlanningInstance, State};

pub const DEFAULT_MAX_STATES: u64 = 1_000_000;
pub const BUDGET_ENV: &str = "CAUSAL_FORGE_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Distinct states a search may store.
    pub max_states: u64,
    /// Plans longer than this are not looked for.
    pub max_plan_steps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: DEFAULT_MAX_STATES,
            max_plan_steps: 1_000_000,
        }
    }
}

impl SearchBudget {
    pub fn states(max_states: u64) -> Self {
        SearchBudget {
            max_states,
            ..Self::default()
        }
    }

    /// The default budget with `max_states` taken from `CAUSAL_FORGE_BUDGET`
    /// when it is set to a positive integer.
    pub fn from_env() -> Self {
        let states = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_STATES);
        Self::states(states)
    }
}

/// Successor pruning for [`brute_force_plan_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    /// Expand every applicable operator.
    #[default]
    None,
    /// Expand only the applicable operators of a strong stubborn set, and
    /// drop states from which the goal is unreachable even when operators
    /// never delete values. Some shortest plan always survives, so
    /// solvability and plan length are unchanged.
    Reduced,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub states_seen: u64,
    pub states_expanded: u64,
    /// States dropped as provably unable to reach the goal.
    pub dead_ends: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "plan", rename_all = "snake_case")]
pub enum PlanOutcome {
    Solved(Plan),
    Unsolvable,
    BudgetExceeded,
}

impl PlanOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, PlanOutcome::Solved(_))
    }

    pub fn plan(&self) -> Option<&Plan> {
        match self {
            PlanOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }

    /// `Some(solvable)` when the search finished.
    pub fn solvable(&self) -> Option<bool> {
        match self {
            PlanOutcome::Solved(_) => Some(true),
            PlanOutcome::Unsolvable => Some(false),
            PlanOutcome::BudgetExceeded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub outcome: PlanOutcome,
    pub stats: SearchStats,
}

type Fact = (u32, u16);

struct CompiledOp {
    pre: Vec<Fact>,
    post: Vec<Fact>,
}

/// The instance with variables and values replaced by indices.
struct Compiled {
    init: Vec<u16>,
    goal: Vec<Fact>,
    ops: Vec<CompiledOp>,
    /// Operators by position in the instance's (name-sorted) operator list.
    op_index: Vec<usize>,
}

impl Compiled {
    fn new(inst: &PlanningInstance) -> Compiled {
        let vars = inst.variables();
        let var_pos: BTreeMap<&str, u32> = vars.iter().enumerate().map(|(i, v)| (v.name.as_str(), i as u32)).collect();
        let val_pos: Vec<BTreeMap<&str, u16>> = vars
            .iter()
            .map(|v| v.domain.iter().enumerate().map(|(i, x)| (x.as_str(), i as u16)).collect())
            .collect();
        let fact = |var: &str, val: &str| {
            let i = var_pos[var];
            (i, val_pos[i as usize][val])
        };
        let facts = |p: &PartialState| p.iter().map(|(a, b)| fact(a, b)).collect::<Vec<_>>();
        let init = vars.iter().map(|v| fact(&v.name, inst.init().get(&v.name).unwrap()).1).collect();
        let mut ops = Vec::new();
        let mut op_index = Vec::new();
        for (i, op) in inst.operators().iter().enumerate() {
            if op.is_dummy() {
                continue;
            }
            ops.push(CompiledOp {
                pre: facts(&op.pre),
                post: facts(&op.post),
            });
            op_index.push(i);
        }
        Compiled {
            init,
            goal: facts(inst.goal()),
            ops,
            op_index,
        }
    }

    fn is_goal(&self, s: &[u16]) -> bool {
        self.goal.iter().all(|&(v, x)| s[v as usize] == x)
    }

    fn applicable(&self, o: usize, s: &[u16]) -> bool {
        self.ops[o].pre.iter().all(|&(v, x)| s[v as usize] == x)
    }
}

/// Goal reachability under the delete relaxation, where operators only add
/// values. Unreachable there means unreachable for real.
struct Relaxed {
    /// First fact index of each variable.
    offsets: Vec<usize>,
    /// Operators with each fact as a precondition.
    by_fact: Vec<Vec<u32>>,
    reached: Vec<bool>,
    missing: Vec<u32>,
    queue: Vec<usize>,
    fire: Vec<usize>,
}

impl Relaxed {
    fn new(inst: &PlanningInstance, c: &Compiled) -> Relaxed {
        let mut offsets = Vec::new();
        let mut total = 0;
        for v in inst.variables() {
            offsets.push(total);
            total += v.domain.len();
        }
        let mut by_fact = vec![Vec::new(); total];
        for (o, op) in c.ops.iter().enumerate() {
            for &(v, x) in &op.pre {
                by_fact[offsets[v as usize] + x as usize].push(o as u32);
            }
        }
        Relaxed {
            offsets,
            by_fact,
            reached: vec![false; total],
            missing: vec![0; c.ops.len()],
            queue: Vec::new(),
            fire: Vec::new(),
        }
    }

    fn goal_reachable(&mut self, c: &Compiled, s: &[u16]) -> bool {
        self.reached.iter_mut().for_each(|b| *b = false);
        self.queue.clear();
        self.fire.clear();
        for (v, &x) in s.iter().enumerate() {
            let f = self.offsets[v] + x as usize;
            self.reached[f] = true;
            self.queue.push(f);
        }
        for (o, op) in c.ops.iter().enumerate() {
            self.missing[o] = op.pre.len() as u32;
            if op.pre.is_empty() {
                self.fire.push(o);
            }
        }
        loop {
            while let Some(o) = self.fire.pop() {
                for &(v, x) in &c.ops[o].post {
                    let f = self.offsets[v as usize] + x as usize;
                    if !self.reached[f] {
                        self.reached[f] = true;
                        self.queue.push(f);
                    }
                }
            }
            let Some(f) = self.queue.pop() else { break };
            for &o in &self.by_fact[f] {
                self.missing[o as usize] -= 1;
                if self.missing[o as usize] == 0 {
                    self.fire.push(o as usize);
                }
            }
        }
        c.goal.iter().all(|&(v, x)| self.reached[self.offsets[v as usize] + x as usize])
    }
}

/// Static data for strong stubborn sets.
struct Stubborn {
    /// Operators achieving each fact, keyed by `(var, value)`.
    achievers: BTreeMap<Fact, Vec<u32>>,
    /// For each operator, every operator it interferes with.
    interferes: Vec<Vec<u32>>,
}

impl Stubborn {
    fn new(c: &Compiled) -> Stubborn {
        let mut achievers: BTreeMap<Fact, Vec<u32>> = BTreeMap::new();
        for (i, o) in c.ops.iter().enumerate() {
            for &f in &o.post {
                achievers.entry(f).or_default().push(i as u32);
            }
        }
        let get = |fs: &[Fact], v: u32| fs.iter().find(|f| f.0 == v).map(|f| f.1);
        let n = c.ops.len();
        let mut interferes = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                let (oa, ob) = (&c.ops[a], &c.ops[b]);
                // operators that can never be applicable together do not interfere
                let exclusive = oa.pre.iter().any(|&(v, x)| get(&ob.pre, v).is_some_and(|y| y != x));
                if exclusive {
                    continue;
                }
                let disables = |p: &CompiledOp, q: &CompiledOp| p.post.iter().any(|&(v, x)| get(&q.pre, v).is_some_and(|y| y != x));
                let conflict = oa.post.iter().any(|&(v, x)| get(&ob.post, v).is_some_and(|y| y != x));
                if conflict || disables(oa, ob) || disables(ob, oa) {
                    interferes[a].push(b as u32);
                    interferes[b].push(a as u32);
                }
            }
        }
        Stubborn { achievers, interferes }
    }

    /// Applicable operators of a strong stubborn set for non-goal state `s`.
    fn expand(&self, c: &Compiled, s: &[u16], in_set: &mut [bool], out: &mut Vec<u32>) {
        out.clear();
        in_set.iter_mut().for_each(|b| *b = false);
        let mut work: Vec<u32> = Vec::new();
        let add = |ops: &[u32], work: &mut Vec<u32>, in_set: &mut [bool]| {
            for &o in ops {
                if !in_set[o as usize] {
                    in_set[o as usize] = true;
                    work.push(o);
                }
            }
        };
        let unsatisfied_goal = c.goal.iter().find(|&&(v, x)| s[v as usize] != x).expect("state is not a goal state");
        add(self.achievers.get(unsatisfied_goal).map_or(&[], |v| v), &mut work, in_set);
        while let Some(o) = work.pop() {
            let op = &c.ops[o as usize];
            match op.pre.iter().find(|&&(v, x)| s[v as usize] != x) {
                None => {
                    out.push(o);
                    add(&self.interferes[o as usize], &mut work, in_set);
                }
                Some(f) => add(self.achievers.get(f).map_or(&[], |v| v), &mut work, in_set),
            }
        }
        out.sort_unstable();
    }
}

/// Breadth-first search from the initial state over all reachable states.
/// Returns a shortest plan (ties broken by operator name), or proves that the
/// goal is unreachable.
pub fn brute_force_plan(inst: &PlanningInstance, budget: SearchBudget) -> SearchResult {
    brute_force_plan_with(inst, budget, Pruning::None)
}

pub fn brute_force_plan_with(inst: &PlanningInstance, budget: SearchBudget, pruning: Pruning) -> SearchResult {
    let c = Compiled::new(inst);
    let mut stats = SearchStats {
        states_seen: 1,
        states_expanded: 0,
        dead_ends: 0,
    };
    if c.is_goal(&c.init) {
        return SearchResult {
            outcome: PlanOutcome::Solved(Plan::empty()),
            stats,
        };
    }
    let reduced = pruning == Pruning::Reduced;
    let stubborn = reduced.then(|| Stubborn::new(&c));
    let mut relaxed = reduced.then(|| Relaxed::new(inst, &c));
    if let Some(r) = relaxed.as_mut() {
        if !r.goal_reachable(&c, &c.init) {
            return SearchResult {
                outcome: PlanOutcome::Unsolvable,
                stats,
            };
        }
    }
    let mut in_set = vec![false; c.ops.len()];
    let mut candidates: Vec<u32> = (0..c.ops.len() as u32).collect();

    let mut seen: IndexSet<Box<[u16]>, FxBuildHasher> = IndexSet::default();
    let mut parent: Vec<(u32, u32)> = vec![(u32::MAX, u32::MAX)];
    let mut depth: Vec<u32> = vec![0];
    seen.insert(c.init.clone().into_boxed_slice());
    let mut next = c.init.clone();
    let mut i = 0;
    while i < seen.len() {
        if depth[i] as usize >= budget.max_plan_steps {
            i += 1;
            continue;
        }
        stats.states_expanded += 1;
        let s: Box<[u16]> = seen[i].clone();
        if let Some(st) = &stubborn {
            st.expand(&c, &s, &mut in_set, &mut candidates);
        }
        for &o in &candidates {
            let o = o as usize;
            if !c.applicable(o, &s) {
                continue;
            }
            next.copy_from_slice(&s);
            for &(v, x) in &c.ops[o].post {
                next[v as usize] = x;
            }
            if seen.contains(next.as_slice()) {
                continue;
            }
            if let Some(r) = relaxed.as_mut() {
                if !c.is_goal(&next) && !r.goal_reachable(&c, &next) {
                    stats.dead_ends += 1;
                    continue;
                }
            }
            if seen.len() as u64 >= budget.max_states {
                return SearchResult {
                    outcome: PlanOutcome::BudgetExceeded,
                    stats,
                };
            }
            seen.insert(next.clone().into_boxed_slice());
            parent.push((i as u32, o as u32));
            depth.push(depth[i] + 1);
            stats.states_seen += 1;
            if c.is_goal(&next) {
                let mut steps = Vec::new();
                let mut at = seen.len() - 1;
                while at != 0 {
                    let (p, op) = parent[at];
                    steps.push(inst.operators()[c.op_index[op as usize]].name.clone());
                    at = p as usize;
                }
                steps.reverse();
                return SearchResult {
                    outcome: PlanOutcome::Solved(Plan { steps }),
                    stats,
                };
            }
        }
        i += 1;
    }
    let truncated = depth.iter().any(|&d| d as usize >= budget.max_plan_steps);
    SearchResult {
        outcome: if truncated {
            PlanOutcome::BudgetExceeded
        } else {
            PlanOutcome::Unsolvable
        },
        stats,
    }
}

/// One sub-instance per weakly connected component of the causal graph,
/// ordered by least variable name. Each operator goes to the component of
/// the variables it writes.
pub fn decompose(inst: &PlanningInstance) -> Vec<PlanningInstance> {
    let cg = inst.causal_graph();
    let mut comps = cg.weak_components();
    comps.sort_by(|a, b| a.vertices().next().cmp(&b.vertices().next()));
    let mut which: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, comp) in comps.iter().enumerate() {
        for v in comp.vertices() {
            which.insert(v, i);
        }
    }
    let mut ops: Vec<Vec<Operator>> = vec![Vec::new(); comps.len()];
    for op in inst.operators() {
        let home = op.post.vars().next().map_or(0, |v| which[v]);
        if let Some(bucket) = ops.get_mut(home) {
            bucket.push(op.clone());
        }
    }
    comps
        .iter()
        .zip(ops)
        .map(|(comp, ops)| {
            let names: Vec<&str> = comp.vertices().collect();
            let vars = inst
                .variables()
                .iter()
                .filter(|v| comp.has_vertex(&v.name))
                .cloned()
                .collect();
            let init = State::from_partial(inst.init().as_partial().restrict(names.iter().copied()));
            let goal = inst.goal().restrict(names.iter().copied());
            PlanningInstance::new(vars, init, goal, ops).expect("restriction of a valid instance is valid")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub variables: Vec<String>,
    #[serde(flatten)]
    pub result: SearchResult,
    /// Product of the component's domain sizes.
    pub state_space: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentPlanResult {
    #[serde(flatten)]
    pub outcome: PlanOutcome,
    /// Index of the first component that decided the outcome when it is not
    /// `Solved`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_component: Option<usize>,
    pub components: Vec<ComponentReport>,
}

impl ComponentPlanResult {
    /// Names the component that made the planner fail, if any.
    pub fn failure_message(&self) -> Option<String> {
        let i = self.failed_component?;
        let c = &self.components[i];
        let what = match self.outcome {
            PlanOutcome::BudgetExceeded => "search budget exceeded",
            _ => "unsolvable",
        };
        Some(format!(
            "component {i} ({}): {what}",
            c.variables.join(", ")
        ))
    }
}

/// Solves every component by breadth-first search over its own states and
/// concatenates the component plans in component order. With `parallel`,
/// components are searched concurrently; the result is identical.
pub fn component_plan(inst: &PlanningInstance, budget: SearchBudget, parallel: bool) -> ComponentPlanResult {
    let parts = decompose(inst);
    let solve = |p: &PlanningInstance| ComponentReport {
        variables: p.variable_names().map(str::to_string).collect(),
        result: brute_force_plan(p, budget),
        state_space: p.variables().iter().map(|v| v.domain.len() as u128).product(),
    };
    let components: Vec<ComponentReport> = if parallel {
        parts.par_iter().map(solve).collect()
    } else {
        parts.iter().map(solve).collect()
    };
    let unsolvable = components.iter().position(|c| c.result.outcome == PlanOutcome::Unsolvable);
    let exceeded = components.iter().position(|c| c.result.outcome == PlanOutcome::BudgetExceeded);
    let (outcome, failed_component) = match (unsolvable, exceeded) {
        (Some(i), _) => (PlanOutcome::Unsolvable, Some(i)),
        (None, Some(i)) => (PlanOutcome::BudgetExceeded, Some(i)),
        (None, None) => {
            let steps = components
                .iter()
                .flat_map(|c| c.result.outcome.plan().unwrap().steps.iter().cloned())
                .collect();
            (PlanOutcome::Solved(Plan { steps }), None)
        }
    };
    ComponentPlanResult {
        outcome,
        failed_component,
        components,
    }
}
