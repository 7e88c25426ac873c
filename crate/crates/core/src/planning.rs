//! Multi-valued planning instances: states, operators, plan semantics, the
//! causal graph and domain-transition graphs.
//!
//! Values are opaque symbolic tokens. Operators that are not applicable in a
//! state leave it unchanged, so every operator sequence has a well-defined
//! final state; [`PlanningInstance::validate_plan`] reports the steps that
//! were no-ops for callers that want strict semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Digraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanningError {
    #[error("duplicate variable names: {}", .0.join(", "))]
    DuplicateVariables(Vec<String>),
    #[error("duplicate operator names: {}", .0.join(", "))]
    DuplicateOperators(Vec<String>),
    #[error("variable `{variable}` lists value `{value}` more than once")]
    DuplicateValue { variable: String, value: String },
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("{context}: unknown variable `{variable}`")]
    UnknownVariable { context: String, variable: String },
    #[error("{context}: value `{value}` is not in the domain of `{variable}`")]
    OutOfDomain {
        context: String,
        variable: String,
        value: String,
    },
    #[error("initial state does not assign: {}", .0.join(", "))]
    IncompleteInit(Vec<String>),
    #[error("operator `{0}` has an empty postcondition")]
    EmptyPostcondition(String),
    #[error("plan step {index}: unknown operator `{name}`")]
    UnknownOperator { index: usize, name: String },
    #[error("cannot substitute `{to}` for `{from}`: value `{value}` is not in the domain of `{to}`")]
    DomainMismatch {
        from: String,
        to: String,
        value: String,
    },
    #[error("dummy operator `{0}` cannot be serialized")]
    DummyOperator(String),
    #[error("invalid instance JSON: {0}")]
    Json(String),
}

pub type Result<T, E = PlanningError> = std::result::Result<T, E>;

/// A state variable with an ordered finite domain of symbolic values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: impl Into<String>, domain: impl IntoIterator<Item = S>) -> Self {
        Variable {
            name: name.into(),
            domain: domain.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, value: &str) -> bool {
        self.domain.iter().any(|d| d == value)
    }
}

/// A mapping from a subset of the variables to values.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialState(BTreeMap<String, String>);

impl PartialState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn insert(&mut self, var: impl Into<String>, value: impl Into<String>) -> Option<String> {
        self.0.insert(var.into(), value.into())
    }

    pub fn remove(&mut self, var: &str) -> Option<String> {
        self.0.remove(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The variables this partial state is defined on.
    pub fn vars(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Restriction to the variables in `keep`.
    pub fn restrict<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> PartialState {
        let keep: BTreeSet<&str> = keep.into_iter().collect();
        PartialState(
            self.0
                .iter()
                .filter(|(k, _)| keep.contains(k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// True when every assignment of `self` also holds in `other`.
    pub fn holds_in(&self, other: &PartialState) -> bool {
        self.0.iter().all(|(k, v)| other.0.get(k) == Some(v))
    }

    /// Variable substitution `p[from/to]`: the value of `from` moves to `to`;
    /// `from` and any previous binding of `to` become undefined.
    pub fn substituted(&self, from: &str, to: &str) -> PartialState {
        let mut out: BTreeMap<String, String> = self
            .0
            .iter()
            .filter(|(k, _)| k.as_str() != from && k.as_str() != to)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        if let Some(v) = self.0.get(from) {
            out.insert(to.to_string(), v.clone());
        }
        PartialState(out)
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for PartialState {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        PartialState(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

impl fmt::Display for PartialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// A total assignment over an instance's variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(PartialState);

impl State {
    /// Wraps a partial state without checking totality; instance methods check
    /// it where it matters.
    pub fn from_partial(p: PartialState) -> Self {
        State(p)
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var)
    }

    pub fn as_partial(&self) -> &PartialState {
        &self.0
    }

    pub fn into_partial(self) -> PartialState {
        self.0
    }

    pub fn satisfies(&self, p: &PartialState) -> bool {
        p.holds_in(&self.0)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for State {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        State(iter.into_iter().collect())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operator {
    pub name: String,
    pub pre: PartialState,
    pub post: PartialState,
    dummy: bool,
}

impl Operator {
    /// Builds an operator; the postcondition must be non-empty.
    pub fn new(name: impl Into<String>, pre: PartialState, post: PartialState) -> Result<Self> {
        let name = name.into();
        if post.is_empty() {
            return Err(PlanningError::EmptyPostcondition(name));
        }
        Ok(Operator {
            name,
            pre,
            post,
            dummy: false,
        })
    }

    /// Shorthand for building operators from literal pairs.
    pub fn from_pairs(name: impl Into<String>, pre: &[(&str, &str)], post: &[(&str, &str)]) -> Result<Self> {
        Self::new(
            name,
            pre.iter().copied().collect(),
            post.iter().copied().collect(),
        )
    }

    /// The always-applicable operator with no effect. Only exists for
    /// reasoning about plans; instances holding one cannot be serialized.
    pub fn dummy(name: impl Into<String>) -> Self {
        Operator {
            name: name.into(),
            pre: PartialState::new(),
            post: PartialState::new(),
            dummy: true,
        }
    }

    pub fn is_dummy(&self) -> bool {
        self.dummy
    }

    pub fn is_applicable(&self, s: &State) -> bool {
        s.satisfies(&self.pre)
    }

    /// Number of precondition variables that the operator does not write.
    pub fn dependence(&self) -> usize {
        self.pre.vars().filter(|v| !self.post.contains(v)).count()
    }

    /// `a[from/to]`, applied to pre and post independently.
    pub fn substituted(&self, from: &str, to: &str) -> Operator {
        Operator {
            name: self.name.clone(),
            pre: self.pre.substituted(from, to),
            post: self.post.substituted(from, to),
            dummy: self.dummy,
        }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Operator {
        Operator {
            name: name.into(),
            ..self.clone()
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = <{} ; {}>", self.name, self.pre, self.post)
    }
}

/// An operator-name sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Plan {
    pub steps: Vec<String>,
}

impl Plan {
    pub fn new<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Self {
        Plan {
            steps: steps.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Plan::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Newline-separated operator names, one per line, trailing newline.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(s);
            out.push('\n');
        }
        out
    }

    /// Parses the newline-separated format; blank lines are skipped.
    pub fn from_text(text: &str) -> Plan {
        Plan::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        )
    }
}

/// Result of checking a plan against an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanValidation {
    /// The goal holds in the final state.
    pub reaches_goal: bool,
    /// Indices of steps that were inapplicable when reached.
    pub noop_steps: Vec<usize>,
    pub final_state: State,
}

impl PlanValidation {
    pub fn is_solution(&self) -> bool {
        self.reaches_goal
    }

    /// Solution with no inapplicable steps.
    pub fn is_strict_solution(&self) -> bool {
        self.reaches_goal && self.noop_steps.is_empty()
    }
}

/// Maximum precondition size, postcondition size and k-dependence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArityStats {
    pub max_pre: usize,
    pub max_post: usize,
    pub max_dependence: usize,
}

/// `(V, init, goal, A)`. Variables and operators are kept sorted by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningInstance {
    variables: Vec<Variable>,
    init: State,
    goal: PartialState,
    operators: Vec<Operator>,
}

fn duplicates<'a>(names: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut dup = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            dup.insert(n.to_string());
        }
    }
    dup.into_iter().collect()
}

impl PlanningInstance {
    pub fn new(
        mut variables: Vec<Variable>,
        init: State,
        goal: PartialState,
        mut operators: Vec<Operator>,
    ) -> Result<Self> {
        let dup = duplicates(variables.iter().map(|v| v.name.as_str()));
        if !dup.is_empty() {
            return Err(PlanningError::DuplicateVariables(dup));
        }
        let dup = duplicates(operators.iter().map(|o| o.name.as_str()));
        if !dup.is_empty() {
            return Err(PlanningError::DuplicateOperators(dup));
        }
        for v in &variables {
            if v.domain.is_empty() {
                return Err(PlanningError::EmptyDomain(v.name.clone()));
            }
            if let Some(d) = duplicates(v.domain.iter().map(String::as_str)).into_iter().next() {
                return Err(PlanningError::DuplicateValue {
                    variable: v.name.clone(),
                    value: d,
                });
            }
        }
        variables.sort_by(|a, b| a.name.cmp(&b.name));
        operators.sort_by(|a, b| a.name.cmp(&b.name));
        let inst = PlanningInstance {
            variables,
            init,
            goal,
            operators,
        };
        let missing: Vec<String> = inst
            .variables
            .iter()
            .filter(|v| !inst.init.as_partial().contains(&v.name))
            .map(|v| v.name.clone())
            .collect();
        if !missing.is_empty() {
            return Err(PlanningError::IncompleteInit(missing));
        }
        inst.check_partial("init", inst.init.as_partial())?;
        inst.check_partial("goal", &inst.goal)?;
        for op in &inst.operators {
            inst.check_operator(op)?;
        }
        Ok(inst)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables
            .binary_search_by(|v| v.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.variables[i])
    }

    pub fn variable_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal(&self) -> &PartialState {
        &self.goal
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators
            .binary_search_by(|o| o.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.operators[i])
    }

    /// Largest domain size (0 for an instance without variables).
    pub fn max_domain_size(&self) -> usize {
        self.variables.iter().map(|v| v.domain.len()).max().unwrap_or(0)
    }

    pub fn into_parts(self) -> (Vec<Variable>, State, PartialState, Vec<Operator>) {
        (self.variables, self.init, self.goal, self.operators)
    }

    fn check_partial(&self, context: &str, p: &PartialState) -> Result<()> {
        for (var, val) in p.iter() {
            let v = self.variable(var).ok_or_else(|| PlanningError::UnknownVariable {
                context: context.to_string(),
                variable: var.to_string(),
            })?;
            if !v.contains(val) {
                return Err(PlanningError::OutOfDomain {
                    context: context.to_string(),
                    variable: var.to_string(),
                    value: val.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Checks that every condition of `op` is well-typed against the variables.
    pub fn check_operator(&self, op: &Operator) -> Result<()> {
        if op.post.is_empty() && !op.is_dummy() {
            return Err(PlanningError::EmptyPostcondition(op.name.clone()));
        }
        let ctx = format!("operator `{}`", op.name);
        self.check_partial(&ctx, &op.pre)?;
        self.check_partial(&ctx, &op.post)
    }

    /// One step of plan execution: `s[a]`. Inapplicable operators leave the
    /// state unchanged.
    pub fn apply_step(&self, s: &State, a: &Operator) -> Result<State> {
        self.check_operator(a)?;
        Ok(apply_unchecked(s, a))
    }

    fn resolve(&self, plan: &Plan) -> Result<Vec<&Operator>> {
        plan.steps
            .iter()
            .enumerate()
            .map(|(index, name)| {
                self.operator(name).ok_or_else(|| PlanningError::UnknownOperator {
                    index,
                    name: name.clone(),
                })
            })
            .collect()
    }

    /// `s[P]`, the left fold of [`apply_step`](Self::apply_step).
    pub fn apply_plan(&self, s: &State, plan: &Plan) -> Result<State> {
        let ops = self.resolve(plan)?;
        Ok(ops.into_iter().fold(s.clone(), |acc, a| apply_unchecked(&acc, a)))
    }

    /// Executes `plan` from the initial state and reports goal satisfaction
    /// together with the inapplicable steps.
    pub fn validate_plan(&self, plan: &Plan) -> Result<PlanValidation> {
        let ops = self.resolve(plan)?;
        let mut s = self.init.clone();
        let mut noop_steps = Vec::new();
        for (i, a) in ops.into_iter().enumerate() {
            if a.is_applicable(&s) {
                s = apply_unchecked(&s, a);
            } else {
                noop_steps.push(i);
            }
        }
        Ok(PlanValidation {
            reaches_goal: s.satisfies(&self.goal),
            noop_steps,
            final_state: s,
        })
    }

    pub fn is_solution(&self, plan: &Plan) -> Result<bool> {
        Ok(self.validate_plan(plan)?.is_solution())
    }

    pub fn is_strict_solution(&self, plan: &Plan) -> Result<bool> {
        Ok(self.validate_plan(plan)?.is_strict_solution())
    }

    pub fn is_goal_state(&self, s: &State) -> bool {
        s.satisfies(&self.goal)
    }

    /// The causal graph: an edge `(u, v)` for distinct `u, v` whenever some
    /// operator writes `v` and reads or writes `u`.
    pub fn causal_graph(&self) -> Digraph {
        let mut g = Digraph::new();
        for v in &self.variables {
            g.add_vertex(&v.name);
        }
        for op in &self.operators {
            for v in op.post.vars() {
                for u in op.pre.vars().chain(op.post.vars()) {
                    if u != v {
                        g.add_edge(u, v);
                    }
                }
            }
        }
        g
    }

    /// Domain-transition graph of `var` over its values.
    pub fn dtg(&self, var: &str) -> Result<Digraph> {
        let v = self.variable(var).ok_or_else(|| PlanningError::UnknownVariable {
            context: "dtg".to_string(),
            variable: var.to_string(),
        })?;
        let mut g = Digraph::new();
        for d in &v.domain {
            g.add_vertex(d);
        }
        for op in &self.operators {
            let Some(y) = op.post.get(var) else { continue };
            match op.pre.get(var) {
                Some(x) if x != y => g.add_edge(x, y),
                Some(_) => {}
                None => {
                    for x in v.domain.iter().filter(|x| x.as_str() != y) {
                        g.add_edge(x, y);
                    }
                }
            }
        }
        Ok(g)
    }

    /// `p[from/to]` checked against the instance: `to` must accept the value
    /// `p` assigns to `from`.
    pub fn substitute_partial(&self, p: &PartialState, from: &str, to: &str) -> Result<PartialState> {
        if let Some(val) = p.get(from) {
            let target = self.variable(to).ok_or_else(|| PlanningError::UnknownVariable {
                context: "substitution".to_string(),
                variable: to.to_string(),
            })?;
            if !target.contains(val) {
                return Err(PlanningError::DomainMismatch {
                    from: from.to_string(),
                    to: to.to_string(),
                    value: val.to_string(),
                });
            }
        }
        Ok(p.substituted(from, to))
    }

    pub fn substitute_operator(&self, op: &Operator, from: &str, to: &str) -> Result<Operator> {
        Ok(Operator {
            name: op.name.clone(),
            pre: self.substitute_partial(&op.pre, from, to)?,
            post: self.substitute_partial(&op.post, from, to)?,
            dummy: op.dummy,
        })
    }

    pub fn arity_stats(&self) -> ArityStats {
        arity_stats(self.operators.iter())
    }

    /// Renames variables simultaneously; names missing from `map` are kept.
    pub fn rename_variables(&self, map: &BTreeMap<String, String>) -> Result<PlanningInstance> {
        let rn = |n: &str| map.get(n).cloned().unwrap_or_else(|| n.to_string());
        let rename_partial =
            |p: &PartialState| -> PartialState { p.iter().map(|(k, v)| (rn(k), v.to_string())).collect() };
        let variables = self
            .variables
            .iter()
            .map(|v| Variable {
                name: rn(&v.name),
                domain: v.domain.clone(),
            })
            .collect();
        let operators = self
            .operators
            .iter()
            .map(|o| Operator {
                name: o.name.clone(),
                pre: rename_partial(&o.pre),
                post: rename_partial(&o.post),
                dummy: o.dummy,
            })
            .collect();
        PlanningInstance::new(
            variables,
            State(rename_partial(self.init.as_partial())),
            rename_partial(&self.goal),
            operators,
        )
    }

    /// Canonical JSON: variables and operators ordered by name, map keys sorted.
    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDoc::from_instance(self)?;
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| PlanningError::Json(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| PlanningError::Json(e.to_string()))?;
        doc.into_instance()
    }
}

fn apply_unchecked(s: &State, a: &Operator) -> State {
    if !a.is_applicable(s) {
        return s.clone();
    }
    let mut next = s.clone();
    for (k, v) in a.post.iter() {
        next.0.insert(k, v);
    }
    next
}

pub fn arity_stats<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> ArityStats {
    ops.into_iter().fold(ArityStats::default(), |acc, o| ArityStats {
        max_pre: acc.max_pre.max(o.pre.len()),
        max_post: acc.max_post.max(o.post.len()),
        max_dependence: acc.max_dependence.max(o.dependence()),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    variables: Vec<Variable>,
    init: BTreeMap<String, String>,
    goal: BTreeMap<String, String>,
    operators: Vec<OperatorDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OperatorDoc {
    name: String,
    #[serde(default)]
    pre: BTreeMap<String, String>,
    post: BTreeMap<String, String>,
}

impl InstanceDoc {
    fn from_instance(inst: &PlanningInstance) -> Result<Self> {
        let operators = inst
            .operators
            .iter()
            .map(|o| {
                if o.is_dummy() {
                    return Err(PlanningError::DummyOperator(o.name.clone()));
                }
                Ok(OperatorDoc {
                    name: o.name.clone(),
                    pre: o.pre.as_map().clone(),
                    post: o.post.as_map().clone(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(InstanceDoc {
            variables: inst.variables.clone(),
            init: inst.init.as_partial().as_map().clone(),
            goal: inst.goal.as_map().clone(),
            operators,
        })
    }

    fn into_instance(self) -> Result<PlanningInstance> {
        let operators = self
            .operators
            .into_iter()
            .map(|o| Operator::new(o.name, o.pre.into_iter().collect(), o.post.into_iter().collect()))
            .collect::<Result<_>>()?;
        PlanningInstance::new(
            self.variables,
            State(self.init.into_iter().collect()),
            self.goal.into_iter().collect(),
            operators,
        )
    }
}
