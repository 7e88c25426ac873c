//! 3SAT formulas, DIMACS I/O, an exhaustive SAT oracle, and the three
//! reductions from 3SAT to planning whose causal graphs are an in-star, an
//! out-star and a fence.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::planning::{ArityStats, Operator, PartialState, PlanningError, PlanningInstance, State, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("clause {clause} has {len} literals; exactly 3 are required")]
    Arity { clause: usize, len: usize },
    #[error("literal {literal} refers to a variable outside 1..={num_vars}")]
    OutOfRange { literal: i64, num_vars: usize },
    #[error("{num_vars} variables exceed the exhaustive oracle cap of {cap}")]
    CapExceeded { num_vars: usize, cap: usize },
    #[error("variables {0:?} occur in no clause")]
    UnusedVariables(Vec<usize>),
    #[error("{0}")]
    Degenerate(String),
    #[error(transparent)]
    Planning(#[from] PlanningError),
}

pub type Result<T, E = SatError> = std::result::Result<T, E>;

/// A literal: variable index (1-based) with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(i32);

impl Literal {
    pub fn new(var: usize, positive: bool) -> Literal {
        assert!(var >= 1, "literal variables are 1-based");
        let v = i32::try_from(var).expect("variable index fits in i32");
        Literal(if positive { v } else { -v })
    }

    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_i32(self) -> i32 {
        self.0
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var() - 1] == self.is_positive()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Clause = [Literal; 3];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<CnfFormula> {
        for c in &clauses {
            for l in c {
                if l.var() > num_vars {
                    return Err(SatError::OutOfRange {
                        literal: l.0 as i64,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Builds a formula from signed integers, DIMACS style.
    pub fn from_ints(num_vars: usize, clauses: &[[i32; 3]]) -> Result<CnfFormula> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut lits = [Literal(1); 3];
            for (slot, &x) in lits.iter_mut().zip(c) {
                if x == 0 {
                    return Err(SatError::OutOfRange { literal: 0, num_vars });
                }
                *slot = Literal(x);
            }
            out.push(lits);
        }
        CnfFormula::new(num_vars, out)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Variables (1-based) that occur in no clause.
    pub fn unused_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_vars + 1];
        for l in self.clauses.iter().flatten() {
            used[l.var()] = true;
        }
        (1..=self.num_vars).filter(|&v| !used[v]).collect()
    }

    /// The same clauses over the occurring variables only, renumbered in
    /// increasing order. Satisfiability is unchanged.
    pub fn compacted(&self) -> CnfFormula {
        let unused = self.unused_vars();
        let mut map = vec![0; self.num_vars + 1];
        let mut next = 0;
        for (v, slot) in map.iter_mut().enumerate().skip(1) {
            if !unused.contains(&v) {
                next += 1;
                *slot = next;
            }
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| c.map(|l| Literal::new(map[l.var()], l.is_positive())))
            .collect();
        CnfFormula {
            num_vars: next,
            clauses,
        }
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut pending: Vec<(i64, usize)> = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line_no = no + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t == "%" {
                continue;
            }
            if t.starts_with('p') {
                let parts: Vec<&str> = t.split_whitespace().collect();
                let bad = || SatError::Parse {
                    line: line_no,
                    message: format!("malformed header `{t}`"),
                };
                if header.is_some() || parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                    return Err(bad());
                }
                let n = parts[2].parse().map_err(|_| bad())?;
                let m = parts[3].parse().map_err(|_| bad())?;
                header = Some((n, m));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(SatError::Parse {
                    line: line_no,
                    message: "clause before `p cnf` header".into(),
                });
            };
            for tok in t.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| SatError::Parse {
                    line: line_no,
                    message: format!("bad literal `{tok}`"),
                })?;
                if x == 0 {
                    if pending.len() != 3 {
                        return Err(SatError::Arity {
                            clause: clauses.len() + 1,
                            len: pending.len(),
                        });
                    }
                    let c = [0, 1, 2].map(|i| Literal(pending[i].0 as i32));
                    clauses.push(c);
                    pending.clear();
                } else {
                    if x.unsigned_abs() as usize > n {
                        return Err(SatError::OutOfRange { literal: x, num_vars: n });
                    }
                    pending.push((x, line_no));
                }
            }
        }
        let Some((n, m)) = header else {
            return Err(SatError::Parse {
                line: text.lines().count().max(1),
                message: "missing `p cnf` header".into(),
            });
        };
        if let Some(&(_, line)) = pending.first() {
            return Err(SatError::Parse {
                line,
                message: "last clause is not terminated by 0".into(),
            });
        }
        if clauses.len() != m {
            return Err(SatError::Parse {
                line: text.lines().count().max(1),
                message: format!("header declares {m} clauses, found {}", clauses.len()),
            });
        }
        CnfFormula::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }
}

pub const SAT_ORACLE_CAP: usize = 24;

/// Exhaustive satisfiability check over all `2^n` assignments. Returns a
/// satisfying assignment (index `i` holds variable `i + 1`) when one exists.
pub fn brute_force_sat(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    brute_force_sat_capped(f, SAT_ORACLE_CAP)
}

pub fn brute_force_sat_capped(f: &CnfFormula, cap: usize) -> Result<Option<Vec<bool>>> {
    let n = f.num_vars;
    if n > cap {
        return Err(SatError::CapExceeded { num_vars: n, cap });
    }
    let masks: Vec<[(u32, u32); 3]> = f
        .clauses
        .iter()
        .map(|c| c.map(|l| (1u32 << (l.var() - 1), if l.is_positive() { 1 << (l.var() - 1) } else { 0 })))
        .collect();
    for bits in 0u32..(1u32 << n) {
        let ok = masks.iter().all(|c| c.iter().any(|&(bit, want)| bits & bit == want));
        if ok {
            return Ok(Some((0..n).map(|i| bits >> i & 1 == 1).collect()));
        }
    }
    Ok(None)
}

/// Which sources of the full fence `u_0 .. u_m` a fence gadget keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FenceShape {
    /// All of `u_0 .. u_m`: `m + 1` sources.
    Full,
    /// Drops `u_m`: `m` sources.
    DropLast,
    /// Drops `u_0` and `u_m`: `m - 1` sources.
    DropBoth,
}

impl FenceShape {
    /// Source count minus sink count.
    pub fn offset(self) -> i8 {
        match self {
            FenceShape::Full => 1,
            FenceShape::DropLast => 0,
            FenceShape::DropBoth => -1,
        }
    }

    pub fn from_offset(c: i8) -> Option<FenceShape> {
        match c {
            1 => Some(FenceShape::Full),
            0 => Some(FenceShape::DropLast),
            -1 => Some(FenceShape::DropBoth),
            _ => None,
        }
    }
}

/// How each clause variable synchronizes with its two neighbouring sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FenceVariant {
    /// One operator reading both neighbours at once (3 preconditions).
    Base3,
    /// Two operators through an intermediate value, reading one neighbour
    /// each (2 preconditions).
    Split2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    InStar,
    OutStar,
    Fence,
    Chain,
}

/// Sidecar record describing a generated gadget instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetMeta {
    pub kind: GadgetKind,
    pub n: usize,
    pub m: usize,
    /// Declared causal-graph shape, e.g. `S_3^in` or `F_2^+1`.
    pub shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<FenceVariant>,
    /// Upper bounds on (preconditions, postconditions) per operator.
    pub arity_bound: (usize, usize),
    pub arity: ArityStats,
}

fn var(name: impl Into<String>, domain: impl IntoIterator<Item = String>) -> Variable {
    Variable::new(name, domain)
}

fn op(name: String, pre: &[(&str, &str)], post: &[(&str, &str)]) -> Operator {
    Operator::from_pairs(name, pre, post).expect("gadget operators have non-empty postconditions")
}

fn build(vars: Vec<Variable>, init: &[(String, String)], goal: &[(String, String)], ops: Vec<Operator>) -> Result<PlanningInstance> {
    let init: PartialState = init.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let goal: PartialState = goal.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(PlanningInstance::new(vars, State::from_partial(init), goal, ops)?)
}

pub fn in_star_var(i: usize) -> String {
    format!("v_{i}")
}

pub const CENTRE_VAR: &str = "v_c";

/// In-star reduction: one committed-once source per formula variable and a
/// centre that counts satisfied clauses in order.
pub fn gadget_in_star(f: &CnfFormula) -> Result<PlanningInstance> {
    let unused = f.unused_vars();
    if !unused.is_empty() {
        return Err(SatError::UnusedVariables(unused));
    }
    let (n, m) = (f.num_vars, f.clauses.len());
    let mut vars = vec![var(CENTRE_VAR, (0..=m).map(|i| i.to_string()))];
    let mut init = vec![(CENTRE_VAR.to_string(), "0".to_string())];
    let mut ops = Vec::new();
    for i in 1..=n {
        let v = in_star_var(i);
        vars.push(var(&v, ["u", "f", "t"].map(String::from)));
        init.push((v.clone(), "u".into()));
        ops.push(op(format!("set-f({i})"), &[(&v, "u")], &[(&v, "f")]));
        ops.push(op(format!("set-t({i})"), &[(&v, "u")], &[(&v, "t")]));
    }
    for (ci, c) in f.clauses.iter().enumerate() {
        let i = ci + 1;
        let (from, to) = ((i - 1).to_string(), i.to_string());
        for (lj, l) in c.iter().enumerate() {
            let j = lj + 1;
            let vk = in_star_var(l.var());
            let (name, want) = if l.is_positive() {
                (format!("verify-clause-pos({i},{j})"), "t")
            } else {
                (format!("verify-clause-neg({i},{j})"), "f")
            };
            ops.push(op(name, &[(CENTRE_VAR, &from), (&vk, want)], &[(CENTRE_VAR, &to)]));
        }
    }
    build(vars, &init, &[(CENTRE_VAR.into(), m.to_string())], ops)
}

pub fn in_star_meta(f: &CnfFormula, inst: &PlanningInstance) -> GadgetMeta {
    GadgetMeta {
        kind: GadgetKind::InStar,
        n: f.num_vars,
        m: f.num_clauses(),
        shape: format!("S_{}^in", f.num_vars),
        variant: None,
        arity_bound: (2, 1),
        arity: inst.arity_stats(),
    }
}

/// `f0 .. fn, t0 .. tn`: the values of a variable that walks one truth
/// assignment, level by level.
fn chain_domain(n: usize, suffix: &str) -> Vec<String> {
    let mut d: Vec<String> = (0..=n).map(|i| format!("f{i}{suffix}")).collect();
    d.extend((0..=n).map(|i| format!("t{i}{suffix}")));
    d
}

/// The four level steps `(f|t)_{i-1} -> (f|t)_i` as `(from, to)` tokens.
fn level_steps(i: usize, suffix: &str) -> [(String, String); 4] {
    let p = i - 1;
    [
        (format!("f{p}{suffix}"), format!("f{i}{suffix}")),
        (format!("f{p}{suffix}"), format!("t{i}{suffix}")),
        (format!("t{p}{suffix}"), format!("f{i}{suffix}")),
        (format!("t{p}{suffix}"), format!("t{i}{suffix}")),
    ]
}

pub fn out_star_sink(i: usize) -> String {
    format!("v_{i}")
}

/// Out-star reduction: the centre walks a truth assignment, one sink per
/// clause becomes satisfied when the centre passes a matching literal.
pub fn gadget_out_star(f: &CnfFormula) -> Result<PlanningInstance> {
    let (n, m) = (f.num_vars, f.clauses.len());
    if m == 0 {
        return Err(SatError::Degenerate("out-star gadget needs at least one clause".into()));
    }
    let mut vars = vec![var(CENTRE_VAR, chain_domain(n, ""))];
    let mut init = vec![(CENTRE_VAR.to_string(), "f0".to_string())];
    let mut goal = Vec::new();
    let mut ops = Vec::new();
    for i in 1..=n {
        for (a, b) in level_steps(i, "") {
            ops.push(op(format!("step-c({a},{b})"), &[(CENTRE_VAR, &a)], &[(CENTRE_VAR, &b)]));
        }
    }
    for (ci, c) in f.clauses.iter().enumerate() {
        let i = ci + 1;
        let vi = out_star_sink(i);
        vars.push(var(&vi, ["u", "s"].map(String::from)));
        init.push((vi.clone(), "u".into()));
        goal.push((vi.clone(), "s".into()));
        for (lj, l) in c.iter().enumerate() {
            let j = lj + 1;
            let k = l.var();
            let (name, want) = if l.is_positive() {
                (format!("verify-clause-pos({i},{j})"), format!("t{k}"))
            } else {
                (format!("verify-clause-neg({i},{j})"), format!("f{k}"))
            };
            ops.push(op(name, &[(CENTRE_VAR, &want)], &[(&vi, "s")]));
        }
    }
    build(vars, &init, &goal, ops)
}

pub fn out_star_meta(f: &CnfFormula, inst: &PlanningInstance) -> GadgetMeta {
    GadgetMeta {
        kind: GadgetKind::OutStar,
        n: f.num_vars,
        m: f.num_clauses(),
        shape: format!("S_{}^out", f.num_clauses()),
        variant: None,
        arity_bound: (1, 1),
        arity: inst.arity_stats(),
    }
}

pub fn fence_source(j: usize) -> String {
    format!("u_{j}")
}

pub fn fence_sink(j: usize) -> String {
    format!("v_{j}")
}

/// Fence reduction: every source walks a truth assignment, each clause
/// variable mirrors its two neighbouring sources (forcing them onto the same
/// walk) and switches from its `u` copy to its `s` copy on a satisfied
/// literal.
pub fn gadget_fence(f: &CnfFormula, shape: FenceShape, variant: FenceVariant) -> Result<PlanningInstance> {
    let (n, m) = (f.num_vars, f.clauses.len());
    if m == 0 || n == 0 {
        return Err(SatError::Degenerate("fence gadget needs at least one variable and one clause".into()));
    }
    let first = if shape == FenceShape::DropBoth { 1 } else { 0 };
    let last = if shape == FenceShape::Full { m } else { m - 1 };
    let has_source = |j: usize| (first..=last).contains(&j);

    let mut vars = Vec::new();
    let mut init = Vec::new();
    let mut goal = Vec::new();
    let mut ops = Vec::new();
    for j in first..=last {
        let uj = fence_source(j);
        vars.push(var(&uj, chain_domain(n, "")));
        init.push((uj.clone(), "f0".to_string()));
        for i in 1..=n {
            for (a, b) in level_steps(i, "") {
                ops.push(op(format!("step-x({j},{a},{b})"), &[(&uj, &a)], &[(&uj, &b)]));
            }
        }
    }
    for (cj, clause) in f.clauses.iter().enumerate() {
        let j = cj + 1;
        let vj = fence_sink(j);
        let mut domain = chain_domain(n, "^u");
        domain.extend(chain_domain(n, "^s"));
        domain.push("s".into());
        let left = has_source(j - 1).then(|| fence_source(j - 1));
        let right = has_source(j).then(|| fence_source(j));
        for copy in ["u", "s"] {
            let suffix = format!("^{copy}");
            for i in 1..=n {
                for (a, b) in level_steps(i, &suffix) {
                    // the source value this step mirrors: `b` without the copy marker
                    let z = &b[..b.len() - suffix.len()];
                    let base = format!("step-clause-{copy}({j},{a},{b})");
                    let split = variant == FenceVariant::Split2 && left.is_some() && right.is_some();
                    if split {
                        let (l, r) = (left.as_deref().unwrap(), right.as_deref().unwrap());
                        let mid = format!("{}{}{i}{suffix}", &a[..1], &b[..1]);
                        domain.push(mid.clone());
                        ops.push(op(
                            format!("step-clause-{copy}({j},{a},{mid})"),
                            &[(&vj, &a), (l, z)],
                            &[(&vj, &mid)],
                        ));
                        ops.push(op(
                            format!("step-clause-{copy}({j},{mid},{b})"),
                            &[(&vj, &mid), (r, z)],
                            &[(&vj, &b)],
                        ));
                    } else {
                        let mut pre = vec![(vj.as_str(), a.as_str())];
                        for s in [&left, &right].into_iter().flatten() {
                            pre.push((s.as_str(), z));
                        }
                        ops.push(op(base, &pre, &[(&vj, &b)]));
                    }
                }
            }
        }
        for (lj, l) in clause.iter().enumerate() {
            let k = l.var();
            let (name, z) = if l.is_positive() {
                (format!("verify-pos({j},{})", lj + 1), "t")
            } else {
                (format!("verify-neg({j},{})", lj + 1), "f")
            };
            ops.push(op(name, &[(&vj, &format!("{z}{k}^u"))], &[(&vj, &format!("{z}{k}^s"))]));
        }
        ops.push(op(format!("finalize-clause-f({j})"), &[(&vj, &format!("f{n}^s"))], &[(&vj, "s")]));
        ops.push(op(format!("finalize-clause-t({j})"), &[(&vj, &format!("t{n}^s"))], &[(&vj, "s")]));
        vars.push(var(&vj, domain));
        init.push((vj.clone(), "f0^u".into()));
        goal.push((vj, "s".into()));
    }
    build(vars, &init, &goal, ops)
}

pub fn fence_meta(f: &CnfFormula, shape: FenceShape, variant: FenceVariant, inst: &PlanningInstance) -> GadgetMeta {
    let c = shape.offset();
    GadgetMeta {
        kind: GadgetKind::Fence,
        n: f.num_vars,
        m: f.num_clauses(),
        shape: format!("F_{}^{}{}", f.num_clauses(), if c > 0 { "+" } else { "" }, c),
        variant: Some(variant),
        arity_bound: match variant {
            FenceVariant::Base3 => (3, 1),
            FenceVariant::Split2 => (2, 1),
        },
        arity: inst.arity_stats(),
    }
}

pub fn chain_var(i: usize) -> String {
    format!("x_{i}")
}

/// `len` binary variables in a line; `flip(i)` sets `x_i` once `x_{i-1}` is
/// set. The goal is the last variable.
pub fn chain_instance(len: usize) -> Result<PlanningInstance> {
    if len == 0 {
        return Err(SatError::Degenerate("chain needs at least one variable".into()));
    }
    let mut vars = Vec::new();
    let mut init = Vec::new();
    let mut ops = Vec::new();
    for i in 1..=len {
        let x = chain_var(i);
        vars.push(var(&x, ["0", "1"].map(String::from)));
        init.push((x.clone(), "0".to_string()));
        let prev = chain_var(i.max(2) - 1);
        let pre: Vec<(&str, &str)> = if i == 1 { vec![] } else { vec![(prev.as_str(), "1")] };
        ops.push(op(format!("flip({i})"), &pre, &[(&x, "1")]));
    }
    build(vars, &init, &[(chain_var(len), "1".into())], ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unsat_pair() -> CnfFormula {
        CnfFormula::from_ints(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap()
    }

    #[test]
    fn dimacs_round_trip() {
        let f = CnfFormula::parse_dimacs("c hi\np cnf 3 1\n1 2 -3 0\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.clauses()[0].map(|l| l.to_i32()), [1, 2, -3]);
        assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        let g = CnfFormula::parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
        assert_eq!(g, unsat_pair());
        // clauses may span lines
        let h = CnfFormula::parse_dimacs("p cnf 3 1\n1 2\n-3 0\n").unwrap();
        assert_eq!(h.num_clauses(), 1);
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2 0\n"),
            Err(SatError::Arity { clause: 1, len: 2 })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2 3 0\n"),
            Err(SatError::OutOfRange { literal: 3, .. })
        ));
        assert!(matches!(CnfFormula::parse_dimacs("p dnf 2 1\n"), Err(SatError::Parse { line: 1, .. })));
        assert!(matches!(CnfFormula::parse_dimacs("1 2 3 0\n"), Err(SatError::Parse { .. })));
        assert!(matches!(CnfFormula::parse_dimacs("p cnf 3 2\n1 2 3 0\n"), Err(SatError::Parse { .. })));
    }

    #[test]
    fn oracle() {
        let f = CnfFormula::from_ints(3, &[[1, 2, -3]]).unwrap();
        let w = brute_force_sat(&f).unwrap().unwrap();
        assert!(f.is_satisfied_by(&w));
        assert_eq!(brute_force_sat(&unsat_pair()).unwrap(), None);
        let empty = CnfFormula::new(0, vec![]).unwrap();
        assert_eq!(brute_force_sat(&empty).unwrap(), Some(vec![]));
        let big = CnfFormula::new(25, vec![]).unwrap();
        assert!(matches!(brute_force_sat(&big), Err(SatError::CapExceeded { .. })));
    }

    #[test]
    fn in_star_sizes() {
        let f = CnfFormula::from_ints(3, &[[1, 2, -3]]).unwrap();
        let p = gadget_in_star(&f).unwrap();
        assert_eq!(p.variables().len(), 4);
        assert_eq!(p.operators().len(), 9);
        let a = p.arity_stats();
        assert_eq!((a.max_pre, a.max_post, a.max_dependence), (2, 1, 1));
        let unused = CnfFormula::from_ints(2, &[[1, 1, 1]]).unwrap();
        assert_eq!(gadget_in_star(&unused), Err(SatError::UnusedVariables(vec![2])));
        let empty = gadget_in_star(&CnfFormula::new(0, vec![]).unwrap()).unwrap();
        assert_eq!(empty.variables().len(), 1);
        assert!(empty.is_goal_state(empty.init()));
    }

    #[test]
    fn out_star_sizes() {
        let f = CnfFormula::from_ints(3, &[[1, 2, -3]]).unwrap();
        let p = gadget_out_star(&f).unwrap();
        assert_eq!(p.variable(CENTRE_VAR).unwrap().domain.len(), 8);
        assert_eq!(p.operators().len(), 12 + 3);
        let a = p.arity_stats();
        assert_eq!((a.max_pre, a.max_post), (1, 1));
        assert!(gadget_out_star(&CnfFormula::new(2, vec![]).unwrap()).is_err());
    }

    #[test]
    fn fence_sizes() {
        let f = CnfFormula::from_ints(3, &[[1, 2, -3], [-1, 2, 3]]).unwrap();
        let p = gadget_fence(&f, FenceShape::Full, FenceVariant::Base3).unwrap();
        assert_eq!(p.variables().len(), 5);
        assert_eq!(p.variable("u_0").unwrap().domain.len(), 8);
        assert_eq!(p.variable("v_1").unwrap().domain.len(), 17);
        let a = p.arity_stats();
        assert_eq!((a.max_pre, a.max_post, a.max_dependence), (3, 1, 2));
        let q = gadget_fence(&f, FenceShape::Full, FenceVariant::Split2).unwrap();
        let a = q.arity_stats();
        assert_eq!((a.max_pre, a.max_post, a.max_dependence), (2, 1, 1));
        assert_eq!(q.variable("v_1").unwrap().domain.len(), 17 + 8 * 3);
        let d = gadget_fence(&f, FenceShape::DropBoth, FenceVariant::Base3).unwrap();
        assert_eq!(d.variables().len(), 3);
        assert!(d.variable("u_0").is_none() && d.variable("u_2").is_none());
    }

    #[test]
    fn chain() {
        let c = chain_instance(3).unwrap();
        assert_eq!(c.operators().len(), 3);
        let plan = crate::planning::Plan::new(["flip(1)", "flip(2)", "flip(3)"]);
        assert!(c.is_strict_solution(&plan).unwrap());
        assert!(chain_instance(0).is_err());
    }

    #[test]
    fn compaction() {
        let f = CnfFormula::from_ints(4, &[[2, -4, 2]]).unwrap();
        let c = f.compacted();
        assert_eq!(c.num_vars(), 2);
        assert_eq!(c.clauses()[0].map(|l| l.to_i32()), [1, -2, 1]);
    }
}
