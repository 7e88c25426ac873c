mod common;

use std::collections::BTreeMap;

use causal_forge::sat::{gadget_in_star, gadget_out_star, CnfFormula};
use causal_forge::solver::{brute_force_plan, Pruning};
use causal_forge::{Operator, PartialState, Plan, PlanningError, PlanningInstance, SearchBudget, State, Variable};
use proptest::prelude::*;
use rand::Rng;

fn xyz() -> PlanningInstance {
    let vars = ["x", "y", "z"].map(|v| Variable::new(v, ["0", "1"])).to_vec();
    let init = State::from_partial([("x", "0"), ("y", "1"), ("z", "0")].into_iter().collect());
    let a = Operator::from_pairs("a", &[("x", "0"), ("y", "1")], &[("z", "1")]).unwrap();
    let b = Operator::from_pairs("b", &[], &[("x", "1")]).unwrap();
    PlanningInstance::new(vars, init, [("z", "1")].into_iter().collect(), vec![a, b]).unwrap()
}

fn state(pairs: &[(&str, &str)]) -> State {
    State::from_partial(pairs.iter().copied().collect())
}

#[test]
fn applicable_step_sets_its_postcondition() {
    let p = xyz();
    let a = p.operator("a").unwrap();
    let s = p.apply_step(&state(&[("x", "0"), ("y", "1"), ("z", "0")]), a).unwrap();
    assert_eq!(s, state(&[("x", "0"), ("y", "1"), ("z", "1")]));
}

#[test]
fn inapplicable_step_is_a_noop() {
    let p = xyz();
    let a = p.operator("a").unwrap();
    let s = state(&[("x", "1"), ("y", "1"), ("z", "0")]);
    assert_eq!(p.apply_step(&s, a).unwrap(), s);
}

#[test]
fn empty_precondition_always_applies() {
    let p = xyz();
    let b = p.operator("b").unwrap();
    for x in ["0", "1"] {
        let s = state(&[("x", x), ("y", "0"), ("z", "0")]);
        assert_eq!(p.apply_step(&s, b).unwrap().get("x"), Some("1"));
    }
}

#[test]
fn malformed_operator_is_rejected() {
    let p = xyz();
    let bad = Operator::from_pairs("bad", &[], &[("q", "1")]).unwrap();
    assert!(matches!(p.apply_step(p.init(), &bad), Err(PlanningError::UnknownVariable { .. })));
    let bad = Operator::from_pairs("bad", &[], &[("x", "7")]).unwrap();
    assert!(matches!(p.apply_step(p.init(), &bad), Err(PlanningError::OutOfDomain { .. })));
}

#[test]
fn empty_plan_and_unknown_steps() {
    let p = xyz();
    assert_eq!(p.apply_plan(p.init(), &Plan::empty()).unwrap(), *p.init());
    assert!(matches!(p.apply_plan(p.init(), &Plan::new(["nope"])), Err(PlanningError::UnknownOperator { index: 0, .. })));
}

#[test]
fn strict_validation_reports_noop_steps() {
    let p = xyz();
    let plan = Plan::new(["a", "a", "b", "a"]);
    let v = p.validate_plan(&plan).unwrap();
    assert!(v.reaches_goal);
    assert_eq!(v.noop_steps, vec![3]);
    assert!(p.is_solution(&plan).unwrap());
    assert!(!p.is_strict_solution(&plan).unwrap());
    assert!(p.is_strict_solution(&Plan::new(["a"])).unwrap());
}

#[test]
fn goal_already_holding_accepts_the_empty_plan() {
    let p = xyz();
    let (vars, init, _, ops) = p.into_parts();
    let goal = init.as_partial().clone();
    let q = PlanningInstance::new(vars, init, goal, ops).unwrap();
    assert!(q.is_solution(&Plan::empty()).unwrap());
}

#[test]
fn in_star_gadget_hand_stepped() {
    let f = CnfFormula::from_ints(3, &[[1, 2, -3]]).unwrap();
    let g = gadget_in_star(&f).unwrap();
    let s = g.apply_plan(g.init(), &Plan::new(["set-t(1)", "verify-clause-pos(1,1)"])).unwrap();
    assert_eq!(s.get("v_c"), Some("1"));
    assert!(g.is_solution(&Plan::new(["set-t(1)", "verify-clause-pos(1,1)"])).unwrap());
    let found = brute_force_plan(&g, SearchBudget::default());
    assert_eq!(found.outcome.plan().map(Plan::len), Some(2));
}

#[test]
fn contradictory_in_star_gadget_has_no_plan() {
    let f = CnfFormula::from_ints(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
    let g = gadget_in_star(&f).unwrap();
    assert_eq!(brute_force_plan(&g, SearchBudget::default()).outcome.solvable(), Some(false));
}

#[test]
fn unary_self_operator_gives_edgeless_graph() {
    let p = PlanningInstance::new(
        vec![Variable::new("x", ["0", "1"])],
        state(&[("x", "0")]),
        PartialState::new(),
        vec![Operator::from_pairs("o", &[("x", "0")], &[("x", "1")]).unwrap()],
    )
    .unwrap();
    let cg = p.causal_graph();
    assert_eq!((cg.vertex_count(), cg.edge_count()), (1, 0));
}

#[test]
fn gadget_dtgs() {
    let f = CnfFormula::from_ints(2, &[[1, 2, 2], [-1, -2, -2]]).unwrap();
    let g = gadget_in_star(&f).unwrap();
    let d = g.dtg("v_1").unwrap();
    let edges: Vec<(&str, &str)> = d.edges().collect();
    assert_eq!(edges, vec![("u", "f"), ("u", "t")]);

    let o = gadget_out_star(&f).unwrap();
    let d = o.dtg("v_c").unwrap();
    // layered: every edge goes from layer i-1 to layer i
    let layer = |x: &str| x[1..].split('^').next().unwrap().parse::<usize>().unwrap();
    assert!(d.edge_count() > 0);
    for (a, b) in d.edges() {
        assert_eq!(layer(a) + 1, layer(b), "{a} -> {b}");
    }
}

#[test]
fn dtg_of_unwritten_variable_is_edgeless() {
    let p = xyz();
    assert_eq!(p.dtg("y").unwrap().edge_count(), 0);
    assert!(p.dtg("nope").is_err());
}

#[test]
fn substitution_examples() {
    let v = Variable::new("v", ["1", "2"]);
    let w = Variable::new("w", ["1", "2"]);
    let y = Variable::new("y", ["1", "2"]);
    let u = Variable::new("u", ["1", "2"]);
    let init = state(&[("v", "1"), ("w", "1"), ("y", "1"), ("u", "1")]);
    let p = PlanningInstance::new(vec![v, w, y, u], init, PartialState::new(), vec![]).unwrap();
    let s: PartialState = [("v", "1"), ("y", "2")].into_iter().collect();
    assert_eq!(p.substitute_partial(&s, "v", "w").unwrap(), [("w", "1"), ("y", "2")].into_iter().collect());
    let s: PartialState = [("y", "2")].into_iter().collect();
    assert_eq!(p.substitute_partial(&s, "v", "w").unwrap(), s);
    let a = Operator::from_pairs("a", &[("u", "1")], &[("v", "1")]).unwrap();
    let b = p.substitute_operator(&a, "u", "w").unwrap();
    assert_eq!(b, Operator::from_pairs("a", &[("w", "1")], &[("v", "1")]).unwrap());
}

#[test]
fn substitution_checks_domains() {
    let vars = vec![Variable::new("v", ["1", "2"]), Variable::new("w", ["1"])];
    let p = PlanningInstance::new(vars, state(&[("v", "1"), ("w", "1")]), PartialState::new(), vec![]).unwrap();
    let s: PartialState = [("v", "2")].into_iter().collect();
    assert!(matches!(p.substitute_partial(&s, "v", "w"), Err(PlanningError::DomainMismatch { .. })));
}

#[test]
fn arity_of_star_gadgets() {
    let f = CnfFormula::from_ints(3, &[[1, 2, -3], [-1, 2, 3]]).unwrap();
    let a = gadget_in_star(&f).unwrap().arity_stats();
    assert_eq!((a.max_pre, a.max_post, a.max_dependence), (2, 1, 1));
    let a = gadget_out_star(&f).unwrap().arity_stats();
    assert_eq!((a.max_pre, a.max_post, a.max_dependence), (1, 1, 1));
}

#[test]
fn duplicate_names_are_listed() {
    let vars = vec![Variable::new("b", ["0"]), Variable::new("a", ["0"]), Variable::new("b", ["0"]), Variable::new("a", ["0"])];
    let err = PlanningInstance::new(vars, state(&[("a", "0"), ("b", "0")]), PartialState::new(), vec![]).unwrap_err();
    assert_eq!(err, PlanningError::DuplicateVariables(vec!["a".into(), "b".into()]));
}

#[test]
fn json_is_canonical() {
    let p = xyz();
    let text = p.to_json().unwrap();
    let q = PlanningInstance::from_json(&text).unwrap();
    assert_eq!(p, q);
    assert_eq!(text, q.to_json().unwrap());
    assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
}

#[test]
fn plan_text_round_trip() {
    let plan = Plan::new(["set-t(1)", "verify-clause-pos(1,1)"]);
    assert_eq!(Plan::from_text(&plan.to_text()), plan);
}

fn instance_strategy() -> impl Strategy<Value = PlanningInstance> {
    any::<u64>().prop_map(|seed| {
        let mut r = common::rng(seed);
        let n = r.gen_range(1..=4);
        common::random_instance(&mut r, n, 3, 6)
    })
}

fn plan_strategy(p: &PlanningInstance, seed: u64) -> Plan {
    let mut r = common::rng(seed);
    let ops = p.operators();
    Plan::new((0..r.gen_range(0..10)).map(|_| ops[r.gen_range(0..ops.len())].name.clone()))
}

proptest! {
    #[test]
    fn noop_steps_can_be_erased(p in instance_strategy(), seed in any::<u64>()) {
        let plan = plan_strategy(&p, seed);
        let v = p.validate_plan(&plan).unwrap();
        let kept = Plan::new(plan.steps.iter().enumerate().filter(|(i, _)| !v.noop_steps.contains(i)).map(|(_, s)| s.clone()));
        prop_assert_eq!(p.apply_plan(p.init(), &kept).unwrap(), v.final_state.clone());
        prop_assert!(p.validate_plan(&kept).unwrap().noop_steps.is_empty());
    }

    #[test]
    fn steps_only_change_their_postcondition(p in instance_strategy(), seed in any::<u64>()) {
        let plan = plan_strategy(&p, seed);
        let mut s = p.init().clone();
        for name in &plan.steps {
            let a = p.operator(name).unwrap();
            let t = p.apply_step(&s, a).unwrap();
            for v in p.variable_names() {
                if !(a.is_applicable(&s) && a.post.contains(v)) {
                    prop_assert_eq!(t.get(v), s.get(v));
                } else {
                    prop_assert_eq!(t.get(v), a.post.get(v));
                }
            }
            s = t;
        }
    }

    #[test]
    fn causal_graph_is_sound_and_complete(p in instance_strategy()) {
        let cg = p.causal_graph();
        let mut expect = BTreeMap::new();
        for a in p.operators() {
            for v in a.post.vars() {
                for u in a.pre.vars().chain(a.post.vars()) {
                    if u != v {
                        expect.insert((u.to_string(), v.to_string()), ());
                    }
                }
            }
        }
        let got: Vec<(String, String)> = cg.edges().map(|(a, b)| (a.into(), b.into())).collect();
        prop_assert_eq!(got, expect.into_keys().collect::<Vec<_>>());
        prop_assert_eq!(cg.vertex_count(), p.variables().len());
    }

    #[test]
    fn acyclic_causal_graph_means_unary_operators(p in instance_strategy()) {
        if p.causal_graph().is_acyclic() {
            prop_assert!(p.operators().iter().all(|a| a.post.len() == 1));
        }
    }

    #[test]
    fn json_round_trip(p in instance_strategy()) {
        let q = PlanningInstance::from_json(&p.to_json().unwrap()).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn found_plans_validate(p in instance_strategy()) {
        let r = causal_forge::solver::brute_force_plan_with(&p, SearchBudget::default(), Pruning::None);
        if let Some(plan) = r.outcome.plan() {
            prop_assert!(p.is_strict_solution(plan).unwrap());
        }
    }
}
