use std::path::{Path, PathBuf};

use causal_forge::sat::{brute_force_sat, gadget_fence, gadget_in_star, gadget_out_star, FenceShape};
use causal_forge::solver::{brute_force_plan_with, component_plan, PlanOutcome, Pruning, SearchBudget};
use causal_forge::{Plan, PlanningInstance};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::run::Run;
use crate::{emit, Variant};

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Planning instance (JSON).
    instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Brute)]
    method: Method,
    #[arg(long, value_enum, default_value_t = PruningArg::Reduced)]
    pruning: PruningArg,
    /// States a search may store; overrides CAUSAL_FORGE_BUDGET.
    #[arg(long)]
    max_states: Option<u64>,
    /// Check this plan instead of searching.
    #[arg(long)]
    validate: Option<PathBuf>,
    /// Build a gadget for this formula and compare solvability with SAT.
    #[arg(long, requires = "gadget")]
    crosscheck: Option<PathBuf>,
    #[arg(long, value_enum)]
    gadget: Option<GadgetArg>,
    #[arg(long, value_enum, default_value_t = Variant::Split2)]
    variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Breadth-first search over the whole state space.
    Brute,
    /// Breadth-first search per weakly connected causal-graph component.
    Component,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PruningArg {
    None,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GadgetArg {
    InStar,
    OutStar,
    Fence,
}

impl From<PruningArg> for Pruning {
    fn from(p: PruningArg) -> Self {
        match p {
            PruningArg::None => Pruning::None,
            PruningArg::Reduced => Pruning::Reduced,
        }
    }
}

fn budget(a: &SolveArgs) -> SearchBudget {
    match a.max_states {
        Some(n) => SearchBudget::states(n),
        None => SearchBudget::from_env(),
    }
}

fn write_plan(run: &mut Run, outcome: &PlanOutcome) -> Result<()> {
    if let (true, Some(plan)) = (run.has_out_dir(), outcome.plan()) {
        run.write("plan.txt", &plan.to_text())?;
    }
    Ok(())
}

fn finish_outcome(outcome: &PlanOutcome, detail: Option<String>) -> Result<()> {
    match outcome {
        PlanOutcome::BudgetExceeded => Err(CliError::Budget(detail.unwrap_or_else(|| "search budget exceeded".into()))),
        _ => Ok(()),
    }
}

fn human_outcome(outcome: &PlanOutcome) -> String {
    match outcome {
        PlanOutcome::Solved(p) => format!("solved in {} steps\n{}", p.len(), p.to_text().trim_end()),
        PlanOutcome::Unsolvable => "unsolvable".into(),
        PlanOutcome::BudgetExceeded => "budget exceeded".into(),
    }
}

fn validate(run: &mut Run, inst: &PlanningInstance, path: &Path) -> Result<()> {
    let plan: Plan = run.read_plan(path)?;
    let v = inst.validate_plan(&plan).map_err(|e| CliError::input(path, e))?;
    let report = json!({
        "valid": v.is_solution(),
        "strict": v.is_strict_solution(),
        "steps": plan.len(),
        "noop_steps": v.noop_steps,
    });
    let human = match (v.is_solution(), v.noop_steps.is_empty()) {
        (true, true) => "valid plan".to_string(),
        (true, false) => format!("valid plan with inapplicable steps {:?}", v.noop_steps),
        (false, _) => "not a solution".to_string(),
    };
    emit(run, &report, Some(human));
    if v.is_solution() {
        Ok(())
    } else {
        Err(CliError::Failure("plan does not reach the goal".into()))
    }
}

#[derive(Serialize)]
struct Crosscheck {
    verdict: &'static str,
    sat: bool,
    solvable: bool,
    gadget: &'static str,
    summary: String,
}

fn crosscheck(run: &mut Run, a: &SolveArgs, path: &Path, gadget: GadgetArg) -> Result<()> {
    let f = run.read_cnf(path)?;
    let (name, inst) = match gadget {
        // unused variables do not change satisfiability
        GadgetArg::InStar => ("in-star", gadget_in_star(&f.compacted())?),
        GadgetArg::OutStar => ("out-star", gadget_out_star(&f)?),
        GadgetArg::Fence => ("fence", gadget_fence(&f, FenceShape::Full, a.variant.into())?),
    };
    let sat = brute_force_sat(&f)?.is_some();
    let result = brute_force_plan_with(&inst, budget(a), a.pruning.into());
    let solvable = match result.outcome.solvable() {
        Some(s) => s,
        None => return Err(CliError::Budget(format!("search budget exceeded on the {name} gadget"))),
    };
    let verdict = if sat == solvable { "AGREE" } else { "MISMATCH" };
    let report = Crosscheck {
        verdict,
        sat,
        solvable,
        gadget: name,
        summary: format!("{verdict} sat={sat} solvable={solvable}"),
    };
    if run.has_out_dir() {
        run.write_json("crosscheck.json", &report)?;
    }
    emit(run, &report, Some(report.summary.clone()));
    if sat == solvable {
        Ok(())
    } else {
        Err(CliError::Failure(format!("{name} gadget disagrees with the SAT oracle")))
    }
}

pub fn run(run: &mut Run, a: SolveArgs) -> Result<()> {
    if let Some(path) = &a.crosscheck {
        return crosscheck(run, &a, path, a.gadget.expect("required by clap"));
    }
    let path = a
        .instance
        .clone()
        .ok_or_else(|| CliError::Usage("solve needs an instance path or --crosscheck".into()))?;
    let inst = run.read_instance(&path)?;
    if let Some(plan) = &a.validate {
        return validate(run, &inst, plan);
    }
    match a.method {
        Method::Brute => {
            let r = brute_force_plan_with(&inst, budget(&a), a.pruning.into());
            write_plan(run, &r.outcome)?;
            if run.has_out_dir() {
                run.write_json("result.json", &r)?;
            }
            emit(run, &r, Some(human_outcome(&r.outcome)));
            finish_outcome(&r.outcome, None)
        }
        Method::Component => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(run.jobs)
                .build()
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let r = pool.install(|| component_plan(&inst, budget(&a), run.jobs > 1));
            write_plan(run, &r.outcome)?;
            if run.has_out_dir() {
                run.write_json("result.json", &r)?;
            }
            let mut human = human_outcome(&r.outcome);
            if let Some(m) = r.failure_message() {
                human = format!("{human}: {m}");
            }
            emit(run, &r, Some(human));
            finish_outcome(&r.outcome, r.failure_message())
        }
    }
}
