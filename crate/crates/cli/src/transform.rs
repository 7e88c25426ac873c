use std::path::PathBuf;

use causal_forge::transform::{clone_union, extend_to_supergraph, reorder_plan_segment, stretch_to_polypath, subdivide_instance};
use causal_forge::PlanningInstance;
use clap::{Args, Subcommand};
use serde_json::{json, Value};

use crate::emit;
use crate::error::Result;
use crate::run::Run;

#[derive(Debug, Args)]
pub struct InstanceArg {
    /// Planning instance (JSON).
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum TransformCommand {
    /// Extend the causal graph to a supergraph.
    Extend {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Subdivide one causal-graph edge through a copy variable.
    Subdivide {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        edge: Vec<String>,
        /// Name of the new variable.
        #[arg(long)]
        name: Option<String>,
    },
    /// Stretch a fence-shaped instance onto a polypath.
    Stretch {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long)]
        target: PathBuf,
    },
    /// Reorder a plan segment around a variable it never writes.
    Reorder {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long)]
        start: usize,
        #[arg(long)]
        end: usize,
    },
    /// Disjoint union of renamed copies.
    Clone {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long)]
        copies: usize,
    },
}

fn write(run: &mut Run, kind: &str, inst: &PlanningInstance, extra: Value) -> Result<()> {
    run.write("instance.json", &inst.to_json()?)?;
    run.write("cg.edges", &inst.causal_graph().to_edge_list())?;
    let mut report = json!({
        "transform": kind,
        "variables": inst.variables().len(),
        "operators": inst.operators().len(),
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut report, extra) {
        r.extend(e);
    }
    report["outputs"] = json!(run.written());
    emit(run, &report, None);
    Ok(())
}

pub fn run(run: &mut Run, cmd: TransformCommand) -> Result<()> {
    run.require_out_dir("transform")?;
    match cmd {
        TransformCommand::Extend { inst, graph } => {
            let p = run.read_instance(&inst.instance)?;
            let g = run.read_graph(&graph)?;
            let out = extend_to_supergraph(&p, &g)?;
            write(run, "extend", &out, json!({}))
        }
        TransformCommand::Subdivide { inst, edge, name } => {
            let p = run.read_instance(&inst.instance)?;
            let (out, w) = subdivide_instance(&p, (&edge[0], &edge[1]), name.as_deref())?;
            write(run, "subdivide", &out, json!({ "new_variable": w }))
        }
        TransformCommand::Stretch { inst, target } => {
            let p = run.read_instance(&inst.instance)?;
            let h = run.read_graph(&target)?;
            let (out, schedule) = stretch_to_polypath(&p, &h)?;
            run.write_json("schedule.json", &schedule)?;
            write(run, "stretch", &out, json!({ "subdivisions": schedule.len() }))
        }
        TransformCommand::Reorder {
            inst,
            plan,
            var,
            start,
            end,
        } => {
            let p = run.read_instance(&inst.instance)?;
            let plan = run.read_plan(&plan)?;
            let out = reorder_plan_segment(&p, &plan, &var, start, end)?;
            run.write("plan.txt", &out.to_text())?;
            let report = json!({
                "transform": "reorder",
                "steps": out.len(),
                "changed": out != plan,
                "outputs": run.written(),
            });
            emit(run, &report, Some(out.to_text().trim_end().to_string()));
            Ok(())
        }
        TransformCommand::Clone { inst, copies } => {
            let p = run.read_instance(&inst.instance)?;
            let out = clone_union(&p, copies)?;
            write(run, "clone", &out, json!({ "copies": copies }))
        }
    }
}
