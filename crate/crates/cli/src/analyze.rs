use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use causal_forge::embed::capacity_report;
use causal_forge::graph::{classify, is_sp_closed, structural_profile};
use causal_forge::{Budget, Digraph, PlanningInstance};
use clap::{ArgGroup, Args};
use serde_json::{json, Map, Value};

use crate::emit;
use crate::error::{CliError, Result};
use crate::run::Run;

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["instance", "graph", "class"])))]
pub struct AnalyzeArgs {
    /// Planning instance (JSON).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Graph edge list.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Directory of `.edges` files forming a graph class.
    #[arg(long)]
    class: Option<PathBuf>,
    /// Include the causal graph as an edge list.
    #[arg(long)]
    cg: bool,
    /// Export DOT: into the output directory if given, else into the report.
    #[arg(long)]
    dot: bool,
    /// Include the domain-transition graph of this variable (repeatable).
    #[arg(long)]
    dtg: Vec<String>,
    #[arg(long)]
    classify: bool,
    /// Degree, path-length and component measures.
    #[arg(long)]
    profile: bool,
    /// Largest stars and best polypath subgraph.
    #[arg(long)]
    capacity: bool,
    /// Operator precondition, postcondition and dependence maxima.
    #[arg(long)]
    arity: bool,
    /// Check that the class contains every SP-graph of its members.
    #[arg(long)]
    sp_closed: bool,
    /// Largest SP-graph considered by --sp-closed.
    #[arg(long, default_value_t = 6)]
    max_size: usize,
    /// Expansions allowed in each graph search.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

impl AnalyzeArgs {
    fn nothing_selected(&self) -> bool {
        !(self.cg || self.dot || !self.dtg.is_empty() || self.classify || self.profile || self.capacity || self.arity || self.sp_closed)
    }
}

fn labels(g: &Digraph) -> Value {
    json!(classify(g).iter().map(|l| l.to_string()).collect::<Vec<_>>())
}

fn dot(run: &mut Run, report: &mut Map<String, Value>, key: &str, g: &Digraph, name: &str) -> Result<()> {
    let text = g.to_dot(name);
    if run.has_out_dir() {
        let path = run.write(&format!("{key}.dot"), &text)?;
        report.insert(format!("{key}_dot"), json!(path));
    } else {
        report.insert(format!("{key}_dot"), json!(text));
    }
    Ok(())
}

fn graph_report(run: &mut Run, a: &AnalyzeArgs, g: &Digraph, key: &str, report: &mut Map<String, Value>) -> Result<()> {
    let budget = Budget(a.budget);
    let all = a.nothing_selected();
    if a.classify || all {
        report.insert("classes".into(), labels(g));
    }
    if a.profile || all {
        report.insert("profile".into(), json!(structural_profile(g, budget)));
    }
    if a.capacity {
        report.insert("capacity".into(), json!(capacity_report(g, budget)));
    }
    if a.dot {
        dot(run, report, key, g, key)?;
    }
    Ok(())
}

fn instance_report(run: &mut Run, a: &AnalyzeArgs, inst: &PlanningInstance, report: &mut Map<String, Value>) -> Result<()> {
    report.insert("variables".into(), json!(inst.variables().len()));
    report.insert("operators".into(), json!(inst.operators().len()));
    if a.arity || a.nothing_selected() {
        report.insert("arity".into(), json!(inst.arity_stats()));
    }
    let cg = inst.causal_graph();
    if a.cg {
        report.insert("cg".into(), json!(cg.to_edge_list()));
    }
    let mut dtgs = Map::new();
    for v in &a.dtg {
        let d = inst.dtg(v)?;
        dtgs.insert(v.clone(), json!(d.to_edge_list()));
        if a.dot {
            dot(run, report, &format!("dtg-{v}"), &d, &format!("dtg {v}"))?;
        }
    }
    if !dtgs.is_empty() {
        report.insert("dtg".into(), Value::Object(dtgs));
    }
    graph_report(run, a, &cg, "cg", report)
}

fn class_members(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "edges"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Failure(format!("{}: no .edges files", dir.display())));
    }
    Ok(paths)
}

fn class_report(run: &mut Run, a: &AnalyzeArgs, dir: &Path, report: &mut Map<String, Value>) -> Result<Option<String>> {
    let paths = class_members(dir)?;
    let mut members = Vec::new();
    for p in &paths {
        members.push(run.read_graph(p)?);
    }
    let names: Vec<String> = paths.iter().map(|p| p.to_string_lossy().into_owned()).collect();
    report.insert("members".into(), json!(names));
    if a.classify {
        let per: BTreeMap<&String, Value> = names.iter().zip(&members).map(|(n, g)| (n, labels(g))).collect();
        report.insert("classes".into(), json!(per));
    }
    if !a.sp_closed {
        return Ok(None);
    }
    let closure = is_sp_closed(&members, a.max_size, Budget(a.budget))?;
    report.insert("sp_closed".into(), json!(closure.closed));
    let human = match &closure.counterexample {
        Some((i, h)) => {
            report.insert(
                "counterexample".into(),
                json!({ "member": names[*i], "missing": h.to_edge_list() }),
            );
            format!("not SP-closed: {} has an SP-graph outside the class\n{}", names[*i], h.to_edge_list().trim_end())
        }
        None => "SP-closed".to_string(),
    };
    Ok(Some(human))
}

pub fn run(run: &mut Run, a: AnalyzeArgs) -> Result<()> {
    let mut report = Map::new();
    let mut human = None;
    if let Some(p) = &a.instance {
        let inst = run.read_instance(p)?;
        instance_report(run, &a, &inst, &mut report)?;
    } else if let Some(p) = &a.graph {
        let g = run.read_graph(p)?;
        report.insert("vertices".into(), json!(g.vertex_count()));
        report.insert("edges".into(), json!(g.edge_count()));
        graph_report(run, &a, &g, "graph", &mut report)?;
    } else if let Some(dir) = &a.class {
        human = class_report(run, &a, dir, &mut report)?;
    }
    emit(run, &Value::Object(report), human);
    Ok(())
}
