use std::path::PathBuf;

use causal_forge::embed::{compile_to_graph, embed_in_tournament, family_instance, CompileCase, CompileOptions};
use causal_forge::graph::ShapeKind;
use causal_forge::sat::{chain_instance, fence_meta, gadget_fence, gadget_in_star, gadget_out_star, in_star_meta, out_star_meta, FenceShape};
use causal_forge::{Budget, Digraph, PlanningInstance};
use clap::{Args, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::run::Run;
use crate::{emit, Variant};

#[derive(Debug, Args)]
pub struct CnfArg {
    /// DIMACS formula with exactly three literals per clause.
    #[arg(long)]
    cnf: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Gadget whose causal graph is an in-star.
    InStar(CnfArg),
    /// Gadget whose causal graph is an out-star.
    OutStar(CnfArg),
    /// Gadget whose causal graph is a fence.
    Fence {
        #[command(flatten)]
        cnf: CnfArg,
        /// Sources minus sinks: +1, 0 or -1.
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        shape: String,
        #[arg(long, value_enum, default_value_t = Variant::Split2)]
        variant: Variant,
    },
    /// Chain of binary variables, each set after its predecessor.
    Chain {
        #[arg(long)]
        len: usize,
    },
    /// Disjoint copies of a directed-path instance.
    Family {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: usize,
        /// Instance to copy instead of a chain of length `m`.
        #[arg(long)]
        seed_instance: Option<PathBuf>,
    },
    /// A named graph shape as an edge list.
    Shape {
        #[arg(long, value_enum)]
        kind: ShapeArg,
        /// Leaves of a star or vertices of a directed path.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<i8>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value = "")]
        prefix: String,
    },
    /// A random tournament, optionally with a directed-path instance
    /// embedded along a Hamiltonian path.
    Tournament {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Compile a formula into an instance with the given causal graph.
    Compile {
        #[command(flatten)]
        cnf: CnfArg,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum)]
        force: Option<CaseArg>,
        #[arg(long, value_enum, default_value_t = Variant::Split2)]
        variant: Variant,
        /// Expansions allowed in the polypath search.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    InStar,
    OutStar,
    Dpath,
    Fence,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    InStar,
    OutStar,
    Fence,
}

impl From<CaseArg> for CompileCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::InStar => CompileCase::InStar,
            CaseArg::OutStar => CompileCase::OutStar,
            CaseArg::Fence => CompileCase::Fence,
        }
    }
}

#[derive(Serialize)]
struct Generated {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    variables: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    operators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<usize>,
    outputs: Vec<String>,
}

fn required<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("shape {kind} needs --{flag}")))
}

fn parse_offset(s: &str) -> Result<FenceShape> {
    s.trim()
        .parse::<i8>()
        .ok()
        .and_then(FenceShape::from_offset)
        .ok_or_else(|| CliError::Usage(format!("--shape must be +1, 0 or -1, got `{s}`")))
}

fn write_instance<M: Serialize>(run: &mut Run, kind: &'static str, inst: &PlanningInstance, meta: &M) -> Result<()> {
    run.write("instance.json", &inst.to_json()?)?;
    run.write("cg.edges", &inst.causal_graph().to_edge_list())?;
    run.write_json("meta.json", meta)?;
    let report = Generated {
        kind,
        variables: Some(inst.variables().len()),
        operators: Some(inst.operators().len()),
        vertices: None,
        outputs: run.written(),
    };
    let human = format!(
        "{kind}: {} variables, {} operators -> {}",
        inst.variables().len(),
        inst.operators().len(),
        report.outputs.join(", ")
    );
    emit(run, &report, Some(human));
    Ok(())
}

fn write_graph<M: Serialize>(run: &mut Run, kind: &'static str, g: &Digraph, meta: &M) -> Result<()> {
    run.write("graph.edges", &g.to_edge_list())?;
    run.write_json("meta.json", meta)?;
    let report = Generated {
        kind,
        variables: None,
        operators: None,
        vertices: Some(g.vertex_count()),
        outputs: run.written(),
    };
    let human = format!("{kind}: {} vertices -> {}", g.vertex_count(), report.outputs.join(", "));
    emit(run, &report, Some(human));
    Ok(())
}

/// Orients every pair of `t1 .. tn` by a fair coin.
pub fn random_tournament(seed: u64, n: usize) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
    let mut g = Digraph::new();
    for v in &names {
        g.add_vertex(v);
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                g.add_edge(&names[i], &names[j]);
            } else {
                g.add_edge(&names[j], &names[i]);
            }
        }
    }
    g
}

pub fn run(run: &mut Run, cmd: GenCommand) -> Result<()> {
    run.require_out_dir("gen")?;
    match cmd {
        GenCommand::InStar(a) => {
            let f = run.read_cnf(&a.cnf)?;
            let g = gadget_in_star(&f)?;
            write_instance(run, "in-star", &g, &in_star_meta(&f, &g))
        }
        GenCommand::OutStar(a) => {
            let f = run.read_cnf(&a.cnf)?;
            let g = gadget_out_star(&f)?;
            write_instance(run, "out-star", &g, &out_star_meta(&f, &g))
        }
        GenCommand::Fence { cnf, shape, variant } => {
            let shape = parse_offset(&shape)?;
            let f = run.read_cnf(&cnf.cnf)?;
            let g = gadget_fence(&f, shape, variant.into())?;
            write_instance(run, "fence", &g, &fence_meta(&f, shape, variant.into(), &g))
        }
        GenCommand::Chain { len } => {
            let g = chain_instance(len)?;
            write_instance(run, "chain", &g, &json!({ "kind": "chain", "len": len }))
        }
        GenCommand::Family { k, m, seed_instance } => {
            let seed = seed_instance.map(|p| run.read_instance(&p)).transpose()?;
            let g = family_instance(k, m, seed.as_ref())?;
            let meta = json!({ "kind": "family", "k": k, "m": m, "vertices": g.variables().len() });
            write_instance(run, "family", &g, &meta)
        }
        GenCommand::Shape {
            kind,
            size,
            m,
            c,
            k,
            prefix,
        } => {
            let (shape, label) = match kind {
                ShapeArg::InStar => (ShapeKind::InStar(required(size, "size", "in-star")?), "in-star"),
                ShapeArg::OutStar => (ShapeKind::OutStar(required(size, "size", "out-star")?), "out-star"),
                ShapeArg::Dpath => (ShapeKind::DirectedPath(required(size, "size", "dpath")?), "dpath"),
                ShapeArg::Fence => (
                    ShapeKind::Fence {
                        m: required(m, "m", "fence")?,
                        c: c.unwrap_or(1),
                    },
                    "fence",
                ),
                ShapeArg::Family => (
                    ShapeKind::GkFamily {
                        k: required(k, "k", "family")?,
                        m: required(m, "m", "family")?,
                    },
                    "family",
                ),
            };
            let g = shape.build(&prefix)?;
            let meta = json!({ "kind": label, "size": size, "m": m, "c": c, "k": k, "prefix": prefix });
            write_graph(run, "shape", &g, &meta)
        }
        GenCommand::Tournament { n, instance } => {
            let inst = instance.map(|p| run.read_instance(&p)).transpose()?;
            let n = match (n, &inst) {
                (Some(n), _) => n,
                (None, Some(i)) => i.variables().len(),
                (None, None) => return Err(CliError::Usage("tournament needs --n or --instance".into())),
            };
            let t = random_tournament(run.seed, n);
            let meta = json!({ "kind": "tournament", "n": n, "seed": run.seed });
            match inst {
                Some(inst) => {
                    let e = embed_in_tournament(&inst, &t)?;
                    run.write("graph.edges", &t.to_edge_list())?;
                    write_instance(run, "tournament", &e, &meta)
                }
                None => write_graph(run, "tournament", &t, &meta),
            }
        }
        GenCommand::Compile {
            cnf,
            target,
            force,
            variant,
            budget,
        } => {
            let f = run.read_cnf(&cnf.cnf)?;
            let h = run.read_graph(&target)?;
            let opts = CompileOptions {
                budget: Budget(budget),
                force: force.map(Into::into),
                fence_variant: variant.into(),
            };
            let c = compile_to_graph(&f, &h, opts)?;
            write_instance(run, "compile", &c.instance, &c.provenance)
        }
    }
}
