//! Command-line surface for the combinatorial QHD smoothing toolkit.
//!
//! Exit codes: 0 success, 1 negative mathematical verdict (a failed check or
//! an exhausted search without a solution), 2 usage or input error,
//! 3 budget exceeded.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qhd_core::families::{self, ClExtension};
use qhd_core::graph::{expand_sketch, EdgeSketch, GraphJson, PlumbingTree};
use qhd_core::homology::fiber_invariants;
use qhd_core::pipelines::{
    check_graph, corollary_sweep, star_sweep_families, with_jobs, StarVerdict, SweepSpec,
};
use qhd_core::reduction::reduce_fully;
use qhd_core::sandwich::{
    presentation_for_config, presentation_smooth, star_presentation, PresentationJson,
    SandwichPresentation, StarFamily, StarFamilyInstance,
};
use qhd_core::solver::{solve, Configuration, ConfigurationJson, Emit, MuTarget, SolveMode};

#[derive(Parser)]
#[command(
    name = "qhd",
    version,
    about = "Combinatorial QHD smoothing checks for resolution graphs"
)]
struct Cli {
    /// Worker count for sweeps (0 = all cores); QHD_JOBS is honoured too.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, expand, and render a plumbing graph.
    Graph(GraphArgs),
    /// Build a sandwich presentation (smooth or star family).
    Present(PresentArgs),
    /// Search for configurations realizing a presentation.
    Solve(SolveArgs),
    /// Run the reduction algorithm on a graph and configuration.
    Reduce(ReduceArgs),
    /// Milnor-fiber invariants of a configuration.
    Fiber(FiberArgs),
    /// Lattice-theoretic necessary conditions for a graph.
    Check(CheckArgs),
    /// Generate a named configuration family.
    Family(FamilyArgs),
    /// Enumerate candidate trees and run the filter chain.
    Sweep(SweepArgs),
    /// Star-family existence tables.
    StarSweep(StarSweepArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph JSON (or sketch JSON with --sketch).
    input: PathBuf,
    /// Treat the input as an edge sketch and expand the labels.
    #[arg(long)]
    sketch: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct PresentArgs {
    /// Graph JSON; ignored when --star is given.
    input: Option<PathBuf>,
    /// End vertex of the blowdown (smooth presentations).
    #[arg(long)]
    end: Option<String>,
    /// Star family tag: C6, C3, C2, B2, B4, A3, 4A, 4B, 4C.
    #[arg(long)]
    star: Option<String>,
    /// Long-arm length for star presentations.
    #[arg(long)]
    n: Option<usize>,
    /// Cusp placement: "known" (default) or "index:count,index:count,...".
    #[arg(long, default_value = "known")]
    cusps: String,
}

#[derive(Args)]
struct SolveArgs {
    /// Graph JSON (with --end) or presentation JSON.
    input: PathBuf,
    #[arg(long)]
    end: Option<String>,
    /// Require an equal number of points and curves.
    #[arg(long)]
    mu0: bool,
    /// Enumerate all solutions up to point relabeling.
    #[arg(long, conflicts_with = "count")]
    all: bool,
    /// Count solutions instead of emitting them.
    #[arg(long)]
    count: bool,
    /// Budget in seconds; exceeding it exits with code 3.
    #[arg(long)]
    timeout: Option<u64>,
}

#[derive(Args)]
struct ReduceArgs {
    graph: PathBuf,
    config: PathBuf,
    /// Write the full trace to this file as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FiberArgs {
    config: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    input: PathBuf,
    /// Also run the diagonal embedding search.
    #[arg(long)]
    embed: bool,
}

#[derive(Args)]
struct FamilyArgs {
    /// Family: fpp, cl, or t.
    family: String,
    /// Parameters, e.g. "2" or "2,1" (fpp), "2,2" or "-2,3,cluster=-2" or
    /// "2,2,star=2" (cl), "2,2,2" (t).
    #[arg(long)]
    params: String,
    /// Write the configuration here instead of stdout.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Also reconstruct and print the graph.
    #[arg(long)]
    reconstruct: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    /// JSON Lines output, one record per candidate.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StarSweepArgs {
    /// Star family tag, or "all".
    #[arg(long)]
    family: String,
    #[arg(long)]
    max_n: usize,
    /// Per-instance budget in seconds.
    #[arg(long)]
    timeout: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = if cli.jobs == 0 {
        std::env::var("QHD_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    } else {
        cli.jobs
    };
    let run = move || dispatch(cli.command);
    let outcome = match with_jobs(jobs, run) {
        Ok(result) => result,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> qhd_core::Result<u8> {
    match command {
        Command::Graph(args) => {
            let tree = if args.sketch {
                let sketch: EdgeSketch = read_json(&args.input)?;
                expand_sketch(&sketch)?
            } else {
                load_graph(&args.input)?
            };
            match args.format {
                Format::Dot => print!("{}", tree.to_dot()),
                Format::Json => {
                    let stats: Vec<_> = tree
                        .vertices()
                        .map(|v| {
                            let s = tree.stats(v).expect("vertex exists");
                            json!({
                                "id": tree.label(v),
                                "degree": s.degree,
                                "framing": s.framing,
                                "is_node": s.is_node,
                                "is_leaf": s.is_leaf,
                                "is_large_node": s.is_large_node,
                            })
                        })
                        .collect();
                    print_json(&json!({
                        "graph": tree.to_json(),
                        "delta": tree.delta(),
                        "stats": stats,
                    }))?;
                }
            }
            Ok(0)
        }
        Command::Present(args) => {
            let presentation = if let Some(tag) = &args.star {
                let family = StarFamily::parse(tag)?;
                let n = args
                    .n
                    .ok_or_else(|| qhd_core::Error::InvalidParams("--star requires --n".into()))?;
                let instance = parse_instance(family, n, &args.cusps)?;
                star_presentation(&instance)?
            } else {
                let input = args
                    .input
                    .as_ref()
                    .ok_or_else(|| qhd_core::Error::InvalidParams("graph input required".into()))?;
                let tree = load_graph(input)?;
                let end_label = args.end.as_ref().ok_or_else(|| {
                    qhd_core::Error::InvalidParams("--end required for smooth presentations".into())
                })?;
                let end = tree.vertex_by_label(end_label)?;
                presentation_smooth(&tree, end)?
            };
            print_json(&presentation.to_json())?;
            Ok(0)
        }
        Command::Solve(args) => {
            let presentation = load_presentation(&args.input, args.end.as_deref())?;
            let emit = if args.count {
                Emit::Count
            } else if args.all {
                Emit::All
            } else {
                Emit::First
            };
            let mode = SolveMode {
                mu: if args.mu0 {
                    MuTarget::Zero
                } else {
                    MuTarget::Any
                },
                emit,
                timeout: args.timeout.map(Duration::from_secs),
                max_points: None,
            };
            let out = solve(&presentation, &mode)?;
            if out.timed_out {
                print_json(&json!({"verdict": "timeout"}))?;
                return Ok(3);
            }
            let found = !out.solutions.is_empty() || out.canonical_count.unwrap_or(0) > 0;
            let solutions: Vec<ConfigurationJson> =
                out.solutions.iter().map(|c| c.to_json()).collect();
            print_json(&json!({
                "verdict": if found { "solutions" } else { "no solution" },
                "exhausted": out.exhausted,
                "canonical_count": out.canonical_count,
                "labeled_count": out.labeled_count.map(|c| c.to_string()),
                "solutions": solutions,
            }))?;
            Ok(if found { 0 } else { 1 })
        }
        Command::Reduce(args) => {
            let tree = load_graph(&args.graph)?;
            let config_json: ConfigurationJson = read_json(&args.config)?;
            let config = Configuration::from_json(&config_json)?;
            let presentation = presentation_for_config(&tree, &config)?;
            let trace = reduce_fully(&presentation, &config)?;
            let summary = json!({
                "steps": trace.steps,
                "initial_delta": trace.initial_delta,
                "final_delta": trace.final_delta,
                "final_graph": trace.final_presentation.base.to_json(),
                "final_config": trace.final_config.to_json(),
            });
            if let Some(path) = &args.trace {
                std::fs::write(path, serde_json::to_string_pretty(&summary)?)?;
                println!(
                    "{}",
                    json!({"steps": trace.steps.len(), "trace": path.display().to_string()})
                );
            } else {
                print_json(&summary)?;
            }
            Ok(0)
        }
        Command::Fiber(args) => {
            let config_json: ConfigurationJson = read_json(&args.config)?;
            let config = Configuration::from_json(&config_json)?;
            let inv = fiber_invariants(&config);
            print_json(&serde_json::to_value(&inv)?)?;
            Ok(0)
        }
        Command::Check(args) => {
            let tree = load_graph(&args.input)?;
            let report = check_graph(&tree, args.embed);
            let pass = report.all_pass;
            print_json(&serde_json::to_value(&report)?)?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Family(args) => {
            let config = build_family(&args.family, &args.params)?;
            let json = config.to_json();
            if let Some(path) = &args.emit {
                std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
            }
            if args.reconstruct {
                let tree = families::reconstruct_graph(&config)?;
                print_json(&json!({
                    "config": json,
                    "graph": tree.to_json(),
                }))?;
            } else if args.emit.is_none() {
                print_json(&serde_json::to_value(&json)?)?;
            }
            Ok(0)
        }
        Command::Sweep(args) => {
            let spec: SweepSpec = read_json(&args.spec)?;
            let result = corollary_sweep(&spec)?;
            let mut file = std::fs::File::create(&args.out)?;
            for record in &result.records {
                writeln!(file, "{}", serde_json::to_string(record)?)?;
            }
            print_json(&json!({
                "candidates": result.candidates,
                "survivors": result.survivors,
                "budget_exceeded": result.budget_exceeded,
                "per_filter_failures": result.per_filter_failures,
                "out": args.out.display().to_string(),
            }))?;
            Ok(if !result.budget_exceeded.is_empty() { 3 } else { 0 })
        }
        Command::StarSweep(args) => {
            let families: Vec<StarFamily> = if args.family == "all" {
                StarFamily::ALL.to_vec()
            } else {
                vec![StarFamily::parse(&args.family)?]
            };
            let rows = star_sweep_families(
                &families,
                args.max_n,
                args.timeout.map(Duration::from_secs),
            )?;
            for row in &rows {
                println!("{}", serde_json::to_string(row)?);
            }
            let unknown = rows.iter().any(|r| r.verdict == StarVerdict::Unknown);
            Ok(if unknown { 3 } else { 0 })
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> qhd_core::Result<T> {
    let data = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&data)?)
}

fn load_graph(path: &PathBuf) -> qhd_core::Result<PlumbingTree> {
    let json: GraphJson = read_json(path)?;
    PlumbingTree::from_json(&json)
}

fn load_presentation(path: &PathBuf, end: Option<&str>) -> qhd_core::Result<SandwichPresentation> {
    let data = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&data)?;
    if value.get("curves").is_some() {
        let json: PresentationJson = serde_json::from_value(value)?;
        return SandwichPresentation::from_json(&json);
    }
    let json: GraphJson = serde_json::from_value(value)?;
    let tree = PlumbingTree::from_json(&json)?;
    let end = end.ok_or_else(|| {
        qhd_core::Error::InvalidParams("--end required when solving from a graph".into())
    })?;
    let end = tree.vertex_by_label(end)?;
    presentation_smooth(&tree, end)
}

fn parse_instance(
    family: StarFamily,
    n: usize,
    cusps: &str,
) -> qhd_core::Result<StarFamilyInstance> {
    if cusps == "known" {
        return StarFamilyInstance::known(family, n);
    }
    let mut placement = std::collections::BTreeMap::new();
    for part in cusps.split(',') {
        let (idx, count) = part.split_once(':').ok_or_else(|| {
            qhd_core::Error::InvalidParams(format!("bad cusp spec `{part}` (want index:count)"))
        })?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| qhd_core::Error::InvalidParams(format!("bad index `{idx}`")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| qhd_core::Error::InvalidParams(format!("bad count `{count}`")))?;
        placement.insert(idx, count);
    }
    StarFamilyInstance::new(family, n, placement, cusps.to_string())
}

fn build_family(family: &str, params: &str) -> qhd_core::Result<Configuration> {
    let parts: Vec<&str> = params.split(',').map(str::trim).collect();
    let int = |s: &str| -> qhd_core::Result<i64> {
        s.parse()
            .map_err(|_| qhd_core::Error::InvalidParams(format!("bad integer `{s}`")))
    };
    match family {
        "fpp" => {
            let n = int(parts[0])?;
            let l = if parts.len() > 1 {
                int(parts[1])? as usize
            } else {
                0
            };
            families::fpp_config(n, l)
        }
        "cl" => {
            if parts.len() < 2 {
                return Err(qhd_core::Error::InvalidParams("cl needs at least k,n".into()));
            }
            let k = int(parts[0])?;
            let n = int(parts[1])? as usize;
            let extension = match parts.get(2) {
                None => ClExtension::None,
                Some(s) if s.starts_with("cluster=") => {
                    ClExtension::Cluster(int(&s["cluster=".len()..])?)
                }
                Some(s) if s.starts_with("star=") => ClExtension::Star(int(&s["star=".len()..])?),
                Some(s) => {
                    return Err(qhd_core::Error::InvalidParams(format!(
                        "unknown extension `{s}`"
                    )))
                }
            };
            families::cl_config(k, n, extension)
        }
        "t" => {
            if parts.len() != 3 {
                return Err(qhd_core::Error::InvalidParams("t needs a,b,c".into()));
            }
            families::t_config(int(parts[0])?, int(parts[1])?, int(parts[2])?)
        }
        other => Err(qhd_core::Error::InvalidParams(format!(
            "unknown family `{other}` (expected fpp, cl, or t)"
        ))),
    }
}

fn print_json(value: &impl serde::Serialize) -> qhd_core::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}
