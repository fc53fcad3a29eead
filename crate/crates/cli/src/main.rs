use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use icech::persistence::points_to_json;
use icech::theorem::{default_delta, VerifyOptions};
use icech::{
    computed_diagram, d_ic, generate, predicted_diagram, shortest_system, verify, GeneratorSpec,
    MetricGraph, Model,
};

/// Intrinsic Čech persistence of metric graphs.
#[derive(Debug, Parser)]
#[command(name = "icech", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Discretization step; defaults to a tenth of the shortest loop.
    #[arg(long, global = true, value_parser = positive)]
    delta: Option<f64>,

    /// Filtration cap; defaults to 0.35 times the longest loop.
    #[arg(long, global = true, value_parser = positive)]
    eps_max: Option<f64>,

    /// Bottleneck tolerance for `verify`; defaults to max(2δ, 0.005·ℓ_g).
    #[arg(long, global = true, value_parser = positive)]
    tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = ModelArg::Cech)]
    model: ModelArg,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,

    /// Worker threads (all cores when omitted).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Genus, components and total length.
    Info { graph: PathBuf },
    /// Shortest system of loops.
    Loops { graph: PathBuf },
    /// Dimension-1 persistence diagram for the chosen model.
    Diagram { graph: PathBuf },
    /// Compare the closed-form diagram with the computed one; exits 1 on failure.
    Verify { graph: PathBuf },
    /// Intrinsic Čech distance between two graphs.
    Distance { first: PathBuf, second: PathBuf },
    /// Write a synthetic graph as JSON.
    Generate {
        #[command(subcommand)]
        family: Family,
        /// Write here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum Family {
    Cycle {
        #[arg(long, value_parser = positive)]
        length: f64,
        #[arg(long, default_value_t = 4)]
        vertices: usize,
    },
    Wedge {
        /// Loop lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
        lengths: Vec<f64>,
    },
    Theta {
        #[arg(long, value_parser = positive)]
        a: f64,
        #[arg(long, value_parser = positive)]
        b: f64,
        #[arg(long, value_parser = positive)]
        c: f64,
    },
    Complete {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = positive, default_value_t = 1.0)]
        length: f64,
    },
    Random(RandomArgs),
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    /// Edge count; `n - 1` gives a tree.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Cech,
    Rips,
    Theorem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {x}"))
    }
}

fn load(path: &Path) -> Result<MetricGraph> {
    Ok(MetricGraph::load(path)?)
}

fn emit(cli: &Cli, json: &Value, text: impl FnOnce() -> String) {
    match cli.output {
        Output::Json => println!("{}", serde_json::to_string_pretty(json).expect("valid JSON")),
        Output::Text => print!("{}", text()),
    }
}

fn computed_model(m: ModelArg, command: &str) -> Result<Model> {
    match m {
        ModelArg::Cech => Ok(Model::Cech),
        ModelArg::Rips => Ok(Model::Rips),
        ModelArg::Theorem => bail!("--model theorem is not valid for `{command}`"),
    }
}

fn fmt_points(points: &[(f64, f64)]) -> String {
    points.iter().map(|(b, d)| format!("{b} {d}\n")).collect()
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Info { graph } => {
            let g = load(graph)?;
            let info = json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "components": g.component_count(),
                "genus": g.genus(),
                "total_length": g.total_length(),
                "simple": g.is_simple(),
            });
            emit(cli, &info, || {
                format!(
                    "vertices {}\nedges {}\ncomponents {}\ngenus {}\ntotal_length {}\n",
                    g.vertex_count(),
                    g.edge_count(),
                    g.component_count(),
                    g.genus(),
                    g.total_length()
                )
            });
        }
        Command::Loops { graph } => {
            let system = shortest_system(&load(graph)?)?;
            emit(cli, &system.to_json_value(), || {
                system
                    .loops
                    .iter()
                    .map(|l| {
                        let walk: Vec<&str> = l.walk.iter().map(|&v| system.graph.vertex_id(v)).collect();
                        format!("{} {}\n", l.length, walk.join(" "))
                    })
                    .collect()
            });
        }
        Command::Diagram { graph } => {
            let g = load(graph)?;
            if cli.model == ModelArg::Theorem {
                let d = predicted_diagram(&g)?;
                let points = d.dim_points(1);
                emit(cli, &points_to_json(1, points), || fmt_points(points));
                return Ok(ExitCode::SUCCESS);
            }
            let model = computed_model(cli.model, "diagram")?;
            let delta = match cli.delta {
                Some(d) => d,
                None => default_delta(&g, &shortest_system(&g)?),
            };
            let c = computed_diagram(&g, delta, model, cli.eps_max)?;
            if !c.scale.valid {
                eprintln!("warning: {}", c.scale.message);
            }
            let points = c.diagram.dim_points(1);
            let mut out = points_to_json(1, points);
            let extra = serde_json::to_value(&c)?;
            out.as_object_mut()
                .expect("diagram JSON is an object")
                .extend(extra.as_object().expect("report is an object").clone());
            emit(cli, &out, || {
                format!("# model {model} delta {delta} eps_max {}\n{}", c.eps_max, fmt_points(points))
            });
        }
        Command::Verify { graph } => {
            let g = load(graph)?;
            let model = computed_model(cli.model, "verify")?;
            let delta = match cli.delta {
                Some(d) => d,
                None => default_delta(&g, &shortest_system(&g)?),
            };
            let mut opts = VerifyOptions::new(delta).model(model);
            if let Some(t) = cli.tol {
                opts = opts.tol(t);
            }
            if let Some(e) = cli.eps_max {
                opts = opts.eps_max(e);
            }
            let report = verify(&g, opts)?;
            if !report.scale.valid {
                eprintln!("warning: {}", report.scale.message);
            }
            emit(cli, &report.to_json(), || {
                format!(
                    "status {}\npredicted\n{}computed\n{}bottleneck {} tol {} delta {} eps_max {}\n",
                    report.to_json()["status"].as_str().unwrap_or_default(),
                    fmt_points(&report.predicted),
                    fmt_points(&report.computed),
                    report.bottleneck,
                    report.tol,
                    report.delta,
                    report.eps_max
                )
            });
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Distance { first, second } => {
            let d = d_ic(&load(first)?, &load(second)?)?;
            emit(cli, &json!(d), || format!("{d}\n"));
        }
        Command::Generate { family, out } => {
            let spec = match family {
                Family::Cycle { length, vertices } => GeneratorSpec::Cycle {
                    length: *length,
                    vertices: *vertices,
                },
                Family::Wedge { lengths } => GeneratorSpec::Wedge {
                    lengths: lengths.clone(),
                },
                Family::Theta { a, b, c } => GeneratorSpec::Theta { a: *a, b: *b, c: *c },
                Family::Complete { n, length } => GeneratorSpec::Complete {
                    n: *n,
                    length: *length,
                },
                Family::Random(r) => GeneratorSpec::Random {
                    n: r.n,
                    m: r.m,
                    seed: r.seed,
                },
            };
            let g = generate(&spec)?;
            match out {
                Some(path) => g.save(path)?,
                None => println!("{}", g.to_json()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
