//! `hypro`: build desk-scale hyperbolic models and products, estimate
//! their constants, and verify the quantitative bounds of the
//! construction. All verbs emit JSON lines on stdout; `suite run` writes
//! a full report file and exits nonzero on any failed bound.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hypro_cli::config::{load_config, load_product_spec};
use hypro_cli::export::export_plotdata;
use hypro_cli::suite::{auto_rays_from, generate_morse_cases, run_suite};
use hypro_cli::{derive_seed, digest};
use hypro_core::boundary::{
    classify_ray, factorization_check, DEFAULT_LAMBDA, DEFAULT_THRESHOLD_FRACTION,
};
use hypro_core::busemann::BusemannField;
use hypro_core::hyperbolicity::morse::{morse_check, MorseParams};
use hypro_core::hyperbolicity::tfunction::distance_function_t_check;
use hypro_core::hyperbolicity::{four_point_delta, PointSelection};
use hypro_core::product::{build_product, NodeId, YPoint};
use hypro_core::space::{Point, Space};

#[derive(Parser)]
#[command(
    name = "hypro",
    version,
    about = "hyperbolic products of model spaces, checked quantitatively"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate or sample a space-spec document.
    Space {
        #[command(subcommand)]
        cmd: SpaceCmd,
    },
    /// Estimate the four-point and tilde-point δ of a space.
    Delta(DeltaArgs),
    /// Check distance functions along geodesics against T-functions.
    Tcheck(TcheckArgs),
    /// Run detour cases against the Morse estimate.
    Morse(MorseArgs),
    /// Evaluate a Busemann field or construct B-rays.
    Busemann {
        #[command(subcommand)]
        cmd: BusemannCmd,
    },
    /// Build, verify, or export a hyperbolic product.
    Product {
        #[command(subcommand)]
        cmd: ProductCmd,
    },
    /// Classify rays and check the boundary factorization.
    Boundary {
        #[command(subcommand)]
        cmd: BoundaryCmd,
    },
    /// Run the full verification suite or export plot data.
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Validate a space-spec file.
    Validate { file: PathBuf },
    /// Print a deterministic point sample.
    Sample {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct DeltaArgs {
    file: PathBuf,
    /// Enumerate all vertex quadruples (finite graphs only).
    #[arg(long, conflicts_with_all = ["n", "seed"])]
    exhaustive: bool,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TcheckArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MorseArgs {
    file: PathBuf,
    /// JSON file with explicit cases; omitted → generated cases.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum BusemannCmd {
    /// Evaluate B at a point (JSON, e.g. '{"x": 1.5}' or '{"xy":[0,1]}').
    Eval {
        file: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Construct a B-ray.
    Ray {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        len: f64,
    },
}

#[derive(Subcommand)]
enum ProductCmd {
    /// Build the discretized level set and print its size.
    Build { spec: PathBuf },
    /// Run the product checks over seeded pairs.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = 40)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the records to a JSON-lines file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Export the product graph as a CSV edge list.
    Export {
        spec: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Subcommand)]
enum BoundaryCmd {
    /// Classify rays (auto-generated or from a file of node sequences).
    Classify {
        spec: PathBuf,
        /// JSON rays file: {"rays": [[YPoint, ...], ...]}.
        #[arg(long)]
        rays: Option<PathBuf>,
        /// Number of auto-generated rays when no file is given.
        #[arg(long, default_value_t = 6)]
        auto: usize,
        #[arg(long, alias = "K", default_value_t = 16)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Run every check in a config and write the JSON-lines report.
    Run { config: PathBuf },
    /// Export a named plot series from a report to CSV.
    Export {
        report: PathBuf,
        #[arg(long)]
        what: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_point(text: &str) -> anyhow::Result<Point> {
    Ok(serde_json::from_str(text)?)
}

fn emit(value: serde_json::Value) {
    println!("{value}");
}

fn dispatch() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Space { cmd } => match cmd {
            SpaceCmd::Validate { file } => {
                let space = Space::from_file(&file)?;
                emit(json!({
                    "op": "space.validate",
                    "inputs": digest(&space.description()),
                    "label": space.label(),
                    "resolution": space.resolution(),
                    "verdict": "pass",
                }));
                Ok(ExitCode::SUCCESS)
            }
            SpaceCmd::Sample { file, n, seed } => {
                let space = Space::from_file(&file)?;
                let pts = space.sample_points(n, seed)?;
                emit(json!({
                    "op": "space.sample",
                    "inputs": digest(&(space.description(), n, seed)),
                    "points": pts,
                }));
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Delta(args) => {
            let space = Space::from_file(&args.file)?;
            let selection = if args.exhaustive {
                PointSelection::All
            } else {
                PointSelection::Auto {
                    n: args.n,
                    seed: args.seed,
                }
            };
            let rep = four_point_delta(&space, selection)?;
            emit(json!({
                "op": "delta",
                "inputs": digest(&(space.description(), args.n, args.seed, args.exhaustive)),
                "four_point": rep.four_point,
                "tilde": rep.tilde,
                "verdict": "info",
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Tcheck(args) => {
            let space = Space::from_file(&args.file)?;
            let delta = four_point_delta(
                &space,
                PointSelection::Auto {
                    n: 200,
                    seed: derive_seed(args.seed, "delta"),
                },
            )?
            .four_point
            .delta;
            let pts = space.sample_points(3 * args.trials, args.seed)?;
            let mut worst = 0.0f64;
            for tri in pts.chunks(3) {
                if tri.len() < 3 {
                    break;
                }
                let path = space.geodesic(&tri[1], &tri[2])?;
                if path.total_length() == 0.0 {
                    continue;
                }
                let chk = distance_function_t_check(&space, &tri[0], &path)?;
                worst = worst.max(chk.deviation);
            }
            let bound = 4.0 * delta + space.slack();
            let pass = worst <= bound;
            emit(json!({
                "op": "tcheck",
                "inputs": digest(&(space.description(), args.trials, args.seed)),
                "value": worst,
                "bound": bound,
                "slack": space.slack(),
                "verdict": if pass { "pass" } else { "fail" },
            }));
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Morse(args) => {
            let space = Space::from_file(&args.file)?;
            let cases = match &args.config {
                Some(path) => {
                    #[derive(serde::Deserialize)]
                    struct FileCase {
                        x: Point,
                        y: Point,
                        p: Point,
                        detour: Vec<Point>,
                        r: f64,
                        delta: f64,
                    }
                    #[derive(serde::Deserialize)]
                    struct FileCases {
                        cases: Vec<FileCase>,
                    }
                    let parsed: FileCases = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    parsed
                        .cases
                        .into_iter()
                        .map(|c| hypro_cli::suite::MorseCase {
                            x: c.x,
                            y: c.y,
                            p: c.p,
                            detour: c.detour,
                            params: MorseParams {
                                r: c.r,
                                delta: c.delta,
                            },
                        })
                        .collect()
                }
                None => {
                    let delta = four_point_delta(
                        &space,
                        PointSelection::Auto {
                            n: 200,
                            seed: derive_seed(args.seed, "delta"),
                        },
                    )?
                    .four_point
                    .delta;
                    let config = hypro_cli::config::SuiteConfig {
                        seed: args.seed,
                        output: PathBuf::new(),
                        spaces: vec![],
                        products: vec![],
                        operations: vec![],
                        samples: Default::default(),
                        base_dir: PathBuf::new(),
                    };
                    generate_morse_cases(&config, &space, delta)?
                }
            };
            let mut violated = 0;
            for case in &cases {
                let verdict = morse_check(
                    &space,
                    &case.detour,
                    &case.x,
                    &case.y,
                    &case.p,
                    &case.params,
                )?;
                let tag = match &verdict {
                    hypro_core::hyperbolicity::morse::MorseVerdict::PreconditionUnmet {
                        ..
                    } => "precondition_unmet",
                    hypro_core::hyperbolicity::morse::MorseVerdict::BoundHolds { .. } => {
                        "bound_holds"
                    }
                    hypro_core::hyperbolicity::morse::MorseVerdict::BoundViolated { .. } => {
                        violated += 1;
                        "bound_violated"
                    }
                };
                emit(json!({
                    "op": "morse.case",
                    "inputs": digest(&(&case.x, &case.y, &case.p, case.params.r, case.params.delta)),
                    "r": case.params.r,
                    "delta": case.params.delta,
                    "verdict": tag,
                    "detail": serde_json::to_value(&verdict)?,
                }));
            }
            emit(json!({
                "op": "morse",
                "violated": violated,
                "verdict": if violated == 0 { "pass" } else { "fail" },
            }));
            Ok(if violated == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Busemann { cmd } => match cmd {
            BusemannCmd::Eval { file, point } => {
                let space = Space::from_file(&file)?;
                let field = BusemannField::from_space(&space)?;
                let p = parse_point(&point)?;
                let value = field.value(&p)?;
                emit(json!({
                    "op": "busemann.eval",
                    "inputs": digest(&(space.description(), &p)),
                    "value": value,
                }));
                Ok(ExitCode::SUCCESS)
            }
            BusemannCmd::Ray { file, from, len } => {
                let space = Space::from_file(&file)?;
                let field = BusemannField::from_space(&space)?;
                let p = parse_point(&from)?;
                let ray = field.b_ray_from(&p, len)?;
                let defect = field.ray_rate_defect(&ray)?;
                emit(json!({
                    "op": "busemann.ray",
                    "inputs": digest(&(space.description(), &p, len)),
                    "points": ray.points,
                    "length": ray.total_length(),
                    "rate_defect": defect,
                }));
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Product { cmd } => match cmd {
            ProductCmd::Build { spec } => {
                let loaded = load_product_spec(&spec)?;
                let y = build_product(&loaded.factor1, &loaded.factor2, &loaded.spec)?;
                emit(json!({
                    "op": "product.build",
                    "inputs": digest(&loaded.doc),
                    "nodes": y.node_count(),
                    "dropped": y.dropped_nodes,
                    "max_level_defect": y.max_level_defect(),
                    "verdict": "pass",
                }));
                Ok(ExitCode::SUCCESS)
            }
            ProductCmd::Verify {
                spec,
                pairs,
                seed,
                report,
            } => {
                let mut config = hypro_cli::config::SuiteConfig {
                    seed,
                    output: report
                        .clone()
                        .unwrap_or_else(|| PathBuf::from("report.jsonl")),
                    spaces: vec![],
                    products: vec![spec.clone()],
                    operations: vec!["product".into()],
                    samples: Default::default(),
                    base_dir: PathBuf::from("."),
                };
                config.samples.product_pairs = pairs;
                let rep = run_suite(&config)?;
                print!("{}", rep.human_summary());
                if let Some(path) = report {
                    rep.write_to(&path)?;
                }
                Ok(if rep.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                })
            }
            ProductCmd::Export { spec, graph } => {
                let loaded = load_product_spec(&spec)?;
                let y = build_product(&loaded.factor1, &loaded.factor2, &loaded.spec)?;
                let mut out =
                    String::from("# columns: from,to,weight,flavor\nfrom,to,weight,flavor\n");
                for id in 0..y.node_count() {
                    for (t, wm, we) in y.neighbors(id) {
                        if t > id {
                            out.push_str(&format!("{id},{t},{wm},max\n"));
                            out.push_str(&format!("{id},{t},{we},euclidean\n"));
                        }
                    }
                }
                if let Some(parent) = graph.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(&graph, out)?;
                emit(json!({
                    "op": "product.export",
                    "inputs": digest(&loaded.doc),
                    "nodes": y.node_count(),
                    "file": graph.display().to_string(),
                }));
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Boundary { cmd } => match cmd {
            BoundaryCmd::Classify {
                spec,
                rays,
                auto,
                k,
            } => {
                let loaded = load_product_spec(&spec)?;
                let y = build_product(&loaded.factor1, &loaded.factor2, &loaded.spec)?;
                let node_rays: Vec<Vec<NodeId>> = match rays {
                    Some(path) => {
                        #[derive(serde::Deserialize)]
                        struct RaysFile {
                            rays: Vec<Vec<YPoint>>,
                        }
                        let parsed: RaysFile =
                            serde_json::from_str(&std::fs::read_to_string(&path)?)?;
                        parsed
                            .rays
                            .iter()
                            .map(|pts| {
                                pts.iter()
                                    .map(|p| {
                                        y.node_id(p).ok_or_else(|| {
                                            anyhow::anyhow!("ray point {p:?} is not a node")
                                        })
                                    })
                                    .collect()
                            })
                            .collect::<anyhow::Result<_>>()?
                    }
                    None => {
                        let z = loaded.doc.boundary_z.as_ref().and_then(|zp| y.node_id(zp));
                        auto_rays_from(&y, z, auto, k)?
                    }
                };
                for (i, ray) in node_rays.iter().enumerate() {
                    let c = classify_ray(&y, ray, DEFAULT_LAMBDA, y.spec.flavor)?;
                    emit(json!({
                        "op": "boundary.classify",
                        "ray": i,
                        "case": serde_json::to_value(&c.case)?,
                        "k": c.k_max,
                        "a_star_last": c.a_star_seq.last(),
                    }));
                }
                let rep = match factorization_check(
                    &y,
                    &node_rays,
                    DEFAULT_LAMBDA,
                    DEFAULT_THRESHOLD_FRACTION,
                    y.spec.flavor,
                ) {
                    Ok(rep) => rep,
                    Err(hypro_core::Error::Domain(msg)) => {
                        emit(json!({
                            "op": "boundary.factorization",
                            "inputs": digest(&loaded.doc),
                            "error": msg,
                            "verdict": "fail",
                        }));
                        return Ok(ExitCode::from(1));
                    }
                    Err(e) => return Err(e.into()),
                };
                let ok = rep.injective && rep.respects_equivalence;
                emit(json!({
                    "op": "boundary.factorization",
                    "inputs": digest(&loaded.doc),
                    "classes": rep.class_count,
                    "injective": rep.injective,
                    "respects_equivalence": rep.respects_equivalence,
                    "verdict": if ok { "pass" } else { "fail" },
                }));
                Ok(if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                })
            }
        },
        Command::Suite { cmd } => match cmd {
            SuiteCmd::Run { config } => {
                let cfg = match load_config(&config) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("configuration error: {e}");
                        return Ok(ExitCode::from(2));
                    }
                };
                let report = run_suite(&cfg)?;
                // HYPRO_OUT overrides the directory for relative outputs.
                let out = if cfg.output.is_absolute() {
                    cfg.output.clone()
                } else if let Ok(dir) = std::env::var("HYPRO_OUT") {
                    PathBuf::from(dir).join(&cfg.output)
                } else {
                    cfg.base_dir.join(&cfg.output)
                };
                report.write_to(&out)?;
                print!("{}", report.human_summary());
                eprintln!("report written to {}", out.display());
                Ok(if report.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                })
            }
            SuiteCmd::Export { report, what, out } => {
                export_plotdata(&report, &what, &out)?;
                emit(json!({
                    "op": "suite.export",
                    "what": what,
                    "file": out.display().to_string(),
                }));
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}
