//! psdpack: inner approximations of the PSD cone from packed sub-cones.
//!
//! Subcommands: `pack` (Grassmannian packing), `gen` (structured frame
//! families), `project` (Frobenius projection onto a cone sum),
//! `export-sdp` (restricted SDP documents), `fig1` / `fig2` (experiment
//! harness). Exit codes: 2 usage, 3 numerical failure, 4 non-convergence,
//! 5 catalog miss.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use psdpack::coneapprox::{export_restricted_sdp, project_onto_cone_sum, ConeSum};
use psdpack::frames::FrameSet;
use psdpack::generators::{chordal_frames, dd_frames, fw_frames, parse_edge_list, verify_chordal};
use psdpack::packing::{pack, PackingConfig, TargetRule};
use psdpack::symmat::SymMatrix;

use psdpack_cli::config::{parse_s_range, ExperimentConfig, ExperimentKind, MethodSpec};
use psdpack_cli::experiments::{run_fig1, run_fig2};
use psdpack_cli::output::provenance_header;
use psdpack_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "psdpack", version, about = "PSD cone inner approximation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack N s-dimensional subspaces of R^n by alternating projection.
    Pack(PackArgs),
    /// Generate a structured frame family (dd, fw, chordal).
    Gen(GenArgs),
    /// Project a symmetric matrix onto a cone sum.
    Project(ProjectArgs),
    /// Rewrite an SDP over a cone sum into block form (no solving).
    #[command(name = "export-sdp")]
    ExportSdp(ExportArgs),
    /// Approximation-error comparison across methods.
    Fig1(FigArgs),
    /// Minimal frame count to reach a target mean error.
    Fig2(FigArgs),
}

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long = "N")]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// "rankin" or a fixed chordal-distance target.
    #[arg(long, default_value = "rankin")]
    target: String,
    /// Shrink the target by this factor on stall.
    #[arg(long)]
    shrink: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// dd | fw | chordal
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    /// Factor width (family fw).
    #[arg(long)]
    k: Option<usize>,
    /// Edge-list file (family chordal).
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProjectArgs {
    /// Target matrix JSON ({"dim": n, "rows": [...]}).
    #[arg(long)]
    target: PathBuf,
    /// Frame-set JSON defining the cone sum.
    #[arg(long)]
    frames: PathBuf,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Include the per-frame PSD witnesses in the output.
    #[arg(long)]
    emit_witness: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    /// Objective matrix JSON.
    #[arg(long)]
    objective: PathBuf,
    /// Constraint matrix JSON files, paired with --rhs by position.
    #[arg(long = "constraint")]
    constraints: Vec<PathBuf>,
    /// Right-hand sides, one per constraint.
    #[arg(long = "rhs")]
    rhs: Vec<f64>,
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FigArgs {
    /// JSON config mirroring the experiment parameters (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// small | paper
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated method list: dd, sdd, fw:K, chordal:PATH, packed:N.
    #[arg(long)]
    methods: Option<String>,
    /// Sub-dimension range: "1..8" or "2,4,6".
    #[arg(long)]
    s_range: Option<String>,
    /// Ambient-dimension range for fig2.
    #[arg(long)]
    n_range: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Target mean error (fig2).
    #[arg(long)]
    threshold: Option<f64>,
    /// Frame-count search cap (fig2).
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    pack_max_iter: Option<usize>,
    #[arg(long)]
    pack_tol: Option<f64>,
    #[arg(long)]
    pack_restarts: Option<usize>,
    /// Directory holding the packing catalog and other state.
    #[arg(long, default_value = ".")]
    workdir: PathBuf,
    /// Fail with a catalog miss instead of computing absent packings.
    #[arg(long)]
    no_compute: bool,
    /// Record wall-clock data (header timestamp, seconds column).
    #[arg(long)]
    timestamps: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FileProvenance {
    tool: &'static str,
    version: &'static str,
    args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn file_provenance(seed: Option<u64>) -> FileProvenance {
    FileProvenance {
        tool: "psdpack",
        version: env!("CARGO_PKG_VERSION"),
        args: std::env::args().skip(1).collect(),
        seed,
    }
}

fn read_matrix(path: &PathBuf) -> CliResult<SymMatrix> {
    Ok(SymMatrix::from_json_str(&fs::read_to_string(path)?)?)
}

fn read_frames(path: &PathBuf) -> CliResult<FrameSet> {
    Ok(FrameSet::from_json_str(&fs::read_to_string(path)?)?)
}

fn cmd_pack(args: PackArgs) -> CliResult<()> {
    let target = match args.target.as_str() {
        "rankin" => TargetRule::Rankin,
        value => TargetRule::Value(value.parse().map_err(|_| {
            CliError::Usage(format!("--target must be \"rankin\" or a number, got {value:?}"))
        })?),
    };
    if args.count > 20 {
        eprintln!(
            "warning: packing quality is known to degrade above 20 subspaces (N = {}); \
             relying on restarts",
            args.count
        );
    }
    let cfg = PackingConfig {
        n: args.n,
        s: args.s,
        count: args.count,
        target,
        max_iter: args.max_iter,
        tol: args.tol,
        restarts: args.restarts,
        seed: args.seed,
        shrink: args.shrink,
    };
    let result = pack(&cfg)?;
    fs::write(&args.out, result.frames.to_json())?;
    println!(
        "packed N={} s={} in R^{}: min chordal {:.9} (restart {}, {} iterations, converged: {})",
        args.count,
        args.s,
        args.n,
        result.achieved_min_chordal,
        result.restart_index,
        result.iterations_used,
        result.converged
    );
    if !result.converged {
        return Err(CliError::NonConvergence(format!(
            "packing stopped at the iteration cap {}; result written to {}",
            cfg.max_iter,
            args.out.display()
        )));
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> CliResult<()> {
    let set = match args.family.as_str() {
        "dd" => {
            let n = args.n.ok_or_else(|| CliError::Usage("--family dd needs --n".into()))?;
            dd_frames(n)?
        }
        "fw" => {
            let n = args.n.ok_or_else(|| CliError::Usage("--family fw needs --n".into()))?;
            let k = args.k.ok_or_else(|| CliError::Usage("--family fw needs --k".into()))?;
            fw_frames(n, k)?
        }
        "chordal" => {
            let path = args
                .graph
                .ok_or_else(|| CliError::Usage("--family chordal needs --graph".into()))?;
            let (n, edges) = parse_edge_list(&fs::read_to_string(&path)?)?;
            if let Some(arg_n) = args.n {
                if arg_n != n {
                    return Err(CliError::Usage(format!(
                        "--n {arg_n} disagrees with the graph file ({n} vertices)"
                    )));
                }
            }
            let graph = verify_chordal(n, &edges)?;
            chordal_frames(&graph)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown family {other:?} (expected dd, fw, chordal)"
            )))
        }
    };
    println!("generated {} frames ({})", set.len(), set.provenance().params);
    fs::write(&args.out, set.to_json())?;
    Ok(())
}

#[derive(Serialize)]
struct ProjectionJson {
    provenance: FileProvenance,
    n: usize,
    error: f64,
    kkt_residual: f64,
    iterations: usize,
    converged: bool,
    matrix: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<Vec<Vec<f64>>>>,
}

fn cmd_project(args: ProjectArgs) -> CliResult<()> {
    let target = read_matrix(&args.target)?;
    let cone = ConeSum::new(read_frames(&args.frames)?)?;
    let result = project_onto_cone_sum(&target, &cone, args.tol, args.max_iter)?;
    let witnesses = args.emit_witness.then(|| {
        result
            .witnesses
            .iter()
            .map(|w| {
                (0..w.nrows())
                    .map(|i| (0..w.ncols()).map(|j| w[(i, j)]).collect())
                    .collect()
            })
            .collect()
    });
    let doc = ProjectionJson {
        provenance: file_provenance(None),
        n: target.dim(),
        error: result.error,
        kkt_residual: result.kkt_residual,
        iterations: result.iterations,
        converged: result.converged,
        matrix: serde_json::from_str(&result.matrix.to_json()).expect("matrix json"),
        witnesses,
    };
    fs::write(&args.out, serde_json::to_string_pretty(&doc).expect("projection json"))?;
    println!(
        "projection error {:.9}, kkt residual {:.3e}, {} sweeps, converged: {}",
        result.error, result.kkt_residual, result.iterations, result.converged
    );
    if !result.converged {
        return Err(CliError::NonConvergence(format!(
            "projection stopped at the sweep cap {}; result written to {}",
            args.max_iter,
            args.out.display()
        )));
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> CliResult<()> {
    if args.constraints.len() != args.rhs.len() {
        return Err(CliError::Usage(format!(
            "{} constraints but {} rhs values",
            args.constraints.len(),
            args.rhs.len()
        )));
    }
    let objective = read_matrix(&args.objective)?;
    let mut constraints = Vec::with_capacity(args.constraints.len());
    for (path, b) in args.constraints.iter().zip(&args.rhs) {
        constraints.push((read_matrix(path)?, *b));
    }
    let cone = ConeSum::new(read_frames(&args.frames)?)?;
    let doc = export_restricted_sdp(&objective, &constraints, &cone)?;
    fs::write(&args.out, doc.to_json())?;
    println!(
        "exported restricted SDP: {} blocks, {} constraints",
        doc.blocks.len(),
        doc.rhs.len()
    );
    Ok(())
}

fn experiment_config(kind: ExperimentKind, args: &FigArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match (&args.config, args.preset.as_deref(), kind) {
        (Some(path), _, _) => {
            let cfg = ExperimentConfig::from_json_str(&fs::read_to_string(path)?)?;
            if cfg.experiment != kind {
                return Err(CliError::Usage(
                    "config file targets the other experiment".into(),
                ));
            }
            cfg
        }
        (None, Some("small"), ExperimentKind::Fig1) => ExperimentConfig::fig1_small(),
        (None, Some("paper"), ExperimentKind::Fig1) | (None, None, ExperimentKind::Fig1) => {
            ExperimentConfig::fig1_default()
        }
        (None, Some("small"), ExperimentKind::Fig2) => ExperimentConfig {
            n_range: (2..=4).collect(),
            trials: 20,
            pack_max_iter: 1_500,
            pack_restarts: 3,
            cap: 256,
            ..ExperimentConfig::fig2_default()
        },
        (None, Some("paper"), ExperimentKind::Fig2) | (None, None, ExperimentKind::Fig2) => {
            ExperimentConfig::fig2_default()
        }
        (None, Some(other), _) => {
            return Err(CliError::Usage(format!(
                "unknown preset {other:?} (expected small or paper)"
            )))
        }
    };
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(methods) = &args.methods {
        cfg.methods = methods
            .split(',')
            .map(MethodSpec::parse)
            .collect::<CliResult<_>>()?;
    }
    if let Some(s_range) = &args.s_range {
        cfg.s_range = parse_s_range(s_range)?;
    }
    if let Some(n_range) = &args.n_range {
        cfg.n_range = parse_s_range(n_range)?;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    if let Some(max_iter) = args.max_iter {
        cfg.max_iter = max_iter;
    }
    if let Some(threshold) = args.threshold {
        cfg.threshold = threshold;
    }
    if let Some(cap) = args.cap {
        cfg.cap = cap;
    }
    if let Some(v) = args.pack_max_iter {
        cfg.pack_max_iter = v;
    }
    if let Some(v) = args.pack_tol {
        cfg.pack_tol = v;
    }
    if let Some(v) = args.pack_restarts {
        cfg.pack_restarts = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_fig(kind: ExperimentKind, args: FigArgs) -> CliResult<()> {
    let cfg = experiment_config(kind, &args)?;
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let out_path = args
        .out
        .clone()
        .or_else(|| cfg.out.clone().map(PathBuf::from))
        .unwrap_or_else(|| match kind {
            ExperimentKind::Fig1 => PathBuf::from("fig1.csv"),
            ExperimentKind::Fig2 => PathBuf::from("fig2.csv"),
        });
    let (name, body) = match kind {
        ExperimentKind::Fig1 => {
            let out = run_fig1(&cfg, &args.workdir, args.no_compute)?;
            print!("{}", out.summary_table());
            ("fig1", out.csv_body(args.timestamps))
        }
        ExperimentKind::Fig2 => {
            let out = run_fig2(&cfg, &args.workdir, args.no_compute)?;
            print!("{}", out.csv_body());
            ("fig2", out.csv_body())
        }
    };
    let header = provenance_header(name, &argv, Some(cfg.seed), args.timestamps);
    fs::write(&out_path, format!("{header}{body}"))?;
    eprintln!("{name}: wrote {}", out_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Pack(args) => cmd_pack(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Project(args) => cmd_project(args),
        Command::ExportSdp(args) => cmd_export(args),
        Command::Fig1(args) => cmd_fig(ExperimentKind::Fig1, args),
        Command::Fig2(args) => cmd_fig(ExperimentKind::Fig2, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
