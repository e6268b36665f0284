//! Command-line front end for the experiment drivers.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sketch_krylov::bench::{
    gen_laplacian, gen_synthetic, read_matrix_market, run_and_write, write_array, write_coordinate, Experiment,
    ExperimentConfig, MatrixSource, Method, SketchSpec, DEFAULT_SEED, EXIT_CERT_FAILED, EXIT_ERROR, EXIT_OK,
    GATE_THRESHOLD,
};
use sketch_krylov::rbgs::certify;
use sketch_krylov::{ClassicInterblock, Interblock, LsSolver, Matrix, PrecisionMode, SketchOperator};

const SEED_VAR: &str = "SKETCH_KRYLOV_SEED";

#[derive(Parser)]
#[command(name = "sketch-krylov", version, about = "Randomized block Gram-Schmidt experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Block QR of a synthetic or user-supplied matrix.
    Qr(RunArgs),
    /// Restarted block GMRES.
    Gmres(RunArgs),
    /// Leading eigenpairs by Rayleigh-Ritz or subspace iteration.
    Eig(RunArgs),
    /// Certify a stored factorization.
    Certify(CertifyArgs),
    /// Write a generated matrix in Matrix Market format.
    Gen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// bcgs, bmgs, bcgs2, rbgs (eig also: subspace).
    #[arg(long)]
    method: Option<String>,
    /// synthetic:NxM, laplacian:GxG[:shift] or file:PATH.
    #[arg(long)]
    matrix: Option<String>,
    /// kind:k[:seed] with kind rademacher, srht or identity.
    #[arg(long)]
    sketch: Option<String>,
    /// Block width m_p.
    #[arg(long)]
    block: Option<usize>,
    /// f32, f64 or multi.
    #[arg(long)]
    precision: Option<String>,
    /// richardson:l, bmgs:l, cg:l or direct.
    #[arg(long)]
    solver: Option<String>,
    /// rgs, cholqr:l, l2cholqr; for classical methods householder, cgs2, cholqr.
    #[arg(long)]
    interblock: Option<String>,
    /// Blocks per Krylov cycle.
    #[arg(long)]
    restart: Option<usize>,
    /// Number of GMRES restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Eigensolver outer iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// GMRES stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Exit with code 2 when delta or delta_tilde exceeds 0.1.
    #[arg(long)]
    gate: bool,
    /// Also write Q, R, S, P (QR runs).
    #[arg(long)]
    save_factors: bool,
    /// Output directory for history.csv and summary.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Directory holding q.mtx and r.mtx, and optionally s.mtx and p.mtx.
    #[arg(long)]
    factors: PathBuf,
    /// Original matrix, needed when the sketches are not stored.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// kind:k[:seed], needed when the sketches are not stored.
    #[arg(long)]
    sketch: Option<String>,
    /// Exit with code 2 when delta or delta_tilde exceeds 0.1.
    #[arg(long)]
    gate: bool,
}

#[derive(Args)]
struct GenArgs {
    /// synthetic:NxM or laplacian:GxG[:shift].
    source: String,
    /// Output .mtx file.
    #[arg(long)]
    out: PathBuf,
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_VAR) {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("{SEED_VAR}='{v}' is not an unsigned integer"))?)),
        Err(_) => Ok(None),
    }
}

fn resolve_seed(spec: &mut SketchSpec) -> Result<()> {
    if spec.seed.is_none() {
        spec.seed = Some(env_seed()?.unwrap_or(DEFAULT_SEED));
    }
    Ok(())
}

fn build_config(kind: Experiment, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text, kind).with_context(|| format!("in {}", path.display()))?
        }
        None => ExperimentConfig::defaults(kind),
    };
    cfg.experiment = kind;
    if let Some(v) = &args.method {
        cfg.method = v.parse()?;
    }
    if let Some(v) = &args.matrix {
        cfg.matrix = v.parse()?;
    }
    if let Some(v) = &args.sketch {
        cfg.sketch = v.parse()?;
    }
    if let Some(v) = args.block {
        cfg.block = v;
    }
    if let Some(v) = &args.precision {
        cfg.precision = v.parse::<PrecisionMode>()?;
    }
    if let Some(v) = &args.solver {
        cfg.solver = v.parse::<LsSolver>()?;
    }
    if let Some(v) = &args.interblock {
        if cfg.method.classic_variant().is_some() {
            cfg.classic_interblock = v.parse::<ClassicInterblock>()?;
        } else {
            cfg.interblock = v.parse::<Interblock>()?;
        }
    }
    if let Some(v) = args.restart {
        cfg.krylov_order = v;
    }
    if let Some(v) = args.restarts {
        cfg.restarts = v;
    }
    if let Some(v) = args.iterations {
        cfg.iterations = v;
    }
    if args.tol.is_some() {
        cfg.tol = args.tol;
    }
    cfg.gate |= args.gate;
    cfg.save_factors |= args.save_factors;
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if kind == Experiment::QrSynthetic && !matches!(cfg.matrix, MatrixSource::Synthetic { .. }) {
        cfg.experiment = Experiment::CustomQr;
    }
    resolve_seed(&mut cfg.sketch)?;
    Ok(cfg)
}

fn run(kind: Experiment, args: &RunArgs) -> Result<i32> {
    let cfg = build_config(kind, args)?;
    if cfg.method == Method::Subspace && kind != Experiment::Eig {
        bail!("method 'subspace' is only available for eig");
    }
    let out = run_and_write(&cfg)?;
    if cfg.out.is_some() {
        print!("{}", out.summary_text());
    } else {
        print!("{}", out.csv());
        eprint!("{}", out.summary_text());
    }
    Ok(out.exit_code)
}

fn load_dense(path: &Path) -> Result<Matrix> {
    Ok(read_matrix_market(path).with_context(|| format!("reading {}", path.display()))?.to_dense())
}

fn run_certify(args: &CertifyArgs) -> Result<i32> {
    let q = load_dense(&args.factors.join("q.mtx"))?;
    let r = load_dense(&args.factors.join("r.mtx"))?;
    let (sp, pp) = (args.factors.join("s.mtx"), args.factors.join("p.mtx"));
    let (s, p) = if sp.exists() && pp.exists() {
        (load_dense(&sp)?, load_dense(&pp)?)
    } else {
        let (Some(wpath), Some(spec)) = (&args.matrix, &args.sketch) else {
            bail!("no stored sketches in {}; pass --matrix and --sketch", args.factors.display());
        };
        let w = load_dense(wpath)?;
        let mut spec: SketchSpec = spec.parse()?;
        resolve_seed(&mut spec)?;
        let theta = SketchOperator::new(spec.kind, spec.k, w.rows(), spec.seed.unwrap_or(DEFAULT_SEED))?;
        (theta.apply(&q)?, theta.apply(&w)?)
    };
    let rep = certify(&s, &p, &r)?;
    print!("{}", rep.to_kv());
    Ok(if args.gate && !rep.passes(GATE_THRESHOLD) { EXIT_CERT_FAILED } else { EXIT_OK })
}

fn run_gen(args: &GenArgs) -> Result<i32> {
    match args.source.parse::<MatrixSource>()? {
        MatrixSource::Synthetic { n, m } => write_array(&args.out, &gen_synthetic(n, m)?)?,
        MatrixSource::Laplacian { grid, shift } => write_coordinate(&args.out, &gen_laplacian(&grid, shift)?)?,
        MatrixSource::File(_) => bail!("gen takes a synthetic or laplacian source"),
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Qr(a) => run(Experiment::QrSynthetic, a),
        Command::Gmres(a) => run(Experiment::Gmres, a),
        Command::Eig(a) => run(Experiment::Eig, a),
        Command::Certify(a) => run_certify(a),
        Command::Gen(a) => run_gen(a),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
