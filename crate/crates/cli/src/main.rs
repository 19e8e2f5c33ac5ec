//! `sparsekit`: generate instances, solve, compute constants, certify and run
//! seeded experiments from the command line.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sparsekit_core::bounds::certify;
use sparsekit_core::constants::{check_condition, RipOptions, DEFAULT_BUDGET};
use sparsekit_core::harness::{run_experiment, validate_tails, write_outputs, ExperimentConfig};
use sparsekit_core::solvers::{basis_pursuit, dantzig_selector, l2_constrained_l1, lasso};
use sparsekit_core::{
    model, seed, ConditionVariant, ConstantSet, Ensemble, Error, NoiseParams, NoiseSpec, Program,
    RecoveryResult, RipReport, SensingMatrix, SolverOptions, Theorem,
};

use crate::io::{emit_json, parse_amplitude, parse_range, read_signal, read_vector, write_vector};

#[derive(Parser, Debug)]
#[command(name = "sparsekit", version, about = "Sparse recovery by constrained l1 minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sensing matrix and write it in the text format.
    GenMatrix(GenMatrixArgs),
    /// Draw a sparse signal, optionally with an observation `y = F beta + z`.
    GenSignal(GenSignalArgs),
    /// Solve one recovery program.
    Solve(SolveArgs),
    /// Compute restricted isometry constants and recovery conditions.
    Constants(ConstantsArgs),
    /// Check a solution against a theorem's error bound.
    Verify(VerifyArgs),
    /// Run a seeded experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Monte Carlo check of the Gaussian noise tail events.
    Tails(TailsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Bernoulli,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Gaussian => Ensemble::Gaussian,
            EnsembleArg::Bernoulli => Ensemble::Bernoulli,
        }
    }
}

#[derive(Args, Debug)]
struct GenMatrixArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    ensemble: EnsembleArg,
    /// Keep the raw columns instead of scaling them to unit norm.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenSignalArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    k: usize,
    /// `unit`, `uniform:A:B` or `gaussian:SIGMA`.
    #[arg(long, default_value = "unit", value_parser = parse_amplitude)]
    amplitude: sparsekit_core::Amplitude,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Signal JSON output; stdout if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Matrix to observe the signal through.
    #[arg(long, requires = "y_out")]
    matrix: Option<PathBuf>,
    /// Noise label: `noiseless`, `l2_bounded:EPS`, `correlation_bounded:LAMBDA`
    /// or `gaussian:SIGMA`.
    #[arg(long, default_value = "noiseless")]
    noise: NoiseSpec,
    /// Where to write `y`, one real per line.
    #[arg(long, requires = "matrix")]
    y_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    program: Program,
    #[arg(long)]
    matrix: PathBuf,
    /// Observation vector, one real per line or a JSON array.
    #[arg(long)]
    y: PathBuf,
    /// Dantzig selector bound on `||F^T r||_inf`.
    #[arg(long)]
    lambda: Option<f64>,
    /// Residual radius for the l2-constrained program.
    #[arg(long)]
    eta: Option<f64>,
    /// Lasso multiplier.
    #[arg(long)]
    rho: Option<f64>,
    /// Feasibility and optimality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Sparsity levels: `3`, `1..4` or `1,2,5`.
    #[arg(long, default_value = "1")]
    k: String,
    /// Second theta index; tabulates `theta_{k,kp}` for every pair.
    #[arg(long)]
    kp: Option<String>,
    /// Comma-separated condition ids; all when omitted.
    #[arg(long, value_delimiter = ',')]
    variants: Vec<ConditionVariant>,
    /// Support evaluations allowed per constant before falling back to
    /// Monte Carlo lower bounds.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 2000)]
    mc_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Output of `solve`.
    #[arg(long)]
    solution: PathBuf,
    /// True signal: signal JSON, JSON array or one real per line.
    #[arg(long)]
    truth: PathBuf,
    /// Output of `constants`.
    #[arg(long)]
    constants: PathBuf,
    #[arg(long)]
    theorem: Theorem,
    /// Sparsity level; defaults to the truth's declared k.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Defaults to the length of the truth.
    #[arg(long)]
    p: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long, env = "SPARSEKIT_SEED")]
    seed: Option<u64>,
    /// Directory that relative output paths are resolved against.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TailsArgs {
    /// Matrix file; otherwise a Gaussian matrix is drawn from --n, --p.
    #[arg(long, conflicts_with_all = ["n", "p"])]
    matrix: Option<PathBuf>,
    #[arg(long, requires = "p")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    p: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn gen_matrix(args: GenMatrixArgs) -> Result<()> {
    let f = model::generate_matrix(args.n, args.p, &args.ensemble.into(), !args.no_normalize, args.seed)?;
    match args.output {
        Some(path) => f.write_text(&path)?,
        None => print!("{}", f.to_text()),
    }
    Ok(())
}

fn gen_signal(args: GenSignalArgs) -> Result<()> {
    let beta = model::generate_signal(args.p, args.k, &args.amplitude, seed::derive(args.seed, &[0]))?;
    if let (Some(matrix), Some(y_out)) = (&args.matrix, &args.y_out) {
        let f = SensingMatrix::read_text(matrix)?;
        let obs = model::observe(&f, &beta, &args.noise, seed::derive(args.seed, &[1]))?;
        write_vector(y_out, &obs.y)?;
    }
    emit_json(&beta, args.output.as_deref())
}

fn solve(args: SolveArgs) -> Result<()> {
    let f = SensingMatrix::read_text(&args.matrix)?;
    let y = read_vector(&args.y)?;
    let mut opts = SolverOptions::default();
    if let Some(tol) = args.tol {
        opts.feasibility_tol = tol;
        opts.optimality_tol = tol;
    }
    if let Some(it) = args.max_iterations {
        opts.max_iterations = it;
    }
    opts.validate()?;
    let need = |v: Option<f64>, flag: &str| -> Result<f64> {
        v.with_context(|| format!("--program {} needs --{flag}", args.program))
    };
    let result = match args.program {
        Program::P => basis_pursuit(&f, &y, &opts)?,
        Program::Ds => dantzig_selector(&f, &y, need(args.lambda, "lambda")?, &opts)?,
        Program::P1 => l2_constrained_l1(&f, &y, need(args.eta, "eta")?, &opts)?,
        Program::Lasso => lasso(&f, &y, need(args.rho, "rho")?, &opts)?,
    };
    emit_json(&result.to_json(), args.output.as_deref())
}

fn constants(args: ConstantsArgs) -> Result<()> {
    let f = SensingMatrix::read_text(&args.matrix)?;
    let ks = parse_range(&args.k)?;
    let kps = args.kp.as_deref().map(parse_range).transpose()?.unwrap_or_default();
    let variants = if args.variants.is_empty() {
        ConditionVariant::ALL.to_vec()
    } else {
        args.variants
    };
    let opts = RipOptions {
        budget: args.budget,
        mc_trials: args.mc_trials,
        seed: args.seed,
    };
    let p = f.p();
    let mut report = RipReport::for_conditions(&f, &ks, &variants, &opts)?;
    for &k in ks.iter().filter(|&&k| k <= p) {
        report.add_delta(&f, k, &opts)?;
        for &kp in kps.iter().filter(|&&kp| k + kp <= p) {
            report.add_theta(&f, k, kp, &opts)?;
        }
    }
    let mut conditions = Vec::new();
    for &k in &ks {
        for &v in &variants {
            match check_condition(&report, k, v) {
                Ok(c) => conditions.push(c),
                Err(Error::IncompleteReport { missing }) => {
                    eprintln!("skipping {v} at k = {k}: needs {}", missing.join(", "));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    emit_json(&report.to_json(&conditions), args.output.as_deref())
}

fn verify(args: VerifyArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.solution)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    let result: RecoveryResult = serde_json::from_str::<sparsekit_core::solvers::SolveJson>(&text)
        .with_context(|| format!("parsing {}", args.solution.display()))?
        .into();
    let truth = read_signal(&args.truth)?;
    let text = std::fs::read_to_string(&args.constants)
        .with_context(|| format!("reading {}", args.constants.display()))?;
    let report = RipReport::from_json(
        &serde_json::from_str(&text).with_context(|| format!("parsing {}", args.constants.display()))?,
    );
    let k = args.k.unwrap_or_else(|| truth.k().max(1));
    let set = ConstantSet::from_report(args.theorem, &report, k)?;
    let noise = NoiseParams {
        lambda: args.lambda,
        epsilon: args.epsilon,
        eta: args.eta,
        sigma: args.sigma,
        n: args.n,
        p: Some(args.p.unwrap_or(truth.p())),
    };
    let cert = certify(&result, &truth, &set, &noise)?;
    emit_json(&cert.to_json(), args.output.as_deref())
}

fn resolve(dir: &Path, path: &mut Option<PathBuf>) {
    if let Some(p) = path {
        if p.is_relative() {
            *p = dir.join(&*p);
        }
    }
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let out = &mut cfg.output;
        for path in [&mut out.csv, &mut out.json, &mut out.plotdata, &mut out.trials] {
            resolve(dir, path);
        }
    }
    for path in [&cfg.output.csv, &cfg.output.json, &cfg.output.plotdata, &cfg.output.trials]
        .into_iter()
        .flatten()
    {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let out = run_experiment(&cfg)?;
    write_outputs(&out.table, &out.records, &cfg.output)?;

    println!("matrix {} seed {}", out.table.matrix_id, out.table.seed);
    println!("{:>3} {:<22} {:<6} {:>8} {:>12} {:>10}", "k", "regime", "prog", "success", "max_error", "cert_pass");
    for c in &out.table.cells {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"));
        println!(
            "{:>3} {:<22} {:<6} {:>8.3} {:>12} {:>10}",
            c.k,
            c.regime,
            c.program.to_string(),
            c.success_rate,
            fmt(c.max_error),
            c.cert_pass_rate.map_or_else(|| "-".to_string(), |x| format!("{x:.3}")),
        );
    }
    if !out.table.failures.is_empty() {
        eprintln!("{} trials did not reach an optimal solve", out.table.failures.len());
    }
    Ok(())
}

fn tails(args: TailsArgs) -> Result<()> {
    let f = match (&args.matrix, args.n, args.p) {
        (Some(path), _, _) => SensingMatrix::read_text(path)?,
        (None, Some(n), Some(p)) => {
            model::generate_matrix(n, p, &Ensemble::Gaussian, true, seed::derive(args.seed, &[0]))?
        }
        _ => bail!("tails needs --matrix or both --n and --p"),
    };
    let report = validate_tails(&f, args.sigma, args.trials, seed::derive(args.seed, &[1]))?;
    emit_json(&report, args.output.as_deref())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenMatrix(a) => gen_matrix(a),
        Command::GenSignal(a) => gen_signal(a),
        Command::Solve(a) => solve(a),
        Command::Constants(a) => constants(a),
        Command::Verify(a) => verify(a),
        Command::Experiment(a) => experiment(a),
        Command::Tails(a) => tails(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
