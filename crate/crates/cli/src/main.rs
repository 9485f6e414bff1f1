use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wbicat::coherence::{run_suite, Report, SuiteConfig, DEFAULT_TOL};
use wbicat::instance::{self, generate_suite_instance, Instance, Limits};
use wbicat::linalg;
use wbicat::tensor::{self, TensorKind};

/// Relative tensor products and coherence checks for finite-dimensional
/// bimodules.
#[derive(Parser)]
#[command(name = "wbicat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the coherence suite on a generated or loaded instance.
    Verify(VerifyArgs),
    /// Print a random instance as JSON.
    Gen(GenArgs),
    /// Describe both tensor products of two bimodules.
    Tensor(TensorArgs),
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound on chain member dimensions and their consecutive products.
    #[arg(long, default_value_t = 40)]
    max_dim: usize,
    #[arg(long, default_value_t = Limits::default().max_blocks)]
    max_blocks: usize,
    #[arg(long, default_value_t = Limits::default().max_block_size)]
    max_block_size: usize,
    #[arg(long, default_value_t = Limits::default().max_multiplicity)]
    max_multiplicity: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_blocks: self.max_blocks,
            max_block_size: self.max_block_size,
            max_multiplicity: self.max_multiplicity,
            max_dim: self.max_dim,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    limits: LimitArgs,
    /// Base tolerance, scaled by the norms along each diagram.
    #[arg(long, env = "BIMODULE_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Only run checks whose name starts with one of these prefixes.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Instance file; a random instance is generated from --seed otherwise.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Worker threads (1 runs sequentially).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TensorArgs {
    /// Instance file; a random instance is generated from --seed otherwise.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    max_dim: usize,
    /// Label of the left factor (first chain member by default).
    #[arg(long)]
    left: Option<String>,
    /// Label of the right factor (second chain member by default).
    #[arg(long)]
    right: Option<String>,
    #[arg(long)]
    json: bool,
}

/// A failure that maps to exit code 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn load_instance(path: &Option<PathBuf>, seed: u64, limits: &Limits) -> Result<Instance, Fatal> {
    let spec = match path {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| Fatal(format!("{}: {e}", p.display())))?;
            instance::load(&bytes).map_err(|e| Fatal(format!("{}: {e}", p.display())))?
        }
        None => generate_suite_instance(seed, limits)?,
    };
    Ok(Instance::from_spec(spec)?)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Fatal> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fatal(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn human_report(report: &Report) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let defect = c.defect.map_or("-".to_string(), |d| format!("{d:.3e}"));
        s.push_str(&format!("{status:<15} {:<48} defect {defect:<10} tol {:.1e}", c.name, c.tolerance));
        if let Some(m) = &c.message {
            s.push_str(&format!("  ({m})"));
        }
        s.push('\n');
    }
    let m = &report.summary;
    s.push_str(&format!(
        "{} checks: {} passed, {} failed, {} errors, max defect {:.3e}\n",
        m.total, m.passed, m.failed, m.errors, m.max_defect
    ));
    s
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, Fatal> {
    let limits = args.limits.limits();
    limits.validate()?;
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Fatal(format!("tolerance must be positive, got {}", args.tol)));
    }
    let inst = load_instance(&args.instance, args.limits.seed, &limits)?;
    let cfg = SuiteConfig { tol: args.tol, jobs: args.jobs, filter: args.suite.clone(), mutation: None };
    let report = run_suite(&inst, &cfg);
    let text = if args.json { report.to_json() + "\n" } else { human_report(&report) };
    emit(&text, &args.out)?;
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn gen(args: &GenArgs) -> Result<ExitCode, Fatal> {
    let limits = args.limits.limits();
    let spec = generate_suite_instance(args.limits.seed, &limits)?;
    emit(&(instance::save(&spec)? + "\n"), &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn describe(args: &TensorArgs) -> Result<ExitCode, Fatal> {
    let limits = Limits { max_dim: args.max_dim, ..Limits::default() };
    let inst = load_instance(&args.instance, args.seed, &limits)?;
    let pick = |label: &Option<String>, pos: usize| -> Result<usize, Fatal> {
        match label {
            Some(l) => inst.find(l).ok_or_else(|| Fatal(format!("unknown bimodule {l:?}"))),
            None => inst.chain.get(pos).copied().ok_or_else(|| Fatal("the instance has no such chain member".into())),
        }
    };
    let (i, j) = (pick(&args.left, 0)?, pick(&args.right, 1)?);
    let (x, y) = (inst.bimodules[i].clone(), inst.bimodules[j].clone());
    if x.right_algebra() != y.left_algebra() {
        return Err(Fatal(format!(
            "{} acts on the right by blocks {:?} but {} acts on the left by blocks {:?}",
            inst.label(i),
            x.right_algebra().blocks(),
            inst.label(j),
            y.left_algebra().blocks()
        )));
    }
    let left = tensor::tensor_left(&x, &y)?;
    let right = tensor::tensor_right(&x, &y)?;
    let m = tensor::m_iso(&x, &y)?;
    let mm = linalg::op_norm(&(m.matrix().adjoint() * m.matrix() - linalg::identity(m.matrix().ncols())));
    let product = |p: &tensor::TensorProduct| {
        json!({
            "dim": p.dim(),
            "gramRank": p.gram_rank(),
            "multiplicities": p.result().multiplicities(),
        })
    };
    let kinds = [(TensorKind::Left, &left), (TensorKind::Right, &right)];
    if args.json {
        let mut doc = json!({
            "leftFactor": {"label": inst.label(i), "dim": x.dim(), "multiplicities": x.multiplicities()},
            "rightFactor": {"label": inst.label(j), "dim": y.dim(), "multiplicities": y.multiplicities()},
            "mIsometryDefect": mm,
        });
        for (kind, p) in kinds {
            doc[kind.as_str()] = product(p);
        }
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{}: dim {}, multiplicities {:?}", inst.label(i), x.dim(), x.multiplicities());
        println!("{}: dim {}, multiplicities {:?}", inst.label(j), y.dim(), y.multiplicities());
        for (kind, p) in kinds {
            println!(
                "{} {} {}: dim {}, gram rank {}, multiplicities {:?}",
                inst.label(i),
                kind.symbol(),
                inst.label(j),
                p.dim(),
                p.gram_rank(),
                p.result().multiplicities()
            );
        }
        println!("‖m*m − 1‖ = {mm:.3e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
        Command::Tensor(a) => describe(a),
    };
    outcome.unwrap_or_else(|Fatal(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}
