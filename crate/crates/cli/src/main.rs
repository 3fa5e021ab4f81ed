//! Command line front end: evaluate problem documents, run the
//! self-verification suite, and sample reference ensembles.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 malformed problem document,
//! 3 degenerate problem (no usable information), 4 verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use qcrb_core::problem::{matrix_to_data, parse_spec, ProblemSpec};
use qcrb_core::report::{report_to_csv, report_to_json, run_compute};
use qcrb_core::states::{random_hamiltonian, random_mixed, random_pure};
use qcrb_core::verify::{run_verify, VerifyConfig};
use qcrb_core::Error;

#[derive(Parser)]
#[command(
    name = "qcrb",
    version,
    about = "Estimation bounds for unitary time evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a problem document and write the report.
    Compute(ComputeArgs),
    /// Run the randomized self-verification suite.
    Verify(VerifyArgs),
    /// Draw a reference-ensemble matrix as a pasteable spec fragment.
    Sample(SampleArgs),
}

#[derive(clap::Args)]
struct ComputeArgs {
    /// Problem document (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the document's chain orders (comma separated, odd, ascending).
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Dimensions the random ensembles cycle through.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4, 5, 6, 7, 8])]
    dims: Vec<usize>,
    /// Random instances per property.
    #[arg(long, default_value_t = 120)]
    samples: usize,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(clap::Args)]
struct SampleArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, value_enum)]
    ensemble: Ensemble,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ensemble {
    /// Hermitian matrix with unit spectral norm.
    Gue,
    /// Full-rank mixed state.
    Ginibre,
    /// Haar-random pure state.
    PureHaar,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(args),
        Command::Verify(args) => verify(args),
        Command::Sample(args) => sample(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn write_out(out: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn compute(args: ComputeArgs) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(&args.spec)?;
    let mut spec: ProblemSpec = parse_spec(&text)?;
    if let Some(orders) = args.orders {
        spec.orders = orders;
        spec.validate()?;
    }
    let report = run_compute(&spec)?;
    let content = match args.format {
        Format::Json => report_to_json(&report)?,
        Format::Csv => report_to_csv(&report),
    };
    write_out(args.out.as_ref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let cfg = VerifyConfig {
        seed: args.seed,
        dims: args.dims,
        samples: args.samples,
        tolerance_scale: args.tolerance_scale,
    };
    let outcomes = run_verify(&cfg)?;
    let mut failed = 0usize;
    for o in &outcomes {
        if o.pass {
            println!(
                "PASS {} (worst {:.3e}, tolerance {:.3e}, {} checks)",
                o.name, o.worst, o.tolerance, o.cases
            );
        } else {
            failed += 1;
            println!(
                "FAIL {} (worst {:.3e}, tolerance {:.3e}, {} checks) at {}",
                o.name, o.worst, o.tolerance, o.cases, o.detail
            );
        }
    }
    println!(
        "{} of {} properties passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

fn sample(args: SampleArgs) -> Result<ExitCode, Error> {
    let (label, fragment) = match args.ensemble {
        Ensemble::Gue => {
            let h = random_hamiltonian(args.dim, args.seed)?;
            ("gue", matrix_to_data(h.matrix()))
        }
        Ensemble::Ginibre => {
            let rho = random_mixed(args.dim, args.seed)?;
            ("ginibre", matrix_to_data(rho.matrix()))
        }
        Ensemble::PureHaar => {
            let rho = random_pure(args.dim, args.seed)?;
            ("pure_haar", matrix_to_data(rho.matrix()))
        }
    };
    // `value` is a spec fragment: paste it as `hamiltonian` or `state`.
    let doc = serde_json::json!({
        "dimension": args.dim,
        "ensemble": label,
        "seed": args.seed,
        "value": { "explicit": { "matrix": fragment } },
    });
    let mut content = serde_json::to_string_pretty(&doc)?;
    content.push('\n');
    write_out(args.out.as_ref(), &content)?;
    Ok(ExitCode::SUCCESS)
}
