//! `distillery`: datasets and self-checks for exchange-driven entanglement
//! distillation.
//!
//! Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 I/O
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use distillery::experiments::{
    self, Format, ParetoFamilyConfig, ThreePairSampleConfig, TwoPairIterateConfig, TwoPairSweepConfig,
};
use distillery::verify::{self, VerifyOptions};
use distillery::Error;

const THREADS_ENV: &str = "DISTILLERY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "distillery", version, about = "Entanglement distillation with exchange interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-pair output fidelity over a grid of input fidelities in [1/2, 1].
    TwoPairSweep(SweepArgs),
    /// Repeated application of the two-pair map.
    TwoPairIterate(IterateArgs),
    /// Random three-pair protocols: one cloud and one front file per fidelity.
    ThreePairSample(SampleArgs),
    /// Closed form, simulation and iterated two-pair comparison of the
    /// Pareto-efficient family.
    ParetoFamily(FamilyArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Output file (directory for three-pair-sample); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Alice's pulse area; repeat for several curves.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Vec<f64>,
    /// Bob's pulse area [default: -alpha].
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Anisotropy of the exchange coupling.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    xi: f64,
    #[arg(long, default_value_t = experiments::DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct IterateArgs {
    /// Starting fidelity.
    #[arg(short = 'F', long = "fidelity", default_value_t = 0.75)]
    fidelity: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = experiments::DEFAULT_ROUNDS)]
    rounds: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Input fidelity; repeat for several clouds [default: 0.6 0.75 0.9].
    #[arg(short = 'F', long = "fidelity")]
    fidelity: Vec<f64>,
    #[arg(long, default_value_t = experiments::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = experiments::DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "three_pair_samples")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Input fidelity; repeat for several [default: 0.55 to 1 in steps of 0.05].
    #[arg(short = 'F', long = "fidelity")]
    fidelity: Vec<f64>,
    /// Number of family parameters between 0 and π/3 inclusive.
    #[arg(long, default_value_t = experiments::DEFAULT_R_STEPS)]
    r_steps: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    output: Output,
    /// Relative error injected into every closed form; the run must fail.
    #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
    perturb: f64,
}

enum Failure {
    Invalid(String),
    Verification,
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Invalid(format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Invalid(e.to_string()))?;
    }
    Ok(())
}

fn emit(text: Option<String>) {
    if let Some(t) = text {
        print!("{t}");
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::TwoPairSweep(a) => {
            let cfg = TwoPairSweepConfig {
                alphas: if a.alpha.is_empty() {
                    experiments::DEFAULT_SWEEP_ALPHAS.to_vec()
                } else {
                    a.alpha
                },
                beta: a.beta,
                xi: a.xi,
                grid_step: a.grid_step,
            };
            emit(experiments::cmd_two_pair_sweep(&cfg, a.output.format.into(), a.output.out.as_deref())?);
        }
        Command::TwoPairIterate(a) => {
            let cfg = TwoPairIterateConfig {
                f0: a.fidelity,
                alpha: a.alpha,
                rounds: a.rounds,
            };
            emit(experiments::cmd_two_pair_iterate(&cfg, a.output.format.into(), a.output.out.as_deref())?);
        }
        Command::ThreePairSample(a) => {
            let cfg = ThreePairSampleConfig {
                fidelities: if a.fidelity.is_empty() {
                    experiments::DEFAULT_SAMPLE_FIDELITIES.to_vec()
                } else {
                    a.fidelity
                },
                samples: a.samples,
                seed: a.seed,
            };
            for path in experiments::cmd_three_pair_sample(&cfg, a.format.into(), &a.out)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::ParetoFamily(a) => {
            let mut cfg = ParetoFamilyConfig {
                r_steps: a.r_steps,
                ..Default::default()
            };
            if !a.fidelity.is_empty() {
                cfg.fidelities = a.fidelity;
            }
            emit(experiments::cmd_pareto_family(&cfg, a.output.format.into(), a.output.out.as_deref())?);
        }
        Command::Verify(a) => {
            if !a.perturb.is_finite() {
                return Err(Failure::Invalid("perturbation must be finite".into()));
            }
            let report = verify::run(VerifyOptions { perturbation: a.perturb });
            let text = match a.output.format {
                FormatArg::Csv => format!("{report}\n"),
                FormatArg::Json => serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n",
            };
            match a.output.out {
                Some(p) => std::fs::write(p, text).map_err(Error::from)?,
                None => print!("{text}"),
            }
            if !report.passed {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => {
            eprintln!("error: verification failed");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
