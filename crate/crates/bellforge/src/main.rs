use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bellforge::format::{curve_csv, to_json, CLI_DIGITS};
use bellforge::parallel::default_jobs;
use bellforge::repro::{self, Inequality, ReproResult};
use bellforge::Error;
use bellforge_core::optimize::noise::NoiseReading;
use bellforge_core::optimize::psiplus::PovmAdvantage;

#[derive(Parser)]
#[command(name = "bellforge", version, about = "Bell bounds under projective and POVM measurements")]
struct Cli {
    /// Worker threads for restarts and grid sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reading {
    Werner,
    NoiseFree,
}

impl From<Reading> for NoiseReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Werner => NoiseReading::Werner,
            Reading::NoiseFree => NoiseReading::NoiseFree,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// POVM optimum of W by SDP.
    Wopt {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Projective optimum of W over the rank cases.
    Wproj,
    /// Local bound by enumeration.
    LocalBound {
        /// ich, i3, ich3 or i00..i20
        #[arg(long, default_value = "ich3")]
        ineq: String,
        #[arg(long, default_value_t = 100.0)]
        c: f64,
    },
    /// Closed-form psi+ maxima with see-saw cross-checks.
    PsiplusTable {
        #[arg(long, default_value_t = 100.0)]
        c: f64,
        #[arg(long, env = "BELLFORGE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Where the POVM bound overtakes the projective maximum.
    Crossover,
    /// Two-qubit see-saw maxima of the derived inequalities.
    QubitTable {
        #[arg(long, default_value_t = 100.0)]
        c: f64,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, env = "BELLFORGE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// POVM lower bound on psi+.
    PovmBound {
        #[arg(long, default_value_t = 100.0)]
        c: f64,
    },
    /// Noise threshold curve.
    NoiseCurve {
        #[arg(long, default_value_t = 3.05)]
        c_min: f64,
        #[arg(long, default_value_t = 12.0)]
        c_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Curve written by the CSV format.
        #[arg(long, value_enum, default_value = "noise-free")]
        reading: Reading,
    },
    /// Neumark dilation statistics on random extremal POVMs.
    NeumarkCheck {
        #[arg(long, env = "BELLFORGE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Every reproduction with default parameters.
    All {
        #[arg(long, env = "BELLFORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Command names to skip, or `sdp` for those needing the solver.
        #[arg(long, value_delimiter = ',')]
        skip: Vec<String>,
    },
}

fn emit(out: &str) -> Result<(), Error> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(out.as_bytes()).map_err(|e| Error::Usage(format!("writing output: {e}")))?;
    if !out.ends_with('\n') {
        stdout.write_all(b"\n").map_err(|e| Error::Usage(format!("writing output: {e}")))?;
    }
    Ok(())
}

fn single(r: ReproResult) -> Result<bool, Error> {
    emit(&to_json(&r, CLI_DIGITS)?)?;
    Ok(r.pass)
}

fn run(cli: Cli) -> Result<bool, Error> {
    let jobs = cli.jobs.unwrap_or_else(default_jobs).max(1);
    let advantage = || PovmAdvantage::compute(1e-10).map_err(Error::from);
    match cli.command {
        Command::Wopt { tol } => single(repro::wopt(tol)?),
        Command::Wproj => single(repro::wproj()?),
        Command::LocalBound { ineq, c } => single(repro::local_bound_cmd(Inequality::parse(&ineq)?, c)?),
        Command::PsiplusTable { c, seed } => single(repro::psiplus_table(c, seed, jobs)?),
        Command::Crossover => single(repro::crossover(&advantage()?)?),
        Command::QubitTable { c, restarts, seed } => single(repro::qubit_table_cmd(c, restarts, seed, jobs)?),
        Command::PovmBound { c } => single(repro::povm_bound(&advantage()?, c)?),
        Command::NoiseCurve { c_min, c_max, steps, format, reading } => {
            let curves = repro::noise_curves(&advantage()?, c_min, c_max, steps, jobs)?;
            let r = repro::noise_curve_cmd(&curves, c_min, c_max, steps)?;
            match format {
                Format::Json => emit(&to_json(&r, CLI_DIGITS)?)?,
                Format::Csv => emit(&curve_csv(&curves.get(reading.into()).points, CLI_DIGITS))?,
            }
            Ok(r.pass)
        }
        Command::NeumarkCheck { seed, trials } => single(repro::neumark_check(seed, trials)?),
        Command::All { seed, skip } => {
            let report = repro::run_all(seed, &skip, jobs)?;
            for line in &report.summary {
                let status = match line.status {
                    repro::Status::Pass => "PASS",
                    repro::Status::Fail => "FAIL",
                    repro::Status::Skipped => "SKIP",
                };
                eprintln!("{status}  {:<14} {}", line.command, line.reference);
            }
            emit(&to_json(&report, CLI_DIGITS)?)?;
            Ok(report.pass)
        }
    }
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
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
