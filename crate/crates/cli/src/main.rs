use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussrelay::eb::{psa_threshold, pia_threshold, rate_upper_bound, Threshold};
use gaussrelay::exec::Execution;
use gaussrelay::report::{run, RunOptions};
use gaussrelay::scenario::{parse_scenario, Output, Scenario};
use gaussrelay::selftest::{run_all, Fault, SelftestOptions, DEFAULT_SEED};
use gaussrelay::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

/// Gaussian channel calculus for lossy relay chains.
#[derive(Parser, Debug)]
#[command(name = "gaussrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for CSV tables and the text summary.
    #[arg(long, global = true, env = "GAUSSRELAY_OUT")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (1 runs sequentially).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Largest acceptable recomposition error.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Base seed for the self-test draws.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ScenarioArg {
    /// Scenario file (`.json` for the JSON form).
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Amp {
    Psa,
    Pia,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Total channel of the chain (and the output state, if given).
    Compose(ScenarioArg),
    /// front, total loss and back factors with recomposition checks.
    Decompose(ScenarioArg),
    /// Entanglement-breaking verdicts, closed form and Choi-state oracle.
    Eb(ScenarioArg),
    /// Amplifier gain thresholds, from a scenario or directly.
    Threshold {
        #[arg(long, conflicts_with_all = ["station", "eta1", "eta2"])]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, requires = "eta1")]
        station: Option<Amp>,
        #[arg(long)]
        eta1: Option<f64>,
        #[arg(long)]
        eta2: Option<f64>,
    },
    /// Rate-loss bound, from a scenario or a single transmittance.
    Bound {
        #[arg(long, conflicts_with = "eta", required_unless_present = "eta")]
        scenario: Option<PathBuf>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Compose, collapse and bound a whole chain.
    Chain(ScenarioArg),
    /// Every output listed in the scenario.
    Run(ScenarioArg),
    /// The bundled acceptance suite.
    Selftest {
        /// Recompose with a deliberately wrong composition rule.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

/// Prints to stdout, ignoring a closed pipe (`gaussrelay ... | head`).
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        Scenario::from_json(&text)
    } else {
        parse_scenario(&text).map_err(Error::Parse)
    };
    parsed.map_err(|e| match e {
        Error::Parse(errs) => Failure::Validation(
            errs.0
                .iter()
                .map(|p| format!("{}:{p}", path.display()))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
        other => Failure::from(other),
    })
}

fn options(cli: &Cli) -> RunOptions {
    RunOptions {
        execution: if cli.workers == Some(1) { Execution::Sequential } else { Execution::Parallel },
        workers: cli.workers,
        tol: cli.tol,
        ..RunOptions::default()
    }
}

fn run_scenario(cli: &Cli, path: &Path, outputs: Option<&[Output]>) -> Result<(), Failure> {
    let sc = load(path)?;
    let outputs = outputs.unwrap_or(&sc.outputs);
    let report = run(&sc, outputs, &options(cli))?;
    emit(&report.summary);
    if let Some(dir) = &cli.out {
        let written = report
            .write(dir)
            .map_err(|e| Failure::Validation(format!("{}: {e}", dir.display())))?;
        for p in written {
            emit(&format!("wrote {}\n", p.display()));
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{} numerical check(s) failed", report.failures.len())))
    }
}

fn fmt_threshold(t: Threshold) -> String {
    match t {
        Threshold::Finite(v) => format!("{v:.10}"),
        Threshold::Divergent => "diverges (lossless segment)".into(),
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Failure::Validation(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Compose(a) => run_scenario(cli, &a.scenario, Some(&[Output::Compose])),
        Command::Decompose(a) => run_scenario(cli, &a.scenario, Some(&[Output::Decompose])),
        Command::Eb(a) => run_scenario(cli, &a.scenario, Some(&[Output::Eb])),
        Command::Chain(a) => run_scenario(cli, &a.scenario, Some(&[Output::Compose, Output::Decompose, Output::Bound])),
        Command::Run(a) => run_scenario(cli, &a.scenario, None),
        Command::Threshold { scenario: Some(p), .. } => run_scenario(cli, p, Some(&[Output::Thresholds])),
        Command::Threshold { station, eta1, eta2, .. } => {
            let (Some(station), Some(e1)) = (station, eta1) else {
                return Err(Failure::Validation("give --scenario, or --station with --eta1 (and --eta2 for psa)".into()));
            };
            let t = match station {
                Amp::Psa => {
                    let e2 = eta2.ok_or_else(|| Failure::Validation("psa threshold needs --eta2".into()))?;
                    psa_threshold(*e1, e2)?
                }
                Amp::Pia => pia_threshold(*e1)?,
            };
            emit(&format!("threshold = {}\n", fmt_threshold(t)));
            Ok(())
        }
        Command::Bound { scenario: Some(p), .. } => run_scenario(cli, p, Some(&[Output::Bound])),
        Command::Bound { eta, .. } => {
            let eta = eta.expect("clap requires --eta without --scenario");
            emit(&format!("R_UB = {:.10} bits/mode\n", rate_upper_bound(eta)?));
            Ok(())
        }
        Command::Selftest { inject_fault } => {
            let opts = SelftestOptions {
                seed: cli.seed,
                execution: options(cli).execution,
                workers: cli.workers,
                fault: inject_fault.then_some(Fault::TransposedNoiseTransport),
            };
            let outcomes = run_all(&opts);
            for o in &outcomes {
                emit(&format!("{}\n", o.line()));
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            emit(&format!("{} of {} checks passed\n", outcomes.len() - failed, outcomes.len()));
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Numerical(format!("{failed} check(s) failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for numerical failures here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical check failed: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
