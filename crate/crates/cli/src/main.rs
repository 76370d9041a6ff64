use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use checkmark_core::oracle::discrete_minimax;
use checkmark_core::phases::{phase_diagram, PhaseConfig};
use checkmark_core::sweep::{run_sweep_with, SweepConfig};
use checkmark_core::verify::run_acceptance;
use checkmark_core::{g_eval, CheckmarkInstance, Error, RemezConfig, SolverRegistry};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_FINDINGS: u8 = 3;

/// Minimax polynomial approximation of |x - alpha| on [-1, 1].
#[derive(Parser, Debug)]
#[command(name = "checkmark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format; the default depends on the command.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Solving {
    /// Equioscillation tolerance of the exchange.
    #[arg(long, default_value_t = RemezConfig::default().equioscillation_tol)]
    tol: f64,
    /// Solver strategy by name.
    #[arg(long, default_value = "remez")]
    solver: String,
}

impl Solving {
    fn remez(&self) -> RemezConfig {
        RemezConfig {
            equioscillation_tol: self.tol,
            ..RemezConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimax polynomial for one (n, alpha); `--format csv` emits x,g plot data.
    Solve {
        #[arg(short = 'n', long = "degree")]
        n: usize,
        #[arg(short = 'a', long, allow_hyphen_values = true)]
        alpha: f64,
        /// Plot points for `--format csv`.
        #[arg(long, default_value_t = 2001)]
        points: usize,
        #[command(flatten)]
        solving: Solving,
        #[command(flatten)]
        output: Output,
    },
    /// E_n and the analysis quantities along a uniform alpha grid.
    Sweep {
        #[arg(short = 'n', long = "degree")]
        n: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.999)]
        from: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.999)]
        to: f64,
        #[arg(long, default_value_t = 2001)]
        steps: usize,
        #[command(flatten)]
        solving: Solving,
        #[command(flatten)]
        output: Output,
    },
    /// V-shapes, tips and degree-loss points of E_n.
    Phases {
        #[arg(short = 'n', long = "degree")]
        n: usize,
        #[arg(long, default_value_t = RemezConfig::default().equioscillation_tol)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Runs the acceptance suite and prints a findings table.
    Verify {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Discrete minimax on a Chebyshev grid, solved as a linear program.
    Oracle {
        #[arg(short = 'n', long = "degree")]
        n: usize,
        #[arg(short = 'a', long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Numerical(Error),
    Findings(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInstance(_) | Error::Configuration(_) | Error::UnknownSolver(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Numerical(other),
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(output: &Output, body: &str) -> Outcome {
    match &output.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn only_json(output: &Output, verb: &str) -> Result<(), Failure> {
    match output.format {
        Some(Format::Csv) => Err(Failure::Usage(format!(
            "`{verb}` has no CSV output; use --format json"
        ))),
        _ => Ok(()),
    }
}

fn run(command: Command) -> Outcome {
    let registry = SolverRegistry::default();
    match command {
        Command::Solve {
            n,
            alpha,
            points,
            solving,
            output,
        } => {
            let solver = registry.get(&solving.solver)?;
            if points < 2 {
                return Err(Failure::Usage("--points must be at least 2".into()));
            }
            let inst = CheckmarkInstance::new(n, alpha)?;
            let sol = solver.solve(&inst, &solving.remez())?;
            let body = match output.format.unwrap_or(Format::Json) {
                Format::Json => json(&sol.to_json()),
                Format::Csv => {
                    let mut s = String::from("x,g\n");
                    for i in 0..points {
                        let x = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
                        let _ = writeln!(s, "{x:e},{:e}", g_eval(&sol, x)?);
                    }
                    s
                }
            };
            emit(&output, &body)
        }
        Command::Sweep {
            n,
            from,
            to,
            steps,
            solving,
            output,
        } => {
            let solver = registry.get(&solving.solver)?;
            let cfg = SweepConfig {
                remez: solving.remez(),
                ..SweepConfig::new(n, from, to, steps)
            };
            cfg.validate()?;
            let sweep = run_sweep_with(&cfg, solver.as_ref())?;
            let body = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => sweep.to_csv(),
                Format::Json => json(&serde_json::json!({
                    "n": n,
                    "rows": sweep.rows,
                    "failures": sweep.failures,
                })),
            };
            emit(&output, &body)
        }
        Command::Phases { n, tol, output } => {
            let cfg = PhaseConfig {
                remez: RemezConfig {
                    equioscillation_tol: tol,
                    ..RemezConfig::default()
                },
                ..PhaseConfig::default()
            };
            cfg.remez.validate()?;
            CheckmarkInstance::new(n, 0.0)?;
            let (diagram, _) = phase_diagram(n, &cfg)?;
            let body = match output.format.unwrap_or(Format::Json) {
                Format::Json => json(&diagram.to_json()),
                Format::Csv => {
                    let mut s = String::from("kind,index,alpha\n");
                    for v in &diagram.vshapes {
                        for (kind, a) in [("gamma", v.gamma), ("tip", v.tip), ("beta", v.beta)] {
                            let _ = writeln!(s, "{kind},{},{a:e}", v.index);
                        }
                    }
                    for (i, a) in diagram.degree_loss_points.iter().enumerate() {
                        let _ = writeln!(s, "degree_loss,{},{a:e}", i + 1);
                    }
                    s
                }
            };
            emit(&output, &body)?;
            for f in &diagram.findings {
                eprintln!("finding: {f}");
            }
            Ok(())
        }
        Command::Verify { max_n, output } => {
            if output.format == Some(Format::Csv) {
                return Err(Failure::Usage(
                    "`verify` prints a table or JSON, not CSV".into(),
                ));
            }
            if !(2..=11).contains(&max_n) {
                return Err(Failure::Usage("--max-n must lie in 2..=11".into()));
            }
            let results = run_acceptance(max_n);
            let body = match output.format {
                Some(Format::Json) => json(&results),
                _ => results.iter().map(|c| format!("{c}\n")).collect(),
            };
            emit(&output, &body)?;
            let failed: Vec<String> = results
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.id.to_string())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Findings(format!(
                    "criteria failed: {}",
                    failed.join(", ")
                )))
            }
        }
        Command::Oracle {
            n,
            alpha,
            grid,
            output,
        } => {
            only_json(&output, "oracle")?;
            let inst = CheckmarkInstance::new(n, alpha)?;
            let sol = discrete_minimax(&inst, grid)?;
            emit(&output, &json(&sol.to_json()))
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CHECKMARK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        Failure::Usage(format!(
            "CHECKMARK_THREADS must be a non-negative integer, got {raw:?}"
        ))
    })?;
    // 0 leaves the choice to rayon.
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match configure_threads().and_then(|_| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Findings(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_FINDINGS)
        }
    }
}
