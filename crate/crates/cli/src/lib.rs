//! `qtrap` command-line front end: reads a JSON run configuration, runs one
//! experiment and writes a deterministic CSV or JSON artifact.
//!
//! Exit status: 0 all checks passed, 1 a numerical check failed, 2 the
//! configuration is invalid, 3 integration failed.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

pub use config::{Command, Format, RunConfig};
pub use error::{CliError, CliResult, Exit};

#[derive(Debug, Parser)]
#[command(
    name = "qtrap",
    version,
    about = "Paul-trap quantum dynamics experiments",
    after_help = "Trap conventions: V(t) = v_dc - v_ac cos(omega (t - t0)), Omega_z = -2V, Omega_x = Omega_y = V.\n\
                  Mathieu form: Omega(t) = (omega^2/4)(a - 2q cos(omega (t - t0))), so along z\n\
                  a = -8 v_dc/omega^2 and q = -4 v_ac/omega^2; the x and y axes get -1/2 of each.\n\
                  A trap section may give {a, q, omega, axis} directly instead of voltages.\n\n\
                  Exit status: 0 ok, 1 numerical check failed, 2 invalid configuration, 3 integration failure."
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,

    /// Worker threads for sweeps and oracle suites (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output path; overrides `output.path`. Standard output if neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format; overrides `output.format`.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Override a config value, e.g. `--set oracle.N=80`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Shift the BCH log-coefficient by this amount (sensitivity check).
    #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "1e-3")]
    pub perturb_gamma3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// A finished run: what to write and how to exit.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub exit: Exit,
    /// Human-readable notes for stderr.
    pub notes: Vec<String>,
}

/// Runs `cmd` against an already-loaded configuration. Stability, evolve and
/// uncertainty honour `output.format`; duality and verify always emit JSON.
pub fn execute(cmd: Command, cfg: &RunConfig, gamma3_shift: Option<f64>) -> CliResult<Outcome> {
    cfg.validate_for(cmd)?;
    let table_body = |t: &output::Table| match cfg.output.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    };
    let outcome = match cmd {
        Command::Stability => {
            let run = commands::stability(cfg)?;
            Outcome {
                body: table_body(&run.table),
                exit: run.exit(),
                notes: run
                    .failures
                    .iter()
                    .map(|(a, q, m)| format!("integration failed at a = {a}, q = {q}: {m}"))
                    .collect(),
            }
        }
        Command::Evolve => Outcome {
            body: table_body(&commands::evolve(cfg)?),
            exit: Exit::Ok,
            notes: vec![],
        },
        Command::Uncertainty => Outcome {
            body: table_body(&commands::uncertainty(cfg)?),
            exit: Exit::Ok,
            notes: vec![],
        },
        Command::Duality => {
            let rep = commands::duality(cfg)?;
            let mut notes = vec![];
            if !rep.passed {
                notes.push(format!(
                    "duality chain failed at tolerance {:e} (largest residual {:e})",
                    rep.tolerance,
                    rep.max_residual()
                ));
            }
            Outcome {
                body: output::pretty(&rep),
                exit: rep.exit(),
                notes,
            }
        }
        Command::Verify => {
            let rep = commands::verify(cfg, gamma3_shift)?;
            let mut notes: Vec<String> =
                rep.failed.iter().map(|f| format!("failed: {f}")).collect();
            notes.extend(
                rep.entries
                    .iter()
                    .filter(|e| {
                        e.status == commands::Status::Refused && e.origin == commands::Origin::User
                    })
                    .map(|e| format!("refused: {}", e.message.as_deref().unwrap_or(&e.identity))),
            );
            if rep.passed == 0 {
                notes.push("no identity could be checked at this truncation".into());
            }
            Outcome {
                body: output::pretty(&rep),
                exit: rep.exit(),
                notes,
            }
        }
    };
    Ok(outcome)
}

/// Full CLI entry point; returns the process exit status.
pub fn run(cli: Cli) -> Exit {
    match run_inner(&cli) {
        Ok(outcome) => {
            for n in &outcome.notes {
                eprintln!("qtrap {}: {n}", cli.command.name());
            }
            outcome.exit
        }
        Err(e) => {
            eprintln!("qtrap {}: {e}", cli.command.name());
            e.exit()
        }
    }
}

fn run_inner(cli: &Cli) -> CliResult<Outcome> {
    let mut cfg = RunConfig::load(&cli.config, &cli.overrides)?;
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| execute(cli.command, &cfg, cli.perturb_gamma3))?;
    output::emit(&outcome.body, cfg.output.path.as_deref())?;
    Ok(outcome)
}
