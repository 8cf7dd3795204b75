//! Command-line front end for the rank analyses in `cohrank-core`.
//!
//! Four subcommands:
//!
//! * `analyze STATE` — nonclassicality rank, Gram spectrum and Vandermonde
//!   certificate of a state;
//! * `split STATE --splitter S` — send a single-mode state through a splitter
//!   with vacuum in the other ports and compare the output Schmidt ranks with
//!   the input rank;
//! * `verify-theorem` — the same comparison over a campaign of random inputs;
//! * `sweep STATE --truncations A..B | --alphas A..B` — effective Schmidt rank
//!   as a function of the Fock cutoff or of the cat amplitude, as CSV.
//!
//! Exit codes: 0 success, 1 rank mismatch, 2 input error, 3 conditioning
//! warning under `--strict`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cohrank_core::states::RandomBounds;
use cohrank_core::Tolerances;
use thiserror::Error;

pub mod commands;
pub mod format;
pub mod source;

pub use commands::{SweepAxis, TheoremCampaign};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cohrank_core::Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    TheoremViolation = 1,
    InputError = 2,
    ConditioningFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Conditioning trumps everything under `--strict`; a rank mismatch on an
    /// ill-conditioned input is reported but is not a violation.
    pub fn resolve(ranks_agree: bool, ill_conditioned: bool, strict: bool) -> Self {
        if ill_conditioned && strict {
            ExitStatus::ConditioningFailure
        } else if !ranks_agree && !ill_conditioned {
            ExitStatus::TheoremViolation
        } else {
            ExitStatus::Success
        }
    }
}

/// Result of one command: the text report, optional CSV, and exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub csv: Option<String>,
    pub status: ExitStatus,
}

/// Settings shared by every subcommand, after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub truncation: Option<Vec<usize>>,
    pub strict: bool,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            truncation: None,
            strict: false,
            csv: None,
            report: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cohrank", version, about = "Coherent-superposition rank and splitter entanglement analyses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Relative singular-value threshold for rank decisions.
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Distance below which coherent points are merged.
    #[arg(long = "tol-merge")]
    pub tol_merge: Option<f64>,
    /// Fock cutoff per mode: `K` or `K1,K2,...`. Automatic if omitted.
    #[arg(long)]
    pub truncation: Option<String>,
    /// Turn conditioning warnings into exit code 3.
    #[arg(long)]
    pub strict: bool,
    /// Write the Schmidt spectra (or sweep rows) as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the report to a file as well as stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut tolerances = Tolerances::default();
        if let Some(t) = self.tol_rank {
            tolerances = tolerances.with_rank_rel_tol(t);
        }
        if let Some(t) = self.tol_merge {
            tolerances = tolerances.with_merge_tol(t);
        }
        tolerances.validate()?;
        let truncation = self
            .truncation
            .as_deref()
            .map(source::parse_truncation)
            .transpose()?;
        Ok(RunConfig {
            tolerances,
            truncation,
            strict: self.strict,
            csv: self.csv.clone(),
            report: self.report.clone(),
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank analysis of a single state.
    Analyze {
        /// Named state or JSON state file.
        state: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Send a single-mode state through a splitter with vacuum ancillas.
    Split {
        state: String,
        /// `bs`, `dft:N` or `file:PATH`.
        #[arg(long, default_value = "bs")]
        splitter: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check input rank == output Schmidt rank on random inputs.
    VerifyTheorem {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Trial `i` uses seed `seed + i`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial `i` draws `1 + i % max_rank` coherent components.
        #[arg(long = "max-rank", default_value_t = 6)]
        max_rank: usize,
        #[arg(long = "min-sep", default_value_t = 0.1)]
        min_sep: f64,
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long, default_value = "bs")]
        splitter: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Effective Schmidt rank against the Fock cutoff or the cat amplitude.
    Sweep {
        state: String,
        #[arg(long, default_value = "bs")]
        splitter: String,
        /// Inclusive cutoff range `A..B`.
        #[arg(long, conflicts_with = "alphas")]
        truncations: Option<String>,
        /// Amplitude range `A..B` for `cat:odd` / `cat:even`.
        #[arg(long)]
        alphas: Option<String>,
        /// Number of amplitudes in `--alphas`.
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Number of leading singular values per row.
        #[arg(long, default_value_t = 4)]
        leading: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Runs a parsed command.
pub fn execute(command: &Command) -> Result<(Outcome, RunConfig), CliError> {
    match command {
        Command::Analyze { state, common } => {
            let cfg = common.resolve()?;
            Ok((commands::analyze(state, &cfg)?, cfg))
        }
        Command::Split {
            state,
            splitter,
            common,
        } => {
            let cfg = common.resolve()?;
            Ok((commands::split(state, splitter, &cfg)?, cfg))
        }
        Command::VerifyTheorem {
            trials,
            seed,
            max_rank,
            min_sep,
            radius,
            splitter,
            common,
        } => {
            let cfg = common.resolve()?;
            let campaign = TheoremCampaign {
                trials: *trials,
                seed: *seed,
                max_rank: *max_rank,
                bounds: RandomBounds {
                    radius: *radius,
                    min_sep: *min_sep,
                },
                splitter: splitter.clone(),
            };
            Ok((commands::verify_theorem(&campaign, &cfg)?, cfg))
        }
        Command::Sweep {
            state,
            splitter,
            truncations,
            alphas,
            steps,
            leading,
            common,
        } => {
            let cfg = common.resolve()?;
            let axis = match (truncations, alphas) {
                (Some(t), None) => SweepAxis::Truncations(source::parse_int_range(t)?),
                (None, Some(a)) => SweepAxis::Alphas(source::parse_float_range(a, *steps)?),
                _ => {
                    return Err(CliError::Usage(
                        "sweep needs exactly one of --truncations or --alphas".into(),
                    ))
                }
            };
            Ok((commands::sweep(state, splitter, &axis, *leading, &cfg)?, cfg))
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Parses `args` (including the program name), runs the command, writes the
/// report to `stdout` and any requested files, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitStatus::InputError.code()
            } else {
                0
            };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|(outcome, cfg)| {
        if let Some(path) = &cfg.report {
            write_file(path, &outcome.report)?;
        }
        if let (Some(path), Some(csv)) = (&cfg.csv, &outcome.csv) {
            write_file(path, csv)?;
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.report.as_bytes());
            outcome.status.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            ExitStatus::InputError.code()
        }
    }
}
