//! `arveson`: JSON-in, JSON-out driver for the arveson-core algorithms.
//!
//! Exit status: 0 success, 1 bad flags or input, 2 a validation check
//! failed, 3 a numerical procedure failed.

mod commands;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{Fail, Outcome, Report};

#[derive(Parser)]
#[command(name = "arveson", version, about = "Commuting tuples, Drury-Arveson models and similarity certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Validation tolerance (commutator defect, row defect).
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for every randomized choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel rows (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Clone)]
pub struct Input {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Commutator and row defects of a tuple, and cyclicity of its vector.
    TupleCheck {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Annihilating ideal slice up to a degree bound.
    TupleAnn {
        #[command(flatten)]
        input: Input,
        /// Degree bound (default 2 x matrix size).
        #[arg(long)]
        deg: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Block decomposition over the joint spectrum.
    Jordan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Model tuple of a monomial ideal.
    ModelMonomial {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Kernel-jet model for points with local ideals.
    ModelJet {
        #[command(flatten)]
        input: Input,
        /// Truncation degree (default: chosen from the tail bound).
        #[arg(long)]
        deg: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Separation constants of a point set.
    InterpCheck {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Minimal-norm Pick interpolation.
    Pick {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Similarity certificate for a nilpotent tuple with monomial annihilator.
    Nilsim {
        #[command(flatten)]
        input: Input,
        /// Degree bound for recovering generators from the annihilator.
        #[arg(long)]
        deg: Option<usize>,
        /// Points of the gauge t-grid.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// One-variable obstruction: minimal intertwiner condition numbers.
    #[command(name = "repro-6-2")]
    Repro62 {
        /// Points in the disc, d = 1 (default 0.5).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', value_parser = parse_eps, default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Two-variable obstruction: f, intertwiner form and condition bounds.
    #[command(name = "repro-6-4")]
    Repro64 {
        /// Automorphism targets in the ball, d = 2 (default the origin).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', value_parser = parse_eps, default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Order-0 versus order-1 similarity over a point sequence.
    Dichotomy {
        #[command(flatten)]
        input: Input,
        /// Jet order, 0 or 1.
        #[arg(long, default_value_t = 1)]
        kappa: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_eps, default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::TupleCheck { .. } => "tuple-check",
            Command::TupleAnn { .. } => "tuple-ann",
            Command::Jordan { .. } => "jordan",
            Command::ModelMonomial { .. } => "model-monomial",
            Command::ModelJet { .. } => "model-jet",
            Command::InterpCheck { .. } => "interp-check",
            Command::Pick { .. } => "pick",
            Command::Nilsim { .. } => "nilsim",
            Command::Repro62 { .. } => "repro-6-2",
            Command::Repro64 { .. } => "repro-6-4",
            Command::Dichotomy { .. } => "dichotomy",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::TupleCheck { common, .. }
            | Command::TupleAnn { common, .. }
            | Command::Jordan { common, .. }
            | Command::ModelMonomial { common, .. }
            | Command::ModelJet { common, .. }
            | Command::InterpCheck { common, .. }
            | Command::Pick { common, .. }
            | Command::Nilsim { common, .. }
            | Command::Repro62 { common, .. }
            | Command::Repro64 { common, .. }
            | Command::Dichotomy { common, .. } => common,
        }
    }
}

fn dispatch(cmd: &Command, tol: &mut report::Tolerances) -> Result<Outcome, Fail> {
    let c = cmd.common();
    match cmd {
        Command::TupleCheck { input, .. } => commands::tuple_check(&input.input, c),
        Command::TupleAnn { input, deg, .. } => commands::tuple_ann(&input.input, *deg, c, tol),
        Command::Jordan { input, .. } => commands::jordan(&input.input, c),
        Command::ModelMonomial { input, .. } => commands::model_monomial(&input.input, c),
        Command::ModelJet { input, deg, .. } => commands::model_jet(&input.input, *deg, c, tol),
        Command::InterpCheck { input, .. } => commands::interp_check(&input.input),
        Command::Pick { input, .. } => commands::pick(&input.input),
        Command::Nilsim { input, deg, grid, .. } => {
            tol.grid = Some(*grid);
            commands::nilsim(&input.input, *deg, *grid, c, tol)
        }
        Command::Repro62 { input, eps, .. } => commands::repro_one_variable(input.as_deref(), eps),
        Command::Repro64 { input, eps, .. } => commands::repro_two_variable(input.as_deref(), eps, c),
        Command::Dichotomy { input, kappa, eps, .. } => commands::dichotomy(&input.input, *kappa, eps, c),
    }
}

fn write_report(path: Option<&PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Fail::Input(format!("stdout: {e}"))),
    }
}

fn run(cli: Cli) -> i32 {
    let cmd = &cli.command;
    let c = cmd.common();
    if let Some(j) = c.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: --jobs: {e}");
            return 1;
        }
    }
    let mut tol = commands::tolerances(c);
    let outcome = match dispatch(cmd, &mut tol) {
        Ok(o) => o,
        Err(f) => Outcome {
            result: None,
            failure: Some(f),
            table: None,
        },
    };
    if let Some(Fail::Input(m)) = &outcome.failure {
        eprintln!("error: {m}");
        return 1;
    }
    let report = Report::new(cmd.name(), c.seed, tol, &outcome);
    let mut text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: report serialization: {e}");
            return 3;
        }
    };
    text.push('\n');
    if let Err(f) = write_report(c.out.as_ref(), &text) {
        eprintln!("error: {}", f.message());
        return 1;
    }
    if c.out.is_some() {
        if let Some(t) = &outcome.table {
            print!("{t}");
        }
    }
    match &outcome.failure {
        Some(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
        None => 0,
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
    ExitCode::from(run(cli) as u8)
}
