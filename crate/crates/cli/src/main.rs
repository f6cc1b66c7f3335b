mod commands;
mod input;
mod report;
mod repro;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use folfriend::SearchOptions;

#[derive(Parser)]
#[command(
    name = "folfriend",
    version,
    about = "Friendliness checking over finite relational structures"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Search node budget per model-finder call.
    #[arg(long, global = true, value_name = "N")]
    pub node_budget: Option<u64>,
    /// Parse inputs and search models without equality.
    #[arg(long, global = true)]
    pub no_equality: bool,
    /// Add a generated premise fragment, e.g. `at-least:4`.
    #[arg(long, global = true, value_name = "SCHEMA")]
    pub schema: Option<String>,
}

impl Global {
    pub fn options(&self) -> SearchOptions {
        match self.node_budget {
            Some(n) => SearchOptions::with_budget(n),
            None => SearchOptions::default(),
        }
    }

    pub fn equality(&self) -> bool {
        !self.no_equality
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula, theory or structure and print it back.
    Parse(commands::ParseArgs),
    /// Evaluate a formula in a structure.
    Eval(commands::EvalArgs),
    /// Find or enumerate models of a theory of a given size.
    Models(commands::ModelsArgs),
    /// Sizes up to a bound at which a sentence has a model.
    Spectrum(commands::SpectrumArgs),
    /// Classical entailment up to a size bound.
    Entails(commands::EntailsArgs),
    /// Exact friendliness for propositional inputs.
    FriendlyProp(commands::FriendlyPropArgs),
    /// Bounded friendliness for first-order inputs.
    Friendly(commands::FriendlyArgs),
    /// Ehrenfeucht-Fraisse game between two structures.
    Ef(commands::EfArgs),
    /// Implicit and explicit definability of a relation symbol.
    Beth(commands::BethArgs),
    /// Run bundled reproduction instances.
    Repro(repro::ReproArgs),
}

pub enum Failure {
    Usage(String),
    Budget(String),
    Repro(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Repro(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Repro(m) => m,
        }
    }
}

impl From<folfriend::Error> for Failure {
    fn from(e: folfriend::Error) -> Self {
        match e {
            folfriend::Error::ResourceBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
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
    let g = &cli.global;
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Parse(a) => commands::parse(g, a),
        Command::Eval(a) => commands::evaluate(g, a),
        Command::Models(a) => commands::models(g, a),
        Command::Spectrum(a) => commands::spectrum(g, a),
        Command::Entails(a) => commands::entails(g, a),
        Command::FriendlyProp(a) => commands::friendly_prop(g, a),
        Command::Friendly(a) => commands::friendly(g, a),
        Command::Ef(a) => commands::ef(g, a),
        Command::Beth(a) => commands::beth(g, a),
        Command::Repro(a) => repro::run(g, a),
    };
    let (report, failure) = match outcome {
        Ok(r) => (Some(r), None),
        Err(commands::Outcome::Failed(f)) => (None, Some(f)),
        Err(commands::Outcome::ReportAndFail(r, f)) => (Some(r), Some(f)),
    };
    if let Some(mut r) = report {
        r.elapsed = start.elapsed();
        if g.json {
            println!("{}", serde_json::to_string_pretty(&r.json()).expect("report json"));
        } else {
            print!("{}", r.human());
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
