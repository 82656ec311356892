//! `ows-lab`: generate keys and examples, run the private learner, and rerun
//! the PAC, online and lemma experiments from the command line.
//!
//! Exit status is 0 on success, 1 when a verification command finds a
//! failure, and 2 on usage or range errors.

use std::ffi::OsString;

use clap::{Parser, Subcommand};

mod commands;
pub mod config;
pub mod output;
pub mod params;

use config::{resolve, ConfigFile};
use params::{GlobalArgs, Globals};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ows-lab", version, about = "One-way-sequence learning experiments")]
struct Cli {
    #[command(flatten)]
    globals: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random key.
    Keys(params::KeysArgs),
    /// Print the example string and label at an index.
    Derive(params::DeriveArgs),
    /// Compute a later example from an earlier one without the key.
    Forward(params::ForwardArgs),
    /// Run the private learner on a dataset file.
    Learn(params::LearnArgs),
    /// Evaluate a hypothesis on labeled examples.
    Eval(params::EvalArgs),
    /// Batches of PAC trials on random realizable distributions.
    Pac(params::PacArgs),
    /// Online games between a baseline learner and an adversarial order.
    Duel(params::DuelArgs),
    /// Prediction advantage on the next-lower index.
    Advantage(params::AdvantageArgs),
    /// Run the separation and generation lemma verifiers.
    Lemmas(params::LemmasArgs),
    /// Sweep the sample-size constant.
    Calibrate(params::CalibrateArgs),
    /// Two-sided geometric pmf table and exact DP ratio audit.
    MechAudit(params::MechAuditArgs),
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("error: verification failed");
            EXIT_VERIFY
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let config = match &cli.globals.config {
        Some(path) => Some(ConfigFile::load(path)?),
        None => None,
    };
    let globals: Globals = resolve("global", &cli.globals, config.as_ref())?;
    let cfg = config.as_ref();
    let job = || -> anyhow::Result<output::Output> {
        use commands::*;
        match &cli.command {
            Command::Keys(a) => items::keys(resolve("keys", a, cfg)?),
            Command::Derive(a) => items::derive(resolve("derive", a, cfg)?),
            Command::Forward(a) => items::forward(resolve("forward", a, cfg)?),
            Command::Learn(a) => learn::learn(resolve("learn", a, cfg)?),
            Command::Eval(a) => learn::eval(resolve("eval", a, cfg)?),
            Command::Pac(a) => experiments::pac(resolve("pac", a, cfg)?),
            Command::Duel(a) => experiments::duel(resolve("duel", a, cfg)?),
            Command::Advantage(a) => experiments::advantage(resolve("advantage", a, cfg)?),
            Command::Lemmas(a) => verify::lemmas(resolve("lemmas", a, cfg)?),
            Command::Calibrate(a) => experiments::calibrate(resolve("calibrate", a, cfg)?),
            Command::MechAudit(a) => verify::mech_audit(resolve("mech-audit", a, cfg)?),
        }
    };
    let out = if globals.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(globals.jobs).build()?.install(job)?
    } else {
        job()?
    };
    output::emit(&out.render(globals.format)?, globals.output.as_deref())?;
    Ok(out.passed)
}
