//! `netcap`: command-line front end for the netcap library.
//!
//! Exit codes: 0 success / feasible / proven, 1 infeasible or failed
//! verification, 2 usage or input error, 3 timeout with bounds only.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "netcap", version, about = "Exact 1-shot capacity of small multicast networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a network against every axiom and print its structure.
    Validate(ValidateArgs),
    /// Per-terminal min-cuts and mu.
    Mincut(MincutArgs),
    /// Write the binary feasibility model as LP and/or MPS text.
    Model(ModelArgs),
    /// Decide whether an unambiguous pair with exactly M codewords exists.
    Solve(SolveArgs),
    /// Largest code size admitting an unambiguous pair.
    Capacity(CapacityArgs),
    /// Same, with intermediate functions restricted to linear maps over a field.
    LinearCapacity(CapacityArgs),
    /// Re-check a certificate file by simulation.
    Verify(VerifyArgs),
    /// List the built-in networks and shipped certificates.
    Examples(ExamplesArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct NetworkSource {
    /// Network JSON file.
    #[arg(long, value_name = "FILE")]
    network: Option<PathBuf>,
    /// Built-in network: butterfly, latin or combination:n,k.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchFlags {
    /// Do not fix single-input vertices to replication.
    #[arg(long)]
    no_routing_fix: bool,
    /// Disable symmetry breaking.
    #[arg(long)]
    no_symmetry_break: bool,
    /// Seconds allowed for each decision.
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
    /// Node budget for each decision.
    #[arg(long, value_name = "N")]
    node_limit: Option<u64>,
    /// Worker threads for the search.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    net: NetworkSource,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct MincutArgs {
    #[command(flatten)]
    net: NetworkSource,
    /// Only this terminal.
    #[arg(long)]
    terminal: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Lp,
    Mps,
    Both,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[command(flatten)]
    net: NetworkSource,
    #[arg(long)]
    q: usize,
    /// Code size M.
    #[arg(long)]
    m: usize,
    #[arg(long)]
    no_routing_fix: bool,
    #[arg(long)]
    no_symmetry_break: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Lp)]
    format: FormatArg,
    /// Directory for the model file(s) and their JSON sidecars.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Print the model text instead of writing files.
    #[arg(long, conflicts_with = "out_dir")]
    stdout: bool,
    /// Refuse vertices whose function table has more entries than this.
    #[arg(long)]
    max_table_size: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    net: NetworkSource,
    #[arg(long)]
    q: usize,
    /// Give the alphabet its field structure (required for --linear).
    #[arg(long)]
    field: bool,
    /// Code size M.
    #[arg(long)]
    m: usize,
    /// Only linear maps at intermediate vertices.
    #[arg(long)]
    linear: bool,
    #[command(flatten)]
    search: SearchFlags,
    /// Write the certificate here when one is found.
    #[arg(long, value_name = "FILE")]
    certificate_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    #[command(flatten)]
    net: NetworkSource,
    #[arg(long)]
    q: usize,
    /// Give the alphabet its field structure.
    #[arg(long)]
    field: bool,
    #[command(flatten)]
    search: SearchFlags,
    /// Never add a supersource.
    #[arg(long)]
    no_supersource: bool,
    /// Probe upwards from --start instead of downwards from q^mu.
    #[arg(long)]
    ascending: bool,
    #[arg(long, requires = "ascending", default_value_t = 2)]
    start: usize,
    /// Largest code size to probe.
    #[arg(long, value_name = "M")]
    max_m: Option<usize>,
    /// Seconds allowed for the whole run.
    #[arg(long, value_name = "SECS")]
    total_time_limit: Option<f64>,
    /// Write the best certificate here.
    #[arg(long, value_name = "FILE")]
    certificate_out: Option<PathBuf>,
    /// Also write the JSON report here.
    #[arg(long, value_name = "FILE")]
    report_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    net: NetworkSource,
    #[arg(long, value_name = "FILE")]
    certificate: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    /// Write each built-in network as JSON into this directory.
    #[arg(long, value_name = "DIR")]
    write: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => commands::validate(&a),
        Command::Mincut(a) => commands::mincut(&a),
        Command::Model(a) => commands::model(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Capacity(a) => commands::capacity(&a, false),
        Command::LinearCapacity(a) => commands::capacity(&a, true),
        Command::Verify(a) => commands::verify(&a),
        Command::Examples(a) => commands::examples(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::USAGE)
        }
    }
}
