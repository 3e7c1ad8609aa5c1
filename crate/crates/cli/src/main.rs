use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "isoloop",
    version,
    about = "Transport loop classes along planar point-set isotopies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a trajectory from a built-in generator.
    Generate(GenerateArgs),
    /// Read the braid word of a trajectory.
    Extract(ExtractArgs),
    /// Transport a loop class along a trajectory and certify it at every sample.
    Transport(TransportArgs),
    /// Certify a loop class in a configuration.
    Certify(CertifyArgs),
    /// Run the cascade counterexample for a range of n.
    Paper(PaperArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("kind").required(true)))]
pub struct GenerateArgs {
    /// Cascade on n points at 1/n, ..., 1/2, 1.
    #[arg(long, group = "kind", value_name = "N")]
    pub cascade: Option<usize>,
    /// Rigid counterclockwise rotation by this many radians.
    #[arg(
        long,
        group = "kind",
        value_name = "RADIANS",
        allow_hyphen_values = true
    )]
    pub rotate: Option<f64>,
    /// Rigid counterclockwise rotation by an exact number of turns, e.g. `1/2`.
    #[arg(long, group = "kind", value_name = "TURNS", allow_hyphen_values = true)]
    pub turns: Option<String>,
    /// Rigid translation, e.g. `--translate 5/2 -1`.
    #[arg(long, group = "kind", num_args = 2, value_names = ["DX", "DY"], allow_hyphen_values = true)]
    pub translate: Option<Vec<String>>,
    /// Half-twist realization of a braid word on collinear points, e.g. `"4: 1 -2 3"`.
    #[arg(long, group = "kind", value_name = "WORD")]
    pub braid: Option<String>,
    /// Points for rigid motions, `x,y;x,y;...`.
    #[arg(long, conflicts_with = "collinear")]
    pub points: Option<String>,
    /// Use the points (0,0), (1,0), ..., (N-1,0) for rigid motions.
    #[arg(long, value_name = "N")]
    pub collinear: Option<usize>,
    /// Rotation center `x,y`; defaults to the centroid.
    #[arg(long)]
    pub center: Option<String>,
    /// Steps per orbit (cascade), per half twist (braid) or in total (rigid).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    pub trajectory: PathBuf,
    /// Subdivide every step into k before reading.
    #[arg(long, value_name = "K")]
    pub subdivide: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
#[command(group(clap::ArgGroup::new("class").required(true)))]
pub struct ClassArgs {
    /// Initial class as letters, e.g. `"1 2 -3"`.
    #[arg(long, group = "class", allow_hyphen_values = true)]
    pub word: Option<String>,
    /// Round loop about the punctures in chart slots j..=k.
    #[arg(long, group = "class", num_args = 2, value_names = ["J", "K"])]
    pub round: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct TransportArgs {
    pub trajectory: PathBuf,
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, value_name = "K")]
    pub subdivide: Option<usize>,
    /// Largest word length allowed during transport.
    #[arg(long, value_name = "N")]
    pub word_cap: Option<usize>,
    /// Write SVG frames of the configuration and a carried polyline here.
    #[arg(long, value_name = "DIR")]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Certify at the last sample of this trajectory.
    #[arg(required_unless_present = "points", conflicts_with = "points")]
    pub trajectory: Option<PathBuf>,
    /// Configuration `x,y;x,y;...`.
    #[arg(long)]
    pub points: Option<String>,
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PaperArgs {
    /// Range `a..b` (inclusive) or a single n.
    #[arg(long, default_value = "3..12")]
    pub n: String,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_name = "N")]
    pub word_cap: Option<usize>,
    /// Also write the table here (CSV unless `--format json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Extract(a) => commands::extract(&a),
        Command::Transport(a) => commands::transport(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Paper(a) => commands::paper(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
