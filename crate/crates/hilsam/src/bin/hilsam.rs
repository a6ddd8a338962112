use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hilsam::cli::{parse_chart, parse_ideal_file, run_command, Command, Options};

/// Exact invariants of polynomial ideals at the origin: Hilbert-Samuel
/// functions, directrix and ridge, characteristic polyhedra, and the
/// cone-constancy criterion.
#[derive(Parser)]
#[command(version, about, max_term_width = 100)]
struct Args {
    /// One of: hs, nu-star, directrix, ridge, stratum-ideal, polyhedron,
    /// prepare, blowup, criterion, normal-flat, scan, report
    command: String,

    /// Ideal file (field/vars/split/gen directives)
    file: PathBuf,

    /// Truncation bound for Hilbert-Samuel computations
    #[arg(long = "D", value_name = "N", default_value_t = 6)]
    trunc: u32,

    /// Power bound for radical membership tests (default: sum of generator degrees)
    #[arg(long, value_name = "N")]
    nmax: Option<u32>,

    /// Step budget for polyhedron preparation
    #[arg(long, value_name = "N", default_value_t = 64)]
    steps: usize,

    /// Maximal field extension level for point scans
    #[arg(long, value_name = "J", default_value_t = 2)]
    ext: u32,

    /// Coordinate box limit for point scans (default: whole field)
    #[arg(long = "box", value_name = "B")]
    boxlim: Option<u64>,

    /// Blow-up chart, e.g. u1 or y2 (blowup command only)
    #[arg(long, value_name = "CHART")]
    chart: Option<String>,

    /// Emit the report as JSON (default)
    #[arg(long)]
    json: bool,

    /// Emit the report as plain text instead of JSON
    #[arg(long, conflicts_with = "json")]
    text: bool,
}

fn run(args: &Args) -> hilsam::Result<(String, i32)> {
    let cmd = Command::parse(&args.command)?;
    let source = std::fs::read_to_string(&args.file)
        .map_err(|e| hilsam::Error::Domain(format!("cannot read {}: {e}", args.file.display())))?;
    let session = parse_ideal_file(&source)?;
    let chart = args.chart.as_deref().map(parse_chart).transpose()?;
    let opts = Options {
        trunc: args.trunc,
        nmax: args.nmax,
        steps: args.steps,
        ext: args.ext,
        boxlim: args.boxlim,
        chart,
        json: !args.text,
    };
    run_command(&session, cmd, &opts)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok((report, code)) => {
            // A closed pipe (e.g. `hilsam ... | head`) is not an error.
            if let Err(e) = writeln!(std::io::stdout(), "{report}") {
                if e.kind() == ErrorKind::BrokenPipe {
                    return ExitCode::from(code as u8);
                }
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if code == 1 {
                eprintln!("error: the prediction disagrees with the ground truth");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
