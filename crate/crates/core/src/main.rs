use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cdlay::cli::{parse_override, run, BuildRequest, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "cdlay", version, about = "Lay out commutative diagrams as SVG")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a .cdl file to SVG.
    Build {
        input: PathBuf,
        #[arg(short = 'o', long = "output", required_unless_present = "check")]
        output: Option<PathBuf>,
        /// Also write the geometry as JSON.
        #[arg(long = "dump-geometry", value_name = "FILE")]
        dump_geometry: Option<PathBuf>,
        /// Text metrics override file.
        #[arg(long, value_name = "FILE")]
        metrics: Option<PathBuf>,
        /// Override a [config] key.
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        set: Vec<(String, String)>,
        /// Lay out without writing anything.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let Command::Build {
        input,
        output,
        dump_geometry,
        metrics,
        set,
        check,
    } = args.command;
    let req = BuildRequest {
        input,
        output,
        geometry: dump_geometry,
        metrics,
        overrides: set,
        check,
    };
    let code = run(&req, &mut std::io::stderr());
    ExitCode::from(code as u8)
}
