//! Drive the command-line front end in-process and print its JSON report.
//!
//! ```text
//! cargo run --release --example cli_report -- analyze --corpus parabola
//! ```

use clap::Parser;
use lipcone::cli::{execute, Cli};

fn main() {
    let mut args: Vec<String> = std::env::args().collect();
    if args.len() == 1 {
        args.extend(["cone", "--corpus", "pichon-neumann", "--symbolic"].map(String::from));
    }
    match Cli::try_parse_from(&args).map_err(|e| e.to_string()).and_then(|cli| execute(&cli).map_err(|e| e.to_string())) {
        Ok(report) => print!("{report}"),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
