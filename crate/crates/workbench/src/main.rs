//! Batch workbench for bigraphical reactive systems: load declarative
//! definition files, run reactions, enumerate traces, and check vertical
//! refinements between an abstract and a concrete system.

use std::process::ExitCode;

use clap::Parser;

mod brsfile;
mod cli;
mod report;

fn main() -> ExitCode {
    let args = cli::Cli::parse();
    match cli::run(&args.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
