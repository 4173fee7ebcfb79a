//! `awq`: evaluate the polynomial families, densities and moments of
//! `awq-core` on grids, compare expansion partial sums with closed forms,
//! and run the verification suite.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on a
//! usage or precondition error.

mod args;
mod commands;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => commands::eval(a).map(|t| (t, true)),
        Command::Expand(a) => commands::expand(a).map(|t| (t, true)),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok((text, ok)) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe downstream is not an error worth reporting
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
