mod args;
mod commands;
mod meta;
mod svg;

use clap::Parser;

use crate::args::Args;
use crate::commands::{
    cmd_critical, cmd_curvature, cmd_flow, cmd_ode, cmd_scan, cmd_verify, EXIT_USAGE,
};

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("REINHARDT_LOG", "error"),
    )
    .init();
    // Clap's native error path exits with code 2; the exit-code contract
    // reserves 2 for residual breaches, so usage errors are mapped by hand.
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            if err.use_stderr() {
                eprintln!("{err}");
                std::process::exit(EXIT_USAGE);
            }
            // --help / --version print to stdout and exit cleanly.
            err.print().expect("writing help");
            std::process::exit(0);
        }
    };
    let result = match args.command.as_str() {
        "curvature" => cmd_curvature(&args),
        "scan" => cmd_scan(&args),
        "flow" => cmd_flow(&args),
        "verify" => cmd_verify(&args),
        "critical" => cmd_critical(&args),
        "ode" => cmd_ode(&args),
        other => {
            eprintln!(
                "unknown command `{other}` (expected curvature, scan, flow, verify, critical, ode)"
            );
            std::process::exit(EXIT_USAGE);
        }
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(EXIT_USAGE);
        }
    }
}
