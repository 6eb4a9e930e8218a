use std::process::ExitCode;

use clap::Parser;
use faultrec_cli::config::OUT_DIR_ENV;
use faultrec_cli::{execute, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli, std::env::var_os(OUT_DIR_ENV).map(Into::into)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
