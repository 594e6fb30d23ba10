use std::process::ExitCode;

use clap::Parser;
use cosmic::cli::{execute, finish, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    let mut stdout = std::io::stdout().lock();
    let code = finish(execute(&cli, &mut stdout), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
