mod args;
mod commands;
mod config;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lattice_area::Error;

use crate::args::Cli;

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_resource() => EXIT_RESOURCE,
        Error::MalformedSpec(_)
        | Error::NoNegativeStep
        | Error::NoPositiveStep
        | Error::ZeroWeight(_)
        | Error::NonpositiveArgument(_)
        | Error::OrderOutOfRange(_)
        | Error::Precondition(_)
        | Error::Config(_) => EXIT_VALIDATION,
        _ => EXIT_FAILURE,
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let name = commands::name(&cli.command);
    let settings = config::resolve(config::from_command(&cli.global, &cli.command), cli.global.config.as_deref())?;
    if let Some(n) = settings.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    settings.budget()?;
    settings.tolerances()?;
    let header = settings.echo(name);
    let outcome = commands::run(&cli.command, &settings)?;
    let text = render::render(&outcome.report, &header, settings.format());
    let written = match &settings.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| Error::Config(format!("cannot write output: {e}")))?;
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
