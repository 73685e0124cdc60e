use std::io::Write;
use std::process::ExitCode;

use bosonclt::cli::{run, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let input = match config.input_path() {
        Some(path) => match std::fs::read(path) {
            Ok(bytes) => Some(bytes),
            Err(e) => {
                eprintln!("error[io]: cannot read {}: {e}", path.display());
                return ExitCode::from(3);
            }
        },
        None => None,
    };
    let out = run(&config, input.as_deref());
    if out.exit_code != 0 {
        eprintln!("{}", out.stderr);
        return ExitCode::from(out.exit_code as u8);
    }
    let written = match config.out.as_deref() {
        Some(path) if path.as_os_str() != "-" => std::fs::write(path, &out.stdout),
        _ => std::io::stdout().lock().write_all(out.stdout.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error[io]: {e}");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
