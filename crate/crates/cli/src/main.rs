use std::io;
use std::process::ExitCode;

use clap::Parser;
use mzi_qfi_cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments, matching the config-error code.
    let cli = Cli::parse();
    let code = run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
