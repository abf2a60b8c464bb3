use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(shockscan::cli::run_from(std::env::args_os(), &mut io::stdout(), &mut io::stderr()))
}
