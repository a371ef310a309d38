use std::process::ExitCode;

fn main() -> ExitCode {
    bequest::cli::run(std::env::args_os())
}
