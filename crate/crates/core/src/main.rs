use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pdecomp::cli::run(std::env::args()))
}
