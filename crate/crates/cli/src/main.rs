use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(bernstein_cli::run_from_args(std::env::args_os()) as u8)
}
