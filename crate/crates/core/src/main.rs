use std::process::ExitCode;

fn main() -> ExitCode {
    vexlab::cli::main_with_args(std::env::args_os())
}
