use std::process::ExitCode;

fn main() -> ExitCode {
    qentropy::cli::main_with_args(std::env::args_os())
}
