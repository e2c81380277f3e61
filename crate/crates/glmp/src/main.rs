use std::process::ExitCode;

fn main() -> ExitCode {
    glmp::cli::run()
}
