use std::process::ExitCode;

fn main() -> ExitCode {
    endoring::cli::run()
}
