use std::process::ExitCode;

fn main() -> ExitCode {
    parkhealth::cli::run()
}
