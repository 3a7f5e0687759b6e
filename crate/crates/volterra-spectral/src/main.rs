use std::process::ExitCode;

fn main() -> ExitCode {
    volterra_spectral::cli::main()
}
