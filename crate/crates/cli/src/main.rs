use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(memstab_cli::run(std::env::args_os()))
}
