use std::panic;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let code = panic::catch_unwind(|| erqa::cli::run(std::env::args_os())).unwrap_or(2);
    ExitCode::from(code as u8)
}
