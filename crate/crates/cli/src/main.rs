use std::io;
use std::process::ExitCode;

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("SIGMAK_LOG").as_deref() {
        Err(_) | Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(format!("SIGMAK_LOG must be quiet, info or debug, not {other:?}")),
    };
    env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).format_timestamp(None).init();
    Ok(())
}

fn main() -> ExitCode {
    if let Err(msg) = init_logging() {
        eprintln!("error: {msg}");
        return ExitCode::from(sigmak_cli::EXIT_VALIDATION as u8);
    }
    let code = sigmak_cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
