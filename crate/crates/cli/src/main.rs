use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use msdim_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            if !out.written {
                let mut stdout = std::io::stdout().lock();
                if let Err(e) = stdout.write_all(&out.body).and_then(|_| stdout.flush()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(5);
                }
            }
            match out.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
