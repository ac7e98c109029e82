use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use epistemic_qm_cli::{run, Cli, TOL_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = std::env::var(TOL_ENV).ok();
    match run(&cli, tol.as_deref()) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
