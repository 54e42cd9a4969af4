use std::io::Write;
use std::panic;
use std::process::ExitCode;

use dirac_symmetry::{color_from_env, run, Exit};

fn main() -> ExitCode {
    let color = color_from_env();
    let args: Vec<_> = std::env::args_os().collect();
    let outcome = panic::catch_unwind(|| run(args, color));
    match outcome {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            let _ = std::io::stderr().write_all(out.stderr.as_bytes());
            ExitCode::from(out.exit.code() as u8)
        }
        Err(_) => ExitCode::from(Exit::Internal.code() as u8),
    }
}
