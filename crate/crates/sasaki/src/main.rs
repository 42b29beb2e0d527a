use std::io::Write;
use std::process;

use clap::Parser;
use sasaki::cli::{run, Cli};
use sasaki::ExitCode;

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                process::exit(ExitCode::BadInput as i32);
            }
            if out.code == ExitCode::VerifyFailed {
                eprintln!("error: one or more checks failed (see FAIL rows)");
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    process::exit(code as i32);
}
