use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use isoscatter::cli::{run, Cli, Verdict};

fn main() -> ExitCode {
    // clap would exit 2 on usage errors; 2 is reserved for violated
    // verdicts, so usage problems map to the generic error code 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Violated) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
