use std::process::ExitCode;

use clap::Parser;
use simba_cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.run() {
        Ok(written) => {
            println!("wrote {} files", written.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("simba: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
