use std::process::ExitCode;

use clap::Parser;
use monotile_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let printed_artifact = outcome.artifact.as_ref() == Some(&outcome.text);
            match &cli.out {
                Some(path) if printed_artifact => println!("wrote {}", path.display()),
                _ => println!("{}", outcome.render(cli.format)),
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.verbose {
                eprintln!("error: {e:?}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
