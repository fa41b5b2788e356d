use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = harmap_cli::Cli::parse();
    match harmap_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            // numeric failures exit 3 with a JSON payload; config and I/O
            // problems exit 2 with the error chain
            if error.downcast_ref::<harmap::Error>().is_some() {
                eprintln!("{}", serde_json::json!({ "error": format!("{error:#}") }));
                ExitCode::from(3)
            } else {
                eprintln!("error: {error:#}");
                ExitCode::from(2)
            }
        }
    }
}
