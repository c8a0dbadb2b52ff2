use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kpa_harness::provider::CompletionProvider;
use kpa_harness::{run_scenario, ExternalProvider, HttpClient, ScenarioId, ScriptedProvider};

#[derive(Parser)]
#[command(
    name = "kpa-harness",
    version,
    about = "Scripted agent scenarios against a knowledge plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (S1..S4, D1, D2, or `all`) and print its transcript.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        server: String,
        #[arg(long, env = "KPA_TOKEN")]
        token: String,
        /// Shell command acting as the completion provider instead of the
        /// scripted one.
        #[arg(long)]
        llm_provider: Option<String>,
        /// Print the transcript as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        scenario,
        server,
        token,
        llm_provider,
        json,
    } = Cli::parse().command;

    let ids: Vec<ScenarioId> = if scenario.eq_ignore_ascii_case("all") {
        ScenarioId::ALL.to_vec()
    } else {
        match scenario.parse() {
            Ok(id) => vec![id],
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    };
    let mut provider: Box<dyn CompletionProvider> = match &llm_provider {
        Some(cmd) => Box::new(ExternalProvider::new(cmd)),
        None => Box::new(ScriptedProvider),
    };

    let mut all_passed = true;
    for id in ids {
        let client = match HttpClient::new(&server, &token) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let transcript = match run_scenario(id, client, provider.as_mut()) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {id}: {e}");
                return ExitCode::from(2);
            }
        };
        if json {
            println!(
                "{}",
                serde_json::to_string(&transcript).expect("transcript serializes")
            );
        } else {
            print!("{}", transcript.render());
        }
        all_passed &= transcript.passed();
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
