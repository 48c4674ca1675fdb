use std::collections::BTreeSet;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grocery_memory::server::{self, DEFAULT_PORT, PORT_ENV};
use grocery_memory::{load_state, run_script, save_state, scenarios, ScenarioScript, Session};

const EXIT_USAGE: u8 = 1;
const EXIT_SCENARIO: u8 = 2;

#[derive(Parser)]
#[command(
    name = "grocery-memory",
    version,
    about = "Household missing-grocery reasoning and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario file (or a bundled experiment name) and print its reports.
    Run {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Save the final memory state snapshot.
        #[arg(long)]
        save_state: Option<PathBuf>,
    },
    /// Serve the HTTP/JSON API over one live session.
    Serve {
        #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Household to simulate: a scenario file or bundled name.
        #[arg(long, default_value = "experiment1")]
        scenario: String,
        /// Teach every context before serving instead of waiting for teach/learn commands.
        #[arg(long)]
        pretrain: bool,
    },
    /// Show missing items that are not already on the user's list.
    Diff {
        /// Comma-separated user grocery list.
        #[arg(long, value_delimiter = ',')]
        list: Vec<String>,
        /// State snapshot holding the missing list.
        #[arg(long, conflicts_with = "missing", required_unless_present = "missing")]
        state: Option<PathBuf>,
        /// Comma-separated missing list, instead of a snapshot.
        #[arg(long, value_delimiter = ',')]
        missing: Option<Vec<String>>,
    },
    /// Validate a state snapshot and print a summary.
    Inspect { state: PathBuf },
    /// List bundled experiment scenarios.
    Scenarios,
}

fn load_script(arg: &str) -> grocery_memory::Result<ScenarioScript> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(text) = scenarios::source(arg) {
            return ScenarioScript::from_json(text);
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| grocery_memory::Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    ScenarioScript::from_json(&text)
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            save_state: state_path,
        } => {
            let script = load_script(&scenario)?;
            let (outcome, sim) = run_script(&script, seed)?;
            let json = serde_json::to_string_pretty(&outcome)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, json + "\n")?;
                    for r in &outcome.reports {
                        println!(
                            "day {:>3}  missing: {}",
                            r.window_end_day,
                            r.missing_list.iter().cloned().collect::<Vec<_>>().join(", ")
                        );
                    }
                }
                None => println!("{json}"),
            }
            if let Some(path) = state_path {
                save_state(&sim.snapshot(), path)?;
            }
        }
        Command::Serve {
            port,
            host,
            scenario,
            pretrain,
        } => {
            let script = load_script(&scenario)?;
            let session = Session::from_script(&script, pretrain)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(session, SocketAddr::new(host, port)))?;
        }
        Command::Diff { list, state, missing } => {
            let missing: grocery_memory::MissingList = match (state, missing) {
                (Some(path), _) => load_state(path)?.missing_list,
                (None, Some(items)) => items.into_iter().map(|s| s.trim().to_owned()).collect(),
                (None, None) => unreachable!("clap requires one source"),
            };
            let user: BTreeSet<String> = list.into_iter().map(|s| s.trim().to_owned()).collect();
            let diff = missing.diff_with_user_list(&user);
            println!("{}", serde_json::to_string(&diff)?);
        }
        Command::Inspect { state } => {
            let snap = load_state(&state)?;
            println!("format version : {}", snap.format_version);
            println!("vocabulary     : {}", snap.vocabulary.labels().join(", "));
            println!("day cursor     : {}", snap.day_cursor);
            println!(
                "window         : days {}..={} ({} entries)",
                snap.stcm.window_start_day(),
                snap.stcm.window_last_day(),
                snap.stcm.len()
            );
            println!("clusters       : {}", snap.network.clusters().len());
            for c in snap.network.clusters() {
                let storage = if c.is_storage { " [storage]" } else { "" };
                println!("  - {}{}", c.label, storage);
            }
            let missing: Vec<&str> = snap.missing_list.items().iter().map(String::as_str).collect();
            println!("missing list   : {}", missing.join(", "));
        }
        Command::Scenarios => {
            for name in scenarios::names() {
                println!("{name}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_SCENARIO)
        }
    }
}
