use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use kpa_cli::{run_headless, CommandScript, ConfigFile, SimOverrides};
use kpa_service::fixture::scenario_config;
use kpa_service::{AuthTable, KnowledgePlane, Server};

#[derive(Parser)]
#[command(name = "kpa", version, about = "Knowledge plane over a simulated RAN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP knowledge plane.
    Serve(ServeArgs),
    /// Run the simulator headless and write its event log as NDJSON.
    Sim(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    /// Two gNBs, four cells and three static UEs near known positions.
    Scenario,
}

#[derive(clap::Args)]
struct SimFlags {
    /// JSON file with optional `sim` and `service` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ues: Option<u32>,
    #[arg(long)]
    gnbs: Option<u32>,
    #[arg(long)]
    cells_per_gnb: Option<u32>,
    #[arg(long)]
    tick_ms: Option<u64>,
    /// Start from a built-in network instead of the config file's.
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

impl SimFlags {
    fn load(&self) -> anyhow::Result<ConfigFile> {
        let mut file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(Fixture::Scenario) = self.fixture {
            file.sim = scenario_config();
        }
        file.sim = SimOverrides {
            seed: self.seed,
            ues: self.ues,
            gnbs: self.gnbs,
            cells_per_gnb: self.cells_per_gnb,
            tick_ms: self.tick_ms,
        }
        .apply(file.sim);
        Ok(file)
    }
}

#[derive(clap::Args)]
struct ServeArgs {
    #[command(flatten)]
    sim: SimFlags,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Only advance the clock through POST /sim/tick.
    #[arg(long)]
    manual_tick: bool,
    /// Directory for the snapshot and audit logs; resumes from it if present.
    #[arg(long)]
    persist: Option<PathBuf>,
    /// JSON token table. Without it, one demo token per role is installed.
    #[arg(long)]
    auth_table: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimArgs {
    #[command(flatten)]
    sim: SimFlags,
    #[arg(long, default_value_t = 100)]
    ticks: u64,
    /// JSON file of timed commands: {"commands": [{"tick": 5, "command": "power_up", "ue": "IMSI_1"}]}.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_logging() {
    let filter = tracing_subscriber::EnvFilter::try_from_env("KPA_LOG_LEVEL")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info"));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(io::stderr)
        .init();
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let file = args.sim.load()?;
    let auth = match &args.auth_table {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            AuthTable::from_json(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => {
            tracing::warn!("no --auth-table given; using demo tokens admin-token, operator-token, tenant-token, readonly-token");
            AuthTable::with_default_roles()
        }
    };
    let mut config = file.service_config(args.manual_tick, auth);
    config.persist_dir = args.persist.clone();
    let plane = Arc::new(KnowledgePlane::new(file.sim, config)?);
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .context("invalid --host/--port")?;

    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let server = Server::start(plane.clone(), addr).await?;
        println!("listening on {}", server.addr);
        io::stdout().flush()?;
        tracing::info!(addr = %server.addr, latest_tick = plane.latest_tick(), "knowledge plane up");
        tokio::signal::ctrl_c().await?;
        tracing::info!("shutting down");
        server.abort();
        anyhow::Ok(())
    })
}

fn sim(args: SimArgs) -> anyhow::Result<()> {
    let file = args.sim.load()?;
    let script = match &args.scenario {
        Some(p) => CommandScript::load(p)?,
        None => CommandScript::default(),
    };
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match run_headless(file.sim, args.ticks, &script, &mut out) {
        Ok(events) => {
            tracing::info!(ticks = args.ticks, events = events.len(), "headless run finished");
            Ok(())
        }
        // The reader went away, as with `kpa sim | head`.
        Err(e) if broken_pipe(&e) => Ok(()),
        Err(e) => Err(e),
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().map(io::Error::kind).or_else(|| {
            c.downcast_ref::<serde_json::Error>()
                .and_then(|j| j.io_error_kind())
        }) == Some(io::ErrorKind::BrokenPipe)
    })
}

fn main() -> anyhow::Result<()> {
    init_logging();
    match Cli::parse().command {
        Command::Serve(a) => serve(a),
        Command::Sim(a) => sim(a),
    }
}
