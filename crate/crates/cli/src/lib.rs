//! Configuration files and run helpers shared by the `kpa` and
//! `kpa-harness` binaries.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use kpa_core::sim::{NetworkEvent, SimCommand, SimConfig, Simulator};
use kpa_service::insights::InsightRule;
use kpa_service::{AuthTable, ServiceConfig};
use serde::Deserialize;

/// Contents of a `--config` file. Both sections are optional and fall back
/// to defaults field by field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub sim: SimConfig,
    pub service: ServiceSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceSection {
    pub snapshot_capacity: usize,
    pub heartbeat_ms: u64,
    pub insight_rules: Vec<InsightRule>,
}

impl Default for ServiceSection {
    fn default() -> Self {
        let d = ServiceConfig::default();
        Self {
            snapshot_capacity: d.snapshot_capacity,
            heartbeat_ms: d.heartbeat.as_millis() as u64,
            insight_rules: d.insight_rules,
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn service_config(&self, manual_tick: bool, auth: AuthTable) -> ServiceConfig {
        ServiceConfig {
            manual_tick,
            snapshot_capacity: self.service.snapshot_capacity,
            heartbeat: Duration::from_millis(self.service.heartbeat_ms),
            persist_dir: None,
            auth,
            insight_rules: self.service.insight_rules.clone(),
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct SimOverrides {
    pub seed: Option<u64>,
    pub ues: Option<u32>,
    pub gnbs: Option<u32>,
    pub cells_per_gnb: Option<u32>,
    pub tick_ms: Option<u64>,
}

impl SimOverrides {
    /// Apply to `config`. A UE count without a power-up schedule gets a
    /// staggered one so the UEs actually join the network.
    pub fn apply(&self, mut config: SimConfig) -> SimConfig {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(n) = self.gnbs {
            config.gnbs = kpa_core::sim::grid_gnbs(n, config.area);
        }
        if let Some(n) = self.cells_per_gnb {
            config.cells_per_gnb = n;
        }
        if let Some(ms) = self.tick_ms {
            config.tick_duration_ms = ms;
        }
        if let Some(n) = self.ues {
            config.ue_count = n;
            config.power_up_schedule.retain(|p| {
                p.ue.strip_prefix("IMSI_")
                    .and_then(|k| k.parse::<u32>().ok())
                    .is_some_and(|k| k <= n)
            });
        }
        if config.power_up_schedule.is_empty() && config.ue_count > 0 {
            config = config.with_staggered_power_up(1);
        }
        config
    }
}

/// Timed commands for a headless run: each applies at the start of `tick`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandScript {
    pub commands: Vec<TimedCommand>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TimedCommand {
    pub tick: u64,
    #[serde(flatten)]
    pub command: SimCommand,
}

impl CommandScript {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn by_tick(&self) -> BTreeMap<u64, Vec<SimCommand>> {
        let mut out: BTreeMap<u64, Vec<SimCommand>> = BTreeMap::new();
        for c in &self.commands {
            out.entry(c.tick).or_default().push(c.command.clone());
        }
        out
    }
}

/// Run `ticks` ticks headless, writing each event as one JSON line.
pub fn run_headless(
    config: SimConfig,
    ticks: u64,
    script: &CommandScript,
    out: &mut dyn Write,
) -> anyhow::Result<Vec<NetworkEvent>> {
    let mut sim = Simulator::new(config).context("invalid simulation config")?;
    let mut scheduled = script.by_tick();
    let mut all = Vec::new();
    for _ in 0..ticks {
        let next = sim.state().tick + 1;
        for cmd in scheduled.remove(&next).unwrap_or_default() {
            sim.enqueue(cmd)
                .with_context(|| format!("command for tick {next}"))?;
        }
        for ev in sim.tick() {
            serde_json::to_writer(&mut *out, &ev)?;
            out.write_all(b"\n")?;
            all.push(ev);
        }
    }
    out.flush()?;
    Ok(all)
}
