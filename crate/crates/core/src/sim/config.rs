use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::Position;

#[derive(Debug, Error, PartialEq)]
#[error("invalid configuration field `{field}`: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width_m: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbPlacement {
    pub id: String,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeServerConfig {
    pub id: String,
    pub capacity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandRange {
    pub min: u32,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledPowerUp {
    pub tick: u64,
    pub ue: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub seed: u64,
    pub tick_duration_ms: u64,
    pub area: Area,
    pub gnbs: Vec<GnbPlacement>,
    pub cells_per_gnb: u32,
    pub ue_count: u32,
    pub prb_capacity_per_cell: u32,
    pub a3_hysteresis_db: f64,
    pub a3_ttt_ticks: u32,
    pub mobility_speed_mps: SpeedRange,
    pub edge_servers: Vec<EdgeServerConfig>,
    pub tx_power_dbm: f64,
    pub demand_prbs: DemandRange,
    /// Explicit positions for IMSI_1.. in order; remaining UEs are placed randomly.
    pub ue_positions: Vec<Position>,
    pub power_up_schedule: Vec<ScheduledPowerUp>,
    pub attach_floor_dbm: f64,
    pub load_imbalance_threshold: f64,
    pub cio_step_db: f64,
    pub cio_cap_db: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let area = Area {
            width_m: 2000.0,
            height_m: 2000.0,
        };
        Self {
            seed: 1,
            tick_duration_ms: 100,
            area,
            gnbs: grid_gnbs(2, area),
            cells_per_gnb: 3,
            ue_count: 0,
            prb_capacity_per_cell: 100,
            a3_hysteresis_db: 2.0,
            a3_ttt_ticks: 3,
            mobility_speed_mps: SpeedRange { min: 1.0, max: 15.0 },
            edge_servers: vec![
                EdgeServerConfig {
                    id: "edge1".into(),
                    capacity: 20,
                },
                EdgeServerConfig {
                    id: "edge2".into(),
                    capacity: 20,
                },
            ],
            tx_power_dbm: 30.0,
            demand_prbs: DemandRange { min: 5, max: 20 },
            ue_positions: Vec::new(),
            power_up_schedule: Vec::new(),
            attach_floor_dbm: -120.0,
            load_imbalance_threshold: 0.3,
            cio_step_db: 1.0,
            cio_cap_db: 6.0,
        }
    }
}

impl SimConfig {
    /// Power up IMSI_k at tick `first_tick + k - 1`.
    pub fn with_staggered_power_up(mut self, first_tick: u64) -> Self {
        self.power_up_schedule = (1..=self.ue_count)
            .map(|k| ScheduledPowerUp {
                tick: first_tick + u64::from(k) - 1,
                ue: super::model::ue_id(k),
            })
            .collect();
        self
    }

    /// Power up every UE at the same tick.
    pub fn with_power_up_at(mut self, tick: u64) -> Self {
        self.power_up_schedule = (1..=self.ue_count)
            .map(|k| ScheduledPowerUp {
                tick,
                ue: super::model::ue_id(k),
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.area.width_m > 0.0 && self.area.height_m > 0.0) {
            return Err(ConfigError::new("area", "dimensions must be > 0"));
        }
        if self.prb_capacity_per_cell < 1 {
            return Err(ConfigError::new("prb_capacity_per_cell", "must be >= 1"));
        }
        if self.a3_ttt_ticks < 1 {
            return Err(ConfigError::new("a3_ttt_ticks", "must be >= 1"));
        }
        if self.tick_duration_ms == 0 {
            return Err(ConfigError::new("tick_duration_ms", "must be >= 1"));
        }
        if !self.gnbs.is_empty() && self.cells_per_gnb == 0 {
            return Err(ConfigError::new("cells_per_gnb", "must be >= 1"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.gnbs {
            if g.id.is_empty() || !seen.insert(g.id.as_str()) {
                return Err(ConfigError::new(
                    "gnbs",
                    format!("duplicate or empty id `{}`", g.id),
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.edge_servers {
            if e.id.is_empty() || !seen.insert(e.id.as_str()) {
                return Err(ConfigError::new(
                    "edge_servers",
                    format!("duplicate or empty id `{}`", e.id),
                ));
            }
        }
        let s = self.mobility_speed_mps;
        if !(s.min >= 0.0 && s.max >= s.min && s.max.is_finite()) {
            return Err(ConfigError::new("mobility_speed_mps", "need 0 <= min <= max"));
        }
        let d = self.demand_prbs;
        if d.min < 1 || d.max < d.min {
            return Err(ConfigError::new("demand_prbs", "need 1 <= min <= max"));
        }
        if self.ue_positions.len() > self.ue_count as usize {
            return Err(ConfigError::new("ue_positions", "more positions than UEs"));
        }
        if self.a3_hysteresis_db.is_nan() || self.a3_hysteresis_db < 0.0 {
            return Err(ConfigError::new("a3_hysteresis_db", "must be >= 0"));
        }
        if !(self.cio_step_db > 0.0 && self.cio_cap_db >= self.cio_step_db) {
            return Err(ConfigError::new("cio_step_db", "need 0 < step <= cap"));
        }
        if !(self.load_imbalance_threshold >= 0.0 && self.load_imbalance_threshold <= 1.0) {
            return Err(ConfigError::new("load_imbalance_threshold", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Evenly spread `n` gNBs (ids gnb1..gnbN) across the area on a near-square grid.
pub fn grid_gnbs(n: u32, area: Area) -> Vec<GnbPlacement> {
    if n == 0 {
        return Vec::new();
    }
    let cols = (f64::from(n).sqrt().ceil() as u32).max(1);
    let rows = n.div_ceil(cols);
    (0..n)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            GnbPlacement {
                id: format!("gnb{}", i + 1),
                position: Position::new(
                    area.width_m * (f64::from(c) + 0.5) / f64::from(cols),
                    area.height_m * (f64::from(r) + 0.5) / f64::from(rows),
                ),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_zero_ttt_naming_field() {
        let cfg = SimConfig {
            a3_ttt_ticks: 0,
            ..SimConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().field, "a3_ttt_ticks");
    }

    #[test]
    fn rejects_degenerate_area_and_capacity() {
        let cfg = SimConfig {
            area: Area {
                width_m: 0.0,
                height_m: 10.0,
            },
            ..SimConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().field, "area");
        let cfg = SimConfig {
            prb_capacity_per_cell: 0,
            ..SimConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().field, "prb_capacity_per_cell");
    }

    #[test]
    fn grid_places_all_inside_area() {
        let area = Area {
            width_m: 900.0,
            height_m: 600.0,
        };
        let g = grid_gnbs(5, area);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0].id, "gnb1");
        for p in g {
            assert!(p.position.x > 0.0 && p.position.x < 900.0);
            assert!(p.position.y > 0.0 && p.position.y < 600.0);
        }
    }
}
