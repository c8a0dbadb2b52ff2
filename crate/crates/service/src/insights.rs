//! Rule-based insights over windowed attribute history.

use std::collections::{BTreeMap, VecDeque};

use kpa_core::sim::scheduler::get_load;
use kpa_core::sim::NetworkState;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InsightType {
    CongestionRisk,
    CqiAnomaly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// Every value in the last `window_ticks` ticks is above the threshold.
    Gt,
    /// Every value in the last `window_ticks` ticks is below the threshold.
    Lt,
    /// Some value in the previous `window_ticks` ticks exceeds the current
    /// one by at least the threshold.
    DropAtLeast,
}

/// Attribute a rule reads. Only numeric attributes are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CellLoad,
    UeCqi,
}

impl Metric {
    pub fn entity_type(self) -> &'static str {
        match self {
            Metric::CellLoad => "cell",
            Metric::UeCqi => "ue",
        }
    }

    pub fn attribute(self) -> &'static str {
        match self {
            Metric::CellLoad => "load",
            Metric::UeCqi => "cqi",
        }
    }

    /// (subject id, value) for every entity of the metric's type, id ordered.
    pub fn sample(self, state: &NetworkState) -> Vec<(String, f64)> {
        match self {
            Metric::CellLoad => state
                .cells
                .values()
                .map(|c| (c.id.clone(), get_load(c)))
                .collect(),
            Metric::UeCqi => state
                .ues
                .values()
                .map(|u| (u.id.clone(), f64::from(u.cqi)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightRule {
    pub id: String,
    pub insight_type: InsightType,
    pub metric: Metric,
    /// Glob over subject ids; `*` selects every entity.
    pub subject_selector: String,
    pub comparator: Comparator,
    pub threshold: f64,
    pub window_ticks: u32,
}

impl InsightRule {
    pub fn defaults() -> Vec<InsightRule> {
        vec![
            InsightRule {
                id: "congestion_risk".into(),
                insight_type: InsightType::CongestionRisk,
                metric: Metric::CellLoad,
                subject_selector: "*".into(),
                comparator: Comparator::Gt,
                threshold: 0.8,
                window_ticks: 3,
            },
            InsightRule {
                id: "cqi_anomaly".into(),
                insight_type: InsightType::CqiAnomaly,
                metric: Metric::UeCqi,
                subject_selector: "*".into(),
                comparator: Comparator::DropAtLeast,
                threshold: 8.0,
                window_ticks: 2,
            },
        ]
    }

    /// Number of trailing samples the predicate looks at.
    pub fn history_len(&self) -> usize {
        match self.comparator {
            Comparator::Gt | Comparator::Lt => self.window_ticks as usize,
            Comparator::DropAtLeast => self.window_ticks as usize + 1,
        }
    }

    /// Evaluate over the trailing samples, oldest first. Samples must be on
    /// consecutive ticks and exactly `history_len` long for the Gt/Lt forms.
    pub fn holds(&self, samples: &[EvidencePoint]) -> bool {
        let n = self.history_len();
        match self.comparator {
            Comparator::Gt => samples.len() == n && samples.iter().all(|s| s.value > self.threshold),
            Comparator::Lt => samples.len() == n && samples.iter().all(|s| s.value < self.threshold),
            Comparator::DropAtLeast => match samples.split_last() {
                Some((current, earlier)) if !earlier.is_empty() => {
                    earlier.iter().any(|s| s.value - current.value >= self.threshold)
                }
                _ => false,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidencePoint {
    pub tick: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insight {
    pub rule_id: String,
    pub insight_type: InsightType,
    pub subject: String,
    pub entity_type: String,
    pub attribute: String,
    /// First tick of the current uninterrupted run in which the rule held.
    pub fired_tick: u64,
    pub evidence: Vec<EvidencePoint>,
}

/// Incremental evaluator: fed one state per tick, in tick order.
#[derive(Debug, Clone, Default)]
pub struct InsightEngine {
    rules: Vec<InsightRule>,
    history: BTreeMap<(usize, String), VecDeque<EvidencePoint>>,
    firing_since: BTreeMap<(usize, String), u64>,
}

impl InsightEngine {
    pub fn new(rules: Vec<InsightRule>) -> Self {
        Self {
            rules,
            history: BTreeMap::new(),
            firing_since: BTreeMap::new(),
        }
    }

    pub fn rules(&self) -> &[InsightRule] {
        &self.rules
    }

    /// Record `state` and return every insight that fires at its tick,
    /// ordered by rule then subject.
    pub fn observe(&mut self, state: &NetworkState) -> Vec<Insight> {
        let tick = state.tick;
        let mut out = Vec::new();
        for (ri, rule) in self.rules.iter().enumerate() {
            let keep = rule.history_len();
            for (subject, value) in rule.metric.sample(state) {
                if !crate::auth::glob_match(&rule.subject_selector, &subject) {
                    continue;
                }
                let key = (ri, subject.clone());
                let hist = self.history.entry(key.clone()).or_default();
                if hist.back().is_some_and(|p| p.tick + 1 != tick) {
                    hist.clear();
                }
                hist.push_back(EvidencePoint { tick, value });
                while hist.len() > keep {
                    hist.pop_front();
                }
                let samples: Vec<EvidencePoint> = hist.iter().copied().collect();
                if rule.holds(&samples) {
                    let since = *self.firing_since.entry(key).or_insert(tick);
                    out.push(Insight {
                        rule_id: rule.id.clone(),
                        insight_type: rule.insight_type,
                        subject,
                        entity_type: rule.metric.entity_type().to_string(),
                        attribute: rule.metric.attribute().to_string(),
                        fired_tick: since,
                        evidence: samples,
                    });
                } else {
                    self.firing_since.remove(&key);
                }
            }
        }
        out
    }
}
