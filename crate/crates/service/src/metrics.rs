//! Per-route query counters and latency percentiles.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;
use std::time::Duration;

use serde::Serialize;

/// Latency samples kept per series for percentile estimates.
const WINDOW: usize = 10_000;

#[derive(Debug, Default)]
struct Series {
    count: u64,
    samples: VecDeque<f64>,
}

impl Series {
    fn record(&mut self, ms: f64) {
        self.count += 1;
        self.samples.push_back(ms);
        if self.samples.len() > WINDOW {
            self.samples.pop_front();
        }
    }

    fn summary(&self) -> SeriesSummary {
        let mut sorted: Vec<f64> = self.samples.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        SeriesSummary {
            count: self.count,
            p50_ms: percentile(&sorted, 50.0),
            p99_ms: percentile(&sorted, 99.0),
            max_ms: sorted.last().copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub count: u64,
    pub p50_ms: f64,
    pub p99_ms: f64,
    pub max_ms: f64,
}

/// Nearest-rank percentile of an ascending slice; 0 when empty.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Default)]
pub struct Metrics {
    routes: Mutex<BTreeMap<String, Series>>,
    ticks: Mutex<Series>,
}

impl Metrics {
    pub fn record_query(&self, route: &str, latency: Duration) {
        let mut routes = self.routes.lock().expect("metrics lock poisoned");
        routes
            .entry(route.to_string())
            .or_default()
            .record(latency.as_secs_f64() * 1000.0);
    }

    pub fn record_tick(&self, elapsed: Duration) {
        self.ticks
            .lock()
            .expect("metrics lock poisoned")
            .record(elapsed.as_secs_f64() * 1000.0);
    }

    pub fn routes(&self) -> BTreeMap<String, SeriesSummary> {
        let routes = self.routes.lock().expect("metrics lock poisoned");
        routes.iter().map(|(k, s)| (k.clone(), s.summary())).collect()
    }

    pub fn tick_processing(&self) -> SeriesSummary {
        self.ticks.lock().expect("metrics lock poisoned").summary()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 50.0);
        assert_eq!(percentile(&v, 99.0), 99.0);
        assert_eq!(percentile(&[7.0], 99.0), 7.0);
        assert_eq!(percentile(&[], 50.0), 0.0);
    }
}
