//! Ring of immutable per-tick snapshots.

use std::collections::VecDeque;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use kpa_core::sim::NetworkState;
use serde::{Deserialize, Serialize};

use crate::insights::Insight;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub tick: u64,
    pub state: NetworkState,
    pub insights: Vec<Insight>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Evicted { oldest: u64 },
    NotYet { latest: u64 },
}

#[derive(Debug)]
struct Ring {
    snapshots: VecDeque<Arc<Snapshot>>,
    published_at: Instant,
}

#[derive(Debug)]
pub struct SnapshotStore {
    capacity: usize,
    ring: RwLock<Ring>,
}

impl SnapshotStore {
    pub fn new(capacity: usize, first: Snapshot) -> Self {
        let mut snapshots = VecDeque::with_capacity(capacity.clamp(1, 1024));
        snapshots.push_back(Arc::new(first));
        Self {
            capacity: capacity.max(1),
            ring: RwLock::new(Ring {
                snapshots,
                published_at: Instant::now(),
            }),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Append the snapshot of a newer tick, evicting the oldest when full.
    ///
    /// # Panics
    /// If `snapshot.tick` does not exceed the latest retained tick.
    pub fn publish(&self, snapshot: Arc<Snapshot>) {
        let mut ring = self.ring.write().expect("snapshot lock poisoned");
        let latest = ring.snapshots.back().map(|s| s.tick);
        assert!(latest.is_none_or(|t| snapshot.tick > t), "ticks must increase");
        ring.snapshots.push_back(snapshot);
        while ring.snapshots.len() > self.capacity {
            ring.snapshots.pop_front();
        }
        ring.published_at = Instant::now();
    }

    pub fn latest(&self) -> Arc<Snapshot> {
        let ring = self.ring.read().expect("snapshot lock poisoned");
        ring.snapshots.back().cloned().expect("store is never empty")
    }

    pub fn latest_tick(&self) -> u64 {
        self.latest().tick
    }

    pub fn oldest_tick(&self) -> u64 {
        let ring = self.ring.read().expect("snapshot lock poisoned");
        ring.snapshots.front().map_or(0, |s| s.tick)
    }

    pub fn len(&self) -> usize {
        self.ring.read().expect("snapshot lock poisoned").snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn age_ms(&self) -> f64 {
        let ring = self.ring.read().expect("snapshot lock poisoned");
        ring.published_at.elapsed().as_secs_f64() * 1000.0
    }

    /// Snapshot at `tick`, or the latest when `tick` is `None`.
    pub fn at(&self, tick: Option<u64>) -> Result<Arc<Snapshot>, Lookup> {
        let ring = self.ring.read().expect("snapshot lock poisoned");
        let latest = ring.snapshots.back().expect("store is never empty");
        let Some(tick) = tick else {
            return Ok(latest.clone());
        };
        if tick > latest.tick {
            return Err(Lookup::NotYet { latest: latest.tick });
        }
        let oldest = ring.snapshots.front().expect("store is never empty").tick;
        if tick < oldest {
            return Err(Lookup::Evicted { oldest });
        }
        // Ticks are strictly increasing but may skip after recovery.
        let idx = ring
            .snapshots
            .binary_search_by_key(&tick, |s| s.tick)
            .map_err(|_| Lookup::Evicted { oldest })?;
        Ok(ring.snapshots[idx].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kpa_core::sim::{init_network, SimConfig};

    fn snap(tick: u64) -> Snapshot {
        let mut state = init_network(SimConfig::default()).unwrap();
        state.tick = tick;
        Snapshot {
            tick,
            state,
            insights: vec![],
        }
    }

    #[test]
    fn ring_evicts_oldest() {
        let store = SnapshotStore::new(3, snap(0));
        for t in 1..=4 {
            store.publish(Arc::new(snap(t)));
        }
        assert_eq!(store.len(), 3);
        assert_eq!(store.oldest_tick(), 2);
        assert_eq!(store.latest_tick(), 4);
        assert_eq!(store.at(Some(3)).unwrap().tick, 3);
        assert_eq!(store.at(Some(1)).unwrap_err(), Lookup::Evicted { oldest: 2 });
        assert_eq!(store.at(Some(9)).unwrap_err(), Lookup::NotYet { latest: 4 });
        assert_eq!(store.at(None).unwrap().tick, 4);
    }

    #[test]
    #[should_panic(expected = "ticks must increase")]
    fn rejects_stale_tick() {
        let store = SnapshotStore::new(3, snap(5));
        store.publish(Arc::new(snap(5)));
    }
}
