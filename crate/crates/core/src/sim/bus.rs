//! In-process event bus between the tick pipeline and its consumers.
//!
//! Publishing only stages events; `flush` delivers everything staged so far,
//! stably ordered by tick, to every subscriber of the matching type.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::model::{EventType, NetworkEvent};

pub type EventConsumer = Arc<dyn Fn(&NetworkEvent) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubscriptionHandle(u64);

struct Subscriber {
    event_type: EventType,
    consumer: EventConsumer,
}

#[derive(Default)]
pub struct EventBus {
    next_id: u64,
    subscribers: BTreeMap<u64, Subscriber>,
    staged: Vec<NetworkEvent>,
}

impl std::fmt::Debug for EventBus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EventBus")
            .field("subscribers", &self.subscribers.len())
            .field("staged", &self.staged.len())
            .finish()
    }
}

impl EventBus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subscribe(&mut self, event_type: EventType, consumer: EventConsumer) -> SubscriptionHandle {
        self.next_id += 1;
        self.subscribers
            .insert(self.next_id, Subscriber { event_type, consumer });
        SubscriptionHandle(self.next_id)
    }

    /// Returns false when the handle was already released.
    pub fn unsubscribe(&mut self, handle: SubscriptionHandle) -> bool {
        self.subscribers.remove(&handle.0).is_some()
    }

    pub fn subscriber_count(&self, event_type: EventType) -> usize {
        self.subscribers
            .values()
            .filter(|s| s.event_type == event_type)
            .count()
    }

    pub fn publish(&mut self, event: NetworkEvent) {
        self.staged.push(event);
    }

    pub fn publish_batch(&mut self, events: impl IntoIterator<Item = NetworkEvent>) {
        self.staged.extend(events);
    }

    pub fn flush(&mut self) {
        let mut staged = std::mem::take(&mut self.staged);
        staged.sort_by_key(|e| e.tick);
        for event in &staged {
            for sub in self.subscribers.values() {
                if sub.event_type == event.event_type {
                    (sub.consumer)(event);
                }
            }
        }
    }
}
