//! Consumer subscriptions fanned out from one upstream bus subscription per
//! event type.

use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use kpa_core::sim::{EventBus, EventType, NetworkEvent, SubscriptionHandle};
use serde::{Deserialize, Serialize};
use tokio::sync::Notify;

use crate::auth::glob_match;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubscriptionRecord {
    pub id: String,
    pub consumer: String,
    pub event_type: EventType,
    /// Glob over the event subject.
    pub filter: Option<String>,
    pub created_tick: u64,
    pub stream: String,
}

/// Per-consumer FIFO. Pushes never block; readers wait on `notify`.
#[derive(Debug, Default)]
pub struct ConsumerQueue {
    events: Mutex<VecDeque<NetworkEvent>>,
    notify: Notify,
    closed: AtomicBool,
    delivered: AtomicU64,
}

impl ConsumerQueue {
    fn push(&self, event: NetworkEvent) {
        self.events.lock().expect("queue lock poisoned").push_back(event);
        self.delivered.fetch_add(1, Ordering::Relaxed);
        self.notify.notify_one();
    }

    fn close(&self) {
        self.closed.store(true, Ordering::SeqCst);
        self.notify.notify_one();
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::SeqCst)
    }

    pub fn delivered(&self) -> u64 {
        self.delivered.load(Ordering::Relaxed)
    }

    pub fn drain(&self) -> Vec<NetworkEvent> {
        self.events
            .lock()
            .expect("queue lock poisoned")
            .drain(..)
            .collect()
    }

    /// Wait until an event is queued or the queue is closed.
    pub async fn wait(&self) {
        loop {
            let notified = self.notify.notified();
            if self.is_closed() || !self.events.lock().expect("queue lock poisoned").is_empty() {
                return;
            }
            notified.await;
        }
    }
}

#[derive(Debug)]
struct Consumer {
    record: SubscriptionRecord,
    queue: Arc<ConsumerQueue>,
}

#[derive(Debug, Default)]
struct Shared {
    consumers: Mutex<BTreeMap<u64, Consumer>>,
}

impl Shared {
    fn deliver(&self, event: &NetworkEvent) {
        let consumers = self.consumers.lock().expect("broker lock poisoned");
        for c in consumers.values() {
            if c.record.event_type != event.event_type {
                continue;
            }
            if c.record
                .filter
                .as_deref()
                .is_none_or(|f| glob_match(f, &event.subject))
            {
                c.queue.push(event.clone());
            }
        }
    }
}

#[derive(Debug, Default)]
pub struct Broker {
    shared: Arc<Shared>,
    upstream: Mutex<BTreeMap<EventType, SubscriptionHandle>>,
    next_id: AtomicU64,
}

impl Broker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a consumer. Subscribes upstream on `bus` only for the first
    /// consumer of the event type. Call with the simulator lock held.
    pub fn subscribe(
        &self,
        bus: &mut EventBus,
        consumer: &str,
        event_type: EventType,
        filter: Option<String>,
        created_tick: u64,
    ) -> (SubscriptionRecord, Arc<ConsumerQueue>) {
        let n = self.next_id.fetch_add(1, Ordering::SeqCst) + 1;
        let id = format!("sub-{n}");
        let record = SubscriptionRecord {
            id: id.clone(),
            consumer: consumer.to_string(),
            event_type,
            filter,
            created_tick,
            stream: format!("/subscriptions/{id}/stream"),
        };
        let queue = Arc::new(ConsumerQueue::default());
        self.shared
            .consumers
            .lock()
            .expect("broker lock poisoned")
            .insert(
                n,
                Consumer {
                    record: record.clone(),
                    queue: queue.clone(),
                },
            );
        let mut upstream = self.upstream.lock().expect("broker lock poisoned");
        upstream.entry(event_type).or_insert_with(|| {
            let shared = self.shared.clone();
            bus.subscribe(event_type, Arc::new(move |ev: &NetworkEvent| shared.deliver(ev)))
        });
        (record, queue)
    }

    /// Remove a consumer, closing its stream, and release the upstream
    /// subscription when it was the last one for its type.
    pub fn unsubscribe(&self, bus: &mut EventBus, id: &str) -> Option<SubscriptionRecord> {
        let n = parse_id(id)?;
        let removed = {
            let mut consumers = self.shared.consumers.lock().expect("broker lock poisoned");
            let removed = consumers.remove(&n)?;
            let still_used = consumers
                .values()
                .any(|c| c.record.event_type == removed.record.event_type);
            (removed, still_used)
        };
        let (consumer, still_used) = removed;
        consumer.queue.close();
        if !still_used {
            if let Some(handle) = self
                .upstream
                .lock()
                .expect("broker lock poisoned")
                .remove(&consumer.record.event_type)
            {
                bus.unsubscribe(handle);
            }
        }
        Some(consumer.record)
    }

    pub fn get(&self, id: &str) -> Option<(SubscriptionRecord, Arc<ConsumerQueue>)> {
        let n = parse_id(id)?;
        let consumers = self.shared.consumers.lock().expect("broker lock poisoned");
        consumers.get(&n).map(|c| (c.record.clone(), c.queue.clone()))
    }

    pub fn list(&self) -> Vec<SubscriptionRecord> {
        let consumers = self.shared.consumers.lock().expect("broker lock poisoned");
        consumers.values().map(|c| c.record.clone()).collect()
    }

    /// Consumer count per event type, every type listed.
    pub fn consumer_counts(&self) -> BTreeMap<EventType, usize> {
        let mut out: BTreeMap<EventType, usize> = EventType::ALL.into_iter().map(|t| (t, 0)).collect();
        for c in self
            .shared
            .consumers
            .lock()
            .expect("broker lock poisoned")
            .values()
        {
            *out.entry(c.record.event_type).or_default() += 1;
        }
        out
    }
}

fn parse_id(id: &str) -> Option<u64> {
    id.strip_prefix("sub-")?.parse().ok()
}
