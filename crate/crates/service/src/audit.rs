//! Append-only access log with a gap-free sequence.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::persist::AuditWriter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub seq: u64,
    pub wall_time_ms: u64,
    pub sim_tick: u64,
    pub principal: String,
    pub method: String,
    pub path: String,
    /// Route template the request matched, as reported by /metrics.
    pub route: String,
    pub status: u16,
    pub latency_ms: f64,
}

#[derive(Debug)]
struct Inner {
    records: Vec<AuditRecord>,
    next_seq: u64,
    writer: Option<AuditWriter>,
}

#[derive(Debug)]
pub struct AuditLog {
    inner: Mutex<Inner>,
}

impl AuditLog {
    pub fn new(recovered: Vec<AuditRecord>, writer: Option<AuditWriter>) -> Self {
        let next_seq = recovered.last().map_or(1, |r| r.seq + 1);
        Self {
            inner: Mutex::new(Inner {
                records: recovered,
                next_seq,
                writer,
            }),
        }
    }

    /// Assign the next sequence number and append. The record's own `seq`
    /// is overwritten.
    pub fn append(&self, mut record: AuditRecord) -> u64 {
        let mut inner = self.inner.lock().expect("audit lock poisoned");
        record.seq = inner.next_seq;
        inner.next_seq += 1;
        if let Some(w) = inner.writer.as_mut() {
            if let Err(e) = w.append(&record) {
                tracing::error!(error = %e, "failed to persist audit record");
            }
        }
        inner.records.push(record.clone());
        record.seq
    }

    pub fn since(&self, since_seq: u64) -> Vec<AuditRecord> {
        let inner = self.inner.lock().expect("audit lock poisoned");
        let start = inner.records.partition_point(|r| r.seq <= since_seq);
        inner.records[start..].to_vec()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("audit lock poisoned").records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
