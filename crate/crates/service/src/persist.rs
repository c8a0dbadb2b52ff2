//! Append-only JSON-lines persistence for snapshots and audit records.
//!
//! Each record is one line. On recovery the files are read up to the last
//! complete, parseable line; anything after it is truncated with a warning.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use kpa_core::sim::NetworkState;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::audit::AuditRecord;

pub const SNAPSHOT_FILE: &str = "snapshots.jsonl";
pub const AUDIT_FILE: &str = "audit.jsonl";

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotLine {
    tick: u64,
    state: NetworkState,
}

#[derive(Debug)]
struct LineWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl LineWriter {
    fn open(path: PathBuf) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            path,
            out: BufWriter::new(file),
        })
    }

    fn append<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, value).map_err(io::Error::other)?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }
}

#[derive(Debug)]
pub struct SnapshotWriter(LineWriter);

impl SnapshotWriter {
    pub fn append(&mut self, state: &NetworkState) -> io::Result<()> {
        self.0.append(&SnapshotLine {
            tick: state.tick,
            state: state.clone(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.0.path
    }
}

#[derive(Debug)]
pub struct AuditWriter(LineWriter);

impl AuditWriter {
    pub fn append(&mut self, record: &AuditRecord) -> io::Result<()> {
        self.0.append(record)
    }
}

/// Result of reading a persistence directory.
#[derive(Debug, Default)]
pub struct Recovered {
    /// Persisted states in tick order.
    pub states: Vec<NetworkState>,
    pub audit: Vec<AuditRecord>,
    pub truncated_bytes: u64,
}

/// Read both files, truncating any torn or corrupt tail, and open writers
/// that append after the last valid record.
pub fn open_dir(dir: &Path) -> io::Result<(Recovered, SnapshotWriter, AuditWriter)> {
    fs::create_dir_all(dir)?;
    let snap_path = dir.join(SNAPSHOT_FILE);
    let audit_path = dir.join(AUDIT_FILE);

    let (lines, cut_s): (Vec<SnapshotLine>, u64) = read_valid_prefix(&snap_path)?;
    let (audit, cut_a): (Vec<AuditRecord>, u64) = read_valid_prefix(&audit_path)?;

    let mut states: Vec<NetworkState> = Vec::with_capacity(lines.len());
    for line in lines {
        if states.last().is_some_and(|s| s.tick >= line.tick) {
            tracing::warn!(tick = line.tick, "skipping out-of-order persisted snapshot");
            continue;
        }
        states.push(line.state);
    }
    let recovered = Recovered {
        states,
        audit,
        truncated_bytes: cut_s + cut_a,
    };
    Ok((
        recovered,
        SnapshotWriter(LineWriter::open(snap_path)?),
        AuditWriter(LineWriter::open(audit_path)?),
    ))
}

/// Parse newline-terminated JSON records from the start of `path` and cut
/// the file after the last good one. Returns the records and the number of
/// bytes removed.
fn read_valid_prefix<T: DeserializeOwned>(path: &Path) -> io::Result<(Vec<T>, u64)> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((Vec::new(), 0)),
        Err(e) => return Err(e),
    };
    let total = file.metadata()?.len();
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut good_end = 0u64;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 || buf.last() != Some(&b'\n') {
            break;
        }
        match serde_json::from_slice::<T>(&buf[..n - 1]) {
            Ok(record) => {
                records.push(record);
                good_end += n as u64;
            }
            Err(_) => break,
        }
    }
    let cut = total - good_end;
    if cut > 0 {
        tracing::warn!(
            file = %path.display(),
            bytes = cut,
            kept = records.len(),
            "truncating corrupt tail of persisted log"
        );
        OpenOptions::new().write(true).open(path)?.set_len(good_end)?;
    }
    Ok((records, cut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kpa_core::sim::{init_network, SimConfig};

    #[test]
    fn torn_tail_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let state = init_network(SimConfig::default()).unwrap();
        {
            let (rec, mut snaps, _audit) = open_dir(dir.path()).unwrap();
            assert!(rec.states.is_empty());
            snaps.append(&state).unwrap();
            let mut next = state.clone();
            next.tick = 1;
            snaps.append(&next).unwrap();
        }
        let path = dir.path().join(SNAPSHOT_FILE);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"tick\": 2, \"sta").unwrap();
        drop(f);
        let len_before = fs::metadata(&path).unwrap().len();

        let (rec, _, _) = open_dir(dir.path()).unwrap();
        assert_eq!(rec.states.len(), 2);
        assert_eq!(rec.states[1].tick, 1);
        assert!(rec.truncated_bytes > 0);
        assert_eq!(
            fs::metadata(&path).unwrap().len(),
            len_before - rec.truncated_bytes
        );
    }

    #[test]
    fn garbage_line_stops_recovery() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(AUDIT_FILE), "not json\n").unwrap();
        let (rec, _, _) = open_dir(dir.path()).unwrap();
        assert!(rec.audit.is_empty());
        assert_eq!(fs::metadata(dir.path().join(AUDIT_FILE)).unwrap().len(), 0);
    }
}
