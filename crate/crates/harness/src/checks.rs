//! Mechanical checks over a finished transcript.

use std::collections::{BTreeMap, BTreeSet};

use kpa_service::audit::AuditRecord;

use crate::transcript::{self, Provenance, Transcript};

/// Every query after a round's entry point must have been learnable from
/// earlier responses: a discovered path, or a discovered template filled
/// with discovered or scenario-supplied ids. Recomputed from the stored
/// response bodies, independent of the explorer's bookkeeping.
pub fn no_hardcoded_paths(t: &Transcript) -> Result<(), String> {
    let mut discovered: BTreeSet<String> = BTreeSet::new();
    let mut templates: BTreeSet<String> = BTreeSet::new();
    let mut ids: BTreeMap<String, BTreeSet<String>> = t.inputs.clone();
    let mut round = 0;
    for (i, step) in t.steps.iter().enumerate() {
        let round_start = step.round != round;
        round = step.round;
        let path = step.path.split('?').next().unwrap_or_default();
        let ok = if step.provenance == Provenance::Entry {
            round_start
        } else {
            discovered.contains(path)
                || templates.iter().any(|tpl| {
                    let entity = tpl.split('/').nth(2).unwrap_or_default();
                    transcript::template_values(tpl, path).is_some_and(|values| {
                        values
                            .iter()
                            .all(|v| ids.get(entity).is_some_and(|known| known.contains(*v)))
                    })
                })
        };
        if !ok {
            return Err(format!(
                "step {} queried {} {} without discovering it",
                i + 1,
                step.method,
                step.path
            ));
        }
        let links = transcript::harvest(&step.body);
        for (entity, found) in transcript::harvest_ids(&step.body, &links) {
            ids.entry(entity).or_default().extend(found);
        }
        for link in links {
            if link.is_template() {
                templates.insert(link.path);
            } else {
                discovered.insert(link.path);
            }
        }
    }
    Ok(())
}

/// The transcript's requests appear, in order, among the audit records
/// for `principal`.
pub fn audit_subsequence(t: &Transcript, audit: &[AuditRecord], principal: &str) -> Result<(), String> {
    let mut records = audit.iter().filter(|r| r.principal == principal);
    for (i, step) in t.steps.iter().enumerate() {
        let path = step.path.split('?').next().unwrap_or_default();
        let found = records.any(|r| r.method == step.method && r.path == path && r.status == step.status);
        if !found {
            return Err(format!(
                "step {} ({} {}) has no matching audit record",
                i + 1,
                step.method,
                step.path
            ));
        }
    }
    Ok(())
}
