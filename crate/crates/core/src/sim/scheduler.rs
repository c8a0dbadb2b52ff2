//! Per-cell PRB scheduling.

use std::collections::BTreeMap;

use super::model::Cell;

/// Fraction of the cell's PRBs currently granted.
pub fn get_load(cell: &Cell) -> f64 {
    f64::from(cell.prb_allocated_total) / f64::from(cell.prb_capacity.max(1))
}

/// Round-robin PRB grant over UE ids in lexicographic order, one PRB per UE
/// per pass, until either capacity or every demand is exhausted.
///
/// Computed in closed form: the grant is a water level shared by every UE
/// whose demand exceeds it, plus one PRB for the first UEs (by id) of the
/// final partial pass.
pub fn allocate_prbs(cell: &Cell, demands: &BTreeMap<String, u32>) -> BTreeMap<String, u32> {
    let capacity = u64::from(cell.prb_capacity);
    let total_demand: u64 = demands.values().map(|&d| u64::from(d)).sum();
    if total_demand <= capacity {
        return demands.clone();
    }

    let mut sorted: Vec<u32> = demands.values().copied().collect();
    sorted.sort_unstable();
    let mut level = 0u32;
    let mut granted = 0u64;
    let mut unsatisfied = sorted.len() as u64;
    for &demand in &sorted {
        let cost = u64::from(demand - level) * unsatisfied;
        if granted + cost > capacity {
            break;
        }
        granted += cost;
        level = demand;
        unsatisfied -= 1;
    }
    let full_passes = (capacity - granted) / unsatisfied;
    level += full_passes as u32;
    granted += full_passes * unsatisfied;
    let mut leftover = capacity - granted;

    demands
        .iter()
        .map(|(id, &demand)| {
            let mut grant = demand.min(level);
            if demand > level && leftover > 0 {
                grant += 1;
                leftover -= 1;
            }
            (id.clone(), grant)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::model::Position;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn cell(capacity: u32, allocated: u32) -> Cell {
        Cell {
            id: "cell_gnb1_0".into(),
            gnb_id: "gnb1".into(),
            position: Position::default(),
            tx_power_dbm: 30.0,
            frequency_mhz: 3500.0,
            prb_capacity: capacity,
            prb_allocated_total: allocated,
            cio: BTreeMap::new(),
            connected_ues: BTreeSet::new(),
        }
    }

    /// Literal pass-by-pass round robin.
    fn round_robin_oracle(capacity: u32, demands: &BTreeMap<String, u32>) -> BTreeMap<String, u32> {
        let mut grant: BTreeMap<String, u32> = demands.keys().map(|k| (k.clone(), 0)).collect();
        let mut remaining = capacity;
        loop {
            let mut progressed = false;
            for (id, &d) in demands {
                if remaining == 0 {
                    return grant;
                }
                let g = grant.get_mut(id).unwrap();
                if *g < d {
                    *g += 1;
                    remaining -= 1;
                    progressed = true;
                }
            }
            if !progressed {
                return grant;
            }
        }
    }

    fn demands(pairs: &[(&str, u32)]) -> BTreeMap<String, u32> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn load_fractions() {
        assert_eq!(get_load(&cell(100, 40)), 0.4);
        assert_eq!(get_load(&cell(100, 0)), 0.0);
        assert_eq!(get_load(&cell(100, 100)), 1.0);
    }

    #[test]
    fn demand_within_capacity_fully_granted() {
        let d = demands(&[("IMSI_1", 10), ("IMSI_2", 30)]);
        assert_eq!(allocate_prbs(&cell(100, 0), &d), d);
    }

    #[test]
    fn three_ues_of_fifty_on_hundred() {
        let d = demands(&[("IMSI_1", 50), ("IMSI_2", 50), ("IMSI_3", 50)]);
        let got = allocate_prbs(&cell(100, 0), &d);
        // frozen from round_robin_oracle
        assert_eq!(got, demands(&[("IMSI_1", 34), ("IMSI_2", 33), ("IMSI_3", 33)]));
        assert_eq!(got, round_robin_oracle(100, &d));
    }

    #[test]
    fn no_ues_empty_map() {
        assert!(allocate_prbs(&cell(100, 0), &BTreeMap::new()).is_empty());
    }

    proptest! {
        #[test]
        fn matches_round_robin_oracle(
            capacity in 1u32..200,
            ds in proptest::collection::vec(0u32..80, 0..12),
        ) {
            let d: BTreeMap<String, u32> =
                ds.iter().enumerate().map(|(i, &v)| (format!("IMSI_{}", i + 1), v)).collect();
            let got = allocate_prbs(&cell(capacity, 0), &d);
            prop_assert_eq!(&got, &round_robin_oracle(capacity, &d));
            prop_assert!(got.values().map(|&v| u64::from(v)).sum::<u64>() <= u64::from(capacity));
        }
    }
}
