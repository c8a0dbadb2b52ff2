//! Log-distance radio model: pathloss, RSRP, SINR and the CQI mapping.

use super::model::{Cell, Position};

/// Pathloss at the reference distance, dB.
pub const PATHLOSS_REF_DB: f64 = 32.0;
pub const PATHLOSS_EXPONENT: f64 = 3.5;
pub const REFERENCE_DISTANCE_M: f64 = 1.0;
/// Thermal noise floor; interference is not modelled.
pub const NOISE_FLOOR_DBM: f64 = -100.0;
pub const CQI_MAX: u8 = 15;

pub fn pathloss_db(distance_m: f64) -> f64 {
    let d = distance_m.max(REFERENCE_DISTANCE_M);
    PATHLOSS_REF_DB + 10.0 * PATHLOSS_EXPONENT * (d / REFERENCE_DISTANCE_M).log10()
}

/// RSRP seen by a UE at `ue_pos` from `cell`, in dBm.
pub fn compute_rsrp(ue_pos: &Position, cell: &Cell) -> f64 {
    let distance = ue_pos.distance_to(&cell.position);
    cell.tx_power_dbm - pathloss_db(distance)
}

pub fn sinr_db(rsrp_dbm: f64) -> f64 {
    rsrp_dbm - NOISE_FLOOR_DBM
}

/// Map SINR to a CQI index with a linear clamp over [-6, 24] dB.
pub fn compute_cqi(sinr_db: f64) -> u8 {
    let idx = ((sinr_db + 6.0) / 2.0).round();
    idx.clamp(0.0, f64::from(CQI_MAX)) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{BTreeMap, BTreeSet};

    fn cell_at(x: f64, y: f64, tx: f64) -> Cell {
        Cell {
            id: "cell_gnb1_0".into(),
            gnb_id: "gnb1".into(),
            position: Position::new(x, y),
            tx_power_dbm: tx,
            frequency_mhz: 3500.0,
            prb_capacity: 100,
            prb_allocated_total: 0,
            cio: BTreeMap::new(),
            connected_ues: BTreeSet::new(),
        }
    }

    #[test]
    fn rsrp_at_reference_distance() {
        let c = cell_at(0.0, 0.0, 30.0);
        assert_eq!(compute_rsrp(&Position::new(1.0, 0.0), &c), -2.0);
        // inside d0 is clamped to d0
        assert_eq!(compute_rsrp(&Position::new(0.0, 0.0), &c), -2.0);
    }

    #[test]
    fn rsrp_decade_slope_is_35_db() {
        let c = cell_at(0.0, 0.0, 30.0);
        let at_d0 = compute_rsrp(&Position::new(1.0, 0.0), &c);
        let at_10 = compute_rsrp(&Position::new(10.0, 0.0), &c);
        assert!((at_d0 - at_10 - 35.0).abs() < 1e-12);
    }

    #[test]
    fn rsrp_at_500_m_matches_closed_form() {
        // 30 - (32 + 35 * log10(500)); log10(500) = 2.698970004336019
        let expected = 30.0 - (32.0 + 35.0 * 2.698_970_004_336_019);
        let c = cell_at(0.0, 0.0, 30.0);
        let got = compute_rsrp(&Position::new(300.0, 400.0), &c);
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        assert!((got - (-96.463_950_151_760_66)).abs() < 1e-9);
    }

    #[test]
    fn cqi_clamps_and_midpoint() {
        assert_eq!(compute_cqi(-6.0), 0);
        assert_eq!(compute_cqi(-40.0), 0);
        assert_eq!(compute_cqi(24.0), 15);
        assert_eq!(compute_cqi(60.0), 15);
        assert_eq!(compute_cqi(10.0), 8);
    }

    proptest! {
        #[test]
        fn cqi_monotone_and_bounded(a in -100.0f64..100.0, b in -100.0f64..100.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(compute_cqi(lo) <= compute_cqi(hi));
            prop_assert!(compute_cqi(a) <= CQI_MAX);
        }

        #[test]
        fn rsrp_non_increasing_in_distance(d1 in 0.0f64..5000.0, d2 in 0.0f64..5000.0) {
            let c = cell_at(0.0, 0.0, 30.0);
            let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(
                compute_rsrp(&Position::new(near, 0.0), &c) >= compute_rsrp(&Position::new(far, 0.0), &c)
            );
        }
    }
}
