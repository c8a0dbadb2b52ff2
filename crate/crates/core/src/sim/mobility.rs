//! Random-waypoint mobility.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{Area, SpeedRange};
use super::model::{NetworkState, Position};

pub fn random_position(rng: &mut ChaCha8Rng, area: Area) -> Position {
    Position::new(
        rng.random_range(0.0..=area.width_m),
        rng.random_range(0.0..=area.height_m),
    )
}

pub fn random_speed(rng: &mut ChaCha8Rng, range: SpeedRange) -> f64 {
    rng.random_range(range.min..=range.max)
}

/// Advance every UE toward its waypoint by speed * dt; on arrival a new
/// waypoint and speed are drawn. UEs are visited in id order so the draw
/// sequence is fixed by the seed.
pub fn move_ues(state: &mut NetworkState) {
    let dt_s = state.config.tick_duration_ms as f64 / 1000.0;
    let area = state.config.area;
    let speeds = state.config.mobility_speed_mps;
    let rng = &mut state.rng;
    for ue in state.ues.values_mut() {
        if ue.speed_mps <= 0.0 {
            continue;
        }
        let step = ue.speed_mps * dt_s;
        let remaining = ue.position.distance_to(&ue.waypoint);
        if remaining <= step {
            ue.position = ue.waypoint;
            ue.waypoint = random_position(rng, area);
            ue.speed_mps = random_speed(rng, speeds);
        } else {
            let f = step / remaining;
            ue.position.x += (ue.waypoint.x - ue.position.x) * f;
            ue.position.y += (ue.waypoint.y - ue.position.y) * f;
        }
    }
}
