#![allow(dead_code)]

use navloop_core::demo;
use navloop_core::engine::{ParticipantInfo, Session, SessionConfig, DEFAULT_DT};
use navloop_core::model::{EnvironmentSettings, FrameInput, LocomotionSettings, Pose, ScenarioSettings, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Demo settings cut down to `trials` per block, with a 20 s cap and short feedback.
pub fn small(trials: &[u32]) -> (EnvironmentSettings, LocomotionSettings, ScenarioSettings) {
    let mut env = demo::environment();
    let mut scen = demo::scenario();
    let blocks = trials.len();
    env.walls_present_per_block = (0..blocks).map(|b| b % 2 == 0).collect();
    env.floor_extends_to_horizon = (0..blocks).map(|b| b % 2 == 1).collect();
    scen.firefly_per_block = (0..blocks).map(|b| demo::scenario().firefly_per_block[b % 2]).collect();
    scen.trials_per_block = trials.to_vec();
    scen.max_trial_duration = 20.0;
    scen.feedback_display_duration = 0.5;
    (env, demo::locomotion(), scen)
}

pub fn start(settings: &(EnvironmentSettings, LocomotionSettings, ScenarioSettings), id: &str) -> Session {
    let (env, loco, scen) = settings.clone();
    let config = SessionConfig::new("s1", env, loco, scen, ParticipantInfo::with_id(id));
    Session::start(config).unwrap().0
}

/// A wandering input stream: `frames` per trial, ending each trial by key.
pub fn wander(seed: u64, trials: usize, frames: usize) -> Vec<FrameInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..trials {
        let mut yaw: f64 = rng.random_range(0.0..360.0);
        for k in 1..=frames {
            yaw = (yaw + rng.random_range(-5.0..5.0)).rem_euclid(360.0);
            let hmd = Pose { position: Vec3::new(0.0, 1.7, 0.0), yaw, pitch: 0.0 };
            let mut input = FrameInput::idle(k as f64 * DEFAULT_DT, hmd);
            input.move_held = rng.random_bool(0.7);
            input.end_trial_pressed = k == frames;
            out.push(input);
        }
    }
    out
}
