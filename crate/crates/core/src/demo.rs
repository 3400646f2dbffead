//! Bundled demonstration settings: a 10 × 10 m walled room, two blocks of 15
//! trials, a firefly goal marker that widens in the second block.

use crate::model::{EnvironmentSettings, LocomotionSettings, ScenarioSettings};

pub const ENVIRONMENT_JSON: &str = include_str!("../settings/demo/environment.json");
pub const LOCOMOTION_JSON: &str = include_str!("../settings/demo/locomotion.json");
pub const SCENARIO_JSON: &str = include_str!("../settings/demo/scenario.json");
pub const AUTOPILOT_JSON: &str = include_str!("../settings/demo/autopilot.json");
pub const AGENTS_JSON: &str = include_str!("../settings/demo/agents.json");

pub fn environment() -> EnvironmentSettings {
    serde_json::from_str(ENVIRONMENT_JSON).expect("bundled environment settings parse")
}

pub fn locomotion() -> LocomotionSettings {
    serde_json::from_str(LOCOMOTION_JSON).expect("bundled locomotion settings parse")
}

pub fn scenario() -> ScenarioSettings {
    serde_json::from_str(SCENARIO_JSON).expect("bundled scenario settings parse")
}

/// Every bundled file as `(file name, contents)`.
pub fn files() -> [(&'static str, &'static str); 5] {
    [
        ("environment.json", ENVIRONMENT_JSON),
        ("locomotion.json", LOCOMOTION_JSON),
        ("scenario.json", SCENARIO_JSON),
        ("autopilot.json", AUTOPILOT_JSON),
        ("agents.json", AGENTS_JSON),
    ]
}
