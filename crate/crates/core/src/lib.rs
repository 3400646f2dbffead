//! Headless engine for goal-directed navigation experiments.
//!
//! A session is a sequence of blocks, each a sequence of trials. In every
//! trial a participant walks from a fixed start pose toward a hidden goal
//! marked only by a wandering "firefly", ends the trial when they believe they
//! have arrived, and is then shown a score that decays with elapsed time and
//! residual distance.

pub mod agents;
pub mod analysis;
pub mod demo;
pub mod engine;
pub mod goal;
pub mod locomotion;
pub mod model;
pub mod persistence;
pub mod protocol;
pub mod scoring;
pub mod surveys;

pub use model::{
    horizontal_distance, normalize_yaw, validate_settings, EnvironmentSettings, FrameInput,
    LocomotionMethod, LocomotionSettings, Pose, ScenarioSettings, ScoreConstants, ValidationReport,
    Vec3,
};
