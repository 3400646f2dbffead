//! Geometric primitives and the settings schema shared by every module.
//!
//! The world uses a left-handed coordinate system with Y pointing up. Yaw is
//! a rotation about Y in degrees, with yaw 0 facing +Z and yaw 90 facing +X,
//! so the forward vector for a yaw `θ` is `(sin θ, 0, cos θ)`. All units are
//! SI (meters, seconds).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goal::FireflyParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
}

/// A point or direction in world space, in meters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Point on the floor plane.
    pub const fn floor(x: f64, z: f64) -> Self {
        Self { x, y: 0.0, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Length of the X-Z projection.
    pub fn horizontal_norm(&self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        (*self - *other).norm()
    }

    pub fn with_y(self, y: f64) -> Self {
        Self { y, ..self }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3}, {:.3})", self.x, self.y, self.z)
    }
}

/// Wrap an angle in degrees into `[0, 360)`.
pub fn normalize_yaw(angle: f64) -> Result<f64, ModelError> {
    if !angle.is_finite() {
        return Err(ModelError::NonFinite { what: "yaw", value: angle });
    }
    let wrapped = angle.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    Ok(if wrapped >= 360.0 { 0.0 } else { wrapped })
}

/// Wrap an angle difference into `[-180, 180)`.
pub(crate) fn wrap_signed(angle: f64) -> f64 {
    let w = (angle + 180.0).rem_euclid(360.0) - 180.0;
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Euclidean distance over the X-Z plane; Y is ignored.
pub fn horizontal_distance(a: Vec3, b: Vec3) -> f64 {
    (a.x - b.x).hypot(a.z - b.z)
}

/// Unit forward vector on the floor plane for a yaw in degrees.
pub fn heading_vector(yaw_deg: f64) -> Vec3 {
    let r = yaw_deg.to_radians();
    Vec3::new(r.sin(), 0.0, r.cos())
}

/// Yaw in degrees (in `[0, 360)`) that faces along the X-Z direction `(dx, dz)`.
pub fn yaw_towards(dx: f64, dz: f64) -> f64 {
    normalize_yaw(dx.atan2(dz).to_degrees()).unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    /// Degrees about Y.
    pub yaw: f64,
    /// Degrees; positive looks up.
    pub pitch: f64,
}

impl Pose {
    pub fn new(position: Vec3, yaw: f64, pitch: f64) -> Result<Self, ModelError> {
        if !position.is_finite() {
            return Err(ModelError::NonFinite { what: "position", value: f64::NAN });
        }
        if !pitch.is_finite() {
            return Err(ModelError::NonFinite { what: "pitch", value: pitch });
        }
        Ok(Self {
            position,
            yaw: normalize_yaw(yaw)?,
            pitch: pitch.clamp(-90.0, 90.0),
        })
    }

    /// The same pose with yaw wrapped and pitch clamped.
    pub fn normalized(&self) -> Result<Self, ModelError> {
        Self::new(self.position, self.yaw, self.pitch)
    }

    pub fn heading(&self) -> Vec3 {
        heading_vector(self.yaw)
    }

    /// Unit 3-D pointing direction combining yaw and pitch.
    pub fn aim(&self) -> Vec3 {
        let p = self.pitch.to_radians();
        let h = self.heading();
        Vec3::new(h.x * p.cos(), p.sin(), h.z * p.cos())
    }
}

/// One frame of tracked head and controller state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct FrameInput {
    /// Seconds since trial start.
    pub timestamp: f64,
    pub hmd: Pose,
    pub controllers: Vec<Pose>,
    pub move_held: bool,
    pub trigger_held: bool,
    pub end_trial_pressed: bool,
    pub skip_pressed: bool,
}

impl FrameInput {
    pub fn idle(timestamp: f64, hmd: Pose) -> Self {
        Self { timestamp, hmd, ..Self::default() }
    }
}

/// A circular collision region on the floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionDisc {
    pub center: Vec3,
    pub radius: f64,
}

impl CollisionDisc {
    pub fn contains(&self, p: Vec3) -> bool {
        horizontal_distance(self.center, p) <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct EnvironmentSettings {
    pub room_width: f64,
    pub room_depth: f64,
    pub wall_height: f64,
    pub walls_present_per_block: Vec<bool>,
    pub floor_extends_to_horizon: Vec<bool>,
    pub lights_on: bool,
    pub sound_on: bool,
    pub survey_links: Vec<String>,
    pub safe_area_width: f64,
    pub safe_area_depth: f64,
    pub collision_regions: Vec<CollisionDisc>,
}

impl Default for EnvironmentSettings {
    fn default() -> Self {
        Self {
            room_width: 10.0,
            room_depth: 10.0,
            wall_height: 4.0,
            walls_present_per_block: Vec::new(),
            floor_extends_to_horizon: Vec::new(),
            lights_on: true,
            sound_on: true,
            survey_links: Vec::new(),
            safe_area_width: 10.0,
            safe_area_depth: 10.0,
            collision_regions: Vec::new(),
        }
    }
}

impl EnvironmentSettings {
    pub fn walls_present(&self, block: usize) -> bool {
        self.walls_present_per_block.get(block).copied().unwrap_or(true)
    }

    pub fn floor_extends(&self, block: usize) -> bool {
        self.floor_extends_to_horizon.get(block).copied().unwrap_or(false)
    }

    /// Whether `p` lies on the room footprint, which is centred on the origin.
    pub fn in_room(&self, p: Vec3) -> bool {
        p.x.abs() <= self.room_width / 2.0 && p.z.abs() <= self.room_depth / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocomotionMethod {
    KeyboardTeleop,
    ControllerTeleop,
    ArmSwing,
    HeadBob,
    PhysicalWalk,
    Teleport,
}

impl LocomotionMethod {
    pub fn is_teleop(self) -> bool {
        matches!(self, Self::KeyboardTeleop | Self::ControllerTeleop)
    }

    pub fn uses_velocity(self) -> bool {
        matches!(
            self,
            Self::KeyboardTeleop | Self::ControllerTeleop | Self::ArmSwing | Self::HeadBob
        )
    }
}

impl fmt::Display for LocomotionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LocomotionSettings {
    pub method: LocomotionMethod,
    /// m/s.
    pub linear_velocity: f64,
    /// deg/s. Carried as a preset; heading follows the HMD.
    pub rotation_speed: f64,
    pub bob_height_threshold: f64,
    /// deg/frame.
    pub pitch_reject_threshold: f64,
    /// m/frame.
    pub arm_swing_threshold: f64,
    pub require_both_controllers: bool,
    /// Arm-swing gain from controller speed to forward speed.
    pub traversal_gain: f64,
    /// Seconds of forward motion granted per detected head-bob step.
    pub step_duration: f64,
    pub teleport_max_range: f64,
    pub barrier_margin: f64,
}

impl Default for LocomotionSettings {
    fn default() -> Self {
        Self {
            method: LocomotionMethod::ControllerTeleop,
            linear_velocity: 1.5,
            rotation_speed: 90.0,
            bob_height_threshold: 0.03,
            pitch_reject_threshold: 1.5,
            arm_swing_threshold: 0.005,
            require_both_controllers: true,
            traversal_gain: 1.0,
            step_duration: 0.5,
            teleport_max_range: 8.0,
            barrier_margin: 0.5,
        }
    }
}

/// Constants of the decaying reward `R = β1·exp(−α1·t) + β2·exp(−α2·d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ScoreConstants {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub scale_factor: f64,
    pub floor_at_zero: bool,
}

impl Default for ScoreConstants {
    fn default() -> Self {
        Self {
            alpha1: 0.0,
            alpha2: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            scale_factor: 300.0,
            floor_at_zero: true,
        }
    }
}

impl ScoreConstants {
    /// Speed-weighted constants used for the "time" group of the demo.
    pub const fn time_group() -> Self {
        Self {
            alpha1: -0.05,
            alpha2: 0.2,
            beta1: -2.0,
            beta2: 6.2,
            scale_factor: 300.0,
            floor_at_zero: true,
        }
    }

    /// Accuracy-weighted constants used for the "accuracy" group of the demo.
    pub const fn accuracy_group() -> Self {
        Self {
            alpha1: 0.2,
            alpha2: 1.0,
            beta1: 0.5,
            beta2: 3.4,
            scale_factor: 300.0,
            floor_at_zero: true,
        }
    }

    fn is_finite(&self) -> bool {
        [self.alpha1, self.alpha2, self.beta1, self.beta2, self.scale_factor]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ScenarioSettings {
    pub trials_per_block: Vec<u32>,
    pub max_trial_duration: f64,
    pub start_pose: Pose,
    pub goal_position: Vec3,
    pub score: ScoreConstants,
    pub firefly_per_block: Vec<FireflyParams>,
    pub feedback_display_duration: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        Self {
            trials_per_block: Vec::new(),
            max_trial_duration: 120.0,
            start_pose: Pose::default(),
            goal_position: Vec3::ZERO,
            score: ScoreConstants::default(),
            firefly_per_block: Vec::new(),
            feedback_display_duration: 10.0,
            rng_seed: 0,
        }
    }
}

impl ScenarioSettings {
    pub fn block_count(&self) -> usize {
        self.trials_per_block.len()
    }

    pub fn total_trials(&self) -> usize {
        self.trials_per_block.iter().map(|&n| n as usize).sum()
    }
}

/// A single settings problem. Validation never fails; it reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { field: field.into(), message: message.into() });
    }

    pub(crate) fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn positive(report: &mut ValidationReport, field: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        report.push(field, format!("must be > 0, got {v}"));
    }
}

fn non_negative(report: &mut ValidationReport, field: &str, v: f64) {
    if !(v.is_finite() && v >= 0.0) {
        report.push(field, format!("must be >= 0, got {v}"));
    }
}

pub(crate) fn check_environment(env: &EnvironmentSettings) -> ValidationReport {
    let mut r = ValidationReport::default();
    positive(&mut r, "roomWidth", env.room_width);
    positive(&mut r, "roomDepth", env.room_depth);
    positive(&mut r, "wallHeight", env.wall_height);
    positive(&mut r, "safeAreaWidth", env.safe_area_width);
    positive(&mut r, "safeAreaDepth", env.safe_area_depth);
    if env.walls_present_per_block.is_empty() {
        r.push("wallsPresentPerBlock", "no blocks configured");
    }
    for (i, disc) in env.collision_regions.iter().enumerate() {
        if !disc.center.is_finite() || !(disc.radius >= 0.0 && disc.radius.is_finite()) {
            r.push(format!("collisionRegions[{i}]"), "center must be finite and radius >= 0");
        }
    }
    r
}

pub(crate) fn check_locomotion(loco: &LocomotionSettings) -> ValidationReport {
    let mut r = ValidationReport::default();
    non_negative(&mut r, "bobHeightThreshold", loco.bob_height_threshold);
    non_negative(&mut r, "pitchRejectThreshold", loco.pitch_reject_threshold);
    non_negative(&mut r, "armSwingThreshold", loco.arm_swing_threshold);
    non_negative(&mut r, "teleportMaxRange", loco.teleport_max_range);
    non_negative(&mut r, "barrierMargin", loco.barrier_margin);
    non_negative(&mut r, "rotationSpeed", loco.rotation_speed);
    if loco.method.uses_velocity() {
        positive(&mut r, "linearVelocity", loco.linear_velocity);
    }
    match loco.method {
        LocomotionMethod::ArmSwing => positive(&mut r, "traversalGain", loco.traversal_gain),
        LocomotionMethod::HeadBob => positive(&mut r, "stepDuration", loco.step_duration),
        LocomotionMethod::Teleport => positive(&mut r, "teleportMaxRange", loco.teleport_max_range),
        _ => {}
    }
    r
}

pub(crate) fn check_scenario(scen: &ScenarioSettings) -> ValidationReport {
    let mut r = ValidationReport::default();
    if scen.trials_per_block.is_empty() {
        r.push("trialsPerBlock", "must list at least one block");
    }
    for (i, &n) in scen.trials_per_block.iter().enumerate() {
        if n == 0 {
            r.push(format!("trialsPerBlock[{i}]"), "must be a positive integer");
        }
    }
    positive(&mut r, "maxTrialDuration", scen.max_trial_duration);
    non_negative(&mut r, "feedbackDisplayDuration", scen.feedback_display_duration);
    if !scen.start_pose.position.is_finite()
        || !scen.start_pose.yaw.is_finite()
        || !scen.start_pose.pitch.is_finite()
    {
        r.push("startPose", "must be finite");
    }
    if !scen.goal_position.is_finite() {
        r.push("goalPosition", "must be finite");
    }
    if !scen.score.is_finite() {
        r.push("score", "constants must be finite");
    }
    positive(&mut r, "score.scaleFactor", scen.score.scale_factor);
    if scen.firefly_per_block.len() != scen.block_count() {
        r.push(
            "fireflyPerBlock",
            format!(
                "has {} entries but {} blocks are configured",
                scen.firefly_per_block.len(),
                scen.block_count()
            ),
        );
    }
    for (i, p) in scen.firefly_per_block.iter().enumerate() {
        if let Err(e) = p.validate() {
            r.push(format!("fireflyPerBlock[{i}]"), e);
        }
    }
    r
}

/// Check all three settings objects, including block-count agreement between
/// the environment and the scenario.
pub fn validate_settings(
    env: &EnvironmentSettings,
    loco: &LocomotionSettings,
    scen: &ScenarioSettings,
) -> ValidationReport {
    let mut r = check_environment(env);
    r.extend(check_locomotion(loco));
    r.extend(check_scenario(scen));
    let blocks = scen.block_count();
    if !env.walls_present_per_block.is_empty() && env.walls_present_per_block.len() != blocks {
        r.push(
            "wallsPresentPerBlock",
            format!(
                "has {} entries but {} blocks are configured",
                env.walls_present_per_block.len(),
                blocks
            ),
        );
    }
    if !env.floor_extends_to_horizon.is_empty() && env.floor_extends_to_horizon.len() != blocks {
        r.push(
            "floorExtendsToHorizon",
            format!(
                "has {} entries but {} blocks are configured",
                env.floor_extends_to_horizon.len(),
                blocks
            ),
        );
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;

    #[test]
    fn yaw_examples() {
        assert_eq!(normalize_yaw(0.0).unwrap(), 0.0);
        assert_eq!(normalize_yaw(-135.0).unwrap(), 225.0);
        assert_eq!(normalize_yaw(725.0).unwrap(), 5.0);
        assert_eq!(normalize_yaw(360.0).unwrap(), 0.0);
        assert!(normalize_yaw(f64::NAN).is_err());
        assert!(normalize_yaw(f64::INFINITY).is_err());
        let tiny = normalize_yaw(-1e-18).unwrap();
        assert!((0.0..360.0).contains(&tiny));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(horizontal_distance(Vec3::ZERO, Vec3::new(0.0, 5.0, 0.0)), 0.0);
        let d = horizontal_distance(Vec3::floor(4.5, 4.5), Vec3::floor(-3.0, -1.0));
        // sqrt(7.5^2 + 5.5^2) = sqrt(86.5)
        assert!((d - 86.5f64.sqrt()).abs() < 1e-12);
        assert!((d - 9.3005).abs() < 1e-4);
        assert_eq!(horizontal_distance(Vec3::floor(1.0, 0.0), Vec3::floor(1.0, 0.0)), 0.0);
    }

    #[test]
    fn heading_convention() {
        let h = heading_vector(225.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.x + s).abs() < 1e-12 && (h.z + s).abs() < 1e-12);
        assert!((yaw_towards(1.0, 0.0) - 90.0).abs() < 1e-12);
        assert!(yaw_towards(0.0, 1.0).abs() < 1e-12);
    }

    #[test]
    fn pose_clamps_pitch() {
        let p = Pose::new(Vec3::ZERO, -90.0, 120.0).unwrap();
        assert_eq!(p.yaw, 270.0);
        assert_eq!(p.pitch, 90.0);
        let down = Pose::new(Vec3::ZERO, 0.0, -90.0).unwrap().aim();
        assert!((down.y + 1.0).abs() < 1e-12);
    }

    #[test]
    fn demo_settings_validate() {
        let r = validate_settings(&demo::environment(), &demo::locomotion(), &demo::scenario());
        assert!(r.is_valid(), "{r}");
        let env = demo::environment();
        assert_eq!((env.room_width, env.room_depth), (10.0, 10.0));
        assert_eq!(demo::scenario().trials_per_block, vec![15, 15]);
    }

    #[test]
    fn block_count_mismatch_is_one_violation() {
        let mut env = demo::environment();
        env.walls_present_per_block = vec![true];
        let r = validate_settings(&env, &demo::locomotion(), &demo::scenario());
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].field, "wallsPresentPerBlock");
    }

    #[test]
    fn zero_trial_duration_is_one_violation() {
        let mut scen = demo::scenario();
        scen.max_trial_duration = 0.0;
        let r = validate_settings(&demo::environment(), &demo::locomotion(), &scen);
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].field, "maxTrialDuration");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn floor_point() -> impl Strategy<Value = Vec3> {
            (-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
        }

        proptest! {
            #[test]
            fn normalize_is_idempotent(a in -1e7..1e7f64) {
                let once = normalize_yaw(a).unwrap();
                prop_assert!((0.0..360.0).contains(&once));
                prop_assert_eq!(normalize_yaw(once).unwrap(), once);
            }

            #[test]
            fn distance_is_a_metric(a in floor_point(), b in floor_point(), c in floor_point()) {
                let ab = horizontal_distance(a, b);
                prop_assert!(ab >= 0.0);
                prop_assert_eq!(ab, horizontal_distance(b, a));
                prop_assert!(ab <= horizontal_distance(a, c) + horizontal_distance(c, b) + 1e-9);
            }
        }
    }
}
