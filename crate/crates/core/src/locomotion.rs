//! Per-tick locomotion models.
//!
//! Each model is a pure function from tracked input (and its own explicit
//! state) to virtual motion. Walking-in-place models turn detected motion
//! into forward movement along the HMD heading at the preset velocity.
//! Everything stays on the floor plane; eye height is presentation only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    heading_vector, normalize_yaw, wrap_signed, CollisionDisc, FrameInput, LocomotionMethod,
    LocomotionSettings, Pose, Vec3,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocomotionError {
    #[error("arm swing needs at least one tracked controller")]
    NoControllers,
    #[error("controller count changed between frames ({prev} -> {curr})")]
    ControllerCountMismatch { prev: usize, curr: usize },
    #[error("cannot teleport to an invalid target")]
    InvalidTeleportTarget,
}

/// Constant-velocity motion along the HMD heading while the move button is held.
pub fn teleop_step(hmd: &Pose, input: &FrameInput, settings: &LocomotionSettings, dt: f64) -> Vec3 {
    if !input.move_held {
        return Vec3::ZERO;
    }
    heading_vector(hmd.yaw) * (settings.linear_velocity * dt)
}

/// Forward speed (m/s) from controller motion between two consecutive frames.
///
/// With `require_both_controllers` every controller must move more than the
/// threshold; otherwise any one is enough. Once gated on, the speed is the
/// gain-scaled mean controller displacement per second.
pub fn arm_swing_speed(
    prev: &[Pose],
    curr: &[Pose],
    settings: &LocomotionSettings,
    dt: f64,
) -> Result<f64, LocomotionError> {
    if curr.is_empty() {
        return Err(LocomotionError::NoControllers);
    }
    if prev.len() != curr.len() {
        return Err(LocomotionError::ControllerCountMismatch { prev: prev.len(), curr: curr.len() });
    }
    let moved: Vec<f64> = prev
        .iter()
        .zip(curr)
        .map(|(a, b)| a.position.distance(&b.position))
        .collect();
    let over = |d: &f64| *d > settings.arm_swing_threshold;
    let gated = if settings.require_both_controllers {
        moved.iter().all(over)
    } else {
        moved.iter().any(over)
    };
    if !gated || dt <= 0.0 {
        return Ok(0.0);
    }
    let mean = moved.iter().sum::<f64>() / moved.len() as f64;
    Ok(settings.traversal_gain * mean / dt)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobDirection {
    Up,
    Down,
    #[default]
    Unknown,
}

/// Tracking state of the head-bob step detector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeadBobState {
    pub direction: BobDirection,
    /// Height of the most recent flexion point; `None` until the first one.
    pub last_flexion_height: Option<f64>,
    /// `None` before the first sample.
    pub last_height: Option<f64>,
    pub last_pitch: f64,
    /// Largest per-frame pitch change seen since the last flexion point.
    pub max_pitch_rate: f64,
}

/// Feed one HMD sample to the step detector.
///
/// A flexion point is the height at which the vertical direction reverses.
/// A step is reported when two successive flexion points differ by more than
/// the bob threshold and no frame of that bob turned the head by more than
/// the pitch-reject threshold. The very first flexion only primes the
/// detector.
pub fn head_bob_step(
    state: &HeadBobState,
    height: f64,
    pitch: f64,
    settings: &LocomotionSettings,
) -> (HeadBobState, bool) {
    let mut next = *state;
    let Some(last_height) = state.last_height else {
        next.last_height = Some(height);
        next.last_pitch = pitch;
        return (next, false);
    };

    next.max_pitch_rate = state.max_pitch_rate.max((pitch - state.last_pitch).abs());
    let dh = height - last_height;
    let direction = if dh > 0.0 {
        BobDirection::Up
    } else if dh < 0.0 {
        BobDirection::Down
    } else {
        state.direction
    };

    let mut detected = false;
    if state.direction != BobDirection::Unknown && direction != state.direction {
        let flexion = last_height;
        if let Some(prev) = state.last_flexion_height {
            detected = (flexion - prev).abs() > settings.bob_height_threshold
                && next.max_pitch_rate <= settings.pitch_reject_threshold;
        }
        next.last_flexion_height = Some(flexion);
        next.max_pitch_rate = 0.0;
    }

    next.direction = direction;
    next.last_height = Some(height);
    next.last_pitch = pitch;
    (next, detected)
}

/// Physically tracked region the participant may walk in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SafeArea {
    pub center: Vec3,
    pub width: f64,
    pub depth: f64,
    pub barrier_margin: f64,
}

impl SafeArea {
    /// Distance from `p` to the nearest edge; negative outside the area.
    pub fn edge_clearance(&self, p: Vec3) -> f64 {
        let dx = self.width / 2.0 - (p.x - self.center.x).abs();
        let dz = self.depth / 2.0 - (p.z - self.center.z).abs();
        dx.min(dz)
    }

    pub fn barrier_visible(&self, p: Vec3) -> bool {
        self.edge_clearance(p) <= self.barrier_margin
    }
}

/// Mapping between tracked (real) and virtual space for physical walking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhysicalWalkState {
    pub virtual_pose: Pose,
    pub last_real: Option<Pose>,
    /// Real yaw minus virtual yaw, in degrees.
    pub locked_offset: f64,
}

impl PhysicalWalkState {
    /// Anchor the mapping at a virtual pose; the first real sample aligns to it.
    pub fn anchored(virtual_pose: Pose) -> Self {
        Self { virtual_pose, last_real: None, locked_offset: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOutput {
    pub virtual_pose: Pose,
    pub barrier_visible: bool,
    pub locked_offset: f64,
}

/// Rotate a floor vector as a yaw change of `-deg` would.
fn rotate_yaw(v: Vec3, deg: f64) -> Vec3 {
    let (s, c) = deg.to_radians().sin_cos();
    Vec3::new(v.x * c - v.z * s, v.y, v.x * s + v.z * c)
}

/// One frame of physical walking.
///
/// Real translation maps 1:1 into the virtual scene (through the current
/// heading offset). While the trigger is held the scene is locked: real yaw
/// changes accumulate in the offset instead of turning the virtual heading.
pub fn physical_walk_step(
    real: &Pose,
    state: &PhysicalWalkState,
    safe_area: &SafeArea,
    trigger_held: bool,
) -> (PhysicalWalkState, WalkOutput) {
    let mut next = *state;
    match state.last_real {
        None => {
            next.locked_offset = wrap_signed(real.yaw - state.virtual_pose.yaw);
        }
        Some(last) => {
            let delta = (real.position - last.position).with_y(0.0);
            let moved = rotate_yaw(delta, state.locked_offset);
            next.virtual_pose.position = (state.virtual_pose.position + moved).with_y(0.0);
            if trigger_held {
                next.locked_offset = wrap_signed(state.locked_offset + wrap_signed(real.yaw - last.yaw));
            }
            next.virtual_pose.yaw = normalize_yaw(real.yaw - next.locked_offset).unwrap_or(0.0);
        }
    }
    next.virtual_pose.pitch = real.pitch;
    next.last_real = Some(*real);
    let out = WalkOutput {
        virtual_pose: next.virtual_pose,
        barrier_visible: safe_area.barrier_visible(real.position),
        locked_offset: next.locked_offset,
    };
    (next, out)
}

/// The parts of the scene a teleport target is checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportWorld {
    pub room_width: f64,
    pub room_depth: f64,
    pub bounded: bool,
    pub collision_regions: Vec<CollisionDisc>,
    pub max_range: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportTarget {
    pub position: Vec3,
    pub valid: bool,
}

impl TeleportTarget {
    fn invalid(position: Vec3) -> Self {
        Self { position, valid: false }
    }
}

/// Cast the aiming ray from `origin` along `aim` onto the floor plane.
pub fn teleport_resolve(origin: Vec3, aim: Vec3, world: &TeleportWorld) -> TeleportTarget {
    let len = aim.norm();
    if !(len > 0.0) || aim.y >= 0.0 || origin.y < 0.0 {
        return TeleportTarget::invalid(origin.with_y(0.0));
    }
    let dir = aim * (1.0 / len);
    let s = -origin.y / dir.y;
    let hit = (origin + dir * s).with_y(0.0);
    let in_range = crate::model::horizontal_distance(origin, hit) <= world.max_range;
    let in_room = !world.bounded
        || (hit.x.abs() <= world.room_width / 2.0 && hit.z.abs() <= world.room_depth / 2.0);
    let clear = world.collision_regions.iter().all(|c| !c.contains(hit));
    TeleportTarget { position: hit, valid: in_range && in_room && clear }
}

/// Move to a valid target, keeping heading and pitch.
pub fn apply_teleport(pose: &Pose, target: &TeleportTarget) -> Result<Pose, LocomotionError> {
    if !target.valid {
        return Err(LocomotionError::InvalidTeleportTarget);
    }
    Ok(Pose { position: target.position, ..*pose })
}

/// What a locomotion model did this frame, besides moving the participant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MotionReport {
    pub step_detected: bool,
    pub barrier_visible: bool,
    pub teleport_marker: Option<TeleportTarget>,
    pub teleported: bool,
}

/// Per-session locomotion state for whichever method is configured.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocomotionRuntime {
    head_bob: HeadBobState,
    stride_remaining: f64,
    prev_controllers: Option<Vec<Pose>>,
    walk: Option<PhysicalWalkState>,
    marker: Option<TeleportTarget>,
    trigger_was_held: bool,
}

/// Context a locomotion update needs from the session.
pub struct MotionContext<'a> {
    pub settings: &'a LocomotionSettings,
    pub safe_area: SafeArea,
    pub world: TeleportWorld,
    pub dt: f64,
}

impl LocomotionRuntime {
    /// Forget per-trial state; used when the scene resets to the start pose.
    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Advance the participant's virtual pose by one frame.
    pub fn advance(
        &mut self,
        pose: &Pose,
        input: &FrameInput,
        ctx: &MotionContext<'_>,
    ) -> Result<(Pose, MotionReport), LocomotionError> {
        let settings = ctx.settings;
        let mut report = MotionReport::default();
        let heading_pose = Pose { yaw: input.hmd.yaw, pitch: input.hmd.pitch, ..*pose };
        let mut next = heading_pose;
        match settings.method {
            LocomotionMethod::KeyboardTeleop | LocomotionMethod::ControllerTeleop => {
                next.position += teleop_step(&input.hmd, input, settings, ctx.dt);
            }
            LocomotionMethod::ArmSwing => {
                let speed = match &self.prev_controllers {
                    Some(prev) => arm_swing_speed(prev, &input.controllers, settings, ctx.dt)?,
                    None if input.controllers.is_empty() => {
                        return Err(LocomotionError::NoControllers)
                    }
                    None => 0.0,
                };
                self.prev_controllers = Some(input.controllers.clone());
                next.position += heading_vector(input.hmd.yaw) * (speed * ctx.dt);
            }
            LocomotionMethod::HeadBob => {
                let (state, step) =
                    head_bob_step(&self.head_bob, input.hmd.position.y, input.hmd.pitch, settings);
                self.head_bob = state;
                if step {
                    self.stride_remaining = settings.step_duration;
                    report.step_detected = true;
                }
                if self.stride_remaining > 0.0 {
                    let moving = self.stride_remaining.min(ctx.dt);
                    self.stride_remaining -= moving;
                    next.position += heading_vector(input.hmd.yaw) * (settings.linear_velocity * moving);
                }
            }
            LocomotionMethod::PhysicalWalk => {
                let state = self.walk.unwrap_or_else(|| PhysicalWalkState::anchored(*pose));
                let (state, out) =
                    physical_walk_step(&input.hmd, &state, &ctx.safe_area, input.trigger_held);
                self.walk = Some(state);
                next = out.virtual_pose;
                report.barrier_visible = out.barrier_visible;
            }
            LocomotionMethod::Teleport => {
                if input.trigger_held {
                    let hand = input.controllers.first().copied().unwrap_or(input.hmd);
                    let origin = pose.position + hand.position;
                    self.marker = Some(teleport_resolve(origin, hand.aim(), &ctx.world));
                } else if self.trigger_was_held {
                    if let Some(target) = self.marker.take() {
                        if target.valid {
                            next = apply_teleport(&next, &target)?;
                            report.teleported = true;
                        }
                    }
                }
                self.trigger_was_held = input.trigger_held;
                report.teleport_marker = self.marker;
            }
        }
        next.position.y = 0.0;
        Ok((next, report))
    }
}
