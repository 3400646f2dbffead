//! The trial / block / session state machine.
//!
//! A [`Session`] is driven by [`Session::step`] once per frame. While a trial
//! runs each step advances the firefly, applies the configured locomotion
//! model and appends one row to the movement log. Between trials the same
//! call counts down the feedback display, waits for survey answers and moves
//! on to the next block, so a headless driver only ever has to call `step`.
//!
//! ```text
//! Idle -> InTrial -> FeedbackDisplay -> InTrial
//!                                    -> SurveyPending -> BlockTransition -> InTrial
//!                                                     -> Ended
//! any -> Aborted
//! ```

use std::collections::VecDeque;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goal::{firefly_advance, firefly_init, FireflyParams, FireflyState};
use crate::locomotion::{LocomotionError, LocomotionRuntime, MotionContext, SafeArea, TeleportWorld};
use crate::model::{
    horizontal_distance, validate_settings, EnvironmentSettings, FrameInput, LocomotionMethod,
    LocomotionSettings, Pose, ScenarioSettings, ValidationReport, Vec3,
};
use crate::scoring::{
    DecayingReward, FeedbackFunction, LeaderboardMode, LeaderboardState, Placement, ScoringError,
};
use crate::surveys::{record_response, Answer, Boundary, SurveyDefinition, SurveyError, SurveyMoment, SurveyResponse};

/// Default frame period, seconds.
pub const DEFAULT_DT: f64 = 1.0 / 90.0;

/// Slack when comparing accumulated clocks against configured durations.
const CLOCK_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid settings:\n{0}")]
    InvalidSettings(ValidationReport),
    #[error("participant id must not be empty")]
    EmptyParticipant,
    #[error("{op} is not allowed in phase {phase}")]
    WrongPhase { op: &'static str, phase: Phase },
    #[error("frame timestamp {got} does not follow {prev}")]
    NonIncreasingTimestamp { prev: f64, got: f64 },
    #[error("session started with {expected} controllers, frame has {got}")]
    ControllerCount { expected: usize, got: usize },
    #[error("dt must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("no survey is pending")]
    NoPendingSurvey,
    #[error(transparent)]
    Locomotion(#[from] LocomotionError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Survey(#[from] SurveyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Idle,
    InTrial,
    FeedbackDisplay,
    SurveyPending,
    BlockTransition,
    Ended,
    Aborted,
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Ended | Phase::Aborted)
    }

    /// Whether the state machine may move from `self` to `to`.
    pub fn can_transition(self, to: Phase) -> bool {
        use Phase::*;
        if to == Aborted {
            return self != Aborted;
        }
        matches!(
            (self, to),
            (Idle, InTrial)
                | (InTrial, FeedbackDisplay)
                | (FeedbackDisplay, InTrial)
                | (FeedbackDisplay, SurveyPending)
                | (SurveyPending, BlockTransition)
                | (SurveyPending, Ended)
                | (BlockTransition, InTrial)
                | (BlockTransition, Ended)
        )
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ParticipantInfo {
    pub id: String,
    pub age: u32,
    pub gender: String,
    pub qualification: String,
    /// Experimental group label, e.g. "time" or "accuracy".
    pub group: String,
}

impl ParticipantInfo {
    pub fn with_id(id: impl Into<String>) -> Self {
        Self { id: id.into(), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EndReason {
    EndKey,
    Timeout,
    Skipped,
}

impl fmt::Display for EndReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameLogEntry {
    /// Seconds since the trial started.
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub yaw: f64,
    pub lights_on: bool,
    pub sound_on: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub block_index: usize,
    pub trial_index: usize,
    /// Session clock when the scene was presented.
    pub start_time: f64,
    pub end_time: f64,
    /// Response time `t`, seconds.
    pub elapsed: f64,
    /// Residual distance `d` to the goal on the floor plane, meters.
    pub residual: f64,
    /// Distance walked during the trial, meters.
    pub path_length: f64,
    pub time_component: f64,
    pub distance_component: f64,
    pub reward: f64,
    pub displayed_score: i64,
    pub end_reason: EndReason,
    pub practice: bool,
    pub placement: Option<Placement>,
    pub frames: Vec<FrameLogEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Note {
    /// Session clock, seconds.
    pub time: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "event")]
pub enum Event {
    PhaseChanged { from: Phase, to: Phase },
    BlockStarted { block: usize },
    TrialEnded { block: usize, trial: usize, reason: EndReason, displayed_score: i64 },
    Placement(Placement),
    SurveyRequested { survey_id: String, boundary: Boundary },
    SessionEnded { aborted: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AutoPilotEntry {
    /// Environment settings file, relative to the settings directory.
    pub environment: String,
    pub locomotion: LocomotionMethod,
}

/// Preset sequence of environment and locomotion pairs, one per participant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AutoPilotPlan {
    pub entries: Vec<AutoPilotEntry>,
    #[serde(default)]
    pub cursor: usize,
}

impl AutoPilotPlan {
    pub fn new(entries: Vec<AutoPilotEntry>) -> Self {
        Self { entries, cursor: 0 }
    }

    /// Next pair, or `None` once the plan is used up.
    pub fn autopilot_next(&mut self) -> Option<AutoPilotEntry> {
        let entry = self.entries.get(self.cursor).cloned()?;
        self.cursor += 1;
        Some(entry)
    }

    pub fn remaining(&self) -> usize {
        self.entries.len().saturating_sub(self.cursor)
    }
}

/// Everything needed to start a session.
pub struct SessionConfig {
    pub session_id: String,
    pub environment: EnvironmentSettings,
    pub locomotion: LocomotionSettings,
    pub scenario: ScenarioSettings,
    pub participant: ParticipantInfo,
    /// Board as loaded for this participant; `None` runs without one.
    pub leaderboard: Option<LeaderboardState>,
    /// Surveys already resolved from the environment's survey ids.
    pub surveys: Vec<SurveyDefinition>,
    /// Replaces the default decaying reward when set.
    pub feedback: Option<Box<dyn FeedbackFunction>>,
}

impl SessionConfig {
    pub fn new(
        session_id: impl Into<String>,
        environment: EnvironmentSettings,
        locomotion: LocomotionSettings,
        scenario: ScenarioSettings,
        participant: ParticipantInfo,
    ) -> Self {
        Self {
            session_id: session_id.into(),
            environment,
            locomotion,
            scenario,
            participant,
            leaderboard: None,
            surveys: Vec::new(),
            feedback: None,
        }
    }
}

pub struct Session {
    session_id: String,
    environment: EnvironmentSettings,
    locomotion: LocomotionSettings,
    scenario: ScenarioSettings,
    participant: ParticipantInfo,
    surveys: Vec<SurveyDefinition>,
    feedback: Box<dyn FeedbackFunction>,
    leaderboard: Option<LeaderboardState>,

    phase: Phase,
    block_index: usize,
    trial_index: usize,
    bad_session: bool,
    notes: Vec<Note>,
    clock: f64,
    rng: ChaCha8Rng,

    pose: Pose,
    firefly: FireflyState,
    lights_on: bool,
    sound_on: bool,
    motion: LocomotionRuntime,
    controller_count: Option<usize>,

    trial_clock: f64,
    trial_start: f64,
    last_timestamp: Option<f64>,
    path_length: f64,
    frames: Vec<FrameLogEntry>,
    feedback_remaining: f64,

    records: Vec<TrialRecord>,
    survey_queue: VecDeque<(SurveyDefinition, Boundary)>,
    responses: Vec<SurveyResponse>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("session_id", &self.session_id)
            .field("participant", &self.participant.id)
            .field("phase", &self.phase)
            .field("block_index", &self.block_index)
            .field("trial_index", &self.trial_index)
            .field("clock", &self.clock)
            .finish_non_exhaustive()
    }
}

impl Session {
    /// Validate the settings and present the first trial.
    pub fn start(config: SessionConfig) -> Result<(Session, Vec<Event>), SessionError> {
        let SessionConfig {
            session_id,
            environment,
            locomotion,
            mut scenario,
            participant,
            leaderboard,
            surveys,
            feedback,
        } = config;
        let report = validate_settings(&environment, &locomotion, &scenario);
        if !report.is_valid() {
            return Err(SessionError::InvalidSettings(report));
        }
        if participant.id.trim().is_empty() {
            return Err(SessionError::EmptyParticipant);
        }
        for s in &surveys {
            s.validate()?;
        }
        scenario.start_pose = scenario
            .start_pose
            .normalized()
            .map_err(|e| SessionError::InvalidSettings(single_violation("startPose", e.to_string())))?;

        let mut rng = ChaCha8Rng::seed_from_u64(scenario.rng_seed);
        let firefly = firefly_init(scenario.goal_position, &scenario.firefly_per_block[0], &mut rng);
        let feedback = feedback.unwrap_or_else(|| Box::new(DecayingReward(scenario.score)));
        let mut session = Session {
            session_id,
            lights_on: environment.lights_on,
            sound_on: environment.sound_on,
            pose: scenario.start_pose,
            environment,
            locomotion,
            participant,
            surveys,
            feedback,
            leaderboard,
            phase: Phase::Idle,
            block_index: 0,
            trial_index: 0,
            bad_session: false,
            notes: Vec::new(),
            clock: 0.0,
            rng,
            firefly,
            motion: LocomotionRuntime::default(),
            controller_count: None,
            trial_clock: 0.0,
            trial_start: 0.0,
            last_timestamp: None,
            path_length: 0.0,
            frames: Vec::new(),
            feedback_remaining: 0.0,
            records: Vec::new(),
            survey_queue: VecDeque::new(),
            responses: Vec::new(),
            scenario,
        };
        let mut events = vec![Event::BlockStarted { block: 0 }];
        session.begin_trial(&mut events);
        Ok((session, events))
    }

    // ---- accessors ----

    pub fn session_id(&self) -> &str {
        &self.session_id
    }
    pub fn phase(&self) -> Phase {
        self.phase
    }
    pub fn block_index(&self) -> usize {
        self.block_index
    }
    pub fn trial_index(&self) -> usize {
        self.trial_index
    }
    pub fn participant(&self) -> &ParticipantInfo {
        &self.participant
    }
    pub fn environment(&self) -> &EnvironmentSettings {
        &self.environment
    }
    pub fn locomotion(&self) -> &LocomotionSettings {
        &self.locomotion
    }
    pub fn scenario(&self) -> &ScenarioSettings {
        &self.scenario
    }
    pub fn is_bad(&self) -> bool {
        self.bad_session
    }
    pub fn notes(&self) -> &[Note] {
        &self.notes
    }
    /// Seconds since the session started.
    pub fn clock(&self) -> f64 {
        self.clock
    }
    /// Seconds since the current trial was presented.
    pub fn trial_clock(&self) -> f64 {
        self.trial_clock
    }
    pub fn pose(&self) -> Pose {
        self.pose
    }
    pub fn firefly(&self) -> &FireflyState {
        &self.firefly
    }
    pub fn lights_on(&self) -> bool {
        self.lights_on
    }
    pub fn sound_on(&self) -> bool {
        self.sound_on
    }
    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }
    pub fn responses(&self) -> &[SurveyResponse] {
        &self.responses
    }
    pub fn leaderboard(&self) -> Option<&LeaderboardState> {
        self.leaderboard.as_ref()
    }
    pub fn leaderboard_mode(&self) -> Option<LeaderboardMode> {
        self.leaderboard.as_ref().map(|b| b.mode)
    }
    /// Frames logged so far in the running trial.
    pub fn current_frames(&self) -> &[FrameLogEntry] {
        &self.frames
    }
    pub fn pending_survey(&self) -> Option<(&SurveyDefinition, Boundary)> {
        if self.phase != Phase::SurveyPending {
            return None;
        }
        self.survey_queue.front().map(|(d, b)| (d, *b))
    }
    /// Surveys to be answered before the first trial. The engine does not
    /// wait for them; use [`Session::attach_response`].
    pub fn pre_session_surveys(&self) -> impl Iterator<Item = &SurveyDefinition> {
        self.surveys.iter().filter(|s| s.is_given_at(SurveyMoment::PreSession))
    }
    pub fn firefly_params(&self) -> &FireflyParams {
        &self.scenario.firefly_per_block[self.block_index]
    }
    pub fn walls_present(&self) -> bool {
        self.environment.walls_present(self.block_index)
    }

    // ---- driving ----

    /// Advance one frame in whatever phase the session is in.
    pub fn step(&mut self, input: &FrameInput, dt: f64) -> Result<Vec<Event>, SessionError> {
        check_dt(dt)?;
        match self.phase {
            Phase::InTrial => self.tick(input, dt),
            Phase::FeedbackDisplay => {
                self.clock += dt;
                self.feedback_remaining -= dt;
                let mut events = Vec::new();
                if input.end_trial_pressed || self.feedback_remaining <= CLOCK_EPS {
                    self.leave_feedback(&mut events);
                }
                Ok(events)
            }
            Phase::SurveyPending => {
                self.clock += dt;
                Ok(Vec::new())
            }
            Phase::BlockTransition => self.advance_block(),
            phase => Err(SessionError::WrongPhase { op: "step", phase }),
        }
    }

    /// One frame of a running trial.
    pub fn tick(&mut self, input: &FrameInput, dt: f64) -> Result<Vec<Event>, SessionError> {
        self.require(Phase::InTrial, "tick")?;
        check_dt(dt)?;
        if let Some(prev) = self.last_timestamp {
            if !(input.timestamp > prev) {
                return Err(SessionError::NonIncreasingTimestamp { prev, got: input.timestamp });
            }
        }
        match self.controller_count {
            None => self.controller_count = Some(input.controllers.len()),
            Some(n) if n != input.controllers.len() => {
                return Err(SessionError::ControllerCount { expected: n, got: input.controllers.len() })
            }
            Some(_) => {}
        }

        let goal = self.scenario.goal_position;
        let params = self.scenario.firefly_per_block[self.block_index];
        let bounded = self.bounded();
        let ctx = MotionContext {
            settings: &self.locomotion,
            safe_area: SafeArea {
                center: Vec3::ZERO,
                width: self.environment.safe_area_width,
                depth: self.environment.safe_area_depth,
                barrier_margin: self.locomotion.barrier_margin,
            },
            world: TeleportWorld {
                room_width: self.environment.room_width,
                room_depth: self.environment.room_depth,
                bounded,
                collision_regions: self.environment.collision_regions.clone(),
                max_range: self.locomotion.teleport_max_range,
            },
            dt,
        };
        let (mut next, _report) = self.motion.advance(&self.pose, input, &ctx)?;
        if bounded {
            let hw = self.environment.room_width / 2.0;
            let hd = self.environment.room_depth / 2.0;
            next.position.x = next.position.x.clamp(-hw, hw);
            next.position.z = next.position.z.clamp(-hd, hd);
        }

        self.firefly = firefly_advance(&self.firefly, goal, &params, &mut self.rng);
        self.path_length += horizontal_distance(self.pose.position, next.position);
        self.pose = next;
        self.last_timestamp = Some(input.timestamp);
        self.clock += dt;
        self.trial_clock += dt;
        self.frames.push(FrameLogEntry {
            t: self.trial_clock,
            x: self.pose.position.x,
            z: self.pose.position.z,
            yaw: self.pose.yaw,
            lights_on: self.lights_on,
            sound_on: self.sound_on,
        });

        let reason = if input.end_trial_pressed {
            Some(EndReason::EndKey)
        } else if self.trial_clock >= self.scenario.max_trial_duration - CLOCK_EPS {
            Some(EndReason::Timeout)
        } else if input.skip_pressed {
            Some(EndReason::Skipped)
        } else {
            None
        };
        match reason {
            Some(r) => self.end_trial(r),
            None => Ok(Vec::new()),
        }
    }

    /// Close the running trial, score it and show feedback.
    pub fn end_trial(&mut self, reason: EndReason) -> Result<Vec<Event>, SessionError> {
        self.require(Phase::InTrial, "end_trial")?;
        let elapsed = self.trial_clock;
        let residual = horizontal_distance(self.pose.position, self.scenario.goal_position);
        let feedback = self.feedback.evaluate(elapsed, residual)?;
        let practice = self.leaderboard_mode() == Some(LeaderboardMode::Practice);
        let placement = match self.leaderboard.as_mut() {
            Some(board) => {
                Some(board.submit(&self.participant.id, feedback.displayed_score.max(0), self.clock)?)
            }
            None => None,
        };
        let record = TrialRecord {
            block_index: self.block_index,
            trial_index: self.trial_index,
            start_time: self.trial_start,
            end_time: self.trial_start + elapsed,
            elapsed,
            residual,
            path_length: self.path_length,
            time_component: feedback.reward.time_component,
            distance_component: feedback.reward.distance_component,
            reward: feedback.reward.total,
            displayed_score: feedback.displayed_score,
            end_reason: reason,
            practice,
            placement: placement.clone(),
            frames: std::mem::take(&mut self.frames),
        };
        let mut events = vec![Event::TrialEnded {
            block: self.block_index,
            trial: self.trial_index,
            reason,
            displayed_score: feedback.displayed_score,
        }];
        if let Some(p) = placement {
            events.push(Event::Placement(p));
        }
        self.records.push(record);

        // the scene goes back to its initial configuration; the fly keeps buzzing
        self.pose = self.scenario.start_pose;
        self.motion.reset();
        self.feedback_remaining = self.scenario.feedback_display_duration;
        self.set_phase(Phase::FeedbackDisplay, &mut events);
        if self.feedback_remaining <= CLOCK_EPS {
            self.leave_feedback(&mut events);
        }
        Ok(events)
    }

    /// Dismiss the feedback screen before its timer runs out.
    pub fn end_feedback(&mut self) -> Result<Vec<Event>, SessionError> {
        self.require(Phase::FeedbackDisplay, "end_feedback")?;
        let mut events = Vec::new();
        self.leave_feedback(&mut events);
        Ok(events)
    }

    /// Answer the survey at the head of the queue.
    pub fn submit_survey(&mut self, answers: Vec<Answer>) -> Result<Vec<Event>, SessionError> {
        self.require(Phase::SurveyPending, "submit_survey")?;
        let (def, boundary) = self.survey_queue.front().cloned().ok_or(SessionError::NoPendingSurvey)?;
        let response = record_response(&def, &self.participant.id, boundary, answers, self.clock)?;
        self.survey_queue.pop_front();
        self.responses.push(response);
        let mut events = Vec::new();
        self.after_survey(&mut events);
        Ok(events)
    }

    /// Record a response collected outside the state machine, such as the
    /// pre-session questionnaire.
    pub fn attach_response(
        &mut self,
        survey_id: &str,
        boundary: Boundary,
        answers: Vec<Answer>,
    ) -> Result<(), SessionError> {
        let def = self
            .surveys
            .iter()
            .find(|s| s.id == survey_id)
            .ok_or_else(|| SurveyError::Unknown(survey_id.to_string()))?;
        let response = record_response(def, &self.participant.id, boundary, answers, self.clock)?;
        self.responses.push(response);
        Ok(())
    }

    /// Move into the next block, or end the session if none is left.
    pub fn advance_block(&mut self) -> Result<Vec<Event>, SessionError> {
        self.require(Phase::BlockTransition, "advance_block")?;
        let mut events = Vec::new();
        if self.block_index + 1 >= self.scenario.block_count() {
            self.set_phase(Phase::Ended, &mut events);
            events.push(Event::SessionEnded { aborted: false });
            return Ok(events);
        }
        self.block_index += 1;
        self.trial_index = 0;
        let params = self.scenario.firefly_per_block[self.block_index];
        self.firefly = firefly_init(self.scenario.goal_position, &params, &mut self.rng);
        events.push(Event::BlockStarted { block: self.block_index });
        self.begin_trial(&mut events);
        Ok(events)
    }

    // ---- operator commands ----

    pub fn toggle_light(&mut self) -> Result<bool, SessionError> {
        self.require_live("toggle_light")?;
        self.lights_on = !self.lights_on;
        Ok(self.lights_on)
    }

    pub fn toggle_sound(&mut self) -> Result<bool, SessionError> {
        self.require_live("toggle_sound")?;
        self.sound_on = !self.sound_on;
        Ok(self.sound_on)
    }

    pub fn add_note(&mut self, text: impl Into<String>) {
        self.notes.push(Note { time: self.clock, text: text.into() });
    }

    pub fn mark_bad(&mut self) {
        self.bad_session = true;
    }

    pub fn abort(&mut self) -> Vec<Event> {
        self.bad_session = true;
        let mut events = Vec::new();
        if self.phase != Phase::Aborted {
            self.set_phase(Phase::Aborted, &mut events);
            events.push(Event::SessionEnded { aborted: true });
        }
        events
    }

    // ---- internals ----

    fn bounded(&self) -> bool {
        self.environment.walls_present(self.block_index) || !self.environment.floor_extends(self.block_index)
    }

    fn require(&self, phase: Phase, op: &'static str) -> Result<(), SessionError> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(SessionError::WrongPhase { op, phase: self.phase })
        }
    }

    fn require_live(&self, op: &'static str) -> Result<(), SessionError> {
        if self.phase.is_terminal() {
            Err(SessionError::WrongPhase { op, phase: self.phase })
        } else {
            Ok(())
        }
    }

    fn set_phase(&mut self, to: Phase, events: &mut Vec<Event>) {
        debug_assert!(self.phase.can_transition(to), "{} -> {}", self.phase, to);
        events.push(Event::PhaseChanged { from: self.phase, to });
        self.phase = to;
    }

    fn begin_trial(&mut self, events: &mut Vec<Event>) {
        self.pose = self.scenario.start_pose;
        self.motion.reset();
        self.trial_clock = 0.0;
        self.trial_start = self.clock;
        self.last_timestamp = None;
        self.path_length = 0.0;
        self.frames.clear();
        self.set_phase(Phase::InTrial, events);
    }

    fn leave_feedback(&mut self, events: &mut Vec<Event>) {
        let trials = self.scenario.trials_per_block[self.block_index] as usize;
        if self.trial_index + 1 < trials {
            self.trial_index += 1;
            self.begin_trial(events);
            return;
        }
        let last_block = self.block_index + 1 >= self.scenario.block_count();
        let block = self.block_index;
        let mut queue: VecDeque<_> = self
            .surveys
            .iter()
            .filter(|s| s.is_given_at(SurveyMoment::PostBlock))
            .map(|s| (s.clone(), Boundary::PostBlock { block }))
            .collect();
        if last_block {
            queue.extend(
                self.surveys
                    .iter()
                    .filter(|s| s.is_given_at(SurveyMoment::PostSession))
                    .map(|s| (s.clone(), Boundary::PostSession)),
            );
        }
        self.survey_queue = queue;
        self.set_phase(Phase::SurveyPending, events);
        self.after_survey(events);
    }

    fn after_survey(&mut self, events: &mut Vec<Event>) {
        if let Some((def, boundary)) = self.survey_queue.front() {
            events.push(Event::SurveyRequested { survey_id: def.id.clone(), boundary: *boundary });
            return;
        }
        if self.block_index + 1 >= self.scenario.block_count() {
            self.set_phase(Phase::Ended, events);
            events.push(Event::SessionEnded { aborted: false });
        } else {
            self.set_phase(Phase::BlockTransition, events);
        }
    }
}

fn check_dt(dt: f64) -> Result<(), SessionError> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(SessionError::BadDt(dt))
    }
}

fn single_violation(field: &str, message: String) -> ValidationReport {
    let mut r = ValidationReport::default();
    r.push(field, message);
    r
}
