//! Operator protocol messages and their line codec.
//!
//! Each message is one JSON object on one line, discriminated by `type`.
//! The same payloads travel as WebSocket text frames for browser clients.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EndReason, ParticipantInfo, Phase, Session};
use crate::model::{LocomotionMethod, Vec3};
use crate::scoring::{LeaderboardEntry, LeaderboardMode, Placement};
use crate::surveys::Answer;

pub const PROTOCOL_VERSION: u32 = 1;

const KNOWN_TYPES: [&str; 5] = ["welcome", "command", "ack", "snapshot", "error"];

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("unknown message type {0:?}")]
    UnknownType(String),
    #[error("message has no string \"type\" field")]
    MissingType,
    #[error("malformed message: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    /// May send commands.
    Operator,
    /// Receives snapshots only.
    Spectator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all_fields = "camelCase", tag = "kind")]
pub enum Command {
    StartSession {
        participant: ParticipantInfo,
        /// Environment settings file name within the settings directory.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        environment: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        locomotion: Option<LocomotionMethod>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        leaderboard_mode: Option<LeaderboardMode>,
    },
    ToggleLight,
    ToggleSound,
    AddNote { text: String },
    MarkBad,
    Abort,
    SubmitSurvey { answers: Vec<Answer> },
    EndFeedback,
    /// Start the next session of the auto-pilot plan.
    AutopilotNext { participant: ParticipantInfo },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseView {
    pub x: f64,
    pub z: f64,
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialSummary {
    pub block_index: usize,
    pub trial_index: usize,
    pub t: f64,
    pub d: f64,
    pub displayed_score: i64,
    pub end_reason: EndReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<Placement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant_id: Option<String>,
    pub phase: Phase,
    pub block_index: usize,
    pub trial_index: usize,
    pub trial_clock: f64,
    pub max_trial_duration: f64,
    pub participant_pose: PoseView,
    pub fly_position: Vec3,
    pub goal_position: Vec3,
    pub room_width: f64,
    pub room_depth: f64,
    pub walls_present: bool,
    pub lights_on: bool,
    pub sound_on: bool,
    pub bad_session: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_trial: Option<TrialSummary>,
    #[serde(default)]
    pub leaderboard: Vec<LeaderboardEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaderboard_mode: Option<LeaderboardMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending_survey: Option<String>,
}

impl Snapshot {
    /// Snapshot with no session running.
    pub fn idle(seq: u64) -> Self {
        Snapshot {
            seq,
            session_id: None,
            participant_id: None,
            phase: Phase::Idle,
            block_index: 0,
            trial_index: 0,
            trial_clock: 0.0,
            max_trial_duration: 0.0,
            participant_pose: PoseView { x: 0.0, z: 0.0, yaw: 0.0 },
            fly_position: Vec3::ZERO,
            goal_position: Vec3::ZERO,
            room_width: 0.0,
            room_depth: 0.0,
            walls_present: false,
            lights_on: false,
            sound_on: false,
            bad_session: false,
            last_trial: None,
            leaderboard: Vec::new(),
            leaderboard_mode: None,
            pending_survey: None,
        }
    }

    pub fn of(session: &Session, seq: u64) -> Self {
        let pose = session.pose();
        let last_trial = session.records().last().map(|r| TrialSummary {
            block_index: r.block_index,
            trial_index: r.trial_index,
            t: r.elapsed,
            d: r.residual,
            displayed_score: r.displayed_score,
            end_reason: r.end_reason,
            placement: r.placement.clone(),
        });
        Snapshot {
            seq,
            session_id: Some(session.session_id().to_string()),
            participant_id: Some(session.participant().id.clone()),
            phase: session.phase(),
            block_index: session.block_index(),
            trial_index: session.trial_index(),
            trial_clock: session.trial_clock(),
            max_trial_duration: session.scenario().max_trial_duration,
            participant_pose: PoseView { x: pose.position.x, z: pose.position.z, yaw: pose.yaw },
            fly_position: session.firefly().position,
            goal_position: session.scenario().goal_position,
            room_width: session.environment().room_width,
            room_depth: session.environment().room_depth,
            walls_present: session.walls_present(),
            lights_on: session.lights_on(),
            sound_on: session.sound_on(),
            bad_session: session.is_bad(),
            last_trial,
            leaderboard: session.leaderboard().map(|b| b.entries().to_vec()).unwrap_or_default(),
            leaderboard_mode: session.leaderboard_mode(),
            pending_survey: session.pending_survey().map(|(d, _)| d.id.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "type")]
pub enum Message {
    Welcome {
        role: Role,
        protocol: u32,
    },
    #[serde(rename_all = "camelCase")]
    Command {
        command_id: u64,
        /// Client clock, milliseconds since the Unix epoch.
        issued_at: f64,
        command: Command,
    },
    #[serde(rename_all = "camelCase")]
    Ack {
        command_id: u64,
        ok: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Snapshot(Snapshot),
    Error {
        message: String,
    },
}

impl Message {
    pub fn ack_ok(command_id: u64) -> Self {
        Message::Ack { command_id, ok: true, error: None }
    }

    pub fn ack_err(command_id: u64, error: impl Into<String>) -> Self {
        Message::Ack { command_id, ok: false, error: Some(error.into()) }
    }
}

/// Serialize without the trailing newline (WebSocket text frames).
pub fn encode_payload(msg: &Message) -> String {
    serde_json::to_string(msg).expect("protocol messages serialize")
}

/// One line, newline included.
pub fn encode(msg: &Message) -> String {
    let mut s = encode_payload(msg);
    s.push('\n');
    s
}

/// Parse one message. Surrounding whitespace, including the newline, is ignored.
pub fn decode(line: &str) -> Result<Message, DecodeError> {
    let value: serde_json::Value =
        serde_json::from_str(line.trim()).map_err(|e| DecodeError::Malformed(e.to_string()))?;
    let kind = value.get("type").and_then(|t| t.as_str()).ok_or(DecodeError::MissingType)?;
    if !KNOWN_TYPES.contains(&kind) {
        return Err(DecodeError::UnknownType(kind.to_string()));
    }
    serde_json::from_value(value).map_err(|e| DecodeError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toggle_light_round_trip() {
        let m = Message::Command { command_id: 7, issued_at: 1.5, command: Command::ToggleLight };
        let line = encode(&m);
        assert!(line.ends_with('\n'));
        assert_eq!(line.matches('\n').count(), 1);
        assert_eq!(decode(&line).unwrap(), m);
    }

    #[test]
    fn absent_pending_survey() {
        let s = Snapshot::idle(3);
        let line = encode(&Message::Snapshot(s.clone()));
        assert!(!line.contains("pendingSurvey"));
        match decode(&line).unwrap() {
            Message::Snapshot(back) => {
                assert_eq!(back.pending_survey, None);
                assert_eq!(back, s);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_type_named() {
        assert_eq!(
            decode(r#"{"type":"telemetry","x":1}"#),
            Err(DecodeError::UnknownType("telemetry".into()))
        );
        assert_eq!(decode(r#"{"x":1}"#), Err(DecodeError::MissingType));
        assert!(matches!(decode("{nope"), Err(DecodeError::Malformed(_))));
        assert!(matches!(decode(r#"{"type":"ack"}"#), Err(DecodeError::Malformed(_))));
    }

    #[test]
    fn wire_shape() {
        let m = Message::Command {
            command_id: 1,
            issued_at: 0.0,
            command: Command::AddNote { text: "dizzy".into() },
        };
        assert_eq!(
            encode_payload(&m),
            r#"{"type":"command","commandId":1,"issuedAt":0.0,"command":{"kind":"AddNote","text":"dizzy"}}"#
        );
        assert_eq!(encode_payload(&Message::ack_ok(1)), r#"{"type":"ack","commandId":1,"ok":true}"#);
    }
}
