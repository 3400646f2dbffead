//! Settings files and per-session archives on disk.
//!
//! ```text
//! <out>/<participantId>/<sessionId>/
//!     settings/environment.json
//!     settings/locomotion.json
//!     settings/scenario.json
//!     trials/trial_<n>.csv      one per trial, n counts from 1 across the session
//!     results.csv
//!     session.json              participant particulars, flags, notes
//!     notes.txt                 the notes again, as plain text
//!     surveys.json              optional
//! ```
//!
//! Every number in the CSV files is written with six decimals, so reading an
//! archive and writing it again reproduces the same bytes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::engine::{EndReason, FrameLogEntry, Note, ParticipantInfo, Session, TrialRecord};
use crate::model::{
    check_environment, check_locomotion, check_scenario, EnvironmentSettings, LocomotionSettings,
    ScenarioSettings, ValidationReport,
};
use crate::scoring::{LeaderboardEntry, LeaderboardMode};
use crate::surveys::SurveyResponse;

pub const MOVEMENT_HEADER: [&str; 6] = ["t", "x", "z", "yaw", "lights_on", "sound_on"];
pub const RESULTS_HEADER: [&str; 13] = [
    "block",
    "trial",
    "start_time",
    "end_time",
    "t",
    "d",
    "path_length",
    "time_component",
    "distance_component",
    "reward",
    "displayed_score",
    "end_reason",
    "practice",
];

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{kind} settings: parse error at line {line}, column {column}: {message}")]
    Parse { kind: &'static str, line: usize, column: usize, message: String },
    #[error("{artifact} missing: {}", path.display())]
    Missing { artifact: &'static str, path: PathBuf },
    #[error("{artifact} corrupt ({}): {reason}", path.display())]
    Corrupt { artifact: &'static str, path: PathBuf, reason: String },
    #[error("session directory already exists: {}", .0.display())]
    Collision(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PersistError + '_ {
    move |source| PersistError::Io { path: path.to_path_buf(), source }
}

// ---------------------------------------------------------------- settings

/// A settings type that can live in its own file.
pub trait SettingsDocument: Serialize + DeserializeOwned {
    const KIND: &'static str;
    /// Checks that need only this document.
    fn check(&self) -> ValidationReport;
}

impl SettingsDocument for EnvironmentSettings {
    const KIND: &'static str = "environment";
    fn check(&self) -> ValidationReport {
        check_environment(self)
    }
}

impl SettingsDocument for LocomotionSettings {
    const KIND: &'static str = "locomotion";
    fn check(&self) -> ValidationReport {
        check_locomotion(self)
    }
}

impl SettingsDocument for ScenarioSettings {
    const KIND: &'static str = "scenario";
    fn check(&self) -> ValidationReport {
        check_scenario(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    /// Keys present in the document that the schema does not know.
    pub unknown_keys: Vec<String>,
    pub report: ValidationReport,
}

/// Parse a settings document, filling defaults for absent keys.
///
/// An empty (or all-whitespace) document counts as `{}`.
pub fn parse_settings<T: SettingsDocument>(text: &str) -> Result<Parsed<T>, PersistError> {
    let text = if text.trim().is_empty() { "{}" } else { text };
    let parse_err = |e: serde_json::Error| PersistError::Parse {
        kind: T::KIND,
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let raw: Value = serde_json::from_str(text).map_err(parse_err)?;
    let value: T = serde_json::from_value(raw.clone()).map_err(|e| {
        // serde_json loses the position once the text is a Value; reparse for it
        serde_json::from_str::<T>(text).err().map(parse_err).unwrap_or(PersistError::Parse {
            kind: T::KIND,
            line: 0,
            column: 0,
            message: e.to_string(),
        })
    })?;
    let typed = serde_json::to_value(&value).expect("settings serialize");
    let mut unknown_keys = Vec::new();
    collect_unknown(&raw, &typed, "", &mut unknown_keys);
    let report = value.check();
    Ok(Parsed { value, unknown_keys, report })
}

fn collect_unknown(raw: &Value, typed: &Value, prefix: &str, out: &mut Vec<String>) {
    match (raw, typed) {
        (Value::Object(r), Value::Object(t)) => {
            for (k, v) in r {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                match t.get(k) {
                    Some(tv) => collect_unknown(v, tv, &path, out),
                    None => out.push(path),
                }
            }
        }
        (Value::Array(r), Value::Array(t)) => {
            for (i, (rv, tv)) in r.iter().zip(t).enumerate() {
                collect_unknown(rv, tv, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => {}
    }
}

pub fn settings_to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("settings serialize");
    s.push('\n');
    s
}

pub fn read_settings_file<T: SettingsDocument>(path: &Path) -> Result<Parsed<T>, PersistError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_settings(&text)
}

// ---------------------------------------------------------------- archive types

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionMeta {
    pub session_id: String,
    pub participant: ParticipantInfo,
    pub bad_session: bool,
    pub aborted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaderboard_mode: Option<LeaderboardMode>,
    pub notes: Vec<Note>,
}

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResultRow {
    pub block: usize,
    pub trial: usize,
    pub start_time: f64,
    pub end_time: f64,
    pub t: f64,
    pub d: f64,
    pub path_length: f64,
    pub time_component: f64,
    pub distance_component: f64,
    pub reward: f64,
    pub displayed_score: i64,
    pub end_reason: EndReason,
    pub practice: bool,
}

impl TrialResultRow {
    pub fn from_record(r: &TrialRecord) -> Self {
        Self {
            block: r.block_index,
            trial: r.trial_index,
            start_time: fixed(r.start_time),
            end_time: fixed(r.end_time),
            t: fixed(r.elapsed),
            d: fixed(r.residual),
            path_length: fixed(r.path_length),
            time_component: fixed(r.time_component),
            distance_component: fixed(r.distance_component),
            reward: fixed(r.reward),
            displayed_score: r.displayed_score,
            end_reason: r.end_reason,
            practice: r.practice,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionArchive {
    pub environment: EnvironmentSettings,
    pub locomotion: LocomotionSettings,
    pub scenario: ScenarioSettings,
    pub meta: SessionMeta,
    /// Movement log per trial, in trial order.
    pub movement_logs: Vec<Vec<FrameLogEntry>>,
    pub results: Vec<TrialResultRow>,
    pub surveys: Vec<SurveyResponse>,
}

impl SessionArchive {
    /// Snapshot a session as it would be read back from disk.
    pub fn from_session(session: &Session) -> Self {
        let records = session.records();
        Self {
            environment: session.environment().clone(),
            locomotion: session.locomotion().clone(),
            scenario: session.scenario().clone(),
            meta: SessionMeta {
                session_id: session.session_id().to_string(),
                participant: session.participant().clone(),
                bad_session: session.is_bad(),
                aborted: session.phase() == crate::engine::Phase::Aborted,
                leaderboard_mode: session.leaderboard_mode(),
                notes: session.notes().to_vec(),
            },
            movement_logs: records.iter().map(|r| r.frames.iter().map(fixed_frame).collect()).collect(),
            results: records.iter().map(TrialResultRow::from_record).collect(),
            surveys: session.responses().to_vec(),
        }
    }

    pub fn participant_id(&self) -> &str {
        &self.meta.participant.id
    }

    pub fn session_id(&self) -> &str {
        &self.meta.session_id
    }
}

/// Round to the six decimals used on disk.
fn fixed(v: f64) -> f64 {
    format!("{v:.6}").parse().expect("formatted float parses")
}

fn fixed_frame(f: &FrameLogEntry) -> FrameLogEntry {
    FrameLogEntry { t: fixed(f.t), x: fixed(f.x), z: fixed(f.z), yaw: fixed(f.yaw), ..*f }
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

// ---------------------------------------------------------------- rendering

fn csv_to_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn movement_log_to_string(frames: &[FrameLogEntry]) -> String {
    csv_to_string(
        &MOVEMENT_HEADER,
        frames.iter().map(|f| {
            vec![
                format!("{:.6}", f.t),
                format!("{:.6}", f.x),
                format!("{:.6}", f.z),
                format!("{:.6}", f.yaw),
                flag(f.lights_on).to_string(),
                flag(f.sound_on).to_string(),
            ]
        }),
    )
}

pub fn trial_results_to_string(rows: &[TrialResultRow]) -> String {
    csv_to_string(
        &RESULTS_HEADER,
        rows.iter().map(|r| {
            vec![
                r.block.to_string(),
                r.trial.to_string(),
                format!("{:.6}", r.start_time),
                format!("{:.6}", r.end_time),
                format!("{:.6}", r.t),
                format!("{:.6}", r.d),
                format!("{:.6}", r.path_length),
                format!("{:.6}", r.time_component),
                format!("{:.6}", r.distance_component),
                format!("{:.6}", r.reward),
                r.displayed_score.to_string(),
                r.end_reason.to_string(),
                flag(r.practice).to_string(),
            ]
        }),
    )
}

fn escape_note(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// One note per line: session time, a tab, then the escaped text.
pub fn notes_to_string(notes: &[Note]) -> String {
    notes.iter().map(|n| format!("{:.6}\t{}\n", n.time, escape_note(&n.text))).collect()
}

pub fn session_meta_to_string(meta: &SessionMeta) -> String {
    settings_to_string(meta)
}

pub fn surveys_to_string(responses: &[SurveyResponse]) -> String {
    settings_to_string(&responses)
}

// ---------------------------------------------------------------- parsing

fn read_csv(
    artifact: &'static str,
    path: &Path,
    text: &str,
    header: &[&str],
) -> Result<Vec<csv::StringRecord>, PersistError> {
    let corrupt = |reason: String| PersistError::Corrupt { artifact, path: path.to_path_buf(), reason };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let got = r.headers().map_err(|e| corrupt(e.to_string()))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(corrupt(format!("unexpected header {:?}", got.iter().collect::<Vec<_>>())));
    }
    r.records().map(|rec| rec.map_err(|e| corrupt(e.to_string()))).collect()
}

fn field<T: std::str::FromStr>(
    artifact: &'static str,
    path: &Path,
    rec: &csv::StringRecord,
    i: usize,
) -> Result<T, PersistError> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| PersistError::Corrupt {
        artifact,
        path: path.to_path_buf(),
        reason: format!("line {}: cannot read column {i} from {raw:?}", rec.position().map_or(0, |p| p.line())),
    })
}

fn bool_field(artifact: &'static str, path: &Path, rec: &csv::StringRecord, i: usize) -> Result<bool, PersistError> {
    match rec.get(i) {
        Some("1") => Ok(true),
        Some("0") => Ok(false),
        other => Err(PersistError::Corrupt {
            artifact,
            path: path.to_path_buf(),
            reason: format!("column {i}: expected 0 or 1, got {other:?}"),
        }),
    }
}

pub fn parse_movement_log(path: &Path, text: &str) -> Result<Vec<FrameLogEntry>, PersistError> {
    const A: &str = "movement log";
    read_csv(A, path, text, &MOVEMENT_HEADER)?
        .iter()
        .map(|rec| {
            Ok(FrameLogEntry {
                t: field(A, path, rec, 0)?,
                x: field(A, path, rec, 1)?,
                z: field(A, path, rec, 2)?,
                yaw: field(A, path, rec, 3)?,
                lights_on: bool_field(A, path, rec, 4)?,
                sound_on: bool_field(A, path, rec, 5)?,
            })
        })
        .collect()
}

fn parse_end_reason(path: &Path, raw: &str) -> Result<EndReason, PersistError> {
    match raw {
        "EndKey" => Ok(EndReason::EndKey),
        "Timeout" => Ok(EndReason::Timeout),
        "Skipped" => Ok(EndReason::Skipped),
        other => Err(PersistError::Corrupt {
            artifact: "results",
            path: path.to_path_buf(),
            reason: format!("unknown end reason {other:?}"),
        }),
    }
}

pub fn parse_trial_results(path: &Path, text: &str) -> Result<Vec<TrialResultRow>, PersistError> {
    const A: &str = "results";
    read_csv(A, path, text, &RESULTS_HEADER)?
        .iter()
        .map(|rec| {
            Ok(TrialResultRow {
                block: field(A, path, rec, 0)?,
                trial: field(A, path, rec, 1)?,
                start_time: field(A, path, rec, 2)?,
                end_time: field(A, path, rec, 3)?,
                t: field(A, path, rec, 4)?,
                d: field(A, path, rec, 5)?,
                path_length: field(A, path, rec, 6)?,
                time_component: field(A, path, rec, 7)?,
                distance_component: field(A, path, rec, 8)?,
                reward: field(A, path, rec, 9)?,
                displayed_score: field(A, path, rec, 10)?,
                end_reason: parse_end_reason(path, rec.get(11).unwrap_or(""))?,
                practice: bool_field(A, path, rec, 12)?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------- directories

pub fn session_dir(root: &Path, participant_id: &str, session_id: &str) -> PathBuf {
    root.join(participant_id).join(session_id)
}

pub fn movement_log_name(trial_number: usize) -> String {
    format!("trial_{trial_number}.csv")
}

fn write_file(path: &Path, contents: &str) -> Result<(), PersistError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

pub fn write_movement_log(frames: &[FrameLogEntry], path: &Path) -> Result<(), PersistError> {
    write_file(path, &movement_log_to_string(frames))
}

pub fn write_trial_results(rows: &[TrialResultRow], path: &Path) -> Result<(), PersistError> {
    write_file(path, &trial_results_to_string(rows))
}

/// Write `archive` under `root`. Refuses to overwrite an existing session.
pub fn write_archive(archive: &SessionArchive, root: &Path) -> Result<PathBuf, PersistError> {
    let dir = session_dir(root, archive.participant_id(), archive.session_id());
    if dir.exists() {
        return Err(PersistError::Collision(dir));
    }
    let settings = dir.join("settings");
    write_file(&settings.join("environment.json"), &settings_to_string(&archive.environment))?;
    write_file(&settings.join("locomotion.json"), &settings_to_string(&archive.locomotion))?;
    write_file(&settings.join("scenario.json"), &settings_to_string(&archive.scenario))?;
    fs::create_dir_all(dir.join("trials")).map_err(io_err(&dir))?;
    for (i, frames) in archive.movement_logs.iter().enumerate() {
        write_movement_log(frames, &dir.join("trials").join(movement_log_name(i + 1)))?;
    }
    write_trial_results(&archive.results, &dir.join("results.csv"))?;
    write_file(&dir.join("session.json"), &session_meta_to_string(&archive.meta))?;
    write_file(&dir.join("notes.txt"), &notes_to_string(&archive.meta.notes))?;
    if !archive.surveys.is_empty() {
        write_file(&dir.join("surveys.json"), &surveys_to_string(&archive.surveys))?;
    }
    Ok(dir)
}

fn read_artifact(artifact: &'static str, path: &Path) -> Result<String, PersistError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            Err(PersistError::Missing { artifact, path: path.to_path_buf() })
        }
        Err(source) => Err(PersistError::Io { path: path.to_path_buf(), source }),
    }
}

fn read_json<T: DeserializeOwned>(artifact: &'static str, path: &Path) -> Result<T, PersistError> {
    let text = read_artifact(artifact, path)?;
    serde_json::from_str(&text).map_err(|e| PersistError::Corrupt {
        artifact,
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Read a session directory written by [`write_archive`]. Files the archive
/// does not know about are ignored.
pub fn read_archive(dir: &Path) -> Result<SessionArchive, PersistError> {
    let settings = dir.join("settings");
    let environment = read_json("environment", &settings.join("environment.json"))?;
    let locomotion = read_json("locomotion", &settings.join("locomotion.json"))?;
    let scenario = read_json("scenario", &settings.join("scenario.json"))?;
    let meta: SessionMeta = read_json("session", &dir.join("session.json"))?;

    let notes_path = dir.join("notes.txt");
    let notes_text = read_artifact("notes", &notes_path)?;
    if notes_text != notes_to_string(&meta.notes) {
        return Err(PersistError::Corrupt {
            artifact: "notes",
            path: notes_path,
            reason: "does not match the notes in session.json".into(),
        });
    }

    let results_path = dir.join("results.csv");
    let results = parse_trial_results(&results_path, &read_artifact("results", &results_path)?)?;
    let mut movement_logs = Vec::with_capacity(results.len());
    for n in 1..=results.len() {
        let path = dir.join("trials").join(movement_log_name(n));
        movement_logs.push(parse_movement_log(&path, &read_artifact("movement log", &path)?)?);
    }

    let surveys_path = dir.join("surveys.json");
    let surveys = if surveys_path.exists() { read_json("surveys", &surveys_path)? } else { Vec::new() };

    Ok(SessionArchive { environment, locomotion, scenario, meta, movement_logs, results, surveys })
}

/// Every session directory under `root`, sorted by path.
pub fn find_archives(root: &Path) -> Result<Vec<PathBuf>, PersistError> {
    let mut found = Vec::new();
    let participants = fs::read_dir(root).map_err(io_err(root))?;
    for p in participants {
        let p = p.map_err(io_err(root))?.path();
        if !p.is_dir() {
            continue;
        }
        for s in fs::read_dir(&p).map_err(io_err(&p))? {
            let s = s.map_err(io_err(&p))?.path();
            if s.join("session.json").is_file() {
                found.push(s);
            }
        }
    }
    found.sort();
    Ok(found)
}

// ---------------------------------------------------------------- leaderboard

/// Board entries from `path`; a missing file is an empty board.
pub fn load_leaderboard(path: &Path) -> Result<Vec<LeaderboardEntry>, PersistError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_json("leaderboard", path)
}

pub fn save_leaderboard(path: &Path, entries: &[LeaderboardEntry]) -> Result<(), PersistError> {
    write_file(path, &settings_to_string(&entries))
}

/// Write a finished session's archive under `root` and, for a real board,
/// the updated leaderboard to `leaderboard_path`. Fake and practice boards
/// leave the file untouched.
pub fn persist_session(
    session: &Session,
    root: &Path,
    leaderboard_path: Option<&Path>,
) -> Result<PathBuf, PersistError> {
    let dir = write_archive(&SessionArchive::from_session(session), root)?;
    if let (Some(path), Some(board)) = (leaderboard_path, session.leaderboard()) {
        if board.mode == LeaderboardMode::Real {
            save_leaderboard(path, board.persistable())?;
        }
    }
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;

    #[test]
    fn demo_environment_parses_clean() {
        let p = parse_settings::<EnvironmentSettings>(demo::ENVIRONMENT_JSON).unwrap();
        assert_eq!((p.value.room_width, p.value.room_depth, p.value.wall_height), (10.0, 10.0, 4.0));
        assert!(p.unknown_keys.is_empty());
        assert!(p.report.is_valid());
    }

    #[test]
    fn empty_document_gives_defaults_and_report() {
        let p = parse_settings::<ScenarioSettings>("").unwrap();
        assert_eq!(p.value, ScenarioSettings::default());
        assert!(!p.report.is_valid());
        let p = parse_settings::<LocomotionSettings>("  \n").unwrap();
        assert_eq!(p.value, LocomotionSettings::default());
    }

    #[test]
    fn truncated_document_reports_position() {
        let text = &demo::SCENARIO_JSON[..120];
        match parse_settings::<ScenarioSettings>(text) {
            Err(PersistError::Parse { line, kind, .. }) => {
                assert_eq!(kind, "scenario");
                assert!(line > 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn type_error_reports_position() {
        let text = "{\n  \"roomWidth\": \"wide\"\n}";
        match parse_settings::<EnvironmentSettings>(text) {
            Err(PersistError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_warnings() {
        let text = r#"{"roomWidth": 8, "colour": "red", "collisionRegions": [{"center": {"x":0,"y":0,"z":0}, "radius": 1, "tag": 3}]}"#;
        let p = parse_settings::<EnvironmentSettings>(text).unwrap();
        assert_eq!(p.value.room_width, 8.0);
        assert_eq!(p.unknown_keys, ["collisionRegions[0].tag", "colour"]);
    }

    #[test]
    fn settings_text_round_trip() {
        let once = settings_to_string(&demo::scenario());
        let back = parse_settings::<ScenarioSettings>(&once).unwrap().value;
        assert_eq!(settings_to_string(&back), once);
    }

    fn frame(t: f64, lights: bool) -> FrameLogEntry {
        FrameLogEntry { t, x: 4.5 - t, z: 4.5, yaw: 225.0, lights_on: lights, sound_on: true }
    }

    #[test]
    fn movement_log_layout() {
        let frames = [frame(0.011111, true), frame(0.022222, false), frame(0.033333, false)];
        let text = movement_log_to_string(&frames);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,x,z,yaw,lights_on,sound_on");
        assert_eq!(lines[1], "0.011111,4.488889,4.500000,225.000000,1,1");
        let back = parse_movement_log(Path::new("m.csv"), &text).unwrap();
        assert_eq!(back, frames);
        assert_eq!(movement_log_to_string(&back), text);
    }

    #[test]
    fn notes_escape_and_render() {
        let notes = vec![Note { time: 1.5, text: "felt\tdizzy\nstopped".into() }];
        assert_eq!(notes_to_string(&notes), "1.500000\tfelt\\tdizzy\\nstopped\n");
    }

    #[test]
    fn bad_results_row_is_corrupt() {
        let mut text = trial_results_to_string(&[]);
        text.push_str("0,0,0,1,1,2,3,4,5,6,7,Teleported,0\n");
        match parse_trial_results(Path::new("results.csv"), &text) {
            Err(PersistError::Corrupt { artifact: "results", .. }) => {}
            other => panic!("expected corrupt results, got {other:?}"),
        }
    }
}
