//! The engine side of the service: owns the running session and applies
//! operator commands between frames.

use std::fs;
use std::path::{Path, PathBuf};

use navloop_core::agents::{drive_frame, speed_preference_for, Agent, CohortSpec};
use navloop_core::engine::{AutoPilotPlan, ParticipantInfo, Session, SessionConfig, DEFAULT_DT};
use navloop_core::model::{EnvironmentSettings, LocomotionMethod, LocomotionSettings, ScenarioSettings};
use navloop_core::persistence::{load_leaderboard, parse_settings, persist_session, SettingsDocument};
use navloop_core::protocol::{Command, Snapshot};
use navloop_core::scoring::{LeaderboardMode, LeaderboardState};
use navloop_core::surveys::{builtin_surveys, resolve_surveys, SurveyDefinition};

pub const DEFAULT_ENVIRONMENT: &str = "environment.json";
pub const LEADERBOARD_FILE: &str = "leaderboard.json";

#[derive(Debug, Clone)]
pub struct HostConfig {
    /// Directory holding environment, locomotion and scenario files, plus
    /// optional `agents.json` and `surveys.json`.
    pub settings_dir: PathBuf,
    pub out_dir: PathBuf,
    pub autopilot: Option<AutoPilotPlan>,
    /// Let the simulated participant answer surveys instead of waiting for
    /// the operator.
    pub auto_surveys: bool,
    pub dt: f64,
}

impl HostConfig {
    pub fn new(settings_dir: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            settings_dir: settings_dir.into(),
            out_dir: out_dir.into(),
            autopilot: None,
            auto_surveys: false,
            dt: DEFAULT_DT,
        }
    }
}

pub struct EngineHost {
    config: HostConfig,
    session: Option<Session>,
    agent: Option<Agent>,
    plan: Option<AutoPilotPlan>,
    persisted: Option<PathBuf>,
    started: u64,
}

fn read_doc<T: SettingsDocument>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed = parse_settings::<T>(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    for key in &parsed.unknown_keys {
        log::warn!("{}: unknown key {key}", path.display());
    }
    Ok(parsed.value)
}

fn read_optional_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Option<T>, String> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map(Some).map_err(|e| format!("{}: {e}", path.display()))
}

fn session_id() -> String {
    chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string()
}

impl EngineHost {
    pub fn new(config: HostConfig) -> Self {
        let plan = config.autopilot.clone();
        Self { config, session: None, agent: None, plan, persisted: None, started: 0 }
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    /// Archive directory of the last finished session.
    pub fn last_archive(&self) -> Option<&Path> {
        self.persisted.as_deref()
    }

    pub fn leaderboard_path(&self) -> PathBuf {
        self.config.out_dir.join(LEADERBOARD_FILE)
    }

    pub fn snapshot(&self, seq: u64) -> Snapshot {
        match &self.session {
            Some(s) => Snapshot::of(s, seq),
            None => Snapshot::idle(seq),
        }
    }

    fn live(&mut self) -> Result<&mut Session, String> {
        match self.session.as_mut() {
            Some(s) if !s.phase().is_terminal() => Ok(s),
            Some(s) => Err(format!("session already {}", s.phase())),
            None => Err("no session running".into()),
        }
    }

    /// Apply one operator command.
    pub fn handle(&mut self, command: &Command) -> Result<(), String> {
        let result = match command {
            Command::StartSession { participant, environment, locomotion, leaderboard_mode } => self.start(
                participant.clone(),
                environment.as_deref(),
                *locomotion,
                leaderboard_mode.unwrap_or_default(),
            ),
            Command::AutopilotNext { participant } => {
                let plan = self.plan.as_mut().ok_or("no autopilot plan loaded")?;
                let entry = plan.autopilot_next().ok_or("autopilot plan exhausted")?;
                self.start(participant.clone(), Some(&entry.environment), Some(entry.locomotion), LeaderboardMode::Real)
            }
            Command::ToggleLight => self.live()?.toggle_light().map(|_| ()).map_err(|e| e.to_string()),
            Command::ToggleSound => self.live()?.toggle_sound().map(|_| ()).map_err(|e| e.to_string()),
            Command::AddNote { text } => {
                self.session.as_mut().ok_or("no session running")?.add_note(text.clone());
                Ok(())
            }
            Command::MarkBad => {
                self.session.as_mut().ok_or("no session running")?.mark_bad();
                Ok(())
            }
            Command::Abort => {
                self.live()?.abort();
                Ok(())
            }
            Command::SubmitSurvey { answers } => {
                self.live()?.submit_survey(answers.clone()).map(|_| ()).map_err(|e| e.to_string())
            }
            Command::EndFeedback => self.live()?.end_feedback().map(|_| ()).map_err(|e| e.to_string()),
        };
        self.persist_if_done();
        result
    }

    fn start(
        &mut self,
        participant: ParticipantInfo,
        environment: Option<&str>,
        method: Option<LocomotionMethod>,
        mode: LeaderboardMode,
    ) -> Result<(), String> {
        if let Some(s) = &self.session {
            if !s.phase().is_terminal() {
                return Err(format!("session {} still running", s.session_id()));
            }
        }
        let dir = &self.config.settings_dir;
        let env: EnvironmentSettings = read_doc(&dir.join(environment.unwrap_or(DEFAULT_ENVIRONMENT)))?;
        let mut loco: LocomotionSettings = read_doc(&dir.join("locomotion.json"))?;
        let mut scen: ScenarioSettings = read_doc(&dir.join("scenario.json"))?;
        if let Some(m) = method {
            loco.method = m;
        }

        let cohort: Option<CohortSpec> = read_optional_json(&dir.join("agents.json"))?;
        let mut policy = cohort.as_ref().map(|c| c.policy).unwrap_or_default();
        if let Some(g) = cohort.as_ref().and_then(|c| c.groups.iter().find(|g| g.label == participant.group)) {
            scen.score = g.score;
            policy.speed_preference = g.speed_preference.unwrap_or_else(|| speed_preference_for(&g.score));
        }

        let mut available = builtin_surveys();
        let extra: Option<Vec<SurveyDefinition>> = read_optional_json(&dir.join("surveys.json"))?;
        for def in extra.unwrap_or_default() {
            available.retain(|d| d.id != def.id);
            available.push(def);
        }
        let surveys = resolve_surveys(&env.survey_links, &available).map_err(|e| e.to_string())?;

        let entries = load_leaderboard(&self.leaderboard_path()).map_err(|e| e.to_string())?;
        let seed = scen.rng_seed ^ self.started;
        let mut config = SessionConfig::new(session_id(), env, loco, scen, participant);
        config.surveys = surveys;
        config.leaderboard = Some(LeaderboardState::new(mode, entries));
        let (session, _) = Session::start(config).map_err(|e| e.to_string())?;
        log::info!("session {} started for {}", session.session_id(), session.participant().id);
        self.started += 1;
        self.agent = Some(Agent::new(policy, seed));
        self.session = Some(session);
        self.persisted = None;
        Ok(())
    }

    /// Advance the running session by one frame. Returns whether a session
    /// is live.
    pub fn tick(&mut self) -> bool {
        let dt = self.config.dt;
        let auto = self.config.auto_surveys;
        let (Some(session), Some(agent)) = (self.session.as_mut(), self.agent.as_mut()) else {
            return false;
        };
        if session.phase().is_terminal() {
            return false;
        }
        if let Err(e) = drive_frame(session, agent, dt, auto, None) {
            log::error!("session {}: {e}; aborting", session.session_id());
            session.add_note(format!("engine error: {e}"));
            session.abort();
        }
        self.persist_if_done();
        self.session.as_ref().is_some_and(|s| !s.phase().is_terminal())
    }

    fn persist_if_done(&mut self) {
        let Some(session) = &self.session else { return };
        if !session.phase().is_terminal() || self.persisted.is_some() {
            return;
        }
        let board = self.leaderboard_path();
        match persist_session(session, &self.config.out_dir, Some(&board)) {
            Ok(dir) => {
                log::info!("session {} {} archived at {}", session.session_id(), session.phase(), dir.display());
                self.persisted = Some(dir);
            }
            Err(e) => {
                log::error!("session {}: could not archive: {e}", session.session_id());
                // do not retry every frame
                self.persisted = Some(PathBuf::new());
            }
        }
    }
}
