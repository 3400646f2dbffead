//! Simulated participants.
//!
//! Agents walk with controller teleoperation, so each run goes through the
//! same locomotion, logging and scoring code a human session would.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::engine::{Event, ParticipantInfo, Phase, Session, SessionConfig, SessionError, DEFAULT_DT};
use crate::model::{
    horizontal_distance, yaw_towards, EnvironmentSettings, FrameInput, LocomotionSettings, Pose,
    ScenarioSettings, ScoreConstants, Vec3,
};
use crate::persistence::SessionArchive;
use crate::scoring::{LeaderboardEntry, LeaderboardMode, LeaderboardState};
use crate::surveys::{Answer, ItemKind, SurveyDefinition};

/// Eye height used for the synthetic head pose, meters.
const EYE_HEIGHT: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgentKind {
    /// Estimates the goal as the centroid of the fly's observed positions.
    GoalSeeker,
    /// Follows the fly itself and never ends a trial.
    FlyChaser,
    /// Replays a recorded input stream.
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AgentPolicy {
    pub kind: AgentKind,
    /// Standard deviation of the noise on each fly sighting, meters.
    pub observation_noise: f64,
    pub stop_radius: f64,
    /// Ticks spent watching the fly before walking, at zero speed preference.
    pub observe_ticks: u32,
    /// 0 favours accuracy, 1 favours speed.
    pub speed_preference: f64,
}

impl Default for AgentPolicy {
    fn default() -> Self {
        Self {
            kind: AgentKind::GoalSeeker,
            observation_noise: 0.0,
            stop_radius: 0.05,
            observe_ticks: 900,
            speed_preference: 0.5,
        }
    }
}

impl AgentPolicy {
    /// Observation ticks after discounting for speed preference.
    pub fn effective_observe_ticks(&self) -> u32 {
        let keep = (1.0 - self.speed_preference.clamp(0.0, 1.0)) * f64::from(self.observe_ticks);
        keep.round() as u32
    }
}

/// What an agent can see on a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub self_pose: Pose,
    pub fly_position: Vec3,
    /// Seconds since the trial started, before this frame.
    pub trial_clock: f64,
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub policy: AgentPolicy,
    rng: ChaCha8Rng,
    sum_x: f64,
    sum_z: f64,
    sightings: u32,
    ticks: u32,
    script: Vec<FrameInput>,
    cursor: usize,
    trials_seen: Option<usize>,
}

impl Agent {
    pub fn new(policy: AgentPolicy, seed: u64) -> Self {
        Self {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            sum_x: 0.0,
            sum_z: 0.0,
            sightings: 0,
            ticks: 0,
            script: Vec::new(),
            cursor: 0,
            trials_seen: None,
        }
    }

    /// Agent that replays `script` one frame per call, then idles.
    pub fn scripted(script: Vec<FrameInput>, seed: u64) -> Self {
        let policy = AgentPolicy { kind: AgentKind::Scripted, ..AgentPolicy::default() };
        Self { script, ..Self::new(policy, seed) }
    }

    /// Forget everything learned during the previous trial.
    pub fn begin_trial(&mut self) {
        self.sum_x = 0.0;
        self.sum_z = 0.0;
        self.sightings = 0;
        self.ticks = 0;
    }

    /// Current goal estimate, if any sightings were made.
    pub fn goal_estimate(&self) -> Option<Vec3> {
        (self.sightings > 0).then(|| {
            let n = f64::from(self.sightings);
            Vec3::floor(self.sum_x / n, self.sum_z / n)
        })
    }

    fn sight(&mut self, fly: Vec3) {
        let (mut x, mut z) = (fly.x, fly.z);
        let sd = self.policy.observation_noise;
        if sd > 0.0 {
            let noise = Normal::new(0.0, sd).expect("finite positive sd");
            x += noise.sample(&mut self.rng);
            z += noise.sample(&mut self.rng);
        }
        self.sum_x += x;
        self.sum_z += z;
        self.sightings += 1;
    }

    /// Choose this frame's input.
    pub fn act(&mut self, obs: &Observation, dt: f64) -> FrameInput {
        let timestamp = obs.trial_clock + dt;
        let mut hmd = obs.self_pose;
        hmd.position.y = EYE_HEIGHT;
        let mut input = FrameInput::idle(timestamp, hmd);
        match self.policy.kind {
            AgentKind::Scripted => {
                let next = self.script.get(self.cursor).cloned();
                self.cursor += 1;
                return next.unwrap_or(input);
            }
            AgentKind::FlyChaser => {
                let to = obs.fly_position - obs.self_pose.position;
                if to.horizontal_norm() > 1e-9 {
                    input.hmd.yaw = yaw_towards(to.x, to.z);
                    input.move_held = true;
                }
            }
            AgentKind::GoalSeeker => {
                self.sight(obs.fly_position);
                self.ticks += 1;
                if self.ticks <= self.policy.effective_observe_ticks() {
                    return input;
                }
                let goal = self.goal_estimate().expect("at least one sighting");
                if horizontal_distance(obs.self_pose.position, goal) <= self.policy.stop_radius {
                    input.end_trial_pressed = true;
                } else {
                    let to = goal - obs.self_pose.position;
                    input.hmd.yaw = yaw_towards(to.x, to.z);
                    input.move_held = true;
                }
            }
        }
        input
    }

    /// Random answers within each item's range.
    pub fn answer_survey(&mut self, def: &SurveyDefinition) -> Vec<Answer> {
        def.items
            .iter()
            .map(|item| match item.kind {
                ItemKind::Scale { min, max, .. } => Answer::Score(self.rng.random_range(min..=max)),
                ItemKind::FreeText => Answer::Text(String::new()),
            })
            .collect()
    }
}

/// Advance `session` by one frame on behalf of `agent`.
///
/// Surveys are answered only when `answer_surveys` is set; otherwise a
/// pending survey leaves the session waiting. When `record` is given, inputs
/// fed to running trials are appended to it.
pub fn drive_frame(
    session: &mut Session,
    agent: &mut Agent,
    dt: f64,
    answer_surveys: bool,
    record: Option<&mut Vec<FrameInput>>,
) -> Result<Vec<Event>, SessionError> {
    match session.phase() {
        Phase::InTrial => {
            let done = session.records().len();
            if agent.trials_seen != Some(done) {
                agent.begin_trial();
                agent.trials_seen = Some(done);
            }
            let obs = Observation {
                self_pose: session.pose(),
                fly_position: session.firefly().position,
                trial_clock: session.trial_clock(),
            };
            let input = agent.act(&obs, dt);
            if let Some(rec) = record {
                rec.push(input.clone());
            }
            session.step(&input, dt)
        }
        Phase::SurveyPending if answer_surveys => {
            let def = session.pending_survey().map(|(d, _)| d.clone()).ok_or(SessionError::NoPendingSurvey)?;
            let answers = agent.answer_survey(&def);
            session.submit_survey(answers)
        }
        Phase::Idle | Phase::Ended | Phase::Aborted => Ok(Vec::new()),
        _ => {
            let idle = FrameInput::idle(session.clock(), session.pose());
            session.step(&idle, dt)
        }
    }
}

/// Drive `session` with `agent` until it ends, answering surveys as they come.
pub fn run_session(
    session: &mut Session,
    agent: &mut Agent,
    dt: f64,
    mut record: Option<&mut Vec<FrameInput>>,
) -> Result<(), SessionError> {
    while !session.phase().is_terminal() {
        drive_frame(session, agent, dt, true, record.as_deref_mut())?;
    }
    Ok(())
}

/// Speed preference implied by a set of reward constants.
///
/// Compares how much reward ten extra seconds cost against how much half a
/// meter of error costs, both near a typical trial (10 s, 0.5 m).
pub fn speed_preference_for(c: &ScoreConstants) -> f64 {
    let (t, d) = (10.0, 0.5);
    let dr_dt = (c.alpha1 * c.beta1 * (-c.alpha1 * t).exp()).abs();
    let dr_dd = (c.alpha2 * c.beta2 * (-c.alpha2 * d).exp()).abs();
    let s = dr_dt * 10.0;
    let a = dr_dd * 0.5;
    if s + a == 0.0 {
        0.5
    } else {
        s / (s + a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupSpec {
    pub label: String,
    pub score: ScoreConstants,
    /// Overrides the preference derived from `score`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_preference: Option<f64>,
}

/// Contents of an agents file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CohortSpec {
    pub per_group: usize,
    pub groups: Vec<GroupSpec>,
    pub policy: AgentPolicy,
}

/// Fixed inputs shared by every session of a cohort.
#[derive(Debug, Clone)]
pub struct CohortSettings {
    pub environment: EnvironmentSettings,
    pub locomotion: LocomotionSettings,
    pub scenario: ScenarioSettings,
    pub surveys: Vec<SurveyDefinition>,
    /// Starting board for every participant; fake mode keeps it unchanged.
    pub leaderboard: Vec<LeaderboardEntry>,
    pub dt: f64,
}

impl CohortSettings {
    pub fn new(environment: EnvironmentSettings, locomotion: LocomotionSettings, scenario: ScenarioSettings) -> Self {
        Self { environment, locomotion, scenario, surveys: Vec::new(), leaderboard: Vec::new(), dt: DEFAULT_DT }
    }
}

struct Planned {
    participant: ParticipantInfo,
    score: ScoreConstants,
    policy: AgentPolicy,
    scenario_seed: u64,
    agent_seed: u64,
}

fn plan(spec: &CohortSpec, seed: u64) -> Vec<Planned> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for group in &spec.groups {
        let pref = group.speed_preference.unwrap_or_else(|| speed_preference_for(&group.score));
        for i in 0..spec.per_group {
            let mut participant = ParticipantInfo::with_id(format!("{}-{:02}", group.label, i + 1));
            participant.group = group.label.clone();
            out.push(Planned {
                participant,
                score: group.score,
                policy: AgentPolicy { speed_preference: pref, ..spec.policy },
                scenario_seed: rng.random(),
                agent_seed: rng.random(),
            });
        }
    }
    out
}

/// Run every agent of the cohort through a full session, in parallel, with a
/// fake leaderboard. Results come back in group order.
pub fn run_cohort(
    spec: &CohortSpec,
    settings: &CohortSettings,
    seed: u64,
) -> Result<Vec<SessionArchive>, SessionError> {
    let planned = plan(spec, seed);
    let session_id = format!("sim-{seed}");
    let results: Vec<Result<SessionArchive, SessionError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = planned
            .into_iter()
            .map(|p| {
                let session_id = session_id.clone();
                scope.spawn(move || {
                    let mut scenario = settings.scenario.clone();
                    scenario.score = p.score;
                    scenario.rng_seed = p.scenario_seed;
                    let mut config = SessionConfig::new(
                        session_id,
                        settings.environment.clone(),
                        settings.locomotion.clone(),
                        scenario,
                        p.participant,
                    );
                    config.surveys = settings.surveys.clone();
                    config.leaderboard =
                        Some(LeaderboardState::new(LeaderboardMode::Fake, settings.leaderboard.clone()));
                    let (mut session, _) = Session::start(config)?;
                    let mut agent = Agent::new(p.policy, p.agent_seed);
                    for def in session.pre_session_surveys().cloned().collect::<Vec<_>>() {
                        let answers = agent.answer_survey(&def);
                        session.attach_response(&def.id, crate::surveys::Boundary::PreSession, answers)?;
                    }
                    run_session(&mut session, &mut agent, settings.dt, None)?;
                    Ok(SessionArchive::from_session(&session))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("cohort worker panicked")).collect()
    });
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::engine::EndReason;

    fn small_scenario(trials: Vec<u32>) -> (EnvironmentSettings, ScenarioSettings) {
        let blocks = trials.len();
        let mut env = demo::environment();
        env.walls_present_per_block = vec![true; blocks];
        env.floor_extends_to_horizon = vec![false; blocks];
        let mut scen = demo::scenario();
        scen.firefly_per_block = vec![scen.firefly_per_block[0]; blocks];
        scen.trials_per_block = trials;
        (env, scen)
    }

    fn start(policy: AgentPolicy, scen: ScenarioSettings, env: EnvironmentSettings) -> (Session, Agent) {
        let config = SessionConfig::new("t", env, demo::locomotion(), scen, ParticipantInfo::with_id("A"));
        (Session::start(config).unwrap().0, Agent::new(policy, 5))
    }

    #[test]
    fn preference_coupling() {
        let t = speed_preference_for(&ScoreConstants::time_group());
        let a = speed_preference_for(&ScoreConstants::accuracy_group());
        assert!((t - 0.746).abs() < 0.001, "{t}");
        assert!((a - 0.116).abs() < 0.001, "{a}");
    }

    #[test]
    fn goal_seeker_converges_with_long_observation() {
        let (env, scen) = small_scenario(vec![3]);
        let policy = AgentPolicy { observe_ticks: 6_000, speed_preference: 0.0, ..AgentPolicy::default() };
        let (mut s, mut agent) = start(policy, scen.clone(), env);
        run_session(&mut s, &mut agent, DEFAULT_DT, None).unwrap();
        for r in s.records() {
            assert_eq!(r.end_reason, EndReason::EndKey);
            assert!(r.residual < 0.3, "residual {}", r.residual);
        }
    }

    #[test]
    fn fly_chaser_times_out() {
        let (env, mut scen) = small_scenario(vec![2]);
        scen.max_trial_duration = 5.0;
        let policy = AgentPolicy { kind: AgentKind::FlyChaser, ..AgentPolicy::default() };
        let (mut s, mut agent) = start(policy, scen, env);
        run_session(&mut s, &mut agent, DEFAULT_DT, None).unwrap();
        assert!(s.records().iter().all(|r| r.end_reason == EndReason::Timeout));
    }

    #[test]
    fn speed_preference_shortens_observation() {
        let p = AgentPolicy { observe_ticks: 900, speed_preference: 0.75, ..AgentPolicy::default() };
        assert_eq!(p.effective_observe_ticks(), 225);
        let p = AgentPolicy { speed_preference: 0.0, ..p };
        assert_eq!(p.effective_observe_ticks(), 900);
    }

    #[test]
    fn surveys_answered_in_range() {
        let mut agent = Agent::new(AgentPolicy::default(), 1);
        let def = crate::surveys::simulator_sickness();
        for _ in 0..20 {
            let answers = agent.answer_survey(&def);
            assert!(crate::surveys::record_response(&def, "A", crate::surveys::Boundary::PostSession, answers, 0.0).is_ok());
        }
    }

    #[test]
    fn empty_cohort() {
        let spec = CohortSpec { per_group: 0, groups: vec![], policy: AgentPolicy::default() };
        let settings = CohortSettings::new(demo::environment(), demo::locomotion(), demo::scenario());
        assert!(run_cohort(&spec, &settings, 1).unwrap().is_empty());
    }
}
