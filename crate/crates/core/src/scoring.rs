//! Delayed feedback: the decaying reward, its presentation as an integer
//! score, and the top-ten leaderboard in its real, fake and practice modes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::model::ScoreConstants;

/// Capacity of the leaderboard.
pub const BOARD_SIZE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoringError {
    #[error("{what} must be finite and non-negative, got {value}")]
    InvalidInput { what: &'static str, value: f64 },
    #[error("reward evaluated to a non-finite value")]
    NonFiniteReward,
    #[error("a real leaderboard persists and cannot be reset")]
    ResetRealBoard,
    #[error("scores must be non-negative, got {0}")]
    NegativeScore(i64),
}

/// Component-wise reward for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Reward {
    pub total: f64,
    pub time_component: f64,
    pub distance_component: f64,
}

fn check_input(what: &'static str, value: f64) -> Result<(), ScoringError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ScoringError::InvalidInput { what, value })
    }
}

/// `R = β1·exp(−α1·t) + β2·exp(−α2·d)` for elapsed time `t` (s) and residual
/// distance `d` (m).
pub fn raw_reward(t: f64, d: f64, c: &ScoreConstants) -> Result<Reward, ScoringError> {
    check_input("t", t)?;
    check_input("d", d)?;
    let time_component = c.beta1 * (-c.alpha1 * t).exp();
    let distance_component = c.beta2 * (-c.alpha2 * d).exp();
    let total = time_component + distance_component;
    if !total.is_finite() {
        return Err(ScoringError::NonFiniteReward);
    }
    Ok(Reward { total, time_component, distance_component })
}

/// Scale, round half away from zero, and floor at zero when configured.
pub fn displayed_score(reward: f64, c: &ScoreConstants) -> i64 {
    let scaled = (c.scale_factor * reward).round();
    let score = if scaled.is_nan() { 0 } else { scaled as i64 };
    if c.floor_at_zero {
        score.max(0)
    } else {
        score
    }
}

/// Outcome of scoring one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Feedback {
    pub reward: Reward,
    pub displayed_score: i64,
}

/// Turns a trial outcome into feedback. The engine only sees this trait, so
/// alternative feedback plugs in without touching the session loop.
pub trait FeedbackFunction: Send + Sync {
    fn evaluate(&self, elapsed: f64, residual: f64) -> Result<Feedback, ScoringError>;
}

/// The default two-term exponential reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayingReward(pub ScoreConstants);

impl FeedbackFunction for DecayingReward {
    fn evaluate(&self, elapsed: f64, residual: f64) -> Result<Feedback, ScoringError> {
        let reward = raw_reward(elapsed, residual, &self.0)?;
        Ok(Feedback { reward, displayed_score: displayed_score(reward.total, &self.0) })
    }
}

/// Feedback that only reports how far from the goal the trial ended, in
/// centimeters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DistanceOnly;

impl FeedbackFunction for DistanceOnly {
    fn evaluate(&self, elapsed: f64, residual: f64) -> Result<Feedback, ScoringError> {
        check_input("t", elapsed)?;
        check_input("d", residual)?;
        Ok(Feedback {
            reward: Reward { total: -residual, time_component: 0.0, distance_component: -residual },
            displayed_score: (residual * 100.0).round() as i64,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LeaderboardMode {
    #[default]
    Real,
    Fake,
    Practice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeaderboardEntry {
    pub participant_id: String,
    pub score: i64,
    /// Seconds; the caller chooses the epoch.
    pub timestamp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Placement {
    /// Entered the board at `rank` (1-based). `is_new_high` marks a new top score.
    Ranked { rank: usize, is_new_high: bool, score: i64 },
    /// Not good enough for the board; shown underneath it.
    BelowBoard { score: i64 },
    /// Provisional rank against the board, which is left untouched.
    Practice { provisional_rank: Option<usize>, score: i64 },
}

impl Placement {
    pub fn score(&self) -> i64 {
        match *self {
            Placement::Ranked { score, .. }
            | Placement::BelowBoard { score }
            | Placement::Practice { score, .. } => score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeaderboardState {
    entries: Vec<LeaderboardEntry>,
    pub mode: LeaderboardMode,
    persisted_snapshot: Vec<LeaderboardEntry>,
}

fn sort_entries(mut entries: Vec<LeaderboardEntry>) -> Vec<LeaderboardEntry> {
    // stable: equal scores keep their original order
    entries.sort_by(|a, b| b.score.cmp(&a.score));
    entries.truncate(BOARD_SIZE);
    entries
}

impl LeaderboardState {
    /// Board as loaded at participant start. Entries are sorted and trimmed.
    pub fn new(mode: LeaderboardMode, entries: Vec<LeaderboardEntry>) -> Self {
        let entries = sort_entries(entries);
        Self { persisted_snapshot: entries.clone(), entries, mode }
    }

    pub fn entries(&self) -> &[LeaderboardEntry] {
        &self.entries
    }

    pub fn persisted_snapshot(&self) -> &[LeaderboardEntry] {
        &self.persisted_snapshot
    }

    /// What belongs on disk: the live board in real mode, otherwise the
    /// untouched snapshot.
    pub fn persistable(&self) -> &[LeaderboardEntry] {
        match self.mode {
            LeaderboardMode::Real => &self.entries,
            LeaderboardMode::Fake | LeaderboardMode::Practice => &self.persisted_snapshot,
        }
    }

    /// Index at which `score` would be inserted; ties go below existing entries.
    fn insertion_index(&self, score: i64) -> usize {
        self.entries.iter().take_while(|e| e.score >= score).count()
    }

    pub fn submit(
        &mut self,
        participant_id: &str,
        score: i64,
        timestamp: f64,
    ) -> Result<Placement, ScoringError> {
        if score < 0 {
            return Err(ScoringError::NegativeScore(score));
        }
        let idx = self.insertion_index(score);
        if self.mode == LeaderboardMode::Practice {
            let provisional_rank = (idx < BOARD_SIZE).then_some(idx + 1);
            return Ok(Placement::Practice { provisional_rank, score });
        }
        if idx >= BOARD_SIZE {
            return Ok(Placement::BelowBoard { score });
        }
        self.entries.insert(
            idx,
            LeaderboardEntry { participant_id: participant_id.to_string(), score, timestamp },
        );
        self.entries.truncate(BOARD_SIZE);
        Ok(Placement::Ranked { rank: idx + 1, is_new_high: idx == 0, score })
    }

    /// Discard in-session changes to a fake board.
    pub fn reset_for_participant(&mut self) -> Result<(), ScoringError> {
        match self.mode {
            LeaderboardMode::Real => Err(ScoringError::ResetRealBoard),
            _ => {
                self.entries = self.persisted_snapshot.clone();
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, score: i64) -> LeaderboardEntry {
        LeaderboardEntry { participant_id: id.into(), score, timestamp: 0.0 }
    }

    #[test]
    fn reward_at_origin() {
        let t = raw_reward(0.0, 0.0, &ScoreConstants::time_group()).unwrap();
        assert_eq!(t.total, 4.2);
        let a = raw_reward(0.0, 0.0, &ScoreConstants::accuracy_group()).unwrap();
        assert_eq!(a.total, 3.9);
        assert_eq!(t.total, t.time_component + t.distance_component);
    }

    #[test]
    fn reward_mid_trial() {
        // -2·e^{0.5} + 6.2·e^{-0.086}, evaluated independently to 2.391641...
        let r = raw_reward(10.0, 0.43, &ScoreConstants::time_group()).unwrap();
        assert!((r.total - 2.3916415).abs() < 1e-6, "{}", r.total);
        assert!((r.time_component - (-3.2974425414)).abs() < 1e-9);
    }

    #[test]
    fn reward_rejects_bad_input() {
        let c = ScoreConstants::time_group();
        assert!(raw_reward(f64::NAN, 0.0, &c).is_err());
        assert!(raw_reward(0.0, f64::INFINITY, &c).is_err());
        assert!(raw_reward(-1.0, 0.0, &c).is_err());
    }

    #[test]
    fn score_presentation() {
        let c = ScoreConstants::time_group();
        assert_eq!(displayed_score(4.2, &c), 1260);
        assert_eq!(displayed_score(-1.0, &c), 0);
        assert_eq!(displayed_score(2.3916415, &c), 717);
        let signed = ScoreConstants { floor_at_zero: false, scale_factor: 1.0, ..c };
        assert_eq!(displayed_score(-2.5, &signed), -3);
        assert_eq!(displayed_score(2.5, &signed), 3);
        assert_eq!(displayed_score(0.5, &signed), 1);
    }

    #[test]
    fn feedback_functions() {
        let f = DecayingReward(ScoreConstants::time_group()).evaluate(0.0, 0.0).unwrap();
        assert_eq!(f.displayed_score, 1260);
        let g = DistanceOnly.evaluate(5.0, 0.437).unwrap();
        assert_eq!(g.displayed_score, 44);
    }

    #[test]
    fn empty_board_first_score_is_new_high() {
        let mut b = LeaderboardState::new(LeaderboardMode::Real, vec![]);
        let p = b.submit("P1", 500, 0.0).unwrap();
        assert_eq!(p, Placement::Ranked { rank: 1, is_new_high: true, score: 500 });
        assert_eq!(b.entries().len(), 1);
    }

    #[test]
    fn below_full_board() {
        let full: Vec<_> = (0..10).map(|i| entry(&format!("F{i}"), 900)).collect();
        let mut b = LeaderboardState::new(LeaderboardMode::Real, full);
        let before = b.clone();
        assert_eq!(b.submit("P", 100, 0.0).unwrap(), Placement::BelowBoard { score: 100 });
        assert_eq!(b, before);
        // a tie with the last entry does not displace it
        assert_eq!(b.submit("P", 900, 0.0).unwrap(), Placement::BelowBoard { score: 900 });
    }

    #[test]
    fn sorted_insert() {
        let mut b = LeaderboardState::new(LeaderboardMode::Real, vec![entry("A", 800), entry("B", 700)]);
        let p = b.submit("C", 750, 0.0).unwrap();
        assert_eq!(p, Placement::Ranked { rank: 2, is_new_high: false, score: 750 });
        let scores: Vec<_> = b.entries().iter().map(|e| e.score).collect();
        assert_eq!(scores, vec![800, 750, 700]);
    }

    #[test]
    fn ties_keep_earlier_entry_first() {
        let mut b = LeaderboardState::new(LeaderboardMode::Real, vec![entry("A", 500)]);
        let p = b.submit("B", 500, 1.0).unwrap();
        assert_eq!(p, Placement::Ranked { rank: 2, is_new_high: false, score: 500 });
        assert_eq!(b.entries()[0].participant_id, "A");
    }

    #[test]
    fn fake_board_reverts() {
        let seed = vec![entry("X", 300), entry("Y", 200)];
        let mut b = LeaderboardState::new(LeaderboardMode::Fake, seed.clone());
        b.submit("P1", 999, 0.0).unwrap();
        b.submit("P1", 250, 0.0).unwrap();
        assert_eq!(b.entries().len(), 4);
        assert_eq!(b.persistable(), seed.as_slice());
        b.reset_for_participant().unwrap();
        assert_eq!(b.entries(), seed.as_slice());
        b.reset_for_participant().unwrap();
        assert_eq!(b.entries(), seed.as_slice());
    }

    #[test]
    fn real_board_cannot_reset() {
        let mut b = LeaderboardState::new(LeaderboardMode::Real, vec![]);
        assert_eq!(b.reset_for_participant(), Err(ScoringError::ResetRealBoard));
    }

    #[test]
    fn practice_never_mutates() {
        let mut b = LeaderboardState::new(LeaderboardMode::Practice, vec![entry("A", 800), entry("B", 700)]);
        let before = b.clone();
        assert_eq!(
            b.submit("P", 750, 0.0).unwrap(),
            Placement::Practice { provisional_rank: Some(2), score: 750 }
        );
        assert_eq!(b, before);
    }

    #[test]
    fn negative_scores_rejected() {
        let mut b = LeaderboardState::new(LeaderboardMode::Real, vec![]);
        assert!(b.submit("P", -1, 0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn board_stays_sorted_and_bounded(
                seed in proptest::collection::vec(0i64..2000, 0..15),
                subs in proptest::collection::vec(0i64..2000, 0..40),
            ) {
                let entries = seed.iter().enumerate().map(|(i, &s)| entry(&format!("S{i}"), s)).collect();
                let mut b = LeaderboardState::new(LeaderboardMode::Real, entries);
                for (i, s) in subs.iter().enumerate() {
                    let min_before = b.entries().last().map(|e| e.score);
                    let full = b.entries().len() == BOARD_SIZE;
                    let p = b.submit(&format!("P{i}"), *s, i as f64).unwrap();
                    prop_assert!(b.entries().len() <= BOARD_SIZE);
                    prop_assert!(b.entries().windows(2).all(|w| w[0].score >= w[1].score));
                    if let Placement::BelowBoard { .. } = p {
                        prop_assert!(full && *s <= min_before.unwrap());
                    }
                }
            }

            #[test]
            fn displayed_score_is_monotone(a in -10.0..10.0f64, b in -10.0..10.0f64) {
                let c = ScoreConstants::time_group();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(displayed_score(lo, &c) <= displayed_score(hi, &c));
            }
        }
    }
}
