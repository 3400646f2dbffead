//! Questionnaires given at session and block boundaries.
//!
//! Definitions are plain data; settings refer to them by id. Two are bundled:
//! the simulator sickness questionnaire (`ssq`) and the NASA task load index
//! (`nasa_tlx`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurveyError {
    #[error("survey {survey} expects {expected} answers, got {got}")]
    AnswerCount { survey: String, expected: usize, got: usize },
    #[error("answer {index} to {survey}: {value} is outside [{min}, {max}]")]
    OutOfRange { survey: String, index: usize, value: i64, min: i64, max: i64 },
    #[error("answer {index} to {survey} must be {expected}")]
    WrongKind { survey: String, index: usize, expected: &'static str },
    #[error("unknown survey id {0:?}")]
    Unknown(String),
    #[error("invalid survey definition {id}: {reason}")]
    InvalidDefinition { id: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurveyMoment {
    PreSession,
    PostBlock,
    PostSession,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum ItemKind {
    Scale {
        min: i64,
        max: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    FreeText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyItem {
    pub prompt: String,
    #[serde(flatten)]
    pub kind: ItemKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyDefinition {
    pub id: String,
    pub title: String,
    pub items: Vec<SurveyItem>,
    /// Boundaries at which the survey is given. A list, because the sickness
    /// questionnaire is taken both before and after the session.
    pub administer_at: Vec<SurveyMoment>,
}

impl SurveyDefinition {
    pub fn validate(&self) -> Result<(), SurveyError> {
        let bad = |reason: String| SurveyError::InvalidDefinition { id: self.id.clone(), reason };
        if self.items.is_empty() {
            return Err(bad("no items".into()));
        }
        for (i, item) in self.items.iter().enumerate() {
            if let ItemKind::Scale { min, max, labels } = &item.kind {
                if min >= max {
                    return Err(bad(format!("item {i}: min {min} must be below max {max}")));
                }
                if let Some(labels) = labels {
                    let span = (max - min + 1) as usize;
                    if labels.len() != span {
                        return Err(bad(format!(
                            "item {i}: {} labels for a {span}-point scale",
                            labels.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_given_at(&self, moment: SurveyMoment) -> bool {
        self.administer_at.contains(&moment)
    }

    /// Lowest and highest possible total over the scaled items.
    pub fn total_range(&self) -> (i64, i64) {
        self.items.iter().fold((0, 0), |(lo, hi), item| match item.kind {
            ItemKind::Scale { min, max, .. } => (lo + min, hi + max),
            ItemKind::FreeText => (lo, hi),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Score(i64),
    Text(String),
}

/// Where in the session a response was collected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "at")]
pub enum Boundary {
    PreSession,
    PostBlock { block: usize },
    PostSession,
}

impl Boundary {
    pub fn moment(self) -> SurveyMoment {
        match self {
            Boundary::PreSession => SurveyMoment::PreSession,
            Boundary::PostBlock { .. } => SurveyMoment::PostBlock,
            Boundary::PostSession => SurveyMoment::PostSession,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyResponse {
    pub survey_id: String,
    pub participant_id: String,
    pub boundary: Boundary,
    pub answers: Vec<Answer>,
    /// Session clock, seconds.
    pub timestamp: f64,
}

impl SurveyResponse {
    /// Plain sum of the scaled answers.
    pub fn total_score(&self) -> i64 {
        self.answers
            .iter()
            .map(|a| match a {
                Answer::Score(v) => *v,
                Answer::Text(_) => 0,
            })
            .sum()
    }
}

/// Check `answers` against `def` and wrap them into a response.
pub fn record_response(
    def: &SurveyDefinition,
    participant_id: &str,
    boundary: Boundary,
    answers: Vec<Answer>,
    timestamp: f64,
) -> Result<SurveyResponse, SurveyError> {
    if answers.len() != def.items.len() {
        return Err(SurveyError::AnswerCount {
            survey: def.id.clone(),
            expected: def.items.len(),
            got: answers.len(),
        });
    }
    for (index, (item, answer)) in def.items.iter().zip(&answers).enumerate() {
        match (&item.kind, answer) {
            (ItemKind::Scale { min, max, .. }, Answer::Score(v)) => {
                if v < min || v > max {
                    return Err(SurveyError::OutOfRange {
                        survey: def.id.clone(),
                        index,
                        value: *v,
                        min: *min,
                        max: *max,
                    });
                }
            }
            (ItemKind::FreeText, Answer::Text(_)) => {}
            (ItemKind::Scale { .. }, Answer::Text(_)) => {
                return Err(SurveyError::WrongKind { survey: def.id.clone(), index, expected: "a number" })
            }
            (ItemKind::FreeText, Answer::Score(_)) => {
                return Err(SurveyError::WrongKind { survey: def.id.clone(), index, expected: "text" })
            }
        }
    }
    Ok(SurveyResponse {
        survey_id: def.id.clone(),
        participant_id: participant_id.to_string(),
        boundary,
        answers,
        timestamp,
    })
}

// The last row is rated like the others so the total spans 0 to 81.
const SSQ_SYMPTOMS: [&str; 27] = [
    "General discomfort",
    "Fatigue",
    "Boredom",
    "Drowsiness",
    "Headache",
    "Eyestrain",
    "Difficulty focusing",
    "Salivation increase/decrease",
    "Sweating",
    "Nausea",
    "Difficulty concentrating",
    "Mental depression",
    "Fullness of the head",
    "Blurred vision",
    "Dizziness with eyes open/closed",
    "Vertigo",
    "Visual flashbacks",
    "Faintness",
    "Breathing awareness",
    "Stomach awareness",
    "Loss of appetite",
    "Increase of appetite",
    "Desire to move bowels",
    "Confusion",
    "Burping",
    "Vomiting",
    "Others",
];

const TLX_DIMENSIONS: [&str; 6] = [
    "Mental demand",
    "Physical demand",
    "Temporal demand",
    "Performance",
    "Effort",
    "Frustration",
];

pub fn simulator_sickness() -> SurveyDefinition {
    let labels: Vec<String> = ["none", "slight", "moderate", "severe"].map(String::from).to_vec();
    SurveyDefinition {
        id: "ssq".into(),
        title: "Simulator sickness questionnaire".into(),
        items: SSQ_SYMPTOMS
            .iter()
            .map(|s| SurveyItem {
                prompt: (*s).to_string(),
                kind: ItemKind::Scale { min: 0, max: 3, labels: Some(labels.clone()) },
            })
            .collect(),
        administer_at: vec![SurveyMoment::PreSession, SurveyMoment::PostSession],
    }
}

/// NASA TLX on a `min..=max` scale.
pub fn nasa_tlx(min: i64, max: i64) -> SurveyDefinition {
    SurveyDefinition {
        id: "nasa_tlx".into(),
        title: "NASA task load index".into(),
        items: TLX_DIMENSIONS
            .iter()
            .map(|s| SurveyItem {
                prompt: (*s).to_string(),
                kind: ItemKind::Scale { min, max, labels: None },
            })
            .collect(),
        administer_at: vec![SurveyMoment::PostBlock],
    }
}

pub fn builtin_surveys() -> Vec<SurveyDefinition> {
    vec![simulator_sickness(), nasa_tlx(1, 7)]
}

/// Look up survey ids among `available`, in the order given.
pub fn resolve_surveys(
    ids: &[String],
    available: &[SurveyDefinition],
) -> Result<Vec<SurveyDefinition>, SurveyError> {
    ids.iter()
        .map(|id| {
            available
                .iter()
                .find(|d| &d.id == id)
                .cloned()
                .ok_or_else(|| SurveyError::Unknown(id.clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        let ssq = simulator_sickness();
        assert_eq!(ssq.items.len(), 27);
        assert_eq!(ssq.total_range(), (0, 81));
        assert!(ssq.validate().is_ok());
        let tlx = nasa_tlx(1, 7);
        assert_eq!(tlx.items.len(), 6);
        assert_eq!(tlx.total_range(), (6, 42));
    }

    #[test]
    fn scoring_and_rejections() {
        let ssq = simulator_sickness();
        let zeros = vec![Answer::Score(0); 27];
        let r = record_response(&ssq, "P1", Boundary::PreSession, zeros, 0.0).unwrap();
        assert_eq!(r.total_score(), 0);

        let tlx = nasa_tlx(1, 7);
        let sevens = vec![Answer::Score(7); 6];
        let r = record_response(&tlx, "P1", Boundary::PostBlock { block: 0 }, sevens, 1.0).unwrap();
        assert_eq!(r.total_score(), 42);

        let short = vec![Answer::Score(0); 26];
        assert!(matches!(
            record_response(&ssq, "P1", Boundary::PostSession, short, 0.0),
            Err(SurveyError::AnswerCount { expected: 27, got: 26, .. })
        ));
        let mut high = vec![Answer::Score(0); 27];
        high[4] = Answer::Score(4);
        assert!(matches!(
            record_response(&ssq, "P1", Boundary::PostSession, high, 0.0),
            Err(SurveyError::OutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn free_text_items() {
        let def = SurveyDefinition {
            id: "debrief".into(),
            title: "Debrief".into(),
            items: vec![
                SurveyItem { prompt: "Comments".into(), kind: ItemKind::FreeText },
                SurveyItem { prompt: "Comfort".into(), kind: ItemKind::Scale { min: 1, max: 5, labels: None } },
            ],
            administer_at: vec![SurveyMoment::PostSession],
        };
        let ok = vec![Answer::Text("fine".into()), Answer::Score(3)];
        assert_eq!(record_response(&def, "P", Boundary::PostSession, ok, 0.0).unwrap().total_score(), 3);
        let swapped = vec![Answer::Score(3), Answer::Text("fine".into())];
        assert!(record_response(&def, "P", Boundary::PostSession, swapped, 0.0).is_err());
    }

    #[test]
    fn definition_json_round_trip() {
        for def in builtin_surveys() {
            let json = serde_json::to_string(&def).unwrap();
            let back: SurveyDefinition = serde_json::from_str(&json).unwrap();
            assert_eq!(back, def);
        }
    }

    #[test]
    fn resolve_by_id() {
        let all = builtin_surveys();
        let got = resolve_surveys(&["nasa_tlx".into()], &all).unwrap();
        assert_eq!(got[0].id, "nasa_tlx");
        assert!(matches!(resolve_surveys(&["x".into()], &all), Err(SurveyError::Unknown(_))));
    }

    #[test]
    fn degenerate_scale_rejected() {
        let mut def = nasa_tlx(3, 3);
        assert!(def.validate().is_err());
        def.items.clear();
        assert!(def.validate().is_err());
    }
}
