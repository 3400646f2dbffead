mod common;

use navloop_core::analysis::{analyze, mean_curves, AnalysisOptions, ExclusionReason, Grid, Measure, TimeCourse};
use navloop_core::engine::{EndReason, DEFAULT_DT};
use navloop_core::persistence::{SessionArchive, TrialResultRow};

fn row(trial: usize, t: f64, reason: EndReason) -> TrialResultRow {
    TrialResultRow {
        block: 0,
        trial,
        start_time: 0.0,
        end_time: t,
        t,
        d: 1.0,
        path_length: 0.0,
        time_component: 0.0,
        distance_component: 0.0,
        reward: 0.0,
        displayed_score: 100,
        end_reason: reason,
        practice: false,
    }
}

fn archive(id: &str, group: &str, bad: bool, rows: Vec<TrialResultRow>) -> SessionArchive {
    let settings = common::small(&[rows.len() as u32]);
    let session = common::start(&settings, id);
    let mut a = SessionArchive::from_session(&session);
    a.meta.participant.group = group.into();
    a.meta.bad_session = bad;
    a.movement_logs = rows
        .iter()
        .map(|r| {
            let n = (r.t / DEFAULT_DT).round() as usize;
            (1..=n.max(1))
                .map(|k| navloop_core::engine::FrameLogEntry {
                    t: k as f64 * DEFAULT_DT,
                    x: 4.5,
                    z: 4.5,
                    yaw: 225.0,
                    lights_on: true,
                    sound_on: true,
                })
                .collect()
        })
        .collect();
    a.results = rows;
    a
}

#[test]
fn exclusions_take_precedence_in_order() {
    let good = archive(
        "a",
        "time",
        false,
        vec![
            row(0, 5.0, EndReason::EndKey),
            row(1, 0.2, EndReason::EndKey),
            row(2, 0.2, EndReason::Skipped),
            row(3, 0.2, EndReason::Timeout),
            row(4, 0.5, EndReason::EndKey),
        ],
    );
    let bad = archive("b", "time", true, vec![row(0, 0.2, EndReason::Skipped)]);
    let result = analyze(&[good, bad], &AnalysisOptions::default());
    let reasons: Vec<_> = result.aggregates.iter().map(|r| r.excluded).collect();
    assert_eq!(
        reasons,
        vec![
            None,
            Some(ExclusionReason::AccidentalEnd),
            Some(ExclusionReason::Skipped),
            None,
            None,
            Some(ExclusionReason::BadSession),
        ]
    );
    let s = &result.summary[0];
    assert_eq!(s.stat(Measure::Time).n, 3);
    assert!((s.stat(Measure::Time).mean.unwrap() - 5.7 / 3.0).abs() < 1e-12);
}

#[test]
fn stationary_participants_give_flat_group_curves() {
    let a = archive("a", "time", false, vec![row(0, 2.0, EndReason::EndKey), row(1, 3.0, EndReason::EndKey)]);
    let b = archive("b", "accuracy", false, vec![row(0, 1.0, EndReason::EndKey)]);
    let grid: Grid = "0:30:0.5".parse().unwrap();
    let result = analyze(&[a, b], &AnalysisOptions { grid, ..AnalysisOptions::default() });
    assert_eq!(result.courses.len(), 3);
    assert_eq!(result.means.groups.len(), 2);
    for (_, curve) in &result.means.groups {
        assert_eq!(curve.len(), 61);
        assert!(curve.iter().all(|d| (d - 9.300537618869138).abs() < 1e-9));
    }
}

#[test]
fn participant_means_come_before_group_means() {
    let course = |pid: &str, v: f64| TimeCourse {
        participant_id: pid.into(),
        group: "g".into(),
        block_index: 0,
        trial_index: 0,
        samples: vec![v; 4],
    };
    // p1 has three trials at 1, p2 one at 4: trial pooling would give 1.75
    let m = mean_curves(&[course("p1", 1.0), course("p1", 1.0), course("p1", 1.0), course("p2", 4.0)]);
    assert_eq!(m.groups[0].1, vec![2.5; 4]);
    assert_eq!(m.participants.len(), 2);
}
