//! Descriptive analysis over session archives.
//!
//! Trials are first flagged (skipped, ended accidentally, from a bad session),
//! then each dependent measure gets its own 3-SD outlier screen per
//! participant and block. Summaries pool the surviving trials per group and
//! block. Time courses resample the residual distance onto a fixed grid.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{EndReason, FrameLogEntry};
use crate::model::{horizontal_distance, Vec3};
use crate::persistence::SessionArchive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExclusionReason {
    Skipped,
    AccidentalEnd,
    Outlier,
    BadSession,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Time,
    Distance,
    Score,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Time, Measure::Distance, Measure::Score];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialAggregate {
    pub participant_id: String,
    pub group: String,
    pub block_index: usize,
    pub trial_index: usize,
    pub t: f64,
    pub d: f64,
    pub score: i64,
    pub end_reason: EndReason,
    /// Whole-trial exclusion.
    pub excluded: Option<ExclusionReason>,
    /// Outlier flags per measure, indexed like [`Measure::ALL`].
    pub outlier: [bool; 3],
}

impl TrialAggregate {
    pub fn value(&self, m: Measure) -> f64 {
        match m {
            Measure::Time => self.t,
            Measure::Distance => self.d,
            Measure::Score => self.score as f64,
        }
    }

    /// Whether this trial contributes to measure `m`.
    pub fn counts_for(&self, m: Measure) -> bool {
        self.excluded.is_none() && !self.outlier[m.index()]
    }

    /// The reason to report for this row, outliers included.
    pub fn reason(&self) -> Option<ExclusionReason> {
        self.excluded.or_else(|| self.outlier.iter().any(|&o| o).then_some(ExclusionReason::Outlier))
    }
}

/// Sample mean and standard deviation (n − 1). `sd` is `None` below two values.
pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (Some(mean), Some((ss / (n - 1.0)).sqrt()))
}

/// Indices of `values` within three sample standard deviations of their mean,
/// and the indices outside. Fewer than two values pass through untouched.
pub fn remove_outliers(values: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let (kept, removed): (Vec<usize>, Vec<usize>) = match mean_sd(values) {
        (Some(mean), Some(sd)) => (0..values.len()).partition(|&i| (values[i] - mean).abs() <= 3.0 * sd),
        _ => ((0..values.len()).collect(), Vec::new()),
    };
    (kept, removed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Trials ended by key faster than this are accidental, seconds.
    pub min_trial_duration: f64,
    pub grid: Grid,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { min_trial_duration: 0.5, grid: Grid::default() }
    }
}

/// Flatten archives into one row per trial with whole-trial exclusions set.
pub fn aggregate(archives: &[SessionArchive], opts: &AnalysisOptions) -> Vec<TrialAggregate> {
    let mut rows = Vec::new();
    for a in archives {
        for r in &a.results {
            let excluded = if a.meta.bad_session {
                Some(ExclusionReason::BadSession)
            } else if r.end_reason == EndReason::Skipped {
                Some(ExclusionReason::Skipped)
            } else if r.end_reason == EndReason::EndKey && r.t < opts.min_trial_duration {
                Some(ExclusionReason::AccidentalEnd)
            } else {
                None
            };
            rows.push(TrialAggregate {
                participant_id: a.meta.participant.id.clone(),
                group: a.meta.participant.group.clone(),
                block_index: r.block,
                trial_index: r.trial,
                t: r.t,
                d: r.d,
                score: r.displayed_score,
                end_reason: r.end_reason,
                excluded,
                outlier: [false; 3],
            });
        }
    }
    rows
}

/// Flag 3-SD outliers per participant and block, each measure on its own.
pub fn flag_outliers(rows: &mut [TrialAggregate]) {
    let mut cells: BTreeMap<(String, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if r.excluded.is_none() {
            cells.entry((r.participant_id.clone(), r.block_index)).or_default().push(i);
        }
    }
    for idx in cells.values() {
        for m in Measure::ALL {
            let values: Vec<f64> = idx.iter().map(|&i| rows[i].value(m)).collect();
            let (_, removed) = remove_outliers(&values);
            for k in removed {
                rows[idx[k]].outlier[m.index()] = true;
            }
        }
    }
}

/// Share of otherwise included trials flagged as an outlier on any measure.
pub fn outlier_fraction(rows: &[TrialAggregate]) -> f64 {
    let included: Vec<_> = rows.iter().filter(|r| r.excluded.is_none()).collect();
    if included.is_empty() {
        return 0.0;
    }
    let flagged = included.iter().filter(|r| r.outlier.iter().any(|&o| o)).count();
    flagged as f64 / included.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub block_index: usize,
    /// Indexed like [`Measure::ALL`].
    pub stats: [Stat; 3],
}

impl SummaryRow {
    pub fn stat(&self, m: Measure) -> Stat {
        self.stats[m.index()]
    }
}

/// Mean and SD of every measure per group and block over counted trials.
pub fn block_group_summary(rows: &[TrialAggregate]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(String, usize), Vec<&TrialAggregate>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.group.clone(), r.block_index)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((group, block_index), members)| {
            let stats = Measure::ALL.map(|m| {
                let values: Vec<f64> =
                    members.iter().filter(|r| r.counts_for(m)).map(|r| r.value(m)).collect();
                let (mean, sd) = mean_sd(&values);
                Stat { n: values.len(), mean, sd }
            });
            SummaryRow { group, block_index, stats }
        })
        .collect()
}

/// Uniform time grid `start, start + step, ..., end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { start: 0.0, end: 30.0, step: 0.1 }
    }
}

impl Grid {
    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    /// `start:end:step`, e.g. `0:30:0.1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, step] = parts[..] else {
            return Err(format!("expected start:end:step, got {s:?}"));
        };
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let g = Grid { start: num(start)?, end: num(end)?, step: num(step)? };
        if !(g.step > 0.0) || !(g.end >= g.start) || !g.start.is_finite() || !g.end.is_finite() {
            return Err(format!("grid {s:?} needs step > 0 and end >= start"));
        }
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeCourse {
    pub participant_id: String,
    pub group: String,
    pub block_index: usize,
    pub trial_index: usize,
    pub samples: Vec<f64>,
}

/// Residual distance to `goal` on each grid point, holding the most recent
/// frame's value. Points before the first frame take the first value, points
/// after the last frame take the last.
pub fn time_course(frames: &[FrameLogEntry], goal: Vec3, grid: &Grid) -> Vec<f64> {
    assert!(!frames.is_empty(), "time course of a trial without frames");
    let d = |f: &FrameLogEntry| horizontal_distance(Vec3::floor(f.x, f.z), goal);
    let mut k = 0;
    grid.points()
        .into_iter()
        .map(|g| {
            while k + 1 < frames.len() && frames[k + 1].t <= g + 1e-9 {
                k += 1;
            }
            d(&frames[k])
        })
        .collect()
}

/// Pointwise mean of equally long curves.
pub fn pointwise_mean<'a>(curves: impl IntoIterator<Item = &'a [f64]>) -> Option<Vec<f64>> {
    let mut acc: Option<Vec<f64>> = None;
    let mut n = 0usize;
    for c in curves {
        match acc.as_mut() {
            None => acc = Some(c.to_vec()),
            Some(a) => {
                assert_eq!(a.len(), c.len(), "curves on different grids");
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
            }
        }
        n += 1;
    }
    acc.map(|a| a.into_iter().map(|x| x / n as f64).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurves {
    /// (participant, group, curve)
    pub participants: Vec<(String, String, Vec<f64>)>,
    /// (group, curve), averaged over participant curves.
    pub groups: Vec<(String, Vec<f64>)>,
}

/// Average per participant first, then average participant curves per group.
pub fn mean_curves(courses: &[TimeCourse]) -> MeanCurves {
    let mut by_participant: BTreeMap<(String, String), Vec<&[f64]>> = BTreeMap::new();
    for c in courses {
        by_participant
            .entry((c.group.clone(), c.participant_id.clone()))
            .or_default()
            .push(&c.samples);
    }
    let participants: Vec<(String, String, Vec<f64>)> = by_participant
        .into_iter()
        .filter_map(|((group, pid), curves)| pointwise_mean(curves).map(|m| (pid, group, m)))
        .collect();
    let mut by_group: BTreeMap<String, Vec<&[f64]>> = BTreeMap::new();
    for (_, group, curve) in &participants {
        by_group.entry(group.clone()).or_default().push(curve);
    }
    let groups = by_group
        .into_iter()
        .filter_map(|(g, curves)| pointwise_mean(curves).map(|m| (g, m)))
        .collect();
    MeanCurves { participants, groups }
}

/// Time courses of every trial not excluded as a whole.
pub fn trial_courses(archives: &[SessionArchive], rows: &[TrialAggregate], grid: &Grid) -> Vec<TimeCourse> {
    let mut out = Vec::new();
    let mut row = rows.iter();
    for a in archives {
        let goal = a.scenario.goal_position;
        for (result, frames) in a.results.iter().zip(&a.movement_logs) {
            let agg = row.next().expect("one aggregate per trial");
            debug_assert_eq!((agg.block_index, agg.trial_index), (result.block, result.trial));
            if agg.excluded.is_some() || frames.is_empty() {
                continue;
            }
            out.push(TimeCourse {
                participant_id: a.meta.participant.id.clone(),
                group: a.meta.participant.group.clone(),
                block_index: result.block,
                trial_index: result.trial,
                samples: time_course(frames, goal, grid),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub aggregates: Vec<TrialAggregate>,
    pub summary: Vec<SummaryRow>,
    pub courses: Vec<TimeCourse>,
    pub means: MeanCurves,
    pub grid: Grid,
}

pub fn analyze(archives: &[SessionArchive], opts: &AnalysisOptions) -> Analysis {
    let mut aggregates = aggregate(archives, opts);
    flag_outliers(&mut aggregates);
    let summary = block_group_summary(&aggregates);
    let courses = trial_courses(archives, &aggregates, &opts.grid);
    let means = mean_curves(&courses);
    Analysis { aggregates, summary, courses, means, grid: opts.grid }
}

// ---------------------------------------------------------------- tables

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(&r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    table(
        &[
            "group", "block", "n_t", "t_mean", "t_sd", "n_d", "d_mean", "d_sd", "n_score", "score_mean",
            "score_sd",
        ],
        rows.iter().map(|r| {
            let mut v = vec![r.group.clone(), r.block_index.to_string()];
            for s in r.stats {
                v.extend([s.n.to_string(), opt(s.mean), opt(s.sd)]);
            }
            v
        }),
    )
}

pub fn aggregates_csv(rows: &[TrialAggregate]) -> String {
    let b = |x: bool| if x { "1" } else { "0" }.to_string();
    table(
        &[
            "participant", "group", "block", "trial", "t", "d", "score", "end_reason", "excluded",
            "outlier_t", "outlier_d", "outlier_score",
        ],
        rows.iter().map(|r| {
            vec![
                r.participant_id.clone(),
                r.group.clone(),
                r.block_index.to_string(),
                r.trial_index.to_string(),
                format!("{:.6}", r.t),
                format!("{:.6}", r.d),
                r.score.to_string(),
                r.end_reason.to_string(),
                r.excluded.map(|e| e.to_string()).unwrap_or_default(),
                b(r.outlier[0]),
                b(r.outlier[1]),
                b(r.outlier[2]),
            ]
        }),
    )
}

/// Long format: one row per curve and grid point. `kind` is `trial`,
/// `participant_mean` or `group_mean`; columns that do not apply are empty.
pub fn timecourses_csv(analysis: &Analysis) -> String {
    let points = analysis.grid.points();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut emit = |kind: &str, group: &str, pid: &str, block: String, trial: String, samples: &[f64]| {
        for (t, d) in points.iter().zip(samples) {
            rows.push(vec![
                kind.to_string(),
                group.to_string(),
                pid.to_string(),
                block.clone(),
                trial.clone(),
                format!("{t:.6}"),
                format!("{d:.6}"),
            ]);
        }
    };
    for c in &analysis.courses {
        emit("trial", &c.group, &c.participant_id, c.block_index.to_string(), c.trial_index.to_string(), &c.samples);
    }
    for (pid, group, curve) in &analysis.means.participants {
        emit("participant_mean", group, pid, String::new(), String::new(), curve);
    }
    for (group, curve) in &analysis.means.groups {
        emit("group_mean", group, "", String::new(), String::new(), curve);
    }
    table(&["kind", "group", "participant", "block", "trial", "t", "d"], rows.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_point_removed() {
        let mut v = vec![1.0; 10];
        v.push(100.0);
        let (mean, sd) = mean_sd(&v);
        assert!((mean.unwrap() - 10.0).abs() < 1e-12);
        assert!((sd.unwrap() - 29.85).abs() < 0.01);
        let (kept, removed) = remove_outliers(&v);
        assert_eq!(removed, [10]);
        assert_eq!(kept.len(), 10);
    }

    #[test]
    fn constant_values_kept() {
        let (_, removed) = remove_outliers(&[2.0; 6]);
        assert!(removed.is_empty());
        let (kept, removed) = remove_outliers(&[5.0]);
        assert_eq!((kept, removed), (vec![0], vec![]));
    }

    #[test]
    fn sd_absent_for_single_value() {
        assert_eq!(mean_sd(&[3.0]), (Some(3.0), None));
        assert_eq!(mean_sd(&[]), (None, None));
    }

    #[test]
    fn grid_parse_and_points() {
        let g: Grid = "0:30:0.1".parse().unwrap();
        assert_eq!(g.len(), 301);
        let p = g.points();
        assert_eq!(p[0], 0.0);
        assert!((p[300] - 30.0).abs() < 1e-9);
        assert!("0:30".parse::<Grid>().is_err());
        assert!("0:30:0".parse::<Grid>().is_err());
        assert!("5:1:1".parse::<Grid>().is_err());
    }

    fn fe(t: f64, x: f64) -> FrameLogEntry {
        FrameLogEntry { t, x, z: 0.0, yaw: 0.0, lights_on: true, sound_on: true }
    }

    #[test]
    fn hold_and_extend() {
        let frames = [fe(1.0, 3.0), fe(2.0, 2.0), fe(10.0, 0.5)];
        let grid = Grid { start: 0.0, end: 30.0, step: 1.0 };
        let c = time_course(&frames, Vec3::ZERO, &grid);
        assert_eq!(c.len(), 31);
        assert_eq!(&c[..4], &[3.0, 3.0, 2.0, 2.0]);
        assert_eq!(c[9], 2.0);
        assert!(c[10..].iter().all(|&v| v == 0.5));
    }

    #[test]
    fn means_are_linear() {
        let c = vec![1.0, 2.0, 3.0];
        let c2: Vec<f64> = c.iter().map(|x| 2.0 * x).collect();
        assert_eq!(pointwise_mean([c.as_slice(), c.as_slice()]).unwrap(), c);
        assert_eq!(pointwise_mean([c.as_slice(), c2.as_slice()]).unwrap(), vec![1.5, 3.0, 4.5]);
    }

    #[test]
    fn participant_then_group() {
        let tc = |pid: &str, g: &str, v: f64| TimeCourse {
            participant_id: pid.into(),
            group: g.into(),
            block_index: 0,
            trial_index: 0,
            samples: vec![v, v],
        };
        // A has three trials at 0, B one at 4: group mean is (0 + 4) / 2, not 1
        let courses = [tc("A", "g", 0.0), tc("A", "g", 0.0), tc("A", "g", 0.0), tc("B", "g", 4.0)];
        let m = mean_curves(&courses);
        assert_eq!(m.participants.len(), 2);
        assert_eq!(m.groups, vec![("g".to_string(), vec![2.0, 2.0])]);
    }
}
