mod common;

use std::fs;
use std::path::Path;

use navloop_core::agents::{run_session, Agent, AgentPolicy};
use navloop_core::demo;
use navloop_core::engine::{ParticipantInfo, Session, SessionConfig, DEFAULT_DT};
use navloop_core::surveys::builtin_surveys;
use navloop_core::model::{EnvironmentSettings, LocomotionSettings, ScenarioSettings};
use navloop_core::persistence::{
    find_archives, parse_settings, persist_session, read_archive, write_archive, PersistError,
};

fn archived(root: &Path) -> std::path::PathBuf {
    let (env, loco, scen) = common::small(&[2, 1]);
    let mut config = SessionConfig::new("s1", env, loco, scen, ParticipantInfo::with_id("arch"));
    config.surveys = builtin_surveys();
    let mut session = Session::start(config).unwrap().0;
    session.add_note("felt dizzy\tafter trial 1");
    let mut agent = Agent::new(AgentPolicy { observe_ticks: 100, ..AgentPolicy::default() }, 2);
    run_session(&mut session, &mut agent, DEFAULT_DT, None).unwrap();
    persist_session(&session, root, None).unwrap()
}

#[test]
fn layout_and_reread() {
    let root = tempfile::tempdir().unwrap();
    let dir = archived(root.path());
    assert_eq!(dir, root.path().join("arch").join("s1"));
    for f in [
        "settings/environment.json",
        "settings/locomotion.json",
        "settings/scenario.json",
        "trials/trial_1.csv",
        "trials/trial_2.csv",
        "trials/trial_3.csv",
        "results.csv",
        "session.json",
        "notes.txt",
        "surveys.json",
    ] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    assert!(!dir.join("trials/trial_4.csv").exists());
    let a = read_archive(&dir).unwrap();
    assert_eq!(a.results.len(), 3);
    assert_eq!(a.meta.notes[0].text, "felt dizzy\tafter trial 1");
    assert_eq!(find_archives(root.path()).unwrap(), vec![dir.clone()]);
    // the same archive cannot be written twice
    assert!(matches!(write_archive(&a, root.path()), Err(PersistError::Collision(_))));
}

#[test]
fn missing_artifacts_are_named() {
    for (file, artifact) in [
        ("notes.txt", "notes"),
        ("results.csv", "results"),
        ("session.json", "session"),
        ("trials/trial_2.csv", "movement log"),
        ("settings/scenario.json", "scenario"),
    ] {
        let root = tempfile::tempdir().unwrap();
        let dir = archived(root.path());
        fs::remove_file(dir.join(file)).unwrap();
        match read_archive(&dir) {
            Err(PersistError::Missing { artifact: a, .. }) => assert_eq!(a, artifact),
            other => panic!("{file}: {other:?}"),
        }
    }
}

#[test]
fn edited_notes_are_corrupt_and_extra_files_ignored() {
    let root = tempfile::tempdir().unwrap();
    let dir = archived(root.path());
    fs::write(dir.join("screenshot.png"), [0u8, 1, 2]).unwrap();
    fs::write(dir.join("trials/trial_9.csv"), "junk").unwrap();
    assert!(read_archive(&dir).is_ok());

    fs::write(dir.join("notes.txt"), "0.000000\tsomething else\n").unwrap();
    match read_archive(&dir) {
        Err(PersistError::Corrupt { artifact, .. }) => assert_eq!(artifact, "notes"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn truncated_movement_log_is_corrupt_not_missing() {
    let root = tempfile::tempdir().unwrap();
    let dir = archived(root.path());
    let path = dir.join("trials/trial_1.csv");
    let text = fs::read_to_string(&path).unwrap();
    let cut = text.len() - 5;
    fs::write(&path, &text[..cut]).unwrap();
    assert!(!matches!(read_archive(&dir), Err(PersistError::Missing { .. }) | Ok(_)));
}

#[test]
fn bundled_demo_environment() {
    let p = parse_settings::<EnvironmentSettings>(demo::ENVIRONMENT_JSON).unwrap();
    assert_eq!((p.value.room_width, p.value.room_depth, p.value.wall_height), (10.0, 10.0, 4.0));
    assert!(p.unknown_keys.is_empty());
    assert!(p.report.is_valid(), "{:?}", p.report);
}

#[test]
fn empty_and_truncated_documents() {
    let empty = parse_settings::<ScenarioSettings>("").unwrap();
    assert_eq!(empty.value, ScenarioSettings::default());
    assert!(!empty.report.is_empty());
    let loco = parse_settings::<LocomotionSettings>("  \n").unwrap();
    assert_eq!(loco.value, LocomotionSettings::default());

    let cut = &demo::SCENARIO_JSON[..demo::SCENARIO_JSON.len() / 2];
    match parse_settings::<ScenarioSettings>(cut) {
        Err(PersistError::Parse { kind, line, .. }) => {
            assert_eq!(kind, "scenario");
            assert!(line > 1);
        }
        other => panic!("{other:?}"),
    }
}
