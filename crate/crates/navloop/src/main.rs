use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use navloop_core::agents::{run_cohort, CohortSettings, CohortSpec};
use navloop_core::analysis::{aggregates_csv, analyze, summary_csv, timecourses_csv, AnalysisOptions, Grid};
use navloop_core::demo;
use navloop_core::engine::AutoPilotPlan;
use navloop_core::persistence::{find_archives, parse_settings, read_archive, write_archive, SettingsDocument};
use navloop_core::surveys::{builtin_surveys, resolve_surveys};
use navloop_service::{serve, EngineHost, HostConfig, ServerConfig};

#[derive(Parser)]
#[command(name = "navloop", version, about = "Goal-directed navigation experiment engine")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a cohort of simulated participants and archive their sessions.
    Simulate {
        /// Scenario settings. Environment and locomotion files are read from
        /// the same directory when present.
        #[arg(long)]
        scenario: PathBuf,
        /// Cohort description: groups, participants per group, agent policy.
        #[arg(long)]
        agents: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        environment: Option<PathBuf>,
        #[arg(long)]
        locomotion: Option<PathBuf>,
    },
    /// Aggregate archived sessions into summary tables and time courses.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0:30:0.1")]
        grid: Grid,
        #[arg(long, default_value_t = 0.5)]
        min_trial_duration: f64,
    },
    /// Host sessions for an operator console.
    Serve {
        #[arg(long)]
        settings_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        autopilot: Option<PathBuf>,
        /// Also accept WebSocket clients on this address.
        #[arg(long)]
        ws_listen: Option<String>,
        #[arg(long, default_value_t = 10.0)]
        snapshot_hz: f64,
        /// Simulated seconds per wall-clock second; 0 runs as fast as possible.
        #[arg(long, default_value_t = 1.0)]
        time_scale: f64,
        /// Let the simulated participant fill in surveys itself.
        #[arg(long)]
        auto_surveys: bool,
    },
    /// Write the bundled demo settings to a directory.
    Init {
        dir: PathBuf,
    },
}

fn load<T: SettingsDocument>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_settings::<T>(&text).with_context(|| format!("parsing {}", path.display()))?;
    for key in &parsed.unknown_keys {
        log::warn!("{}: unknown key {key}", path.display());
    }
    Ok(parsed.value)
}

/// `explicit`, else `name` next to `beside`, else the bundled default.
fn load_or<T: SettingsDocument>(explicit: Option<&Path>, beside: &Path, name: &str, fallback: fn() -> T) -> Result<T> {
    if let Some(p) = explicit {
        return load(p);
    }
    let sibling = beside.parent().unwrap_or(Path::new(".")).join(name);
    if sibling.exists() {
        load(&sibling)
    } else {
        log::info!("{} not found, using bundled {name}", sibling.display());
        Ok(fallback())
    }
}

fn simulate(
    scenario: &Path,
    agents: &Path,
    out: &Path,
    seed: u64,
    environment: Option<&Path>,
    locomotion: Option<&Path>,
) -> Result<()> {
    let scen = load(scenario)?;
    let env = load_or(environment, scenario, "environment.json", demo::environment)?;
    let loco = load_or(locomotion, scenario, "locomotion.json", demo::locomotion)?;
    let spec: CohortSpec = serde_json::from_str(
        &fs::read_to_string(agents).with_context(|| format!("reading {}", agents.display()))?,
    )
    .with_context(|| format!("parsing {}", agents.display()))?;

    let mut settings = CohortSettings::new(env, loco, scen);
    settings.surveys = resolve_surveys(&settings.environment.survey_links, &builtin_surveys())?;
    let started = Instant::now();
    let archives = run_cohort(&spec, &settings, seed)?;
    fs::create_dir_all(out)?;
    let mut trials = 0;
    for a in &archives {
        write_archive(a, out)?;
        trials += a.results.len();
    }
    println!(
        "{} sessions, {trials} trials in {:.1} s -> {}",
        archives.len(),
        started.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}

fn run_analysis(input: &Path, out: &Path, grid: Grid, min_trial_duration: f64) -> Result<()> {
    let mut archives = Vec::new();
    for dir in find_archives(input)? {
        archives.push(read_archive(&dir).with_context(|| format!("reading {}", dir.display()))?);
    }
    if archives.is_empty() {
        bail!("no session archives under {}", input.display());
    }
    let result = analyze(&archives, &AnalysisOptions { min_trial_duration, grid });
    fs::create_dir_all(out)?;
    fs::write(out.join("summary.csv"), summary_csv(&result.summary))?;
    fs::write(out.join("aggregates.csv"), aggregates_csv(&result.aggregates))?;
    fs::write(out.join("timecourses.csv"), timecourses_csv(&result))?;
    println!("{} sessions, {} trials -> {}", archives.len(), result.aggregates.len(), out.display());
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Cmd::Simulate { scenario, agents, out, seed, environment, locomotion } => {
            simulate(&scenario, &agents, &out, seed, environment.as_deref(), locomotion.as_deref())
        }
        Cmd::Analyze { input, out, grid, min_trial_duration } => run_analysis(&input, &out, grid, min_trial_duration),
        Cmd::Serve { settings_dir, listen, out, autopilot, ws_listen, snapshot_hz, time_scale, auto_surveys } => {
            let mut config = HostConfig::new(settings_dir, &out);
            config.auto_surveys = auto_surveys;
            if let Some(path) = autopilot {
                let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let plan: AutoPilotPlan =
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                config.autopilot = Some(plan);
            }
            fs::create_dir_all(&out)?;
            let service = serve(EngineHost::new(config), ServerConfig { listen, ws_listen, snapshot_hz, time_scale })?;
            log::info!("listening on {}", service.addr);
            if let Some(ws) = service.ws_addr {
                log::info!("websocket on {ws}");
            }
            service.wait();
            Ok(())
        }
        Cmd::Init { dir } => {
            fs::create_dir_all(&dir)?;
            for (name, text) in demo::files() {
                let path = dir.join(name);
                if path.exists() {
                    bail!("{} already exists", path.display());
                }
                fs::write(&path, text)?;
            }
            println!("demo settings written to {}", dir.display());
            Ok(())
        }
    }
}
