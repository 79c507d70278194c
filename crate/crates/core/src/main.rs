use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dpmon::harness::report::{panel_csv, results_csv, summary_csv, sweep_csv, write_file};
use dpmon::harness::{build_scenario, run_experiment, sweep_n, MonitorConfig, ScenarioSpec};
use dpmon::panel::{laplace_scale_panel, panel_run};
use dpmon::threshold::{
    cached_quantile, quantile, CacheStatus, ThresholdRequest, DEFAULT_GRID, DEFAULT_REPS, DEFAULT_SEED,
};
use dpmon::{Error, Result};

#[derive(Parser)]
#[command(name = "dpmon", version, about = "Monitor an evolving randomized algorithm for privacy violations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the detection threshold q(alpha) by Monte Carlo.
    Threshold {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Threshold cache file.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run replications of one scenario and write per-step results.
    Run {
        /// Built-in scenario id (a..h).
        #[arg(long, required_unless_present = "scenario_file")]
        scenario: Option<String>,
        /// JSON scenario definition, used instead of a built-in id.
        #[arg(long, conflicts_with = "scenario")]
        scenario_file: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Results CSV (one row per replication and time point).
        #[arg(long)]
        out: PathBuf,
        /// Summary CSV; defaults to `<out>` with a `.summary.csv` suffix.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Panel of half-line events on the sum mechanism (scale 1 -> 0.9).
    Panel {
        #[arg(long, default_value = "laplace-scale")]
        scenario_base: String,
        #[arg(long, default_value = "-1,-0.5,0,0.5", allow_hyphen_values = true)]
        events: String,
        #[arg(long, default_value_t = 0.05)]
        global_alpha: f64,
        #[arg(long)]
        shared_batches: bool,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeat a scenario for several batch sizes.
    SweepN {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "200,500,1000,2000")]
        n_list: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a built-in scenario as JSON (a starting point for override files).
    Scenario {
        #[arg(long)]
        scenario: String,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 750)]
    n: usize,
    #[arg(long = "t-horizon", default_value_t = 100)]
    horizon: usize,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Level; ignored by `panel`, which uses --global-alpha.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    q_grid: usize,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    q_reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    q_seed: u64,
    /// Threshold cache file.
    #[arg(long, default_value = "thresholds.txt")]
    cache: PathBuf,
}

impl Common {
    fn threshold(&self, alpha: f64) -> Result<f64> {
        let req = ThresholdRequest {
            alpha,
            beta: self.beta,
            grid: self.q_grid,
            reps: self.q_reps,
            seed: self.q_seed,
        };
        lookup(&req, Some(&self.cache))
    }

    fn monitor(&self, alpha: f64) -> Result<MonitorConfig> {
        let q = self.threshold(alpha)?;
        Ok(MonitorConfig::new(self.n, self.horizon, alpha, self.beta, q))
    }
}

fn lookup(req: &ThresholdRequest, cache: Option<&Path>) -> Result<f64> {
    let Some(path) = cache else {
        return quantile(req);
    };
    let (q, status) = cached_quantile(req, path)?;
    if let CacheStatus::Rebuilt(problem) = status {
        eprintln!("warning: threshold cache rebuilt: {problem}");
    }
    Ok(q)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("cannot parse {what} entry {s:?}"))))
        .collect()
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Threshold { alpha, beta, grid, reps, seed, cache } => {
            let req = ThresholdRequest { alpha, beta, grid, reps, seed };
            println!("{}", dpmon::fmt::sig(lookup(&req, cache.as_deref())?, 17));
        }
        Command::Run { scenario, scenario_file, common, out, summary } => {
            let spec = match (scenario, scenario_file) {
                (_, Some(path)) => ScenarioSpec::from_json_file(&path)?,
                (Some(id), None) => build_scenario(&id)?,
                (None, None) => return Err(Error::Config("no scenario given".into())),
            };
            let cfg = common.monitor(common.alpha)?;
            let result = run_experiment(&spec, common.reps, &cfg, common.seed)?;
            write_file(&out, &results_csv(&result, cfg.q))?;
            let summary = summary.unwrap_or_else(|| summary_path(&out));
            write_file(&summary, &summary_csv(&[&result]))?;
        }
        Command::Panel { scenario_base, events, global_alpha, shared_batches, common, out } => {
            if scenario_base != "laplace-scale" {
                return Err(Error::Config(format!(
                    "unknown panel base {scenario_base:?} (expected laplace-scale)"
                )));
            }
            let thresholds: Vec<f64> = parse_list(&events, "event")?;
            let (config, schedule) = laplace_scale_panel(&thresholds, global_alpha, shared_batches, 50)?;
            let cfg = common.monitor(config.per_member_alpha())?;
            let result = panel_run(&config, &schedule, &cfg, common.reps, common.seed)?;
            write_file(&out, &panel_csv(&result))?;
        }
        Command::SweepN { scenario, n_list, common, out } => {
            let spec = build_scenario(&scenario)?;
            let ns: Vec<usize> = parse_list(&n_list, "n")?;
            let cfg = common.monitor(common.alpha)?;
            let entries = sweep_n(&spec, &ns, common.reps, &cfg, common.seed)?;
            write_file(&out, &sweep_csv(&entries, common.beta))?;
        }
        Command::Scenario { scenario } => {
            println!("{}", build_scenario(&scenario)?.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
