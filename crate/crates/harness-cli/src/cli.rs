//! The `crashsieve` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use policy_forge::store::load_manifest;
use policy_forge::PoolConfig;

use crate::analyze::{analyze, discover_campaigns};
use crate::campaign::{campaign_dir, run_campaign, CampaignMeta};
use crate::classify::classify_campaign;
use crate::config::CampaignConfig;
use crate::error::{HarnessError, Result};
use crate::fsutil::read_json;
use crate::policies::{self, manifest_path, tiny_pool_config, DIVERSE_SET, POOL_SET};
use crate::replay::step_table;
use crate::scenes::{resolve_scene, validate_scene};

#[derive(Debug, Parser)]
#[command(name = "crashsieve", version, about = "Scenario-based safety testing of a driving planner")]
pub struct Cli {
    /// Master seed; every other seed is derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "CRASHSIEVE_JOBS")]
    pub jobs: Option<usize>,
    /// Results directory.
    #[arg(long, global = true, env = "CRASHSIEVE_OUT", default_value = "results")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the candidate pool of background policies for a scene.
    Train(TrainArgs),
    /// Select the Diverse and LessDiverse sets from a trained pool.
    Select(SelectArgs),
    /// Run a test campaign of the planner against a policy set.
    Run(RunArgs),
    /// Classify every failure of one or more campaigns as A-P, A-G or U.
    Classify(ClassifyArgs),
    /// Write histograms, tables and feature files for classified campaigns.
    Analyze(AnalyzeArgs),
    /// Print the step table of a stored trajectory.
    Replay(ReplayArgs),
    /// Check a built-in scene, a scene file or a campaign configuration.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value = "right-turn")]
    pub scene: String,
    /// Smoke-test pool: four families, one training round.
    #[arg(long)]
    pub tiny: bool,
    #[arg(long)]
    pub families: Option<usize>,
    #[arg(long)]
    pub variants: Option<usize>,
    #[arg(long)]
    pub eval_count: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long, default_value = "right-turn")]
    pub scene: String,
    /// Pool manifest; defaults to the one written by `train`.
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.9)]
    pub min_success: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON campaign configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scene: Option<String>,
    /// Policy set written by `select`, by name.
    #[arg(long, default_value = DIVERSE_SET)]
    pub set: String,
    /// Manifest path; overrides --set.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub patterns: Option<usize>,
    #[arg(long)]
    pub step_budget: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Give each other vehicle its own set member.
    #[arg(long)]
    pub mix_policies: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Campaign directories; defaults to every campaign under --out.
    #[arg(long = "campaign")]
    pub campaigns: Vec<PathBuf>,
    /// Minimum reaction time, s.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub search_budget: Option<usize>,
    #[arg(long)]
    pub safe_samples: Option<usize>,
    #[arg(long)]
    pub threat_rollouts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "campaign")]
    pub campaigns: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub trajectory: PathBuf,
    /// Print every n-th step.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Built-in scene id, scene JSON file or campaign configuration file.
    pub target: String,
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn jobs(cli: &Cli) -> usize {
    cli.jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

pub fn execute(cli: &Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Train(a) => {
            let scene = resolve_scene(&a.scene)?;
            let mut config = if a.tiny { tiny_pool_config() } else { PoolConfig::default() };
            if let Some(n) = a.families {
                config.families = n;
            }
            if let Some(n) = a.variants {
                config.anchor_variants = n;
            }
            if let Some(n) = a.eval_count {
                config.eval_count = n;
            }
            if let Some(n) = a.iterations {
                config.train.iterations = n;
            }
            config.validate().map_err(|e| HarnessError::Invalid(e.to_string()))?;
            let (path, pool) = crate::campaign::thread_pool(jobs(cli))?.install(|| policies::train(&scene, &config, seed, &cli.out))?;
            for (p, s) in pool.policies.iter().zip(&pool.success) {
                println!("{:<28} success {s:.3}", p.id);
            }
            println!("pool diversity {:.4}; wrote {}", pool.diversity.score(), path.display());
        }
        Command::Select(a) => {
            let scene = resolve_scene(&a.scene)?;
            let pool = a.pool.clone().unwrap_or_else(|| manifest_path(&cli.out, &scene.id, POOL_SET));
            let s = policies::select(&pool, a.k, a.min_success)?;
            println!(
                "diverse      D_IP {:.4} min success {:.3} -> {}",
                s.diverse_score,
                s.diverse_min_success,
                s.diverse.display()
            );
            println!(
                "less-diverse D_IP {:.4} min success {:.3} -> {}",
                s.less_diverse_score,
                s.less_diverse_min_success,
                s.less_diverse.display()
            );
            println!("ratio {:.2}", s.diverse_score / s.less_diverse_score);
        }
        Command::Run(a) => {
            let mut config = match &a.config {
                Some(p) => read_config(p)?,
                None => CampaignConfig::default(),
            };
            if let Some(s) = &a.scene {
                config.scene = s.clone();
            }
            let scene = resolve_scene(&config.scene)?;
            if let Some(m) = &a.manifest {
                config.manifest = m.clone();
            } else if a.config.is_none() || config.manifest.as_os_str().is_empty() {
                config.manifest = manifest_path(&cli.out, &scene.id, &a.set);
            }
            if let Some(n) = a.patterns {
                config.patterns = n;
            }
            if let Some(n) = a.step_budget {
                config.step_budget = n;
            }
            if let Some(x) = a.dt {
                config.dt = x;
            }
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            config.mix_policies |= a.mix_policies;
            config.validate()?;
            if !config.manifest.is_file() {
                return Err(HarnessError::Invalid(format!(
                    "policy-set manifest {} not found; create it with `crashsieve train` and `crashsieve select`, or pass --manifest",
                    config.manifest.display()
                )));
            }
            let set_name = load_manifest(&config.manifest)?.name;
            let dir = campaign_dir(&cli.out, &scene.id, &set_name);
            let r = run_campaign(&config, &dir, jobs(cli))?;
            println!(
                "{}: {} tests ({} run, {} already recorded, {} damaged records redone), {} failures in this run",
                dir.display(),
                r.total,
                r.executed,
                r.skipped,
                r.dropped,
                r.failures
            );
        }
        Command::Classify(a) => {
            let dirs = campaigns_or_all(&a.campaigns, &cli.out)?;
            let mut failed = 0;
            for dir in &dirs {
                let mut settings = CampaignMeta::load(dir)?.config.classify;
                if let Some(x) = a.rho {
                    settings.rho = x;
                }
                if let Some(n) = a.search_budget {
                    settings.search_budget = n;
                }
                if let Some(n) = a.safe_samples {
                    settings.safe_samples = n;
                }
                if let Some(n) = a.threat_rollouts {
                    settings.threat_rollouts = n;
                }
                let r = classify_campaign(dir, &settings, jobs(cli))?;
                println!(
                    "{}: {} failures ({} classified, {} kept, {} errors)",
                    dir.display(),
                    r.failures,
                    r.classified,
                    r.skipped,
                    r.errors.len()
                );
                failed += r.errors.len();
            }
            if failed > 0 {
                return Err(HarnessError::Runtime(format!(
                    "{failed} cases could not be classified; see classify_errors.jsonl"
                )));
            }
        }
        Command::Analyze(a) => {
            let dirs = campaigns_or_all(&a.campaigns, &cli.out)?;
            let out = cli.out.join("analysis");
            let r = analyze(&dirs, &out)?;
            for ((scene, set), c) in &r.ttc {
                println!(
                    "{scene}/{set}: {} runs, {} collisions, {} near-misses",
                    c.runs, c.collisions, c.near_misses
                );
            }
            for t in &r.projection_skipped {
                println!("{t}: fewer than two vehicle collisions, projection skipped");
            }
            println!("wrote {} files under {}", r.written.len(), out.display());
        }
        Command::Replay(a) => print!("{}", step_table(&a.trajectory, a.every)?),
        Command::Validate(a) => {
            validate_target(&a.target, seed)?;
            println!("{}: ok", a.target);
        }
    }
    Ok(())
}

fn read_config(path: &Path) -> Result<CampaignConfig> {
    if !path.is_file() {
        return Err(HarnessError::Invalid(format!("configuration {} not found", path.display())));
    }
    read_json(path).map_err(|e| HarnessError::Invalid(e.to_string()))
}

fn campaigns_or_all(given: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>> {
    let dirs = if given.is_empty() {
        discover_campaigns(out)?
    } else {
        given.to_vec()
    };
    if dirs.is_empty() {
        return Err(HarnessError::Invalid(format!(
            "no campaigns under {}; run `crashsieve run` first",
            out.display()
        )));
    }
    Ok(dirs)
}

/// Scenes must admit the default 300 perturbed layouts; configurations must
/// validate and name a loadable scene.
fn validate_target(target: &str, seed: u64) -> Result<()> {
    let path = Path::new(target);
    let is_config = path.is_file()
        && std::fs::read_to_string(path)
            .ok()
            .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok())
            .is_some_and(|v| v.get("map").is_none());
    if is_config {
        let config = read_config(path)?;
        config.validate()?;
        let scene = resolve_scene(&config.scene)?;
        return validate_scene(&scene, &config.perturbation, config.patterns, seed);
    }
    let scene = resolve_scene(target)?;
    validate_scene(&scene, &sim_core::PerturbationSpec::default(), 300, seed)
}
