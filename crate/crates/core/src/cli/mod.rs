//! Command-line front end: `train`, `eval`, `plan`, `render`, `gen-corpus`.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid configuration or
//! input, 3 missing or unreadable artifact, 4 no path exists.

pub mod render;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::{
    read_episode_csv, rollout_policy, train_on_maps, write_episode_csv, TrainConfig,
};
use crate::baselines::{astar, dijkstra, parse_path_text, rrt_plan};
use crate::error::{Error, Result};
use crate::experiments::{
    corpus_train_config, eval_all_starts, eval_fixed_start, eval_maps, generate_noise_corpus,
    read_corpus, write_corpus, write_summary_csv, CorpusManifest, EvalSummary, NoiseCorpusSpec,
    DEFAULT_EVAL_STEP_CAP,
};
use crate::gridworld::{canonical_map, read_map, render_map, GridMap, Position};
use crate::neuralnet::{load_checkpoint, save_checkpoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MISSING: i32 = 3;
pub const EXIT_NO_PATH: i32 = 4;

/// Default parent directory for `train` output when `--out` is omitted.
pub const OUTPUT_ROOT_ENV: &str = "GRIDNAV_OUTPUT_ROOT";

pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Parser)]
#[command(
    name = "gridnav",
    version,
    about = "Double DQN path planning on grid maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Train a network and write checkpoint, episode CSV and run manifest.
    Train(TrainArgs),
    /// Evaluate a checkpoint and write a summary CSV.
    Eval(EvalArgs),
    /// Run a classical planner and print the path.
    Plan(PlanArgs),
    /// Draw a map (with optional path) or training curves as SVG.
    Render(RenderArgs),
    /// Generate a noisy-map corpus from a base map.
    GenCorpus(GenCorpusArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Map file; the built-in canonical map when omitted.
    #[arg(long, conflicts_with = "corpus")]
    pub map: Option<PathBuf>,
    /// Train across the training split of a corpus directory, starting
    /// from the corpus training preset.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output directory. Defaults to `$GRIDNAV_OUTPUT_ROOT/train-seed<seed>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = OUTPUT_ROOT_ENV, default_value = "runs", hide_env_values = true)]
    pub output_root: PathBuf,
    /// TOML file holding a training config or a run manifest; flags
    /// override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Plain Double DQN: no random restarts, no shaped reward.
    #[arg(long)]
    pub baseline: bool,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Default, Args)]
pub struct HyperArgs {
    /// Environment steps.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub p_r: Option<f64>,
    #[arg(long)]
    pub sync_period: Option<u64>,
    #[arg(long)]
    pub epsilon_start: Option<f64>,
    #[arg(long)]
    pub epsilon_end: Option<f64>,
    #[arg(long)]
    pub epsilon_decay: Option<u64>,
    #[arg(long)]
    pub max_episode_steps: Option<usize>,
    #[arg(long)]
    pub replay_capacity: Option<usize>,
    /// Transitions stored before the first gradient update.
    #[arg(long)]
    pub warmup: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub reward_end: Option<f64>,
    #[arg(long)]
    pub reward_obstacle: Option<f64>,
    #[arg(long)]
    pub conv_filters: Option<usize>,
    #[arg(long)]
    pub conv_kernel: Option<usize>,
    #[arg(long)]
    pub conv_stride: Option<usize>,
    #[arg(long)]
    pub conv_padding: Option<usize>,
    #[arg(long, conflicts_with = "baseline")]
    pub no_random_init: bool,
    #[arg(long, conflicts_with = "baseline")]
    pub no_shaped_reward: bool,
}

impl HyperArgs {
    fn apply(&self, c: &mut TrainConfig) {
        fn set<T: Copy>(dst: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *dst = v;
            }
        }
        set(&mut c.total_train_steps, self.steps);
        set(&mut c.seed, self.seed);
        set(&mut c.gamma, self.gamma);
        set(&mut c.batch_size, self.batch_size);
        set(&mut c.p_r, self.p_r);
        set(&mut c.target_sync_period, self.sync_period);
        set(&mut c.epsilon_start, self.epsilon_start);
        set(&mut c.epsilon_end, self.epsilon_end);
        set(&mut c.epsilon_decay_steps, self.epsilon_decay);
        set(&mut c.max_episode_steps, self.max_episode_steps);
        set(&mut c.replay_capacity, self.replay_capacity);
        set(&mut c.min_replay_before_training, self.warmup);
        set(&mut c.optimizer.learning_rate, self.lr);
        set(&mut c.reward.alpha, self.alpha);
        set(&mut c.reward.beta, self.beta);
        set(&mut c.reward.reward_end, self.reward_end);
        set(&mut c.reward.reward_obstacle, self.reward_obstacle);
        set(&mut c.network.conv_filters, self.conv_filters);
        set(&mut c.network.conv_kernel, self.conv_kernel);
        set(&mut c.network.conv_stride, self.conv_stride);
        set(&mut c.network.conv_padding, self.conv_padding);
        if self.no_random_init {
            c.use_random_init = false;
        }
        if self.no_shaped_reward {
            c.use_shaped_reward = false;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    /// One greedy rollout from the designated start.
    Fixed,
    /// Greedy rollouts from every reachable free cell.
    AllStarts,
    /// Designated-start rollouts over both corpus splits.
    Corpus,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, value_enum, default_value = "fixed")]
    pub mode: EvalMode,
    /// Map file; the built-in canonical map when omitted.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Corpus directory, required by `--mode corpus`.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EVAL_STEP_CAP)]
    pub step_cap: usize,
    /// Summary CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the fixed-start rollout path (plan text format).
    #[arg(long)]
    pub path_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Astar,
    Dijkstra,
    Rrt,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, value_enum, default_value = "astar")]
    pub algo: Algo,
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Query start as `x,y`; the map's designated start when omitted.
    #[arg(long, value_parser = parse_position)]
    pub start: Option<Position>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_samples: usize,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Map to draw; the built-in canonical map when omitted and no
    /// `--curve` is given.
    #[arg(long, conflicts_with = "curve")]
    pub map: Option<PathBuf>,
    /// Overlay a path file in plan text format.
    #[arg(long, conflicts_with_all = ["plan", "checkpoint"])]
    pub path: Option<PathBuf>,
    /// Overlay a freshly planned path.
    #[arg(long, value_enum, conflicts_with = "checkpoint")]
    pub plan: Option<Algo>,
    /// Overlay the greedy rollout of a trained network.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Episode CSV to chart instead of a map.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Column(s) to chart from the episode CSV.
    #[arg(long = "metric", default_value = "avg_reward_per_step")]
    pub metrics: Vec<String>,
    /// SVG destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    /// Base map; the built-in canonical map when omitted.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 300)]
    pub count: usize,
    #[arg(long, default_value_t = 100)]
    pub train_count: usize,
    #[arg(long, default_value_t = 1)]
    pub min: usize,
    #[arg(long, default_value_t = 5)]
    pub max: usize,
    #[arg(long, default_value_t = 1)]
    pub band: i32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000)]
    pub max_retries: usize,
}

/// Everything needed to repeat a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    /// Map file, corpus directory, or `builtin:canonical`.
    pub map_source: String,
    /// SHA-256 over the canonical text of every training map, in order.
    pub map_sha256: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub episodes: usize,
    pub gradient_updates: u64,
    pub config: TrainConfig,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn maps_sha256(maps: &[GridMap]) -> String {
    let mut h = Sha256::new();
    for m in maps {
        h.update(render_map(m).as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_position(s: &str) -> std::result::Result<Position, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x = x.trim().parse().map_err(|e| format!("bad x: {e}"))?;
    let y = y.trim().parse().map_err(|e| format!("bad y: {e}"))?;
    Ok(Position::new(x, y))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn load_map(path: Option<&Path>) -> Result<(GridMap, String)> {
    match path {
        Some(p) => Ok((read_map(p)?, p.display().to_string())),
        None => Ok((canonical_map(), "builtin:canonical".to_string())),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, contents: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => std::io::stdout()
            .write_all(contents)
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Resolves the training config: defaults (the corpus preset when
/// `--corpus` is given), then `--config`, then `--baseline`, then
/// individual flags.
pub fn resolve_config(args: &TrainArgs) -> Result<TrainConfig> {
    let mut config = match &args.config {
        None if args.corpus.is_some() => corpus_train_config(0),
        None => TrainConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            match toml::from_str::<RunManifest>(&text) {
                Ok(m) => m.config,
                Err(_) => TrainConfig::from_toml(&text)?,
            }
        }
    };
    if args.baseline {
        config = config.into_baseline();
    }
    args.hyper.apply(&mut config);
    config.validate()?;
    Ok(config)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let config = resolve_config(args)?;
    let (maps, source) = match &args.corpus {
        Some(dir) => (read_corpus(dir)?.0.train, dir.display().to_string()),
        None => {
            let (map, source) = load_map(args.map.as_deref())?;
            (vec![map], source)
        }
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.output_root.join(format!("train-seed{}", config.seed)));
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let started = unix_now();
    let map_sha256 = maps_sha256(&maps);
    let run = train_on_maps(maps, &config, |_| {})?;

    save_checkpoint(out.join(CHECKPOINT_FILE), &run.params)?;
    let mut csv = Vec::new();
    write_episode_csv(&mut csv, &run.episodes)?;
    write_file(&out.join(EPISODES_FILE), &csv)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        map_source: source,
        map_sha256,
        started_unix: started,
        finished_unix: unix_now(),
        episodes: run.episodes.len(),
        gradient_updates: run.gradient_updates,
        config,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    write_file(&out.join(MANIFEST_FILE), text.as_bytes())?;

    let successes = run.episodes.iter().filter(|e| e.succeeded()).count();
    println!(
        "trained {} episodes ({} reached the end), {} updates -> {}",
        run.episodes.len(),
        successes,
        run.gradient_updates,
        out.display()
    );
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let params = load_checkpoint(&args.checkpoint)?;
    let rows: Vec<EvalSummary> = match args.mode {
        EvalMode::Fixed => {
            let (map, _) = load_map(args.map.as_deref())?;
            let (summary, record) = eval_fixed_start(&map, &params, args.step_cap)?;
            if let Some(p) = &args.path_out {
                let mut text: String = record
                    .path
                    .iter()
                    .map(|p| format!("{},{}\n", p.x, p.y))
                    .collect();
                text.push_str(&format!(
                    "length={} termination={}\n",
                    record.path_length(),
                    record.termination
                ));
                write_file(p, text.as_bytes())?;
            }
            vec![summary]
        }
        EvalMode::AllStarts => {
            let (map, _) = load_map(args.map.as_deref())?;
            vec![eval_all_starts(&map, &params, args.step_cap)?]
        }
        EvalMode::Corpus => {
            let dir = args
                .corpus
                .as_ref()
                .ok_or_else(|| Error::Config("--mode corpus needs --corpus".into()))?;
            let (corpus, _) = read_corpus(dir)?;
            vec![
                eval_maps("train", &corpus.train, &params, args.step_cap)?,
                eval_maps("test", &corpus.test, &params, args.step_cap)?,
            ]
        }
    };
    let mut csv = Vec::new();
    write_summary_csv(&mut csv, &rows)?;
    emit(args.out.as_deref(), &csv)
}

fn cmd_plan(args: &PlanArgs) -> Result<()> {
    let (map, _) = load_map(args.map.as_deref())?;
    let start = args.start.unwrap_or(map.start());
    let result = match args.algo {
        Algo::Astar => astar(&map, start)?,
        Algo::Dijkstra => dijkstra(&map, start)?,
        Algo::Rrt => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            rrt_plan(&map, start, args.max_samples, &mut rng)?
        }
    };
    emit(args.out.as_deref(), result.to_text().as_bytes())
}

fn cmd_render(args: &RenderArgs) -> Result<()> {
    let svg = if let Some(curve) = &args.curve {
        let file = fs::File::open(curve).map_err(|e| Error::io(curve, e))?;
        render::curve_svg(&read_episode_csv(file)?, &args.metrics)?
    } else {
        let (map, _) = load_map(args.map.as_deref())?;
        let path = if let Some(p) = &args.path {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            Some(parse_path_text(&text).map_err(Error::Config)?)
        } else if let Some(algo) = args.plan {
            let result = match algo {
                Algo::Astar => astar(&map, map.start())?,
                Algo::Dijkstra => dijkstra(&map, map.start())?,
                Algo::Rrt => {
                    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                    rrt_plan(&map, map.start(), 10_000, &mut rng)?
                }
            };
            Some(result.path)
        } else if let Some(ckpt) = &args.checkpoint {
            let params = load_checkpoint(ckpt)?;
            Some(rollout_policy(&map, &params, map.start(), DEFAULT_EVAL_STEP_CAP)?.path)
        } else {
            None
        };
        render::map_svg(&map, path.as_deref())
    };
    emit(args.out.as_deref(), svg.as_bytes())
}

fn cmd_gen_corpus(args: &GenCorpusArgs) -> Result<()> {
    let (base, _) = load_map(args.map.as_deref())?;
    let spec = NoiseCorpusSpec {
        count: args.count,
        train_count: args.train_count,
        min_new_obstacles: args.min,
        max_new_obstacles: args.max,
        placement_band: args.band,
        max_retries: args.max_retries,
        ..NoiseCorpusSpec::new(base, args.seed)
    };
    let corpus = generate_noise_corpus(&spec)?;
    write_corpus(&args.out, &corpus, &CorpusManifest::for_spec(&spec))?;
    println!(
        "wrote {} train and {} test maps to {}",
        corpus.train.len(),
        corpus.test.len(),
        args.out.display()
    );
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Render(a) => cmd_render(a),
        Command::GenCorpus(a) => cmd_gen_corpus(a),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::MapFormat { .. }
        | Error::InvalidMap(_)
        | Error::InvalidPosition(_)
        | Error::ShapeMismatch { .. } => EXIT_CONFIG,
        Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => EXIT_MISSING,
        Error::Checkpoint(_) => EXIT_MISSING,
        Error::NoPath(_) | Error::SampleBudgetExhausted(_) => EXIT_NO_PATH,
        _ => EXIT_FAILURE,
    }
}

/// Parses the process arguments, runs the command and returns the exit
/// code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
