//! Experiment engine: single runs, probability sweeps and their statistics.
//!
//! A sweep evaluates every (grid point, series, run) triple independently.
//! Each triple owns its agent, its environment and two random substreams
//! keyed by its indices, so the result does not depend on scheduling or on
//! the size of the worker pool. Statistics are reported over a tail window
//! of each run (the final 20% of steps by default) with exploration left on.

use rayon::prelude::*;

use crate::agents::{
    avgq_update, sarsa_update, select_action, AgentKind, AgentSpec, EuOracle, Hyperparams, QTable,
};
use crate::environments::{Environment, NewcombEnv, PdEnv, RewardMode};
use crate::error::{Error, Result};
use crate::matrix_games::{Action, BimatrixGame, NewcombView, Player};
use crate::rng::{RngStream, StreamRole, SubstreamKey};

pub const DEFAULT_STEPS: u64 = 10_000;
pub const DEFAULT_RUNS: usize = 50;
pub const DEFAULT_WINDOW: f64 = 0.2;
pub const DEFAULT_SEED: u64 = 1;

/// Environment variable capping `steps × runs × grid points`.
pub const MAX_TOTAL_STEPS_VAR: &str = "DILEMMA_MAX_TOTAL_STEPS";

/// Reads the step budget from [`MAX_TOTAL_STEPS_VAR`], if set.
pub fn budget_from_env() -> Result<Option<u64>> {
    match std::env::var(MAX_TOTAL_STEPS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::config(format!("{MAX_TOTAL_STEPS_VAR} must be a non-negative integer, got '{v}'"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::config(format!("{MAX_TOTAL_STEPS_VAR}: {e}"))),
    }
}

/// Evenly spaced probabilities from `start` to `stop` inclusive.
///
/// The point count is `round((stop - start) / step) + 1` and each point is
/// computed from its index, so `0:1:0.05` yields exactly `0.75` at index 15.
pub fn probability_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::config("grid bounds must be finite"));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
        return Err(Error::config(format!(
            "grid must satisfy 0 <= start <= stop <= 1, got {start}:{stop}"
        )));
    }
    if start == stop {
        return Ok(vec![start]);
    }
    if step <= 0.0 {
        return Err(Error::config("grid step must be positive"));
    }
    let intervals = ((stop - start) / step).round();
    if !(1.0..=1e6).contains(&intervals) {
        return Err(Error::config(format!("grid step {step} gives {intervals} intervals")));
    }
    let n = intervals as usize;
    Ok((0..=n)
        .map(|i| start + (stop - start) * i as f64 / n as f64)
        .collect())
}

pub fn default_grid() -> Vec<f64> {
    probability_grid(0.0, 1.0, 0.05).expect("constant grid is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    /// Newcomb predictor over `view`; `viewer` records whose table it is.
    Newcomb { view: NewcombView, viewer: Player },
    /// Learner on the row side of `game` against a fixed opponent, once per
    /// reward mode.
    Pd {
        game: BimatrixGame,
        modes: Vec<RewardMode>,
    },
}

impl EnvSpec {
    pub fn environment(&self, probability: f64, mode: Option<RewardMode>) -> Result<Environment> {
        match self {
            EnvSpec::Newcomb { view, .. } => Ok(Environment::Newcomb(NewcombEnv::new(*view, probability)?)),
            EnvSpec::Pd { game, .. } => {
                let mode = mode.ok_or_else(|| Error::config("PD environment needs a reward mode"))?;
                Ok(Environment::Pd(PdEnv::new(*game, probability, mode)?))
            }
        }
    }

    fn modes(&self) -> Vec<Option<RewardMode>> {
        match self {
            EnvSpec::Newcomb { .. } => vec![None],
            EnvSpec::Pd { modes, .. } => modes.iter().copied().map(Some).collect(),
        }
    }
}

/// One curve of a sweep: an agent, and for PD the reward mode it learns from.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub agent: AgentSpec,
    pub mode: Option<RewardMode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub env: EnvSpec,
    pub roster: Vec<AgentSpec>,
    pub hyperparams: Hyperparams,
    pub steps: u64,
    pub runs: usize,
    pub grid: Vec<f64>,
    /// Tail fraction of each run that statistics are computed over.
    pub window: f64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Cap on `steps × runs × grid points`.
    pub max_total_steps: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, env: EnvSpec, roster: Vec<AgentSpec>) -> Self {
        ExperimentConfig {
            name: name.into(),
            env,
            roster,
            hyperparams: Hyperparams::default(),
            steps: DEFAULT_STEPS,
            runs: DEFAULT_RUNS,
            grid: default_grid(),
            window: DEFAULT_WINDOW,
            seed: DEFAULT_SEED,
            threads: None,
            max_total_steps: None,
        }
    }

    pub fn total_steps(&self) -> u64 {
        self.steps
            .saturating_mul(self.runs as u64)
            .saturating_mul(self.grid.len() as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("probability grid is empty"));
        }
        if let Some(p) = self.grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::config(format!("grid value {p} outside [0, 1]")));
        }
        if self.roster.is_empty() {
            return Err(Error::config("agent roster is empty"));
        }
        for (i, a) in self.roster.iter().enumerate() {
            if self.roster[..i].contains(a) {
                return Err(Error::config(format!("agent '{a}' listed twice")));
            }
        }
        if let EnvSpec::Pd { modes, .. } = &self.env {
            if modes.is_empty() {
                return Err(Error::config("no reward mode given"));
            }
            for (i, m) in modes.iter().enumerate() {
                if modes[..i].contains(m) {
                    return Err(Error::config(format!("reward mode '{m}' listed twice")));
                }
            }
        }
        if self.steps == 0 {
            return Err(Error::config("steps must be positive"));
        }
        if self.runs == 0 {
            return Err(Error::config("runs must be positive"));
        }
        if !(self.window > 0.0 && self.window <= 1.0) {
            return Err(Error::config(format!("window must lie in (0, 1], got {}", self.window)));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads must be positive"));
        }
        self.hyperparams
            .validate()
            .map_err(|e| Error::config(e.to_string()))?;
        check_budget(self.total_steps(), self.max_total_steps)?;
        let last = SubstreamKey::new(self.grid.len() - 1, self.runs - 1, self.series().len() - 1);
        last.validate()
    }

    pub fn series(&self) -> Vec<Series> {
        let modes = self.env.modes();
        let tagged = modes.len() > 1;
        self.roster
            .iter()
            .flat_map(|&agent| {
                modes.iter().map(move |&mode| Series {
                    label: match mode {
                        Some(m) if tagged => format!("{agent}-{}", m.tag()),
                        _ => agent.id().to_string(),
                    },
                    agent,
                    mode,
                })
            })
            .collect()
    }
}

fn check_budget(total: u64, max: Option<u64>) -> Result<()> {
    match max {
        Some(max) if total > max => Err(Error::config(format!(
            "experiment needs {total} steps, over the budget of {max} ({MAX_TOTAL_STEPS_VAR})"
        ))),
        _ => Ok(()),
    }
}

/// Builds the concrete agent for `spec` in `env`. The EU oracle is handed
/// the environment's true expected rewards.
pub fn instantiate(spec: AgentSpec, hyperparams: &Hyperparams, env: &Environment) -> AgentKind {
    match spec {
        AgentSpec::Sarsa => AgentKind::Sarsa(*hyperparams),
        AgentSpec::AvgQ => AgentKind::AvgQ {
            epsilon: hyperparams.epsilon,
        },
        AgentSpec::Eu => AgentKind::ExpectedUtility(EuOracle::from_utilities(
            env.probability(),
            [
                env.analytic_mean_reward(Action::Repair),
                env.analytic_mean_reward(Action::NoRepair),
            ],
        )),
        AgentSpec::AlwaysRepair => AgentKind::AlwaysRepair,
        AgentSpec::NeverRepair => AgentKind::NeverRepair,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceRetention {
    /// Keep every `(action, reward)` pair.
    Full,
    /// Keep only accumulators, with the window fixed up front.
    Window(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub steps: u64,
    pub retention: TraceRetention,
    pub max_total_steps: Option<u64>,
}

impl RunSpec {
    pub fn new(steps: u64, retention: TraceRetention) -> Self {
        RunSpec {
            steps,
            retention,
            max_total_steps: None,
        }
    }
}

/// The agent's and the environment's random streams for one run.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub agent: RngStream,
    pub env: RngStream,
}

impl RunStreams {
    pub fn new(seed: u64, key: SubstreamKey) -> Self {
        RunStreams {
            agent: RngStream::substream(seed, key, StreamRole::Agent),
            env: RngStream::substream(seed, key, StreamRole::Environment),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub action: Action,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamingStats {
    pub steps: u64,
    pub window: f64,
    pub window_reward: f64,
    pub window_repairs: u64,
    pub total_reward: f64,
    pub total_repairs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunTrace {
    Full(Vec<StepRecord>),
    Streaming(StreamingStats),
}

impl RunTrace {
    pub fn len(&self) -> u64 {
        match self {
            RunTrace::Full(steps) => steps.len() as u64,
            RunTrace::Streaming(s) => s.steps,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_reward(&self) -> f64 {
        match self {
            RunTrace::Full(steps) => steps.iter().map(|s| s.reward).sum(),
            RunTrace::Streaming(s) => s.total_reward,
        }
    }

    pub fn total_repairs(&self) -> u64 {
        match self {
            RunTrace::Full(steps) => steps.iter().filter(|s| s.action == Action::Repair).count() as u64,
            RunTrace::Streaming(s) => s.total_repairs,
        }
    }
}

/// Number of final steps covered by `window`: `⌈window · steps⌉`, at least 1.
pub fn window_len(steps: u64, window: f64) -> u64 {
    // 1e-9 absorbs representation error such as 0.2 · 10000 = 2000.0000000000002
    let len = (window * steps as f64 - 1e-9).ceil();
    (len.max(1.0) as u64).min(steps)
}

/// Runs `agent` for `spec.steps` steps.
///
/// SARSA follows the on-policy loop: play `a_t`, observe `r`, pick `a_{t+1}`
/// with the current values, then update `q[a_t]` towards
/// `r + γ·q[a_{t+1}]`. AVGQ folds the reward into its mean before choosing
/// again. Fixed policies simply act.
pub fn run_single(
    agent: &AgentKind,
    env: &Environment,
    spec: &RunSpec,
    streams: &mut RunStreams,
) -> Result<RunTrace> {
    if spec.steps == 0 {
        return Err(Error::config("steps must be positive"));
    }
    check_budget(spec.steps, spec.max_total_steps)?;
    if let TraceRetention::Window(w) = spec.retention {
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::config(format!("window must lie in (0, 1], got {w}")));
        }
    }

    let window_start = match spec.retention {
        TraceRetention::Window(w) => spec.steps - window_len(spec.steps, w),
        TraceRetention::Full => 0,
    };
    let mut full = match spec.retention {
        TraceRetention::Full => Vec::with_capacity(spec.steps as usize),
        TraceRetention::Window(_) => Vec::new(),
    };
    let mut stats = StreamingStats {
        steps: spec.steps,
        window: match spec.retention {
            TraceRetention::Window(w) => w,
            TraceRetention::Full => 1.0,
        },
        window_reward: 0.0,
        window_repairs: 0,
        total_reward: 0.0,
        total_repairs: 0,
    };

    let mut qt = QTable::new();
    let mut action = select_action(agent, &qt, &mut streams.agent);
    for t in 0..spec.steps {
        let outcome = env.step(action, &mut streams.env);
        let reward = outcome.reward;
        let repaired = (action == Action::Repair) as u64;

        match spec.retention {
            TraceRetention::Full => full.push(StepRecord { action, reward }),
            TraceRetention::Window(_) => {
                stats.total_reward += reward;
                stats.total_repairs += repaired;
                if t >= window_start {
                    stats.window_reward += reward;
                    stats.window_repairs += repaired;
                }
            }
        }

        action = match agent {
            AgentKind::Sarsa(h) => {
                let next = select_action(agent, &qt, &mut streams.agent);
                qt = sarsa_update(qt, action, reward, next, h);
                next
            }
            AgentKind::AvgQ { .. } => {
                qt = avgq_update(qt, action, reward);
                select_action(agent, &qt, &mut streams.agent)
            }
            _ => select_action(agent, &qt, &mut streams.agent),
        };
    }

    Ok(match spec.retention {
        TraceRetention::Full => RunTrace::Full(full),
        TraceRetention::Window(_) => RunTrace::Streaming(stats),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub mean_payout: f64,
    pub repair_freq: f64,
}

/// Mean reward and Repair frequency over the final `⌈window · N⌉` steps.
///
/// A streaming trace only knows the window it was recorded with; asking it
/// for another one is an error.
pub fn aggregate_window(trace: &RunTrace, window: f64) -> Result<WindowStats> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::invalid(format!("window must lie in (0, 1], got {window}")));
    }
    match trace {
        RunTrace::Full(steps) => {
            if steps.is_empty() {
                return Err(Error::invalid("empty trace"));
            }
            let len = window_len(steps.len() as u64, window) as usize;
            let tail = &steps[steps.len() - len..];
            let reward: f64 = tail.iter().map(|s| s.reward).sum();
            let repairs = tail.iter().filter(|s| s.action == Action::Repair).count();
            Ok(WindowStats {
                mean_payout: reward / len as f64,
                repair_freq: repairs as f64 / len as f64,
            })
        }
        RunTrace::Streaming(s) => {
            if s.window != window {
                return Err(Error::invalid(format!(
                    "trace was recorded for window {}, not {window}",
                    s.window
                )));
            }
            let len = window_len(s.steps, window) as f64;
            Ok(WindowStats {
                mean_payout: s.window_reward / len,
                repair_freq: s.window_repairs as f64 / len,
            })
        }
    }
}

/// Mean and standard error of the mean across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

impl Stat {
    pub fn from_samples(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Stat { mean, stderr }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub agent: String,
    pub probability: f64,
    pub mean_payout: Stat,
    pub repair_freq: Stat,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    pub steps: u64,
    pub window: f64,
    pub seed: u64,
    /// Series-major, grid ascending within a series.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Series labels in order of first appearance.
    pub fn series_labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = Vec::new();
        for p in &self.points {
            if !labels.contains(&p.agent.as_str()) {
                labels.push(&p.agent);
            }
        }
        labels
    }

    pub fn series<'a>(&'a self, agent: &'a str) -> impl Iterator<Item = &'a SweepPoint> + 'a {
        self.points.iter().filter(move |p| p.agent == agent)
    }

    pub fn point(&self, agent: &str, probability: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.agent == agent && (p.probability - probability).abs() < 1e-12)
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?
            .install(|| sweep_inner(cfg)),
        None => sweep_inner(cfg),
    }
}

fn sweep_inner(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let series = cfg.series();
    let run_spec = RunSpec {
        steps: cfg.steps,
        retention: TraceRetention::Window(cfg.window),
        max_total_steps: None,
    };

    let cells: Vec<(usize, usize)> = (0..series.len())
        .flat_map(|s| (0..cfg.grid.len()).map(move |g| (s, g)))
        .collect();
    let tasks: Vec<(usize, usize, usize)> = cells
        .iter()
        .flat_map(|&(s, g)| (0..cfg.runs).map(move |r| (s, g, r)))
        .collect();

    let stats: Vec<WindowStats> = tasks
        .par_iter()
        .map(|&(s, g, r)| {
            let env = cfg.env.environment(cfg.grid[g], series[s].mode)?;
            let agent = instantiate(series[s].agent, &cfg.hyperparams, &env);
            let mut streams = RunStreams::new(cfg.seed, SubstreamKey::new(g, r, s));
            let trace = run_single(&agent, &env, &run_spec, &mut streams)?;
            aggregate_window(&trace, cfg.window)
        })
        .collect::<Result<_>>()?;

    let points = cells
        .iter()
        .zip(stats.chunks(cfg.runs))
        .map(|(&(s, g), runs)| {
            let payouts: Vec<f64> = runs.iter().map(|w| w.mean_payout).collect();
            let freqs: Vec<f64> = runs.iter().map(|w| w.repair_freq).collect();
            SweepPoint {
                agent: series[s].label.clone(),
                probability: cfg.grid[g],
                mean_payout: Stat::from_samples(&payouts),
                repair_freq: Stat::from_samples(&freqs),
                runs: cfg.runs,
            }
        })
        .collect();

    Ok(SweepResult {
        experiment: cfg.name.clone(),
        steps: cfg.steps,
        window: cfg.window,
        seed: cfg.seed,
        points,
    })
}
