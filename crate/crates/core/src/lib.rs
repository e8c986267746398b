//! Stateless reinforcement learning agents facing Newcomb's Problem and the
//! (possibly skewed) Prisoner's Dilemma.
//!
//! The crate is split along the lines of the experiment pipeline:
//!
//! - [`matrix_games`]: 2×2 bimatrix games, Prisoner's-Dilemma validity,
//!   per-player Newcomb views, expected utilities and exact indifference
//!   thresholds.
//! - [`agents`]: SARSA, averaged-Q, expected-utility oracle and fixed
//!   baselines over a two-armed bandit with ε-greedy exploration.
//! - [`environments`]: the Newcomb predictor and the fixed-opponent
//!   Prisoner's Dilemma, with individual or summed rewards.
//! - [`simulation`]: single runs, probability sweeps and their statistics.
//! - [`csv_io`], [`svg`], [`game_file`], [`presets`] and [`cli`]: batch IO and
//!   the command-line front end.

pub mod agents;
pub mod cli;
pub mod csv_io;
pub mod environments;
pub mod error;
pub mod game_file;
pub mod matrix_games;
pub mod presets;
pub mod rng;
pub mod simulation;
pub mod svg;

pub use agents::{AgentKind, AgentSpec, Hyperparams, QTable};
pub use environments::{Environment, NewcombEnv, PdEnv, RewardMode, StepOutcome};
pub use error::{Error, Result};
pub use matrix_games::{Action, BimatrixGame, NewcombView, PdParams, Player, Threshold};
pub use rng::RngStream;
pub use simulation::{EnvSpec, ExperimentConfig, SweepPoint, SweepResult};
