//! Decision agents over the two-armed bandit {Repair, NoRepair}.
//!
//! There is no state: each learner keeps one value per action. Values start
//! at zero, which is optimistic when every payoff is a negative regret, so
//! both arms get pulled early on and the first few hundred steps show a
//! transient before the estimates settle.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix_games::{expected_utility, Action, NewcombView};

/// Per-action value estimates and visit counts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QTable {
    q: [f64; 2],
    n: [u64; 2],
}

impl QTable {
    pub fn new() -> Self {
        QTable::default()
    }

    pub fn with_values(q: [f64; 2]) -> Self {
        QTable { q, n: [0; 2] }
    }

    pub fn value(&self, a: Action) -> f64 {
        self.q[a.index()]
    }

    pub fn visits(&self, a: Action) -> u64 {
        self.n[a.index()]
    }

    pub fn values(&self) -> [f64; 2] {
        self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Hyperparams {
    pub fn new(alpha: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        let h = Hyperparams {
            alpha,
            gamma,
            epsilon,
        };
        h.validate()?;
        Ok(h)
    }

    /// `alpha ∈ (0, 1]`, `gamma ∈ [0, 1]`, `epsilon ∈ [0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.1,
        }
    }
}

/// An expected-utility agent that is told the true environment probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuOracle {
    pub probability: f64,
    pub utility: [f64; 2],
}

impl EuOracle {
    /// Oracle for a Newcomb predictor of the given accuracy.
    pub fn newcomb(view: &NewcombView, accuracy: f64) -> Result<Self> {
        Ok(EuOracle {
            probability: accuracy,
            utility: [
                expected_utility(view, Action::Repair, accuracy)?,
                expected_utility(view, Action::NoRepair, accuracy)?,
            ],
        })
    }

    /// Oracle from precomputed expected rewards, indexed by [`Action::index`].
    pub fn from_utilities(probability: f64, utility: [f64; 2]) -> Self {
        EuOracle {
            probability,
            utility,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentKind {
    Sarsa(Hyperparams),
    AvgQ { epsilon: f64 },
    ExpectedUtility(EuOracle),
    AlwaysRepair,
    NeverRepair,
}

/// Greedy choice with uniform tie-breaking.
pub fn argmax_action<R: Rng + ?Sized>(values: [f64; 2], rng: &mut R) -> Action {
    let [repair, no_repair] = values;
    if repair > no_repair {
        Action::Repair
    } else if no_repair > repair {
        Action::NoRepair
    } else if rng.random_bool(0.5) {
        Action::Repair
    } else {
        Action::NoRepair
    }
}

/// With probability `epsilon` a uniformly random action (possibly the greedy
/// one), otherwise the greedy action.
pub fn epsilon_greedy<R: Rng + ?Sized>(values: [f64; 2], epsilon: f64, rng: &mut R) -> Action {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        if rng.random_bool(0.5) {
            Action::Repair
        } else {
            Action::NoRepair
        }
    } else {
        argmax_action(values, rng)
    }
}

pub fn select_action<R: Rng + ?Sized>(agent: &AgentKind, qt: &QTable, rng: &mut R) -> Action {
    match agent {
        AgentKind::Sarsa(h) => epsilon_greedy(qt.q, h.epsilon, rng),
        AgentKind::AvgQ { epsilon } => epsilon_greedy(qt.q, *epsilon, rng),
        AgentKind::ExpectedUtility(oracle) => argmax_action(oracle.utility, rng),
        AgentKind::AlwaysRepair => Action::Repair,
        AgentKind::NeverRepair => Action::NoRepair,
    }
}

/// `q[a] += alpha * (r + gamma * q[a_next] - q[a])`.
pub fn sarsa_update(qt: QTable, a: Action, r: f64, a_next: Action, h: &Hyperparams) -> QTable {
    let mut out = qt;
    let i = a.index();
    let target = r + h.gamma * qt.q[a_next.index()];
    out.q[i] += h.alpha * (target - qt.q[i]);
    out.n[i] += 1;
    out
}

/// Running arithmetic mean of the rewards seen for `a`.
pub fn avgq_update(qt: QTable, a: Action, r: f64) -> QTable {
    let mut out = qt;
    let i = a.index();
    out.n[i] += 1;
    out.q[i] += (r - qt.q[i]) / out.n[i] as f64;
    out
}

/// Agent identifiers accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentSpec {
    Sarsa,
    AvgQ,
    Eu,
    AlwaysRepair,
    NeverRepair,
}

impl AgentSpec {
    pub fn id(self) -> &'static str {
        match self {
            AgentSpec::Sarsa => "sarsa",
            AgentSpec::AvgQ => "avgq",
            AgentSpec::Eu => "eu",
            AgentSpec::AlwaysRepair => "always-repair",
            AgentSpec::NeverRepair => "never-repair",
        }
    }

    pub fn is_learner(self) -> bool {
        matches!(self, AgentSpec::Sarsa | AgentSpec::AvgQ)
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AgentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sarsa" => Ok(AgentSpec::Sarsa),
            "avgq" => Ok(AgentSpec::AvgQ),
            "eu" => Ok(AgentSpec::Eu),
            "always-repair" => Ok(AgentSpec::AlwaysRepair),
            "never-repair" => Ok(AgentSpec::NeverRepair),
            other => Err(Error::config(format!(
                "unknown agent '{other}' (expected sarsa, avgq, eu, always-repair, never-repair)"
            ))),
        }
    }
}
