//! Single-step stochastic environments.
//!
//! Each step consumes exactly one uniform variate from the environment's
//! stream, so traces are reproducible and draws can be counted.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_probability, Error, Result};
use crate::matrix_games::{expected_utility, Action, BimatrixGame, NewcombView, Player};

/// A predictor that matches the agent's current action with probability
/// `accuracy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewcombEnv {
    view: NewcombView,
    accuracy: f64,
}

impl NewcombEnv {
    pub fn new(view: NewcombView, accuracy: f64) -> Result<Self> {
        check_probability("prediction accuracy", accuracy)?;
        Ok(NewcombEnv { view, accuracy })
    }

    pub fn view(&self) -> &NewcombView {
        &self.view
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewardMode {
    /// The learner receives its own payoff.
    Individual,
    /// The learner receives the sum of both players' payoffs.
    SumOfPayouts,
}

impl RewardMode {
    pub fn id(self) -> &'static str {
        match self {
            RewardMode::Individual => "individual",
            RewardMode::SumOfPayouts => "sum",
        }
    }

    /// Short tag used in series labels: `I` or `T`.
    pub fn tag(self) -> &'static str {
        match self {
            RewardMode::Individual => "I",
            RewardMode::SumOfPayouts => "T",
        }
    }
}

impl fmt::Display for RewardMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for RewardMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "individual" | "I" => Ok(RewardMode::Individual),
            "sum" | "T" => Ok(RewardMode::SumOfPayouts),
            other => Err(Error::config(format!(
                "unknown reward mode '{other}' (expected individual or sum)"
            ))),
        }
    }
}

/// The learner plays the row side against an i.i.d. opponent that repairs
/// with probability `coop_prob`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdEnv {
    game: BimatrixGame,
    coop_prob: f64,
    mode: RewardMode,
}

impl PdEnv {
    pub fn new(game: BimatrixGame, coop_prob: f64, mode: RewardMode) -> Result<Self> {
        check_probability("cooperation probability", coop_prob)?;
        Ok(PdEnv {
            game,
            coop_prob,
            mode,
        })
    }

    pub fn game(&self) -> &BimatrixGame {
        &self.game
    }

    pub fn coop_prob(&self) -> f64 {
        self.coop_prob
    }

    pub fn mode(&self) -> RewardMode {
        self.mode
    }

    fn payoffs(&self, own: Action, other: Action) -> (f64, f64) {
        (
            self.game.payoff(Player::Row, own, other),
            self.game.payoff(Player::Col, own, other),
        )
    }

    fn reward_for(&self, payoffs: (f64, f64)) -> f64 {
        match self.mode {
            RewardMode::Individual => payoffs.0,
            RewardMode::SumOfPayouts => payoffs.0 + payoffs.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Signal delivered to the learner.
    pub reward: f64,
    pub own_action: Action,
    /// The prediction (Newcomb) or the opponent's action (PD).
    pub other_or_prediction: Action,
    /// `(row, col)` payoffs of the PD cell that was played; Newcomb steps
    /// have no second player and leave this empty.
    pub individual_payoffs: Option<(f64, f64)>,
}

pub fn newcomb_step<R: Rng + ?Sized>(env: &NewcombEnv, a: Action, rng: &mut R) -> StepOutcome {
    let correct = rng.random::<f64>() < env.accuracy;
    let prediction = if correct { a } else { a.other() };
    StepOutcome {
        reward: env.view.payoff(prediction, a),
        own_action: a,
        other_or_prediction: prediction,
        individual_payoffs: None,
    }
}

pub fn pd_step<R: Rng + ?Sized>(env: &PdEnv, a: Action, rng: &mut R) -> StepOutcome {
    let other = if rng.random::<f64>() < env.coop_prob {
        Action::Repair
    } else {
        Action::NoRepair
    };
    let payoffs = env.payoffs(a, other);
    StepOutcome {
        reward: env.reward_for(payoffs),
        own_action: a,
        other_or_prediction: other,
        individual_payoffs: Some(payoffs),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Environment {
    Newcomb(NewcombEnv),
    Pd(PdEnv),
}

impl Environment {
    pub fn step<R: Rng + ?Sized>(&self, a: Action, rng: &mut R) -> StepOutcome {
        match self {
            Environment::Newcomb(env) => newcomb_step(env, a, rng),
            Environment::Pd(env) => pd_step(env, a, rng),
        }
    }

    /// The probability parameter of the environment (accuracy or
    /// cooperation probability).
    pub fn probability(&self) -> f64 {
        match self {
            Environment::Newcomb(env) => env.accuracy,
            Environment::Pd(env) => env.coop_prob,
        }
    }

    /// Exact expectation of [`StepOutcome::reward`] for a fixed action.
    pub fn analytic_mean_reward(&self, a: Action) -> f64 {
        match self {
            Environment::Newcomb(env) => expected_utility(&env.view, a, env.accuracy)
                .expect("accuracy validated on construction"),
            Environment::Pd(env) => {
                let q = env.coop_prob;
                q * env.reward_for(env.payoffs(a, Action::Repair))
                    + (1.0 - q) * env.reward_for(env.payoffs(a, Action::NoRepair))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_games::derive_newcomb_view;
    use crate::rng::RngStream;

    fn robot_view() -> NewcombView {
        derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row)
    }

    fn newcomb(p: f64) -> Environment {
        Environment::Newcomb(NewcombEnv::new(robot_view(), p).unwrap())
    }

    fn pd(q: f64, mode: RewardMode) -> Environment {
        Environment::Pd(PdEnv::new(BimatrixGame::oil_spill_robots(), q, mode).unwrap())
    }

    fn mean_and_se(env: &Environment, a: Action, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::new(seed);
        let rewards: Vec<f64> = (0..n).map(|_| env.step(a, &mut rng).reward).collect();
        let mean = rewards.iter().sum::<f64>() / n as f64;
        let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, (var / n as f64).sqrt())
    }

    #[test]
    fn newcomb_extremes() {
        let mut rng = RngStream::new(0);
        for _ in 0..1000 {
            assert_eq!(newcomb(1.0).step(Action::Repair, &mut rng).reward, -2000.0);
            assert_eq!(newcomb(0.0).step(Action::Repair, &mut rng).reward, -4000.0);
        }
    }

    #[test]
    fn newcomb_mean_at_threshold() {
        let (mean, se) = mean_and_se(&newcomb(0.75), Action::Repair, 100_000, 1);
        assert!((mean - -2500.0).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn pd_cells() {
        let mut rng = RngStream::new(0);
        for _ in 0..100 {
            let out = pd(1.0, RewardMode::Individual).step(Action::Repair, &mut rng);
            assert_eq!(out.reward, -2000.0);
            assert_eq!(out.individual_payoffs, Some((-2000.0, -2000.0)));
            assert_eq!(pd(1.0, RewardMode::SumOfPayouts).step(Action::NoRepair, &mut rng).reward, -5000.0);
            assert_eq!(pd(0.0, RewardMode::Individual).step(Action::NoRepair, &mut rng).reward, -3000.0);
        }
    }

    #[test]
    fn analytic_lines() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let repair = newcomb(p).analytic_mean_reward(Action::Repair);
            assert!((repair - (-4000.0 + 2000.0 * p)).abs() < 1e-9);

            let ind = pd(p, RewardMode::Individual);
            let gap = ind.analytic_mean_reward(Action::NoRepair) - ind.analytic_mean_reward(Action::Repair);
            assert!((gap - 1000.0).abs() < 1e-9);

            let sum = pd(p, RewardMode::SumOfPayouts);
            let gap = sum.analytic_mean_reward(Action::Repair) - sum.analytic_mean_reward(Action::NoRepair);
            assert!((gap - 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn one_draw_per_step() {
        let env = newcomb(0.3);
        let mut stepped = RngStream::new(8);
        let mut reference = RngStream::new(8);
        for _ in 0..50 {
            env.step(Action::NoRepair, &mut stepped);
            let _: f64 = reference.random();
        }
        assert_eq!(stepped.random::<u64>(), reference.random::<u64>());
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(NewcombEnv::new(robot_view(), 1.01).is_err());
        assert!(PdEnv::new(BimatrixGame::oil_spill_robots(), -0.5, RewardMode::Individual).is_err());
        assert!(NewcombEnv::new(robot_view(), f64::NAN).is_err());
    }

    #[test]
    fn reward_modes_parse() {
        assert_eq!("individual".parse::<RewardMode>().unwrap(), RewardMode::Individual);
        assert_eq!("sum".parse::<RewardMode>().unwrap(), RewardMode::SumOfPayouts);
        assert!("both".parse::<RewardMode>().is_err());
    }
}
