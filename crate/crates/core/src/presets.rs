//! Ready-made experiments for the six result figures.
//!
//! | preset | environment                        | agents                                  | plot   |
//! |--------|------------------------------------|-----------------------------------------|--------|
//! | fig1a  | Newcomb, robot view                | always-repair, never-repair             | payout |
//! | fig1b  | Newcomb, robot view                | sarsa, avgq, eu                         | action |
//! | fig1c  | Newcomb, robot view                | sarsa, avgq, eu                         | payout |
//! | fig2a  | PD, individual rewards             | always-repair, never-repair             | payout |
//! | fig2b  | PD, summed rewards                 | always-repair, never-repair             | payout |
//! | fig2c  | PD, individual and summed rewards  | sarsa, avgq                             | payout |
//!
//! All use 10000 steps, 50 runs, the grid `0:1:0.05`, α = 0.1, γ = 0.9,
//! ε = 0.1. The Newcomb presets use the robot's view of the robot-human
//! game; the PD presets use the symmetric robot-robot game.

use crate::agents::AgentSpec;
use crate::environments::RewardMode;
use crate::error::{Error, Result};
use crate::matrix_games::{derive_newcomb_view, BimatrixGame, Player};
use crate::simulation::{EnvSpec, ExperimentConfig};
use crate::svg::PlotKind;

pub const PRESET_NAMES: [&str; 6] = ["fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub config: ExperimentConfig,
    pub plot: PlotKind,
}

impl Preset {
    pub fn is_newcomb(&self) -> bool {
        matches!(self.config.env, EnvSpec::Newcomb { .. })
    }
}

pub fn figure_preset(name: &str) -> Result<Preset> {
    use AgentSpec::*;

    let newcomb = || EnvSpec::Newcomb {
        view: derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row),
        viewer: Player::Row,
    };
    let pd = |modes: Vec<RewardMode>| EnvSpec::Pd {
        game: BimatrixGame::oil_spill_robots(),
        modes,
    };

    let (env, roster, plot) = match name {
        "fig1a" => (newcomb(), vec![AlwaysRepair, NeverRepair], PlotKind::Payout),
        "fig1b" => (newcomb(), vec![Sarsa, AvgQ, Eu], PlotKind::Action),
        "fig1c" => (newcomb(), vec![Sarsa, AvgQ, Eu], PlotKind::Payout),
        "fig2a" => (pd(vec![RewardMode::Individual]), vec![AlwaysRepair, NeverRepair], PlotKind::Payout),
        "fig2b" => (pd(vec![RewardMode::SumOfPayouts]), vec![AlwaysRepair, NeverRepair], PlotKind::Payout),
        "fig2c" => (
            pd(vec![RewardMode::Individual, RewardMode::SumOfPayouts]),
            vec![Sarsa, AvgQ],
            PlotKind::Payout,
        ),
        other => {
            return Err(Error::config(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset {
        config: ExperimentConfig::new(name, env, roster),
        plot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESET_NAMES {
            let p = figure_preset(name).unwrap();
            p.config.validate().unwrap();
            assert_eq!(p.config.steps, 10_000);
            assert_eq!(p.config.runs, 50);
            assert_eq!(p.config.grid.len(), 21);
            assert_eq!(p.config.hyperparams, crate::agents::Hyperparams::default());
        }
    }

    #[test]
    fn rosters() {
        let b = figure_preset("fig1b").unwrap();
        assert!(b.is_newcomb());
        assert_eq!(b.config.roster, [AgentSpec::Sarsa, AgentSpec::AvgQ, AgentSpec::Eu]);
        assert_eq!(b.plot, PlotKind::Action);

        let a = figure_preset("fig1a").unwrap();
        assert_eq!(a.config.roster, [AgentSpec::AlwaysRepair, AgentSpec::NeverRepair]);
        assert_eq!(a.plot, PlotKind::Payout);

        let c = figure_preset("fig2c").unwrap();
        let labels: Vec<String> = c.config.series().into_iter().map(|s| s.label).collect();
        assert_eq!(labels, ["sarsa-I", "sarsa-T", "avgq-I", "avgq-T"]);
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(figure_preset("fig3"), Err(Error::Config(_))));
    }
}
