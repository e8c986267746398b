//! Sweep-level invariants at full scale (50 runs × 10000 steps).

use dilemma::agents::AgentSpec;
use dilemma::environments::{Environment, NewcombEnv, PdEnv, RewardMode};
use dilemma::matrix_games::{derive_newcomb_view, Action, BimatrixGame, Player};
use dilemma::presets::figure_preset;
use dilemma::simulation::{run_sweep, EnvSpec, ExperimentConfig};

fn robot_newcomb() -> EnvSpec {
    EnvSpec::Newcomb {
        view: derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row),
        viewer: Player::Row,
    }
}

#[test]
fn result_independent_of_thread_count() {
    let mut cfg = figure_preset("fig1b").unwrap().config;
    cfg.steps = 2000;
    cfg.runs = 8;
    cfg.threads = Some(1);
    let one = run_sweep(&cfg).unwrap();
    cfg.threads = Some(3);
    let three = run_sweep(&cfg).unwrap();
    cfg.threads = None;
    let global = run_sweep(&cfg).unwrap();
    assert_eq!(one, three);
    assert_eq!(one, global);

    cfg.seed += 1;
    assert_ne!(one, run_sweep(&cfg).unwrap());
}

#[test]
fn fixed_policies_match_analytic_means() {
    let view = derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row);
    let cfg = ExperimentConfig::new(
        "oracle",
        robot_newcomb(),
        vec![AgentSpec::AlwaysRepair, AgentSpec::NeverRepair, AgentSpec::Eu],
    );
    let r = run_sweep(&cfg).unwrap();
    for p in &r.points {
        let env = Environment::Newcomb(NewcombEnv::new(view, p.probability).unwrap());
        let expected = match p.agent.as_str() {
            "always-repair" => env.analytic_mean_reward(Action::Repair),
            "never-repair" => env.analytic_mean_reward(Action::NoRepair),
            _ => env
                .analytic_mean_reward(Action::Repair)
                .max(env.analytic_mean_reward(Action::NoRepair)),
        };
        let se = p.mean_payout.stderr;
        assert!(
            (p.mean_payout.mean - expected).abs() <= 3.0 * se + 1e-9 * expected.abs(),
            "{} p={}: {} ± {se} vs {expected}",
            p.agent,
            p.probability,
            p.mean_payout.mean
        );
    }
}

#[test]
fn eu_repair_frequency_steps_at_three_quarters() {
    let mut cfg = ExperimentConfig::new("eu", robot_newcomb(), vec![AgentSpec::Eu]);
    cfg.runs = 5;
    cfg.steps = 1000;
    let r = run_sweep(&cfg).unwrap();
    for p in r.series("eu") {
        let f = p.repair_freq.mean;
        match p.probability {
            x if x < 0.75 => assert_eq!(f, 0.0),
            x if x > 0.75 => assert_eq!(f, 1.0),
            _ => assert!((f - 0.5).abs() < 0.05, "{f}"),
        }
    }
}

#[test]
fn learners_pay_at_most_the_exploration_tax() {
    let mut cfg = ExperimentConfig::new("extremes", robot_newcomb(), vec![AgentSpec::Sarsa, AgentSpec::AvgQ]);
    cfg.grid = vec![0.0, 1.0];
    let r = run_sweep(&cfg).unwrap();
    let view = derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row);
    for p in &r.points {
        let env = Environment::Newcomb(NewcombEnv::new(view, p.probability).unwrap());
        let (r, n) = (env.analytic_mean_reward(Action::Repair), env.analytic_mean_reward(Action::NoRepair));
        // epsilon-greedy pays at most the exploration tax on top of the best action
        let floor = 0.9 * r.max(n) + 0.1 * (r + n) / 2.0;
        let m = p.mean_payout;
        assert!(m.mean >= floor - 3.0 * m.stderr, "{} p={}: {} vs {floor}", p.agent, p.probability, m.mean);
        assert!(m.mean <= r.max(n) + 3.0 * m.stderr);
    }
}

#[test]
fn sarsa_flips_with_reward_mode() {
    let env = EnvSpec::Pd {
        game: BimatrixGame::oil_spill_robots(),
        modes: vec![RewardMode::Individual, RewardMode::SumOfPayouts],
    };
    let r = run_sweep(&ExperimentConfig::new("flip", env, vec![AgentSpec::Sarsa])).unwrap();
    for p in r.series("sarsa-I") {
        assert!(p.repair_freq.mean <= 0.15, "I q={}: {}", p.probability, p.repair_freq.mean);
    }
    for p in r.series("sarsa-T") {
        assert!(p.repair_freq.mean >= 0.85, "T q={}: {}", p.probability, p.repair_freq.mean);
    }
}

#[test]
fn sarsa_learns_from_repeated_accurate_predictions() {
    let mut cfg = ExperimentConfig::new("p95", robot_newcomb(), vec![AgentSpec::Sarsa]);
    cfg.grid = vec![0.95];
    let r = run_sweep(&cfg).unwrap();
    assert!(r.points[0].repair_freq.mean >= 0.85);
}

#[test]
fn eu_agent_in_pd_plays_dominant_action() {
    let env = EnvSpec::Pd {
        game: BimatrixGame::oil_spill_robots(),
        modes: vec![RewardMode::Individual, RewardMode::SumOfPayouts],
    };
    let mut cfg = ExperimentConfig::new("eu-pd", env, vec![AgentSpec::Eu]);
    cfg.steps = 200;
    cfg.runs = 2;
    let r = run_sweep(&cfg).unwrap();
    assert!(r.series("eu-I").all(|p| p.repair_freq.mean == 0.0));
    assert!(r.series("eu-T").all(|p| p.repair_freq.mean == 1.0));
    let q = PdEnv::new(BimatrixGame::oil_spill_robots(), 0.5, RewardMode::Individual).unwrap();
    let m = r.point("eu-I", 0.5).unwrap().mean_payout;
    let expected = Environment::Pd(q).analytic_mean_reward(Action::NoRepair);
    assert!((m.mean - expected).abs() <= 3.0 * m.stderr, "{} ± {} vs {expected}", m.mean, m.stderr);
}
