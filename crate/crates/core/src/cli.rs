//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid flags or configurations, 1 for
//! IO failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::agents::AgentSpec;
use crate::csv_io::{emit_csv, to_csv_string};
use crate::environments::RewardMode;
use crate::error::{Error, Result};
use crate::game_file::read_game;
use crate::matrix_games::{
    check_pd_conditions, derive_newcomb_view, dominant_action, eu_threshold, make_pd_game, Action,
    BimatrixGame, NewcombView, PdParams, Player,
};
use crate::presets::figure_preset;
use crate::simulation::{budget_from_env, probability_grid, run_sweep, EnvSpec, ExperimentConfig};
use crate::svg::{render_svg, PlotKind};

#[derive(Debug, Parser)]
#[command(name = "dilemma", version, about = "Reinforcement learning in Newcomb's Problem and the Prisoner's Dilemma")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep agents over the accuracy of a Newcomb predictor.
    Newcomb(NewcombArgs),
    /// Sweep agents over the cooperation probability of a fixed PD opponent.
    Pd(PdArgs),
    /// Check Prisoner's Dilemma conditions and expected-utility thresholds.
    Check(CheckArgs),
    /// Print both players' Newcomb views, dominance and thresholds of a game.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Figure preset (fig1a, fig1b, fig1c, fig2a, fig2b, fig2c); other flags override it.
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated agents: sarsa, avgq, eu, always-repair, never-repair.
    #[arg(long)]
    agents: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Steps per run.
    #[arg(long)]
    steps: Option<u64>,
    /// Independent runs per grid point.
    #[arg(long)]
    runs: Option<usize>,
    /// Probability grid as start:stop:step.
    #[arg(long = "p-grid")]
    p_grid: Option<String>,
    /// Tail fraction of each run used for statistics.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Game definition file.
    #[arg(long)]
    game: Option<PathBuf>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot output path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Plotted metric: payout or action.
    #[arg(long)]
    plot: Option<String>,
}

#[derive(Debug, Args)]
struct NewcombArgs {
    /// Whose table the predictor plays against: robot (row) or human (col).
    #[arg(long)]
    view: Option<String>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Debug, Args)]
struct PdArgs {
    /// Reward mode(s), comma-separated: individual, sum.
    #[arg(long)]
    mode: Option<String>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Symmetric PD payoffs as T,R,P,S.
    #[arg(long, allow_hyphen_values = true)]
    pd: Option<String>,
    /// Game definition file.
    #[arg(long)]
    game: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Game definition file.
    #[arg(long)]
    game: PathBuf,
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the process's stdout and stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Newcomb(a) => sweep_command(SweepKind::Newcomb(a.view), a.sweep, out),
        Command::Pd(a) => sweep_command(SweepKind::Pd(a.mode), a.sweep, out),
        Command::Check(a) => check_command(a, out),
        Command::Analyze(a) => analyze_command(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Io { .. } => 1,
                _ => 2,
            }
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("cannot write to stdout", e))
}

fn parse_list<T, F>(s: &str, f: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Result<T>,
{
    s.split(',').map(|x| f(x.trim())).collect()
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| -> Result<f64> {
        x.trim()
            .parse()
            .map_err(|_| Error::config(format!("bad number '{x}' in --p-grid")))
    };
    match parts.as_slice() {
        [start, stop, step] => probability_grid(num(start)?, num(stop)?, num(step)?),
        [single] => probability_grid(num(single)?, num(single)?, 1.0),
        _ => Err(Error::config(format!("--p-grid expects start:stop:step, got '{s}'"))),
    }
}

fn parse_viewer(s: &str) -> Result<Player> {
    match s {
        "robot" | "row" => Ok(Player::Row),
        "human" | "col" => Ok(Player::Col),
        other => Err(Error::config(format!("unknown view '{other}' (expected robot or human)"))),
    }
}

fn viewer_name(p: Player) -> &'static str {
    match p {
        Player::Row => "robot",
        Player::Col => "human",
    }
}

enum SweepKind {
    Newcomb(Option<String>),
    Pd(Option<String>),
}

fn build_config(kind: &SweepKind, args: &SweepArgs) -> Result<(ExperimentConfig, Option<PlotKind>)> {
    let game = args.game.as_deref().map(read_game).transpose()?;

    let (mut cfg, mut plot) = match &args.preset {
        Some(name) => {
            let preset = figure_preset(name)?;
            let matches = matches!(
                (kind, preset.is_newcomb()),
                (SweepKind::Newcomb(_), true) | (SweepKind::Pd(_), false)
            );
            if !matches {
                let sub = if preset.is_newcomb() { "newcomb" } else { "pd" };
                return Err(Error::config(format!("preset '{name}' belongs to the '{sub}' subcommand")));
            }
            (preset.config, Some(preset.plot))
        }
        None => match kind {
            SweepKind::Newcomb(_) => {
                let view = derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row);
                let env = EnvSpec::Newcomb { view, viewer: Player::Row };
                let roster = vec![AgentSpec::Sarsa, AgentSpec::AvgQ, AgentSpec::Eu];
                (ExperimentConfig::new("newcomb-robot", env, roster), None)
            }
            SweepKind::Pd(_) => {
                let env = EnvSpec::Pd {
                    game: BimatrixGame::oil_spill_robots(),
                    modes: vec![RewardMode::Individual],
                };
                (ExperimentConfig::new("pd-individual", env, vec![AgentSpec::Sarsa, AgentSpec::AvgQ]), None)
            }
        },
    };

    match kind {
        SweepKind::Newcomb(view) => {
            let EnvSpec::Newcomb { viewer, .. } = &cfg.env else { unreachable!() };
            let viewer = match view {
                Some(v) => parse_viewer(v)?,
                None => *viewer,
            };
            let default_game = BimatrixGame::oil_spill_robot_human();
            let view = derive_newcomb_view(game.as_ref().unwrap_or(&default_game), viewer);
            cfg.env = EnvSpec::Newcomb { view, viewer };
            if args.preset.is_none() {
                cfg.name = format!("newcomb-{}", viewer_name(viewer));
            }
        }
        SweepKind::Pd(mode) => {
            let EnvSpec::Pd { game: preset_game, modes } = &cfg.env else { unreachable!() };
            let modes = match mode {
                Some(m) => parse_list(m, |s| s.parse::<RewardMode>())?,
                None => modes.clone(),
            };
            let game = game.unwrap_or(*preset_game);
            if args.preset.is_none() {
                cfg.name = format!("pd-{}", modes.iter().map(|m| m.id()).collect::<Vec<_>>().join("+"));
            }
            cfg.env = EnvSpec::Pd { game, modes };
        }
    }

    if let Some(agents) = &args.agents {
        cfg.roster = parse_list(agents, |s| s.parse::<AgentSpec>())?;
    }
    if let Some(v) = args.alpha {
        cfg.hyperparams.alpha = v;
    }
    if let Some(v) = args.gamma {
        cfg.hyperparams.gamma = v;
    }
    if let Some(v) = args.epsilon {
        cfg.hyperparams.epsilon = v;
    }
    if let Some(v) = args.steps {
        cfg.steps = v;
    }
    if let Some(v) = args.runs {
        cfg.runs = v;
    }
    if let Some(g) = &args.p_grid {
        cfg.grid = parse_grid(g)?;
    }
    if let Some(v) = args.window {
        cfg.window = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    cfg.threads = args.threads;
    cfg.max_total_steps = budget_from_env()?;
    if let Some(p) = &args.plot {
        plot = Some(p.parse()?);
    }
    cfg.validate()?;
    Ok((cfg, plot))
}

fn sweep_command(kind: SweepKind, args: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, plot) = build_config(&kind, &args)?;
    let result = run_sweep(&cfg)?;
    match &args.out {
        Some(path) => emit_csv(&result, path)?,
        None => write_out(out, &to_csv_string(&result)?)?,
    }
    if let Some(path) = &args.svg {
        render_svg(&result, plot.unwrap_or(PlotKind::Payout), path)?;
    }
    Ok(())
}

fn parse_pd(s: &str) -> Result<PdParams> {
    let values = parse_list(s, |x| {
        x.parse::<f64>()
            .map_err(|_| Error::config(format!("bad payoff '{x}' in --pd")))
    })?;
    match values.as_slice() {
        &[t, r, p, s] => Ok(PdParams::new(t, r, p, s)),
        _ => Err(Error::config("--pd expects four values T,R,P,S")),
    }
}

fn describe_view(label: &str, view: &NewcombView) -> String {
    let mut s = format!("{label} view (rows: prediction, columns: own action):\n");
    s.push_str(&format!("  {:<18}{:>14}{:>14}\n", "", "repair", "norepair"));
    for pred in Action::ALL {
        s.push_str(&format!(
            "  {:<18}{:>14}{:>14}\n",
            format!("predict {pred}"),
            view.payoff(pred, Action::Repair),
            view.payoff(pred, Action::NoRepair)
        ));
    }
    let dominant = dominant_action(view).map_or("none".to_string(), |a| a.to_string());
    s.push_str(&format!("  dominant action: {dominant}\n"));
    s.push_str(&format!("  EU threshold: {}\n", eu_threshold(view)));
    s
}

fn check_command(args: CheckArgs, out: &mut dyn Write) -> Result<()> {
    let game = match (&args.pd, &args.game) {
        (Some(pd), None) => make_pd_game(&parse_pd(pd)?)?,
        (None, Some(path)) => read_game(path)?,
        _ => return Err(Error::config("check needs exactly one of --pd or --game")),
    };
    let mut text = String::new();
    match game.pd_params() {
        Some(p) => {
            text.push_str(&format!(
                "T={} R={} P={} S={}\n",
                p.temptation, p.reward, p.punishment, p.sucker
            ));
            text.push_str(&format!("valid PD: {}\n", check_pd_conditions(&p)?));
            let view = derive_newcomb_view(&game, Player::Row);
            let dominant = dominant_action(&view).map_or("none".to_string(), |a| a.to_string());
            text.push_str(&format!("dominant action: {dominant}\n"));
            text.push_str(&format!("EU threshold: {}\n", eu_threshold(&view)));
        }
        None => {
            text.push_str("valid PD: false (game is not symmetric)\n");
            for player in [Player::Row, Player::Col] {
                let view = derive_newcomb_view(&game, player);
                text.push_str(&format!("{player} EU threshold: {}\n", eu_threshold(&view)));
            }
        }
    }
    write_out(out, &text)
}

fn analyze_command(args: AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let game = read_game(&args.game)?;
    let mut text = format!(
        "game: {}\n",
        if game.is_symmetric() { "symmetric" } else { "asymmetric" }
    );
    for player in [Player::Row, Player::Col] {
        let label = format!("{player} ({})", viewer_name(player));
        text.push_str(&describe_view(&label, &derive_newcomb_view(&game, player)));
    }
    write_out(out, &text)
}
