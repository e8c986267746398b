//! C interface to the `dilemma` simulator.
//!
//! Objects cross the boundary as opaque pointers (`DilemmaGame`,
//! `DilemmaConfig`, `DilemmaSweep`) and must be released with the matching
//! `*_free` function. Every fallible call returns a `DilemmaStatus`; on failure
//! `dilemma_last_error_message` describes the most recent error on the calling
//! thread. Strings handed out by this library are freed with
//! `dilemma_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dilemma::agents::AgentSpec;
use dilemma::csv_io::to_csv_string;
use dilemma::environments::RewardMode;
use dilemma::game_file::parse_game;
use dilemma::matrix_games::{
    check_pd_conditions, derive_newcomb_view, dominant_action, eu_threshold, expected_utility, make_pd_game,
    Action, BimatrixGame, NewcombView, PdParams, Player, Threshold,
};
use dilemma::presets::figure_preset;
use dilemma::simulation::{probability_grid, run_sweep, EnvSpec, ExperimentConfig, SweepResult};
use dilemma::svg::{render_svg_string, PlotKind};
use dilemma::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilemmaStatus {
    Ok = 0,
    InvalidArgument = 1,
    Config = 2,
    Parse = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilemmaAction {
    Repair = 0,
    NoRepair = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilemmaPlayer {
    Row = 0,
    Col = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilemmaThresholdKind {
    /// The expected utilities cross at the reported accuracy.
    Crossing = 0,
    /// One action is preferred at every accuracy.
    NoCrossing = 1,
    /// Both actions have the same expected utility everywhere.
    AlwaysIndifferent = 2,
}

/// Reported by `dilemma_dominant_action` when no action strictly dominates.
pub const DILEMMA_NO_DOMINANT_ACTION: i32 = -1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilemmaSweepPoint {
    pub probability: f64,
    pub mean_payout: f64,
    pub mean_payout_stderr: f64,
    pub repair_freq: f64,
    pub repair_freq_stderr: f64,
    pub runs: u64,
}

pub struct DilemmaGame(BimatrixGame);

pub struct DilemmaConfig(ExperimentConfig);

pub struct DilemmaSweep(SweepResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DilemmaStatus {
    match err {
        Error::InvalidArgument(_) => DilemmaStatus::InvalidArgument,
        Error::Config(_) => DilemmaStatus::Config,
        Error::Parse { .. } => DilemmaStatus::Parse,
        Error::Io { .. } => DilemmaStatus::Io,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
    Arg(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DilemmaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DilemmaStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            DilemmaStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            DilemmaStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic".into());
            DilemmaStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn out<T>(p: *mut T, what: &'static str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Arg(format!("{what} is not valid UTF-8")))
}

fn to_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail::Arg("string contains a NUL byte".into()))
}

fn action(a: DilemmaAction) -> Action {
    match a {
        DilemmaAction::Repair => Action::Repair,
        DilemmaAction::NoRepair => Action::NoRepair,
    }
}

fn player(p: DilemmaPlayer) -> Player {
    match p {
        DilemmaPlayer::Row => Player::Row,
        DilemmaPlayer::Col => Player::Col,
    }
}

unsafe fn read_table(p: *const f64, what: &'static str) -> Result<[[f64; 2]; 2], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    let s = std::slice::from_raw_parts(p, 4);
    Ok([[s[0], s[1]], [s[2], s[3]]])
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dilemma_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes whether (T, R, P, S) form a Prisoner's Dilemma to `out_valid`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_check_pd(t: f64, r: f64, p: f64, s: f64, out_valid: *mut bool) -> DilemmaStatus {
    guard(|| {
        let ok = check_pd_conditions(&PdParams::new(t, r, p, s))?;
        out(out_valid, "out_valid", ok)
    })
}

/// Symmetric game from (T, R, P, S).
#[no_mangle]
pub unsafe extern "C" fn dilemma_game_new_pd(
    t: f64,
    r: f64,
    p: f64,
    s: f64,
    out_game: *mut *mut DilemmaGame,
) -> DilemmaStatus {
    guard(|| {
        let g = make_pd_game(&PdParams::new(t, r, p, s))?;
        out(out_game, "out_game", Box::into_raw(Box::new(DilemmaGame(g))))
    })
}

/// Game from two row-major 2x2 tables indexed `[row action][col action]`,
/// action 0 being repair.
#[no_mangle]
pub unsafe extern "C" fn dilemma_game_new(
    row: *const f64,
    col: *const f64,
    out_game: *mut *mut DilemmaGame,
) -> DilemmaStatus {
    guard(|| {
        let g = BimatrixGame::new(read_table(row, "row")?, read_table(col, "col")?)?;
        out(out_game, "out_game", Box::into_raw(Box::new(DilemmaGame(g))))
    })
}

/// Game from the text of a game file.
#[no_mangle]
pub unsafe extern "C" fn dilemma_game_parse(text: *const c_char, out_game: *mut *mut DilemmaGame) -> DilemmaStatus {
    guard(|| {
        let g = parse_game(read_str(text, "text")?)?;
        out(out_game, "out_game", Box::into_raw(Box::new(DilemmaGame(g))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_game_free(game: *mut DilemmaGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// The 2x2 view `viewer` faces when the opponent's move is a prediction,
/// written row-major as `[prediction][own action]` into `out_cells[4]`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_game_newcomb_view(
    game: *const DilemmaGame,
    viewer: DilemmaPlayer,
    out_cells: *mut f64,
) -> DilemmaStatus {
    guard(|| {
        let g = get(game, "game")?;
        if out_cells.is_null() {
            return Err(Fail::Null("out_cells"));
        }
        let cells = derive_newcomb_view(&g.0, player(viewer)).cells();
        let flat = [cells[0][0], cells[0][1], cells[1][0], cells[1][1]];
        ptr::copy_nonoverlapping(flat.as_ptr(), out_cells, 4);
        Ok(())
    })
}

unsafe fn view_of(game: *const DilemmaGame, viewer: DilemmaPlayer) -> Result<NewcombView, Fail> {
    Ok(derive_newcomb_view(&get(game, "game")?.0, player(viewer)))
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_expected_utility(
    game: *const DilemmaGame,
    viewer: DilemmaPlayer,
    action_: DilemmaAction,
    accuracy: f64,
    out_value: *mut f64,
) -> DilemmaStatus {
    guard(|| {
        let v = expected_utility(&view_of(game, viewer)?, action(action_), accuracy)?;
        out(out_value, "out_value", v)
    })
}

/// Accuracy at which both actions have equal expected utility. On a crossing,
/// `out_value` receives the threshold and `out_exact` (if not null) an owned
/// string holding it as an exact fraction. Otherwise `out_value` is NaN and
/// `out_exact` null.
#[no_mangle]
pub unsafe extern "C" fn dilemma_eu_threshold(
    game: *const DilemmaGame,
    viewer: DilemmaPlayer,
    out_kind: *mut DilemmaThresholdKind,
    out_value: *mut f64,
    out_exact: *mut *mut c_char,
) -> DilemmaStatus {
    guard(|| {
        let t = eu_threshold(&view_of(game, viewer)?);
        let (kind, exact) = match &t {
            Threshold::Crossing(r) => (DilemmaThresholdKind::Crossing, Some(r.to_string())),
            Threshold::NoCrossing => (DilemmaThresholdKind::NoCrossing, None),
            Threshold::AlwaysIndifferent => (DilemmaThresholdKind::AlwaysIndifferent, None),
        };
        out(out_kind, "out_kind", kind)?;
        out(out_value, "out_value", t.to_f64().unwrap_or(f64::NAN))?;
        if !out_exact.is_null() {
            out_exact.write(match exact {
                Some(s) => to_c_string(s)?,
                None => ptr::null_mut(),
            });
        }
        Ok(())
    })
}

/// Strictly dominant action for `viewer` as a `DilemmaAction` value, or
/// `DILEMMA_NO_DOMINANT_ACTION`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_dominant_action(
    game: *const DilemmaGame,
    viewer: DilemmaPlayer,
    out_action: *mut i32,
) -> DilemmaStatus {
    guard(|| {
        let a = match dominant_action(&view_of(game, viewer)?) {
            Some(Action::Repair) => DilemmaAction::Repair as i32,
            Some(Action::NoRepair) => DilemmaAction::NoRepair as i32,
            None => DILEMMA_NO_DOMINANT_ACTION,
        };
        out(out_action, "out_action", a)
    })
}

fn boxed_config(cfg: ExperimentConfig) -> *mut DilemmaConfig {
    Box::into_raw(Box::new(DilemmaConfig(cfg)))
}

/// Configuration of one of the built-in figure experiments (`fig1a` ... `fig2c`).
#[no_mangle]
pub unsafe extern "C" fn dilemma_config_from_preset(
    name: *const c_char,
    out_config: *mut *mut DilemmaConfig,
) -> DilemmaStatus {
    guard(|| {
        let preset = figure_preset(read_str(name, "name")?)?;
        out(out_config, "out_config", boxed_config(preset.config))
    })
}

/// Newcomb sweep over the accuracy of predictions about `viewer`, with a
/// comma-separated agent list such as `"sarsa,avgq,eu"`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_config_newcomb(
    game: *const DilemmaGame,
    viewer: DilemmaPlayer,
    agents: *const c_char,
    out_config: *mut *mut DilemmaConfig,
) -> DilemmaStatus {
    guard(|| {
        let view = view_of(game, viewer)?;
        let roster = parse_roster(read_str(agents, "agents")?)?;
        let env = EnvSpec::Newcomb { view, viewer: player(viewer) };
        out(out_config, "out_config", boxed_config(ExperimentConfig::new("newcomb", env, roster)))
    })
}

/// Prisoner's Dilemma sweep over the opponent's cooperation probability.
/// `modes` is a comma-separated list of `individual` and `sum`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_config_pd(
    game: *const DilemmaGame,
    agents: *const c_char,
    modes: *const c_char,
    out_config: *mut *mut DilemmaConfig,
) -> DilemmaStatus {
    guard(|| {
        let game = get(game, "game")?.0;
        let roster = parse_roster(read_str(agents, "agents")?)?;
        let modes = read_str(modes, "modes")?
            .split(',')
            .map(|m| m.trim().parse::<RewardMode>())
            .collect::<Result<Vec<_>, _>>()?;
        let env = EnvSpec::Pd { game, modes };
        out(out_config, "out_config", boxed_config(ExperimentConfig::new("pd", env, roster)))
    })
}

fn parse_roster(s: &str) -> Result<Vec<AgentSpec>, Error> {
    s.split(',').map(|a| a.trim().parse()).collect()
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_config_free(config: *mut DilemmaConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_config_set_steps(config: *mut DilemmaConfig, steps: u64) -> DilemmaStatus {
    guard(|| {
        get_mut(config, "config")?.0.steps = steps;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_config_set_runs(config: *mut DilemmaConfig, runs: u64) -> DilemmaStatus {
    guard(|| {
        get_mut(config, "config")?.0.runs = usize::try_from(runs).map_err(|_| Fail::Arg("runs too large".into()))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_config_set_seed(config: *mut DilemmaConfig, seed: u64) -> DilemmaStatus {
    guard(|| {
        get_mut(config, "config")?.0.seed = seed;
        Ok(())
    })
}

/// Worker threads for the sweep; 0 uses the global pool.
#[no_mangle]
pub unsafe extern "C" fn dilemma_config_set_threads(config: *mut DilemmaConfig, threads: u32) -> DilemmaStatus {
    guard(|| {
        get_mut(config, "config")?.0.threads = (threads > 0).then_some(threads as usize);
        Ok(())
    })
}

/// Hyperparameters for SARSA (alpha, gamma, epsilon); epsilon also applies to AVGQ.
#[no_mangle]
pub unsafe extern "C" fn dilemma_config_set_hyperparams(
    config: *mut DilemmaConfig,
    alpha: f64,
    gamma: f64,
    epsilon: f64,
) -> DilemmaStatus {
    guard(|| {
        let hp = dilemma::agents::Hyperparams::new(alpha, gamma, epsilon)?;
        get_mut(config, "config")?.0.hyperparams = hp;
        Ok(())
    })
}

/// Probability grid `start, start + step, ..., stop`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_config_set_grid(
    config: *mut DilemmaConfig,
    start: f64,
    stop: f64,
    step: f64,
) -> DilemmaStatus {
    guard(|| {
        let grid = probability_grid(start, stop, step)?;
        get_mut(config, "config")?.0.grid = grid;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_run_sweep(config: *const DilemmaConfig, out_sweep: *mut *mut DilemmaSweep) -> DilemmaStatus {
    guard(|| {
        let result = run_sweep(&get(config, "config")?.0)?;
        out(out_sweep, "out_sweep", Box::into_raw(Box::new(DilemmaSweep(result))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_sweep_free(sweep: *mut DilemmaSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Number of (agent, probability) points; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dilemma_sweep_len(sweep: *const DilemmaSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.points.len())
}

unsafe fn point_at<'a>(sweep: *const DilemmaSweep, index: usize) -> Result<&'a dilemma::simulation::SweepPoint, Fail> {
    let s: &DilemmaSweep = get(sweep, "sweep")?;
    s.0.points
        .get(index)
        .ok_or_else(|| Fail::Arg(format!("point index {index} out of range ({} points)", s.0.points.len())))
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_sweep_point(
    sweep: *const DilemmaSweep,
    index: usize,
    out_point: *mut DilemmaSweepPoint,
) -> DilemmaStatus {
    guard(|| {
        let p = point_at(sweep, index)?;
        let value = DilemmaSweepPoint {
            probability: p.probability,
            mean_payout: p.mean_payout.mean,
            mean_payout_stderr: p.mean_payout.stderr,
            repair_freq: p.repair_freq.mean,
            repair_freq_stderr: p.repair_freq.stderr,
            runs: p.runs as u64,
        };
        out(out_point, "out_point", value)
    })
}

/// Series label of a point, as an owned string.
#[no_mangle]
pub unsafe extern "C" fn dilemma_sweep_agent(
    sweep: *const DilemmaSweep,
    index: usize,
    out_agent: *mut *mut c_char,
) -> DilemmaStatus {
    guard(|| {
        let p = point_at(sweep, index)?;
        out(out_agent, "out_agent", to_c_string(p.agent.clone())?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn dilemma_sweep_to_csv(sweep: *const DilemmaSweep, out_csv: *mut *mut c_char) -> DilemmaStatus {
    guard(|| {
        let text = to_csv_string(&get(sweep, "sweep")?.0)?;
        out(out_csv, "out_csv", to_c_string(text)?)
    })
}

/// SVG chart of the sweep; `plot` is `"payout"` or `"action"`.
#[no_mangle]
pub unsafe extern "C" fn dilemma_sweep_to_svg(
    sweep: *const DilemmaSweep,
    plot: *const c_char,
    out_svg: *mut *mut c_char,
) -> DilemmaStatus {
    guard(|| {
        let kind: PlotKind = read_str(plot, "plot")?.parse()?;
        let text = render_svg_string(&get(sweep, "sweep")?.0, kind)?;
        out(out_svg, "out_svg", to_c_string(text)?)
    })
}
