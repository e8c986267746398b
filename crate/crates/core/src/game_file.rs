//! Plain-text game definitions.
//!
//! One `key = value` pair per line. Blank lines and text after `#` are
//! ignored. A file uses exactly one of two key sets:
//!
//! ```text
//! # symmetric Prisoner's Dilemma
//! T = -1000
//! R = -2000
//! P = -3000
//! S = -4000
//! ```
//!
//! or all eight cells of an arbitrary bimatrix game, where `row.<a>.<b>` is
//! the row player's payoff and `col.<a>.<b>` the column player's payoff when
//! the row player plays `<a>` and the column player plays `<b>`, with
//! `<a>, <b> ∈ {repair, norepair}`:
//!
//! ```text
//! row.repair.repair     = -2000
//! row.repair.norepair   = -4000
//! row.norepair.repair   = -1000
//! row.norepair.norepair = -3000
//! col.repair.repair     = -2000
//! col.repair.norepair   = -1000
//! col.norepair.repair   = -1000000
//! col.norepair.norepair = -3000
//! ```
//!
//! Values are decimal floating-point literals. Missing, duplicate, unknown
//! or mixed keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix_games::{make_pd_game, Action, BimatrixGame, PdParams, Player};

const PD_KEYS: [&str; 4] = ["T", "R", "P", "S"];

fn cell_key(player: Player, row: Action, col: Action) -> String {
    format!("{player}.{row}.{col}")
}

fn cell_keys() -> Vec<String> {
    let mut keys = Vec::with_capacity(8);
    for player in [Player::Row, Player::Col] {
        for row in Action::ALL {
            for col in Action::ALL {
                keys.push(cell_key(player, row, col));
            }
        }
    }
    keys
}

pub fn parse_game(text: &str) -> Result<BimatrixGame> {
    let cells = cell_keys();
    let mut values: BTreeMap<String, (f64, usize)> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !PD_KEYS.contains(&key) && !cells.iter().any(|c| c == key) {
            return Err(parse_err(format!("unknown key '{key}'")));
        }
        let v: f64 = value
            .parse()
            .map_err(|_| parse_err(format!("'{value}' is not a number")))?;
        if !v.is_finite() {
            return Err(parse_err(format!("value for '{key}' must be finite")));
        }
        if let Some((_, first)) = values.insert(key.to_string(), (v, line_no)) {
            return Err(parse_err(format!("duplicate key '{key}' (first set on line {first})")));
        }
    }

    let has_pd = PD_KEYS.iter().any(|k| values.contains_key(*k));
    let has_cells = cells.iter().any(|k| values.contains_key(k));
    let last_line = text.lines().count().max(1);
    let missing_err = |missing: Vec<&str>| Error::Parse {
        line: last_line,
        message: format!("missing keys: {}", missing.join(", ")),
    };

    match (has_pd, has_cells) {
        (true, true) => Err(Error::Parse {
            line: last_line,
            message: "use either T/R/P/S or the eight row.*/col.* keys, not both".into(),
        }),
        (false, false) => Err(missing_err(PD_KEYS.to_vec())),
        (true, false) => {
            let missing: Vec<&str> = PD_KEYS.iter().copied().filter(|k| !values.contains_key(*k)).collect();
            if !missing.is_empty() {
                return Err(missing_err(missing));
            }
            let get = |k: &str| values[k].0;
            make_pd_game(&PdParams::new(get("T"), get("R"), get("P"), get("S")))
        }
        (false, true) => {
            let missing: Vec<&str> = cells
                .iter()
                .map(String::as_str)
                .filter(|k| !values.contains_key(*k))
                .collect();
            if !missing.is_empty() {
                return Err(missing_err(missing));
            }
            let table = |player| {
                let mut t = [[0.0; 2]; 2];
                for row in Action::ALL {
                    for col in Action::ALL {
                        t[row.index()][col.index()] = values[&cell_key(player, row, col)].0;
                    }
                }
                t
            };
            BimatrixGame::new(table(Player::Row), table(Player::Col))
        }
    }
}

pub fn read_game(path: &Path) -> Result<BimatrixGame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("cannot read game file {}", path.display()), e))?;
    parse_game(&text)
}

/// Writes `game` in the eight-cell form.
pub fn format_game(game: &BimatrixGame) -> String {
    let mut out = String::new();
    for player in [Player::Row, Player::Col] {
        for row in Action::ALL {
            for col in Action::ALL {
                out.push_str(&format!(
                    "{} = {}\n",
                    cell_key(player, row, col),
                    game.payoff(player, row, col)
                ));
            }
        }
    }
    out
}
