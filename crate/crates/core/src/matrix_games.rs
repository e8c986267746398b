//! Two-player, two-action games.
//!
//! Payoffs are signed: a regret of 2000 is stored as `-2000.0`, and every
//! agent maximizes. A [`BimatrixGame`] holds both players' tables; a
//! [`NewcombView`] re-reads one player's table with the opponent's action
//! relabelled as a prediction of the player's own choice.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{check_probability, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    /// Cooperate.
    Repair,
    /// Defect.
    NoRepair,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Repair, Action::NoRepair];

    pub fn other(self) -> Action {
        match self {
            Action::Repair => Action::NoRepair,
            Action::NoRepair => Action::Repair,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Action::Repair => 0,
            Action::NoRepair => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Action> {
        match index {
            0 => Some(Action::Repair),
            1 => Some(Action::NoRepair),
            _ => None,
        }
    }

    /// Lower-case identifier used in game files and CLI output.
    pub fn id(self) -> &'static str {
        match self {
            Action::Repair => "repair",
            Action::NoRepair => "norepair",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Row,
    Col,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Row => Player::Col,
            Player::Col => Player::Row,
        }
    }

    fn index(self) -> usize {
        match self {
            Player::Row => 0,
            Player::Col => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Row => "row",
            Player::Col => "col",
        })
    }
}

/// A 2×2 game with a payoff table per player, indexed
/// `[player][row_action][col_action]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BimatrixGame {
    payoff: [[[f64; 2]; 2]; 2],
}

impl BimatrixGame {
    /// Builds a game from the row player's and the column player's tables,
    /// both indexed `[row_action][col_action]`.
    pub fn new(row: [[f64; 2]; 2], col: [[f64; 2]; 2]) -> Result<Self> {
        let payoff = [row, col];
        if payoff.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("game payoffs must be finite"));
        }
        Ok(BimatrixGame { payoff })
    }

    /// The robot-robot oil spill dilemma: `T=-1000, R=-2000, P=-3000, S=-4000`.
    pub fn oil_spill_robots() -> Self {
        make_pd_game(&PdParams::oil_spill()).expect("constant payoffs are finite")
    }

    /// The skewed robot (row) versus human (column) dilemma, where a human
    /// repairing alone carries a regret of one million.
    pub fn oil_spill_robot_human() -> Self {
        BimatrixGame::new(
            [[-2000.0, -4000.0], [-1000.0, -3000.0]],
            [[-2000.0, -1000.0], [-1_000_000.0, -3000.0]],
        )
        .expect("constant payoffs are finite")
    }

    pub fn payoff(&self, player: Player, row_action: Action, col_action: Action) -> f64 {
        self.payoff[player.index()][row_action.index()][col_action.index()]
    }

    /// Payoff of `player` when it plays `own` and its opponent plays `other`.
    pub fn payoff_for(&self, player: Player, own: Action, other: Action) -> f64 {
        match player {
            Player::Row => self.payoff(player, own, other),
            Player::Col => self.payoff(player, other, own),
        }
    }

    pub fn table(&self, player: Player) -> [[f64; 2]; 2] {
        self.payoff[player.index()]
    }

    pub fn is_symmetric(&self) -> bool {
        Action::ALL.iter().all(|&a| {
            Action::ALL
                .iter()
                .all(|&b| self.payoff(Player::Row, a, b) == self.payoff(Player::Col, b, a))
        })
    }

    /// Reads `(T, R, P, S)` back out of a symmetric game.
    pub fn pd_params(&self) -> Option<PdParams> {
        use Action::*;
        self.is_symmetric().then(|| PdParams {
            temptation: self.payoff(Player::Row, NoRepair, Repair),
            reward: self.payoff(Player::Row, Repair, Repair),
            punishment: self.payoff(Player::Row, NoRepair, NoRepair),
            sucker: self.payoff(Player::Row, Repair, NoRepair),
        })
    }
}

/// The four canonical Prisoner's Dilemma payoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdParams {
    pub temptation: f64,
    pub reward: f64,
    pub punishment: f64,
    pub sucker: f64,
}

impl PdParams {
    pub fn new(temptation: f64, reward: f64, punishment: f64, sucker: f64) -> Self {
        PdParams {
            temptation,
            reward,
            punishment,
            sucker,
        }
    }

    pub fn oil_spill() -> Self {
        PdParams::new(-1000.0, -2000.0, -3000.0, -4000.0)
    }

    fn values(&self) -> [f64; 4] {
        [self.temptation, self.reward, self.punishment, self.sucker]
    }
}

/// `T > R > P > S` and `R > (T + S) / 2`, both strict.
pub fn check_pd_conditions(p: &PdParams) -> Result<bool> {
    if p.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("PD payoffs must be finite"));
    }
    let ordered = p.temptation > p.reward && p.reward > p.punishment && p.punishment > p.sucker;
    let no_alternation = p.reward > (p.temptation + p.sucker) / 2.0;
    Ok(ordered && no_alternation)
}

/// Lays the payoffs out as `(R,R) (S,T) / (T,S) (P,P)`, with Repair as the
/// first action of both players.
pub fn make_pd_game(p: &PdParams) -> Result<BimatrixGame> {
    let PdParams {
        temptation: t,
        reward: r,
        punishment: pu,
        sucker: s,
    } = *p;
    BimatrixGame::new([[r, s], [t, pu]], [[r, t], [s, pu]])
}

/// One player's payoffs indexed `[prediction][own_action]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewcombView {
    payoff: [[f64; 2]; 2],
}

impl NewcombView {
    pub fn new(payoff: [[f64; 2]; 2]) -> Result<Self> {
        if payoff.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("view payoffs must be finite"));
        }
        Ok(NewcombView { payoff })
    }

    pub fn payoff(&self, prediction: Action, own: Action) -> f64 {
        self.payoff[prediction.index()][own.index()]
    }

    pub fn cells(&self) -> [[f64; 2]; 2] {
        self.payoff
    }

    /// Adds `c` to every cell.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        NewcombView::new(self.payoff.map(|row| row.map(|v| v + c)))
    }
}

/// Re-reads the viewer's payoffs with the opponent's action taken as the
/// prediction.
pub fn derive_newcomb_view(game: &BimatrixGame, viewer: Player) -> NewcombView {
    let mut payoff = [[0.0; 2]; 2];
    for prediction in Action::ALL {
        for own in Action::ALL {
            payoff[prediction.index()][own.index()] = game.payoff_for(viewer, own, prediction);
        }
    }
    NewcombView { payoff }
}

/// Expected utility of playing `action` when the prediction matches it with
/// probability `accuracy`.
pub fn expected_utility(view: &NewcombView, action: Action, accuracy: f64) -> Result<f64> {
    check_probability("accuracy", accuracy)?;
    Ok(accuracy * view.payoff(action, action)
        + (1.0 - accuracy) * view.payoff(action.other(), action))
}

/// Where the expected utilities of the two actions cross on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Threshold {
    /// Indifference at exactly this accuracy; Repair is preferred on the side
    /// where its expected utility is larger.
    Crossing(BigRational),
    /// One action is preferred for every accuracy in `[0, 1]`.
    NoCrossing,
    /// Both actions have equal expected utility for every accuracy.
    AlwaysIndifferent,
}

impl Threshold {
    pub fn crossing(&self) -> Option<&BigRational> {
        match self {
            Threshold::Crossing(p) => Some(p),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.crossing().and_then(|p| p.to_f64())
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Crossing(p) => {
                let approx = p.to_f64().unwrap_or(f64::NAN);
                write!(f, "{p} ({approx})")
            }
            Threshold::NoCrossing => f.write_str("none"),
            Threshold::AlwaysIndifferent => f.write_str("always indifferent"),
        }
    }
}

fn exact(v: f64) -> BigRational {
    // Every finite f64 is a dyadic rational, so this conversion is lossless.
    BigRational::from_float(v).expect("view payoffs are finite")
}

/// Solves `EU(Repair, p) = EU(NoRepair, p)` for `p ∈ [0, 1]` exactly.
///
/// The difference `EU(Repair) - EU(NoRepair)` is affine in `p`; its values at
/// `p = 0` and `p = 1` decide whether a root lies in the interval.
pub fn eu_threshold(view: &NewcombView) -> Threshold {
    use Action::*;
    let cell = |pred, own| exact(view.payoff(pred, own));
    let at_zero = cell(NoRepair, Repair) - cell(Repair, NoRepair);
    let at_one = cell(Repair, Repair) - cell(NoRepair, NoRepair);

    if at_zero.is_zero() && at_one.is_zero() {
        return Threshold::AlwaysIndifferent;
    }
    if at_zero.is_zero() {
        return Threshold::Crossing(BigRational::from_integer(BigInt::from(0)));
    }
    if at_one.is_zero() {
        return Threshold::Crossing(BigRational::from_integer(BigInt::from(1)));
    }
    if at_zero.is_positive() == at_one.is_positive() {
        return Threshold::NoCrossing;
    }
    let slope = &at_one - &at_zero;
    Threshold::Crossing(-at_zero / slope)
}

/// The action strictly better under both predictions, if any.
pub fn dominant_action(view: &NewcombView) -> Option<Action> {
    Action::ALL.into_iter().find(|&a| {
        Action::ALL
            .iter()
            .all(|&pred| view.payoff(pred, a) > view.payoff(pred, a.other()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn robot_view() -> NewcombView {
        derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Row)
    }

    fn human_view() -> NewcombView {
        derive_newcomb_view(&BimatrixGame::oil_spill_robot_human(), Player::Col)
    }

    #[test]
    fn pd_conditions() {
        assert!(check_pd_conditions(&PdParams::oil_spill()).unwrap());
        assert!(!check_pd_conditions(&PdParams::new(0.0, 0.0, 0.0, 0.0)).unwrap());
        assert!(check_pd_conditions(&PdParams::new(5.0, 3.0, 1.0, 0.0)).unwrap());
        // ordered but alternating pays: R = (T+S)/2
        assert!(!check_pd_conditions(&PdParams::new(6.0, 3.0, 1.0, 0.0)).unwrap());
        assert!(matches!(
            check_pd_conditions(&PdParams::new(f64::NAN, 3.0, 1.0, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn pd_layout() {
        let g = BimatrixGame::oil_spill_robots();
        assert_eq!(g.payoff(Player::Row, Repair, Repair), -2000.0);
        assert_eq!(g.payoff(Player::Row, Repair, NoRepair), -4000.0);
        assert_eq!(g.payoff(Player::Row, NoRepair, Repair), -1000.0);
        assert_eq!(g.payoff(Player::Row, NoRepair, NoRepair), -3000.0);
        assert!(g.is_symmetric());
        assert_eq!(g.pd_params(), Some(PdParams::oil_spill()));

        let axelrod = make_pd_game(&PdParams::new(5.0, 3.0, 1.0, 0.0)).unwrap();
        assert_eq!(axelrod.payoff(Player::Col, NoRepair, Repair), 0.0);

        let flat = make_pd_game(&PdParams::new(2.0, 2.0, 2.0, 2.0)).unwrap();
        assert!(flat.is_symmetric());
        assert!(!BimatrixGame::oil_spill_robot_human().is_symmetric());
    }

    #[test]
    fn rejects_non_finite_payoffs() {
        assert!(BimatrixGame::new([[f64::INFINITY, 0.0], [0.0, 0.0]], [[0.0; 2]; 2]).is_err());
        assert!(NewcombView::new([[0.0, f64::NAN], [0.0, 0.0]]).is_err());
    }

    #[test]
    fn newcomb_views_of_skewed_game() {
        assert_eq!(robot_view().cells(), [[-2000.0, -1000.0], [-4000.0, -3000.0]]);
        assert_eq!(human_view().cells(), [[-2000.0, -1000.0], [-1_000_000.0, -3000.0]]);

        let g = BimatrixGame::oil_spill_robots();
        assert_eq!(derive_newcomb_view(&g, Player::Row), derive_newcomb_view(&g, Player::Col));
    }

    #[test]
    fn expected_utilities() {
        let v = robot_view();
        assert_eq!(expected_utility(&v, Repair, 1.0).unwrap(), -2000.0);
        assert_eq!(expected_utility(&v, Repair, 0.75).unwrap(), -2500.0);
        assert_eq!(expected_utility(&v, NoRepair, 0.75).unwrap(), -2500.0);

        let h = human_view();
        let repair = expected_utility(&h, Repair, 0.999).unwrap();
        let no_repair = expected_utility(&h, NoRepair, 0.999).unwrap();
        assert!((repair - -2998.0).abs() < 1e-9);
        assert!((no_repair - -2998.0).abs() < 1e-9);

        assert!(expected_utility(&v, Repair, 1.5).is_err());
        assert!(expected_utility(&v, Repair, -0.1).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(eu_threshold(&robot_view()), Threshold::Crossing(ratio(3, 4)));
        assert_eq!(
            eu_threshold(&human_view()),
            Threshold::Crossing(ratio(999_000, 1_000_000))
        );
        assert_eq!(eu_threshold(&robot_view()).to_string(), "3/4 (0.75)");

        // Repair strictly dominates and also wins on expected utility everywhere.
        let repair_wins = NewcombView::new([[0.0, -10.0], [0.0, -10.0]]).unwrap();
        assert_eq!(dominant_action(&repair_wins), Some(Repair));
        assert_eq!(eu_threshold(&repair_wins), Threshold::NoCrossing);

        let flat = NewcombView::new([[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(eu_threshold(&flat), Threshold::AlwaysIndifferent);
    }

    #[test]
    fn threshold_at_interval_end() {
        // EU difference is 0 at p = 1 and negative at p = 0.
        let v = NewcombView::new([[-1.0, -1.0], [-5.0, -1.0]]).unwrap();
        assert_eq!(eu_threshold(&v), Threshold::Crossing(ratio(1, 1)));
    }

    #[test]
    fn dominance() {
        assert_eq!(dominant_action(&robot_view()), Some(NoRepair));
        assert_eq!(dominant_action(&human_view()), Some(NoRepair));
        let flat = NewcombView::new([[3.0; 2]; 2]).unwrap();
        assert_eq!(dominant_action(&flat), None);
        // weak dominance is not enough
        let weak = NewcombView::new([[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(dominant_action(&weak), None);
    }
}
