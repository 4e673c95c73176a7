//! Nash equilibria of small complete-information games and the price of anarchy.
//!
//! Two-player games are solved by support enumeration over every pair of
//! supports. Single-player games reduce to best actions. Games with three or
//! more players are supported for pure equilibria only.

use thiserror::Error;

use crate::game::{
    optimal_welfare, welfare, BayesianGame, GameError, MixedProfile, PureProfile, Sense, StageGame,
};
use crate::ratio::Ratio;
use crate::scalar::Scalar;

/// Best-response slack for accepting an equilibrium.
pub const NE_TOL: f64 = 1e-8;
/// Largest per-player action count for mixed enumeration.
pub const MAX_ACTIONS: usize = 6;
/// Magnitude of the tie-breaking perturbation applied to degenerate games.
pub const PERTURBATION: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-12;
const SUPPORT_TOL: f64 = 1e-12;
const BEST_RESPONSE_TOL: f64 = 1e-9;
const DUPLICATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("mixed equilibrium enumeration supports at most 2 players with {MAX_ACTIONS} actions each (got {players} players, {actions} actions)")]
    Unsupported { players: usize, actions: usize },
    #[error("game has no pure Nash equilibrium")]
    NoPureEquilibrium,
    #[error("no equilibrium found")]
    Empty,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumSet<T = f64> {
    /// Equilibria of the game itself, in discovery order.
    pub equilibria: Vec<MixedProfile<T>>,
    /// Set when some support system was singular or an equilibrium is not isolated.
    pub degenerate: bool,
    /// For degenerate games: equilibria of the perturbed game that remain
    /// equilibria of the original within [`NE_TOL`].
    pub perturbed: Vec<MixedProfile<T>>,
}

impl<T: Scalar> EquilibriumSet<T> {
    /// All profiles considered for equilibrium selection.
    pub fn candidates(&self) -> impl Iterator<Item = &MixedProfile<T>> {
        self.equilibria.iter().chain(&self.perturbed)
    }

    pub fn len(&self) -> usize {
        self.equilibria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equilibria.is_empty()
    }
}

/// Largest gain any player gets from a pure deviation (sense-oriented, so a
/// positive value means some player can improve).
pub fn max_regret<T: Scalar>(game: &StageGame<T>, x: &MixedProfile<T>) -> Result<T, GameError> {
    let sense = game.sense();
    let mut worst = T::zero();
    for i in 0..game.players() {
        let current = sense.utility(&game.expected_payoff(x, i)?);
        for a in 0..game.num_actions(i) {
            let gain = sense.utility(&game.deviation_payoff(x, i, a)) - current.clone();
            worst = worst.max_of(gain);
        }
    }
    Ok(worst)
}

pub fn is_equilibrium<T: Scalar>(game: &StageGame<T>, x: &MixedProfile<T>, tol: f64) -> bool {
    max_regret(game, x).is_ok_and(|r| r <= T::slack(tol))
}

/// All pure Nash equilibria by exhaustive deviation checks (any number of players).
pub fn enumerate_pure_equilibria<T: Scalar>(game: &StageGame<T>) -> Vec<PureProfile> {
    let space = game.space();
    let sense = game.sense();
    let tol = T::slack(NE_TOL);
    (0..space.count())
        .filter(|&idx| {
            (0..game.players()).all(|i| {
                let current = sense.utility(game.payoff(idx, i));
                (0..game.num_actions(i)).all(|a| {
                    let dev = sense.utility(game.payoff(space.deviate(idx, i, a), i));
                    dev - current.clone() <= tol
                })
            })
        })
        .map(|idx| space.profile(idx))
        .collect()
}

/// Mixed Nash equilibria of a one- or two-player game.
pub fn enumerate_equilibria<T: Scalar>(
    game: &StageGame<T>,
) -> Result<EquilibriumSet<T>, EquilibriumError> {
    match game.players() {
        1 => Ok(single_player(game)),
        2 => {
            let largest = game.space().sizes().iter().copied().max().unwrap_or(0);
            if largest > MAX_ACTIONS {
                return Err(EquilibriumError::Unsupported {
                    players: 2,
                    actions: largest,
                });
            }
            let mut set = support_enumeration(game);
            if set.degenerate {
                let shaken = perturb(game);
                let extra = support_enumeration(&shaken);
                for x in extra.equilibria {
                    if is_equilibrium(game, &x, NE_TOL)
                        && !set.candidates().any(|y| same_profile(&x, y))
                    {
                        set.perturbed.push(x);
                    }
                }
            }
            if set.equilibria.is_empty() && set.perturbed.is_empty() {
                return Err(EquilibriumError::Empty);
            }
            Ok(set)
        }
        n => Err(EquilibriumError::Unsupported {
            players: n,
            actions: game.space().sizes().iter().copied().max().unwrap_or(0),
        }),
    }
}

fn single_player<T: Scalar>(game: &StageGame<T>) -> EquilibriumSet<T> {
    let sense = game.sense();
    let m = game.num_actions(0);
    let best = (0..m)
        .map(|a| sense.utility(game.payoff(a, 0)))
        .reduce(Scalar::max_of)
        .expect("at least one action");
    let equilibria: Vec<_> = (0..m)
        .filter(|&a| best.clone() - sense.utility(game.payoff(a, 0)) <= T::slack(BEST_RESPONSE_TOL))
        .map(|a| MixedProfile::pure(&PureProfile(vec![a]), &[m]))
        .collect();
    EquilibriumSet {
        degenerate: equilibria.len() > 1,
        equilibria,
        perturbed: Vec::new(),
    }
}

fn same_profile<T: Scalar>(a: &MixedProfile<T>, b: &MixedProfile<T>) -> bool {
    if T::EXACT {
        a == b
    } else {
        a.distance(b) <= DUPLICATE_TOL
    }
}

/// Deterministic sign-alternating payoff perturbation of size about [`PERTURBATION`].
fn perturb<T: Scalar>(game: &StageGame<T>) -> StageGame<T> {
    let payoff = game
        .payoffs()
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let magnitude = PERTURBATION * (1.0 + (k % 5) as f64) / 5.0;
            let delta = if k % 2 == 0 { magnitude } else { -magnitude };
            u.clone() + T::from_f64(delta)
        })
        .collect();
    StageGame::from_parts_unchecked(
        game.sense(),
        game.actions().to_vec(),
        game.space().clone(),
        payoff,
    )
}

/// Index subsets of `0..m` ordered by size, then lexicographically.
fn subsets(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=m {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let Some(pos) = (0..k).rev().find(|&p| idx[p] < m - k + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

enum Solve<T> {
    Unique(Vec<T>),
    Underdetermined,
    Inconsistent,
}

/// Gauss-Jordan elimination with partial pivoting on an arbitrary-shaped system.
fn solve_system<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>, unknowns: usize) -> Solve<T> {
    let rows = a.len();
    let tol = T::slack(PIVOT_TOL);
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..unknowns {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows)
            .filter(|&r| a[r][col].abs() > tol)
            .max_by(|&x, &y| {
                a[x][col]
                    .abs()
                    .partial_cmp(&a[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(y.cmp(&x))
            })
        else {
            continue;
        };
        a.swap(rank, p);
        b.swap(rank, p);
        let pv = a[rank][col].clone();
        for v in a[rank].iter_mut() {
            *v = v.clone() / pv.clone();
        }
        b[rank] = b[rank].clone() / pv;
        for r in 0..rows {
            if r == rank || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..unknowns {
                let delta = f.clone() * a[rank][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
            let delta = f * b[rank].clone();
            b[r] = b[r].clone() - delta;
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if b[rank..].iter().any(|v| v.abs() > T::slack(1e-9)) {
        return Solve::Inconsistent;
    }
    if rank < unknowns {
        return Solve::Underdetermined;
    }
    let mut x = vec![T::zero(); unknowns];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = b[r].clone();
    }
    Solve::Unique(x)
}

/// Mix over `support` (plus a value) making every action in `indifferent`
/// equally good for the opponent, whose oriented payoffs are `payoff(own, other)`.
fn indifference_mix<T: Scalar>(
    indifferent: &[usize],
    support: &[usize],
    payoff: impl Fn(usize, usize) -> T,
) -> Solve<T> {
    let k = support.len();
    let mut a = Vec::with_capacity(indifferent.len() + 1);
    let mut b = Vec::with_capacity(indifferent.len() + 1);
    for &i in indifferent {
        let mut row: Vec<T> = support.iter().map(|&j| payoff(i, j)).collect();
        row.push(-T::one());
        a.push(row);
        b.push(T::zero());
    }
    let mut row = vec![T::one(); k];
    row.push(T::zero());
    a.push(row);
    b.push(T::one());
    solve_system(a, b, k + 1)
}

fn embed<T: Scalar>(support: &[usize], weights: &[T], m: usize) -> Option<Vec<T>> {
    let mut x = vec![T::zero(); m];
    for (&a, w) in support.iter().zip(weights) {
        if w.is_negative() {
            if !w.is_negligible(SUPPORT_TOL) {
                return None;
            }
            continue;
        }
        x[a] = w.clone();
    }
    Some(x)
}

fn support_enumeration<T: Scalar>(game: &StageGame<T>) -> EquilibriumSet<T> {
    let (m1, m2) = (game.num_actions(0), game.num_actions(1));
    let sense = game.sense();
    let space = game.space();
    let util = |i: usize, j: usize, player: usize| sense.utility(game.payoff(space.index(&[i, j]), player));

    let rows = subsets(m1);
    let cols = subsets(m2);
    let mut set = EquilibriumSet {
        equilibria: Vec::new(),
        degenerate: false,
        perturbed: Vec::new(),
    };
    for rs in &rows {
        for cs in &cols {
            let square = rs.len() == cs.len();
            // Column mix y over cs making the row player indifferent over rs.
            let y = match indifference_mix(rs, cs, |i, j| util(i, j, 0)) {
                Solve::Unique(v) => v,
                Solve::Underdetermined => {
                    set.degenerate |= square;
                    continue;
                }
                Solve::Inconsistent => continue,
            };
            let x = match indifference_mix(cs, rs, |j, i| util(i, j, 1)) {
                Solve::Unique(v) => v,
                Solve::Underdetermined => {
                    set.degenerate |= square;
                    continue;
                }
                Solve::Inconsistent => continue,
            };
            let (Some(x), Some(y)) = (embed(rs, &x[..rs.len()], m1), embed(cs, &y[..cs.len()], m2))
            else {
                continue;
            };
            let profile = MixedProfile::from_raw(vec![x, y]);
            if !is_equilibrium(game, &profile, NE_TOL) {
                continue;
            }
            if !set.equilibria.iter().any(|e| same_profile(e, &profile)) {
                set.equilibria.push(profile);
            }
        }
    }
    set.degenerate |= set
        .equilibria
        .iter()
        .any(|x| has_excess_best_responses(game, x));
    set
}

/// Nondegeneracy requires each player to have at most as many pure best
/// responses as the opponent's support size.
fn has_excess_best_responses<T: Scalar>(game: &StageGame<T>, x: &MixedProfile<T>) -> bool {
    let sense = game.sense();
    let supports = x.supports();
    (0..2).any(|i| {
        let values: Vec<T> = (0..game.num_actions(i))
            .map(|a| sense.utility(&game.deviation_payoff(x, i, a)))
            .collect();
        let best = values.iter().cloned().reduce(Scalar::max_of).expect("actions");
        let count = values
            .iter()
            .filter(|v| best.clone() - (*v).clone() <= T::slack(BEST_RESPONSE_TOL))
            .count();
        count > supports[1 - i].len()
    })
}

/// Worst equilibrium welfare: the largest cost or the smallest payoff among
/// enumerated equilibria. Ties keep the first found.
pub fn worst_equilibrium_welfare<T: Scalar>(
    game: &StageGame<T>,
) -> Result<(T, MixedProfile<T>), EquilibriumError> {
    let set = enumerate_equilibria(game)?;
    worst_of(game, set.candidates().cloned())
}

fn worst_of<T: Scalar>(
    game: &StageGame<T>,
    candidates: impl Iterator<Item = MixedProfile<T>>,
) -> Result<(T, MixedProfile<T>), EquilibriumError> {
    let mut worst: Option<(T, MixedProfile<T>)> = None;
    for x in candidates {
        let w = welfare(game, &x)?;
        let replace = match &worst {
            None => true,
            Some((current, _)) => game.sense().better(current, &w),
        };
        if replace {
            worst = Some((w, x));
        }
    }
    worst.ok_or(EquilibriumError::Empty)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoAReport<T = f64> {
    pub worst: T,
    pub optimal: T,
    pub ratio: Ratio<T>,
    pub equilibrium: MixedProfile<T>,
    pub optimum: PureProfile,
    pub degenerate: bool,
}

/// Worst equilibrium welfare over optimal welfare.
pub fn price_of_anarchy<T: Scalar>(game: &StageGame<T>) -> Result<PoAReport<T>, EquilibriumError> {
    let set = enumerate_equilibria(game)?;
    let (worst, equilibrium) = worst_of(game, set.candidates().cloned())?;
    let (optimal, optimum) = optimal_welfare(game);
    Ok(PoAReport {
        ratio: Ratio::of(&worst, &optimal),
        worst,
        optimal,
        equilibrium,
        optimum,
        degenerate: set.degenerate,
    })
}

/// Price of anarchy with respect to pure equilibria only (any number of players).
pub fn price_of_anarchy_pure<T: Scalar>(game: &StageGame<T>) -> Result<PoAReport<T>, EquilibriumError> {
    let sizes = game.space().sizes().to_vec();
    let pure = enumerate_pure_equilibria(game);
    if pure.is_empty() {
        return Err(EquilibriumError::NoPureEquilibrium);
    }
    let (worst, equilibrium) = worst_of(game, pure.iter().map(|p| MixedProfile::pure(p, &sizes)))?;
    let (optimal, optimum) = optimal_welfare(game);
    Ok(PoAReport {
        ratio: Ratio::of(&worst, &optimal),
        worst,
        optimal,
        equilibrium,
        optimum,
        degenerate: false,
    })
}

/// Per-state PoA reports of a Bayesian game.
pub fn state_poas<T: Scalar>(game: &BayesianGame<T>) -> Result<Vec<PoAReport<T>>, EquilibriumError> {
    (0..game.num_states())
        .map(|t| price_of_anarchy(&game.state_game_at(t)))
        .collect()
}

/// The extreme per-state PoA: the maximum for cost games, the minimum for payoff games.
pub fn poa_max<T: Scalar>(game: &BayesianGame<T>) -> Result<Ratio<T>, EquilibriumError> {
    let reports = state_poas(game)?;
    let sense = game.sense();
    let mut extreme: Option<Ratio<T>> = None;
    for r in reports {
        extreme = Some(match extreme {
            None => r.ratio,
            Some(e) => {
                let (a, b) = (r.ratio.to_f64(), e.to_f64());
                let take = match sense {
                    Sense::Cost => a > b,
                    Sense::Payoff => a < b,
                };
                if take {
                    r.ratio
                } else {
                    e
                }
            }
        });
    }
    Ok(extreme.expect("at least one state"))
}
