//! Obedience constraints and the recommendation-scheme linear programs.

use serde::Serialize;

use super::scheme::{Obedience, RecommendationScheme};
use super::SignalingError;
use crate::game::{BayesianGame, Sense};
use crate::lp::{self, Direction, LinearProgram, LpStatus, Relation};
use crate::scalar::Scalar;

/// Obedience slack accepted by [`check_obedience`].
pub const OBEDIENCE_TOL: f64 = 1e-7;

/// One obedience constraint: `player` told `recommended` (or anything, in
/// ex-ante mode) gains `amount` in expectation by switching to `deviation`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub player: usize,
    pub recommended: Option<usize>,
    pub deviation: usize,
    pub amount: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObedienceReport {
    pub mode: Obedience,
    /// Every constraint violated by more than [`OBEDIENCE_TOL`], in player,
    /// recommendation, deviation order.
    pub violations: Vec<Violation>,
    /// The largest violation; the first one on ties.
    pub worst: Option<Violation>,
    /// Largest gain over all constraints (zero or negative when obedient).
    pub max_gain: f64,
    pub passes: bool,
}

/// Coefficient of `phi(profile; state)` in the constraint for `player`
/// deviating to `deviation`: the sense-oriented gain from deviating, weighted
/// by the prior. Obedience requires the weighted sum to be at most zero.
fn gain_coefficient<T: Scalar>(
    game: &BayesianGame<T>,
    state: usize,
    profile: usize,
    player: usize,
    deviation: usize,
) -> T {
    let sense = game.sense();
    let space = game.space();
    let follow = sense.utility(game.payoff(state, profile, player));
    let deviate = sense.utility(game.payoff(state, space.deviate(profile, player, deviation), player));
    game.prior()[state].clone() * (deviate - follow)
}

/// Constraint rows `(player, recommended, deviation)` with one coefficient per
/// `state * profiles + profile` variable.
fn obedience_rows<T: Scalar>(
    game: &BayesianGame<T>,
    mode: Obedience,
) -> Vec<(usize, Option<usize>, usize, Vec<T>)> {
    let space = game.space();
    let n = space.count();
    let mut rows = Vec::new();
    for i in 0..game.players() {
        let m = game.num_actions(i);
        let recommendations: Vec<Option<usize>> = match mode {
            Obedience::Exact => (0..m).map(Some).collect(),
            Obedience::ExAnte => vec![None],
        };
        for rec in recommendations {
            for dev in 0..m {
                if Some(dev) == rec {
                    continue;
                }
                let mut coeffs = vec![T::zero(); game.num_states() * n];
                for t in 0..game.num_states() {
                    for s in 0..n {
                        if rec.is_some_and(|a| space.action(s, i) != a) {
                            continue;
                        }
                        coeffs[t * n + s] = gain_coefficient(game, t, s, i, dev);
                    }
                }
                rows.push((i, rec, dev, coeffs));
            }
        }
    }
    rows
}

/// Evaluates every obedience constraint of `mode` at `kernel[state][profile]`.
pub fn check_obedience<T: Scalar>(
    game: &BayesianGame<T>,
    kernel: &[Vec<T>],
    mode: Obedience,
) -> ObedienceReport {
    let flat: Vec<T> = kernel.iter().flatten().cloned().collect();
    let mut violations = Vec::new();
    let mut worst: Option<Violation> = None;
    let mut max_gain = f64::NEG_INFINITY;
    for (player, recommended, deviation, coeffs) in obedience_rows(game, mode) {
        let gain = coeffs
            .iter()
            .zip(&flat)
            .fold(T::zero(), |acc, (c, p)| acc + c.clone() * p.clone());
        let amount = gain.to_f64();
        max_gain = max_gain.max(amount);
        let violated = if T::EXACT {
            gain.is_positive()
        } else {
            amount > OBEDIENCE_TOL
        };
        if violated {
            let v = Violation {
                player,
                recommended,
                deviation,
                amount,
            };
            if worst.as_ref().is_none_or(|w| amount > w.amount) {
                worst = Some(v.clone());
            }
            violations.push(v);
        }
    }
    if max_gain == f64::NEG_INFINITY {
        max_gain = 0.0;
    }
    ObedienceReport {
        mode,
        passes: violations.is_empty(),
        violations,
        worst,
        max_gain,
    }
}

/// The welfare-optimal recommendation scheme under `mode`'s obedience
/// constraints, and its value.
fn optimal_recommendation<T: Scalar>(
    game: &BayesianGame<T>,
    mode: Obedience,
) -> Result<(T, RecommendationScheme<T>), SignalingError> {
    let n = game.space().count();
    let states = game.num_states();
    let direction = match game.sense() {
        Sense::Payoff => Direction::Max,
        Sense::Cost => Direction::Min,
    };
    let mut objective = Vec::with_capacity(states * n);
    for t in 0..states {
        for s in 0..n {
            objective.push(game.prior()[t].clone() * game.player_sum(t, s));
        }
    }
    let mut program = LinearProgram::new(direction, objective);
    for t in 0..states {
        let mut row = vec![T::zero(); states * n];
        for v in &mut row[t * n..(t + 1) * n] {
            *v = T::one();
        }
        program.constrain(row, Relation::Eq, T::one());
    }
    for (_, _, _, coeffs) in obedience_rows(game, mode) {
        program.constrain(coeffs, Relation::Le, T::zero());
    }
    let solution = lp::solve(&program)?;
    if solution.status != LpStatus::Optimal {
        return Err(SignalingError::LpStatus(solution.status));
    }
    let kernel: Vec<Vec<T>> = solution
        .point
        .chunks(n)
        .map(|row| {
            row.iter()
                .map(|p| if p.is_negative() { T::zero() } else { p.clone() })
                .collect()
        })
        .collect();
    let value = game.expected_welfare(&kernel);
    let obedient = check_obedience(game, &kernel, mode).passes;
    Ok((
        value,
        RecommendationScheme {
            mode,
            kernel,
            obedient,
        },
    ))
}

/// Best value over private schemes with exact obedience.
pub fn optimal_private_value<T: Scalar>(
    game: &BayesianGame<T>,
) -> Result<(T, RecommendationScheme<T>), SignalingError> {
    optimal_recommendation(game, Obedience::Exact)
}

/// Best value over ex-ante private schemes (opt-out obedience only).
pub fn optimal_ex_ante_value<T: Scalar>(
    game: &BayesianGame<T>,
) -> Result<(T, RecommendationScheme<T>), SignalingError> {
    optimal_recommendation(game, Obedience::ExAnte)
}
