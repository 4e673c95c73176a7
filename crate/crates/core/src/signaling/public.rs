//! Public signaling: evaluation and the optimal public scheme.

use rayon::prelude::*;
use serde::Serialize;

use super::scheme::PublicScheme;
use super::SignalingError;
use crate::equilibria::worst_equilibrium_welfare;
use crate::game::{optimal_welfare, BayesianGame, MixedProfile, PosteriorBelief, Sense};
use crate::lp::{self, Direction, LinearProgram, LpStatus, Relation};
use crate::scalar::{sum, Scalar};

/// Signals with probability at most this are ignored.
pub const SIGNAL_TOL: f64 = 1e-12;
/// Default number of grid steps per posterior coordinate.
pub const DEFAULT_GRID: usize = 512;
/// Largest state count supported by the posterior grid.
pub const MAX_GRID_STATES: usize = 3;
/// Value slack treated as a tie when preferring simpler schemes.
const TIE_TOL: f64 = 1e-9;

/// Expected welfare when the state is revealed, with the per-state worst equilibria.
pub fn evaluate_full_information<T: Scalar>(
    game: &BayesianGame<T>,
) -> Result<(T, Vec<MixedProfile<T>>), SignalingError> {
    let mut total = T::zero();
    let mut witnesses = Vec::with_capacity(game.num_states());
    for t in 0..game.num_states() {
        let (w, x) = worst_equilibrium_welfare(&game.state_game_at(t))?;
        total = total + game.prior()[t].clone() * w;
        witnesses.push(x);
    }
    Ok((total, witnesses))
}

/// Worst equilibrium welfare of the prior-average game.
pub fn evaluate_no_information<T: Scalar>(game: &BayesianGame<T>) -> Result<T, SignalingError> {
    posterior_value(game, &game.prior_belief())
}

/// Worst equilibrium welfare of the game played under a common belief.
pub fn posterior_value<T: Scalar>(
    game: &BayesianGame<T>,
    belief: &PosteriorBelief<T>,
) -> Result<T, SignalingError> {
    Ok(worst_equilibrium_welfare(&game.posterior_game(belief)?)?.0)
}

/// Signal probabilities and posteriors induced by a public scheme.
pub fn signal_posteriors<T: Scalar>(
    prior: &[T],
    scheme: &PublicScheme<T>,
) -> Vec<(usize, T, PosteriorBelief<T>)> {
    let mut out = Vec::new();
    for k in 0..scheme.signals.len() {
        let joint: Vec<T> = prior
            .iter()
            .zip(&scheme.kernel)
            .map(|(l, row)| l.clone() * row[k].clone())
            .collect();
        let p = sum(joint.iter().cloned());
        if p.is_negligible(SIGNAL_TOL) || p.is_negative() {
            continue;
        }
        let belief = joint.into_iter().map(|j| j / p.clone()).collect();
        out.push((k, p, PosteriorBelief::from_raw(belief)));
    }
    out
}

/// Expected worst-equilibrium welfare of a public scheme.
pub fn evaluate_public_scheme<T: Scalar>(
    game: &BayesianGame<T>,
    scheme: &PublicScheme<T>,
) -> Result<T, SignalingError> {
    if scheme.kernel.len() != game.num_states() {
        return Err(SignalingError::Kernel(format!(
            "{} kernel rows for {} states",
            scheme.kernel.len(),
            game.num_states()
        )));
    }
    let mut total = T::zero();
    for (_, p, belief) in signal_posteriors(game.prior(), scheme) {
        total = total + p * posterior_value(game, &belief)?;
    }
    Ok(total)
}

/// Welfare with the state revealed and each state's best profile played:
/// no scheme of any class can do better.
pub fn welfare_ceiling<T: Scalar>(game: &BayesianGame<T>) -> T {
    sum((0..game.num_states())
        .map(|t| game.prior()[t].clone() * optimal_welfare(&game.state_game_at(t)).0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PublicOptions {
    /// Grid steps per posterior coordinate.
    pub grid: usize,
    /// Accept full or no information without a grid search when it attains
    /// the welfare ceiling, which makes it exactly optimal.
    pub certify: bool,
}

impl Default for PublicOptions {
    fn default() -> Self {
        PublicOptions {
            grid: DEFAULT_GRID,
            certify: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum PublicMethod {
    /// Only one state: no information to reveal.
    SingleState,
    /// Full or no information attains the welfare ceiling.
    Certified,
    /// Envelope over a posterior grid with this many steps per coordinate.
    Grid { resolution: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublicOptimum<T = f64> {
    pub value: T,
    pub scheme: PublicScheme<T>,
    pub method: PublicMethod,
}

/// Optimal public scheme value: exact by certification where possible,
/// otherwise the best scheme whose posteriors lie on a uniform grid.
pub fn optimal_public_value<T: Scalar>(
    game: &BayesianGame<T>,
    options: &PublicOptions,
) -> Result<PublicOptimum<T>, SignalingError> {
    let states = game.num_states();
    let ni = evaluate_no_information(game)?;
    if states == 1 {
        return Ok(PublicOptimum {
            value: ni,
            scheme: PublicScheme::no_information(1),
            method: PublicMethod::SingleState,
        });
    }
    let sense = game.sense();
    if options.certify {
        let ceiling = welfare_ceiling(game);
        let attains = |v: &T| (v.clone() - ceiling.clone()).is_negligible(TIE_TOL);
        if attains(&ni) {
            return Ok(PublicOptimum {
                value: ni,
                scheme: PublicScheme::no_information(states),
                method: PublicMethod::Certified,
            });
        }
        let (fi, _) = evaluate_full_information(game)?;
        if attains(&fi) {
            return Ok(PublicOptimum {
                value: fi,
                scheme: PublicScheme::full_information(game.states()),
                method: PublicMethod::Certified,
            });
        }
    }
    if states > MAX_GRID_STATES {
        return Err(SignalingError::TooManyStates {
            states,
            max: MAX_GRID_STATES,
        });
    }
    if options.grid == 0 {
        return Err(SignalingError::Kernel("grid resolution must be positive".into()));
    }

    let mut points = simplex_grid::<T>(states, options.grid);
    if !points.iter().any(|p| p.as_slice() == game.prior()) {
        points.push(game.prior().to_vec());
    }
    let values = points
        .par_iter()
        .map(|b| posterior_value(game, &PosteriorBelief::from_raw(b.clone())))
        .collect::<Result<Vec<T>, _>>()?;
    let (value, support) = envelope_at(&points, &values, game.prior(), sense)?;

    let ni_ties = !sense.better(&value, &(ni.clone() + sense.utility(&T::slack(TIE_TOL))));
    let method = PublicMethod::Grid {
        resolution: options.grid,
    };
    if ni_ties {
        return Ok(PublicOptimum {
            value: ni,
            scheme: PublicScheme::no_information(states),
            method,
        });
    }
    let scheme = scheme_from_support(game.prior(), &points, &support);
    let value = evaluate_public_scheme(game, &scheme)?;
    Ok(PublicOptimum {
        value,
        scheme,
        method,
    })
}

/// All points of the probability simplex over `states` coordinates whose
/// entries are multiples of `1/steps`, in lexicographic order.
pub fn simplex_grid<T: Scalar>(states: usize, steps: usize) -> Vec<Vec<T>> {
    fn rec(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(left - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(steps, states, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|p| {
            p.into_iter()
                .map(|k| T::from_ratio(k as i64, steps as i64))
                .collect()
        })
        .collect()
}

/// Best convex combination of `points` averaging to `prior`, scoring each
/// point by `values`: the concave (payoff) or convex (cost) envelope at the
/// prior. Returns the value and the support as `(point index, weight)`.
pub fn envelope_at<T: Scalar>(
    points: &[Vec<T>],
    values: &[T],
    prior: &[T],
    sense: Sense,
) -> Result<(T, Vec<(usize, T)>), SignalingError> {
    let direction = match sense {
        Sense::Payoff => Direction::Max,
        Sense::Cost => Direction::Min,
    };
    let mut program = LinearProgram::new(direction, values.to_vec());
    for (t, l) in prior.iter().enumerate() {
        let row = points.iter().map(|p| p[t].clone()).collect();
        program.constrain(row, Relation::Eq, l.clone());
    }
    let solution = lp::solve(&program)?;
    if solution.status != LpStatus::Optimal {
        return Err(SignalingError::LpStatus(solution.status));
    }
    let support = solution
        .point
        .into_iter()
        .enumerate()
        .filter(|(_, w)| !w.is_negligible(SIGNAL_TOL) && w.is_positive())
        .collect();
    Ok((solution.value, support))
}

/// Label of a posterior: coordinates at fixed precision.
pub fn posterior_label<T: Scalar>(belief: &[T]) -> String {
    belief
        .iter()
        .map(|b| format!("{:.6}", b.to_f64()))
        .collect::<Vec<_>>()
        .join(",")
}

fn scheme_from_support<T: Scalar>(
    prior: &[T],
    points: &[Vec<T>],
    support: &[(usize, T)],
) -> PublicScheme<T> {
    let signals = support
        .iter()
        .map(|(k, _)| posterior_label(&points[*k]))
        .collect();
    let kernel = prior
        .iter()
        .enumerate()
        .map(|(t, l)| {
            if l.is_zero() {
                // Unreachable state: any distribution works; send the first signal.
                let mut row = vec![T::zero(); support.len()];
                row[0] = T::one();
                return row;
            }
            let row: Vec<T> = support
                .iter()
                .map(|(k, w)| w.clone() * points[*k][t].clone() / l.clone())
                .collect();
            let total = sum(row.iter().cloned());
            row.into_iter().map(|p| p / total.clone()).collect()
        })
        .collect();
    PublicScheme { signals, kernel }
}
