//! Bayesian game data model and welfare functions.
//!
//! A [`BayesianGame`] holds one dense payoff tensor per state of nature. The
//! complete-information game played in a single state, or under a common
//! posterior belief, is a [`StageGame`].

mod format;
pub mod random;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{sum, Scalar};

pub use format::{game_from_json, game_to_json, game_to_json_string};

/// Slack accepted on user-supplied probability vectors.
pub const INPUT_TOL: f64 = 1e-9;
/// Slack used for internal arithmetic checks.
pub const INTERNAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

impl GameError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        GameError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Whether players (and the sender) minimize costs or maximize payoffs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Cost,
    Payoff,
}

impl Sense {
    /// `true` if `a` is strictly better than `b` for a welfare optimizer.
    pub fn better<T: Scalar>(self, a: &T, b: &T) -> bool {
        match self {
            Sense::Cost => a < b,
            Sense::Payoff => a > b,
        }
    }

    /// Orient a raw payoff so that larger is always better.
    pub fn utility<T: Scalar>(self, raw: &T) -> T {
        match self {
            Sense::Cost => -raw.clone(),
            Sense::Payoff => raw.clone(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Cost => "cost",
            Sense::Payoff => "payoff",
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense mixed-radix indexing of pure profiles; player 0 is most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    count: usize,
}

impl ProfileSpace {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        let count = sizes.iter().product();
        ProfileSpace {
            sizes,
            strides,
            count,
        }
    }

    pub fn players(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn index(&self, actions: &[usize]) -> usize {
        actions
            .iter()
            .zip(&self.strides)
            .map(|(a, s)| a * s)
            .sum()
    }

    pub fn action(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.sizes[player]
    }

    pub fn profile(&self, index: usize) -> PureProfile {
        PureProfile((0..self.players()).map(|i| self.action(index, i)).collect())
    }

    /// Index of the profile with `player`'s action replaced by `action`.
    pub fn deviate(&self, index: usize, player: usize, action: usize) -> usize {
        let current = self.action(index, player);
        index + action * self.strides[player] - current * self.strides[player]
    }
}

/// One action index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureProfile(pub Vec<usize>);

/// Per-player probability vectors over actions.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile<T = f64>(Vec<Vec<T>>);

impl<T: Scalar> MixedProfile<T> {
    pub fn new(strategies: Vec<Vec<T>>) -> Result<Self, GameError> {
        for (i, x) in strategies.iter().enumerate() {
            check_distribution(x, &format!("profile[{i}]"), INPUT_TOL)?;
        }
        Ok(MixedProfile(strategies))
    }

    pub(crate) fn from_raw(strategies: Vec<Vec<T>>) -> Self {
        MixedProfile(strategies)
    }

    pub fn pure(profile: &PureProfile, sizes: &[usize]) -> Self {
        MixedProfile(
            profile
                .0
                .iter()
                .zip(sizes)
                .map(|(&a, &m)| {
                    let mut v = vec![T::zero(); m];
                    v[a] = T::one();
                    v
                })
                .collect(),
        )
    }

    pub fn strategies(&self) -> &[Vec<T>] {
        &self.0
    }

    pub fn player(&self, i: usize) -> &[T] {
        &self.0[i]
    }

    /// Indices with positive probability for each player.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.0
            .iter()
            .map(|x| {
                x.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_negligible(INTERNAL_TOL))
                    .map(|(a, _)| a)
                    .collect()
            })
            .collect()
    }

    /// Probability of a pure profile index under the product distribution.
    pub fn probability(&self, space: &ProfileSpace, index: usize) -> T {
        let mut p = T::one();
        for (i, x) in self.0.iter().enumerate() {
            let q = &x[space.action(index, i)];
            if q.is_zero() {
                return T::zero();
            }
            p = p * q.clone();
        }
        p
    }

    pub fn to_f64(&self) -> MixedProfile<f64> {
        MixedProfile(
            self.0
                .iter()
                .map(|x| x.iter().map(Scalar::to_f64).collect())
                .collect(),
        )
    }

    /// Largest coordinate-wise difference between two profiles of equal shape.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x.to_f64() - y.to_f64()).abs()))
            .fold(0.0, f64::max)
    }
}

/// A probability vector over the states of a game.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorBelief<T = f64>(Vec<T>);

impl<T: Scalar> PosteriorBelief<T> {
    pub fn new(probabilities: Vec<T>) -> Result<Self, GameError> {
        check_distribution(&probabilities, "belief", INPUT_TOL)?;
        Ok(PosteriorBelief(probabilities))
    }

    pub(crate) fn from_raw(probabilities: Vec<T>) -> Self {
        PosteriorBelief(probabilities)
    }

    pub fn point_mass(states: usize, state: usize) -> Self {
        let mut v = vec![T::zero(); states];
        v[state] = T::one();
        PosteriorBelief(v)
    }

    pub fn probabilities(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn check_distribution<T: Scalar>(
    x: &[T],
    field: &str,
    tol: f64,
) -> Result<(), GameError> {
    if x.is_empty() {
        return Err(GameError::invalid(field, "empty probability vector"));
    }
    for (k, p) in x.iter().enumerate() {
        if p.is_negative() {
            return Err(GameError::invalid(
                format!("{field}[{k}]"),
                format!("negative probability {p}"),
            ));
        }
    }
    let total = sum(x.iter().cloned());
    if !(total.clone() - T::one()).is_negligible(tol) {
        return Err(GameError::invalid(
            field,
            format!("probabilities sum to {total}, expected 1"),
        ));
    }
    Ok(())
}

/// A complete-information game: one payoff vector per pure profile.
#[derive(Clone, Debug, PartialEq)]
pub struct StageGame<T = f64> {
    sense: Sense,
    actions: Vec<Vec<String>>,
    space: ProfileSpace,
    /// `payoff[profile * players + player]`
    payoff: Vec<T>,
}

impl<T: Scalar> StageGame<T> {
    /// Builds a game from flat payoffs laid out as `[profile][player]`.
    pub fn new(sense: Sense, actions: Vec<Vec<String>>, payoff: Vec<T>) -> Result<Self, GameError> {
        let space = validate_actions(&actions)?;
        let expected = space.count() * space.players();
        if payoff.len() != expected {
            return Err(GameError::Dimension(format!(
                "expected {expected} payoff entries, found {}",
                payoff.len()
            )));
        }
        if let Some(k) = payoff.iter().position(|u| u.is_negative()) {
            return Err(GameError::invalid(
                format!("payoff[{}][{}]", k / space.players(), k % space.players()),
                "payoffs must be non-negative",
            ));
        }
        Ok(StageGame {
            sense,
            actions,
            space,
            payoff,
        })
    }

    /// Convenience constructor for two-player games from per-cell `(u1, u2)` pairs.
    pub fn bimatrix(sense: Sense, cells: Vec<Vec<(T, T)>>) -> Result<Self, GameError> {
        let rows = cells.len();
        let cols = cells.first().map_or(0, Vec::len);
        if cells.iter().any(|r| r.len() != cols) {
            return Err(GameError::Dimension("ragged bimatrix".into()));
        }
        let actions = vec![default_labels(rows), default_labels(cols)];
        let payoff = cells
            .into_iter()
            .flatten()
            .flat_map(|(a, b)| [a, b])
            .collect();
        StageGame::new(sense, actions, payoff)
    }

    pub(crate) fn from_parts_unchecked(
        sense: Sense,
        actions: Vec<Vec<String>>,
        space: ProfileSpace,
        payoff: Vec<T>,
    ) -> Self {
        StageGame {
            sense,
            actions,
            space,
            payoff,
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.space.sizes()[player]
    }

    pub fn players(&self) -> usize {
        self.space.players()
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn actions(&self) -> &[Vec<String>] {
        &self.actions
    }

    pub fn payoff(&self, profile: usize, player: usize) -> &T {
        &self.payoff[profile * self.players() + player]
    }

    pub fn payoffs(&self) -> &[T] {
        &self.payoff
    }

    /// Sum of all players' payoffs (or costs) at a pure profile.
    pub fn player_sum(&self, profile: usize) -> T {
        let n = self.players();
        sum(self.payoff[profile * n..(profile + 1) * n].iter().cloned())
    }

    /// Sub-game keeping only the listed actions of each player.
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<Self, GameError> {
        if keep.len() != self.players() {
            return Err(GameError::Dimension("one action list per player".into()));
        }
        for (i, k) in keep.iter().enumerate() {
            if k.is_empty() || k.iter().any(|&a| a >= self.num_actions(i)) {
                return Err(GameError::invalid(
                    format!("keep[{i}]"),
                    "action index out of range or empty",
                ));
            }
        }
        let actions: Vec<Vec<String>> = keep
            .iter()
            .enumerate()
            .map(|(i, k)| k.iter().map(|&a| self.actions[i][a].clone()).collect())
            .collect();
        let space = ProfileSpace::new(keep.iter().map(Vec::len).collect());
        let n = self.players();
        let mut payoff = Vec::with_capacity(space.count() * n);
        for idx in 0..space.count() {
            let original: Vec<usize> = (0..n).map(|i| keep[i][space.action(idx, i)]).collect();
            let src = self.space.index(&original);
            payoff.extend_from_slice(&self.payoff[src * n..(src + 1) * n]);
        }
        Ok(StageGame::from_parts_unchecked(self.sense, actions, space, payoff))
    }

    pub fn to_f64(&self) -> StageGame<f64> {
        StageGame {
            sense: self.sense,
            actions: self.actions.clone(),
            space: self.space.clone(),
            payoff: self.payoff.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Wraps this game as a one-state Bayesian game.
    pub fn into_bayesian(self, state: impl Into<String>) -> BayesianGame<T> {
        BayesianGame {
            sense: self.sense,
            states: vec![state.into()],
            prior: vec![T::one()],
            actions: self.actions,
            space: self.space,
            payoffs: vec![self.payoff],
        }
    }

    fn check_shape(&self, x: &MixedProfile<T>) -> Result<(), GameError> {
        if x.strategies().len() != self.players()
            || x
                .strategies()
                .iter()
                .zip(self.space.sizes())
                .any(|(s, &m)| s.len() != m)
        {
            return Err(GameError::Dimension(
                "mixed profile shape does not match the game".into(),
            ));
        }
        Ok(())
    }

    /// Expected payoff (or cost) of `player` under `x`.
    pub fn expected_payoff(&self, x: &MixedProfile<T>, player: usize) -> Result<T, GameError> {
        self.check_shape(x)?;
        let mut total = T::zero();
        for idx in 0..self.space.count() {
            let p = x.probability(&self.space, idx);
            if !p.is_zero() {
                total = total + p * self.payoff(idx, player).clone();
            }
        }
        Ok(total)
    }

    /// Expected payoff of `player` when deviating to pure `action` against `x`.
    pub fn deviation_payoff(&self, x: &MixedProfile<T>, player: usize, action: usize) -> T {
        let mut total = T::zero();
        for idx in 0..self.space.count() {
            if self.space.action(idx, player) != action {
                continue;
            }
            let mut p = T::one();
            for (j, xj) in x.strategies().iter().enumerate() {
                if j != player {
                    p = p * xj[self.space.action(idx, j)].clone();
                }
            }
            if !p.is_zero() {
                total = total + p * self.payoff(idx, player).clone();
            }
        }
        total
    }
}

fn default_labels(m: usize) -> Vec<String> {
    (0..m).map(|a| format!("a{a}")).collect()
}

fn validate_actions(actions: &[Vec<String>]) -> Result<ProfileSpace, GameError> {
    if actions.is_empty() {
        return Err(GameError::invalid("players", "at least one player required"));
    }
    for (i, a) in actions.iter().enumerate() {
        if a.is_empty() {
            return Err(GameError::invalid(
                format!("actions[{i}]"),
                "each player needs at least one action",
            ));
        }
        for (k, label) in a.iter().enumerate() {
            if a[..k].contains(label) {
                return Err(GameError::invalid(
                    format!("actions[{i}][{k}]"),
                    format!("duplicate action label `{label}`"),
                ));
            }
        }
    }
    Ok(ProfileSpace::new(actions.iter().map(Vec::len).collect()))
}

/// Rescales an input distribution that passed the input check to sum to one.
/// Vectors already summing to one up to rounding are kept as given, so that
/// parsing a serialized instance reproduces it exactly.
pub(crate) fn renormalize(probabilities: &[f64]) -> Vec<f64> {
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() <= INTERNAL_TOL {
        probabilities.to_vec()
    } else {
        probabilities.iter().map(|p| p / total).collect()
    }
}

/// A finite Bayesian game: states of nature, a common prior, and one payoff
/// tensor per state.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianGame<T = f64> {
    sense: Sense,
    states: Vec<String>,
    prior: Vec<T>,
    actions: Vec<Vec<String>>,
    space: ProfileSpace,
    /// `payoffs[state][profile * players + player]`
    payoffs: Vec<Vec<T>>,
}

impl<T: Scalar> BayesianGame<T> {
    pub fn new(
        sense: Sense,
        states: Vec<String>,
        prior: Vec<T>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<Vec<T>>,
    ) -> Result<Self, GameError> {
        let space = validate_actions(&actions)?;
        if states.is_empty() {
            return Err(GameError::invalid("states", "at least one state required"));
        }
        for (k, s) in states.iter().enumerate() {
            if states[..k].contains(s) {
                return Err(GameError::invalid(
                    format!("states[{k}]"),
                    format!("duplicate state label `{s}`"),
                ));
            }
        }
        if prior.len() != states.len() {
            return Err(GameError::invalid(
                "prior",
                format!("{} entries for {} states", prior.len(), states.len()),
            ));
        }
        check_distribution(&prior, "prior", INTERNAL_TOL)?;
        if payoffs.len() != states.len() {
            return Err(GameError::invalid(
                "payoff",
                format!("{} state tensors for {} states", payoffs.len(), states.len()),
            ));
        }
        let n = space.players();
        for (t, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != space.count() * n {
                return Err(GameError::Dimension(format!(
                    "payoff[{t}] has {} entries, expected {}",
                    tensor.len(),
                    space.count() * n
                )));
            }
            if let Some(k) = tensor.iter().position(|u| u.is_negative()) {
                let profile = space.profile(k / n);
                return Err(GameError::invalid(
                    format!("payoff[{t}]{}[{}]", bracketed(&profile.0), k % n),
                    "payoffs must be non-negative",
                ));
            }
        }
        Ok(BayesianGame {
            sense,
            states,
            prior,
            actions,
            space,
            payoffs,
        })
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn prior(&self) -> &[T] {
        &self.prior
    }

    pub fn prior_belief(&self) -> PosteriorBelief<T> {
        PosteriorBelief(self.prior.clone())
    }

    pub fn actions(&self) -> &[Vec<String>] {
        &self.actions
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.space.sizes()[player]
    }

    pub fn players(&self) -> usize {
        self.space.players()
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn payoff(&self, state: usize, profile: usize, player: usize) -> &T {
        &self.payoffs[state][profile * self.players() + player]
    }

    pub fn state_payoffs(&self, state: usize) -> &[T] {
        &self.payoffs[state]
    }

    pub fn player_sum(&self, state: usize, profile: usize) -> T {
        let n = self.players();
        sum(self.payoffs[state][profile * n..(profile + 1) * n].iter().cloned())
    }

    pub fn state_index(&self, label: &str) -> Result<usize, GameError> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| GameError::UnknownState(label.to_string()))
    }

    /// The complete-information game realized in state `label`.
    pub fn state_game(&self, label: &str) -> Result<StageGame<T>, GameError> {
        Ok(self.state_game_at(self.state_index(label)?))
    }

    pub fn state_game_at(&self, state: usize) -> StageGame<T> {
        StageGame::from_parts_unchecked(
            self.sense,
            self.actions.clone(),
            self.space.clone(),
            self.payoffs[state].clone(),
        )
    }

    /// The game played under a common belief: belief-weighted average payoffs.
    pub fn posterior_game(&self, belief: &PosteriorBelief<T>) -> Result<StageGame<T>, GameError> {
        if belief.len() != self.num_states() {
            return Err(GameError::Dimension(format!(
                "belief over {} states for a game with {}",
                belief.len(),
                self.num_states()
            )));
        }
        let mut payoff = vec![T::zero(); self.payoffs[0].len()];
        for (b, tensor) in belief.probabilities().iter().zip(&self.payoffs) {
            if b.is_zero() {
                continue;
            }
            for (acc, u) in payoff.iter_mut().zip(tensor) {
                *acc = acc.clone() + b.clone() * u.clone();
            }
        }
        Ok(StageGame::from_parts_unchecked(
            self.sense,
            self.actions.clone(),
            self.space.clone(),
            payoff,
        ))
    }

    /// Expected welfare under a state-dependent outcome distribution `kernel[state][profile]`.
    pub fn expected_welfare(&self, kernel: &[Vec<T>]) -> T {
        let mut total = T::zero();
        for (t, row) in kernel.iter().enumerate() {
            if self.prior[t].is_zero() {
                continue;
            }
            for (idx, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    total = total + self.prior[t].clone() * p.clone() * self.player_sum(t, idx);
                }
            }
        }
        total
    }

    pub fn to_f64(&self) -> BayesianGame<f64> {
        BayesianGame {
            sense: self.sense,
            states: self.states.clone(),
            prior: self.prior.iter().map(Scalar::to_f64).collect(),
            actions: self.actions.clone(),
            space: self.space.clone(),
            payoffs: self
                .payoffs
                .iter()
                .map(|t| t.iter().map(Scalar::to_f64).collect())
                .collect(),
        }
    }
}

fn bracketed(indices: &[usize]) -> String {
    indices.iter().map(|i| format!("[{i}]")).collect()
}

/// Expected player-sum objective of a mixed profile (multilinear extension).
pub fn welfare<T: Scalar>(game: &StageGame<T>, x: &MixedProfile<T>) -> Result<T, GameError> {
    game.check_shape(x)?;
    let mut total = T::zero();
    for idx in 0..game.space().count() {
        let p = x.probability(game.space(), idx);
        if !p.is_zero() {
            total = total + p * game.player_sum(idx);
        }
    }
    Ok(total)
}

/// Best pure-profile welfare (minimum cost or maximum payoff). Ties go to the
/// lexicographically first profile.
pub fn optimal_welfare<T: Scalar>(game: &StageGame<T>) -> (T, PureProfile) {
    let mut best_idx = 0;
    let mut best = game.player_sum(0);
    for idx in 1..game.space().count() {
        let w = game.player_sum(idx);
        if game.sense().better(&w, &best) {
            best = w;
            best_idx = idx;
        }
    }
    (best, game.space().profile(best_idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{robbers_game, robbers_variant_game, sec51_game};

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn profile_space_round_trips_indices() {
        let space = ProfileSpace::new(vec![2, 3, 4]);
        assert_eq!(space.count(), 24);
        for idx in 0..24 {
            let p = space.profile(idx);
            assert_eq!(space.index(&p.0), idx);
        }
        let idx = space.index(&[1, 2, 3]);
        assert_eq!(space.profile(space.deviate(idx, 1, 0)).0, vec![1, 0, 3]);
    }

    #[test]
    fn state_game_extracts_the_robber_matrix() {
        let g = robbers_game(0.5, 0.1);
        let s = g.state_game("theta1").unwrap();
        // rows S1, C, S2; columns S1, C, S2
        let cell = |r: usize, c: usize| {
            let idx = s.space().index(&[r, c]);
            (*s.payoff(idx, 0), *s.payoff(idx, 1))
        };
        assert_eq!(cell(0, 0), (0.0, 0.0));
        assert_eq!(cell(0, 2), (0.0, 0.6));
        assert_eq!(cell(1, 1), (0.5, 0.5));
        assert_eq!(cell(2, 0), (0.6, 1.0));
        assert_eq!(cell(2, 1), (0.6, 1.0));
        assert_eq!(cell(2, 2), (0.0, 0.0));
        assert!(matches!(
            g.state_game("nope"),
            Err(GameError::UnknownState(_))
        ));
    }

    #[test]
    fn single_state_game_is_its_own_state_game() {
        let g = sec51_game(2.0, 0.1).state_game("theta1").unwrap().into_bayesian("only");
        let back = g.state_game("only").unwrap().into_bayesian("only");
        assert_eq!(back, g);
    }

    #[test]
    fn sec51_second_state_swaps_the_ba_cell() {
        let g = sec51_game(2.0, 0.1);
        let s = g.state_game("theta2").unwrap();
        let idx = s.space().index(&[1, 0]);
        assert_eq!((*s.payoff(idx, 0), *s.payoff(idx, 1)), (2.0, 1.0));
    }

    #[test]
    fn posterior_game_averages_payoffs() {
        let g = sec51_game(2.0, 0.1);
        let avg = g.posterior_game(&PosteriorBelief::new(vec![0.5, 0.5]).unwrap()).unwrap();
        let idx = avg.space().index(&[1, 0]);
        assert_eq!((*avg.payoff(idx, 0), *avg.payoff(idx, 1)), (1.5, 1.5));

        let point = g.posterior_game(&PosteriorBelief::point_mass(2, 0)).unwrap();
        assert_eq!(point, g.state_game_at(0));
    }

    #[test]
    fn robber_posterior_payoff_of_s2_against_cash() {
        let (alpha, eps) = (0.5, 0.1);
        let g = robbers_game(alpha, eps);
        let p = alpha / (alpha + eps);
        let avg = g.posterior_game(&PosteriorBelief::new(vec![p, 1.0 - p]).unwrap()).unwrap();
        let idx = avg.space().index(&[2, 1]);
        // theta1 gives alpha + eps, theta2 gives 0.
        assert!((avg.payoff(idx, 0) - p * (alpha + eps)).abs() < 1e-15);
    }

    #[test]
    fn welfare_of_pure_profiles_is_the_player_sum() {
        let g = sec51_game(2.0, 0.1).state_game("theta1").unwrap();
        let x = MixedProfile::pure(&PureProfile(vec![0, 0]), g.space().sizes());
        assert!((welfare(&g, &x).unwrap() - 2.1).abs() < 1e-15);
    }

    #[test]
    fn welfare_of_the_robber_mixed_equilibrium() {
        let (alpha, eps) = (0.5, 0.1);
        let g = robbers_game(alpha, eps).state_game("theta1").unwrap();
        let x = MixedProfile::new(vec![
            vec![0.0, 1.0 / (1.0 + eps), eps / (1.0 + eps)],
            vec![0.0, alpha / (alpha + eps), eps / (alpha + eps)],
        ])
        .unwrap();
        let expected = alpha + (alpha + eps) / (1.0 + eps);
        assert!((welfare(&g, &x).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn optimal_welfare_of_the_scenario_games() {
        let (alpha, eps) = (0.5, 0.1);
        let g = robbers_game(alpha, eps).state_game("theta1").unwrap();
        let (v, s) = optimal_welfare(&g);
        assert!((v - 1.6).abs() < 1e-12);
        // (S2, S1) and (S2, C) tie; the lexicographically first wins.
        assert_eq!(s.0, vec![2, 0]);

        let g = robbers_variant_game(alpha, eps).state_game("theta1").unwrap();
        let (v, s) = optimal_welfare(&g);
        assert!((v - 1.5).abs() < 1e-12);
        assert_eq!(s.0, vec![3, 2]);

        let single = StageGame::new(Sense::Payoff, vec![labels(&["x", "y"])], vec![0.2, 0.7]).unwrap();
        let (v, s) = optimal_welfare(&single);
        assert_eq!(v, 0.7);
        assert_eq!(s.0, vec![1]);
    }

    #[test]
    fn construction_rejects_invalid_data() {
        let acts = vec![labels(&["a", "b"])];
        assert!(BayesianGame::new(Sense::Cost, labels(&["t"]), vec![0.9], acts.clone(), vec![vec![1.0, 2.0]]).is_err());
        assert!(BayesianGame::new(Sense::Cost, labels(&["t"]), vec![1.0], acts.clone(), vec![vec![1.0]]).is_err());
        assert!(BayesianGame::new(Sense::Cost, labels(&["t"]), vec![1.0], acts.clone(), vec![vec![1.0, -2.0]]).is_err());
        assert!(BayesianGame::new(Sense::Cost, labels(&["t", "t"]), vec![0.5, 0.5], acts, vec![vec![1.0, 2.0]; 2]).is_err());
        assert!(MixedProfile::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(PosteriorBelief::new(vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn restrict_keeps_selected_actions() {
        let g = robbers_game(0.5, 0.1).state_game("theta1").unwrap();
        let r = g.restrict(&[vec![1, 2], vec![1, 2]]).unwrap();
        assert_eq!(r.actions()[0], labels(&["C", "S2"]));
        let idx = r.space().index(&[1, 0]);
        assert_eq!((*r.payoff(idx, 0), *r.payoff(idx, 1)), (0.6, 1.0));
    }
}
