//! Signaling scheme objects and their JSON form.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::game::{BayesianGame, GameError, INPUT_TOL};
use crate::scalar::{sum, Scalar};

/// A public scheme: every player sees the same signal. `kernel[state][signal]`
/// is the probability of sending `signal` in `state`.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicScheme<T = f64> {
    pub signals: Vec<String>,
    pub kernel: Vec<Vec<T>>,
}

impl<T: Scalar> PublicScheme<T> {
    pub fn new(signals: Vec<String>, kernel: Vec<Vec<T>>) -> Result<Self, GameError> {
        for (t, row) in kernel.iter().enumerate() {
            if row.len() != signals.len() {
                return Err(GameError::Dimension(format!(
                    "kernel row {t} has {} entries for {} signals",
                    row.len(),
                    signals.len()
                )));
            }
            check_row(row, &format!("kernel[{t}]"))?;
        }
        Ok(PublicScheme { signals, kernel })
    }

    /// The single-signal scheme.
    pub fn no_information(states: usize) -> Self {
        PublicScheme {
            signals: vec!["none".to_string()],
            kernel: vec![vec![T::one()]; states],
        }
    }

    /// The scheme announcing the state.
    pub fn full_information(states: &[String]) -> Self {
        let n = states.len();
        PublicScheme {
            signals: states.to_vec(),
            kernel: (0..n)
                .map(|t| (0..n).map(|k| if k == t { T::one() } else { T::zero() }).collect())
                .collect(),
        }
    }

    pub fn to_f64(&self) -> PublicScheme<f64> {
        PublicScheme {
            signals: self.signals.clone(),
            kernel: to_f64_rows(&self.kernel),
        }
    }
}

/// Which obedience constraints a recommendation scheme is meant to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obedience {
    /// Following each recommendation is a best response given what it reveals.
    Exact,
    /// Following recommendations beats committing to any fixed action up front.
    ExAnte,
}

impl Obedience {
    pub fn as_str(self) -> &'static str {
        match self {
            Obedience::Exact => "exact",
            Obedience::ExAnte => "ex_ante",
        }
    }
}

/// A private scheme in recommendation form: `kernel[state][profile]` is the
/// probability of privately recommending the pure profile in that state.
#[derive(Clone, Debug, PartialEq)]
pub struct RecommendationScheme<T = f64> {
    pub mode: Obedience,
    pub kernel: Vec<Vec<T>>,
    /// Set when the kernel satisfies its mode's obedience constraints.
    pub obedient: bool,
}

impl<T: Scalar> RecommendationScheme<T> {
    pub fn new(mode: Obedience, kernel: Vec<Vec<T>>, game: &BayesianGame<T>) -> Result<Self, GameError> {
        if kernel.len() != game.num_states() {
            return Err(GameError::Dimension(format!(
                "kernel has {} rows for {} states",
                kernel.len(),
                game.num_states()
            )));
        }
        for (t, row) in kernel.iter().enumerate() {
            if row.len() != game.space().count() {
                return Err(GameError::Dimension(format!(
                    "kernel row {t} has {} entries for {} profiles",
                    row.len(),
                    game.space().count()
                )));
            }
            check_row(row, &format!("kernel[{t}]"))?;
        }
        let obedient = super::check_obedience(game, &kernel, mode).passes;
        Ok(RecommendationScheme {
            mode,
            kernel,
            obedient,
        })
    }

    pub fn to_f64(&self) -> RecommendationScheme<f64> {
        RecommendationScheme {
            mode: self.mode,
            kernel: to_f64_rows(&self.kernel),
            obedient: self.obedient,
        }
    }
}

fn check_row<T: Scalar>(row: &[T], field: &str) -> Result<(), GameError> {
    if let Some(k) = row.iter().position(|p| p.is_negative() && !p.is_negligible(INPUT_TOL)) {
        return Err(GameError::Invalid {
            field: format!("{field}[{k}]"),
            message: format!("negative probability {}", row[k]),
        });
    }
    let total = sum(row.iter().cloned());
    if !(total.clone() - T::one()).is_negligible(INPUT_TOL) {
        return Err(GameError::Invalid {
            field: field.to_string(),
            message: format!("probabilities sum to {total}"),
        });
    }
    Ok(())
}

fn to_f64_rows<T: Scalar>(rows: &[Vec<T>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(Scalar::to_f64).collect())
        .collect()
}

/// Label of a pure profile: action labels joined by commas.
pub fn profile_label<T: Scalar>(game: &BayesianGame<T>, profile: usize) -> String {
    let p = game.space().profile(profile);
    p.0.iter()
        .enumerate()
        .map(|(i, &a)| game.actions()[i][a].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn public_scheme_to_json<T: Scalar>(scheme: &PublicScheme<T>) -> Value {
    json!({
        "type": "public",
        "signals": scheme.signals,
        "kernel": to_f64_rows(&scheme.kernel),
    })
}

pub fn recommendation_scheme_to_json<T: Scalar>(
    game: &BayesianGame<T>,
    scheme: &RecommendationScheme<T>,
) -> Value {
    let kind = match scheme.mode {
        Obedience::Exact => "private",
        Obedience::ExAnte => "ex_ante",
    };
    let signals: Vec<String> = (0..game.space().count())
        .map(|s| profile_label(game, s))
        .collect();
    json!({
        "type": kind,
        "signals": signals,
        "kernel": to_f64_rows(&scheme.kernel),
    })
}

/// A parsed scheme of either form.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    Public(PublicScheme),
    Recommendation(RecommendationScheme),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    #[serde(rename = "type")]
    kind: String,
    signals: Vec<String>,
    kernel: Vec<Vec<f64>>,
}

/// Parses a scheme for `game`. Recommendation signals must list the game's
/// profiles in order, labelled as by [`profile_label`].
pub fn scheme_from_json(game: &BayesianGame, text: &str) -> Result<Scheme, GameError> {
    let raw: RawScheme = serde_json::from_str(text).map_err(|err| GameError::Json {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    })?;
    if raw.kernel.len() != game.num_states() {
        return Err(GameError::invalid(
            "kernel",
            format!("{} rows for {} states", raw.kernel.len(), game.num_states()),
        ));
    }
    match raw.kind.as_str() {
        "public" => Ok(Scheme::Public(PublicScheme::new(raw.signals, raw.kernel)?)),
        "private" | "ex_ante" => {
            let expected: Vec<String> = (0..game.space().count())
                .map(|s| profile_label(game, s))
                .collect();
            if raw.signals != expected {
                return Err(GameError::invalid(
                    "signals",
                    format!("expected the profile list {expected:?}"),
                ));
            }
            let mode = if raw.kind == "private" {
                Obedience::Exact
            } else {
                Obedience::ExAnte
            };
            Ok(Scheme::Recommendation(RecommendationScheme::new(
                mode, raw.kernel, game,
            )?))
        }
        other => Err(GameError::invalid(
            "type",
            format!("unknown scheme type {other:?}"),
        )),
    }
}
