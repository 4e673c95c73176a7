//! JSON instance format for Bayesian games.
//!
//! ```json
//! {"sense": "payoff", "states": ["t1", "t2"], "prior": [0.5, 0.5],
//!  "players": 2, "actions": [["A", "B"], ["A", "B"]],
//!  "payoff": [[[[1, 1], [0, 0]], [[0, 0], [1, 1]]], ...]}
//! ```
//!
//! `payoff` is indexed `[state][s_1]...[s_n][player]`.

use serde::Deserialize;
use serde_json::{json, Value};

use super::{check_distribution, BayesianGame, GameError, Sense, INPUT_TOL};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    sense: Sense,
    states: Vec<String>,
    prior: Vec<f64>,
    players: usize,
    actions: Vec<Vec<String>>,
    payoff: Value,
}

fn json_error(err: serde_json::Error) -> GameError {
    GameError::Json {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses and validates a game. Errors name the offending field path.
pub fn game_from_json(text: &str) -> Result<BayesianGame, GameError> {
    let raw: RawGame = serde_json::from_str(text).map_err(json_error)?;
    if raw.players == 0 {
        return Err(GameError::invalid("players", "must be at least 1"));
    }
    if raw.actions.len() != raw.players {
        return Err(GameError::invalid(
            "actions",
            format!(
                "{} action lists for {} players",
                raw.actions.len(),
                raw.players
            ),
        ));
    }
    if raw.prior.len() != raw.states.len() {
        return Err(GameError::invalid(
            "prior",
            format!("{} entries for {} states", raw.prior.len(), raw.states.len()),
        ));
    }
    check_distribution(&raw.prior, "prior", INPUT_TOL)?;
    let prior = super::renormalize(&raw.prior);

    let states = raw
        .payoff
        .as_array()
        .ok_or_else(|| GameError::invalid("payoff", "expected an array of states"))?;
    if states.len() != raw.states.len() {
        return Err(GameError::invalid(
            "payoff",
            format!("{} state tensors for {} states", states.len(), raw.states.len()),
        ));
    }
    let sizes: Vec<usize> = raw.actions.iter().map(Vec::len).collect();
    let mut payoffs = Vec::with_capacity(states.len());
    for (t, tensor) in states.iter().enumerate() {
        let mut flat = Vec::new();
        flatten(tensor, &sizes, raw.players, &format!("payoff[{t}]"), &mut flat)?;
        payoffs.push(flat);
    }
    BayesianGame::new(raw.sense, raw.states, prior, raw.actions, payoffs)
}

fn flatten(
    value: &Value,
    sizes: &[usize],
    players: usize,
    path: &str,
    out: &mut Vec<f64>,
) -> Result<(), GameError> {
    let arr = value
        .as_array()
        .ok_or_else(|| GameError::invalid(path, "expected an array"))?;
    match sizes.split_first() {
        Some((&m, rest)) => {
            if arr.len() != m {
                return Err(GameError::invalid(
                    path,
                    format!("expected {m} entries, found {}", arr.len()),
                ));
            }
            for (k, v) in arr.iter().enumerate() {
                flatten(v, rest, players, &format!("{path}[{k}]"), out)?;
            }
        }
        None => {
            if arr.len() != players {
                return Err(GameError::invalid(
                    path,
                    format!("expected {players} player payoffs, found {}", arr.len()),
                ));
            }
            for (i, v) in arr.iter().enumerate() {
                let u = v.as_f64().ok_or_else(|| {
                    GameError::invalid(format!("{path}[{i}]"), "expected a number")
                })?;
                if !u.is_finite() || u < 0.0 {
                    return Err(GameError::invalid(
                        format!("{path}[{i}]"),
                        format!("payoff {u} must be finite and non-negative"),
                    ));
                }
                out.push(u);
            }
        }
    }
    Ok(())
}

fn nest(flat: &[f64], sizes: &[usize], players: usize) -> Value {
    match sizes.split_first() {
        Some((&m, rest)) => {
            let chunk = flat.len() / m;
            Value::Array(
                (0..m)
                    .map(|k| nest(&flat[k * chunk..(k + 1) * chunk], rest, players))
                    .collect(),
            )
        }
        None => json!(flat),
    }
}

pub fn game_to_json(game: &BayesianGame) -> Value {
    let sizes = game.space().sizes().to_vec();
    let payoff: Vec<Value> = (0..game.num_states())
        .map(|t| nest(game.state_payoffs(t), &sizes, game.players()))
        .collect();
    json!({
        "sense": game.sense(),
        "states": game.states(),
        "prior": game.prior(),
        "players": game.players(),
        "actions": game.actions(),
        "payoff": payoff,
    })
}

pub fn game_to_json_string(game: &BayesianGame) -> String {
    serde_json::to_string_pretty(&game_to_json(game)).expect("game serializes")
}
