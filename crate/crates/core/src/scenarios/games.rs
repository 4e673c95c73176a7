//! Finite Bayesian games from the worked examples.

use crate::game::{BayesianGame, Sense};
use crate::scalar::Scalar;

fn two_states() -> Vec<String> {
    vec!["theta1".to_string(), "theta2".to_string()]
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Flattens a bimatrix given as rows of `(u1, u2)` cells.
fn cells<T: Scalar>(rows: Vec<Vec<(T, T)>>) -> Vec<T> {
    rows.into_iter()
        .flatten()
        .flat_map(|(a, b)| [a, b])
        .collect()
}

fn half<T: Scalar>() -> Vec<T> {
    vec![T::from_ratio(1, 2), T::from_ratio(1, 2)]
}

/// The 2x2 game with actions A, B where full information beats every public scheme.
pub fn sec51_game<T: Scalar>(alpha: T, eps: T) -> BayesianGame<T> {
    let one = T::one();
    let state = |ba: (T, T)| {
        cells(vec![
            vec![
                (one.clone() + eps.clone(), one.clone()),
                (one.clone() - eps.clone(), one.clone() - eps.clone()),
            ],
            vec![ba, (one.clone(), one.clone() + eps.clone())],
        ])
    };
    BayesianGame::new(
        Sense::Payoff,
        two_states(),
        half(),
        vec![labels(&["A", "B"]), labels(&["A", "B"])],
        vec![
            state((one.clone(), alpha.clone())),
            state((alpha.clone(), one.clone())),
        ],
    )
    .expect("sec51 game is valid")
}

/// The robber's game with actions S1 (steal from 1), C (cash), S2 (steal from 2).
pub fn robbers_game<T: Scalar>(alpha: T, eps: T) -> BayesianGame<T> {
    let z = T::zero;
    let a = || alpha.clone();
    let ae = || alpha.clone() + eps.clone();
    let one = T::one;
    let theta1 = cells(vec![
        vec![(z(), z()), (z(), a()), (z(), ae())],
        vec![(a(), z()), (a(), a()), (a(), ae())],
        vec![(ae(), one()), (ae(), one()), (z(), z())],
    ]);
    let theta2 = cells(vec![
        vec![(z(), z()), (ae(), one()), (ae(), one())],
        vec![(a(), ae()), (a(), a()), (a(), z())],
        vec![(z(), ae()), (z(), a()), (z(), z())],
    ]);
    let acts = labels(&["S1", "C", "S2"]);
    BayesianGame::new(
        Sense::Payoff,
        two_states(),
        half(),
        vec![acts.clone(), acts],
        vec![theta1, theta2],
    )
    .expect("robber's game is valid")
}

/// The robber's game variant with two cash and two steal actions per player.
pub fn robbers_variant_game<T: Scalar>(alpha: T, eps: T) -> BayesianGame<T> {
    let z = T::zero;
    let a = || alpha.clone();
    let e = || eps.clone();
    let ae = || alpha.clone() + eps.clone();
    let one = T::one;
    let theta1 = cells(vec![
        vec![(z(), z()), (z(), z()), (z(), e()), (z(), e())],
        vec![(z(), z()), (z(), z()), (z(), a()), (z(), a())],
        vec![(ae(), z()), (ae(), z()), (ae(), a()), (ae(), a())],
        vec![(a(), z()), (a(), z()), (a(), one()), (z(), z())],
    ]);
    let theta2 = cells(vec![
        vec![(ae(), a()), (ae(), a()), (ae(), z()), (ae(), z())],
        vec![(a(), one()), (z(), z()), (a(), z()), (a(), z())],
        vec![(z(), a()), (z(), a()), (z(), z()), (z(), z())],
        vec![(z(), a()), (z(), a()), (z(), z()), (z(), z())],
    ]);
    let acts = labels(&["C1", "S1", "C2", "S2"]);
    BayesianGame::new(
        Sense::Payoff,
        two_states(),
        half(),
        vec![acts.clone(), acts],
        vec![theta1, theta2],
    )
    .expect("robber's variant game is valid")
}

/// One player, `n` actions and `n` equally likely states; action `i` pays 1 exactly in state `i`.
pub fn appendix_a_game<T: Scalar>(n: usize) -> BayesianGame<T> {
    let states = (1..=n).map(|i| format!("theta{i}")).collect();
    let actions = vec![(1..=n).map(|i| format!("A{i}")).collect()];
    let payoffs = (0..n)
        .map(|t| {
            (0..n)
                .map(|a| if a == t { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    BayesianGame::new(
        Sense::Payoff,
        states,
        vec![T::from_ratio(1, n as i64); n],
        actions,
        payoffs,
    )
    .expect("n-state game is valid")
}
