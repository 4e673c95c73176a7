//! Seeded random game generation for property checks and the verify harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BayesianGame, ProfileSpace, Sense};

/// Size caps for generated games. Players and states are drawn uniformly
/// from `1..=max`, actions from `2..=max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCaps {
    pub players: usize,
    pub states: usize,
    pub actions: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps {
            players: 2,
            states: 2,
            actions: 3,
        }
    }
}

/// Deterministic RNG for the `index`-th instance of a batch.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Game with fixed dimensions and payoffs uniform on `[0, 1)`. The prior is
/// uniform so that every state matters.
pub fn random_game(
    rng: &mut impl Rng,
    sense: Sense,
    players: usize,
    states: usize,
    actions: usize,
) -> BayesianGame {
    let sizes = vec![actions; players];
    let space = ProfileSpace::new(sizes.clone());
    let labels = sizes
        .iter()
        .map(|&m| (0..m).map(|a| format!("a{a}")).collect())
        .collect();
    let payoffs = (0..states)
        .map(|_| {
            (0..space.count() * players)
                .map(|_| rng.gen::<f64>())
                .collect()
        })
        .collect();
    BayesianGame::new(
        sense,
        (0..states).map(|t| format!("t{t}")).collect(),
        vec![1.0 / states as f64; states],
        labels,
        payoffs,
    )
    .expect("generated game is valid")
}

/// Game whose sense and dimensions are drawn from the caps.
pub fn random_capped_game(rng: &mut impl Rng, caps: SizeCaps) -> BayesianGame {
    let sense = if rng.gen::<bool>() {
        Sense::Cost
    } else {
        Sense::Payoff
    };
    let players = rng.gen_range(1..=caps.players.max(1));
    let states = rng.gen_range(1..=caps.states.max(1)).max(1);
    let actions = rng.gen_range(2..=caps.actions.max(2));
    random_game(rng, sense, players, states, actions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_game() {
        let a = random_capped_game(&mut instance_rng(7, 3), SizeCaps::default());
        let b = random_capped_game(&mut instance_rng(7, 3), SizeCaps::default());
        assert_eq!(a, b);
        let c = random_capped_game(&mut instance_rng(7, 4), SizeCaps::default());
        assert_ne!(a, c);
    }
}
