//! Power of signaling and price of anarchy in Bayesian games.

pub mod equilibria;
pub mod game;
pub mod lp;
pub mod ratio;
pub mod routing;
pub mod scalar;
pub mod scenarios;
pub mod signaling;

pub use game::{BayesianGame, MixedProfile, PosteriorBelief, PureProfile, Sense, StageGame};
pub use ratio::Ratio;
pub use scalar::{Rational, Scalar};
