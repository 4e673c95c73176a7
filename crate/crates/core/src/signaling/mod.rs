//! Signaling scheme classes, their optimal values and the power of signaling.
//!
//! Full information, no information and public schemes are evaluated under
//! worst-equilibrium selection. Private and ex-ante private schemes are
//! welfare-optimal obedient recommendation schemes found by linear programming.

mod private;
mod public;
mod scheme;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::{poa_max, EquilibriumError};
use crate::game::{BayesianGame, GameError, Sense};
use crate::lp::{LpError, LpStatus};
use crate::ratio::Ratio;
use crate::scalar::Scalar;

pub use private::{
    check_obedience, optimal_ex_ante_value, optimal_private_value, ObedienceReport, Violation,
    OBEDIENCE_TOL,
};
pub use public::{
    envelope_at, evaluate_full_information, evaluate_no_information, evaluate_public_scheme,
    optimal_public_value, posterior_label, posterior_value, signal_posteriors, simplex_grid,
    welfare_ceiling, PublicMethod, PublicOptimum, PublicOptions, DEFAULT_GRID, MAX_GRID_STATES,
    SIGNAL_TOL,
};
pub use scheme::{
    profile_label, public_scheme_to_json, recommendation_scheme_to_json, scheme_from_json,
    Obedience, PublicScheme, RecommendationScheme, Scheme,
};

/// Slack for the PoS bound and class-monotonicity checks.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalingError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("linear program reported {0:?}; the scheme program is always feasible and bounded")]
    LpStatus(LpStatus),
    #[error("public grid search supports at most {max} states (got {states})")]
    TooManyStates { states: usize, max: usize },
    #[error("invalid scheme: {0}")]
    Kernel(String),
    #[error("class {a} is not contained in class {b}")]
    ClassOrder { a: SchemeClass, b: SchemeClass },
}

/// Scheme classes ordered by inclusion: FI and NI inside Pub, inside Pri, inside exP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeClass {
    #[serde(rename = "fi")]
    FullInformation,
    #[serde(rename = "ni")]
    NoInformation,
    #[serde(rename = "pub")]
    Public,
    #[serde(rename = "pri")]
    Private,
    #[serde(rename = "exp")]
    ExAnte,
}

impl SchemeClass {
    pub const ALL: [SchemeClass; 5] = [
        SchemeClass::FullInformation,
        SchemeClass::NoInformation,
        SchemeClass::Public,
        SchemeClass::Private,
        SchemeClass::ExAnte,
    ];

    /// The four classes the PoS bound ranges over, smallest first.
    pub const BOUND_CHAIN: [SchemeClass; 4] = [
        SchemeClass::FullInformation,
        SchemeClass::Public,
        SchemeClass::Private,
        SchemeClass::ExAnte,
    ];

    fn rank(self) -> u8 {
        match self {
            SchemeClass::FullInformation | SchemeClass::NoInformation => 0,
            SchemeClass::Public => 1,
            SchemeClass::Private => 2,
            SchemeClass::ExAnte => 3,
        }
    }

    /// Whether every scheme of `self` also belongs to `other`.
    pub fn within(self, other: SchemeClass) -> bool {
        self == other || self.rank() < other.rank()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeClass::FullInformation => "fi",
            SchemeClass::NoInformation => "ni",
            SchemeClass::Public => "pub",
            SchemeClass::Private => "pri",
            SchemeClass::ExAnte => "exp",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            SchemeClass::FullInformation => "FI",
            SchemeClass::NoInformation => "NI",
            SchemeClass::Public => "Pub",
            SchemeClass::Private => "Pri",
            SchemeClass::ExAnte => "exP",
        }
    }
}

impl fmt::Display for SchemeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for SchemeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fi" => Ok(SchemeClass::FullInformation),
            "ni" => Ok(SchemeClass::NoInformation),
            "pub" => Ok(SchemeClass::Public),
            "pri" => Ok(SchemeClass::Private),
            "exp" => Ok(SchemeClass::ExAnte),
            other => Err(format!("unknown scheme class {other:?} (expected fi, ni, pub, pri or exp)")),
        }
    }
}

/// Optimal values of the requested classes, with their witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassValues<T = f64> {
    pub full_information: Option<T>,
    pub no_information: Option<T>,
    pub public: Option<PublicOptimum<T>>,
    pub private: Option<(T, RecommendationScheme<T>)>,
    pub ex_ante: Option<(T, RecommendationScheme<T>)>,
}

impl<T: Scalar> ClassValues<T> {
    pub fn compute(
        game: &BayesianGame<T>,
        classes: &[SchemeClass],
        options: &PublicOptions,
    ) -> Result<Self, SignalingError> {
        let wants = |c| classes.contains(&c);
        Ok(ClassValues {
            full_information: if wants(SchemeClass::FullInformation) {
                Some(evaluate_full_information(game)?.0)
            } else {
                None
            },
            no_information: if wants(SchemeClass::NoInformation) {
                Some(evaluate_no_information(game)?)
            } else {
                None
            },
            public: if wants(SchemeClass::Public) {
                Some(optimal_public_value(game, options)?)
            } else {
                None
            },
            private: if wants(SchemeClass::Private) {
                Some(optimal_private_value(game)?)
            } else {
                None
            },
            ex_ante: if wants(SchemeClass::ExAnte) {
                Some(optimal_ex_ante_value(game)?)
            } else {
                None
            },
        })
    }

    pub fn get(&self, class: SchemeClass) -> Option<&T> {
        match class {
            SchemeClass::FullInformation => self.full_information.as_ref(),
            SchemeClass::NoInformation => self.no_information.as_ref(),
            SchemeClass::Public => self.public.as_ref().map(|p| &p.value),
            SchemeClass::Private => self.private.as_ref().map(|p| &p.0),
            SchemeClass::ExAnte => self.ex_ante.as_ref().map(|p| &p.0),
        }
    }
}

/// Power of signaling of class `b` over the smaller class `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoSReport<T = f64> {
    pub a: SchemeClass,
    pub b: SchemeClass,
    pub value_a: T,
    pub value_b: T,
    /// `value_a / value_b`, with 0/0 read as 1 and x/0 as infinity.
    pub ratio: Ratio<T>,
}

/// Builds the PoS report for `(a, b)` from already computed values.
pub fn pos_from_values<T: Scalar>(
    a: SchemeClass,
    b: SchemeClass,
    value_a: T,
    value_b: T,
) -> Result<PoSReport<T>, SignalingError> {
    if !a.within(b) {
        return Err(SignalingError::ClassOrder { a, b });
    }
    Ok(PoSReport {
        a,
        b,
        ratio: Ratio::of(&value_a, &value_b),
        value_a,
        value_b,
    })
}

/// PoS of class `b` over class `a`, computing both optimal values.
pub fn pos_ratio<T: Scalar>(
    game: &BayesianGame<T>,
    a: SchemeClass,
    b: SchemeClass,
    options: &PublicOptions,
) -> Result<PoSReport<T>, SignalingError> {
    if !a.within(b) {
        return Err(SignalingError::ClassOrder { a, b });
    }
    let values = ClassValues::compute(game, &[a, b], options)?;
    pos_from_values(
        a,
        b,
        values.get(a).expect("computed").clone(),
        values.get(b).expect("computed").clone(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub a: SchemeClass,
    pub b: SchemeClass,
    pub pos: f64,
    pub holds: bool,
}

/// Monotonicity in the larger class: `PoS(j:i)` against `PoS(k:i)` for `i < j < k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub i: SchemeClass,
    pub j: SchemeClass,
    pub k: SchemeClass,
    pub pos_j: f64,
    pub pos_k: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub sense: Sense,
    /// Largest per-state PoA for cost games, smallest for payoff games.
    pub poa_bound: f64,
    pub values: Vec<(SchemeClass, f64)>,
    pub pairs: Vec<PairCheck>,
    pub chains: Vec<ChainCheck>,
    pub passes: bool,
}

/// Checks every PoS ratio among FI, Pub, Pri and exP against the extreme
/// per-state PoA, and the monotonicity of PoS in the larger class.
pub fn verify_pos_bound<T: Scalar>(
    game: &BayesianGame<T>,
    options: &PublicOptions,
) -> Result<BoundReport, SignalingError> {
    let sense = game.sense();
    let bound = poa_max(game)?.to_f64();
    let values = ClassValues::compute(game, &SchemeClass::BOUND_CHAIN, options)?;
    let value = |c: SchemeClass| values.get(c).expect("computed").clone();
    let pos = |a: SchemeClass, b: SchemeClass| Ratio::of(&value(a), &value(b)).to_f64();
    // PoS may not exceed the bound for cost games, nor fall below it for payoff games.
    let within = |small: f64, large: f64| match sense {
        Sense::Cost => small <= large + BOUND_TOL,
        Sense::Payoff => small >= large - BOUND_TOL,
    };

    let chain = SchemeClass::BOUND_CHAIN;
    let mut pairs = Vec::new();
    for (x, &a) in chain.iter().enumerate() {
        for &b in &chain[x + 1..] {
            let r = pos(a, b);
            pairs.push(PairCheck {
                a,
                b,
                pos: r,
                holds: within(r, bound),
            });
        }
    }
    let mut chains = Vec::new();
    for x in 0..4 {
        for y in x + 1..4 {
            for z in y + 1..4 {
                let (i, j, k) = (chain[x], chain[y], chain[z]);
                let (pos_j, pos_k) = (pos(i, j), pos(i, k));
                chains.push(ChainCheck {
                    i,
                    j,
                    k,
                    pos_j,
                    pos_k,
                    holds: within(pos_j, pos_k),
                });
            }
        }
    }
    let passes = pairs.iter().all(|p| p.holds) && chains.iter().all(|c| c.holds);
    Ok(BoundReport {
        sense,
        poa_bound: bound,
        values: chain.iter().map(|&c| (c, value(c).to_f64())).collect(),
        pairs,
        chains,
        passes,
    })
}
