//! Parameterized constructions from the worked examples, with closed-form
//! expected values.

mod evaluate;
mod games;
mod networks;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::game::BayesianGame;
use crate::routing::{pigou_demand, pigou_poa, BeliefSegment, FlowProfile, RoutingInstance};
use crate::signaling::{Obedience, PublicScheme, RecommendationScheme, SchemeClass};

pub use evaluate::{
    evaluate_game, evaluate_instance, evaluate_routing, BoundCheck, ClassValue, Evaluation, EvaluationError, PoSEntry, ValueMethod,
};
pub use games::{appendix_a_game, robbers_game, robbers_variant_game, sec51_game};
pub use networks::{fig1_network, fig2_network, fig3_network};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?} (expected fig1, fig2, fig3, sec51, fig4, fig5 or appA)")]
    Unknown(String),
    #[error("{scenario}: missing parameter {name}")]
    Missing { scenario: ScenarioId, name: &'static str },
    #[error("{scenario}: parameters violate {constraint}")]
    Domain { scenario: ScenarioId, constraint: &'static str },
    #[error("{scenario}: no {class} scheme is constructed for this example")]
    Unsupported { scenario: ScenarioId, class: SchemeClass },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ScenarioId {
    #[serde(rename = "fig1")]
    Fig1,
    #[serde(rename = "fig2")]
    Fig2,
    #[serde(rename = "fig3")]
    Fig3,
    #[serde(rename = "sec51")]
    Sec51,
    #[serde(rename = "fig4")]
    Fig4,
    #[serde(rename = "fig5")]
    Fig5,
    #[serde(rename = "appA")]
    AppA,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 7] = [
        ScenarioId::Fig1,
        ScenarioId::Fig2,
        ScenarioId::Fig3,
        ScenarioId::Sec51,
        ScenarioId::Fig4,
        ScenarioId::Fig5,
        ScenarioId::AppA,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Fig1 => "fig1",
            ScenarioId::Fig2 => "fig2",
            ScenarioId::Fig3 => "fig3",
            ScenarioId::Sec51 => "sec51",
            ScenarioId::Fig4 => "fig4",
            ScenarioId::Fig5 => "fig5",
            ScenarioId::AppA => "appA",
        }
    }

    pub fn is_routing(self) -> bool {
        matches!(self, ScenarioId::Fig1 | ScenarioId::Fig2 | ScenarioId::Fig3)
    }

    /// Parameters the scenario reads.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            ScenarioId::Fig1 | ScenarioId::Fig2 | ScenarioId::Fig3 => &["alpha"],
            ScenarioId::Sec51 | ScenarioId::Fig4 | ScenarioId::Fig5 => &["alpha", "eps"],
            ScenarioId::AppA => &["n"],
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ScenarioError::Unknown(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub params: Params,
}

impl ScenarioSpec {
    pub fn new(id: ScenarioId, params: Params) -> Self {
        ScenarioSpec { id, params }
    }

    pub fn alpha(&self) -> Result<f64, ScenarioError> {
        self.params.alpha.ok_or(ScenarioError::Missing {
            scenario: self.id,
            name: "alpha",
        })
    }

    pub fn eps(&self) -> Result<f64, ScenarioError> {
        self.params.eps.ok_or(ScenarioError::Missing {
            scenario: self.id,
            name: "eps",
        })
    }

    pub fn n(&self) -> Result<usize, ScenarioError> {
        self.params.n.ok_or(ScenarioError::Missing {
            scenario: self.id,
            name: "n",
        })
    }

    /// Checks the parameter domain. Returns `true` at a boundary point where
    /// the construction degenerates to ratio 1.
    pub fn check_domain(&self) -> Result<bool, ScenarioError> {
        let fail = |constraint| ScenarioError::Domain {
            scenario: self.id,
            constraint,
        };
        let finite = |v: f64| v.is_finite();
        match self.id {
            ScenarioId::Fig1 | ScenarioId::Fig2 | ScenarioId::Fig3 => {
                let alpha = self.alpha()?;
                if !finite(alpha) || alpha < 0.0 {
                    return Err(fail("alpha >= 0"));
                }
                Ok(alpha == 0.0)
            }
            ScenarioId::Sec51 => {
                let (alpha, eps) = (self.alpha()?, self.eps()?);
                if !finite(alpha) || !finite(eps) || eps <= 0.0 {
                    return Err(fail("alpha - 1 > 2 eps > 0"));
                }
                if alpha == 1.0 + eps {
                    return Ok(true);
                }
                if alpha - 1.0 > 2.0 * eps {
                    Ok(false)
                } else {
                    Err(fail("alpha - 1 > 2 eps > 0"))
                }
            }
            ScenarioId::Fig4 => {
                let (alpha, eps) = (self.alpha()?, self.eps()?);
                if alpha == 1.0 && eps == 0.0 {
                    return Ok(true);
                }
                if finite(alpha) && finite(eps) && 1.0 >= alpha && alpha > eps && eps > 0.0 {
                    Ok(false)
                } else {
                    Err(fail("1 >= alpha > eps > 0"))
                }
            }
            ScenarioId::Fig5 => {
                let (alpha, eps) = (self.alpha()?, self.eps()?);
                let constraint = "1 >= alpha > eps >= 0 and alpha + eps < 1";
                if !(finite(alpha) && finite(eps) && 1.0 >= alpha && alpha > eps && eps >= 0.0) {
                    return Err(fail(constraint));
                }
                if alpha + eps == 1.0 {
                    Ok(true)
                } else if alpha + eps < 1.0 {
                    Ok(false)
                } else {
                    Err(fail(constraint))
                }
            }
            ScenarioId::AppA => {
                if self.n()? >= 1 {
                    Ok(false)
                } else {
                    Err(fail("n >= 1"))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Game(BayesianGame),
    Routing(RoutingInstance),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuiltScenario {
    pub spec: ScenarioSpec,
    pub instance: Instance,
    /// Closed-form values keyed by `poa`, `fi`, `ni`, `pub`, `pri`, `exp`, `opt`.
    pub expected: BTreeMap<&'static str, f64>,
    pub boundary: bool,
}

/// Cost of the optimal flow in the Pigou-type networks: `d^(alpha+1) + 1 - d`.
fn pigou_optimum(alpha: f64) -> f64 {
    let d = pigou_demand(alpha);
    crate::routing::power(d, alpha + 1.0) + 1.0 - d
}

/// Builds the instance and its expected values.
pub fn build(spec: &ScenarioSpec) -> Result<BuiltScenario, ScenarioError> {
    let boundary = spec.check_domain()?;
    let mut expected = BTreeMap::new();
    let instance = match spec.id {
        ScenarioId::Fig1 | ScenarioId::Fig2 | ScenarioId::Fig3 => {
            let alpha = spec.alpha()?;
            let opt = pigou_optimum(alpha);
            let poa = pigou_poa(alpha).expect("alpha checked");
            expected.insert("poa", poa);
            expected.insert("opt", opt);
            expected.insert("fi", 1.0);
            match spec.id {
                ScenarioId::Fig1 => {
                    expected.insert("ni", opt);
                    expected.insert("pub", opt);
                    Instance::Routing(fig1_network(alpha))
                }
                ScenarioId::Fig2 => {
                    expected.insert("ni", 1.0);
                    expected.insert("pub", 1.0);
                    expected.insert("pri", opt);
                    Instance::Routing(fig2_network(alpha))
                }
                _ => {
                    expected.insert("pri", 1.0);
                    expected.insert("exp", opt);
                    Instance::Routing(fig3_network(alpha))
                }
            }
        }
        ScenarioId::Sec51 => {
            let (alpha, eps) = (spec.alpha()?, spec.eps()?);
            expected.insert("fi", 2.0 + eps);
            expected.insert("ni", alpha + 1.0);
            expected.insert("pub", alpha + 1.0);
            expected.insert("opt", alpha + 1.0);
            expected.insert("poa", (2.0 + eps) / (alpha + 1.0));
            Instance::Game(sec51_game(alpha, eps))
        }
        ScenarioId::Fig4 => {
            let (alpha, eps) = (spec.alpha()?, spec.eps()?);
            let u0 = alpha + (alpha + eps) / (1.0 + eps);
            let opt = 1.0 + alpha + eps;
            expected.insert("fi", u0);
            expected.insert("pub", u0);
            expected.insert("pri", opt);
            expected.insert("exp", opt);
            expected.insert("opt", opt);
            expected.insert(
                "poa",
                (2.0 * alpha + eps + alpha * eps) / ((1.0 + alpha + eps) * (1.0 + eps)),
            );
            Instance::Game(robbers_game(alpha, eps))
        }
        ScenarioId::Fig5 => {
            let (alpha, eps) = (spec.alpha()?, spec.eps()?);
            expected.insert("fi", 2.0 * alpha + eps);
            // The ex-ante kernel gains player one eps/2 by deviating; with eps = 0
            // it is also privately obedient and the private value rises to 1 + alpha.
            let pri = if eps == 0.0 { 1.0 + alpha } else { 2.0 * alpha + eps };
            expected.insert("pri", pri);
            expected.insert("exp", 1.0 + alpha);
            expected.insert("opt", 1.0 + alpha);
            expected.insert("poa", (2.0 * alpha + eps) / (1.0 + alpha));
            Instance::Game(robbers_variant_game(alpha, eps))
        }
        ScenarioId::AppA => {
            let n = spec.n()?;
            expected.insert("ni", 1.0 / n as f64);
            expected.insert("fi", 1.0);
            expected.insert("pub", 1.0);
            expected.insert("opt", 1.0);
            expected.insert("poa", 1.0);
            Instance::Game(appendix_a_game(n))
        }
    };
    Ok(BuiltScenario {
        spec: *spec,
        instance,
        expected,
        boundary,
    })
}

/// A scheme exhibited by one of the constructions.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioScheme {
    Public(PublicScheme),
    Recommendation(RecommendationScheme),
    /// Private routing scheme given by belief segments.
    Segments(Vec<BeliefSegment>),
    /// Ex-ante routing scheme: the recommended flow in each state.
    StateFlows(Vec<FlowProfile>),
}

fn unit_split(paths: usize, on: usize) -> Vec<f64> {
    let mut split = vec![0.0; paths];
    split[on] = 1.0;
    split
}

/// The explicit scheme a construction uses for `class`.
pub fn scheme_for(spec: &ScenarioSpec, class: SchemeClass) -> Result<ScenarioScheme, ScenarioError> {
    let built = build(spec)?;
    let unsupported = ScenarioError::Unsupported {
        scenario: spec.id,
        class,
    };
    let states = match &built.instance {
        Instance::Game(g) => g.states().to_vec(),
        Instance::Routing(r) => r.states().to_vec(),
    };
    match class {
        SchemeClass::FullInformation => return Ok(ScenarioScheme::Public(PublicScheme::full_information(&states))),
        SchemeClass::NoInformation => {
            return Ok(ScenarioScheme::Public(PublicScheme::no_information(states.len())))
        }
        _ => {}
    }
    match (spec.id, class, &built.instance) {
        (ScenarioId::Fig1 | ScenarioId::Sec51, SchemeClass::Public, _) => {
            Ok(ScenarioScheme::Public(PublicScheme::no_information(states.len())))
        }
        (ScenarioId::Fig4 | ScenarioId::AppA, SchemeClass::Public, _) => {
            Ok(ScenarioScheme::Public(PublicScheme::full_information(&states)))
        }
        (ScenarioId::Fig2, SchemeClass::Private, Instance::Routing(net)) => {
            // A random d(alpha) share learns the state and takes the x^alpha edge;
            // everyone else learns nothing and takes the constant edge.
            let d = pigou_demand(spec.alpha()?);
            let paths = net.paths(0).len();
            Ok(ScenarioScheme::Segments(vec![
                BeliefSegment {
                    commodity: 0,
                    label: "informed theta1".into(),
                    mass: vec![d, 0.0],
                    split: unit_split(paths, 1),
                },
                BeliefSegment {
                    commodity: 0,
                    label: "informed theta2".into(),
                    mass: vec![0.0, d],
                    split: unit_split(paths, 0),
                },
                BeliefSegment {
                    commodity: 0,
                    label: "uninformed".into(),
                    mass: vec![1.0 - d, 1.0 - d],
                    split: unit_split(paths, 2),
                },
            ]))
        }
        (ScenarioId::Fig3, SchemeClass::Private, Instance::Routing(net)) => {
            // Full information: everyone takes the x^alpha edge of the realized state.
            let paths = net.paths(0).len();
            Ok(ScenarioScheme::Segments(vec![
                BeliefSegment {
                    commodity: 0,
                    label: "theta1".into(),
                    mass: vec![1.0, 0.0],
                    split: unit_split(paths, 3),
                },
                BeliefSegment {
                    commodity: 0,
                    label: "theta2".into(),
                    mass: vec![0.0, 1.0],
                    split: unit_split(paths, 0),
                },
            ]))
        }
        (ScenarioId::Fig3, SchemeClass::ExAnte, Instance::Routing(net)) => {
            // The optimal flow of each state: d on the x^alpha edge, the rest on the unit edge.
            let d = pigou_demand(spec.alpha()?);
            let theta1 = vec![0.0, 0.0, 1.0 - d, d];
            let theta2 = vec![d, 1.0 - d, 0.0, 0.0];
            let flows = [theta1, theta2]
                .into_iter()
                .map(|p| FlowProfile::from_paths(net, vec![p]).expect("flows conserve demand"))
                .collect();
            Ok(ScenarioScheme::StateFlows(flows))
        }
        (ScenarioId::Fig4, SchemeClass::Private, Instance::Game(g)) => {
            // Player 1 learns the state and robs the full safe; player 2 learns nothing and cashes.
            let space = g.space();
            let mut kernel = vec![vec![0.0; space.count()]; 2];
            kernel[0][space.index(&[2, 1])] = 1.0;
            kernel[1][space.index(&[0, 1])] = 1.0;
            Ok(ScenarioScheme::Recommendation(
                RecommendationScheme::new(Obedience::Exact, kernel, g).expect("kernel is well formed"),
            ))
        }
        (ScenarioId::Fig5, SchemeClass::ExAnte, Instance::Game(g)) => {
            // (S2, C2) in theta1 and (S1, C1) in theta2.
            let space = g.space();
            let mut kernel = vec![vec![0.0; space.count()]; 2];
            kernel[0][space.index(&[3, 2])] = 1.0;
            kernel[1][space.index(&[1, 0])] = 1.0;
            Ok(ScenarioScheme::Recommendation(
                RecommendationScheme::new(Obedience::ExAnte, kernel, g).expect("kernel is well formed"),
            ))
        }
        _ => Err(unsupported),
    }
}
