//! Class values, PoS pairs and worst-state PoA for a game or routing instance.

use serde::Serialize;
use thiserror::Error;

use crate::equilibria::{poa_max, EquilibriumError};
use crate::game::{BayesianGame, Sense};
use crate::ratio::{Convention, Ratio};
use crate::routing::{
    evaluate_segmented_flow, ex_ante_obedience_check, routing_cost_floor, routing_full_information,
    routing_no_information, routing_optimal_public, routing_poa_max, total_cost, RoutingError, RoutingInstance,
};
use crate::signaling::{ClassValues, BOUND_TOL, PublicMethod, PublicOptions, SchemeClass, SignalingError};

use super::{scheme_for, Instance, ScenarioError, ScenarioScheme, ScenarioSpec};

/// Relative tolerance for calling a routing scheme's cost optimal.
const FLOOR_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Signaling(#[from] SignalingError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("{class} values of routing instances need an explicit scheme; only built-in scenarios provide one")]
    NoRoutingScheme { class: SchemeClass },
    #[error("the {class} scheme of this scenario is not an equilibrium (largest gain {gain:e})")]
    NotObedient { class: SchemeClass, gain: f64 },
}

/// How a class value was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMethod {
    /// Direct evaluation (FI, NI, single-state instances).
    Direct,
    /// Attains the welfare ceiling or cost floor, so it is optimal.
    Certified,
    /// Best posterior-grid scheme.
    Grid { resolution: usize },
    /// Optimal value of the obedience linear program.
    LinearProgram,
    /// Cost of the construction's scheme; `optimal` if it attains the cost floor.
    Scheme { optimal: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassValue {
    pub class: SchemeClass,
    pub value: f64,
    pub method: ValueMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoSEntry {
    pub a: SchemeClass,
    pub b: SchemeClass,
    pub ratio: f64,
    pub convention: Convention,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub sense: Sense,
    pub values: Vec<ClassValue>,
    /// Every ordered pair `(a, b)` of evaluated classes with `a` inside `b`.
    pub pos: Vec<PoSEntry>,
    pub poa_max: f64,
    pub poa_convention: Convention,
}

/// One PoS pair checked against the worst-state PoA.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub a: SchemeClass,
    pub b: SchemeClass,
    pub pos: f64,
    pub poa_max: f64,
    pub holds: bool,
}

impl Evaluation {
    /// Checks every evaluated pair of the bound chain (FI, Pub, Pri, exP)
    /// against `poa_max`: PoS may not exceed it for costs, nor fall below it
    /// for payoffs.
    pub fn bound_checks(&self) -> Vec<BoundCheck> {
        self.pos
            .iter()
            .filter(|p| SchemeClass::BOUND_CHAIN.contains(&p.a) && SchemeClass::BOUND_CHAIN.contains(&p.b))
            .map(|p| BoundCheck {
                a: p.a,
                b: p.b,
                pos: p.ratio,
                poa_max: self.poa_max,
                holds: match self.sense {
                    Sense::Cost => p.ratio <= self.poa_max + BOUND_TOL,
                    Sense::Payoff => p.ratio >= self.poa_max - BOUND_TOL,
                },
            })
            .collect()
    }

    pub fn value(&self, class: SchemeClass) -> Option<f64> {
        self.values.iter().find(|v| v.class == class).map(|v| v.value)
    }

    pub fn pos(&self, a: SchemeClass, b: SchemeClass) -> Option<f64> {
        self.pos.iter().find(|p| p.a == a && p.b == b).map(|p| p.ratio)
    }
}

fn sorted(classes: &[SchemeClass]) -> Vec<SchemeClass> {
    let mut out: Vec<SchemeClass> = SchemeClass::ALL.into_iter().filter(|c| classes.contains(c)).collect();
    out.dedup();
    out
}

fn finish(sense: Sense, values: Vec<ClassValue>, poa: Ratio) -> Evaluation {
    let mut pos = Vec::new();
    for a in &values {
        for b in &values {
            if a.class != b.class && a.class.within(b.class) {
                let r = Ratio::of(&a.value, &b.value);
                pos.push(PoSEntry {
                    a: a.class,
                    b: b.class,
                    ratio: r.to_f64(),
                    convention: r.convention(),
                });
            }
        }
    }
    Evaluation {
        sense,
        values,
        pos,
        poa_max: poa.to_f64(),
        poa_convention: poa.convention(),
    }
}

fn public_method(method: &PublicMethod) -> ValueMethod {
    match method {
        PublicMethod::SingleState => ValueMethod::Direct,
        PublicMethod::Certified => ValueMethod::Certified,
        PublicMethod::Grid { resolution } => ValueMethod::Grid {
            resolution: *resolution,
        },
    }
}

/// Evaluates the requested classes of a finite Bayesian game.
pub fn evaluate_game(
    game: &BayesianGame,
    classes: &[SchemeClass],
    options: &PublicOptions,
) -> Result<Evaluation, EvaluationError> {
    let classes = sorted(classes);
    let computed = ClassValues::compute(game, &classes, options)?;
    let values = classes
        .iter()
        .map(|&class| {
            let method = match class {
                SchemeClass::FullInformation | SchemeClass::NoInformation => ValueMethod::Direct,
                SchemeClass::Public => public_method(&computed.public.as_ref().expect("computed").method),
                SchemeClass::Private | SchemeClass::ExAnte => ValueMethod::LinearProgram,
            };
            ClassValue {
                class,
                value: *computed.get(class).expect("computed"),
                method,
            }
        })
        .collect();
    Ok(finish(game.sense(), values, poa_max(game)?))
}

/// Evaluates the requested classes of a routing instance. Private and ex-ante
/// values need the explicit scheme of a built-in `scenario`.
pub fn evaluate_routing(
    inst: &RoutingInstance,
    classes: &[SchemeClass],
    options: &PublicOptions,
    scenario: Option<&ScenarioSpec>,
) -> Result<Evaluation, EvaluationError> {
    let classes = sorted(classes);
    let mut floor = None;
    let mut values = Vec::with_capacity(classes.len());
    for &class in &classes {
        let (value, method) = match class {
            SchemeClass::FullInformation => (routing_full_information(inst)?.0, ValueMethod::Direct),
            SchemeClass::NoInformation => (routing_no_information(inst)?, ValueMethod::Direct),
            SchemeClass::Public => {
                let best = routing_optimal_public(inst, options)?;
                (best.value, public_method(&best.method))
            }
            SchemeClass::Private | SchemeClass::ExAnte => {
                let spec = scenario.ok_or(EvaluationError::NoRoutingScheme { class })?;
                let value = routing_scheme_cost(inst, class, scheme_for(spec, class)?)?;
                let floor = match floor {
                    Some(f) => f,
                    None => *floor.insert(routing_cost_floor(inst)?),
                };
                let optimal = (value - floor).abs() <= FLOOR_TOL * (1.0 + floor.abs());
                (value, ValueMethod::Scheme { optimal })
            }
        };
        values.push(ClassValue { class, value, method });
    }
    Ok(finish(Sense::Cost, values, routing_poa_max(inst)?))
}

/// Cost of an explicit private or ex-ante routing scheme, after checking obedience.
fn routing_scheme_cost(
    inst: &RoutingInstance,
    class: SchemeClass,
    scheme: ScenarioScheme,
) -> Result<f64, EvaluationError> {
    match scheme {
        ScenarioScheme::Segments(segments) => {
            let eval = evaluate_segmented_flow(inst, &segments)?;
            if !eval.certificate.holds {
                return Err(EvaluationError::NotObedient {
                    class,
                    gain: eval.certificate.max_excess,
                });
            }
            Ok(eval.expected_cost)
        }
        ScenarioScheme::StateFlows(flows) => {
            let report = ex_ante_obedience_check(inst, &flows)?;
            if !report.passes {
                let gain = report
                    .commodities
                    .iter()
                    .map(|c| c.in_scheme - c.opt_out)
                    .fold(0.0, f64::max);
                return Err(EvaluationError::NotObedient { class, gain });
            }
            let states = inst.num_states();
            Ok((0..states)
                .map(|t| {
                    let mut belief = vec![0.0; states];
                    belief[t] = 1.0;
                    inst.prior()[t] * total_cost(inst, &belief, &flows[t].edges)
                })
                .sum())
        }
        ScenarioScheme::Public(_) | ScenarioScheme::Recommendation(_) => {
            Err(EvaluationError::NoRoutingScheme { class })
        }
    }
}

/// Evaluates any instance, using the scenario's schemes where needed.
pub fn evaluate_instance(
    instance: &Instance,
    classes: &[SchemeClass],
    options: &PublicOptions,
    scenario: Option<&ScenarioSpec>,
) -> Result<Evaluation, EvaluationError> {
    match instance {
        Instance::Game(g) => evaluate_game(g, classes, options),
        Instance::Routing(r) => evaluate_routing(r, classes, options, scenario),
    }
}
