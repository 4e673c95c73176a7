//! Signaling in routing: public schemes by equilibrium computation, private
//! schemes by certificate.
//!
//! Under a private scheme the population splits into belief segments with
//! different posteriors. No common potential describes such a population, so
//! proposed segment flows are verified rather than solved for.

use rayon::prelude::*;
use serde::Serialize;

use super::flow::{edge_loads, optimal_flow, total_cost, wardrop_equilibrium, FlowProfile, FlowSolution, USED_FLOW, WARDROP_TOL};
use super::{RoutingError, RoutingInstance};
use crate::game::Sense;
use crate::ratio::Ratio;
use crate::signaling::{
    envelope_at, posterior_label, signal_posteriors, simplex_grid, PublicMethod, PublicOptimum, PublicOptions,
    PublicScheme, MAX_GRID_STATES,
};

/// Relative slack for certifying a public value against the cost floor.
const CERTIFY_TOL: f64 = 1e-8;
/// Slack for the ex-ante opt-out comparison.
const EX_ANTE_TOL: f64 = 1e-9;

fn point_mass(states: usize, t: usize) -> Vec<f64> {
    let mut b = vec![0.0; states];
    b[t] = 1.0;
    b
}

/// Expected total cost of the Wardrop equilibrium under a common `belief`.
pub fn posterior_cost(inst: &RoutingInstance, belief: &[f64]) -> Result<f64, RoutingError> {
    let eq = wardrop_equilibrium(inst, belief)?;
    Ok(total_cost(inst, belief, &eq.flow.edges))
}

/// Expected cost when the state is revealed, with the per-state equilibria.
pub fn routing_full_information(inst: &RoutingInstance) -> Result<(f64, Vec<FlowSolution>), RoutingError> {
    let mut value = 0.0;
    let mut flows = Vec::with_capacity(inst.num_states());
    for t in 0..inst.num_states() {
        let b = point_mass(inst.num_states(), t);
        let eq = wardrop_equilibrium(inst, &b)?;
        value += inst.prior()[t] * total_cost(inst, &b, &eq.flow.edges);
        flows.push(eq);
    }
    Ok((value, flows))
}

/// Expected cost of the equilibrium under the prior.
pub fn routing_no_information(inst: &RoutingInstance) -> Result<f64, RoutingError> {
    posterior_cost(inst, inst.prior())
}

/// Expected equilibrium cost of a public scheme.
pub fn routing_public_scheme_cost(inst: &RoutingInstance, scheme: &PublicScheme) -> Result<f64, RoutingError> {
    if scheme.kernel.len() != inst.num_states() {
        return Err(RoutingError::invalid(
            "scheme.kernel",
            format!("{} rows for {} states", scheme.kernel.len(), inst.num_states()),
        ));
    }
    let mut value = 0.0;
    for (_, p, belief) in signal_posteriors(inst.prior(), scheme) {
        value += p * posterior_cost(inst, belief.probabilities())?;
    }
    Ok(value)
}

/// Minimum possible expected cost: the optimal flow in every state.
pub fn routing_cost_floor(inst: &RoutingInstance) -> Result<f64, RoutingError> {
    let mut floor = 0.0;
    for t in 0..inst.num_states() {
        let so = optimal_flow(inst, t)?;
        floor += inst.prior()[t] * total_cost(inst, &point_mass(inst.num_states(), t), &so.flow.edges);
    }
    Ok(floor)
}

/// Optimal public scheme, certified or over a posterior grid.
pub fn routing_optimal_public(inst: &RoutingInstance, options: &PublicOptions) -> Result<PublicOptimum, RoutingError> {
    let states = inst.num_states();
    let ni = routing_no_information(inst)?;
    if states == 1 {
        return Ok(PublicOptimum {
            value: ni,
            scheme: PublicScheme::no_information(1),
            method: PublicMethod::SingleState,
        });
    }
    if options.certify {
        let floor = routing_cost_floor(inst)?;
        let attains = |v: f64| (v - floor).abs() <= CERTIFY_TOL * (1.0 + floor.abs());
        if attains(ni) {
            return Ok(PublicOptimum {
                value: ni,
                scheme: PublicScheme::no_information(states),
                method: PublicMethod::Certified,
            });
        }
        let (fi, _) = routing_full_information(inst)?;
        if attains(fi) {
            return Ok(PublicOptimum {
                value: fi,
                scheme: PublicScheme::full_information(inst.states()),
                method: PublicMethod::Certified,
            });
        }
    }
    if states > MAX_GRID_STATES {
        return Err(RoutingError::Scheme(format!(
            "public grid search supports at most {MAX_GRID_STATES} states (got {states})"
        )));
    }
    let mut points: Vec<Vec<f64>> = simplex_grid(states, options.grid.max(1));
    if !points.iter().any(|p| p.as_slice() == inst.prior()) {
        points.push(inst.prior().to_vec());
    }
    let values = points
        .par_iter()
        .map(|b| posterior_cost(inst, b))
        .collect::<Result<Vec<f64>, _>>()?;
    let (value, support) =
        envelope_at(&points, &values, inst.prior(), Sense::Cost).map_err(|e| RoutingError::Scheme(e.to_string()))?;
    let method = PublicMethod::Grid { resolution: options.grid };
    if ni <= value + 1e-9 {
        return Ok(PublicOptimum {
            value: ni,
            scheme: PublicScheme::no_information(states),
            method,
        });
    }
    let signals = support.iter().map(|(k, _)| posterior_label(&points[*k])).collect();
    let kernel = inst
        .prior()
        .iter()
        .enumerate()
        .map(|(t, l)| {
            if *l == 0.0 {
                let mut row = vec![0.0; support.len()];
                row[0] = 1.0;
                return row;
            }
            let row: Vec<f64> = support.iter().map(|(k, w)| w * points[*k][t] / l).collect();
            let total: f64 = row.iter().sum();
            row.into_iter().map(|p| p / total).collect()
        })
        .collect();
    let scheme = PublicScheme { signals, kernel };
    let value = routing_public_scheme_cost(inst, &scheme)?;
    Ok(PublicOptimum { value, scheme, method })
}

/// Equilibrium cost over optimal cost in one state.
pub fn routing_state_poa(inst: &RoutingInstance, state: usize) -> Result<Ratio, RoutingError> {
    let b = point_mass(inst.num_states(), state);
    let eq = wardrop_equilibrium(inst, &b)?;
    let so = optimal_flow(inst, state)?;
    Ok(Ratio::of(
        &total_cost(inst, &b, &eq.flow.edges),
        &total_cost(inst, &b, &so.flow.edges),
    ))
}

/// Largest per-state PoA.
pub fn routing_poa_max(inst: &RoutingInstance) -> Result<Ratio, RoutingError> {
    let mut worst: Option<Ratio> = None;
    for t in 0..inst.num_states() {
        let r = routing_state_poa(inst, t)?;
        if worst.as_ref().is_none_or(|w| r.to_f64() > w.to_f64()) {
            worst = Some(r);
        }
    }
    Ok(worst.expect("at least one state"))
}

/// Players of one commodity who receive the same private signal.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefSegment {
    pub commodity: usize,
    pub label: String,
    /// Demand receiving this signal in each state.
    pub mass: Vec<f64>,
    /// Fraction of the segment on each of the commodity's paths.
    pub split: Vec<f64>,
}

impl BeliefSegment {
    /// Posterior over states held by the segment, or `None` if it never occurs.
    pub fn posterior(&self, prior: &[f64]) -> Option<Vec<f64>> {
        let joint: Vec<f64> = prior.iter().zip(&self.mass).map(|(l, m)| l * m).collect();
        let total: f64 = joint.iter().sum();
        (total > 0.0).then(|| joint.into_iter().map(|j| j / total).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub holds: bool,
    /// Largest excess of a used path's expected cost over the segment's best path.
    pub max_excess: f64,
    /// `(segment, path, excess)` for the worst violation.
    pub worst: Option<(usize, usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentedEvaluation {
    pub expected_cost: f64,
    pub state_costs: Vec<f64>,
    /// Aggregate flow realized in each state.
    pub state_flows: Vec<FlowProfile>,
    pub certificate: Certificate,
}

/// Evaluates a segmented private flow and certifies it as an equilibrium.
pub fn evaluate_segmented_flow(
    inst: &RoutingInstance,
    segments: &[BeliefSegment],
) -> Result<SegmentedEvaluation, RoutingError> {
    let states = inst.num_states();
    for (s, seg) in segments.iter().enumerate() {
        if seg.commodity >= inst.commodities().len() {
            return Err(RoutingError::invalid(format!("segments[{s}].commodity"), "out of range"));
        }
        if seg.mass.len() != states || seg.mass.iter().any(|m| *m < 0.0 || !m.is_finite()) {
            return Err(RoutingError::invalid(
                format!("segments[{s}].mass"),
                "one non-negative mass per state required",
            ));
        }
        let paths = inst.paths(seg.commodity).len();
        let total: f64 = seg.split.iter().sum();
        if seg.split.len() != paths || seg.split.iter().any(|f| *f < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(RoutingError::invalid(
                format!("segments[{s}].split"),
                format!("expected a distribution over {paths} paths"),
            ));
        }
    }
    for (k, c) in inst.commodities().iter().enumerate() {
        for t in 0..states {
            let total: f64 = segments.iter().filter(|s| s.commodity == k).map(|s| s.mass[t]).sum();
            if (total - c.demand).abs() > 1e-9 * (1.0 + c.demand) {
                return Err(RoutingError::invalid(
                    "segments",
                    format!(
                        "commodity {k} has segment mass {total} in state {} but demand {}",
                        inst.states()[t],
                        c.demand
                    ),
                ));
            }
        }
    }

    let mut state_flows = Vec::with_capacity(states);
    let mut state_costs = Vec::with_capacity(states);
    for t in 0..states {
        let mut paths: Vec<Vec<f64>> = (0..inst.commodities().len())
            .map(|k| vec![0.0; inst.paths(k).len()])
            .collect();
        for seg in segments {
            for (p, f) in seg.split.iter().enumerate() {
                paths[seg.commodity][p] += seg.mass[t] * f;
            }
        }
        let edges = edge_loads(inst, &paths);
        state_costs.push(total_cost(inst, &point_mass(states, t), &edges));
        state_flows.push(FlowProfile { paths, edges });
    }
    let expected_cost = inst.prior().iter().zip(&state_costs).map(|(l, c)| l * c).sum();

    let mut certificate = Certificate {
        holds: true,
        max_excess: 0.0,
        worst: None,
    };
    for (s, seg) in segments.iter().enumerate() {
        let Some(belief) = seg.posterior(inst.prior()) else {
            continue;
        };
        let costs: Vec<f64> = inst
            .paths(seg.commodity)
            .iter()
            .map(|path| expected_path_cost(inst, path, &belief, &state_flows))
            .collect();
        let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
        for (p, f) in seg.split.iter().enumerate() {
            let excess = costs[p] - min;
            if *f > USED_FLOW && excess > certificate.max_excess {
                certificate.max_excess = excess;
                if excess > WARDROP_TOL {
                    certificate.holds = false;
                    certificate.worst = Some((s, p, excess));
                }
            }
        }
    }
    Ok(SegmentedEvaluation {
        expected_cost,
        state_costs,
        state_flows,
        certificate,
    })
}

/// Expected cost of `path` under `belief` when state `t` carries `flows[t]`.
fn expected_path_cost(inst: &RoutingInstance, path: &[usize], belief: &[f64], flows: &[FlowProfile]) -> f64 {
    belief
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(t, b)| {
            b * path
                .iter()
                .map(|&e| inst.edges()[e].latency[t].eval(flows[t].edges[e]))
                .sum::<f64>()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommodityExAnte {
    pub commodity: usize,
    /// Expected cost of a uniformly random unit following its recommendation.
    pub in_scheme: f64,
    /// Cheapest prior-expected cost of committing to one path up front.
    pub opt_out: f64,
    pub best_path: usize,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExAnteReport {
    pub commodities: Vec<CommodityExAnte>,
    pub passes: bool,
}

/// Checks that following a per-state recommended flow beats opting out to any fixed path.
pub fn ex_ante_obedience_check(inst: &RoutingInstance, flows: &[FlowProfile]) -> Result<ExAnteReport, RoutingError> {
    if flows.len() != inst.num_states() {
        return Err(RoutingError::invalid(
            "scheme",
            format!("{} state flows for {} states", flows.len(), inst.num_states()),
        ));
    }
    for (t, f) in flows.iter().enumerate() {
        FlowProfile::from_paths(inst, f.paths.clone())
            .map_err(|e| RoutingError::invalid(format!("scheme[{t}]"), e.to_string()))?;
    }
    let mut commodities = Vec::new();
    for (k, c) in inst.commodities().iter().enumerate() {
        if c.demand <= 0.0 {
            continue;
        }
        let path_costs: Vec<Vec<f64>> = (0..inst.num_states())
            .map(|t| {
                inst.paths(k)
                    .iter()
                    .map(|p| p.iter().map(|&e| inst.edges()[e].latency[t].eval(flows[t].edges[e])).sum())
                    .collect()
            })
            .collect();
        let in_scheme = (0..inst.num_states())
            .map(|t| {
                inst.prior()[t]
                    * flows[t].paths[k]
                        .iter()
                        .zip(&path_costs[t])
                        .map(|(f, g)| f * g)
                        .sum::<f64>()
            })
            .sum::<f64>()
            / c.demand;
        let expected: Vec<f64> = (0..inst.paths(k).len())
            .map(|p| (0..inst.num_states()).map(|t| inst.prior()[t] * path_costs[t][p]).sum())
            .collect();
        let mut best_path = 0;
        for (p, v) in expected.iter().enumerate() {
            if *v < expected[best_path] {
                best_path = p;
            }
        }
        let opt_out = expected[best_path];
        commodities.push(CommodityExAnte {
            commodity: k,
            in_scheme,
            opt_out,
            best_path,
            passes: in_scheme <= opt_out + EX_ANTE_TOL,
        });
    }
    Ok(ExAnteReport {
        passes: commodities.iter().all(|c| c.passes),
        commodities,
    })
}

/// Cost of the obedient private schemes in the four-edge construction that
/// send a fraction `x` (state one) or `y` (state two) of the flow to the
/// `x^alpha` edge and the rest to an `alpha + 1` edge:
/// `[x^(alpha+1) + (alpha+1)(1-x) + y^(alpha+1) + (alpha+1)(1-y)] / 2`.
pub fn private_family_cost_fig3(alpha: f64, x: f64, y: f64) -> Result<f64, RoutingError> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(RoutingError::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(RoutingError::Domain(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    let part = |z: f64| super::power(z, alpha + 1.0) + (alpha + 1.0) * (1.0 - z);
    Ok((part(x) + part(y)) / 2.0)
}
