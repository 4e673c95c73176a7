//! Wardrop equilibria and system-optimal flows.
//!
//! Both minimize a separable convex function of edge loads over path flows:
//! the Beckmann potential for equilibria, total cost for optima. The solver
//! shifts flow from the costliest used path to the cheapest path of each
//! commodity with an exact line search, sweeping until the relative gap
//! between current and shortest-path cost is small.

use super::{RoutingError, RoutingInstance};

/// Relative gap at which the flow solver stops.
pub const FLOW_GAP_TOL: f64 = 1e-10;
/// Sweep limit for the flow solver.
pub const MAX_FLOW_ITERATIONS: usize = 100_000;
/// Cost slack allowed on used paths in equilibrium and optimality certificates.
pub const WARDROP_TOL: f64 = 1e-6;
/// Path flows above this count as used.
pub const USED_FLOW: f64 = 1e-9;
/// Relative width of the line-search bracket. Relative rather than absolute so
/// that very steep latencies near zero load get their tiny equilibrium share.
const LINE_SEARCH_WIDTH: f64 = 1e-13;
/// A shift smaller than this share of the source flow marks its target saturated.
const SATURATION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FlowProfile {
    /// `paths[commodity][path]`.
    pub paths: Vec<Vec<f64>>,
    /// Induced load on each edge.
    pub edges: Vec<f64>,
}

impl FlowProfile {
    pub fn from_paths(inst: &RoutingInstance, paths: Vec<Vec<f64>>) -> Result<Self, RoutingError> {
        if paths.len() != inst.commodities().len() {
            return Err(RoutingError::invalid(
                "flow",
                format!("{} commodities in flow, {} in instance", paths.len(), inst.commodities().len()),
            ));
        }
        for (k, (flows, c)) in paths.iter().zip(inst.commodities()).enumerate() {
            if flows.len() != inst.paths(k).len() {
                return Err(RoutingError::invalid(
                    format!("flow[{k}]"),
                    format!("{} path flows for {} paths", flows.len(), inst.paths(k).len()),
                ));
            }
            if flows.iter().any(|f| *f < -USED_FLOW || !f.is_finite()) {
                return Err(RoutingError::invalid(format!("flow[{k}]"), "negative path flow"));
            }
            let total: f64 = flows.iter().sum();
            if (total - c.demand).abs() > 1e-9 * (1.0 + c.demand) {
                return Err(RoutingError::invalid(
                    format!("flow[{k}]"),
                    format!("path flows sum to {total}, demand is {}", c.demand),
                ));
            }
        }
        let edges = edge_loads(inst, &paths);
        Ok(FlowProfile { paths, edges })
    }
}

pub(crate) fn edge_loads(inst: &RoutingInstance, paths: &[Vec<f64>]) -> Vec<f64> {
    let mut loads = vec![0.0; inst.edges().len()];
    for (k, flows) in paths.iter().enumerate() {
        for (p, f) in flows.iter().enumerate() {
            if *f != 0.0 {
                for &e in &inst.paths(k)[p] {
                    loads[e] += f;
                }
            }
        }
    }
    loads
}

/// What the solver minimizes, with latencies averaged under `belief`.
#[derive(Clone, Debug, PartialEq)]
pub enum FlowObjective {
    /// Beckmann potential: minimizers are Wardrop equilibria.
    Potential { belief: Vec<f64> },
    /// Expected total cost: minimizers are optimal flows.
    TotalCost { belief: Vec<f64> },
}

impl FlowObjective {
    fn belief(&self) -> &[f64] {
        match self {
            FlowObjective::Potential { belief } | FlowObjective::TotalCost { belief } => belief,
        }
    }

    /// Edge term of the objective at load `x`.
    fn term(&self, inst: &RoutingInstance, edge: usize, x: f64) -> f64 {
        let lat = &inst.edges()[edge].latency;
        let weighted = lat.iter().zip(self.belief()).filter(|(_, b)| **b != 0.0);
        match self {
            FlowObjective::Potential { .. } => weighted.map(|(l, b)| b * l.integral(x)).sum(),
            FlowObjective::TotalCost { .. } => weighted.map(|(l, b)| b * x * l.eval(x)).sum(),
        }
    }

    /// Derivative of the edge term: expected latency or expected marginal cost.
    fn slope(&self, inst: &RoutingInstance, edge: usize, x: f64) -> f64 {
        let lat = &inst.edges()[edge].latency;
        let weighted = lat.iter().zip(self.belief()).filter(|(_, b)| **b != 0.0);
        match self {
            FlowObjective::Potential { .. } => weighted.map(|(l, b)| b * l.eval(x)).sum(),
            FlowObjective::TotalCost { .. } => weighted.map(|(l, b)| b * l.marginal(x)).sum(),
        }
    }

    fn value(&self, inst: &RoutingInstance, loads: &[f64]) -> f64 {
        loads
            .iter()
            .enumerate()
            .map(|(e, &x)| self.term(inst, e, x))
            .sum()
    }

    fn path_slope(&self, inst: &RoutingInstance, path: &[usize], loads: &[f64]) -> f64 {
        path.iter().map(|&e| self.slope(inst, e, loads[e])).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSolution {
    pub flow: FlowProfile,
    pub iterations: usize,
    /// Final relative gap.
    pub gap: f64,
    /// Objective value after each sweep.
    pub objective_trace: Vec<f64>,
}

/// Relative gap: excess of current path costs over shortest-path costs.
fn relative_gap(inst: &RoutingInstance, objective: &FlowObjective, paths: &[Vec<f64>], loads: &[f64]) -> f64 {
    let mut current = 0.0;
    let mut shortest = 0.0;
    for (k, flows) in paths.iter().enumerate() {
        let slopes: Vec<f64> = inst
            .paths(k)
            .iter()
            .map(|p| objective.path_slope(inst, p, loads))
            .collect();
        current += flows.iter().zip(&slopes).map(|(f, g)| f * g).sum::<f64>();
        shortest += inst.commodities()[k].demand * slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    }
    let gap = (current - shortest).max(0.0);
    if current > 1e-300 {
        gap / current
    } else {
        gap
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

/// Cheapest path outside `excluded`, preferring the most heavily used among
/// exact ties so that flow is not shifted back onto an empty path of equal cost.
fn cheapest(slopes: &[f64], flows: &[f64], excluded: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for p in (0..slopes.len()).filter(|&p| !excluded[p]) {
        best = match best {
            None => Some(p),
            Some(b) => {
                let tie = (slopes[p] - slopes[b]).abs() <= 1e-15 * (1.0 + slopes[b].abs());
                if (tie && flows[p] > flows[b]) || (!tie && slopes[p] < slopes[b]) {
                    Some(p)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

/// Minimizes `objective` over feasible path flows.
pub fn solve_flow(inst: &RoutingInstance, objective: &FlowObjective) -> Result<FlowSolution, RoutingError> {
    if objective.belief().len() != inst.num_states() {
        return Err(RoutingError::invalid(
            "belief",
            format!("{} entries for {} states", objective.belief().len(), inst.num_states()),
        ));
    }
    // Start with every commodity on its cheapest path at zero load.
    let zero = vec![0.0; inst.edges().len()];
    let mut paths: Vec<Vec<f64>> = inst
        .commodities()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let slopes: Vec<f64> = inst.paths(k).iter().map(|p| objective.path_slope(inst, p, &zero)).collect();
            let mut flows = vec![0.0; slopes.len()];
            flows[argmin(&slopes)] = c.demand;
            flows
        })
        .collect();
    let mut loads = edge_loads(inst, &paths);
    let mut trace = vec![objective.value(inst, &loads)];

    for iteration in 0..MAX_FLOW_ITERATIONS {
        let gap = relative_gap(inst, objective, &paths, &loads);
        // The gap weights excess by flow, so slivers on costly paths also need checking.
        if gap <= FLOW_GAP_TOL && paths_excess(inst, objective, &paths, &loads) <= 1e-2 * WARDROP_TOL {
            return Ok(FlowSolution {
                flow: FlowProfile { paths, edges: loads },
                iterations: iteration,
                gap,
                objective_trace: trace,
            });
        }
        for k in 0..paths.len() {
            equilibrate(inst, objective, k, &mut paths, &mut loads);
        }
        trace.push(objective.value(inst, &loads));
    }
    Err(RoutingError::NoConvergence {
        iterations: MAX_FLOW_ITERATIONS,
        gap: relative_gap(inst, objective, &paths, &loads),
    })
}

/// Repeated exact shifts for commodity `k`. A single shift per sweep can cycle
/// when the cheapest path only absorbs a sliver before becoming the costliest.
fn equilibrate(
    inst: &RoutingInstance,
    objective: &FlowObjective,
    k: usize,
    paths: &mut [Vec<f64>],
    loads: &mut [f64],
) {
    // Targets that could only absorb a negligible amount are skipped for the
    // rest of the sweep, so a path with very steep latency near zero load
    // cannot stall progress between the other paths.
    let mut saturated = vec![false; inst.paths(k).len()];
    for _ in 0..2 * inst.paths(k).len() {
        if !shift_once(inst, objective, k, paths, loads, &mut saturated) {
            break;
        }
    }
}

/// One exact shift from the costliest used path of commodity `k` to its
/// cheapest path. Returns whether any flow moved.
fn shift_once(
    inst: &RoutingInstance,
    objective: &FlowObjective,
    k: usize,
    paths: &mut [Vec<f64>],
    loads: &mut [f64],
    saturated: &mut [bool],
) -> bool {
    let candidates = inst.paths(k);
    let slopes: Vec<f64> = candidates.iter().map(|p| objective.path_slope(inst, p, loads)).collect();
    let Some(cheap) = cheapest(&slopes, &paths[k], saturated) else {
        return false;
    };
    let Some(costly) = (0..candidates.len())
        .filter(|&p| paths[k][p] > 0.0 && p != cheap)
        .max_by(|&a, &b| slopes[a].total_cmp(&slopes[b]).then(b.cmp(&a)))
    else {
        return false;
    };
    if slopes[costly] <= slopes[cheap] {
        return false;
    }
    let (to, from) = (&candidates[cheap], &candidates[costly]);
    let available = paths[k][costly];
    let shifted = |delta: f64, loads: &[f64]| -> f64 {
        // Directional derivative after moving `delta` from `from` to `to`.
        let mut trial = loads.to_vec();
        for &e in to.iter() {
            trial[e] += delta;
        }
        for &e in from.iter() {
            trial[e] -= delta;
        }
        objective.path_slope(inst, to, &trial) - objective.path_slope(inst, from, &trial)
    };
    let delta = if shifted(available, loads) <= 0.0 {
        available
    } else {
        let (mut lo, mut hi) = (0.0, available);
        for _ in 0..200 {
            if hi - lo <= LINE_SEARCH_WIDTH * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if shifted(mid, loads) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    if delta <= 0.0 {
        saturated[cheap] = true;
        return true;
    }
    let delta = delta.min(available);
    if delta <= SATURATION * available {
        saturated[cheap] = true;
    }
    paths[k][cheap] += delta;
    paths[k][costly] = if delta == available { 0.0 } else { available - delta };
    for &e in to.iter() {
        loads[e] += delta;
    }
    for &e in from.iter() {
        loads[e] -= delta;
    }
    for l in loads.iter_mut() {
        if *l < 0.0 && *l > -1e-15 {
            *l = 0.0;
        }
    }
    true
}

/// Largest excess of a used path's cost over its commodity's cheapest path.
pub fn wardrop_violation(inst: &RoutingInstance, belief: &[f64], flow: &FlowProfile) -> f64 {
    path_excess(inst, &FlowObjective::Potential { belief: belief.to_vec() }, flow)
}

fn path_excess(inst: &RoutingInstance, objective: &FlowObjective, flow: &FlowProfile) -> f64 {
    paths_excess(inst, objective, &flow.paths, &flow.edges)
}

fn paths_excess(inst: &RoutingInstance, objective: &FlowObjective, paths: &[Vec<f64>], loads: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, flows) in paths.iter().enumerate() {
        let slopes: Vec<f64> = inst
            .paths(k)
            .iter()
            .map(|p| objective.path_slope(inst, p, loads))
            .collect();
        let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
        for (f, g) in flows.iter().zip(&slopes) {
            if *f > USED_FLOW {
                worst = worst.max(g - min);
            }
        }
    }
    worst
}

fn certified(inst: &RoutingInstance, objective: &FlowObjective) -> Result<FlowSolution, RoutingError> {
    let solution = solve_flow(inst, objective)?;
    if path_excess(inst, objective, &solution.flow) > WARDROP_TOL {
        return Err(RoutingError::NoConvergence {
            iterations: solution.iterations,
            gap: solution.gap,
        });
    }
    Ok(solution)
}

/// The Wardrop equilibrium when every player holds `belief`.
pub fn wardrop_equilibrium(inst: &RoutingInstance, belief: &[f64]) -> Result<FlowSolution, RoutingError> {
    certified(inst, &FlowObjective::Potential { belief: belief.to_vec() })
}

/// The minimum-cost flow in `state`.
pub fn optimal_flow(inst: &RoutingInstance, state: usize) -> Result<FlowSolution, RoutingError> {
    let mut belief = vec![0.0; inst.num_states()];
    belief[state] = 1.0;
    certified(inst, &FlowObjective::TotalCost { belief })
}

/// Total cost `sum_e x_e c_e(x_e)` with latencies averaged under `belief`.
pub fn total_cost(inst: &RoutingInstance, belief: &[f64], loads: &[f64]) -> f64 {
    loads
        .iter()
        .enumerate()
        .map(|(e, &x)| if x == 0.0 { 0.0 } else { x * inst.expected_latency(e, belief, x) })
        .sum()
}
