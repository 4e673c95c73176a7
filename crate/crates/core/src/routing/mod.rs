//! Non-atomic routing with state-dependent polynomial latencies.
//!
//! Flows are path-based: every commodity's source-to-sink paths are
//! enumerated up front, which keeps equilibrium certificates direct.

mod flow;
mod format;
mod pigou;
mod schemes;

use thiserror::Error;

use crate::game::{check_distribution, GameError, INPUT_TOL};

pub use flow::{
    optimal_flow, solve_flow, total_cost, wardrop_equilibrium, wardrop_violation, FlowObjective, FlowProfile,
    FlowSolution, FLOW_GAP_TOL, MAX_FLOW_ITERATIONS, WARDROP_TOL,
};
pub use format::{routing_from_json, routing_to_json, routing_to_json_string};
pub use pigou::{pigou_demand, pigou_poa, solve_pigou_alpha, PIGOU_ALPHA_MAX};
pub use schemes::{
    evaluate_segmented_flow, ex_ante_obedience_check, private_family_cost_fig3,
    routing_full_information, routing_no_information, routing_optimal_public, routing_poa_max,
    routing_cost_floor, routing_public_scheme_cost, routing_state_poa, posterior_cost, BeliefSegment, Certificate, ExAnteReport,
    CommodityExAnte, SegmentedEvaluation,
};

/// Upper limit on enumerated paths.
pub const MAX_PATHS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("flow solver stopped after {iterations} iterations with relative gap {gap:e}")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("scheme computation failed: {0}")]
    Scheme(String),
}

impl RoutingError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        RoutingError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// `x^d` with `0^0 = 1` and `0^d = 0` for `d > 0`.
pub fn power(x: f64, d: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else if x <= 0.0 {
        0.0
    } else if d == 1.0 {
        x
    } else {
        (d * x.ln()).exp()
    }
}

/// Latency `a * x^d + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Latency {
    pub a: f64,
    pub d: f64,
    pub b: f64,
}

impl Latency {
    pub fn new(a: f64, d: f64, b: f64) -> Self {
        Latency { a, d, b }
    }

    pub fn constant(b: f64) -> Self {
        Latency { a: 0.0, d: 0.0, b }
    }

    /// `x^d`.
    pub fn monomial(d: f64) -> Self {
        Latency { a: 1.0, d, b: 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.a == 0.0 {
            self.b
        } else {
            self.a * power(x, self.d) + self.b
        }
    }

    /// `int_0^x c(u) du`.
    pub fn integral(&self, x: f64) -> f64 {
        if self.a == 0.0 {
            self.b * x
        } else {
            self.a * power(x, self.d + 1.0) / (self.d + 1.0) + self.b * x
        }
    }

    /// Derivative of `x c(x)`: `a (d + 1) x^d + b`.
    pub fn marginal(&self, x: f64) -> f64 {
        if self.a == 0.0 {
            self.b
        } else {
            self.a * (self.d + 1.0) * power(x, self.d) + self.b
        }
    }

    fn validate(&self, field: &str) -> Result<(), RoutingError> {
        for (name, v) in [("a", self.a), ("d", self.d), ("b", self.b)] {
            if !v.is_finite() || v < 0.0 {
                return Err(RoutingError::invalid(
                    format!("{field}.{name}"),
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// One latency per state.
    pub latency: Vec<Latency>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Commodity {
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutingInstance {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    commodities: Vec<Commodity>,
    states: Vec<String>,
    prior: Vec<f64>,
    /// Per commodity, each path as a list of edge indices.
    paths: Vec<Vec<Vec<usize>>>,
}

impl RoutingInstance {
    pub fn new(
        nodes: Vec<String>,
        edges: Vec<Edge>,
        commodities: Vec<Commodity>,
        states: Vec<String>,
        prior: Vec<f64>,
    ) -> Result<Self, RoutingError> {
        if nodes.is_empty() {
            return Err(RoutingError::invalid("nodes", "at least one node is required"));
        }
        for (k, name) in nodes.iter().enumerate() {
            if nodes[..k].contains(name) {
                return Err(RoutingError::invalid(format!("nodes[{k}]"), format!("duplicate node {name:?}")));
            }
        }
        if states.is_empty() {
            return Err(RoutingError::invalid("states", "at least one state is required"));
        }
        if prior.len() != states.len() {
            return Err(RoutingError::invalid(
                "prior",
                format!("{} entries for {} states", prior.len(), states.len()),
            ));
        }
        check_distribution(&prior, "prior", INPUT_TOL)?;
        let prior = crate::game::renormalize(&prior);
        for (k, e) in edges.iter().enumerate() {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(RoutingError::invalid(format!("edges[{k}]"), "endpoint out of range"));
            }
            if e.latency.len() != states.len() {
                return Err(RoutingError::invalid(
                    format!("edges[{k}].latency"),
                    format!("{} latencies for {} states", e.latency.len(), states.len()),
                ));
            }
            for (t, l) in e.latency.iter().enumerate() {
                l.validate(&format!("edges[{k}].latency[{t}]"))?;
            }
        }
        if let Some(k) = cycle_edge(nodes.len(), &edges) {
            return Err(RoutingError::invalid(format!("edges[{k}]"), "network must be acyclic"));
        }
        let mut paths = Vec::with_capacity(commodities.len());
        for (k, c) in commodities.iter().enumerate() {
            if c.source >= nodes.len() || c.sink >= nodes.len() {
                return Err(RoutingError::invalid(format!("commodities[{k}]"), "endpoint out of range"));
            }
            if !c.demand.is_finite() || c.demand < 0.0 {
                return Err(RoutingError::invalid(
                    format!("commodities[{k}].demand"),
                    format!("must be finite and non-negative, got {}", c.demand),
                ));
            }
            let found = enumerate_paths(&edges, c.source, c.sink)?;
            if found.is_empty() {
                return Err(RoutingError::invalid(
                    format!("commodities[{k}]"),
                    format!("no path from {} to {}", nodes[c.source], nodes[c.sink]),
                ));
            }
            paths.push(found);
        }
        if paths.iter().map(Vec::len).sum::<usize>() > MAX_PATHS {
            return Err(RoutingError::invalid("edges", format!("more than {MAX_PATHS} paths")));
        }
        Ok(RoutingInstance {
            nodes,
            edges,
            commodities,
            states,
            prior,
            paths,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn paths(&self, commodity: usize) -> &[Vec<usize>] {
        &self.paths[commodity]
    }

    pub fn total_demand(&self) -> f64 {
        self.commodities.iter().map(|c| c.demand).sum()
    }

    pub fn state_index(&self, label: &str) -> Result<usize, RoutingError> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| RoutingError::Game(GameError::UnknownState(label.to_string())))
    }

    /// Human-readable path: the node sequence joined by `->`.
    pub fn path_label(&self, commodity: usize, path: usize) -> String {
        let edges = &self.paths[commodity][path];
        let mut names = vec![self.nodes[self.edges[edges[0]].from].as_str()];
        names.extend(edges.iter().map(|&e| self.nodes[self.edges[e].to].as_str()));
        format!("{} (edges {:?})", names.join("->"), edges)
    }

    /// Expected latency of `edge` at load `x` under `belief`.
    pub fn expected_latency(&self, edge: usize, belief: &[f64], x: f64) -> f64 {
        self.edges[edge]
            .latency
            .iter()
            .zip(belief)
            .filter(|(_, b)| **b != 0.0)
            .map(|(l, b)| b * l.eval(x))
            .sum()
    }
}

/// Index of some edge on a directed cycle, if any.
fn cycle_edge(n: usize, edges: &[Edge]) -> Option<usize> {
    let mut indegree = vec![0usize; n];
    for e in edges {
        indegree[e.to] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut removed = vec![false; n];
    while let Some(v) = stack.pop() {
        removed[v] = true;
        for e in edges.iter().filter(|e| e.from == v) {
            indegree[e.to] -= 1;
            if indegree[e.to] == 0 {
                stack.push(e.to);
            }
        }
    }
    edges.iter().position(|e| !removed[e.from])
}

fn enumerate_paths(edges: &[Edge], source: usize, sink: usize) -> Result<Vec<Vec<usize>>, RoutingError> {
    fn walk(
        edges: &[Edge],
        at: usize,
        sink: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), RoutingError> {
        if at == sink {
            if !prefix.is_empty() {
                out.push(prefix.clone());
            }
            return Ok(());
        }
        for (k, e) in edges.iter().enumerate().filter(|(_, e)| e.from == at) {
            prefix.push(k);
            walk(edges, e.to, sink, prefix, out)?;
            prefix.pop();
            if out.len() > MAX_PATHS {
                return Err(RoutingError::invalid("edges", format!("more than {MAX_PATHS} paths")));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(edges, source, sink, &mut Vec::new(), &mut out)?;
    Ok(out)
}
