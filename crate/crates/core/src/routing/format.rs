//! JSON instance format for routing networks.
//!
//! ```json
//! {"nodes": ["s", "t"], "states": ["t1", "t2"], "prior": [0.5, 0.5],
//!  "edges": [{"from": "s", "to": "t", "latency": [{"a": 1, "d": 1, "b": 0}, {"a": 0, "d": 0, "b": 1}]}],
//!  "commodities": [{"source": "s", "sink": "t", "demand": 1}]}
//! ```
//!
//! `latency` is a list with one entry per state, or a single object used in
//! every state. `states` defaults to `theta1, theta2, ...`.

use serde::Deserialize;
use serde_json::{json, Value};

use super::{Commodity, Edge, Latency, RoutingError, RoutingInstance};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLatency {
    #[serde(default)]
    a: f64,
    #[serde(default)]
    d: f64,
    #[serde(default)]
    b: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLatencies {
    Shared(RawLatency),
    PerState(Vec<RawLatency>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: String,
    to: String,
    latency: RawLatencies,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommodity {
    source: String,
    sink: String,
    demand: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRouting {
    nodes: Vec<String>,
    #[serde(default)]
    states: Option<Vec<String>>,
    prior: Vec<f64>,
    edges: Vec<RawEdge>,
    commodities: Vec<RawCommodity>,
}

pub fn routing_from_json(text: &str) -> Result<RoutingInstance, RoutingError> {
    let raw: RawRouting = serde_json::from_str(text).map_err(|err| RoutingError::Json {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    })?;
    let states = raw
        .states
        .unwrap_or_else(|| (1..=raw.prior.len()).map(|t| format!("theta{t}")).collect());
    let node = |name: &str, field: String| {
        raw.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| RoutingError::invalid(field, format!("unknown node {name:?}")))
    };
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (k, e) in raw.edges.iter().enumerate() {
        let latency = match &e.latency {
            RawLatencies::Shared(l) => vec![Latency::new(l.a, l.d, l.b); states.len()],
            RawLatencies::PerState(ls) => ls.iter().map(|l| Latency::new(l.a, l.d, l.b)).collect(),
        };
        edges.push(Edge {
            from: node(&e.from, format!("edges[{k}].from"))?,
            to: node(&e.to, format!("edges[{k}].to"))?,
            latency,
        });
    }
    let mut commodities = Vec::with_capacity(raw.commodities.len());
    for (k, c) in raw.commodities.iter().enumerate() {
        commodities.push(Commodity {
            source: node(&c.source, format!("commodities[{k}].source"))?,
            sink: node(&c.sink, format!("commodities[{k}].sink"))?,
            demand: c.demand,
        });
    }
    RoutingInstance::new(raw.nodes.clone(), edges, commodities, states, raw.prior)
}

pub fn routing_to_json(inst: &RoutingInstance) -> Value {
    let name = |v: usize| inst.nodes()[v].clone();
    json!({
        "nodes": inst.nodes(),
        "states": inst.states(),
        "prior": inst.prior(),
        "edges": inst.edges().iter().map(|e| json!({
            "from": name(e.from),
            "to": name(e.to),
            "latency": e.latency.iter().map(|l| json!({"a": l.a, "d": l.d, "b": l.b})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "commodities": inst.commodities().iter().map(|c| json!({
            "source": name(c.source),
            "sink": name(c.sink),
            "demand": c.demand,
        })).collect::<Vec<_>>(),
    })
}

pub fn routing_to_json_string(inst: &RoutingInstance) -> String {
    serde_json::to_string_pretty(&routing_to_json(inst)).expect("instance serializes")
}
