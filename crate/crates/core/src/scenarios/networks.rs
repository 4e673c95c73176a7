//! Routing networks from the worked examples. All have two equally likely states.

use crate::routing::{pigou_demand, Commodity, Edge, Latency, RoutingInstance};

fn states() -> Vec<String> {
    vec!["theta1".to_string(), "theta2".to_string()]
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn edge(from: usize, to: usize, theta1: Latency, theta2: Latency) -> Edge {
    Edge {
        from,
        to,
        latency: vec![theta1, theta2],
    }
}

/// Two sources: `s1 -> t` costs `x^alpha`, `s2 -> t` costs 1, and two parallel
/// `s2 -> s1` edges each cost 2 in one state and 0 in the other. Demands are
/// `d(alpha)` from `s1` and `1 - d(alpha)` from `s2`.
pub fn fig1_network(alpha: f64) -> RoutingInstance {
    let d = pigou_demand(alpha);
    let x = Latency::monomial(alpha);
    let c = Latency::constant;
    RoutingInstance::new(
        names(&["s1", "s2", "t"]),
        vec![
            edge(0, 2, x, x),
            edge(1, 2, c(1.0), c(1.0)),
            edge(1, 0, c(2.0), c(0.0)),
            edge(1, 0, c(0.0), c(2.0)),
        ],
        vec![
            Commodity { source: 0, sink: 2, demand: d },
            Commodity { source: 1, sink: 2, demand: 1.0 - d },
        ],
        states(),
        vec![0.5, 0.5],
    )
    .expect("fig1 network is valid")
}

/// Three parallel edges with unit demand: top (2, then `x^alpha`), middle
/// (`x^alpha`, then 2) and bottom (1 in both states).
pub fn fig2_network(alpha: f64) -> RoutingInstance {
    let x = Latency::monomial(alpha);
    let c = Latency::constant;
    RoutingInstance::new(
        names(&["s", "t"]),
        vec![edge(0, 1, c(2.0), x), edge(0, 1, x, c(2.0)), edge(0, 1, c(1.0), c(1.0))],
        vec![Commodity { source: 0, sink: 1, demand: 1.0 }],
        states(),
        vec![0.5, 0.5],
    )
    .expect("fig2 network is valid")
}

/// Four parallel edges with unit demand:
/// e1 (`alpha+1`, `x^alpha`), e2 (`alpha+1`, 1), e3 (1, `alpha+1`), e4 (`x^alpha`, `alpha+1`).
pub fn fig3_network(alpha: f64) -> RoutingInstance {
    let x = Latency::monomial(alpha);
    let c = Latency::constant;
    let high = c(alpha + 1.0);
    RoutingInstance::new(
        names(&["s", "t"]),
        vec![
            edge(0, 1, high, x),
            edge(0, 1, high, c(1.0)),
            edge(0, 1, c(1.0), high),
            edge(0, 1, x, high),
        ],
        vec![Commodity { source: 0, sink: 1, demand: 1.0 }],
        states(),
        vec![0.5, 0.5],
    )
    .expect("fig3 network is valid")
}
