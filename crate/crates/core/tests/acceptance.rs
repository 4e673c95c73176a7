//! Acceptance suite. Each test prints one `PASS` or `FAIL` line; run with
//! `cargo test -p signaling-power --test acceptance -- --nocapture`.

use std::time::Instant;

use rayon::prelude::*;
use signaling_power::equilibria::{enumerate_equilibria, poa_max};
use signaling_power::game::random::{instance_rng, random_capped_game, random_game, SizeCaps};
use signaling_power::routing::{
    ex_ante_obedience_check, evaluate_segmented_flow, pigou_poa, posterior_cost, private_family_cost_fig3,
    routing_cost_floor, routing_full_information, routing_optimal_public, solve_pigou_alpha,
};
use signaling_power::scenarios::{
    appendix_a_game, build, evaluate_instance, fig1_network, fig2_network, fig3_network, robbers_game,
    robbers_variant_game, scheme_for, sec51_game, Instance, Params, ScenarioId, ScenarioScheme, ScenarioSpec,
};
use signaling_power::signaling::{
    check_obedience, evaluate_full_information, optimal_ex_ante_value, optimal_private_value, optimal_public_value,
    pos_ratio, verify_pos_bound, Obedience, PublicOptions, SchemeClass,
};
use signaling_power::{BayesianGame, Rational, Scalar, Sense, StageGame};

use SchemeClass::{ExAnte, NoInformation as Ni, Private, Public};

/// Collects failed checks of one criterion and prints its verdict.
struct Criterion {
    number: usize,
    name: &'static str,
    started: Instant,
    checks: usize,
    failures: Vec<String>,
}

impl Criterion {
    fn new(number: usize, name: &'static str) -> Self {
        Criterion {
            number,
            name,
            started: Instant::now(),
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, holds: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !holds {
            self.failures.push(what());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || {
            format!("{what}: got {got}, expected {want} (tolerance {tol:e})")
        });
    }

    fn finish(self) {
        let secs = self.started.elapsed().as_secs_f64();
        if self.failures.is_empty() {
            println!(
                "criterion {:>2} PASS  {} ({} checks, {secs:.2} s)",
                self.number, self.name, self.checks
            );
        } else {
            println!(
                "criterion {:>2} FAIL  {} ({} of {} checks failed, {secs:.2} s)",
                self.number,
                self.name,
                self.failures.len(),
                self.checks
            );
            for f in &self.failures {
                println!("    {f}");
            }
            panic!("criterion {} failed", self.number);
        }
    }
}

fn grid_only() -> PublicOptions {
    PublicOptions {
        certify: false,
        ..PublicOptions::default()
    }
}

/// Optimal cost of the Pigou-type networks: the tolled edge carries
/// `d = (1 + alpha)^(-1/alpha)`.
fn pigou_optimum(alpha: f64) -> f64 {
    let d = (1.0 + alpha).powf(-1.0 / alpha);
    d.powf(alpha + 1.0) + 1.0 - d
}

fn scenario(id: ScenarioId, alpha: f64, eps: Option<f64>) -> ScenarioSpec {
    ScenarioSpec::new(
        id,
        Params {
            alpha: Some(alpha),
            eps,
            n: None,
        },
    )
}

#[test]
fn criterion_01_pigou_network() {
    let mut c = Criterion::new(1, "Pigou network: full information against public signaling");
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let inst = fig1_network(alpha);
        let fi = routing_full_information(&inst).unwrap().0;
        c.close(&format!("alpha {alpha}: FI cost"), fi, 1.0, 1e-6);
        let public = routing_optimal_public(&inst, &grid_only()).unwrap().value;
        c.close(&format!("alpha {alpha}: public cost"), public, pigou_optimum(alpha), 2e-3);
        let ratio = fi / public;
        c.close(&format!("alpha {alpha}: PoS(Pub:FI)"), ratio, 1.0 / pigou_optimum(alpha), 2e-3);
        c.close(&format!("alpha {alpha}: pigou_poa"), pigou_poa(alpha).unwrap(), 1.0 / pigou_optimum(alpha), 1e-9);
        if alpha == 1.0 {
            c.close("alpha 1: ratio", ratio, 4.0 / 3.0, 2e-3);
            c.close("alpha 1: pigou_poa", pigou_poa(1.0).unwrap(), 4.0 / 3.0, 1e-12);
        }
    }
    c.finish();
}

#[test]
fn criterion_02_three_edge_network() {
    let mut c = Criterion::new(2, "three-edge network: public signaling against private segments");
    let grid = grid_only().grid;
    for alpha in [0.5, 1.0, 2.0] {
        let inst = fig2_network(alpha);
        let mut worst: f64 = 0.0;
        for k in 0..=grid {
            let p = k as f64 / grid as f64;
            let cost = posterior_cost(&inst, &[p, 1.0 - p]).unwrap();
            worst = worst.max((cost - 1.0).abs());
        }
        c.close(&format!("alpha {alpha}: largest posterior cost deviation"), worst, 0.0, 1e-6);

        let spec = scenario(ScenarioId::Fig2, alpha, None);
        let ScenarioScheme::Segments(segments) = scheme_for(&spec, Private).unwrap() else {
            panic!("fig2 private scheme is segmented")
        };
        let eval = evaluate_segmented_flow(&inst, &segments).unwrap();
        c.check(eval.certificate.holds, || {
            format!("alpha {alpha}: segment certificate fails: {:?}", eval.certificate)
        });
        c.close(&format!("alpha {alpha}: private cost"), eval.expected_cost, pigou_optimum(alpha), 1e-6);
        for (t, &cost) in eval.state_costs.iter().enumerate() {
            c.close(&format!("alpha {alpha}: state {t} cost"), cost, pigou_optimum(alpha), 1e-6);
        }
        c.close(
            &format!("alpha {alpha}: cost floor"),
            routing_cost_floor(&inst).unwrap(),
            pigou_optimum(alpha),
            1e-6,
        );

        let built = build(&spec).unwrap();
        let e = evaluate_instance(&built.instance, &[Public, Private], &grid_only(), Some(&spec)).unwrap();
        let r = e.pos(Public, Private).unwrap();
        c.close(&format!("alpha {alpha}: PoS(Pri:Pub)"), r, 1.0 / pigou_optimum(alpha), 1e-4);
    }
    c.finish();
}

#[test]
fn criterion_03_four_edge_network() {
    let mut c = Criterion::new(3, "four-edge network: private against ex-ante private");
    for alpha in [0.5, 1.0, 2.0] {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..=100 {
            for j in 0..=100 {
                let v = private_family_cost_fig3(alpha, i as f64 / 100.0, j as f64 / 100.0).unwrap();
                if v < best.0 {
                    best = (v, i, j);
                }
            }
        }
        c.check((best.1, best.2) == (100, 100), || {
            format!("alpha {alpha}: family minimum at ({}, {})", best.1 as f64 / 100.0, best.2 as f64 / 100.0)
        });
        c.close(&format!("alpha {alpha}: family minimum"), best.0, 1.0, 1e-9);

        let inst = fig3_network(alpha);
        let spec = scenario(ScenarioId::Fig3, alpha, None);
        let ScenarioScheme::StateFlows(flows) = scheme_for(&spec, ExAnte).unwrap() else {
            panic!("fig3 ex-ante scheme is a flow per state")
        };
        let report = ex_ante_obedience_check(&inst, &flows).unwrap();
        c.check(report.passes, || format!("alpha {alpha}: ex-ante check fails: {report:?}"));

        let built = build(&spec).unwrap();
        let e = evaluate_instance(&built.instance, &[Private, ExAnte], &grid_only(), Some(&spec)).unwrap();
        c.close(&format!("alpha {alpha}: ex-ante cost"), e.value(ExAnte).unwrap(), pigou_optimum(alpha), 1e-6);
        c.close(
            &format!("alpha {alpha}: ex-ante cost against floor"),
            e.value(ExAnte).unwrap(),
            routing_cost_floor(&inst).unwrap(),
            1e-6,
        );
        c.close(&format!("alpha {alpha}: private cost"), e.value(Private).unwrap(), 1.0, 1e-6);
        c.close(
            &format!("alpha {alpha}: PoS(exP:Pri)"),
            e.pos(Private, ExAnte).unwrap(),
            1.0 / pigou_optimum(alpha),
            1e-6,
        );
    }
    c.finish();
}

#[test]
fn criterion_04_two_action_game() {
    let mut c = Criterion::new(4, "two-action game: full information against public signaling");
    for (alpha, eps) in [((2, 1), (1, 10)), ((3, 1), (1, 2))] {
        let a = Rational::from_ratio(alpha.0, alpha.1);
        let e = Rational::from_ratio(eps.0, eps.1);
        let exact: BayesianGame<Rational> = sec51_game(a.clone(), e.clone());
        let fi = evaluate_full_information(&exact).unwrap().0;
        let want = Rational::from_ratio(2, 1) + e.clone();
        c.check(fi == want, || format!("({a}, {e}): exact FI value {fi}, expected {want}"));

        let (af, ef) = (a.to_f64(), e.to_f64());
        let g = sec51_game(af, ef);
        let public = optimal_public_value(&g, &grid_only()).unwrap().value;
        c.close(&format!("({af}, {ef}): public value"), public, af + 1.0, 2e-3);
        let pos = fi.to_f64() / public;
        c.close(&format!("({af}, {ef}): PoS(Pub:FI)"), pos, (2.0 + ef) / (af + 1.0), 2e-3);
        let poa = poa_max(&g).unwrap().to_f64();
        c.close(&format!("({af}, {ef}): PoS(Pub:FI) against poa_max"), pos, poa, 2e-3);
    }
    c.finish();
}

/// Mixed equilibrium of a 2x2 payoff game with an interior solution.
fn indifference_mix(g: &StageGame) -> (f64, f64) {
    mix_from(|a0, a1, i| *g.payoff(g.space().index(&[a0, a1]), i))
}

#[test]
fn criterion_05_robbers_game() {
    let mut c = Criterion::new(5, "robber's game: public against private signaling");
    for (alpha, eps) in [(0.5, 0.1), (0.9, 0.2)] {
        let g = robbers_game(alpha, eps);
        // S1 is dominated in the first state and S2 in the second.
        for (state, keep, cash) in [(0, [1, 2], 0), (1, [0, 1], 1)] {
            let stage = g.state_game_at(state).restrict(&[keep.to_vec(), keep.to_vec()]).unwrap();
            let set = enumerate_equilibria(&stage).unwrap();
            c.check(set.len() == 3 && !set.degenerate, || {
                format!("({alpha}, {eps}) state {state}: {} equilibria, degenerate {}", set.len(), set.degenerate)
            });
            let pure = set
                .equilibria
                .iter()
                .filter(|x| x.supports().iter().all(|s| s.len() == 1))
                .count();
            c.check(pure == 2, || format!("({alpha}, {eps}) state {state}: {pure} pure equilibria"));
            let (p, q) = indifference_mix(&stage);
            // Probabilities of C: 1/(1+eps) for the first robber, alpha/(alpha+eps) for the second.
            let (p_cash, q_cash) = if cash == 0 { (p, q) } else { (1.0 - p, 1.0 - q) };
            c.close("oracle first robber", p_cash, 1.0 / (1.0 + eps), 1e-12);
            c.close("oracle second robber", q_cash, alpha / (alpha + eps), 1e-12);
            match set.equilibria.iter().find(|x| x.supports().iter().all(|s| s.len() == 2)) {
                Some(mixed) => {
                    c.close(
                        &format!("({alpha}, {eps}) state {state}: first robber plays C"),
                        mixed.player(0)[cash],
                        1.0 / (1.0 + eps),
                        1e-8,
                    );
                    c.close(
                        &format!("({alpha}, {eps}) state {state}: second robber plays C"),
                        mixed.player(1)[cash],
                        alpha / (alpha + eps),
                        1e-8,
                    );
                }
                None => c.check(false, || format!("({alpha}, {eps}) state {state}: no mixed equilibrium")),
            }
        }

        let public = optimal_public_value(&g, &grid_only()).unwrap().value;
        c.close(
            &format!("({alpha}, {eps}): public value"),
            public,
            alpha + (alpha + eps) / (1.0 + eps),
            2e-3,
        );
        let private = optimal_private_value(&g).unwrap().0;
        c.close(&format!("({alpha}, {eps}): private value"), private, 1.0 + alpha + eps, 1e-7);
        let poa = poa_max(&g).unwrap().to_f64();
        let closed = (2.0 * alpha + eps + alpha * eps) / ((1.0 + alpha + eps) * (1.0 + eps));
        c.close(&format!("({alpha}, {eps}): poa_max"), poa, closed, 1e-7);
        c.close(&format!("({alpha}, {eps}): PoS(Pri:Pub)"), public / private, poa, 2e-3);
    }
    c.finish();
}

#[test]
fn criterion_06_robbers_variant() {
    let mut c = Criterion::new(6, "robber's game variant: private against ex-ante private");
    for (alpha, eps) in [(0.5, 0.1), (0.3, 0.05)] {
        let g = robbers_variant_game(alpha, eps);
        let private = optimal_private_value(&g).unwrap().0;
        let ex_ante = optimal_ex_ante_value(&g).unwrap().0;
        c.close(&format!("({alpha}, {eps}): private value"), private, 2.0 * alpha + eps, 1e-7);
        c.close(&format!("({alpha}, {eps}): ex-ante value"), ex_ante, 1.0 + alpha, 1e-7);

        let spec = scenario(ScenarioId::Fig5, alpha, Some(eps));
        let ScenarioScheme::Recommendation(kernel) = scheme_for(&spec, ExAnte).unwrap() else {
            panic!("fig5 ex-ante scheme is a recommendation kernel")
        };
        c.check(check_obedience(&g, &kernel.kernel, Obedience::ExAnte).passes, || {
            format!("({alpha}, {eps}): kernel fails ex-ante obedience")
        });
        c.check(!check_obedience(&g, &kernel.kernel, Obedience::Exact).passes, || {
            format!("({alpha}, {eps}): kernel passes exact obedience")
        });
        c.close(&format!("({alpha}, {eps}): kernel welfare"), g.expected_welfare(&kernel.kernel), 1.0 + alpha, 1e-12);

        let closed = (2.0 * alpha + eps) / (1.0 + alpha);
        let pos = private / ex_ante;
        c.close(&format!("({alpha}, {eps}): PoS(exP:Pri)"), pos, closed, 1e-7);
        c.close(&format!("({alpha}, {eps}): poa_max"), poa_max(&g).unwrap().to_f64(), closed, 1e-7);
    }
    c.finish();
}

#[test]
fn criterion_07_n_state_game() {
    let mut c = Criterion::new(7, "no information against public signaling, exact");
    for n in [2, 5, 10] {
        let g: BayesianGame<Rational> = appendix_a_game(n);
        let report = pos_ratio(&g, Ni, Public, &PublicOptions::default()).unwrap();
        let want = Rational::from_ratio(1, n as i64);
        let got = report.ratio.exact();
        c.check(got.as_ref() == Some(&want), || format!("n {n}: PoS(Pub:NI) = {got:?}, expected {want}"));
    }
    c.finish();
}

#[test]
fn criterion_08_bound_on_random_games() {
    let mut c = Criterion::new(8, "PoS bound and monotonicity on 500 random games");
    let caps = SizeCaps {
        players: 2,
        states: 2,
        actions: 3,
    };
    let reports: Vec<_> = (0..500u64)
        .into_par_iter()
        .map(|k| {
            let g = random_capped_game(&mut instance_rng(8, k), caps);
            (k, g.sense(), verify_pos_bound(&g, &PublicOptions::default()))
        })
        .collect();
    let mut senses = [0usize; 2];
    for (k, sense, report) in reports {
        senses[matches!(sense, Sense::Payoff) as usize] += 1;
        match report {
            Ok(r) => {
                for p in r.pairs.iter().filter(|p| !p.holds) {
                    c.check(false, || format!("game {k}: PoS({}:{}) = {} against {}", p.b, p.a, p.pos, r.poa_bound));
                }
                for ch in r.chains.iter().filter(|ch| !ch.holds) {
                    c.check(false, || format!("game {k}: chain {} {} {} violated", ch.i, ch.j, ch.k));
                }
                c.check(r.passes, || format!("game {k}: report fails"));
            }
            Err(e) => c.check(false, || format!("game {k}: {e}")),
        }
    }
    c.check(senses[0] > 0 && senses[1] > 0, || format!("senses drawn: {senses:?}"));
    c.finish();
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Best welfare over Bayes correlated equilibria of a 2-player, 2-state,
/// 2-action game, by enumerating the vertices of the obedience polytope.
///
/// Variables are `phi(theta, a0, a1)`, the probability of recommending
/// `(a0, a1)` in state `theta`. Each state's recommendations sum to one, and
/// for each player, recommendation `a` and deviation `b`:
/// `sum_theta prior(theta) sum_{profiles with a} phi * (u(b) - u(a)) <= 0`.
fn brute_force_private(g: &BayesianGame) -> f64 {
    let var = |t: usize, a0: usize, a1: usize| t * 4 + a0 * 2 + a1;
    let utility = |t: usize, a0: usize, a1: usize, i: usize| {
        let raw = *g.payoff(t, g.space().index(&[a0, a1]), i);
        match g.sense() {
            Sense::Payoff => raw,
            Sense::Cost => -raw,
        }
    };
    let mut equalities = Vec::new();
    for t in 0..2 {
        let mut row = vec![0.0; 8];
        for s in 0..4 {
            row[t * 4 + s] = 1.0;
        }
        equalities.push(row);
    }
    // Inequalities `row . x <= 0`: four obedience rows, then `-x <= 0`.
    let mut inequalities = Vec::new();
    for i in 0..2 {
        for a in 0..2 {
            let b = 1 - a;
            let mut row = vec![0.0; 8];
            for t in 0..2 {
                for other in 0..2 {
                    let (rec, dev) = if i == 0 { ((a, other), (b, other)) } else { ((other, a), (other, b)) };
                    row[var(t, rec.0, rec.1)] =
                        g.prior()[t] * (utility(t, dev.0, dev.1, i) - utility(t, rec.0, rec.1, i));
                }
            }
            inequalities.push(row);
        }
    }
    for v in 0..8 {
        let mut row = vec![0.0; 8];
        row[v] = -1.0;
        inequalities.push(row);
    }
    let objective: Vec<f64> = (0..8)
        .map(|v| {
            let (t, a0, a1) = (v / 4, (v / 2) % 2, v % 2);
            g.prior()[t] * (0..2).map(|i| *g.payoff(t, g.space().index(&[a0, a1]), i)).sum::<f64>()
        })
        .collect();

    let m = inequalities.len();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() != 6 {
            continue;
        }
        let mut a = equalities.clone();
        let mut rhs = vec![1.0, 1.0];
        for (k, row) in inequalities.iter().enumerate() {
            if mask & (1 << k) != 0 {
                a.push(row.clone());
                rhs.push(0.0);
            }
        }
        let Some(x) = solve_dense(a, rhs) else { continue };
        let feasible = inequalities
            .iter()
            .all(|row| row.iter().zip(&x).map(|(r, v)| r * v).sum::<f64>() <= 1e-9);
        if !feasible {
            continue;
        }
        let value: f64 = objective.iter().zip(&x).map(|(o, v)| o * v).sum();
        let better = match (best, g.sense()) {
            (None, _) => true,
            (Some(b), Sense::Payoff) => value > b,
            (Some(b), Sense::Cost) => value < b,
        };
        if better {
            best = Some(value);
        }
    }
    best.expect("the obedience polytope has a vertex")
}

/// Largest regret in a 2x2 game when the players put `p` and `q` on their first action.
fn regret_2x2(g: &StageGame, p: f64, q: f64) -> f64 {
    let u = |a0: usize, a1: usize, i: usize| {
        let raw = *g.payoff(g.space().index(&[a0, a1]), i);
        match g.sense() {
            Sense::Payoff => raw,
            Sense::Cost => -raw,
        }
    };
    let row0 = [q * u(0, 0, 0) + (1.0 - q) * u(0, 1, 0), q * u(1, 0, 0) + (1.0 - q) * u(1, 1, 0)];
    let col1 = [p * u(0, 0, 1) + (1.0 - p) * u(1, 0, 1), p * u(0, 1, 1) + (1.0 - p) * u(1, 1, 1)];
    let r0 = row0[0].max(row0[1]) - (p * row0[0] + (1.0 - p) * row0[1]);
    let r1 = col1[0].max(col1[1]) - (q * col1[0] + (1.0 - q) * col1[1]);
    r0.max(r1)
}

/// Equilibria of a 2x2 game without ties: mutually best-responding pure
/// profiles and the interior solution of both indifference conditions.
fn analytic_equilibria_2x2(g: &StageGame) -> Vec<(f64, f64)> {
    let u = |a0: usize, a1: usize, i: usize| {
        let raw = *g.payoff(g.space().index(&[a0, a1]), i);
        match g.sense() {
            Sense::Payoff => raw,
            Sense::Cost => -raw,
        }
    };
    let mut out = Vec::new();
    for a0 in 0..2 {
        for a1 in 0..2 {
            if u(a0, a1, 0) >= u(1 - a0, a1, 0) && u(a0, a1, 1) >= u(a0, 1 - a1, 1) {
                out.push((1.0 - a0 as f64, 1.0 - a1 as f64));
            }
        }
    }
    let (p, q) = mix_from(|a0, a1, i| u(a0, a1, i));
    if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
        out.push((p, q));
    }
    out
}

/// Interior mix from the indifference conditions, as probabilities of the
/// first action. Player 1's mix `q` makes player 0 indifferent and vice versa.
fn mix_from(u: impl Fn(usize, usize, usize) -> f64) -> (f64, f64) {
    let q = (u(1, 1, 0) - u(0, 1, 0)) / (u(0, 0, 0) - u(0, 1, 0) - u(1, 0, 0) + u(1, 1, 0));
    let p = (u(1, 1, 1) - u(1, 0, 1)) / (u(0, 0, 1) - u(1, 0, 1) - u(0, 1, 1) + u(1, 1, 1));
    (p, q)
}

#[test]
fn criterion_09_oracle_equivalence() {
    let mut c = Criterion::new(9, "private LP and equilibria against brute-force oracles");
    const STEPS: usize = 200;
    let h = 1.0 / STEPS as f64;
    for k in 0..100u64 {
        let sense = if k % 2 == 0 { Sense::Payoff } else { Sense::Cost };
        let g = random_game(&mut instance_rng(9, k), sense, 2, 2, 2);
        let engine = optimal_private_value(&g).unwrap().0;
        c.close(&format!("game {k}: private value"), engine, brute_force_private(&g), 1e-6);

        for t in 0..2 {
            let stage = g.state_game_at(t);
            let spread = {
                let v = stage.payoffs();
                v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
            };
            let found: Vec<(f64, f64)> = match enumerate_equilibria(&stage) {
                Ok(set) => set.candidates().map(|x| (x.player(0)[0], x.player(1)[0])).collect(),
                Err(e) => {
                    c.check(false, || format!("game {k} state {t}: {e}"));
                    continue;
                }
            };
            let grid: Vec<(f64, f64, f64)> = (0..=STEPS)
                .flat_map(|i| (0..=STEPS).map(move |j| (i as f64 * h, j as f64 * h)))
                .map(|(p, q)| (p, q, regret_2x2(&stage, p, q)))
                .collect();
            let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
            // Every equilibrium has a nearby grid point whose regret is within
            // what rounding to the grid can cost.
            for &x in &found {
                let ok = grid
                    .iter()
                    .any(|&(p, q, r)| dist(x, (p, q)) <= 1e-2 && r <= 2.0 * spread * h);
                c.check(ok, || format!("game {k} state {t}: no grid point near equilibrium {x:?}"));
            }
            // Grid points that are exact equilibria up to float noise lie near
            // one that was found. Larger regret thresholds also admit points far
            // from every equilibrium when a player is nearly indifferent.
            for &(p, q, r) in &grid {
                if r <= 1e-9 * spread.max(1.0) {
                    c.check(found.iter().any(|&x| dist(x, (p, q)) <= 1e-2), || {
                        format!("game {k} state {t}: grid equilibrium ({p}, {q}) missed by enumeration")
                    });
                }
            }
            // Off-grid equilibria: the analytic equilibrium set of a generic 2x2 game.
            let exact = analytic_equilibria_2x2(&stage);
            c.check(exact.len() == found.len(), || {
                format!("game {k} state {t}: analytic {exact:?} against enumerated {found:?}")
            });
            for &x in &exact {
                c.check(found.iter().any(|&y| dist(x, y) <= 1e-8), || {
                    format!("game {k} state {t}: analytic equilibrium {x:?} missed by enumeration")
                });
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_10_pigou_round_trip() {
    let mut c = Criterion::new(10, "Pigou exponent round trip");
    for r in [1.0, 1.1, 4.0 / 3.0, 2.0, 5.0] {
        let alpha = solve_pigou_alpha(r).unwrap();
        c.close(&format!("r {r}"), pigou_poa(alpha).unwrap(), r, 1e-8);
        if r > 1.0 {
            c.close(&format!("r {r}: closed form"), 1.0 / pigou_optimum(alpha), r, 1e-8);
        }
    }
    c.finish();
}

#[test]
fn scenario_builders_agree_with_direct_constructors() {
    let spec = scenario(ScenarioId::Fig4, 0.5, Some(0.1));
    let Instance::Game(g) = build(&spec).unwrap().instance else { panic!() };
    assert_eq!(g, robbers_game(0.5, 0.1));
    let spec = scenario(ScenarioId::Fig2, 1.0, None);
    let Instance::Routing(r) = build(&spec).unwrap().instance else { panic!() };
    assert_eq!(r, fig2_network(1.0));
}
