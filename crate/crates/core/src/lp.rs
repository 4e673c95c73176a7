//! Dense two-phase primal simplex.
//!
//! Small LPs only (a few hundred columns). Pivoting follows Bland's rule:
//! the entering column is the lowest-index improving column and ties in the
//! ratio test go to the lowest-index basic variable, which rules out cycling.
//! All variables are non-negative.

use thiserror::Error;

use crate::scalar::{sum, Scalar};

/// Reduced costs above this are treated as improving.
const REDUCED_COST_TOL: f64 = 1e-9;
/// Column entries at or below this are not pivot candidates.
const ENTRY_TOL: f64 = 1e-9;
/// Smallest pivot the solver accepts before declaring numeric failure.
const MIN_PIVOT: f64 = 1e-11;
/// Phase-one infeasibility threshold.
const FEASIBILITY_TOL: f64 = 1e-9;
/// Residual bound certified on every returned optimum.
pub const RESIDUAL_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T = f64> {
    pub direction: Direction,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(direction: Direction, objective: Vec<T>) -> Self {
        LinearProgram {
            direction,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn objective_at(&self, point: &[T]) -> T {
        dot(&self.objective, point)
    }

    /// Largest constraint or bound violation at `point`.
    pub fn max_violation(&self, point: &[T]) -> f64 {
        let mut worst = point
            .iter()
            .map(|x| (-x.to_f64()).max(0.0))
            .fold(0.0, f64::max);
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, point).to_f64();
            let rhs = c.rhs.to_f64();
            let v = match c.relation {
                Relation::Le => lhs - rhs,
                Relation::Ge => rhs - lhs,
                Relation::Eq => (lhs - rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    sum(a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T = f64> {
    pub status: LpStatus,
    /// Objective at `point`; zero unless optimal.
    pub value: T,
    pub point: Vec<T>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed program: {0}")]
    Shape(String),
    #[error("numeric failure: pivot magnitude {pivot:e} below {MIN_PIVOT:e}")]
    TinyPivot { pivot: f64 },
    #[error("numeric failure: constraint residual {residual:e} exceeds {RESIDUAL_TOL:e}")]
    Residual { residual: f64 },
    #[error("numeric failure: no convergence after {0} pivots")]
    PivotLimit(usize),
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Number of columns excluding the right-hand side.
    cols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, r: usize) -> &T {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize, reduced: &mut [T]) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            row[c] = T::zero();
        }
        if !reduced[c].is_zero() {
            let f = reduced[c].clone();
            for (v, pv) in reduced.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            reduced[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximizing `cost`; the last entry is minus the objective.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut reduced: Vec<T> = cost.to_vec();
        reduced.push(T::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (v, a) in reduced.iter_mut().zip(row) {
                *v = v.clone() - cb.clone() * a.clone();
            }
        }
        reduced
    }

    /// Maximizes `cost` over the current basis using only the first `allowed` columns.
    fn optimize(&mut self, cost: &[T], allowed: usize, pivots: &mut usize) -> Result<Outcome, LpError> {
        let mut reduced = self.reduced_costs(cost);
        let improving = T::slack(REDUCED_COST_TOL);
        let entry_tol = T::slack(ENTRY_TOL);
        loop {
            let Some(enter) = (0..allowed).find(|&j| reduced[j] > improving) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if *a <= entry_tol {
                    continue;
                }
                // Round-off can leave a basic value slightly negative; read it as zero.
                let rhs = self.rhs(r).clone().max_of(T::zero());
                let ratio = rhs / a.clone();
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        let tie = if T::EXACT {
                            ratio == best_ratio
                        } else {
                            (ratio.to_f64() - best_ratio.to_f64()).abs()
                                <= 1e-12 * (1.0 + best_ratio.to_f64().abs())
                        };
                        if (tie && self.basis[r] < self.basis[best]) || (!tie && ratio < best_ratio) {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            let p = self.rows[r][enter].to_f64().abs();
            if !T::EXACT && p < MIN_PIVOT {
                return Err(LpError::TinyPivot { pivot: p });
            }
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(LpError::PivotLimit(MAX_PIVOTS));
            }
            self.pivot(r, enter, &mut reduced);
        }
    }
}

/// Solves `lp`. Infeasibility and unboundedness are statuses; numeric trouble
/// is an error.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>, LpError> {
    let n = lp.num_vars();
    for (k, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::Shape(format!(
                "constraint {k} has {} coefficients for {n} variables",
                c.coeffs.len()
            )));
        }
    }

    // Normalize to non-negative right-hand sides.
    let rows: Vec<(Vec<T>, Relation, T)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|a| -a.clone()).collect(), flipped, -c.rhs.clone())
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + n_slack + n_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cols,
    };
    let (mut slack, mut art) = (n, n + n_slack);
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(cols + 1, T::zero());
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[slack] = T::one();
                tab.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -T::one();
                slack += 1;
                row[art] = T::one();
                tab.basis.push(art);
                art += 1;
            }
            Relation::Eq => {
                row[art] = T::one();
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
    }

    let mut pivots = 0;
    let first_art = n + n_slack;
    if n_art > 0 {
        let mut phase1 = vec![T::zero(); cols];
        for c in phase1.iter_mut().skip(first_art) {
            *c = -T::one();
        }
        tab.optimize(&phase1, cols, &mut pivots)?;
        let infeasibility = sum(
            tab.basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= first_art)
                .map(|(r, _)| tab.rhs(r).clone()),
        );
        if infeasibility > T::slack(FEASIBILITY_TOL) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: T::zero(),
                point: vec![T::zero(); n],
            });
        }
        // Drive remaining (zero-level) artificials out, dropping redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] < first_art {
                r += 1;
                continue;
            }
            let candidate = (0..first_art)
                .filter(|&j| tab.rows[r][j].to_f64().abs() > FEASIBILITY_TOL || (T::EXACT && !tab.rows[r][j].is_zero()))
                .max_by(|&a, &b| {
                    tab.rows[r][a]
                        .to_f64()
                        .abs()
                        .total_cmp(&tab.rows[r][b].to_f64().abs())
                        .then(b.cmp(&a))
                });
            match candidate {
                Some(j) => {
                    let mut scratch = vec![T::zero(); cols + 1];
                    tab.pivot(r, j, &mut scratch);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        }
        for row in tab.rows.iter_mut() {
            let rhs = row[cols].clone();
            row.truncate(first_art);
            row.push(rhs);
        }
        tab.cols = first_art;
    }

    let mut cost: Vec<T> = match lp.direction {
        Direction::Max => lp.objective.clone(),
        Direction::Min => lp.objective.iter().map(|c| -c.clone()).collect(),
    };
    cost.resize(tab.cols, T::zero());
    let outcome = tab.optimize(&cost, tab.cols, &mut pivots)?;
    if let Outcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: T::zero(),
            point: vec![T::zero(); n],
        });
    }

    let mut point = vec![T::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            let v = tab.rhs(r).clone();
            point[b] = if v.is_negative() && v.is_negligible(FEASIBILITY_TOL) {
                T::zero()
            } else {
                v
            };
        }
    }
    let residual = lp.max_violation(&point);
    if residual > RESIDUAL_TOL {
        return Err(LpError::Residual { residual });
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: lp.objective_at(&point),
        point,
    })
}
