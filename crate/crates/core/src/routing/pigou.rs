//! The Pigou-network price of anarchy as a function of the latency exponent.

use super::RoutingError;

/// Upper end of the exponent bracket searched by [`solve_pigou_alpha`].
pub const PIGOU_ALPHA_MAX: f64 = 1000.0;
const INVERSE_TOL: f64 = 1e-10;

/// Optimal load `(1/(alpha+1))^(1/alpha)` on the `x^alpha` edge; `1/e` in the limit `alpha -> 0`.
pub fn pigou_demand(alpha: f64) -> f64 {
    if alpha == 0.0 {
        (-1.0f64).exp()
    } else {
        (-alpha.ln_1p() / alpha).exp()
    }
}

/// Price of anarchy of the two-edge network with latencies `x^alpha` and `1`
/// and unit demand: `1 / (d^(alpha+1) + 1 - d)` at the optimal load `d`.
pub fn pigou_poa(alpha: f64) -> Result<f64, RoutingError> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(RoutingError::Domain(format!("alpha must be finite and non-negative, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    // d^(alpha+1) + 1 - d = 1 - d * alpha / (alpha + 1), since d^alpha = 1/(alpha+1).
    let d = pigou_demand(alpha);
    Ok(1.0 / (1.0 - d * alpha / (alpha + 1.0)))
}

/// The exponent whose Pigou PoA equals `r`, by bisection on `(0, PIGOU_ALPHA_MAX]`.
pub fn solve_pigou_alpha(r: f64) -> Result<f64, RoutingError> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(RoutingError::Domain(format!("ratio must be at least 1, got {r}")));
    }
    if r == 1.0 {
        return Ok(0.0);
    }
    let ceiling = pigou_poa(PIGOU_ALPHA_MAX)?;
    if r > ceiling {
        return Err(RoutingError::Domain(format!(
            "ratio {r} exceeds {ceiling}, the value at alpha = {PIGOU_ALPHA_MAX}"
        )));
    }
    let (mut lo, mut hi) = (0.0, PIGOU_ALPHA_MAX);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let value = pigou_poa(mid)?;
        if (value - r).abs() <= INVERSE_TOL || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if value < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}
