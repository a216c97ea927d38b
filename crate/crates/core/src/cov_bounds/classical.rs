//! Bounds in terms of plain `L_p` norms.

use super::{check_norm, check_unit, BoundReport, Theorem};
use crate::psi::conjugate_exponent;
use crate::{Error, Result};

/// `12 alpha^(1 - 1/p - 1/q) |xi|_p |eta|_q`, for `1/p + 1/q < 1`.
pub fn davydov_bound(alpha: f64, p: f64, q: f64, norm_p: f64, norm_q: f64) -> Result<BoundReport> {
    check_unit("alpha", alpha)?;
    check_norm("norm_p", norm_p)?;
    check_norm("norm_q", norm_q)?;
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::domain(format!("exponents must be >= 1, got p = {p}, q = {q}")));
    }
    let expo = 1.0 - 1.0 / p - 1.0 / q;
    if !(expo > 0.0) {
        return Ok(BoundReport::infeasible(Theorem::Davydov, "1/p + 1/q must be < 1").with_trace(Some(p), Some(q)));
    }
    let value = if alpha == 0.0 { 0.0 } else { 12.0 * alpha.powf(expo) * norm_p * norm_q };
    Ok(BoundReport::feasible(Theorem::Davydov, value).with_trace(Some(p), Some(q)))
}

/// `2 beta^(1/p) |xi|_p |eta|_p'`. `p = inf` pairs with `q = 1` and factor 1.
pub fn ibragimov_bound(beta: f64, p: f64, norm_p: f64, norm_q: f64) -> Result<BoundReport> {
    check_unit("beta", beta)?;
    check_norm("norm_p", norm_p)?;
    check_norm("norm_q", norm_q)?;
    if !(p > 1.0) {
        return Err(Error::domain(format!("ibragimov bound needs p > 1, got {p}")));
    }
    let factor = if p.is_infinite() { 1.0 } else { beta.powf(1.0 / p) };
    Ok(BoundReport::feasible(Theorem::Ibragimov, 2.0 * factor * norm_p * norm_q)
        .with_trace(Some(p), Some(conjugate_exponent(p))))
}

/// `2 |xi|_p |eta|_p'`, by Hölder alone.
pub fn holder_bound(p: f64, norm_p: f64, norm_q: f64) -> Result<BoundReport> {
    check_norm("norm_p", norm_p)?;
    check_norm("norm_q", norm_q)?;
    if !(p >= 1.0) {
        return Err(Error::domain(format!("holder bound needs p >= 1, got {p}")));
    }
    Ok(BoundReport::feasible(Theorem::Holder, 2.0 * norm_p * norm_q).with_trace(Some(p), Some(conjugate_exponent(p))))
}
