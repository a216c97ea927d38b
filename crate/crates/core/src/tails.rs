//! Young–Fenchel machinery for GLS tails: `v(p) = p ln psi(p)`, its convex
//! conjugate `v*`, the tail bound `P(|zeta| > y) <= 2 exp(-v*(ln(y/||zeta||)))`,
//! the exponential Orlicz function `N_psi` and empirical tail frequencies.

use serde::Serialize;
use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::optimize::{self, Edge, DEFAULT_GRID};
use crate::psi::PsiFunction;

/// `v_psi(p) = p ln psi(p)`; `+inf` off the support.
pub fn v_of(psi: &PsiFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("v is defined for p >= 1, got {p}")));
    }
    let l = psi.ln_eval(p);
    Ok(if l == f64::INFINITY { l } else { p * l })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conjugate {
    pub value: f64,
    pub argmax_p: f64,
    /// The objective was still increasing at `P_MAX`; `value` is a lower
    /// estimate of a sup that may be infinite.
    pub unbounded_at_cap: bool,
}

/// `v*(x) = sup_p (p x - v(p))` over the support capped at `P_MAX`.
pub fn conjugate(psi: &PsiFunction, x: f64) -> Result<Conjugate> {
    if x.is_nan() {
        return Err(Error::domain("conjugate argument is NaN"));
    }
    let m = optimize::maximize_p(&psi.support(), DEFAULT_GRID, |p| {
        let l = psi.ln_eval(p);
        if l == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            p * x - p * l
        }
    })
    .ok_or(Error::EmptySupport)?;
    Ok(Conjugate { value: m.value, argmax_p: m.p, unbounded_at_cap: m.capped && m.edge == Edge::High })
}

/// `min(1, 2 exp(-v*(ln(y/norm))))`, valid for `y >= e * norm`.
pub fn tail_bound(psi: &PsiFunction, norm: f64, y: f64) -> Result<f64> {
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::domain(format!("norm must be positive and finite, got {norm}")));
    }
    if !(y >= E * norm * (1.0 - 1e-12)) {
        return Err(Error::domain(format!("below validity threshold: y = {y} < e * norm = {}", E * norm)));
    }
    let c = conjugate(psi, (y / norm).ln())?;
    Ok((2.0 * (-c.value).exp()).min(1.0))
}

/// `N_psi(u)`: `exp(v*(ln|u|))` for `|u| >= e`, and `C u^2` below with
/// `C = exp(v*(1)) / e^2` so that the two pieces meet at `|u| = e`.
pub fn orlicz_n(psi: &PsiFunction, u: f64) -> Result<f64> {
    let a = u.abs();
    if a >= E {
        Ok(conjugate(psi, a.ln())?.value.exp())
    } else {
        let c = conjugate(psi, 1.0)?.value.exp() / (E * E);
        Ok(c * a * a)
    }
}

/// `max(P(xi >= y), P(xi <= -y))` under the empirical law of `samples`.
pub fn empirical_tail(samples: &[f64], y: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("empirical tail of an empty sample"));
    }
    if !(y >= 0.0) {
        return Err(Error::domain(format!("tail level must be >= 0, got {y}")));
    }
    let up = samples.iter().filter(|&&x| x >= y).count();
    let down = samples.iter().filter(|&&x| x <= -y).count();
    Ok(up.max(down) as f64 / samples.len() as f64)
}

/// Empirical tails at many levels in one sorted pass.
pub fn empirical_tails(samples: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::invalid("empirical tail of an empty sample"));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    ys.iter()
        .map(|&y| {
            if !(y >= 0.0) {
                return Err(Error::domain(format!("tail level must be >= 0, got {y}")));
            }
            let up = s.len() - s.partition_point(|&x| x < y);
            let down = s.partition_point(|&x| x <= -y);
            Ok(up.max(down) as f64 / n)
        })
        .collect()
}
