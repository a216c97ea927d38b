//! Fundamental functions `phi[G psi](delta) = sup_p delta^(1/p) / psi(p)`,
//! their low-truncated variants, the maximizing exponent, and the
//! `g`-transform used to characterise it.
//!
//! The sup is taken in log form, `(ln delta)/p - ln psi(p)`, over a dense
//! grid in `u = 1/p` followed by golden-section refinement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{self, Edge, DEFAULT_GRID};
use crate::psi::{PsiFunction, Support};

/// Where the maximizing exponent sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Interior,
    /// At `p = 1`.
    AtOne,
    /// At the truncation point `s > 1` (or the lower end of a product support).
    AtLower,
    /// At (or converging to) a finite support end `b`.
    AtB,
    /// At the `P_MAX` cap of an unbounded support.
    AtInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalResult {
    pub value: f64,
    /// `ln value`, kept for underflow-prone queries.
    pub ln_value: f64,
    pub argmax_p: f64,
    pub boundary: Boundary,
    pub delta: f64,
    /// Lower end `s` of the sup domain `[s, b)`.
    pub trunc_low: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain(format!("delta must be positive and finite, got {delta}")));
    }
    Ok(())
}

fn sup_over(psi: &PsiFunction, support: &Support, delta: f64, s: f64) -> Result<FundamentalResult> {
    let ld = delta.ln();
    let m = optimize::maximize_p(support, DEFAULT_GRID, |p| ld / p - psi.ln_eval(p)).ok_or(Error::EmptySupport)?;
    let boundary = match m.edge {
        Edge::Interior => Boundary::Interior,
        Edge::Low if m.p == 1.0 => Boundary::AtOne,
        Edge::Low => Boundary::AtLower,
        Edge::High if m.capped => Boundary::AtInfinity,
        Edge::High => Boundary::AtB,
    };
    Ok(FundamentalResult { value: m.value.exp(), ln_value: m.value, argmax_p: m.p, boundary, delta, trunc_low: s })
}

/// `phi[G psi](delta)` for any `delta > 0`.
pub fn fundamental(psi: &PsiFunction, delta: f64) -> Result<FundamentalResult> {
    check_delta(delta)?;
    sup_over(psi, &psi.support(), delta, 1.0)
}

/// `phi_s[G psi](delta)`: the sup restricted to `p in [s, b)`.
pub fn fundamental_truncated(psi: &PsiFunction, s: f64, delta: f64) -> Result<FundamentalResult> {
    check_delta(delta)?;
    let sup = psi.support();
    let inside = if sup.hi_closed { s <= sup.hi } else { s < sup.hi };
    if !(s >= 1.0) || !inside {
        return Err(Error::domain(format!("truncation point s = {s} must satisfy 1 <= s < b = {}", sup.hi)));
    }
    sup_over(psi, &sup.truncate_low(s), delta, s)
}

/// `(e m)^(-1/m) |ln delta|^(-1/m)`, the fundamental function of `p^(1/m)`.
pub fn closed_form_power(m: f64, delta: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::domain(format!("m must be positive, got {m}")));
    }
    if !(delta > 0.0 && delta < (-1.0f64).exp()) {
        return Err(Error::domain(format!("closed form needs 0 < delta < 1/e, got {delta}")));
    }
    let l = -delta.ln();
    Ok((std::f64::consts::E * m).powf(-1.0 / m) * l.powf(-1.0 / m))
}

/// The constant `K(b, beta) = b^(2 beta - 1) beta^beta` (with `0^0 = 1`).
pub fn paper_constant_k(b: f64, beta: f64) -> f64 {
    let bb = if beta == 0.0 { 1.0 } else { beta.powf(beta) };
    b.powf(2.0 * beta - 1.0) * bb
}

/// Leading-order constant of the numeric sup for `(b - p)^(-beta)`:
/// stationarity gives `b - p ~ beta b^2 / |ln delta|`, hence
/// `phi ~ b^(2 beta) beta^beta e^(-beta) delta^(1/b) |ln delta|^(-beta)`.
pub fn asymptotic_constant_finite(b: f64, beta: f64) -> f64 {
    let bb = if beta == 0.0 { 1.0 } else { beta.powf(beta) };
    b.powf(2.0 * beta) * bb * (-beta).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteClosedForm {
    /// `K(b, beta) delta^(1/b) |ln delta|^(-beta)` with the published constant.
    pub value: f64,
    pub constant: f64,
    /// `fundamental(tau_{b,beta}, delta) / (delta^(1/b) |ln delta|^(-beta))`.
    pub observed_constant: f64,
    /// `observed_constant` differs from `constant` by more than 1e-3 relative.
    pub constant_mismatch: bool,
}

/// Closed form for `tau_{b,beta}(p) = (b - p)^(-beta)`, reported together with
/// the numerically observed constant. Only the shape
/// `delta^(1/b) |ln delta|^(-beta)` agrees with the numeric sup.
pub fn closed_form_finite(b: f64, beta: f64, delta: f64) -> Result<FiniteClosedForm> {
    if !(b > 1.0 && b.is_finite()) || !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("need b > 1 and beta >= 0, got b = {b}, beta = {beta}")));
    }
    if !(delta > 0.0 && delta <= (-1.0f64).exp()) {
        return Err(Error::domain(format!("closed form needs 0 < delta <= 1/e, got {delta}")));
    }
    let shape = delta.powf(1.0 / b) * (-delta.ln()).powf(-beta);
    let k = paper_constant_k(b, beta);
    let numeric = fundamental(&PsiFunction::FiniteSupport { b, beta }, delta)?;
    let observed = numeric.value / shape;
    Ok(FiniteClosedForm {
        value: k * shape,
        constant: k,
        observed_constant: observed,
        constant_mismatch: ((observed - k) / k).abs() > 1e-3,
    })
}

/// `g[psi](x) = -ln psi(1/x)`.
pub fn g_transform(psi: &PsiFunction, x: f64) -> Result<f64> {
    check_g_domain(psi, x)?;
    Ok(-psi.ln_eval(1.0 / x))
}

fn check_g_domain(psi: &PsiFunction, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) || !psi.support().contains(1.0 / x) {
        return Err(Error::domain(format!("1/x = {} is outside the support of psi", 1.0 / x)));
    }
    Ok(())
}

/// `g'[psi](x)`: closed form for the power, finite-support and extremal
/// kinds, central difference with step `max(1e-6 x, 1e-9)` otherwise.
pub fn g_prime(psi: &PsiFunction, x: f64) -> Result<f64> {
    check_g_domain(psi, x)?;
    Ok(match psi {
        PsiFunction::Power { m } => 1.0 / (m * x),
        PsiFunction::FiniteSupport { b, beta } => beta / (x * (b * x - 1.0)),
        PsiFunction::Extremal { .. } => 0.0,
        _ => g_prime_fd(psi, x),
    })
}

/// Central finite difference of `g`, one-sided at support ends.
pub fn g_prime_fd(psi: &PsiFunction, x: f64) -> f64 {
    let h = (1e-6 * x).max(1e-9);
    let g = |y: f64| -psi.ln_eval(1.0 / y);
    let (gp, gm) = (g(x + h), g(x - h));
    match (gp.is_finite(), gm.is_finite()) {
        (true, true) => (gp - gm) / (2.0 * h),
        (true, false) => (gp - g(x)) / h,
        (false, true) => (g(x) - gm) / h,
        (false, false) => f64::NAN,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgmaxMethod {
    Bisection,
    GridFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxSolution {
    pub p: f64,
    pub x: f64,
    pub method: ArgmaxMethod,
    pub warning: Option<String>,
}

/// Solves `g'[psi](x) = ln(1/delta)` by bisection and returns `p = 1/x`.
/// Falls back to the grid argmax of [`fundamental`] when `g'` is not monotone
/// on the support or the root is not bracketed (boundary optimum).
pub fn solve_argmax(psi: &PsiFunction, delta: f64) -> Result<ArgmaxSolution> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let target = -delta.ln();
    let range = optimize::EvalRange::from_support(&psi.support()).ok_or(Error::EmptySupport)?;
    let (x_lo, x_hi) = (range.u_min(), range.u_max());
    let h = |x: f64| g_prime(psi, x).unwrap_or(f64::NAN) - target;

    let fallback = |why: &str| -> Result<ArgmaxSolution> {
        let r = fundamental(psi, delta)?;
        Ok(ArgmaxSolution {
            p: r.argmax_p,
            x: 1.0 / r.argmax_p,
            method: ArgmaxMethod::GridFallback,
            warning: Some(why.to_string()),
        })
    };

    if x_lo >= x_hi {
        return fallback("degenerate support");
    }
    // monotonicity scan
    let n = 64;
    let scan: Vec<f64> = (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            g_prime(psi, range.u_min() + t * (x_hi - x_lo)).unwrap_or(f64::NAN)
        })
        .collect();
    let finite: Vec<f64> = scan.iter().copied().filter(|v| v.is_finite()).collect();
    let dec = finite.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
    let inc = finite.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9) - 1e-12);
    if finite.len() < 2 || !(dec || inc) {
        return fallback("g' not monotone on the support");
    }
    let (mut a, mut b) = (x_lo, x_hi);
    let (ha, hb) = (h(a), h(b));
    if !(ha.is_finite() || hb.is_finite()) || ha.signum() == hb.signum() {
        return fallback("root of g'(x) = ln(1/delta) not bracketed");
    }
    let sa = ha.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let hm = h(mid);
        if hm.is_nan() {
            return fallback("g' undefined inside bracket");
        }
        if hm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-16 * b {
            break;
        }
    }
    let x = 0.5 * (a + b);
    Ok(ArgmaxSolution { p: 1.0 / x, x, method: ArgmaxMethod::Bisection, warning: None })
}
