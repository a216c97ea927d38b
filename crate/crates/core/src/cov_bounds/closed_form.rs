//! Closed-form uniform-mixing bounds for the power and finite-support
//! families, and the bound for a GLS variable against a plain `L_q` one.
//!
//! The closed forms rely on the asymptotic fundamental functions and are
//! only offered for `alpha <= 1/e`. Each report carries the numeric
//! uniform bound in `numeric_check`.

use serde::{Deserialize, Serialize};

use super::gls::gls_uniform_bound_fast;
use super::{check_norm, BoundReport, Theorem};
use crate::error::{Error, Result};
use crate::fundamental::{fundamental_truncated, paper_constant_k};
use crate::psi::{conjugate_exponent, PsiFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ExampleFamily {
    /// `psi = p^(1/m)`, `nu = q^(1/n)`.
    PowerPower { m: f64, n: f64 },
    /// `psi = (b1 - p)^(-beta1)`, `nu = (b2 - q)^(-beta2)`.
    FiniteFinite { b1: f64, beta1: f64, b2: f64, beta2: f64 },
    /// `psi = p^(1/m)`, `nu = (b - q)^(-beta)`.
    PowerFinite { m: f64, b: f64, beta: f64 },
    /// `xi` in `G psi`, `eta` in `L_q0`; `norm_eta` is `|eta|_q0`.
    Combined { psi: PsiFunction, q0: f64 },
}

impl ExampleFamily {
    fn theorem(&self) -> Theorem {
        match self {
            ExampleFamily::PowerPower { .. } => Theorem::PowerPower,
            ExampleFamily::FiniteFinite { .. } => Theorem::FiniteFinite,
            ExampleFamily::PowerFinite { .. } => Theorem::PowerFinite,
            ExampleFamily::Combined { .. } => Theorem::Combined,
        }
    }
}

const CONSTANT_CAVEAT: &str =
    "published constant K(b, beta) differs from the asymptotic constant of the numeric fundamental function";

fn with_numeric(
    mut rep: BoundReport,
    psi: &PsiFunction,
    nu: &PsiFunction,
    alpha: f64,
    nx: f64,
    ne: f64,
) -> Result<BoundReport> {
    let num = gls_uniform_bound_fast(psi, nu, alpha, nx, ne)?;
    rep.numeric_check = Some(num.value);
    Ok(rep)
}

/// Evaluates the closed-form bound of `family` at `alpha`.
pub fn example_bounds(family: &ExampleFamily, alpha: f64, norm_xi: f64, norm_eta: f64) -> Result<BoundReport> {
    check_norm("norm_xi", norm_xi)?;
    check_norm("norm_eta", norm_eta)?;
    let e = std::f64::consts::E;
    if !(alpha >= 0.0) {
        return Err(Error::domain(format!("alpha must be >= 0, got {alpha}")));
    }
    if alpha > 1.0 / e {
        return Err(Error::domain(format!("alpha = {alpha} > 1/e: closed forms do not apply, use the holder bound")));
    }
    let th = family.theorem();
    if alpha == 0.0 {
        return Ok(BoundReport::feasible(th, 0.0).with_note("alpha = 0: independent fields"));
    }
    let l = -alpha.ln();
    let norms = norm_xi * norm_eta;
    match family {
        ExampleFamily::PowerPower { m, n } => {
            let (psi, nu) = (PsiFunction::power(*m)?, PsiFunction::power(*n)?);
            let s = 1.0 / m + 1.0 / n;
            let value = 12.0 * e.powf(s) * m.powf(1.0 / m) * n.powf(1.0 / n) * alpha * l.powf(s) * norms;
            let (p0, q0) = (m * l, n * l);
            let mut rep = BoundReport::feasible(th, value).with_trace(Some(p0), Some(q0));
            if 1.0 / p0 + 1.0 / q0 >= 1.0 {
                rep = rep.with_note("factorization unverified: 1/p0 + 1/q0 >= 1");
            }
            with_numeric(rep, &psi, &nu, alpha, norm_xi, norm_eta)
        }
        ExampleFamily::FiniteFinite { b1, beta1, b2, beta2 } => {
            let (psi, nu) = (PsiFunction::finite_support(*b1, *beta1)?, PsiFunction::finite_support(*b2, *beta2)?);
            if 1.0 / b1 + 1.0 / b2 >= 1.0 {
                return Ok(BoundReport::infeasible(th, "requires 1/b1 + 1/b2 < 1"));
            }
            let value = 12.0
                * paper_constant_k(*b1, *beta1)
                * paper_constant_k(*b2, *beta2)
                * alpha.powf(1.0 - 1.0 / b1 - 1.0 / b2)
                * l.powf(beta1 + beta2)
                * norms;
            let rep = BoundReport::feasible(th, value).with_note(CONSTANT_CAVEAT);
            with_numeric(rep, &psi, &nu, alpha, norm_xi, norm_eta)
        }
        ExampleFamily::PowerFinite { m, b, beta } => {
            let (psi, nu) = (PsiFunction::power(*m)?, PsiFunction::finite_support(*b, *beta)?);
            let value = 12.0
                * (e * m).powf(1.0 / m)
                * paper_constant_k(*b, *beta)
                * alpha.powf(1.0 - 1.0 / b)
                * l.powf(beta + 1.0 / m)
                * norms;
            let rep = BoundReport::feasible(th, value).with_note(CONSTANT_CAVEAT);
            with_numeric(rep, &psi, &nu, alpha, norm_xi, norm_eta)
        }
        ExampleFamily::Combined { psi, q0 } => {
            if !(*q0 > 1.0) {
                return Err(Error::domain(format!("q0 must be > 1, got {q0}")));
            }
            let s = conjugate_exponent(*q0);
            let sup = psi.support();
            let inside = if sup.hi_closed { s <= sup.hi } else { s < sup.hi };
            if !inside {
                return Ok(BoundReport::infeasible(th, "requires q0' < b"));
            }
            let r = match fundamental_truncated(psi, s, alpha) {
                Ok(r) => r,
                Err(Error::EmptySupport) => return Ok(BoundReport::infeasible(th, "psi infinite on [q0', b)")),
                Err(e) => return Err(e),
            };
            let expo = if q0.is_infinite() { 1.0 } else { 1.0 - 1.0 / q0 };
            let value = 12.0 * norms * (expo * alpha.ln() - r.ln_value).exp();
            Ok(BoundReport::feasible(th, value).with_trace(Some(r.argmax_p), Some(*q0)))
        }
    }
}
