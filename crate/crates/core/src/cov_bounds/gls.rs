//! Bounds in terms of GLS norms.

use serde::Serialize;
use std::sync::Arc;

use super::{check_norm, check_unit, BoundReport, Theorem};
use crate::error::{Error, Result};
use crate::fundamental::{fundamental, fundamental_truncated, g_prime};
use crate::optimize::{self, Region, DEFAULT_GRID_2D};
use crate::psi::{conjugate_exponent, product_zeta, PsiFunction, Support};

const TRIANGLE_MARGIN: f64 = 1e-9;
const THETA_OUTER_GRID: usize = 512;
const ROUTE_TOLERANCE: f64 = 1e-6;
const FACTORIZATION_TOLERANCE: f64 = 1e-6;
const GENERIC_GRID: usize = 256;

/// `Phi[psi, nu](alpha, beta) = sup over 1/p + 1/q < 1 of
/// alpha^(1/p) beta^(1/q) / (psi(p) nu(q))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformPhi {
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
    pub ln_value: f64,
    pub attained_at: (f64, f64),
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0, 1], got {x}")));
    }
    Ok(())
}

/// `Phi` by a two-dimensional sup over the triangle in `(1/p, 1/q)`.
/// `None` when no point of the triangle has `psi(p) nu(q) < inf`.
pub fn uniform_phi_grid(psi: &PsiFunction, nu: &PsiFunction, alpha: f64, beta: f64) -> Result<Option<UniformPhi>> {
    check_open_unit("alpha", alpha)?;
    check_open_unit("beta", beta)?;
    let (la, lb) = (alpha.ln(), beta.ln());
    let m = optimize::maximize_separable(
        &psi.support(),
        &nu.support(),
        Region::Triangle { margin: TRIANGLE_MARGIN },
        DEFAULT_GRID_2D,
        |p| la / p - psi.ln_eval(p),
        |q| lb / q - nu.ln_eval(q),
    );
    Ok(m.map(|m| UniformPhi { alpha, beta, value: m.value.exp(), ln_value: m.value, attained_at: (m.p, m.q) }))
}

/// `Phi` through `theta(p) = psi(p) / phi_(p')[nu](beta)`, as the
/// fundamental function of `theta` at `alpha`.
pub fn uniform_phi_theta(psi: &PsiFunction, nu: &PsiFunction, alpha: f64, beta: f64) -> Result<Option<UniformPhi>> {
    check_open_unit("alpha", alpha)?;
    check_open_unit("beta", beta)?;
    let la = alpha.ln();
    let inner = |p: f64| -> Option<(f64, f64)> {
        let s = conjugate_exponent(p);
        fundamental_truncated(nu, s, beta).ok().map(|r| (r.ln_value, r.argmax_p))
    };
    let m = optimize::maximize_p(&psi.support(), THETA_OUTER_GRID, |p| {
        let lp = psi.ln_eval(p);
        match inner(p) {
            Some((l, _)) if lp.is_finite() => la / p - lp + l,
            _ => f64::NEG_INFINITY,
        }
    });
    Ok(m.and_then(|m| {
        let (_, q) = inner(m.p)?;
        Some(UniformPhi { alpha, beta, value: m.value.exp(), ln_value: m.value, attained_at: (m.p, q) })
    }))
}

/// `2 ||xi|| ||eta|| / phi[zeta[psi, nu]](1/beta)` under beta-mixing.
pub fn gls_strong_bound(
    psi: &PsiFunction,
    nu: &PsiFunction,
    beta: f64,
    norm_xi: f64,
    norm_eta: f64,
) -> Result<BoundReport> {
    check_unit("beta", beta)?;
    check_norm("norm_xi", norm_xi)?;
    check_norm("norm_eta", norm_eta)?;
    if beta == 0.0 {
        return Ok(BoundReport::feasible(Theorem::GlsStrong, 0.0).with_note("beta = 0: independent fields"));
    }
    let zeta = product_zeta(psi, nu);
    match fundamental(&zeta, 1.0 / beta) {
        Ok(r) => {
            let value = 2.0 * norm_xi * norm_eta * (-r.ln_value).exp();
            let p = r.argmax_p;
            Ok(BoundReport::feasible(Theorem::GlsStrong, value).with_trace(Some(p), Some(conjugate_exponent(p))))
        }
        Err(Error::EmptySupport) => {
            Ok(BoundReport::infeasible(Theorem::GlsStrong, "zeta[psi, nu] is infinite everywhere"))
        }
        Err(e) => Err(e),
    }
}

/// The strong bound for `nu = dual(psi)`, evaluated as
/// `2 phi[psi](beta^(-1/2))^(-2) ||xi|| ||eta||`. `numeric_check` carries the
/// general product-function route.
pub fn gls_dual_pair_bound(psi: &PsiFunction, beta: f64, norm_xi: f64, norm_eta: f64) -> Result<BoundReport> {
    check_unit("beta", beta)?;
    check_norm("norm_xi", norm_xi)?;
    check_norm("norm_eta", norm_eta)?;
    let nu = crate::psi::dual_psi(psi)?;
    if beta == 0.0 {
        return Ok(BoundReport::feasible(Theorem::GlsDualPair, 0.0).with_note("beta = 0: independent fields"));
    }
    let r = fundamental(psi, beta.powf(-0.5))?;
    let value = 2.0 * norm_xi * norm_eta * (-2.0 * r.ln_value).exp();
    let general = gls_strong_bound(psi, &nu, beta, norm_xi, norm_eta)?;
    let mut rep = BoundReport::feasible(Theorem::GlsDualPair, value)
        .with_trace(Some(r.argmax_p), Some(conjugate_exponent(r.argmax_p)));
    rep.numeric_check = Some(general.value);
    Ok(rep)
}

fn uniform_common(
    psi: &PsiFunction,
    nu: &PsiFunction,
    alpha: f64,
    norm_xi: f64,
    norm_eta: f64,
    cross_check: bool,
) -> Result<BoundReport> {
    check_unit("alpha", alpha)?;
    check_norm("norm_xi", norm_xi)?;
    check_norm("norm_eta", norm_eta)?;
    if alpha == 0.0 {
        return Ok(BoundReport::feasible(Theorem::GlsUniform, 0.0).with_note("alpha = 0: independent fields"));
    }
    let Some(grid) = uniform_phi_grid(psi, nu, alpha, alpha)? else {
        return Ok(BoundReport::infeasible(
            Theorem::GlsUniform,
            "no exponent pair with 1/p + 1/q < 1 inside both supports",
        ));
    };
    let bound = |ln_phi: f64| 12.0 * alpha * norm_xi * norm_eta * (-ln_phi).exp();
    let mut best = grid;
    let mut rep_notes = Vec::new();
    let mut check = None;
    if cross_check {
        if let Some(theta) = uniform_phi_theta(psi, nu, alpha, alpha)? {
            let diff = ((theta.ln_value - grid.ln_value).exp() - 1.0).abs();
            if diff > ROUTE_TOLERANCE {
                rep_notes.push(format!("route disagreement: relative difference {diff:.3e}"));
            }
            check = Some(bound(theta.ln_value));
            if theta.ln_value > best.ln_value {
                best = theta;
            }
        } else {
            rep_notes.push("theta route found no finite value".to_string());
        }
    }
    let mut rep = BoundReport::feasible(Theorem::GlsUniform, bound(best.ln_value))
        .with_trace(Some(best.attained_at.0), Some(best.attained_at.1));
    rep.notes = rep_notes;
    rep.numeric_check = check;
    Ok(rep)
}

/// `12 alpha ||xi|| ||eta|| / Phi[psi, nu](alpha, alpha)` under alpha-mixing.
/// `Phi` is computed along both routes; the larger (tighter) value is used
/// and `numeric_check` carries the bound from the second route.
pub fn gls_uniform_bound(
    psi: &PsiFunction,
    nu: &PsiFunction,
    alpha: f64,
    norm_xi: f64,
    norm_eta: f64,
) -> Result<BoundReport> {
    uniform_common(psi, nu, alpha, norm_xi, norm_eta, true)
}

/// As [`gls_uniform_bound`] with the grid route only.
pub fn gls_uniform_bound_fast(
    psi: &PsiFunction,
    nu: &PsiFunction,
    alpha: f64,
    norm_xi: f64,
    norm_eta: f64,
) -> Result<BoundReport> {
    uniform_common(psi, nu, alpha, norm_xi, norm_eta, false)
}

/// `12 alpha ||xi|| ||eta|| / phi[psi](alpha)^2` for two variables in the
/// same GLS.
pub fn gls_identical_bound(psi: &PsiFunction, alpha: f64, norm_xi: f64, norm_eta: f64) -> Result<BoundReport> {
    check_unit("alpha", alpha)?;
    check_norm("norm_xi", norm_xi)?;
    check_norm("norm_eta", norm_eta)?;
    if alpha == 0.0 {
        return Ok(BoundReport::feasible(Theorem::GlsIdentical, 0.0).with_note("alpha = 0: independent fields"));
    }
    let r = fundamental(psi, alpha)?;
    let value = 12.0 * norm_xi * norm_eta * (alpha.ln() - 2.0 * r.ln_value).exp();
    Ok(BoundReport::feasible(Theorem::GlsIdentical, value).with_trace(Some(r.argmax_p), Some(r.argmax_p)))
}

/// Which pair of support types a factorization check falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorizationCase {
    InfiniteInfinite,
    FiniteFinite,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub alpha: f64,
    pub beta: f64,
    /// `Phi` over the triangle.
    pub lhs: f64,
    /// `phi[psi](alpha) phi[nu](beta)`, unconstrained.
    pub rhs: f64,
    pub holds: bool,
    pub case: FactorizationCase,
    /// Thresholds below which factorization is guaranteed, for `psi` and `nu`.
    #[serde(with = "crate::ext_real::option")]
    pub alpha_threshold: Option<f64>,
    #[serde(with = "crate::ext_real::option")]
    pub beta_threshold: Option<f64>,
    /// Unconstrained maximizing exponents.
    pub p0: f64,
    pub q0: f64,
    /// `g'` is monotone on a scan grid for both functions.
    pub derivative_monotone: bool,
    pub reason: Option<String>,
}

fn g_threshold(psi: &PsiFunction, x: f64) -> Option<f64> {
    g_prime(psi, x).ok().filter(|v| v.is_finite()).map(|v| (-v).exp())
}

fn g_prime_monotone(psi: &PsiFunction) -> bool {
    let Some(range) = optimize::EvalRange::from_support(&psi.support()) else {
        return false;
    };
    let (a, b) = (range.u_min(), range.u_max());
    if b <= a {
        return true;
    }
    let vals: Vec<f64> = (0..=64)
        .map(|k| g_prime(psi, a + (b - a) * k as f64 / 64.0).unwrap_or(f64::NAN))
        .filter(|v| v.is_finite())
        .collect();
    let dec = vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
    let inc = vals.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9) - 1e-12);
    dec || inc
}

/// Compares `Phi[psi, nu](alpha, beta)` with `phi[psi](alpha) phi[nu](beta)`.
/// The left side never exceeds the right; equality holds when the
/// unconstrained maximizers already satisfy `1/p0 + 1/q0 < 1`.
pub fn factorization_check(psi: &PsiFunction, nu: &PsiFunction, alpha: f64, beta: f64) -> Result<FactorizationReport> {
    for (name, x) in [("alpha", alpha), ("beta", beta)] {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!("{name} must lie in (0, 1), got {x}")));
        }
    }
    let (b1, b2) = (psi.support_bound(), nu.support_bound());
    let case = match (b1.is_finite(), b2.is_finite()) {
        (false, false) => FactorizationCase::InfiniteInfinite,
        (true, true) => FactorizationCase::FiniteFinite,
        _ => FactorizationCase::Mixed,
    };
    let (alpha_threshold, beta_threshold) = match case {
        FactorizationCase::InfiniteInfinite => {
            let x = (-1.0f64).exp();
            (g_threshold(psi, x), g_threshold(nu, x))
        }
        FactorizationCase::FiniteFinite => {
            (g_threshold(psi, (b1 + 1.0) / (3.0 * b1)), g_threshold(nu, (b2 + 1.0) / (3.0 * b2)))
        }
        FactorizationCase::Mixed => {
            if b2.is_finite() {
                (g_threshold(psi, (b2 - 1.0) / (3.0 * b2)), g_threshold(nu, (b2 + 1.0) / (2.0 * b2)))
            } else {
                (g_threshold(psi, (b1 + 1.0) / (2.0 * b1)), g_threshold(nu, (b1 - 1.0) / (3.0 * b1)))
            }
        }
    };
    let fa = fundamental(psi, alpha)?;
    let fb = fundamental(nu, beta)?;
    let rhs = (fa.ln_value + fb.ln_value).exp();
    let lhs = uniform_phi_grid(psi, nu, alpha, beta)?.map_or(0.0, |m| m.value);
    let derivative_monotone = g_prime_monotone(psi) && g_prime_monotone(nu);
    let mut reason = None;
    let holds = if case == FactorizationCase::FiniteFinite && 1.0 / b1 + 1.0 / b2 >= 1.0 {
        reason = Some("supports too small".to_string());
        false
    } else {
        let ok = ((lhs - rhs) / rhs).abs() <= FACTORIZATION_TOLERANCE;
        if !ok {
            reason = Some(format!(
                "unconstrained maximizers p0 = {}, q0 = {} give 1/p0 + 1/q0 = {}",
                fa.argmax_p,
                fb.argmax_p,
                1.0 / fa.argmax_p + 1.0 / fb.argmax_p
            ));
        }
        ok
    };
    Ok(FactorizationReport {
        alpha,
        beta,
        lhs,
        rhs,
        holds,
        case,
        alpha_threshold,
        beta_threshold,
        p0: fa.argmax_p,
        q0: fb.argmax_p,
        derivative_monotone,
        reason,
    })
}

type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A bound kernel `h(p, q)` with `|Cov| <= h(p, q) |xi|_p |eta|_q` on its domain.
#[derive(Clone)]
pub enum Kernel {
    /// `12 alpha^(1 - 1/p - 1/q)`.
    Davydov {
        alpha: f64,
    },
    /// `2 beta^(1/p)`.
    Ibragimov {
        beta: f64,
    },
    /// `2`.
    Holder,
    Custom(KernelFn),
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Davydov { alpha } => write!(f, "Davydov {{ alpha: {alpha} }}"),
            Kernel::Ibragimov { beta } => write!(f, "Ibragimov {{ beta: {beta} }}"),
            Kernel::Holder => write!(f, "Holder"),
            Kernel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Kernel {
    pub fn custom(h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Kernel::Custom(Arc::new(h))
    }

    fn ln_h(&self, p: f64, q: f64) -> f64 {
        match self {
            Kernel::Davydov { alpha } => {
                let e = 1.0 - 1.0 / p - 1.0 / q;
                if *alpha == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    12f64.ln() + e * alpha.ln()
                }
            }
            Kernel::Ibragimov { beta } => {
                if p.is_infinite() {
                    2f64.ln()
                } else if *beta == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    2f64.ln() + beta.ln() / p
                }
            }
            Kernel::Holder => 2f64.ln(),
            Kernel::Custom(h) => {
                let v = h(p, q);
                if v >= 0.0 {
                    v.ln()
                } else {
                    f64::NAN
                }
            }
        }
    }
}

/// Exponent domain for [`generic_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundDomain {
    /// `1/p + 1/q < 1`.
    Triangle,
    /// All `p, q >= 1`.
    Rectangle,
    /// `q = p/(p-1)`.
    ConjugateLine,
    /// `[p_lo, p_hi] x [q_lo, q_hi]`.
    Custom { p_lo: f64, p_hi: f64, q_lo: f64, q_hi: f64 },
}

/// `inf over D of h(p, q) psi(p) nu(q)`, times the norms.
pub fn generic_bound(
    kernel: &Kernel,
    psi: &PsiFunction,
    nu: &PsiFunction,
    domain: BoundDomain,
    norm_xi: f64,
    norm_eta: f64,
) -> Result<BoundReport> {
    check_norm("norm_xi", norm_xi)?;
    check_norm("norm_eta", norm_eta)?;
    let neg = |p: f64, q: f64| {
        let l = kernel.ln_h(p, q);
        if l.is_nan() {
            return f64::NAN;
        }
        -(l + psi.ln_eval(p) + nu.ln_eval(q))
    };
    let scale = norm_xi * norm_eta;
    let found = match domain {
        BoundDomain::ConjugateLine => {
            let sup = psi.support().intersect(&nu.support().conjugate_preimage());
            optimize::maximize_p(&sup, DEFAULT_GRID_2D * 4, |p| neg(p, conjugate_exponent(p)))
                .map(|m| (m.p, conjugate_exponent(m.p), m.value))
        }
        BoundDomain::Triangle | BoundDomain::Rectangle | BoundDomain::Custom { .. } => {
            let (sp, sq, region) = match domain {
                BoundDomain::Triangle => (psi.support(), nu.support(), Region::Triangle { margin: TRIANGLE_MARGIN }),
                BoundDomain::Rectangle => (psi.support(), nu.support(), Region::Rectangle),
                BoundDomain::Custom { p_lo, p_hi, q_lo, q_hi } => {
                    if !(p_lo >= 1.0 && q_lo >= 1.0 && p_lo <= p_hi && q_lo <= q_hi) {
                        return Err(Error::domain("custom domain needs 1 <= lo <= hi on both axes"));
                    }
                    (
                        psi.support().intersect(&Support::new(p_lo, true, p_hi, true)),
                        nu.support().intersect(&Support::new(q_lo, true, q_hi, true)),
                        Region::Rectangle,
                    )
                }
                BoundDomain::ConjugateLine => unreachable!(),
            };
            if sp.is_empty() || sq.is_empty() {
                None
            } else {
                optimize::maximize_2d(&sp, &sq, region, GENERIC_GRID, neg).map(|m| (m.p, m.q, m.value))
            }
        }
    };
    match found {
        Some((p, q, v)) => {
            let value = if v == f64::INFINITY || scale == 0.0 { 0.0 } else { scale * (-v).exp() };
            Ok(BoundReport::feasible(Theorem::Generic, value).with_trace(Some(p), Some(q)))
        }
        None => Ok(BoundReport::infeasible(Theorem::Generic, "empty domain or kernel infinite on it")),
    }
}
