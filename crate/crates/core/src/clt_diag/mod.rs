//! Summability diagnostics for the partial-sum variance of stationary
//! sequences under alpha- and beta-mixing.
//!
//! `y(k) = alpha(k) / phi[psi](alpha(k))^2` and
//! `z(k) = 1 / phi[zeta[psi, psi]](1 / beta(k))`; summable `y` or `z` keeps
//! `Sigma = lim Var(n^(-1/2) S_n)` finite. Verdicts on finite horizons are
//! evidence, not proofs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::fundamental;
use crate::psi::{product_zeta, PsiFunction};

mod model;

pub use model::{
    exact_sigma_n, m_dependent_profile, markov_mixing_profile, natural_function, read_samples, sigma_n_estimate,
    Innovation, SequenceModel, SigmaRow,
};

/// Where a mixing profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    /// Supplied by the caller.
    User,
    /// Exact for single-coordinate fields; a lower bound for past/future fields.
    SingleCoordinate,
    /// Worst-case values where exact coefficients are unavailable.
    Conservative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltProfile {
    /// `alpha(k)` for `k = 1..=k_max`.
    pub alpha_seq: Vec<f64>,
    pub beta_seq: Vec<f64>,
    pub psi_gamma: PsiFunction,
    pub k_max: usize,
    pub source: ProfileSource,
}

impl CltProfile {
    pub fn new(alpha_seq: Vec<f64>, beta_seq: Vec<f64>, psi_gamma: PsiFunction, source: ProfileSource) -> Result<Self> {
        let k_max = alpha_seq.len();
        if k_max < 2 {
            return Err(Error::invalid("profile horizon K must be >= 2"));
        }
        if beta_seq.len() != k_max {
            return Err(Error::invalid("alpha and beta sequences differ in length"));
        }
        if let Some(x) = alpha_seq.iter().chain(&beta_seq).find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::domain(format!("mixing coefficients must lie in [0, 1], got {x}")));
        }
        psi_gamma.validate()?;
        Ok(CltProfile { alpha_seq, beta_seq, psi_gamma, k_max, source })
    }
}

/// A mixing profile given in closed form or as a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Table {
        alpha: Vec<f64>,
        beta: Vec<f64>,
    },
    /// `alpha(k) = c_alpha rho^k`, `beta(k) = c_beta rho^k`.
    Geometric {
        c_alpha: f64,
        c_beta: f64,
        rho: f64,
    },
    /// `alpha(k) = c_alpha k^(-exponent)`, `beta(k) = c_beta k^(-exponent)`.
    Polynomial {
        c_alpha: f64,
        c_beta: f64,
        exponent: f64,
    },
}

impl ProfileSpec {
    pub fn materialize(&self, psi_gamma: PsiFunction, k_max: usize) -> Result<CltProfile> {
        let clamp = |x: f64| x.clamp(0.0, 1.0);
        let (a, b) = match self {
            ProfileSpec::Table { alpha, beta } => {
                if alpha.len() < k_max || beta.len() < k_max {
                    return Err(Error::invalid(format!("profile table shorter than K = {k_max}")));
                }
                (alpha[..k_max].to_vec(), beta[..k_max].to_vec())
            }
            ProfileSpec::Geometric { c_alpha, c_beta, rho } => {
                if !(0.0..1.0).contains(rho) {
                    return Err(Error::domain(format!("rho must lie in [0, 1), got {rho}")));
                }
                (
                    (1..=k_max).map(|k| clamp(c_alpha * rho.powi(k as i32))).collect(),
                    (1..=k_max).map(|k| clamp(c_beta * rho.powi(k as i32))).collect(),
                )
            }
            ProfileSpec::Polynomial { c_alpha, c_beta, exponent } => (
                (1..=k_max).map(|k| clamp(c_alpha * (k as f64).powf(-exponent))).collect(),
                (1..=k_max).map(|k| clamp(c_beta * (k as f64).powf(-exponent))).collect(),
            ),
        };
        CltProfile::new(a, b, psi_gamma, ProfileSource::User)
    }
}

fn require_nontrivial(psi: &PsiFunction) -> Result<()> {
    let s = psi.support();
    if !(s.hi > 1.0) {
        return Err(Error::TrivialNatural);
    }
    Ok(())
}

/// `y(k)` for `k = 2..=K`; zero where `alpha(k) = 0`.
pub fn y_sequence(profile: &CltProfile) -> Result<Vec<f64>> {
    require_nontrivial(&profile.psi_gamma)?;
    let mut memo: Option<(f64, f64)> = None;
    profile.alpha_seq[1..]
        .iter()
        .map(|&a| {
            if a == 0.0 {
                return Ok(0.0);
            }
            if let Some((ma, mv)) = memo {
                if ma == a {
                    return Ok(mv);
                }
            }
            let r = fundamental(&profile.psi_gamma, a)?;
            let v = (a.ln() - 2.0 * r.ln_value).exp();
            memo = Some((a, v));
            Ok(v)
        })
        .collect()
}

/// `z(k)` for `k = 2..=K`; zero where `beta(k) = 0`.
pub fn z_sequence(profile: &CltProfile) -> Result<Vec<f64>> {
    require_nontrivial(&profile.psi_gamma)?;
    let zeta = product_zeta(&profile.psi_gamma, &profile.psi_gamma);
    let mut memo: Option<(f64, f64)> = None;
    profile.beta_seq[1..]
        .iter()
        .map(|&b| {
            // below ~1e-308 the reciprocal overflows and z(k) is far below f64 resolution of the sum
            if b == 0.0 || !(1.0 / b).is_finite() {
                return Ok(0.0);
            }
            if let Some((mb, mv)) = memo {
                if mb == b {
                    return Ok(mv);
                }
            }
            let r = fundamental(&zeta, 1.0 / b).map_err(|e| match e {
                Error::EmptySupport => Error::Unsupported("zeta[psi, psi] is infinite everywhere".into()),
                e => e,
            })?;
            let v = (-r.ln_value).exp();
            memo = Some((b, v));
            Ok(v)
        })
        .collect()
}

/// Smallest `k*` with `seq` non-increasing from `k*` on (`seq[0]` is `k = 2`).
pub fn eventually_nonincreasing_from(seq: &[f64]) -> Option<usize> {
    if seq.is_empty() {
        return None;
    }
    let mut start = seq.len() - 1;
    while start > 0 && seq[start - 1] >= seq[start] {
        start -= 1;
    }
    Some(start + 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SummableEvidence,
    DivergentEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityReport {
    pub k_max: usize,
    /// `S_K = sum_(k=2)^K seq(k)`.
    pub partial_sum: f64,
    pub half_sum: f64,
    /// `(S_K - S_(K/2)) / S_(K/2)`.
    #[serde(with = "crate::ext_real")]
    pub tail_ratio: f64,
    /// Sums over dyadic blocks `[2^j, 2^(j+1))`.
    pub block_sums: Vec<f64>,
    pub verdict: Verdict,
    pub note: &'static str,
}

const SUMMABLE_BLOCK_RATIO: f64 = 0.6;
const DIVERGENT_BLOCK_RATIO: f64 = 0.95;

/// Verdict from dyadic block sums `D_j` of `seq` (`seq[0]` is `k = 2`):
/// decay of `D_(j+1)/D_j` to at most 0.6 over the last three complete
/// blocks, or blocks below the resolution of the partial sum, is summable
/// evidence; ratios all at least 0.95 is divergent evidence; anything else
/// is inconclusive.
pub fn summability_report(seq: &[f64]) -> Result<SummabilityReport> {
    let k_max = seq.len() + 1;
    if k_max < 16 {
        return Err(Error::invalid(format!("summability needs K >= 16, got {k_max}")));
    }
    if let Some(x) = seq.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::domain(format!("sequence entries must be >= 0, got {x}")));
    }
    let at = |k: usize| seq[k - 2];
    let sum_to = |n: usize| -> f64 { (2..=n).map(at).sum() };
    let partial_sum = sum_to(k_max);
    let half_sum = sum_to(k_max / 2);
    let tail_ratio = if half_sum > 0.0 {
        (partial_sum - half_sum) / half_sum
    } else if partial_sum == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let mut block_sums = Vec::new();
    let mut j = 1;
    while (1usize << (j + 1)) - 1 <= k_max {
        block_sums.push(((1usize << j)..(1usize << (j + 1))).map(at).sum());
        j += 1;
    }
    let tail = &block_sums[block_sums.len().saturating_sub(4)..];
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                w[1] / w[0]
            } else if w[1] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let verdict =
        if tail.iter().all(|&d| d <= f64::EPSILON * partial_sum) || ratios.iter().all(|&r| r <= SUMMABLE_BLOCK_RATIO) {
            Verdict::SummableEvidence
        } else if ratios.iter().all(|&r| r >= DIVERGENT_BLOCK_RATIO) {
            Verdict::DivergentEvidence
        } else {
            Verdict::Inconclusive
        };
    Ok(SummabilityReport {
        k_max,
        partial_sum,
        half_sum,
        tail_ratio,
        block_sums,
        verdict,
        note: "finite horizon: evidence only, not a proof of summability",
    })
}
