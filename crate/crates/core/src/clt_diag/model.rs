//! Sequence models: simulation of `Var(n^(-1/2) S_n)`, exact values from
//! autocovariances, natural functions and mixing profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{CltProfile, ProfileSource};
use crate::error::{Error, Result};
use crate::finite_oracle::mixing_from_deviation;
use crate::psi::{natural_from_moments, MomentTable, Provenance, PsiFunction};

const MAX_MARKOV_STATES: usize = 8;
const STOCHASTIC_TOLERANCE: f64 = 1e-12;
const NATURAL_KNOTS: usize = 97;
const NATURAL_P_MAX: f64 = 1e6;
const MAX_EXACT_RADEMACHER_TERMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Innovation {
    Gaussian,
    /// `+-1` with equal probability.
    Rademacher,
    /// Uniform on `[-sqrt 3, sqrt 3]` (unit variance).
    Uniform,
}

impl Innovation {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Innovation::Gaussian => rng.sample(StandardNormal),
            Innovation::Rademacher => {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            Innovation::Uniform => rng.gen_range(-3f64.sqrt()..3f64.sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceModel {
    /// `gamma(i) = sum_j weights[j] eps(i + j)`; `m = weights.len() - 1`.
    MDependent { weights: Vec<f64>, innovation: Innovation },
    /// Stationary chain with `transition[a][b] = P(b | a)`, observed through
    /// `values[state]`, centered by the stationary mean.
    FiniteMarkov { transition: Vec<Vec<f64>>, values: Vec<f64> },
    /// A single observed path, read from a whitespace- or comma-separated file.
    UserSamples { path: String },
}

impl SequenceModel {
    pub fn from_json(s: &str) -> Result<Self> {
        let m: SequenceModel = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceModel::MDependent { weights, .. } => {
                if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::invalid("m_dependent needs a non-empty list of finite weights"));
                }
            }
            SequenceModel::FiniteMarkov { transition, values } => {
                stationary(transition)?;
                if values.len() != transition.len() {
                    return Err(Error::invalid("one value per Markov state required"));
                }
            }
            SequenceModel::UserSamples { .. } => {}
        }
        Ok(())
    }
}

fn check_stochastic(p: &[Vec<f64>]) -> Result<()> {
    let s = p.len();
    if s == 0 || s > MAX_MARKOV_STATES {
        return Err(Error::invalid(format!("Markov state count must lie in [1, {MAX_MARKOV_STATES}], got {s}")));
    }
    for row in p {
        if row.len() != s || row.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::invalid("transition matrix must be square and non-negative"));
        }
        let t: f64 = row.iter().sum();
        if (t - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(Error::invalid(format!("transition row sums to {t}, not 1")));
        }
    }
    Ok(())
}

/// Stationary law by Gaussian elimination on `pi (P - I) = 0`, `sum pi = 1`.
fn stationary(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_stochastic(p)?;
    let s = p.len();
    // rows: equations; columns: pi entries plus right-hand side
    let mut a = vec![vec![0.0; s + 1]; s];
    for (eq, row) in a.iter_mut().enumerate().take(s - 1) {
        for (j, x) in row.iter_mut().enumerate().take(s) {
            *x = p[j][eq] - if j == eq { 1.0 } else { 0.0 };
        }
    }
    a[s - 1] = vec![1.0; s + 1];
    for c in 0..s {
        let piv = (c..s).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[piv][c].abs() < 1e-14 {
            return Err(Error::invalid("transition matrix has no unique stationary law"));
        }
        a.swap(c, piv);
        for r in 0..s {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=s {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let pi: Vec<f64> = (0..s).map(|i| (a[i][s] / a[i][i]).max(0.0)).collect();
    let t: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|x| x / t).collect())
}

/// Reads numbers separated by whitespace or commas; a non-numeric first
/// token is taken as a header.
pub fn read_samples(path: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let mut out = Vec::new();
    for (i, tok) in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).enumerate() {
        match tok.parse::<f64>() {
            Ok(x) if x.is_finite() => out.push(x),
            _ if i == 0 => {}
            _ => return Err(Error::Parse(format!("{path}: not a number: {tok}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::invalid(format!("{path}: no samples")));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRow {
    pub n: usize,
    /// Mean of `S(n) = n^(-1/2) sum gamma(i)`.
    pub mean: f64,
    /// Estimate of `Sigma(n) = E S(n)^2`.
    pub sigma: f64,
    pub standard_error: f64,
    pub replications: usize,
    /// Exact `Sigma(n)` when the model admits it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
}

fn summarize(n: usize, s: &[f64], exact: Option<f64>) -> SigmaRow {
    let r = s.len() as f64;
    let mean = s.iter().sum::<f64>() / r;
    let sq: Vec<f64> = s.iter().map(|x| x * x).collect();
    let sigma = sq.iter().sum::<f64>() / r;
    let var = if s.len() > 1 { sq.iter().map(|x| (x - sigma).powi(2)).sum::<f64>() / (r - 1.0) } else { f64::NAN };
    SigmaRow { n, mean, sigma, standard_error: (var / r).sqrt(), replications: s.len(), exact }
}

/// Replication `rep` at grid position `idx` uses ChaCha8 seeded with `seed`
/// on stream `(idx << 32) | rep`.
fn path_rng(seed: u64, idx: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((idx as u64) << 32) | rep as u64);
    rng
}

fn simulate_ma(weights: &[f64], innovation: Innovation, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let m = weights.len() - 1;
    let eps: Vec<f64> = (0..n + m).map(|_| innovation.draw(rng)).collect();
    // sum_i sum_j w_j eps(i + j) = sum_t eps(t) * (sum of w_j with 0 <= t - j < n)
    let mut total = 0.0;
    for (t, e) in eps.iter().enumerate() {
        let lo = t.saturating_sub(n - 1);
        let hi = t.min(m);
        if lo <= hi {
            total += e * weights[lo..=hi].iter().sum::<f64>();
        }
    }
    total / (n as f64).sqrt()
}

fn simulate_markov(p: &[Vec<f64>], pi: &[f64], centered: &[f64], n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let pick = |w: &[f64], rng: &mut ChaCha8Rng| {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, x) in w.iter().enumerate() {
            acc += x;
            if u < acc {
                return i;
            }
        }
        w.len() - 1
    };
    let mut state = pick(pi, rng);
    let mut total = centered[state];
    for _ in 1..n {
        state = pick(&p[state], rng);
        total += centered[state];
    }
    total / (n as f64).sqrt()
}

/// Monte Carlo `Sigma(n)` with `reps` independent paths per `n`. User
/// samples are cut into non-overlapping blocks of length `n` instead.
pub fn sigma_n_estimate(model: &SequenceModel, n_grid: &[usize], reps: usize, seed: u64) -> Result<Vec<SigmaRow>> {
    model.validate()?;
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::invalid("n grid must be non-empty and positive"));
    }
    match model {
        SequenceModel::UserSamples { path } => {
            let xs = read_samples(path)?;
            let mu = xs.iter().sum::<f64>() / xs.len() as f64;
            n_grid
                .iter()
                .map(|&n| {
                    let blocks: Vec<f64> =
                        xs.chunks_exact(n).map(|c| c.iter().map(|x| x - mu).sum::<f64>() / (n as f64).sqrt()).collect();
                    if blocks.len() < 2 {
                        return Err(Error::invalid(format!("path too short for two blocks of length {n}")));
                    }
                    Ok(summarize(n, &blocks, None))
                })
                .collect()
        }
        _ => {
            if reps < 2 {
                return Err(Error::invalid("at least two replications are needed"));
            }
            let markov = match model {
                SequenceModel::FiniteMarkov { transition, values } => {
                    let pi = stationary(transition)?;
                    let mu: f64 = pi.iter().zip(values).map(|(a, b)| a * b).sum();
                    Some((pi, values.iter().map(|v| v - mu).collect::<Vec<f64>>()))
                }
                _ => None,
            };
            n_grid
                .iter()
                .enumerate()
                .map(|(idx, &n)| {
                    let s: Vec<f64> = crate::parallel::install(|| {
                        (0..reps)
                            .into_par_iter()
                            .map(|rep| {
                                let mut rng = path_rng(seed, idx, rep);
                                match (model, &markov) {
                                    (SequenceModel::MDependent { weights, innovation }, _) => {
                                        simulate_ma(weights, *innovation, n, &mut rng)
                                    }
                                    (SequenceModel::FiniteMarkov { transition, .. }, Some((pi, c))) => {
                                        simulate_markov(transition, pi, c, n, &mut rng)
                                    }
                                    _ => unreachable!(),
                                }
                            })
                            .collect()
                    });
                    Ok(summarize(n, &s, exact_sigma_n(model, n).ok()))
                })
                .collect()
        }
    }
}

/// `Sigma(n) = r(0) + 2 sum_(h=1)^(n-1) (1 - h/n) r(h)` from the exact
/// autocovariances.
pub fn exact_sigma_n(model: &SequenceModel, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let r: Vec<f64> = match model {
        SequenceModel::MDependent { weights, .. } => {
            (0..weights.len().min(n)).map(|h| weights.iter().zip(&weights[h..]).map(|(a, b)| a * b).sum()).collect()
        }
        SequenceModel::FiniteMarkov { transition, values } => {
            let pi = stationary(transition)?;
            let mu: f64 = pi.iter().zip(values).map(|(a, b)| a * b).sum();
            let c: Vec<f64> = values.iter().map(|v| v - mu).collect();
            let mut u = c.clone();
            let mut r = Vec::with_capacity(n);
            for h in 0..n {
                if h > 0 {
                    u = transition.iter().map(|row| row.iter().zip(&u).map(|(a, b)| a * b).sum()).collect();
                }
                r.push(pi.iter().zip(&c).zip(&u).map(|((p, x), y)| p * x * y).sum());
            }
            r
        }
        SequenceModel::UserSamples { .. } => {
            return Err(Error::Unsupported("no exact variance for user samples".into()));
        }
    };
    let nf = n as f64;
    Ok(r[0] + 2.0 * r.iter().enumerate().skip(1).map(|(h, x)| (1.0 - h as f64 / nf) * x).sum::<f64>())
}

/// Geometric knots up to `1e6` merged with the integers `2..=16`.
fn knot_grid() -> Vec<f64> {
    let top = NATURAL_P_MAX.ln();
    let mut g: Vec<f64> = (0..NATURAL_KNOTS).map(|i| (top * i as f64 / (NATURAL_KNOTS - 1) as f64).exp()).collect();
    g.extend((2..=16).map(f64::from));
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * *b);
    g
}

fn weighted_lp(probs: &[f64], values: &[f64], p: f64) -> f64 {
    crate::finite_oracle::lp_norm(probs, values, p)
}

/// The natural function `p -> |gamma(0)|_p` of the model, as a table on a
/// geometric grid of exponents up to `1e6`. Exact for Gaussian and
/// Rademacher innovations (up to 20 terms) and for Markov chains; a
/// Minkowski upper bound for uniform innovations.
pub fn natural_function(model: &SequenceModel, seed: Option<u64>) -> Result<(PsiFunction, bool)> {
    model.validate()?;
    let grid = knot_grid();
    let (entries, exact): (Vec<(f64, f64)>, bool) = match model {
        SequenceModel::MDependent { weights, innovation } => match innovation {
            Innovation::Gaussian => {
                let sd = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
                let ln_abs_moment =
                    |p: f64| (p / 2.0) * 2f64.ln() + ln_gamma((p + 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln();
                (grid.iter().map(|&p| (p, sd * (ln_abs_moment(p) / p).exp())).collect(), true)
            }
            Innovation::Rademacher if weights.len() <= MAX_EXACT_RADEMACHER_TERMS => {
                let t = weights.len();
                let vals: Vec<f64> = (0u32..1 << t)
                    .map(|mask| weights.iter().enumerate().map(|(j, w)| if mask >> j & 1 == 1 { *w } else { -w }).sum())
                    .collect();
                let probs = vec![1.0 / vals.len() as f64; vals.len()];
                (grid.iter().map(|&p| (p, weighted_lp(&probs, &vals, p))).collect(), true)
            }
            _ => {
                let l1: f64 = weights.iter().map(|w| w.abs()).sum();
                let single = |p: f64| match innovation {
                    Innovation::Uniform => 3f64.sqrt() * (1.0 / (p + 1.0)).powf(1.0 / p),
                    _ => 1.0,
                };
                (grid.iter().map(|&p| (p, l1 * single(p))).collect(), false)
            }
        },
        SequenceModel::FiniteMarkov { transition, values } => {
            let pi = stationary(transition)?;
            let mu: f64 = pi.iter().zip(values).map(|(a, b)| a * b).sum();
            let c: Vec<f64> = values.iter().map(|v| v - mu).collect();
            (grid.iter().map(|&p| (p, weighted_lp(&pi, &c, p))).collect(), true)
        }
        SequenceModel::UserSamples { path } => {
            let xs = read_samples(path)?;
            let mu = xs.iter().sum::<f64>() / xs.len() as f64;
            let centered: Vec<f64> = xs.iter().map(|x| x - mu).collect();
            let table = MomentTable::from_samples(&centered, &grid[..grid.len() / 2], seed)?;
            return Ok((natural_from_moments(&table)?, false));
        }
    };
    let table = MomentTable::new(monotone(entries), Provenance::Analytic)?;
    Ok((natural_from_moments(&table)?, exact))
}

/// Removes rounding dips so the table is non-decreasing.
fn monotone(mut entries: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    for i in 1..entries.len() {
        if entries[i].1 < entries[i - 1].1 {
            entries[i].1 = entries[i - 1].1;
        }
    }
    entries
}

/// `alpha(k)`, `beta(k)` for `sigma(gamma(0))` against `sigma(gamma(k))` on a
/// stationary chain, from the deviation `pi_a ((P - Pi)^k)_(ab)` of the
/// joint law from independence. States with equal values share a block.
pub fn markov_mixing_profile(model: &SequenceModel, k_max: usize, psi_gamma: PsiFunction) -> Result<CltProfile> {
    let SequenceModel::FiniteMarkov { transition, values } = model else {
        return Err(Error::invalid("markov_mixing_profile needs a finite_markov model"));
    };
    model.validate()?;
    let s = transition.len();
    let pi = stationary(transition)?;
    // blocks by distinct value
    let mut distinct: Vec<f64> = Vec::new();
    let block: Vec<usize> = values
        .iter()
        .map(|v| match distinct.iter().position(|d| d == v) {
            Some(i) => i,
            None => {
                distinct.push(*v);
                distinct.len() - 1
            }
        })
        .collect();
    let kb = distinct.len();
    let mut pf = vec![0.0; kb];
    for a in 0..s {
        pf[block[a]] += pi[a];
    }
    let d: Vec<Vec<f64>> = (0..s).map(|a| (0..s).map(|b| transition[a][b] - pi[b]).collect()).collect();
    let mut dk = d.clone();
    let (mut alpha, mut beta) = (Vec::with_capacity(k_max), Vec::with_capacity(k_max));
    for k in 1..=k_max {
        if k > 1 {
            dk = (0..s).map(|a| (0..s).map(|b| (0..s).map(|c| dk[a][c] * d[c][b]).sum()).collect()).collect();
        }
        let mut dev = vec![vec![0.0; kb]; kb];
        for a in 0..s {
            for b in 0..s {
                dev[block[a]][block[b]] += pi[a] * dk[a][b];
            }
        }
        let (x, y) = mixing_from_deviation(&pf, &dev)?;
        alpha.push(x);
        beta.push(y);
    }
    CltProfile::new(alpha, beta, psi_gamma, ProfileSource::SingleCoordinate)
}

/// `alpha(k) = beta(k) = 0` for `k > m`; the worst-case `1/4` and `1` below.
pub fn m_dependent_profile(weights: &[f64], k_max: usize, psi_gamma: PsiFunction) -> Result<CltProfile> {
    let m = weights.len() - 1;
    let alpha = (1..=k_max).map(|k| if k <= m { 0.25 } else { 0.0 }).collect();
    let beta = (1..=k_max).map(|k| if k <= m { 1.0 } else { 0.0 }).collect();
    CltProfile::new(alpha, beta, psi_gamma, ProfileSource::Conservative)
}
