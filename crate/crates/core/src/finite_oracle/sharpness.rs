//! Random search for instances with `F = G` that make
//! `|Cov| / (alpha^(1 - 1/p - 1/q) |xi|_p |eta|_q)` large.

use rand::Rng;
use serde::Serialize;

use super::campaign::{instance_rng, random_partition, random_var};
use super::{alpha_coefficient, exact_cov, lp_norm, FiniteProbSpace, RandomVar, SigmaField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub probs: Vec<f64>,
    pub blocks: Vec<usize>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub alpha: f64,
    pub cov: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessResult {
    pub p: f64,
    pub q: f64,
    pub best_ratio: f64,
    pub witness: Witness,
    pub evaluated: usize,
    /// Candidates with `alpha = 0`, for which the ratio is undefined.
    pub skipped_degenerate: usize,
}

fn evaluate(
    space: &FiniteProbSpace,
    f: &SigmaField,
    xi: &RandomVar,
    eta: &RandomVar,
    p: f64,
    q: f64,
) -> Option<Witness> {
    let alpha = alpha_coefficient(space, f, f).ok()?;
    if alpha == 0.0 {
        return None;
    }
    let cov = exact_cov(space, xi, eta).ok()?;
    let expo = 1.0 - 1.0 / p - 1.0 / q;
    let denom = alpha.powf(expo) * lp_norm(space.probs(), &xi.values, p) * lp_norm(space.probs(), &eta.values, q);
    let ratio = if denom > 0.0 { cov.abs() / denom } else { 0.0 };
    Some(Witness {
        probs: space.probs().to_vec(),
        blocks: f.blocks().to_vec(),
        xi: xi.values.clone(),
        eta: eta.values.clone(),
        alpha,
        cov,
        ratio,
    })
}

/// Starts from the fair-coin Rademacher witness (`xi = eta = +-1`, ratio
/// `4^(1 - 1/p - 1/q)`), then spends `budget` random `F = G` candidates,
/// half fresh and half perturbations of the incumbent.
pub fn sharpness_probe(
    p: f64,
    q: f64,
    budget: usize,
    seed: u64,
    max_atoms: usize,
    max_blocks: usize,
) -> Result<SharpnessResult> {
    if !(p > 1.0 && q > 1.0 && 1.0 / p + 1.0 / q < 1.0) {
        return Err(Error::domain(format!("need 1/p + 1/q < 1, got p = {p}, q = {q}")));
    }
    if !(2..=16).contains(&max_atoms) || !(1..=super::MAX_BLOCKS_CAP).contains(&max_blocks) {
        return Err(Error::invalid("max_atoms must lie in [2, 16] and max_blocks in [1, 12]"));
    }
    let coin = FiniteProbSpace::new(vec![0.5, 0.5])?;
    let field = SigmaField::discrete(2);
    let rad = RandomVar::new(vec![-1.0, 1.0]);
    let mut best = evaluate(&coin, &field, &rad, &rad, p, q).expect("coin field has alpha = 1/4");
    let mut skipped = 0;
    for i in 0..budget {
        let mut rng = instance_rng(seed, i);
        let candidate = if i % 2 == 0 {
            let n = rng.gen_range(2..=max_atoms);
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let space = FiniteProbSpace::new(w)?;
            let f = random_partition(&mut rng, n, max_blocks);
            let xi = random_var(&mut rng, &space, &f);
            let eta = if rng.gen_bool(0.5) { xi.clone() } else { random_var(&mut rng, &space, &f) };
            evaluate(&space, &f, &xi, &eta, p, q)
        } else {
            let mut w: Vec<f64> = best.probs.iter().map(|x| x * rng.gen_range(0.8..1.25)).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let space = FiniteProbSpace::new(w)?;
            let f = SigmaField::new(best.blocks.clone())?;
            let jitter = |vals: &[f64], rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                let mut per_block = vec![None; f.block_count()];
                vals.iter()
                    .zip(f.blocks())
                    .map(|(v, &b)| *per_block[b].get_or_insert_with(|| v + rng.gen_range(-0.1..0.1)))
                    .collect()
            };
            let xi = RandomVar::new(jitter(&best.xi, &mut rng));
            let eta = if best.xi == best.eta { xi.clone() } else { RandomVar::new(jitter(&best.eta, &mut rng)) };
            evaluate(&space, &f, &xi, &eta, p, q)
        };
        match candidate {
            None => skipped += 1,
            Some(c) if c.ratio > best.ratio => best = c,
            Some(_) => {}
        }
    }
    Ok(SharpnessResult { p, q, best_ratio: best.ratio, witness: best, evaluated: budget, skipped_degenerate: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_witness_ratio() {
        let r = sharpness_probe(4.0, 4.0, 0, 1, 6, 4).unwrap();
        assert!((r.best_ratio - 2.0).abs() < 1e-12);
        // exponent near zero: ratio near 1; exponent near one: ratio near 4
        let r = sharpness_probe(1e6, 1e6, 0, 1, 6, 4).unwrap();
        assert!((r.best_ratio - 4.0).abs() < 1e-4);
    }

    #[test]
    fn search_never_goes_below_witness() {
        let r = sharpness_probe(4.0, 4.0, 400, 3, 6, 4).unwrap();
        assert!(r.best_ratio >= 2.0);
        assert!(r.best_ratio.is_finite());
        assert!(sharpness_probe(2.0, 2.0, 10, 1, 6, 4).is_err());
    }
}
