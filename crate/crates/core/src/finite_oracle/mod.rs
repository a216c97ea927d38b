//! Exact ground truth on finite probability spaces.
//!
//! Sigma-fields are partitions of the atoms into blocks; an event of the
//! field is a union of blocks, i.e. a bitmask over block ids. Mixing
//! coefficients are exact maxima over all event pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod campaign;
mod sharpness;

pub use campaign::{
    default_families, verify_campaign, CampaignConfig, CampaignReport, IndependenceSummary, InstanceKind, InstanceRow,
    Violation,
};
pub use sharpness::{sharpness_probe, SharpnessResult, Witness};

/// Largest supported block count per sigma-field.
pub const MAX_BLOCKS_CAP: usize = 12;

const PROB_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteProbSpace {
    atom_probs: Vec<f64>,
}

impl FiniteProbSpace {
    pub fn new(atom_probs: Vec<f64>) -> Result<Self> {
        if atom_probs.is_empty() {
            return Err(Error::invalid("probability space needs at least one atom"));
        }
        if let Some(p) = atom_probs.iter().find(|&&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::invalid(format!("atom probabilities must be positive, got {p}")));
        }
        let s: f64 = atom_probs.iter().sum();
        if (s - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::invalid(format!("atom probabilities sum to {s}, not 1")));
        }
        Ok(FiniteProbSpace { atom_probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.atom_probs
    }

    pub fn atoms(&self) -> usize {
        self.atom_probs.len()
    }
}

/// A sigma-field given by its generating partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaField {
    blocks: Vec<usize>,
    block_count: usize,
}

impl SigmaField {
    /// `blocks[i]` is the block id of atom `i`; ids must be `0..k` with every
    /// id used.
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("partition of an empty space"));
        }
        let k = blocks.iter().max().unwrap() + 1;
        let mut used = vec![false; k];
        for &b in &blocks {
            used[b] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::invalid("partition block ids must be contiguous from 0"));
        }
        Ok(SigmaField { blocks, block_count: k })
    }

    pub fn trivial(atoms: usize) -> Self {
        SigmaField { blocks: vec![0; atoms], block_count: 1 }
    }

    pub fn discrete(atoms: usize) -> Self {
        SigmaField { blocks: (0..atoms).collect(), block_count: atoms }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// Whether `atom_mask` (bit `i` = atom `i`) is a union of blocks.
    pub fn contains_event(&self, atom_mask: u64) -> bool {
        let mut state = vec![None; self.block_count];
        for (i, &b) in self.blocks.iter().enumerate() {
            let inside = atom_mask >> i & 1 == 1;
            match state[b] {
                None => state[b] = Some(inside),
                Some(s) if s != inside => return false,
                _ => {}
            }
        }
        true
    }
}

/// A real function of the atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomVar {
    pub values: Vec<f64>,
}

impl RandomVar {
    pub fn new(values: Vec<f64>) -> Self {
        RandomVar { values }
    }

    /// Builds a variable constant on blocks from one value per block.
    pub fn from_blocks(field: &SigmaField, block_values: &[f64]) -> Result<Self> {
        if block_values.len() != field.block_count() {
            return Err(Error::invalid("one value per block required"));
        }
        Ok(RandomVar { values: field.blocks().iter().map(|&b| block_values[b]).collect() })
    }

    /// Measurability is constancy on every block (exact comparison).
    pub fn is_measurable(&self, field: &SigmaField) -> bool {
        if self.values.len() != field.blocks().len() {
            return false;
        }
        let mut seen: Vec<Option<f64>> = vec![None; field.block_count()];
        for (v, &b) in self.values.iter().zip(field.blocks()) {
            match seen[b] {
                None => seen[b] = Some(*v),
                Some(w) if w != *v => return false,
                _ => {}
            }
        }
        true
    }
}

fn check_pair(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> Result<()> {
    if f.blocks().len() != space.atoms() || g.blocks().len() != space.atoms() {
        return Err(Error::invalid("partition length differs from the atom count"));
    }
    for k in [f.block_count(), g.block_count()] {
        if k > MAX_BLOCKS_CAP {
            return Err(Error::EnumerationTooLarge(format!(
                "enumeration too large: {k} blocks exceeds the cap of {MAX_BLOCKS_CAP}"
            )));
        }
    }
    Ok(())
}

/// Joint block probabilities `P(F_a G_b)` and the marginals.
fn joint(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let (kf, kg) = (f.block_count(), g.block_count());
    let mut j = vec![vec![0.0; kg]; kf];
    let mut pf = vec![0.0; kf];
    let mut pg = vec![0.0; kg];
    for (i, &p) in space.probs().iter().enumerate() {
        let (a, b) = (f.blocks()[i], g.blocks()[i]);
        j[a][b] += p;
        pf[a] += p;
        pg[b] += p;
    }
    (j, pf, pg)
}

/// For every event `A` of `F` (with its probability), the largest
/// `|P(AB) - P(A)P(B)|` over events `B` of `G`. The best `B` collects either
/// all positive or all negative block deviations.
fn per_event_deviation(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> Vec<(f64, f64)> {
    let (j, pf, pg) = joint(space, f, g);
    let dev: Vec<Vec<f64>> =
        j.iter().zip(&pf).map(|(row, pa)| row.iter().zip(&pg).map(|(x, pb)| x - pa * pb).collect()).collect();
    deviation_extrema(&pf, &dev)
}

fn deviation_extrema(pf: &[f64], dev: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let kf = pf.len();
    let kg = dev.first().map_or(0, |r| r.len());
    let mut out = Vec::with_capacity(1 << kf);
    let mut row = vec![0.0; kg];
    for mask in 0u32..(1u32 << kf) {
        row.iter_mut().for_each(|r| *r = 0.0);
        let mut pa = 0.0;
        for a in 0..kf {
            if mask >> a & 1 == 1 {
                pa += pf[a];
                for b in 0..kg {
                    row[b] += dev[a][b];
                }
            }
        }
        let (mut pos, mut neg) = (0.0f64, 0.0f64);
        for &d in &row {
            if d > 0.0 {
                pos += d;
            } else {
                neg -= d;
            }
        }
        out.push((pa, pos.max(neg)));
    }
    out
}

/// `(alpha, beta)` from block marginals of `F` and the block deviation
/// matrix `P(F_a G_b) - P(F_a) P(G_b)`. Supplying the deviation directly
/// avoids cancellation when it is far below the joint probabilities.
pub fn mixing_from_deviation(pf: &[f64], deviation: &[Vec<f64>]) -> Result<(f64, f64)> {
    if pf.len() > MAX_BLOCKS_CAP || deviation.first().map_or(0, |r| r.len()) > MAX_BLOCKS_CAP {
        return Err(Error::EnumerationTooLarge(format!("enumeration too large: more than {MAX_BLOCKS_CAP} blocks")));
    }
    if deviation.len() != pf.len() {
        return Err(Error::invalid("deviation rows differ from the marginal length"));
    }
    Ok(extrema_to_coefficients(&deviation_extrema(pf, deviation)))
}

fn extrema_to_coefficients(dev: &[(f64, f64)]) -> (f64, f64) {
    let alpha = dev.iter().fold(0.0f64, |m, &(_, d)| m.max(d));
    let beta = dev.iter().filter(|&&(pa, _)| pa > 0.0).fold(0.0f64, |m, &(pa, d)| m.max(d / pa.min(1.0)));
    (alpha, beta.min(1.0))
}

/// `alpha(F, G) = sup |P(AB) - P(A)P(B)|` over `A in F`, `B in G`.
pub fn alpha_coefficient(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> Result<f64> {
    Ok(mixing_coefficients(space, f, g)?.0)
}

/// `beta(F, G) = sup |P(B | A) - P(B)|` over `A in F` with `P(A) > 0`, `B in G`.
pub fn beta_coefficient(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> Result<f64> {
    Ok(mixing_coefficients(space, f, g)?.1)
}

/// Both coefficients from a single enumeration.
pub fn mixing_coefficients(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> Result<(f64, f64)> {
    check_pair(space, f, g)?;
    Ok(extrema_to_coefficients(&per_event_deviation(space, f, g)))
}

fn check_var(space: &FiniteProbSpace, x: &RandomVar) -> Result<()> {
    if x.values.len() != space.atoms() {
        return Err(Error::invalid("random variable length differs from the atom count"));
    }
    Ok(())
}

pub fn expectation(space: &FiniteProbSpace, x: &RandomVar) -> Result<f64> {
    check_var(space, x)?;
    Ok(space.probs().iter().zip(&x.values).map(|(p, v)| p * v).sum())
}

/// `E (xi - E xi)(eta - E eta)`.
pub fn exact_cov(space: &FiniteProbSpace, xi: &RandomVar, eta: &RandomVar) -> Result<f64> {
    let (ex, ey) = (expectation(space, xi)?, expectation(space, eta)?);
    Ok(space.probs().iter().zip(xi.values.iter().zip(&eta.values)).map(|(p, (x, y))| p * (x - ex) * (y - ey)).sum())
}

/// `|xi|_p`; `p = inf` gives the largest `|value|`.
pub fn exact_lp(space: &FiniteProbSpace, xi: &RandomVar, p: f64) -> Result<f64> {
    check_var(space, xi)?;
    if !(p >= 1.0) {
        return Err(Error::domain(format!("L_p norm needs p >= 1, got {p}")));
    }
    Ok(lp_norm(space.probs(), &xi.values, p))
}

pub(crate) fn lp_norm(probs: &[f64], values: &[f64], p: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    let s: f64 = probs.iter().zip(values).map(|(w, v)| w * (v.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Atom-level oracle: every subset of atoms, kept if measurable.
    fn slow_coefficients(space: &FiniteProbSpace, f: &SigmaField, g: &SigmaField) -> (f64, f64) {
        let n = space.atoms();
        let prob = |m: u64| -> f64 { (0..n).filter(|i| m >> i & 1 == 1).map(|i| space.probs()[i]).sum() };
        let fe: Vec<u64> = (0..1u64 << n).filter(|&m| f.contains_event(m)).collect();
        let ge: Vec<u64> = (0..1u64 << n).filter(|&m| g.contains_event(m)).collect();
        let (mut a, mut b) = (0.0f64, 0.0f64);
        for &x in &fe {
            let px = prob(x);
            for &y in &ge {
                let d = (prob(x & y) - px * prob(y)).abs();
                a = a.max(d);
                if px > 0.0 {
                    b = b.max(d / px);
                }
            }
        }
        (a, b)
    }

    fn half() -> FiniteProbSpace {
        FiniteProbSpace::new(vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn coin_examples() {
        let s = half();
        let f = SigmaField::discrete(2);
        assert_eq!(alpha_coefficient(&s, &f, &f).unwrap(), 0.25);
        assert_eq!(beta_coefficient(&s, &f, &f).unwrap(), 0.5);
        let t = SigmaField::trivial(2);
        assert_eq!(alpha_coefficient(&s, &f, &t).unwrap(), 0.0);
        assert_eq!(beta_coefficient(&s, &t, &f).unwrap(), 0.0);
    }

    #[test]
    fn independent_coordinates() {
        // atoms (x, y) in {0,1}^2, fair and independent
        let s = FiniteProbSpace::new(vec![0.25; 4]).unwrap();
        let f = SigmaField::new(vec![0, 0, 1, 1]).unwrap();
        let g = SigmaField::new(vec![0, 1, 0, 1]).unwrap();
        assert_eq!(mixing_coefficients(&s, &f, &g).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn dyadic_product_spaces_are_exactly_independent() {
        let p1 = [0.5, 0.25, 0.125, 0.125];
        let p2 = [0.75, 0.1875, 0.0625];
        let mut probs = Vec::new();
        let (mut fb, mut gb) = (Vec::new(), Vec::new());
        for (i, a) in p1.iter().enumerate() {
            for (j, b) in p2.iter().enumerate() {
                probs.push(a * b);
                fb.push(i);
                gb.push(j);
            }
        }
        let s = FiniteProbSpace::new(probs).unwrap();
        let (f, g) = (SigmaField::new(fb).unwrap(), SigmaField::new(gb).unwrap());
        assert_eq!(mixing_coefficients(&s, &f, &g).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn too_many_blocks() {
        let n = 13;
        let s = FiniteProbSpace::new(vec![1.0 / 16.0; 16]).unwrap();
        let mut blocks: Vec<usize> = (0..n).collect();
        blocks.extend([0, 1, 2]);
        let f = SigmaField::new(blocks).unwrap();
        assert!(matches!(alpha_coefficient(&s, &f, &f), Err(Error::EnumerationTooLarge(_))));
    }

    #[test]
    fn moments() {
        let s = half();
        let r = RandomVar::new(vec![-1.0, 1.0]);
        assert_eq!(exact_cov(&s, &r, &r).unwrap(), 1.0);
        let c = RandomVar::new(vec![3.0, 3.0]);
        assert_eq!(exact_cov(&s, &c, &r).unwrap(), 0.0);
        for p in [1.0, 2.0, 7.5, f64::INFINITY] {
            assert_eq!(exact_lp(&s, &r, p).unwrap(), 1.0);
        }
        let x = RandomVar::new(vec![0.0, 2.0]);
        assert!((exact_lp(&s, &x, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(exact_lp(&s, &x, f64::INFINITY).unwrap(), 2.0);
        assert!(exact_lp(&s, &x, 0.5).is_err());
    }

    #[test]
    fn measurability() {
        let f = SigmaField::new(vec![0, 0, 1]).unwrap();
        assert!(RandomVar::new(vec![2.0, 2.0, -1.0]).is_measurable(&f));
        assert!(!RandomVar::new(vec![2.0, 1.0, -1.0]).is_measurable(&f));
        assert!(RandomVar::from_blocks(&f, &[1.0, 2.0]).unwrap().is_measurable(&f));
        assert!(SigmaField::new(vec![0, 2]).is_err());
    }

    fn dyadic_space(n: usize) -> impl Strategy<Value = Vec<f64>> {
        // split a unit mass in halves at random atoms: every probability is dyadic
        proptest::collection::vec(0usize..64, n - 1).prop_map(move |picks| {
            let mut ps = vec![1.0f64];
            for k in picks {
                let i = k % ps.len();
                ps[i] /= 2.0;
                let h = ps[i];
                ps.push(h);
            }
            ps
        })
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<usize>, Vec<usize>)> {
        (2usize..=6).prop_flat_map(|n| {
            (dyadic_space(n), proptest::collection::vec(0usize..4, n), proptest::collection::vec(0usize..4, n))
        })
    }

    fn relabel(raw: &[usize]) -> Vec<usize> {
        let mut map = std::collections::BTreeMap::new();
        raw.iter()
            .map(|b| {
                let k = map.len();
                *map.entry(*b).or_insert(k)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn enumeration_matches_atom_oracle((probs, fb, gb) in instance()) {
            let s = FiniteProbSpace::new(probs).unwrap();
            let f = SigmaField::new(relabel(&fb)).unwrap();
            let g = SigmaField::new(relabel(&gb)).unwrap();
            let (a, b) = mixing_coefficients(&s, &f, &g).unwrap();
            let (sa, sb) = slow_coefficients(&s, &f, &g);
            prop_assert_eq!(a, sa);
            prop_assert_eq!(b, sb);
        }

        #[test]
        fn alpha_below_beta((probs, fb, gb) in instance()) {
            let s = FiniteProbSpace::new(probs).unwrap();
            let f = SigmaField::new(relabel(&fb)).unwrap();
            let g = SigmaField::new(relabel(&gb)).unwrap();
            let (a, b) = mixing_coefficients(&s, &f, &g).unwrap();
            prop_assert!(a <= b);
            prop_assert!((0.0..=0.25).contains(&a));
            prop_assert!((0.0..=1.0).contains(&b));
        }

        #[test]
        fn zero_alpha_forces_zero_cov((probs, fb, gb) in instance(), seed in 0u64..1000) {
            let s = FiniteProbSpace::new(probs).unwrap();
            let f = SigmaField::new(relabel(&fb)).unwrap();
            let g = SigmaField::new(relabel(&gb)).unwrap();
            let a = alpha_coefficient(&s, &f, &g).unwrap();
            if a == 0.0 {
                let xv: Vec<f64> = (0..f.block_count()).map(|k| ((seed + k as u64) % 7) as f64 - 3.0).collect();
                let yv: Vec<f64> = (0..g.block_count()).map(|k| ((seed * 3 + k as u64) % 5) as f64 - 2.0).collect();
                let x = RandomVar::from_blocks(&f, &xv).unwrap();
                let y = RandomVar::from_blocks(&g, &yv).unwrap();
                prop_assert!(exact_cov(&s, &x, &y).unwrap().abs() < 1e-14);
            }
        }
    }
}
