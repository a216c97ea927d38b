//! Randomized verification of every implemented bound against exact
//! finite-space quantities.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

use super::{lp_norm, mixing_coefficients, FiniteProbSpace, RandomVar, SigmaField, MAX_BLOCKS_CAP};
use crate::cov_bounds::{
    davydov_bound, gls_identical_bound, gls_strong_bound, gls_uniform_bound_fast, holder_bound, ibragimov_bound,
    BoundReport,
};
use crate::error::{Error, Result};
use crate::optimize;
use crate::psi::{conjugate_exponent, fmt_f64, PsiFunction};

/// Absolute tolerance on `|Cov| <= bound`.
pub const VIOLATION_SLACK: f64 = 1e-12;

const NORM_GRID: usize = 128;
const MAX_VIOLATION_EXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub instances: usize,
    pub seed: u64,
    pub max_atoms: usize,
    pub max_blocks: usize,
    /// Exponents for the classical bounds; conjugates are added as needed.
    pub p_grid: Vec<f64>,
    pub psi_families: Vec<PsiFunction>,
    /// Also evaluate the uniform and strong bounds on all ordered pairs of
    /// distinct families, not only on `(psi, psi)`.
    pub cross_pairs: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            instances: 1000,
            seed: 42,
            max_atoms: 10,
            max_blocks: 4,
            p_grid: vec![1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, f64::INFINITY],
            psi_families: default_families(),
            cross_pairs: true,
        }
    }
}

pub fn default_families() -> Vec<PsiFunction> {
    vec![
        PsiFunction::Power { m: 1.0 },
        PsiFunction::Power { m: 2.0 },
        PsiFunction::FiniteSupport { b: 4.0, beta: 1.0 },
        PsiFunction::Extremal { r: 4.0 },
    ]
}

impl CampaignConfig {
    fn validate(&self) -> Result<()> {
        if self.max_atoms < 2 || self.max_atoms > 16 {
            return Err(Error::invalid(format!("max_atoms must lie in [2, 16], got {}", self.max_atoms)));
        }
        if self.max_blocks < 1 || self.max_blocks > MAX_BLOCKS_CAP {
            return Err(Error::invalid(format!(
                "max_blocks must lie in [1, {MAX_BLOCKS_CAP}], got {}",
                self.max_blocks
            )));
        }
        if let Some(p) = self.p_grid.iter().find(|&&p| !(p > 1.0)) {
            return Err(Error::invalid(format!("p grid entries must be > 1, got {p}")));
        }
        for f in &self.psi_families {
            f.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    General,
    /// Product space with coordinate fields: independent.
    Product,
    /// `F = G`.
    SameField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRow {
    pub index: usize,
    pub kind: InstanceKind,
    pub alpha: f64,
    pub beta: f64,
    pub cov: f64,
    #[serde(with = "crate::ext_real")]
    pub tightest_bound: f64,
    pub tightest_theorem: &'static str,
    /// `tightest_bound - |cov|`.
    #[serde(with = "crate::ext_real")]
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub theorem: &'static str,
    pub detail: String,
    pub cov: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceSummary {
    pub instances: usize,
    pub max_alpha: f64,
    pub max_beta: f64,
    pub max_abs_cov: f64,
    pub all_mixing_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub checks: usize,
    pub violations: usize,
    pub violations_by_theorem: BTreeMap<&'static str, usize>,
    pub checks_by_theorem: BTreeMap<&'static str, usize>,
    pub violation_examples: Vec<Violation>,
    /// Largest `|Cov| / bound` over all checks with a positive bound.
    pub max_ratio: f64,
    pub max_ratio_theorem: Option<&'static str>,
    pub max_ratio_instance: Option<usize>,
    pub alpha_above_beta: usize,
    pub same_field_instances: usize,
    pub independence: IndependenceSummary,
    #[serde(skip)]
    pub rows: Vec<InstanceRow>,
}

impl CampaignReport {
    /// Per-instance CSV: `alpha,beta,cov,tightest_bound,slack`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["alpha", "beta", "cov", "tightest_bound", "slack"])?;
        for r in &self.rows {
            wr.write_record([
                fmt_f64(r.alpha),
                fmt_f64(r.beta),
                fmt_f64(r.cov),
                fmt_f64(r.tightest_bound),
                fmt_f64(r.slack),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub(crate) struct Instance {
    pub kind: InstanceKind,
    pub space: FiniteProbSpace,
    pub f: SigmaField,
    pub g: SigmaField,
    pub xi: RandomVar,
    pub eta: RandomVar,
}

pub(crate) fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Repeated halving of a random atom: every probability is dyadic, so
/// products and sums over a product space are exact.
fn dyadic(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut ps = vec![1.0f64];
    while ps.len() < n {
        let i = rng.gen_range(0..ps.len());
        ps[i] /= 2.0;
        ps.push(ps[i]);
    }
    ps
}

pub(crate) fn random_partition(rng: &mut ChaCha8Rng, n: usize, max_blocks: usize) -> SigmaField {
    let k = rng.gen_range(1..=max_blocks.min(n));
    let mut raw: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    raw.shuffle(rng);
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    let blocks = raw
        .into_iter()
        .map(|b| {
            if map[b] == usize::MAX {
                map[b] = next;
                next += 1;
            }
            map[b]
        })
        .collect();
    SigmaField::new(blocks).expect("partition is contiguous by construction")
}

pub(crate) fn random_var(rng: &mut ChaCha8Rng, space: &FiniteProbSpace, field: &SigmaField) -> RandomVar {
    let vals: Vec<f64> = (0..field.block_count()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut x = RandomVar::from_blocks(field, &vals).expect("one value per block");
    if rng.gen_bool(0.5) {
        let m: f64 = space.probs().iter().zip(&x.values).map(|(p, v)| p * v).sum();
        x.values.iter_mut().for_each(|v| *v -= m);
    }
    x
}

fn draw(cfg: &CampaignConfig, index: usize) -> Instance {
    let mut rng = instance_rng(cfg.seed, index);
    let kind = match index % 10 {
        0 if cfg.max_atoms >= 4 => InstanceKind::Product,
        1 => InstanceKind::SameField,
        _ => InstanceKind::General,
    };
    match kind {
        InstanceKind::Product => {
            let n1 = rng.gen_range(2..=cfg.max_atoms / 2);
            let n2 = rng.gen_range(2..=(cfg.max_atoms / n1).max(2));
            let (p1, p2) = (dyadic(&mut rng, n1), dyadic(&mut rng, n2));
            let f1 = random_partition(&mut rng, n1, cfg.max_blocks);
            let g2 = random_partition(&mut rng, n2, cfg.max_blocks);
            let mut probs = Vec::with_capacity(n1 * n2);
            let (mut fb, mut gb) = (Vec::new(), Vec::new());
            for i in 0..n1 {
                for j in 0..n2 {
                    probs.push(p1[i] * p2[j]);
                    fb.push(f1.blocks()[i]);
                    gb.push(g2.blocks()[j]);
                }
            }
            let space = FiniteProbSpace::new(probs).expect("dyadic masses sum to one");
            let f = SigmaField::new(fb).expect("product partition");
            let g = SigmaField::new(gb).expect("product partition");
            let xi = random_var(&mut rng, &space, &f);
            let eta = random_var(&mut rng, &space, &g);
            Instance { kind, space, f, g, xi, eta }
        }
        InstanceKind::SameField | InstanceKind::General => {
            let n = rng.gen_range(2..=cfg.max_atoms);
            let space = FiniteProbSpace::new(dirichlet(&mut rng, n))
                .unwrap_or_else(|_| FiniteProbSpace::new(vec![1.0 / n as f64; n]).unwrap());
            let f = random_partition(&mut rng, n, cfg.max_blocks);
            let g =
                if kind == InstanceKind::SameField { f.clone() } else { random_partition(&mut rng, n, cfg.max_blocks) };
            let xi = random_var(&mut rng, &space, &f);
            let eta = if kind == InstanceKind::SameField && rng.gen_bool(0.5) {
                xi.clone()
            } else {
                random_var(&mut rng, &space, &g)
            };
            Instance { kind, space, f, g, xi, eta }
        }
    }
}

/// `sup_p |x|_p / psi(p)` on a finite space: exact `L_r` norm for the
/// extremal family, a refined one-dimensional sup otherwise.
pub(crate) fn finite_gls_norm(probs: &[f64], values: &[f64], psi: &PsiFunction) -> f64 {
    if let PsiFunction::Extremal { r } = psi {
        return lp_norm(probs, values, *r);
    }
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let scaled: Vec<f64> = values.iter().map(|v| v.abs() / m).collect();
    let ln_lp = |p: f64| {
        let s: f64 = probs.iter().zip(&scaled).map(|(w, v)| w * v.powf(p)).sum();
        s.ln() / p
    };
    let best = optimize::maximize_p(&psi.support(), NORM_GRID, |p| ln_lp(p) - psi.ln_eval(p));
    best.map_or(0.0, |b| m * b.value.exp())
}

struct Check {
    theorem: &'static str,
    detail: String,
    bound: f64,
}

struct Outcome {
    row: InstanceRow,
    checks: Vec<Check>,
    alpha_above_beta: bool,
}

fn push(checks: &mut Vec<Check>, rep: Result<BoundReport>, detail: impl FnOnce() -> String) {
    if let Ok(r) = rep {
        if r.feasible {
            checks.push(Check { theorem: r.theorem.name(), detail: detail(), bound: r.value });
        }
    }
}

fn run_instance(cfg: &CampaignConfig, index: usize) -> Outcome {
    let inst = draw(cfg, index);
    let probs = inst.space.probs();
    let (alpha, beta) = mixing_coefficients(&inst.space, &inst.f, &inst.g).expect("block counts within cap");
    let cov = super::exact_cov(&inst.space, &inst.xi, &inst.eta).expect("lengths agree");
    let lx = |p: f64| lp_norm(probs, &inst.xi.values, p);
    let ly = |p: f64| lp_norm(probs, &inst.eta.values, p);

    let mut checks = Vec::new();
    for &p in &cfg.p_grid {
        for &q in &cfg.p_grid {
            if 1.0 / p + 1.0 / q < 1.0 {
                push(&mut checks, davydov_bound(alpha, p, q, lx(p), ly(q)), || format!("p={p} q={q}"));
            }
        }
        let q = conjugate_exponent(p);
        push(&mut checks, ibragimov_bound(beta, p, lx(p), ly(q)), || format!("p={p}"));
        push(&mut checks, holder_bound(p, lx(p), ly(q)), || format!("p={p}"));
    }

    let nx: Vec<f64> = cfg.psi_families.iter().map(|f| finite_gls_norm(probs, &inst.xi.values, f)).collect();
    let ny: Vec<f64> = cfg.psi_families.iter().map(|f| finite_gls_norm(probs, &inst.eta.values, f)).collect();
    for (i, psi) in cfg.psi_families.iter().enumerate() {
        for (j, nu) in cfg.psi_families.iter().enumerate() {
            if i != j && !cfg.cross_pairs {
                continue;
            }
            let tag = || format!("psi={} nu={}", psi.to_json(), nu.to_json());
            push(&mut checks, gls_strong_bound(psi, nu, beta, nx[i], ny[j]), tag);
            push(&mut checks, gls_uniform_bound_fast(psi, nu, alpha, nx[i], ny[j]), tag);
        }
        push(&mut checks, gls_identical_bound(psi, alpha, nx[i], ny[i]), || format!("psi={}", psi.to_json()));
    }

    let (mut tight, mut theorem) = (f64::INFINITY, "none");
    for c in &checks {
        if c.bound < tight {
            tight = c.bound;
            theorem = c.theorem;
        }
    }
    Outcome {
        row: InstanceRow {
            index,
            kind: inst.kind,
            alpha,
            beta,
            cov,
            tightest_bound: tight,
            tightest_theorem: theorem,
            slack: tight - cov.abs(),
        },
        checks,
        alpha_above_beta: alpha > beta,
    }
}

/// Runs `config.instances` independent random instances. Each instance has
/// its own ChaCha8 stream derived from `(seed, index)`, so the report is
/// identical for any thread count.
pub fn verify_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let outcomes: Vec<Outcome> =
        crate::parallel::install(|| (0..config.instances).into_par_iter().map(|i| run_instance(config, i)).collect());

    let mut rep = CampaignReport {
        config: config.clone(),
        checks: 0,
        violations: 0,
        violations_by_theorem: BTreeMap::new(),
        checks_by_theorem: BTreeMap::new(),
        violation_examples: Vec::new(),
        max_ratio: 0.0,
        max_ratio_theorem: None,
        max_ratio_instance: None,
        alpha_above_beta: 0,
        same_field_instances: 0,
        independence: IndependenceSummary {
            instances: 0,
            max_alpha: 0.0,
            max_beta: 0.0,
            max_abs_cov: 0.0,
            all_mixing_zero: true,
        },
        rows: Vec::with_capacity(outcomes.len()),
    };
    for o in outcomes {
        let acov = o.row.cov.abs();
        for c in &o.checks {
            rep.checks += 1;
            *rep.checks_by_theorem.entry(c.theorem).or_default() += 1;
            if acov > c.bound + VIOLATION_SLACK {
                rep.violations += 1;
                *rep.violations_by_theorem.entry(c.theorem).or_default() += 1;
                if rep.violation_examples.len() < MAX_VIOLATION_EXAMPLES {
                    rep.violation_examples.push(Violation {
                        index: o.row.index,
                        theorem: c.theorem,
                        detail: c.detail.clone(),
                        cov: o.row.cov,
                        bound: c.bound,
                    });
                }
            }
            if c.bound > 0.0 {
                let r = acov / c.bound;
                if r > rep.max_ratio {
                    rep.max_ratio = r;
                    rep.max_ratio_theorem = Some(c.theorem);
                    rep.max_ratio_instance = Some(o.row.index);
                }
            }
        }
        if o.alpha_above_beta {
            rep.alpha_above_beta += 1;
        }
        match o.row.kind {
            InstanceKind::SameField => rep.same_field_instances += 1,
            InstanceKind::Product => {
                let ind = &mut rep.independence;
                ind.instances += 1;
                ind.max_alpha = ind.max_alpha.max(o.row.alpha);
                ind.max_beta = ind.max_beta.max(o.row.beta);
                ind.max_abs_cov = ind.max_abs_cov.max(acov);
                ind.all_mixing_zero &= o.row.alpha == 0.0 && o.row.beta == 0.0;
            }
            InstanceKind::General => {}
        }
        rep.rows.push(o.row);
    }
    Ok(rep)
}
