//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::E;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use glscov::clt_diag::{
    self, markov_mixing_profile, natural_function, sigma_n_estimate, summability_report, y_sequence, Innovation,
    SequenceModel,
};
use glscov::cov_bounds::{
    davydov_bound, example_bounds, factorization_check, gls_identical_bound, gls_strong_bound, gls_uniform_bound,
    ibragimov_bound, uniform_phi_grid, uniform_phi_theta, ExampleFamily,
};
use glscov::finite_oracle::{sharpness_probe, verify_campaign, CampaignConfig};
use glscov::fundamental::{asymptotic_constant_finite, closed_form_power, fundamental, paper_constant_k};
use glscov::psi::{dual_psi, gls_norm, natural_from_moments, product_zeta, MomentTable, PsiFunction};
use glscov::tails::{conjugate, empirical_tails, tail_bound, v_of};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_power_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 5.0] {
        let psi = PsiFunction::power(m).unwrap();
        for k in [2, 4, 6, 8, 10] {
            let delta = 10f64.powi(-k);
            let num = fundamental(&psi, delta).map_err(|e| e.to_string())?.value;
            let exact = closed_form_power(m, delta).map_err(|e| e.to_string())?;
            worst = worst.max(rel(num, exact));
        }
    }
    let t = start.elapsed();
    ensure(worst <= 1e-6, format!("max relative error {worst:.3e}"))?;
    ensure(t < Duration::from_secs(1), format!("runtime {t:?}"))?;
    Ok(format!("20 cases, max rel err {worst:.2e}, {t:.2?}"))
}

fn c2_finite_support_shape() -> Outcome {
    let mut parts = Vec::new();
    for (b, beta) in [(2.0, 1.0), (4.0, 0.5)] {
        let psi = PsiFunction::finite_support(b, beta).unwrap();
        let ratio = |d: f64| -> Result<f64, String> {
            let v = fundamental(&psi, d).map_err(|e| e.to_string())?.value;
            Ok(v / (d.powf(1.0 / b) * (-d.ln()).powf(-beta)))
        };
        let (r8, r12) = (ratio(1e-8)?, ratio(1e-12)?);
        let change = rel(r12, r8);
        let k = paper_constant_k(b, beta);
        let lead = asymptotic_constant_finite(b, beta);
        let mismatch = rel(r12, k) > 1e-3;
        ensure(change < 0.05, format!("(b, beta) = ({b}, {beta}): ratio moved {:.2}%", 100.0 * change))?;
        parts.push(format!(
            "({b},{beta}): change {:.2}%, observed C {r12:.4}, K {k:.4}, leading-order {lead:.4}, K mismatch {mismatch}",
            100.0 * change
        ));
    }
    Ok(parts.join("; "))
}

fn c3_extremal() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [2.0, 4.0, 8.0] {
        let psi = PsiFunction::extremal(r).unwrap();
        for d in [0.5, 1e-3] {
            let v = fundamental(&psi, d).map_err(|e| e.to_string())?.value;
            worst = worst.max((v - d.powf(1.0 / r)).abs());
        }
    }
    ensure(worst <= 1e-12, format!("fundamental off by {worst:.3e}"))?;
    let mut worst_bound: f64 = 0.0;
    for (r, s) in [(4.0, 4.0), (3.0, 6.0), (8.0, 2.5)] {
        let (psi, nu) = (PsiFunction::extremal(r).unwrap(), PsiFunction::extremal(s).unwrap());
        for alpha in [1e-2, 1e-5, 0.2] {
            let u = gls_uniform_bound(&psi, &nu, alpha, 1.0, 1.0).map_err(|e| e.to_string())?.value;
            let d = davydov_bound(alpha, r, s, 1.0, 1.0).map_err(|e| e.to_string())?.value;
            worst_bound = worst_bound.max((u - d).abs());
        }
    }
    for r in [2.0, 3.0, 5.0] {
        let rc = r / (r - 1.0);
        let (psi, nu) = (PsiFunction::extremal(r).unwrap(), PsiFunction::extremal(rc).unwrap());
        for beta in [1e-2, 0.3, 1e-6] {
            let s = gls_strong_bound(&psi, &nu, beta, 1.0, 1.0).map_err(|e| e.to_string())?.value;
            let i = ibragimov_bound(beta, r, 1.0, 1.0).map_err(|e| e.to_string())?.value;
            worst_bound = worst_bound.max((s - i).abs());
        }
    }
    ensure(worst_bound <= 1e-9, format!("bound degeneration off by {worst_bound:.3e}"))?;
    Ok(format!("phi err {worst:.1e}, uniform/davydov and strong/ibragimov err {worst_bound:.1e}"))
}

fn c4_campaign() -> Outcome {
    // one worker, to time the campaign on a single core
    std::env::set_var("GLSCOV_THREADS", "1");
    let config =
        CampaignConfig { instances: 10_000, seed: 42, max_atoms: 10, max_blocks: 4, ..CampaignConfig::default() };
    let start = Instant::now();
    let report = verify_campaign(&config);
    let t = start.elapsed();
    std::env::remove_var("GLSCOV_THREADS");
    let report = report.map_err(|e| e.to_string())?;
    ensure(report.violations == 0, format!("{} violations: {:?}", report.violations, report.violations_by_theorem))?;
    ensure(t < Duration::from_secs(60), format!("runtime {t:?}"))?;
    Ok(format!("{} checks, 0 violations, max |cov|/bound {:.4}, {t:.1?} on 1 thread", report.checks, report.max_ratio))
}

fn c5_sharpness() -> Outcome {
    let r = sharpness_probe(4.0, 4.0, 5000, 42, 8, 4).map_err(|e| e.to_string())?;
    let w = &r.witness;
    ensure(r.best_ratio >= 1.0, format!("best ratio {}", r.best_ratio))?;
    ensure(r.best_ratio >= 2.0 - 1e-12, format!("below the Rademacher witness: {}", r.best_ratio))?;
    Ok(format!(
        "best ratio {:.6} (alpha {:.4}, |cov| {:.4}, {} atoms)",
        r.best_ratio,
        w.alpha,
        w.cov.abs(),
        w.probs.len()
    ))
}

fn c6_prop_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [1.0, 2.0] {
        let psi = PsiFunction::power(m).unwrap();
        let zeta = product_zeta(&psi, &dual_psi(&psi).unwrap());
        for k in 1..=10 {
            let beta = (-(k as f64)).exp();
            let l = fundamental(&zeta, 1.0 / beta).map_err(|e| e.to_string())?.value;
            let r = fundamental(&psi, beta.powf(-0.5)).map_err(|e| e.to_string())?.value.powi(2);
            worst = worst.max(rel(l, r));
        }
    }
    ensure(worst <= 1e-9, format!("max rel err {worst:.3e}"))?;
    Ok(format!("20 cases, max rel err {worst:.2e}"))
}

fn c7_routes_and_factorization() -> Outcome {
    let pairs = [
        (PsiFunction::power(1.0).unwrap(), PsiFunction::power(2.0).unwrap()),
        (PsiFunction::power(1.0).unwrap(), PsiFunction::finite_support(4.0, 1.0).unwrap()),
        (PsiFunction::finite_support(3.0, 1.0).unwrap(), PsiFunction::finite_support(4.0, 0.5).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut one_sided = 0;
    for (psi, nu) in &pairs {
        for (a, b) in [(E.powi(-3), E.powi(-3)), (E.powi(-6), E.powi(-2)), (1e-4, 1e-8)] {
            let g = uniform_phi_grid(psi, nu, a, b).map_err(|e| e.to_string())?.ok_or("empty triangle")?;
            let t = uniform_phi_theta(psi, nu, a, b).map_err(|e| e.to_string())?.ok_or("empty triangle")?;
            worst = worst.max(rel(g.value, t.value));
            let f = factorization_check(psi, nu, a, b).map_err(|e| e.to_string())?;
            ensure(f.lhs <= f.rhs * (1.0 + 1e-9), format!("one-sided inequality fails: {} > {}", f.lhs, f.rhs))?;
            one_sided += 1;
        }
    }
    ensure(worst <= 1e-6, format!("route disagreement {worst:.3e}"))?;
    let p1 = PsiFunction::power(1.0).unwrap();
    let small = factorization_check(&p1, &p1, E.powi(-4), E.powi(-4)).map_err(|e| e.to_string())?;
    ensure(small.holds, format!("factorization fails at e^-4: {} vs {}", small.lhs, small.rhs))?;
    let large = factorization_check(&p1, &p1, E.powi(-1), E.powi(-1)).map_err(|e| e.to_string())?;
    ensure(!large.holds, "factorization not detected as failing at e^-1")?;
    Ok(format!(
        "route gap {worst:.1e} on 3 pairs; factorization at e^-4 rel gap {:.1e}, at e^-1 lhs/rhs {:.4}; {one_sided} one-sided checks",
        rel(small.lhs, small.rhs),
        large.lhs / large.rhs
    ))
}

fn c8_example_constant() -> Outcome {
    let alpha = E.powi(-2);
    let closed = example_bounds(&ExampleFamily::PowerPower { m: 1.0, n: 1.0 }, alpha, 1.0, 1.0)
        .map_err(|e| e.to_string())?
        .value;
    let numeric =
        gls_identical_bound(&PsiFunction::power(1.0).unwrap(), alpha, 1.0, 1.0).map_err(|e| e.to_string())?.value;
    ensure((closed - 48.0).abs() <= 1e-9 * 48.0, format!("closed form {closed}"))?;
    ensure(rel(numeric, closed) <= 1e-6, format!("numeric {numeric} vs closed {closed}"))?;
    Ok(format!("closed {closed}, numeric {numeric:.10}"))
}

fn c9_tails() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let samples: Vec<f64> = (0..1_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let grid: Vec<f64> = (2..=80).map(|i| i as f64 / 2.0).collect();
    let table = MomentTable::from_samples(&samples, &grid, None).map_err(|e| e.to_string())?;
    let psi = natural_from_moments(&table).map_err(|e| e.to_string())?;
    let norm = gls_norm(&table, &psi).value;
    let lo = E * norm;
    let ys: Vec<f64> = (0..50).map(|i| lo + (6.0 - lo) * i as f64 / 49.0).collect();
    let emp = empirical_tails(&samples, &ys).map_err(|e| e.to_string())?;
    let mut min_gap = f64::INFINITY;
    for (y, e) in ys.iter().zip(&emp) {
        let b = tail_bound(&psi, norm, *y).map_err(|e| e.to_string())?;
        ensure(*e <= b, format!("empirical tail {e} exceeds bound {b} at y = {y}"))?;
        min_gap = min_gap.min(b - e);
    }
    let mut fy_worst = f64::NEG_INFINITY;
    for f in [&psi, &PsiFunction::power(2.0).unwrap()] {
        for i in 0..100 {
            let p = 1.0 + 39.0 * i as f64 / 99.0;
            let v = v_of(f, p).map_err(|e| e.to_string())?;
            for j in 0..100 {
                let x = 0.05 + 4.95 * j as f64 / 99.0;
                let vs = conjugate(f, x).map_err(|e| e.to_string())?.value;
                fy_worst = fy_worst.max(p * x - v - vs);
            }
        }
    }
    ensure(fy_worst <= 1e-8, format!("Fenchel-Young violated by {fy_worst:.3e}"))?;
    Ok(format!(
        "norm {norm:.6}, 50 levels, min bound - empirical {min_gap:.2e}; Fenchel-Young max excess {fy_worst:.2e} on 2x100x100"
    ))
}

fn c10_clt() -> Outcome {
    let w = 0.5f64.sqrt();
    let ma = SequenceModel::MDependent { weights: vec![w, w], innovation: Innovation::Gaussian };
    let rows = sigma_n_estimate(&ma, &[100, 1_000, 10_000], 2000, 7).map_err(|e| e.to_string())?;
    let mut zs = Vec::new();
    for r in &rows {
        let exact = 1.0 + (r.n as f64 - 1.0) / r.n as f64;
        ensure(r.exact.is_some_and(|x| (x - exact).abs() < 1e-12), "exact Sigma(n) mismatch")?;
        let z = (r.sigma - exact) / r.standard_error;
        ensure(z.abs() <= 3.0, format!("n = {}: estimate {} vs exact {exact}, {z:.2} SE", r.n, r.sigma))?;
        zs.push(format!("{z:+.2}"));
    }
    let q = 0.2;
    let chain =
        SequenceModel::FiniteMarkov { transition: vec![vec![1.0 - q, q], vec![q, 1.0 - q]], values: vec![-1.0, 1.0] };
    let (psi, _) = natural_function(&chain, None).map_err(|e| e.to_string())?;
    let profile = markov_mixing_profile(&chain, 10_000, psi).map_err(|e| e.to_string())?;
    let y = y_sequence(&profile).map_err(|e| e.to_string())?;
    let rep = summability_report(&y).map_err(|e| e.to_string())?;
    ensure(rep.tail_ratio < 1e-3, format!("tail ratio {}", rep.tail_ratio))?;
    ensure(rep.verdict == clt_diag::Verdict::SummableEvidence, format!("verdict {:?}", rep.verdict))?;
    Ok(format!(
        "MA(1) z-scores [{}]; Markov y partial sum {:.6}, tail ratio {:.1e}",
        zs.join(", "),
        rep.partial_sum,
        rep.tail_ratio
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("closed-form fundamental, power family", c1_power_closed_form),
        ("finite-support shape", c2_finite_support_shape),
        ("extremal degeneration", c3_extremal),
        ("oracle campaign", c4_campaign),
        ("sharpness probe", c5_sharpness),
        ("strong-mixing identity", c6_prop_identity),
        ("route agreement and factorization", c7_routes_and_factorization),
        ("identical-space constant", c8_example_constant),
        ("tail bound and Fenchel-Young", c9_tails),
        ("CLT diagnostics", c10_clt),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
