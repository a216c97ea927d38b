//! The `glscov` command line: argument parsing, dispatch and report output.
//!
//! Exit codes: 0 on success, 2 on errors raised by the library (one JSON line
//! `{"error": ..., "kind": ...}` on stderr), 64 on usage errors.

mod args;

use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clt_diag::{
    self, eventually_nonincreasing_from, summability_report, CltProfile, ProfileSpec, SequenceModel, SigmaRow,
    SummabilityReport,
};
use crate::cov_bounds::{
    davydov_bound, example_bounds, factorization_check, generic_bound, gls_dual_pair_bound, gls_identical_bound,
    gls_strong_bound, gls_uniform_bound, gls_uniform_bound_fast, holder_bound, ibragimov_bound, BoundDomain,
    BoundReport, ExampleFamily, Kernel,
};
use crate::error::{Error, Result};
use crate::finite_oracle::{sharpness_probe, verify_campaign, CampaignConfig};
use crate::fundamental::{closed_form_power, fundamental, fundamental_truncated, FundamentalResult};
use crate::psi::{dual_psi, fmt_f64, natural_from_moments, product_zeta, MomentTable, PsiFunction};
use crate::tails::{empirical_tails, tail_bound};
use args::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

enum Report {
    Json(String),
    Csv(String),
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = dispatch(&cli.command).and_then(|report| {
        let body = match report {
            Report::Json(s) => s + "\n",
            Report::Csv(s) => s,
        };
        match &cli.out {
            Some(path) => std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => out.write_all(body.as_bytes()).map_err(Error::from),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let line = json!({ "error": e.to_string(), "kind": e.kind() });
            let _ = writeln!(err, "{line}");
            EXIT_DOMAIN
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Psi(a) => cmd_psi(a),
        Command::Fundamental(a) => cmd_fundamental(a),
        Command::Tail(a) => cmd_tail(a),
        Command::Bound(a) => to_json(&cmd_bound(a)?),
        Command::Factorization(a) => cmd_factorization(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Clt(a) => to_json(&cmd_clt(a)?),
        Command::Sharpness(a) => to_json(&sharpness_probe(a.p, a.q, a.budget, a.seed, a.max_atoms, a.max_blocks)?),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Report> {
    Ok(Report::Json(serde_json::to_string_pretty(v)?))
}

/// Inline JSON when the argument starts with `{` or `[`, else a file path.
fn json_text(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Io(format!("{arg}: {e}")))
    }
}

fn load_psi(arg: &str) -> Result<PsiFunction> {
    PsiFunction::from_json(&json_text(arg)?)
}

fn require<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::invalid(format!("--{flag} is required for this theorem")))
}

fn need(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(format!("--{flag} is required for this theorem")))
}

fn ext(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_f64(x))
    }
}

fn read_floats(path: &Path) -> Result<Vec<f64>> {
    clt_diag::read_samples(&path.to_string_lossy())
}

fn cmd_psi(a: &PsiArgs) -> Result<Report> {
    let mut psi = match (&a.psi, &a.samples) {
        (Some(p), _) => load_psi(p)?,
        (None, Some(path)) => {
            let xs = read_floats(path)?;
            let grid: Vec<f64> = (0..=40).map(|i| 2f64.powf(i as f64 / 8.0)).collect();
            natural_from_moments(&MomentTable::from_samples(&xs, &grid, a.seed)?)?
        }
        (None, None) => return Err(Error::invalid("either --psi or --samples is required")),
    };
    if a.dual {
        psi = dual_psi(&psi)?;
    }
    if let Some(nu) = &a.zeta_with {
        psi = product_zeta(&psi, &load_psi(nu)?);
    }
    psi.validate()?;
    let points: Vec<Value> =
        a.p_grid.iter().flatten().map(|&p| json!({ "p": ext(p), "psi": ext(psi.value(p)) })).collect();
    let body = json!({
        "psi": serde_json::from_str::<Value>(&psi.to_json())?,
        "kind": psi.kind_name(),
        "support": psi.support(),
        "points": points,
    });
    to_json(&body)
}

#[derive(Serialize)]
struct FundamentalOut {
    value: f64,
    argmax_p: f64,
    ln_value: f64,
    delta: f64,
    trunc_low: f64,
    flags: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<f64>,
}

fn boundary_flag(r: &FundamentalResult) -> &'static str {
    use crate::fundamental::Boundary::*;
    match r.boundary {
        Interior => "interior",
        AtOne => "at_one",
        AtLower => "at_lower",
        AtB => "at_b",
        AtInfinity => "at_infinity",
    }
}

fn cmd_fundamental(a: &FundamentalArgs) -> Result<Report> {
    let psi = load_psi(&a.psi)?;
    let eval = |d: f64| match a.trunc_low {
        Some(s) => fundamental_truncated(&psi, s, d),
        None => fundamental(&psi, d),
    };
    if let Some(g) = &a.delta_grid {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["delta", "value", "argmax_p", "boundary"])?;
        for d in g.geometric() {
            let r = eval(d)?;
            w.write_record([fmt_f64(d), fmt_f64(r.value), fmt_f64(r.argmax_p), boundary_flag(&r).to_string()])?;
        }
        return csv_report(w);
    }
    let delta = a.delta.expect("clap requires --delta or --delta-grid");
    let r = eval(delta)?;
    let closed_form = match (&psi, a.trunc_low) {
        (PsiFunction::Power { m }, None) if delta < (-1.0f64).exp() => closed_form_power(*m, delta).ok(),
        _ => None,
    };
    to_json(&FundamentalOut {
        value: r.value,
        argmax_p: r.argmax_p,
        ln_value: r.ln_value,
        delta: r.delta,
        trunc_low: r.trunc_low,
        flags: vec![boundary_flag(&r)],
        closed_form,
    })
}

fn csv_report(w: csv::Writer<Vec<u8>>) -> Result<Report> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(Report::Csv(String::from_utf8(bytes).expect("csv output is utf-8")))
}

fn cmd_tail(a: &TailArgs) -> Result<Report> {
    let psi = load_psi(&a.psi)?;
    let ys = a.y_grid.linear();
    let empirical = match &a.samples {
        Some(path) => Some(empirical_tails(&read_floats(path)?, &ys)?),
        None => None,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if empirical.is_some() {
        w.write_record(["y", "bound", "empirical"])?;
    } else {
        w.write_record(["y", "bound"])?;
    }
    for (i, &y) in ys.iter().enumerate() {
        let b = tail_bound(&psi, a.norm, y)?;
        match &empirical {
            Some(e) => w.write_record([fmt_f64(y), fmt_f64(b), fmt_f64(e[i])])?,
            None => w.write_record([fmt_f64(y), fmt_f64(b)])?,
        }
    }
    csv_report(w)
}

fn cmd_bound(a: &BoundArgs) -> Result<BoundReport> {
    let (nx, ne) = (a.norm_xi, a.norm_eta);
    let psi = || load_psi(require(&a.psi, "psi")?);
    let nu_or_psi = || match &a.nu {
        Some(n) => load_psi(n),
        None => psi(),
    };
    match a.theorem {
        TheoremArg::Davydov => davydov_bound(need(a.alpha, "alpha")?, need(a.p, "p")?, need(a.q, "q")?, nx, ne),
        TheoremArg::Ibragimov => ibragimov_bound(need(a.beta, "beta")?, need(a.p, "p")?, nx, ne),
        TheoremArg::Holder => holder_bound(need(a.p, "p")?, nx, ne),
        TheoremArg::GlsStrong => gls_strong_bound(&psi()?, &nu_or_psi()?, need(a.beta, "beta")?, nx, ne),
        TheoremArg::GlsDualPair => gls_dual_pair_bound(&psi()?, need(a.beta, "beta")?, nx, ne),
        TheoremArg::GlsUniform => {
            let f = if a.fast { gls_uniform_bound_fast } else { gls_uniform_bound };
            f(&psi()?, &nu_or_psi()?, need(a.alpha, "alpha")?, nx, ne)
        }
        TheoremArg::GlsIdentical => gls_identical_bound(&psi()?, need(a.alpha, "alpha")?, nx, ne),
        TheoremArg::Example51 | TheoremArg::Example52 | TheoremArg::Example53 => {
            let family = match (a.theorem, psi()?, nu_or_psi()?) {
                (TheoremArg::Example51, PsiFunction::Power { m }, PsiFunction::Power { m: n }) => {
                    ExampleFamily::PowerPower { m, n }
                }
                (
                    TheoremArg::Example52,
                    PsiFunction::FiniteSupport { b: b1, beta: beta1 },
                    PsiFunction::FiniteSupport { b: b2, beta: beta2 },
                ) => ExampleFamily::FiniteFinite { b1, beta1, b2, beta2 },
                (TheoremArg::Example53, PsiFunction::Power { m }, PsiFunction::FiniteSupport { b, beta }) => {
                    ExampleFamily::PowerFinite { m, b, beta }
                }
                _ => {
                    return Err(Error::invalid(
                        "example-5.1 needs power/power, example-5.2 finite_support/finite_support, \
                         example-5.3 power/finite_support",
                    ))
                }
            };
            example_bounds(&family, need(a.alpha, "alpha")?, nx, ne)
        }
        TheoremArg::Example54 => {
            let family = ExampleFamily::Combined { psi: psi()?, q0: need(a.q0, "q0")? };
            example_bounds(&family, need(a.alpha, "alpha")?, nx, ne)
        }
        TheoremArg::Generic => {
            let kernel = match a.kernel {
                Some(KernelArg::Davydov) => Kernel::Davydov { alpha: need(a.alpha, "alpha")? },
                Some(KernelArg::Ibragimov) => Kernel::Ibragimov { beta: need(a.beta, "beta")? },
                Some(KernelArg::Holder) => Kernel::Holder,
                None => return Err(Error::invalid("--kernel is required for the generic bound")),
            };
            let domain = match a.domain {
                DomainArg::Triangle => BoundDomain::Triangle,
                DomainArg::Rectangle => BoundDomain::Rectangle,
                DomainArg::ConjugateLine => BoundDomain::ConjugateLine,
            };
            generic_bound(&kernel, &psi()?, &nu_or_psi()?, domain, nx, ne)
        }
    }
}

fn cmd_factorization(a: &FactorizationArgs) -> Result<Report> {
    let psi = load_psi(&a.psi)?;
    let nu = load_psi(&a.nu)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "beta", "lhs", "rhs", "holds"])?;
    for &alpha in &a.alpha_grid {
        for &beta in &a.beta_grid {
            let r = factorization_check(&psi, &nu, alpha, beta)?;
            w.write_record([fmt_f64(alpha), fmt_f64(beta), fmt_f64(r.lhs), fmt_f64(r.rhs), r.holds.to_string()])?;
        }
    }
    csv_report(w)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Report> {
    let mut config = CampaignConfig {
        instances: a.instances,
        seed: a.seed,
        max_atoms: a.max_atoms,
        max_blocks: a.max_blocks,
        cross_pairs: !a.no_cross_pairs,
        ..CampaignConfig::default()
    };
    if let Some(set) = &a.psi_set {
        config.psi_families = serde_json::from_str(&json_text(set)?)?;
    }
    if let Some(g) = &a.p_grid {
        config.p_grid = g.clone();
    }
    let report = verify_campaign(&config)?;
    if let Some(path) = &a.csv {
        let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        report.write_csv(f)?;
    }
    to_json(&report)
}

#[derive(Serialize)]
struct Verdicts {
    y: clt_diag::Verdict,
    z: clt_diag::Verdict,
}

#[derive(Serialize)]
struct CltReport {
    model: SequenceModel,
    psi_gamma: PsiFunction,
    /// Whether `psi_gamma` is the exact natural function (false for bounds
    /// and estimates).
    psi_gamma_exact: bool,
    profile_source: clt_diag::ProfileSource,
    k_max: usize,
    y_partial_sum: f64,
    z_partial_sum: f64,
    verdicts: Verdicts,
    y_report: SummabilityReport,
    z_report: SummabilityReport,
    /// First `k` from which `y` is non-increasing up to `K`.
    y_nonincreasing_from: Option<usize>,
    sigma_table: Vec<SigmaRow>,
    notes: Vec<&'static str>,
}

fn cmd_clt(a: &CltArgs) -> Result<CltReport> {
    let model = SequenceModel::from_json(&json_text(&a.model)?)?;
    if matches!(model, SequenceModel::UserSamples { .. }) && a.profile.is_none() {
        return Err(Error::invalid("user samples need a mixing profile (--profile)"));
    }
    let (psi_gamma, psi_gamma_exact) = match &a.psi {
        Some(p) => (load_psi(p)?, false),
        None => clt_diag::natural_function(&model, Some(a.seed))?,
    };
    let profile: CltProfile = match (&a.profile, &model) {
        (Some(spec), _) => {
            let spec: ProfileSpec = serde_json::from_str(&json_text(spec)?)?;
            spec.materialize(psi_gamma.clone(), a.k_max)?
        }
        (None, SequenceModel::FiniteMarkov { .. }) => {
            clt_diag::markov_mixing_profile(&model, a.k_max, psi_gamma.clone())?
        }
        (None, SequenceModel::MDependent { weights, .. }) => {
            clt_diag::m_dependent_profile(weights, a.k_max, psi_gamma.clone())?
        }
        (None, SequenceModel::UserSamples { .. }) => unreachable!("checked above"),
    };
    let y = clt_diag::y_sequence(&profile)?;
    let z = clt_diag::z_sequence(&profile)?;
    let y_report = summability_report(&y)?;
    let z_report = summability_report(&z)?;
    let sigma_table =
        if a.no_sigma { Vec::new() } else { clt_diag::sigma_n_estimate(&model, &a.n_grid, a.reps, a.seed)? };
    let mut notes = vec!["summability verdicts are finite-horizon evidence, not proofs"];
    match profile.source {
        clt_diag::ProfileSource::SingleCoordinate => {
            notes.push("mixing profile uses single-coordinate fields: a lower bound on past/future coefficients")
        }
        clt_diag::ProfileSource::Conservative => {
            notes.push("mixing coefficients at lags k <= m set to the worst case alpha = 1/4, beta = 1")
        }
        clt_diag::ProfileSource::User => {}
    }
    Ok(CltReport {
        model,
        psi_gamma,
        psi_gamma_exact,
        profile_source: profile.source,
        k_max: profile.k_max,
        y_partial_sum: y_report.partial_sum,
        z_partial_sum: z_report.partial_sum,
        verdicts: Verdicts { y: y_report.verdict, z: z_report.verdict },
        y_nonincreasing_from: eventually_nonincreasing_from(&y),
        y_report,
        z_report,
        sigma_table,
        notes,
    })
}
