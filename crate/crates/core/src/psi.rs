//! Generating functions `psi` of Grand Lebesgue Spaces, their algebra
//! (dual, product, extremal family), moment tables, natural functions and
//! GLS norms.
//!
//! A [`PsiFunction`] is evaluated in log space. Outside its support it is
//! `+inf`; on the support it is strictly positive and finite.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Lower clamp for tabulated generating functions.
pub const PSI_FLOOR: f64 = 1e-300;

/// Relative slack used when comparing an argument against a closed support
/// end, so that `r/(r-1)` round-trips cannot fall outside `[1, r]`.
const END_SLACK: f64 = 8.0 * f64::EPSILON;

/// Conjugate exponent `p' = p/(p-1)`, with `1' = inf` and `inf' = 1`.
#[inline]
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// An interval of exponents `p >= 1`, possibly unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lo: f64,
    pub lo_closed: bool,
    #[serde(with = "crate::ext_real")]
    pub hi: f64,
    pub hi_closed: bool,
}

impl Support {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        Support { lo, lo_closed, hi, hi_closed }
    }

    pub fn is_empty(&self) -> bool {
        if self.lo > self.hi {
            // tolerate rounding of conjugate exponents on closed ends
            return !(self.lo_closed && self.hi_closed && self.hi.is_finite() && self.lo - self.hi <= 1e-9 * self.hi);
        }
        self.lo == self.hi && !(self.lo_closed && self.hi_closed)
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lo_closed { p >= self.lo } else { p > self.lo };
        let below = if self.hi_closed { p <= self.hi } else { p < self.hi };
        above && below
    }

    pub fn intersect(&self, other: &Support) -> Support {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Support { lo, lo_closed, hi, hi_closed }
    }

    /// The set `{p : p' in self}`.
    pub fn conjugate_preimage(&self) -> Support {
        Support {
            lo: conjugate_exponent(self.hi),
            lo_closed: self.hi_closed,
            hi: conjugate_exponent(self.lo),
            hi_closed: self.lo_closed,
        }
    }

    /// Restricts the lower end to `s` (closed).
    pub fn truncate_low(&self, s: f64) -> Support {
        self.intersect(&Support::new(s, true, f64::INFINITY, false))
    }
}

/// A generating function `psi: [1, b) -> (0, inf]`.
///
/// JSON form is tagged by `kind`, e.g. `{"kind":"power","m":2.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiFunction {
    /// `p^(1/m)` on `[1, inf)`.
    Power { m: f64 },
    /// `(b - p)^(-beta)` on `[1, b)`.
    FiniteSupport { b: f64, beta: f64 },
    /// `1` on `[1, r]`; its GLS is exactly `L_r`.
    Extremal { r: f64 },
    /// Knots `(p, psi)`, interpolated linearly in `(1/p, ln psi)`.
    Tabulated { points: Vec<[f64; 2]> },
    /// As `Tabulated`, but built from sample moments.
    Empirical {
        points: Vec<[f64; 2]>,
        sample_count: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `left(p) * right(p/(p-1))`.
    Product { left: Box<PsiFunction>, right: Box<PsiFunction> },
    /// `inner(p/(p-1))`.
    Dual { inner: Box<PsiFunction> },
}

impl PsiFunction {
    pub fn power(m: f64) -> Result<Self> {
        let f = PsiFunction::Power { m };
        f.validate()?;
        Ok(f)
    }

    pub fn finite_support(b: f64, beta: f64) -> Result<Self> {
        let f = PsiFunction::FiniteSupport { b, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn extremal(r: f64) -> Result<Self> {
        let f = PsiFunction::Extremal { r };
        f.validate()?;
        Ok(f)
    }

    pub fn tabulated(points: Vec<[f64; 2]>) -> Result<Self> {
        let f = PsiFunction::Tabulated { points };
        f.validate()?;
        Ok(f)
    }

    /// Parses and validates the JSON representation.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: PsiFunction = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("psi serialization is infallible")
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PsiFunction::Power { .. } => "power",
            PsiFunction::FiniteSupport { .. } => "finite_support",
            PsiFunction::Extremal { .. } => "extremal",
            PsiFunction::Tabulated { .. } => "tabulated",
            PsiFunction::Empirical { .. } => "empirical",
            PsiFunction::Product { .. } => "product",
            PsiFunction::Dual { .. } => "dual",
        }
    }

    /// Checks parameter ranges and knot tables, recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            PsiFunction::Power { m } => {
                if !(m.is_finite() && *m > 0.0) {
                    return Err(Error::invalid(format!("power: m must be positive, got {m}")));
                }
            }
            PsiFunction::FiniteSupport { b, beta } => {
                if !(b.is_finite() && *b > 1.0) {
                    return Err(Error::invalid(format!("finite_support: need 1 < b < inf, got {b}")));
                }
                if !(beta.is_finite() && *beta >= 0.0) {
                    return Err(Error::invalid(format!("finite_support: need beta >= 0, got {beta}")));
                }
            }
            PsiFunction::Extremal { r } => {
                if !(r.is_finite() && *r >= 1.0) {
                    return Err(Error::invalid(format!("extremal: need 1 <= r < inf, got {r}")));
                }
            }
            PsiFunction::Tabulated { points } | PsiFunction::Empirical { points, .. } => {
                validate_knots(points)?;
            }
            PsiFunction::Product { left, right } => {
                left.validate()?;
                right.validate()?;
            }
            PsiFunction::Dual { inner } => {
                inner.validate()?;
                if inner.support().is_bounded() {
                    return Err(Error::Unsupported("dual of a finite-support psi collapses to L_inf".into()));
                }
            }
        }
        if self.support().is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(())
    }

    /// Effective support: the set of `p` where the function is finite.
    pub fn support(&self) -> Support {
        match self {
            PsiFunction::Power { .. } => Support::new(1.0, true, f64::INFINITY, false),
            PsiFunction::FiniteSupport { b, .. } => Support::new(1.0, true, *b, false),
            PsiFunction::Extremal { r } => Support::new(1.0, true, *r, true),
            PsiFunction::Tabulated { points } | PsiFunction::Empirical { points, .. } => {
                let last = points.last().map_or(1.0, |k| k[0]);
                Support::new(1.0, true, last, true)
            }
            PsiFunction::Product { left, right } => left.support().intersect(&right.support().conjugate_preimage()),
            PsiFunction::Dual { inner } => {
                inner.support().conjugate_preimage().intersect(&Support::new(1.0, true, f64::INFINITY, true))
            }
        }
    }

    /// Finite upper end `b` of the support, or `inf`.
    pub fn support_bound(&self) -> f64 {
        self.support().hi
    }

    /// `ln psi(p)` for `p >= 1` (including `p = inf`); `+inf` off support.
    pub fn ln_eval(&self, p: f64) -> f64 {
        match self {
            PsiFunction::Power { m } => {
                if p.is_infinite() {
                    f64::INFINITY
                } else {
                    p.ln() / m
                }
            }
            PsiFunction::FiniteSupport { b, beta } => {
                if p >= *b {
                    f64::INFINITY
                } else if *beta == 0.0 {
                    0.0
                } else {
                    -beta * (b - p).ln()
                }
            }
            PsiFunction::Extremal { r } => {
                if p <= r * (1.0 + END_SLACK) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PsiFunction::Tabulated { points } | PsiFunction::Empirical { points, .. } => ln_interp(points, p),
            PsiFunction::Product { left, right } => {
                let l = left.ln_eval(p);
                if l == f64::INFINITY {
                    return l;
                }
                l + right.ln_eval(conjugate_exponent(p))
            }
            PsiFunction::Dual { inner } => inner.ln_eval(conjugate_exponent(p)),
        }
    }

    /// `psi(p)`; `+inf` off support.
    pub fn value(&self, p: f64) -> f64 {
        self.ln_eval(p).exp()
    }
}

fn validate_knots(points: &[[f64; 2]]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::invalid("tabulated psi needs at least one knot"));
    }
    for w in points.windows(2) {
        if !(w[1][0] > w[0][0]) {
            return Err(Error::invalid(format!(
                "tabulated knots must be strictly increasing in p ({} then {})",
                w[0][0], w[1][0]
            )));
        }
    }
    for k in points {
        if !(k[0] >= 1.0 && k[0].is_finite()) {
            return Err(Error::invalid(format!("tabulated knot p = {} outside [1, inf)", k[0])));
        }
        if !(k[1] > 0.0 && k[1].is_finite()) {
            return Err(Error::invalid(format!("tabulated value {} must be positive and finite", k[1])));
        }
    }
    Ok(())
}

/// Piecewise-linear interpolation of `ln psi` in `u = 1/p`. Constant below
/// the first knot, `+inf` beyond the last.
fn ln_interp(points: &[[f64; 2]], p: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if p > last[0] * (1.0 + END_SLACK) {
        return f64::INFINITY;
    }
    if p <= first[0] {
        return first[1].max(PSI_FLOOR).ln();
    }
    if p >= last[0] {
        return last[1].max(PSI_FLOOR).ln();
    }
    let i = points.partition_point(|k| k[0] <= p);
    let (a, b) = (points[i - 1], points[i]);
    let (ua, ub, u) = (1.0 / a[0], 1.0 / b[0], 1.0 / p);
    let t = (u - ua) / (ub - ua);
    let (la, lb) = (a[1].max(PSI_FLOOR).ln(), b[1].max(PSI_FLOOR).ln());
    la + t * (lb - la)
}

/// Evaluates `psi(p)`; `p < 1` (or `NaN`) is a domain error.
pub fn eval_psi(psi: &PsiFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("psi is defined for p >= 1, got {p}")));
    }
    Ok(psi.value(p))
}

/// The dual function `p -> psi(p/(p-1))`. Only for unbounded support.
pub fn dual_psi(psi: &PsiFunction) -> Result<PsiFunction> {
    if psi.support().is_bounded() {
        return Err(Error::Unsupported(format!(
            "dual of a psi with finite support b = {} degenerates to L_inf",
            psi.support_bound()
        )));
    }
    Ok(PsiFunction::Dual { inner: Box::new(psi.clone()) })
}

/// The product `zeta[psi, nu](p) = psi(p) * nu(p/(p-1))`.
pub fn product_zeta(psi: &PsiFunction, nu: &PsiFunction) -> PsiFunction {
    PsiFunction::Product { left: Box::new(psi.clone()), right: Box::new(nu.clone()) }
}

/// Where a moment table came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Sample { count: u64, seed: Option<u64> },
}

/// `L_p` norms `|zeta|_p` on an increasing grid of exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    entries: Vec<(f64, f64)>,
    pub provenance: Provenance,
}

/// Slack for Lyapunov monotonicity of `p -> |zeta|_p`.
const MONOTONE_SLACK: f64 = 1e-12;

impl MomentTable {
    pub fn new(entries: Vec<(f64, f64)>, provenance: Provenance) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("moment table is empty"));
        }
        for &(p, v) in &entries {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::domain(format!("moment exponent {p} outside [1, inf)")));
            }
            if !(v >= 0.0) {
                return Err(Error::invalid(format!("moment value {v} at p = {p} is negative")));
            }
        }
        for w in entries.windows(2) {
            let ((p0, v0), (p1, v1)) = (w[0], w[1]);
            if !(p1 > p0) {
                return Err(Error::invalid(format!("moment exponents must be strictly increasing ({p0} then {p1})")));
            }
            if v0 > v1 + MONOTONE_SLACK * v1.max(1.0) {
                return Err(Error::MomentMonotonicity { p_lo: p0, lo: v0, p_hi: p1, hi: v1 });
            }
        }
        Ok(MomentTable { entries, provenance })
    }

    /// Empirical `L_p` norms of a sample on the given exponent grid.
    pub fn from_samples(samples: &[f64], grid: &[f64], seed: Option<u64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("no samples"));
        }
        let logs: Vec<f64> = samples.iter().map(|x| x.abs().ln()).collect();
        let entries = grid.iter().map(|&p| (p, empirical_lp(&logs, p))).collect();
        MomentTable::new(entries, Provenance::Sample { count: samples.len() as u64, seed })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "p" || &headers[1] != "norm" {
            return Err(Error::Parse("moment table header must be `p,norm`".into()));
        }
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let p = crate::ext_real::parse_ext(&rec[0]).ok_or_else(|| Error::Parse(format!("bad p: {}", &rec[0])))?;
            let v =
                crate::ext_real::parse_ext(&rec[1]).ok_or_else(|| Error::Parse(format!("bad norm: {}", &rec[1])))?;
            entries.push((p, v));
        }
        MomentTable::new(entries, Provenance::Analytic)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["p", "norm"])?;
        for &(p, v) in &self.entries {
            wtr.write_record([fmt_f64(p), fmt_f64(v)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:?}")
    }
}

/// `(mean |x|^p)^(1/p)` from precomputed `ln|x|`, via a max-shifted
/// log-sum-exp with Neumaier summation.
pub(crate) fn empirical_lp(logs: &[f64], p: f64) -> f64 {
    let shift = logs.iter().fold(f64::NEG_INFINITY, |m, &l| m.max(p * l));
    if shift == f64::NEG_INFINITY {
        return 0.0;
    }
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &l in logs {
        let x = (p * l - shift).exp();
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    let mean_ln = (sum + comp).ln() + shift - (logs.len() as f64).ln();
    (mean_ln / p).exp()
}

/// Natural function of a moment table: tabulated `psi` through the table's
/// knots, floored at [`PSI_FLOOR`], supported up to the largest finite entry.
pub fn natural_from_moments(table: &MomentTable) -> Result<PsiFunction> {
    if !table.entries.iter().any(|&(p, v)| p > 1.0 && v.is_finite()) {
        return Err(Error::TrivialNatural);
    }
    let points: Vec<[f64; 2]> =
        table.entries.iter().take_while(|(_, v)| v.is_finite()).map(|&(p, v)| [p, v.max(PSI_FLOOR)]).collect();
    let f = match table.provenance {
        Provenance::Analytic => PsiFunction::Tabulated { points },
        Provenance::Sample { count, seed } => PsiFunction::Empirical { points, sample_count: count, seed },
    };
    f.validate()?;
    Ok(f)
}

/// Grid estimate of a GLS norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlsNorm {
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    /// Table exponent attaining the maximum, if any entry lies in the support.
    pub argmax_p: Option<f64>,
}

/// `max_p |zeta|_p / psi(p)` over the table grid. A lower estimate of the
/// true sup over `[1, b)`.
pub fn gls_norm(table: &MomentTable, psi: &PsiFunction) -> GlsNorm {
    let mut best = GlsNorm { value: 0.0, argmax_p: None };
    let mut best_ln = f64::NEG_INFINITY;
    for &(p, v) in &table.entries {
        let lp = psi.ln_eval(p);
        if lp == f64::INFINITY {
            continue;
        }
        let r = v.ln() - lp;
        if best.argmax_p.is_none() || r > best_ln {
            best_ln = r;
            best = GlsNorm { value: r.exp(), argmax_p: Some(p) };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn eval_examples() {
        let pw = PsiFunction::power(1.0).unwrap();
        assert_eq!(eval_psi(&pw, 2.0).unwrap(), 2.0);
        let fs = PsiFunction::finite_support(2.0, 1.0).unwrap();
        assert_eq!(eval_psi(&fs, 1.0).unwrap(), 1.0);
        assert_eq!(eval_psi(&fs, 2.5).unwrap(), f64::INFINITY);
        assert_eq!(eval_psi(&fs, 2.0).unwrap(), f64::INFINITY);
        assert!(matches!(eval_psi(&pw, 0.5), Err(Error::Domain(_))));
        assert!(eval_psi(&pw, f64::NAN).is_err());
    }

    #[test]
    fn extremal_is_one_then_infinite() {
        let e = PsiFunction::extremal(4.0).unwrap();
        assert_eq!(e.value(1.0), 1.0);
        assert_eq!(e.value(4.0), 1.0);
        assert_eq!(e.value(4.5), f64::INFINITY);
    }

    #[test]
    fn dual_examples() {
        for m in [0.5, 1.0, 2.0, 3.0] {
            let d = dual_psi(&PsiFunction::power(m).unwrap()).unwrap();
            assert!(rel(d.value(2.0), 2f64.powf(1.0 / m)) < 1e-15);
        }
        let d = dual_psi(&PsiFunction::power(1.0).unwrap()).unwrap();
        assert!(rel(d.value(4.0), 4.0 / 3.0) < 1e-15);
        let dd = dual_psi(&dual_psi(&PsiFunction::power(2.0).unwrap()).unwrap()).unwrap();
        assert!(rel(dd.value(3.0), 3f64.sqrt()) < 1e-12);
    }

    #[test]
    fn dual_of_finite_support_rejected() {
        let fs = PsiFunction::finite_support(3.0, 1.0).unwrap();
        assert!(matches!(dual_psi(&fs), Err(Error::Unsupported(_))));
        let json = r#"{"kind":"dual","inner":{"kind":"extremal","r":4.0}}"#;
        assert!(matches!(PsiFunction::from_json(json), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dual_at_infinity_is_psi_at_one() {
        let d = dual_psi(&PsiFunction::power(1.0).unwrap()).unwrap();
        assert_eq!(d.value(f64::INFINITY), 1.0);
        assert_eq!(d.value(1.0), f64::INFINITY);
    }

    #[test]
    fn product_examples() {
        let p1 = PsiFunction::power(1.0).unwrap();
        let p2 = PsiFunction::power(2.0).unwrap();
        let fs = PsiFunction::finite_support(2.0, 1.0).unwrap();
        assert!(rel(product_zeta(&p1, &p1).value(2.0), 4.0) < 1e-15);
        assert!(rel(product_zeta(&p2, &p2).value(2.0), 2.0) < 1e-15);
        assert!(rel(product_zeta(&p1, &fs).value(3.0), 6.0) < 1e-14);
        // nu(p') infinite for p' >= 2, i.e. p <= 2
        assert_eq!(product_zeta(&p1, &fs).value(1.5), f64::INFINITY);
    }

    #[test]
    fn product_support_excludes_conjugate_range() {
        let p1 = PsiFunction::power(1.0).unwrap();
        let fs = PsiFunction::finite_support(4.0, 1.0).unwrap();
        let s = product_zeta(&p1, &fs).support();
        assert!(rel(s.lo, 4.0 / 3.0) < 1e-15);
        assert!(!s.lo_closed);
        assert!(s.hi.is_infinite());
    }

    #[test]
    fn natural_constant_table() {
        let t = MomentTable::new(vec![(1.0, 1.0), (2.0, 1.0), (4.0, 1.0)], Provenance::Analytic).unwrap();
        let f = natural_from_moments(&t).unwrap();
        for p in [1.0, 1.3, 2.0, 3.7, 4.0] {
            assert!(rel(f.value(p), 1.0) < 1e-15);
        }
        assert_eq!(f.value(4.1), f64::INFINITY);
        assert_eq!(f.support_bound(), 4.0);
    }

    #[test]
    fn non_monotone_table_rejected() {
        let e = MomentTable::new(vec![(1.0, 2.0), (2.0, 1.0)], Provenance::Analytic);
        assert!(matches!(e, Err(Error::MomentMonotonicity { .. })));
    }

    #[test]
    fn trivial_natural_rejected() {
        let t = MomentTable::new(vec![(1.0, 1.0)], Provenance::Analytic).unwrap();
        assert_eq!(natural_from_moments(&t), Err(Error::TrivialNatural));
    }

    #[test]
    fn interpolation_is_linear_in_reciprocal_log() {
        let f = PsiFunction::tabulated(vec![[1.0, 1.0], [4.0, 8.0]]).unwrap();
        // u = 1/2 is 2/3 of the way from u = 1 to u = 1/4
        let expect = (2.0 / 3.0 * 8f64.ln()).exp();
        assert!(rel(f.value(2.0), expect) < 1e-14);
    }

    #[test]
    fn gls_norm_examples() {
        let pw = PsiFunction::power(3.0).unwrap();
        let c = 2.5;
        let t = MomentTable::new(vec![(1.0, c), (2.0, c), (8.0, c), (32.0, c)], Provenance::Analytic).unwrap();
        let n = gls_norm(&t, &pw);
        assert!(rel(n.value, c) < 1e-15);
        assert_eq!(n.argmax_p, Some(1.0));

        let grid = [1.0, 1.5, 2.0, 3.0, 5.0, 9.0];
        let own = MomentTable::new(grid.iter().map(|&p| (p, pw.value(p))).collect(), Provenance::Analytic).unwrap();
        assert!(rel(gls_norm(&own, &pw).value, 1.0) < 1e-14);

        let rad = MomentTable::from_samples(&[1.0, -1.0, 1.0, -1.0], &grid, None).unwrap();
        let n = gls_norm(&rad, &PsiFunction::power(2.0).unwrap());
        assert!(rel(n.value, 1.0) < 1e-15);
        assert_eq!(n.argmax_p, Some(1.0));
    }

    #[test]
    fn empirical_lp_large_p_is_stable() {
        let xs = [1e-3, 2.0, 3.0];
        let logs: Vec<f64> = xs.iter().map(|x: &f64| x.abs().ln()).collect();
        let v = empirical_lp(&logs, 400.0);
        // dominated by the max term: 3 * (1/3)^(1/400)
        assert!(rel(v, 3.0 * (1.0f64 / 3.0).powf(1.0 / 400.0)) < 1e-12);
        assert_eq!(empirical_lp(&[f64::NEG_INFINITY; 3], 2.0), 0.0);
    }

    #[test]
    fn csv_roundtrip() {
        let t = MomentTable::new(vec![(1.0, 0.5), (2.0, 0.75)], Provenance::Analytic).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("p,norm\n"));
        let back = MomentTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.entries(), t.entries());
        assert!(MomentTable::read_csv("x,y\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn json_shapes() {
        let f = PsiFunction::from_json(r#"{"kind":"finite_support","b":3.0,"beta":1.5}"#).unwrap();
        assert_eq!(f, PsiFunction::FiniteSupport { b: 3.0, beta: 1.5 });
        let g = PsiFunction::from_json(
            r#"{"kind":"product","left":{"kind":"power","m":2.0},"right":{"kind":"dual","inner":{"kind":"power","m":2.0}}}"#,
        )
        .unwrap();
        assert_eq!(g.kind_name(), "product");
        assert!(PsiFunction::from_json(r#"{"kind":"power","m":-1}"#).is_err());
        assert!(PsiFunction::from_json(r#"{"kind":"tabulated","points":[[2,1],[1,1]]}"#).is_err());
        assert!(PsiFunction::from_json(r#"{"kind":"tabulated","points":[[0.5,1]]}"#).is_err());
    }
}
