//! Covariance bounds for variables measurable with respect to mixing
//! sigma-fields.
//!
//! Classical bounds act on `L_p` norms ([`classical`]); the GLS bounds act on
//! GLS norms and reduce to one- and two-dimensional sups over exponents
//! ([`gls`]); [`closed_form`] evaluates the published closed forms for the
//! power and finite-support families.
//!
//! Every bound returns a [`BoundReport`]. An infeasible bound is reported as
//! `value = +inf, feasible = false` rather than as an error, so campaigns can
//! take minima across theorems.

use serde::Serialize;

pub mod classical;
pub mod closed_form;
pub mod gls;

pub use classical::{davydov_bound, holder_bound, ibragimov_bound};
pub use closed_form::{example_bounds, ExampleFamily};
pub use gls::{
    factorization_check, generic_bound, gls_dual_pair_bound, gls_identical_bound, gls_strong_bound, gls_uniform_bound,
    gls_uniform_bound_fast, uniform_phi_grid, uniform_phi_theta, BoundDomain, FactorizationCase, FactorizationReport,
    Kernel, UniformPhi,
};

/// Which inequality produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    #[serde(rename = "davydov")]
    Davydov,
    #[serde(rename = "ibragimov")]
    Ibragimov,
    #[serde(rename = "holder")]
    Holder,
    #[serde(rename = "gls_strong")]
    GlsStrong,
    #[serde(rename = "gls_dual_pair")]
    GlsDualPair,
    #[serde(rename = "gls_uniform")]
    GlsUniform,
    #[serde(rename = "gls_identical")]
    GlsIdentical,
    /// Power / power closed form.
    #[serde(rename = "example_5_1")]
    PowerPower,
    /// Finite / finite support closed form.
    #[serde(rename = "example_5_2")]
    FiniteFinite,
    /// Power / finite support closed form.
    #[serde(rename = "example_5_3")]
    PowerFinite,
    /// GLS variable against a plain `L_q` variable.
    #[serde(rename = "example_5_4")]
    Combined,
    #[serde(rename = "generic")]
    Generic,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Davydov => "davydov",
            Theorem::Ibragimov => "ibragimov",
            Theorem::Holder => "holder",
            Theorem::GlsStrong => "gls_strong",
            Theorem::GlsDualPair => "gls_dual_pair",
            Theorem::GlsUniform => "gls_uniform",
            Theorem::GlsIdentical => "gls_identical",
            Theorem::PowerPower => "example_5_1",
            Theorem::FiniteFinite => "example_5_2",
            Theorem::PowerFinite => "example_5_3",
            Theorem::Combined => "example_5_4",
            Theorem::Generic => "generic",
        }
    }
}

/// Exponents at which the optimizer attained the bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct OptimizerTrace {
    pub p: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    pub theorem: Theorem,
    pub optimizer_trace: OptimizerTrace,
    pub feasible: bool,
    pub notes: Vec<String>,
    /// The same bound computed along an independent route, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", with = "crate::ext_real::option")]
    pub numeric_check: Option<f64>,
}

impl BoundReport {
    pub(crate) fn feasible(theorem: Theorem, value: f64) -> Self {
        BoundReport {
            value,
            theorem,
            optimizer_trace: OptimizerTrace::default(),
            feasible: true,
            notes: Vec::new(),
            numeric_check: None,
        }
    }

    pub(crate) fn infeasible(theorem: Theorem, why: impl Into<String>) -> Self {
        BoundReport {
            value: f64::INFINITY,
            theorem,
            optimizer_trace: OptimizerTrace::default(),
            feasible: false,
            notes: vec![why.into()],
            numeric_check: None,
        }
    }

    pub(crate) fn with_trace(mut self, p: Option<f64>, q: Option<f64>) -> Self {
        self.optimizer_trace = OptimizerTrace { p, q };
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

pub(crate) fn check_unit(name: &str, x: f64) -> crate::Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(crate::Error::domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

pub(crate) fn check_norm(name: &str, x: f64) -> crate::Result<()> {
    if !(x >= 0.0) {
        return Err(crate::Error::domain(format!("{name} must be >= 0, got {x}")));
    }
    Ok(())
}
