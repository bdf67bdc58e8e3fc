//! Regime classification and drift of the swap-model walk.
//!
//! With `σ = (1-p)/p`, the walk is transient to `+∞` when `E[U_0] log σ < 0`
//! and to `-∞` when it is positive. The drift is `1/(2E[S]-1)` when
//! `E[S] = π Σ (PD(σ))^n 1` is finite, `-1/(2E[F]-1)` when the backward series
//! `E[F]` (same series at `σ^{-1}`) is finite, and zero otherwise.

mod closed;
mod cutoff;

pub use closed::{
    drift_closed_iid, drift_closed_markov, drift_closed_markov_corr, drift_closed_movavg,
    drift_closed_two_dep, movavg_det_polynomial, movavg_p_cutoff, piecewise_drift, regime_case,
    two_dep_e_u0, two_dep_positive_branch,
};
pub use cutoff::{cutoff, CutoffResult};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::env::{stationary_distribution, EnvError, EnvironmentSpec};
use crate::spectral::{build_pd, series_sum_with, spectral_radius, SpectralError};

/// `|E[U_0]|` or `|p - 1/2|` below this counts as exactly zero.
pub const RECURRENCE_TOL: f64 = 1e-12;
/// Outside `[P_EXTREME, 1 - P_EXTREME]` the drift is not evaluated.
pub const P_EXTREME: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DriftError {
    #[error("p = {0} must lie in (0, 1)")]
    BadP(f64),
    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("no cutoff: E[U0]=0 (E[U0] = {0:e})")]
    NoCutoff(f64),
    #[error("no sign change of det(I - PD) for sigma in [1e-9, 1e9]")]
    CutoffNotBracketed,
    #[error("no closed form for {0}")]
    NoClosedForm(String),
    #[error("regime/drift mismatch at p = {p}: E[U0] = {e_u0}, drift = {drift}")]
    Inconsistent { p: f64, e_u0: f64, drift: f64 },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// The five cases shared by every family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `1a`
    TransientPlusWithDrift,
    /// `1b`
    TransientMinusWithDrift,
    /// `2a`
    TransientPlusZeroDrift,
    /// `2b`
    TransientMinusZeroDrift,
    /// `3`
    Recurrent,
}

impl Regime {
    pub fn code(self) -> &'static str {
        match self {
            Regime::TransientPlusWithDrift => "1a",
            Regime::TransientMinusWithDrift => "1b",
            Regime::TransientPlusZeroDrift => "2a",
            Regime::TransientMinusZeroDrift => "2b",
            Regime::Recurrent => "3",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Some(match code {
            "1a" => Regime::TransientPlusWithDrift,
            "1b" => Regime::TransientMinusWithDrift,
            "2a" => Regime::TransientPlusZeroDrift,
            "2b" => Regime::TransientMinusZeroDrift,
            "3" => Regime::Recurrent,
            _ => return None,
        })
    }

    pub fn has_drift(self) -> bool {
        matches!(
            self,
            Regime::TransientPlusWithDrift | Regime::TransientMinusWithDrift
        )
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub drift: f64,
    pub e_u0: f64,
    pub e_log_sigma0: f64,
    /// `Sp(PD(σ))`
    pub sp_forward: f64,
    /// `Sp(PD(σ^{-1}))`
    pub sp_backward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GenericMatrix,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftResult {
    pub value: f64,
    pub method: Method,
    pub sp_forward: Option<f64>,
    pub sp_backward: Option<f64>,
    pub expected_s: Option<f64>,
    pub expected_f: Option<f64>,
    /// A spectral radius landed within the convergence slack of 1.
    pub boundary: bool,
}

impl DriftResult {
    pub fn closed(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            sp_forward: None,
            sp_backward: None,
            expected_s: None,
            expected_f: None,
            boundary: false,
        }
    }
}

fn check_p(p: f64) -> Result<f64, DriftError> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(DriftError::BadP(p))
    }
}

pub fn odds(p: f64) -> f64 {
    (1.0 - p) / p
}

/// Drift through `E[S]` / `E[F]` evaluated as linear solves.
pub fn drift_generic(spec: &EnvironmentSpec, p: f64) -> Result<DriftResult, DriftError> {
    check_p(p)?;
    let pi = stationary_distribution(spec)?;
    let sigma = odds(p);
    if !(P_EXTREME..=1.0 - P_EXTREME).contains(&p) {
        let forward = spectral_radius(&build_pd(spec, sigma)?.entries)?;
        let backward = spectral_radius(&build_pd(spec, 1.0 / sigma)?.entries)?;
        return Ok(DriftResult {
            value: 0.0,
            method: Method::GenericMatrix,
            sp_forward: Some(forward),
            sp_backward: Some(backward),
            expected_s: None,
            expected_f: None,
            boundary: false,
        });
    }
    let s = series_sum_with(spec, &pi, sigma)?;
    let f = series_sum_with(spec, &pi, 1.0 / sigma)?;
    let value = if s.converged {
        1.0 / (2.0 * s.value - 1.0)
    } else if f.converged {
        -1.0 / (2.0 * f.value - 1.0)
    } else {
        0.0
    };
    Ok(DriftResult {
        value,
        method: Method::GenericMatrix,
        sp_forward: Some(s.spectral_radius),
        sp_backward: Some(f.spectral_radius),
        expected_s: Some(s.value),
        expected_f: Some(f.value),
        boundary: s.boundary || f.boundary,
    })
}

pub fn classify(spec: &EnvironmentSpec, p: f64) -> Result<RegimeReport, DriftError> {
    check_p(p)?;
    let pi = stationary_distribution(spec)?;
    let e_u0 = pi.mean_sign(spec);
    let sigma = odds(p);
    let e_log_sigma0 = e_u0 * sigma.ln();
    let generic = drift_generic(spec, p)?;
    let sp_forward = generic.sp_forward.unwrap_or(f64::NAN);
    let sp_backward = generic.sp_backward.unwrap_or(f64::NAN);
    if e_u0.abs() < RECURRENCE_TOL || (p - 0.5).abs() < RECURRENCE_TOL {
        return Ok(RegimeReport {
            regime: Regime::Recurrent,
            drift: 0.0,
            e_u0,
            e_log_sigma0,
            sp_forward,
            sp_backward,
        });
    }
    let drift = generic.value;
    let to_plus = e_log_sigma0 < 0.0;
    let regime = match (to_plus, drift) {
        (true, d) if d > 0.0 => Regime::TransientPlusWithDrift,
        (true, 0.0) => Regime::TransientPlusZeroDrift,
        (false, d) if d < 0.0 => Regime::TransientMinusWithDrift,
        (false, 0.0) => Regime::TransientMinusZeroDrift,
        _ => return Err(DriftError::Inconsistent { p, e_u0, drift }),
    };
    Ok(RegimeReport {
        regime,
        drift,
        e_u0,
        e_log_sigma0,
        sp_forward,
        sp_backward,
    })
}
