//! Root finding for the cutoff `σ_c != 1` where `Sp(PD(σ))` crosses 1.

use serde::Serialize;

use super::{DriftError, RECURRENCE_TOL};
use crate::env::{stationary_distribution, EnvironmentSpec};
use crate::spectral::{build_pd, det_i_minus_pd, spectral_radius};

const FD_STEP: f64 = 1e-6;
const SIGMA_MIN: f64 = 1e-9;
const SIGMA_MAX: f64 = 1e9;
const WIDTH_TOL: f64 = 1e-13;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffResult {
    pub sigma_cutoff: f64,
    pub p_cutoff: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `Sp(PD) < 1` all the way to the search limit: the drift never vanishes
    /// on that side, and `σ_c` is reported as `0` or `∞`.
    pub unbounded: bool,
}

fn sp(spec: &EnvironmentSpec, sigma: f64) -> Result<f64, DriftError> {
    Ok(spectral_radius(&build_pd(spec, sigma)?.entries)?)
}

/// Locates `σ_c`. The sign of `dSp/dσ` at `σ = 1` picks the side (the series
/// converges between 1 and `σ_c`), the bracket grows geometrically in
/// `log σ`, and bisection runs until the bracket is below `1e-13` relative width.
pub fn cutoff(spec: &EnvironmentSpec) -> Result<CutoffResult, DriftError> {
    let e_u0 = stationary_distribution(spec)?.mean_sign(spec);
    if e_u0.abs() < RECURRENCE_TOL {
        return Err(DriftError::NoCutoff(e_u0));
    }
    let slope = (sp(spec, 1.0 + FD_STEP)? - sp(spec, 1.0 - FD_STEP)?) / (2.0 * FD_STEP);
    // Sp increases through 1 at σ = 1, so the convergent side is below 1.
    let dir = if slope > 0.0 { -1.0 } else { 1.0 };

    let inside_test = |sigma: f64| -> Result<bool, DriftError> {
        let r = sp(spec, sigma)?;
        if (r - 1.0).abs() < 1e-10 {
            // Too close to call from the radius; the determinant is positive
            // strictly inside because I - PD is then an M-matrix.
            Ok(det_i_minus_pd(spec, sigma)? > 0.0)
        } else {
            Ok(r < 1.0)
        }
    };

    let mut log_step = FD_STEP;
    let mut inner = (dir * log_step).exp();
    if !inside_test(inner)? {
        return Err(DriftError::CutoffNotBracketed);
    }
    let mut iterations = 0;
    let outer = loop {
        log_step *= 2.0;
        let candidate = (dir * log_step).exp();
        iterations += 1;
        if !(SIGMA_MIN..=SIGMA_MAX).contains(&candidate) {
            let limit = if dir < 0.0 { SIGMA_MIN } else { SIGMA_MAX };
            if inside_test(limit)? {
                let (sigma_cutoff, p_cutoff) = if dir < 0.0 {
                    (0.0, 1.0)
                } else {
                    (f64::INFINITY, 0.0)
                };
                return Ok(CutoffResult {
                    sigma_cutoff,
                    p_cutoff,
                    bracket: (inner.min(limit), inner.max(limit)),
                    iterations,
                    unbounded: true,
                });
            }
            break limit;
        }
        if !inside_test(candidate)? {
            break candidate;
        }
        inner = candidate;
    };

    let (mut a, mut b) = (inner, outer);
    let mut sigma = 0.5 * (a + b);
    for _ in 0..MAX_BISECTIONS {
        iterations += 1;
        sigma = 0.5 * (a + b);
        if det_i_minus_pd(spec, sigma)? == 0.0 {
            break;
        }
        if inside_test(sigma)? {
            a = sigma;
        } else {
            b = sigma;
        }
        if (a - b).abs() < WIDTH_TOL * a.abs().max(b.abs()).max(1.0) {
            sigma = 0.5 * (a + b);
            break;
        }
    }
    Ok(CutoffResult {
        sigma_cutoff: sigma,
        p_cutoff: 1.0 / (1.0 + sigma),
        bracket: (a.min(b), a.max(b)),
        iterations,
        unbounded: false,
    })
}
