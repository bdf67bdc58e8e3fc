//! Tilted transition matrices `PD(σ)`, their Perron root, and the geometric
//! series `E[S] = π Σ (PD)^n 1`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::env::{stationary_distribution, EnvError, EnvironmentSpec, StationaryDistribution};

/// `Sp(PD) < 1` is decided with this slack; closer values are boundary cases.
pub const CONVERGENCE_SLACK: f64 = 1e-12;
pub const POWER_TOL: f64 = 1e-13;
pub const POWER_MAX_ITER: usize = 100_000;
/// Shift, relative to the current root estimate, that makes periodic chains primitive.
const POWER_SHIFT: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("sigma must be positive and finite, got {0}")]
    BadSigma(f64),
    #[error(
        "power iteration did not converge after {iterations} iterations (last estimate {last})"
    )]
    NoConvergence { iterations: usize, last: f64 },
    #[error("matrix must be square and nonnegative")]
    BadMatrix,
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// `PD[y][y'] = P[y][y'] σ^{g(y')}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdMatrix {
    pub entries: DMatrix<f64>,
    pub sigma: f64,
    /// Label of the environment it was built from.
    pub source: String,
}

pub fn build_pd(spec: &EnvironmentSpec, sigma: f64) -> Result<PdMatrix, SpectralError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SpectralError::BadSigma(sigma));
    }
    let inv = 1.0 / sigma;
    let weights: Vec<f64> = spec
        .signs()
        .iter()
        .map(|&g| if g > 0 { sigma } else { inv })
        .collect();
    let p = spec.transition();
    let entries = DMatrix::from_fn(spec.m(), spec.m(), |i, j| p[(i, j)] * weights[j]);
    Ok(PdMatrix {
        entries,
        sigma,
        source: spec.label().to_string(),
    })
}

/// Perron root of a nonnegative irreducible matrix.
///
/// Power iteration on `M/s + cI` with `s` the largest row sum and `c` half the
/// current root estimate. The iterate stays strictly positive, so the Collatz-Wielandt
/// ratios `min_i (Mx)_i/x_i <= ρ <= max_i (Mx)_i/x_i` bracket the root; the
/// loop stops once the bracket is narrower than `POWER_TOL` (relative).
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64, SpectralError> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n || m.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(SpectralError::BadMatrix);
    }
    let scale = m.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let a = m / scale;
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut estimate = f64::NAN;
    for _ in 0..POWER_MAX_ITER {
        let y = &a * &x;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        estimate = 0.5 * (lo + hi);
        if hi - lo <= POWER_TOL * hi {
            return Ok(estimate * scale);
        }
        // Shifted step keeps every component strictly positive.
        let mut next = y + &x * (POWER_SHIFT * estimate);
        let norm = next.sum();
        next /= norm;
        x = next;
    }
    Err(SpectralError::NoConvergence {
        iterations: POWER_MAX_ITER,
        last: estimate * scale,
    })
}

/// Outcome of evaluating `π Σ_n (PD)^n 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// Finite sum, or `f64::INFINITY` when the series diverges.
    pub value: f64,
    pub spectral_radius: f64,
    pub converged: bool,
    /// `Sp(PD)` within `CONVERGENCE_SLACK` of 1, or the linear solve broke down.
    pub boundary: bool,
}

impl SeriesValue {
    fn divergent(spectral_radius: f64, boundary: bool) -> Self {
        Self {
            value: f64::INFINITY,
            spectral_radius,
            converged: false,
            boundary,
        }
    }
}

pub fn series_sum(spec: &EnvironmentSpec, sigma: f64) -> Result<SeriesValue, SpectralError> {
    let pi = stationary_distribution(spec)?;
    series_sum_with(spec, &pi, sigma)
}

/// [`series_sum`] with a precomputed stationary law.
pub fn series_sum_with(
    spec: &EnvironmentSpec,
    pi: &StationaryDistribution,
    sigma: f64,
) -> Result<SeriesValue, SpectralError> {
    let pd = build_pd(spec, sigma)?;
    let sp = spectral_radius(&pd.entries)?;
    if sp > 1.0 + CONVERGENCE_SLACK {
        return Ok(SeriesValue::divergent(sp, false));
    }
    if sp >= 1.0 - CONVERGENCE_SLACK {
        return Ok(SeriesValue::divergent(sp, true));
    }
    let m = spec.m();
    let system = DMatrix::<f64>::identity(m, m) - pd.entries;
    let ones = DVector::from_element(m, 1.0);
    let Some(x) = system.lu().solve(&ones) else {
        return Ok(SeriesValue::divergent(sp, true));
    };
    let value: f64 = pi.pi.iter().zip(x.iter()).map(|(p, x)| p * x).sum();
    if !value.is_finite() || value < 1.0 - 1e-9 {
        return Ok(SeriesValue::divergent(sp, true));
    }
    Ok(SeriesValue {
        value,
        spectral_radius: sp,
        converged: true,
        boundary: false,
    })
}

/// `Σ_{n=0}^{N} π (PD)^n 1` by repeated matrix-vector products.
pub fn truncated_series(
    spec: &EnvironmentSpec,
    sigma: f64,
    terms: usize,
) -> Result<f64, SpectralError> {
    let pi = stationary_distribution(spec)?;
    let pd = build_pd(spec, sigma)?;
    let pi = DVector::from_column_slice(&pi.pi);
    let mut v = DVector::from_element(spec.m(), 1.0);
    let mut total = pi.dot(&v);
    for _ in 0..terms {
        v = &pd.entries * v;
        total += pi.dot(&v);
    }
    Ok(total)
}

/// `det(I - PD(σ))` via LU.
pub fn det_i_minus_pd(spec: &EnvironmentSpec, sigma: f64) -> Result<f64, SpectralError> {
    let pd = build_pd(spec, sigma)?;
    let m = spec.m();
    Ok((DMatrix::<f64>::identity(m, m) - pd.entries)
        .lu()
        .determinant())
}
