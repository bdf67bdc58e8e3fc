//! Closed-form drifts for the iid, Markov, 2-dependent and moving-average
//! environments.
//!
//! Every family follows the same case analysis. Let `p_c` be the cutoff on the
//! side of `1/2` where the walk drifts to `+∞`. Then the drift is
//! `f(p)` for `p` strictly between `1/2` and `p_c`, `-f(1-p)` for `p` strictly
//! between `1 - p_c` and `1/2`, and zero elsewhere; `f` is the family's
//! positive-branch formula.

use super::{DriftError, Regime, RECURRENCE_TOL};
use crate::env::{MarkovParams, TwoDepParams};

fn unit(name: &'static str, value: f64) -> Result<f64, DriftError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(DriftError::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// Open interval test; points within `RECURRENCE_TOL` of an end count as the
/// end itself, so cutoffs computed as `1 - p_c` land on the closed side.
fn strictly_between(x: f64, a: f64, b: f64) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    lo + RECURRENCE_TOL < x && x < hi - RECURRENCE_TOL
}

/// Regime from the sign of `E[U_0]` and the cutoff `p_c`.
pub fn regime_case(e_u0: f64, p: f64, p_cutoff: f64) -> Regime {
    if e_u0.abs() < RECURRENCE_TOL || (p - 0.5).abs() < RECURRENCE_TOL {
        return Regime::Recurrent;
    }
    let to_plus = (e_u0 > 0.0) == (p > 0.5);
    match (to_plus, to_plus && strictly_between(p, 0.5, p_cutoff)) {
        (true, true) => Regime::TransientPlusWithDrift,
        (true, false) => Regime::TransientPlusZeroDrift,
        (false, _) if strictly_between(p, 0.5, 1.0 - p_cutoff) => Regime::TransientMinusWithDrift,
        (false, _) => Regime::TransientMinusZeroDrift,
    }
}

/// Applies the shared case analysis to a positive-branch formula.
pub fn piecewise_drift(e_u0: f64, p: f64, p_cutoff: f64, branch: impl Fn(f64) -> f64) -> f64 {
    let v = match regime_case(e_u0, p, p_cutoff) {
        Regime::TransientPlusWithDrift => branch(p),
        Regime::TransientMinusWithDrift => -branch(1.0 - p),
        _ => 0.0,
    };
    // No negative zero at the cutoff.
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Iid environment with `P(U = 1) = alpha`; `alpha` may be 0 or 1
/// (deterministic environment).
pub fn drift_closed_iid(alpha: f64, p: f64) -> Result<f64, DriftError> {
    unit("alpha", alpha)?;
    unit("p", p)?;
    let branch = |p: f64| (2.0 * p - 1.0) * (alpha - p) / (alpha * (1.0 - p) + (1.0 - alpha) * p);
    Ok(piecewise_drift(2.0 * alpha - 1.0, p, alpha, branch))
}

pub fn drift_closed_markov(params: MarkovParams, p: f64) -> Result<f64, DriftError> {
    unit("p", p)?;
    let (a, b) = (params.a(), params.b());
    let tilt = (a - b) / (a + b);
    let branch = |p: f64| {
        (2.0 * p - 1.0) * ((1.0 - b) * (1.0 - p) - (1.0 - a) * p)
            / ((b + tilt) * (1.0 - p) + (a - tilt) * p)
    };
    let p_cutoff = (1.0 - b) / ((1.0 - a) + (1.0 - b));
    Ok(piecewise_drift(tilt, p, p_cutoff, branch))
}

/// Markov drift in terms of `alpha = P(U = 1)` and lag-one correlation `rho`.
///
/// `alpha` in `{0, 1}` is the deterministic environment. Otherwise
/// `a = (1-rho) alpha` and `b = (1-rho)(1-alpha)` must lie in `[0, 1]`.
pub fn drift_closed_markov_corr(alpha: f64, rho: f64, p: f64) -> Result<f64, DriftError> {
    unit("alpha", alpha)?;
    unit("p", p)?;
    if !(-1.0..1.0).contains(&rho) {
        return Err(DriftError::OutOfRange {
            name: "rho",
            value: rho,
            range: "[-1, 1)",
        });
    }
    let a = (1.0 - rho) * alpha;
    let b = (1.0 - rho) * (1.0 - alpha);
    if a > 1.0 || b > 1.0 {
        return Err(DriftError::Env(crate::env::EnvError::Infeasible(format!(
            "(alpha, rho) = ({alpha}, {rho}) gives a = {a}, b = {b}"
        ))));
    }
    let p_cutoff = if alpha == 0.0 || alpha == 1.0 {
        alpha
    } else {
        (1.0 - b) / ((1.0 - a) + (1.0 - b))
    };
    let branch = |p: f64| {
        (2.0 * p - 1.0) * (alpha - p + rho * (1.0 - alpha - p))
            / ((alpha * (1.0 - p) + (1.0 - alpha) * p) * (1.0 + rho) - rho)
    };
    Ok(piecewise_drift(2.0 * alpha - 1.0, p, p_cutoff, branch))
}

/// `E[U_0]` of the 2-dependent environment.
pub fn two_dep_e_u0(params: &TwoDepParams) -> f64 {
    let plus = params.a_minus * (1.0 - params.b_minus + params.b_plus);
    let minus = params.b_plus * (1.0 - params.a_plus + params.a_minus);
    (plus - minus) / (plus + minus)
}

/// Positive-branch quotient
/// `(2p-1) d p(1-p)((1-B)(1-p) - (1-A)p) / (c0 + c1 p + c2 p^2 + c3 p^3)`.
pub fn two_dep_positive_branch(params: &TwoDepParams, p: f64) -> f64 {
    let TwoDepParams {
        a_minus: am,
        a_plus: ap,
        b_minus: bm,
        b_plus: bp,
    } = *params;
    let big_a = params.big_a();
    let big_b = params.big_b();
    let d = am * (bm - bp - 1.0) + bp * (ap - am - 1.0);
    let c0 = 2.0 * am * bp * (bm - bp);
    let c3 = (big_b - big_a) * (2.0 - big_a - big_b);
    let c1 = -c0 * (2.0 + ap - am) + (big_b - big_a) * (1.0 - big_b) - 2.0 * am * bp;
    let c2 = -c0 - c1 - c3 + 2.0 * am * bp * (ap - am);
    let numerator =
        (2.0 * p - 1.0) * d * p * (1.0 - p) * ((1.0 - big_b) * (1.0 - p) - (1.0 - big_a) * p);
    numerator / (c0 + p * (c1 + p * (c2 + p * c3)))
}

pub fn drift_closed_two_dep(params: &TwoDepParams, p: f64) -> Result<f64, DriftError> {
    unit("p", p)?;
    let (big_a, big_b) = (params.big_a(), params.big_b());
    let p_cutoff = (1.0 - big_b) / ((1.0 - big_a) + (1.0 - big_b));
    Ok(piecewise_drift(two_dep_e_u0(params), p, p_cutoff, |q| {
        two_dep_positive_branch(params, q)
    }))
}

/// `det(I - PD(σ))` for the moving-average environment, as a Laurent
/// polynomial in `σ`.
pub fn movavg_det_polynomial(alpha: f64, sigma: f64) -> f64 {
    let a = alpha;
    let q = 1.0 - a;
    let s = sigma;
    let s2 = s * s;
    let s3 = s2 * s;
    -a * q * q / s3 + a * a * q * q / s2 - q * (q + a * a) / s + 1.0
        - 2.0 * a * a * q * q
        - a * a * q * s3
        + a * a * q * q * s2
        - a * (q + a * a) * s
}

/// Cutoff `p_c = 1/(1 + σ_c)` of the moving-average environment, with `σ_c`
/// the root `!= 1` of [`movavg_det_polynomial`].
///
/// The polynomial is concave in `σ` with roots `1` and `σ_c`, so it is
/// positive strictly between them; `σ_c < 1` iff `alpha > 1/2`.
pub fn movavg_p_cutoff(alpha: f64) -> Result<f64, DriftError> {
    unit("alpha", alpha)?;
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(alpha);
    }
    if (alpha - 0.5).abs() < RECURRENCE_TOL {
        return Err(DriftError::NoCutoff(0.0));
    }
    let f = |s: f64| movavg_det_polynomial(alpha, s);
    // Walk away from 1 in log-space until the polynomial turns negative.
    let dir = if alpha > 0.5 { -1.0 } else { 1.0 };
    let mut inside = 1.0;
    let mut step = 1e-6_f64;
    let outside = loop {
        let s = (dir * step).exp();
        if f(s) < 0.0 {
            break s;
        }
        inside = s;
        step *= 2.0;
        if step > 60.0 {
            return Err(DriftError::CutoffNotBracketed);
        }
    };
    let (mut lo, mut hi) = (inside.min(outside), inside.max(outside));
    let f_lo_positive = f(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == f_lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    Ok(1.0 / (1.0 + sigma))
}

fn movavg_positive_branch(a: f64, p: f64) -> f64 {
    let q = 1.0 - 2.0 * p;
    let numerator = a.powi(4) * (-(q * q)) * (p - 1.0) * p
        + a.powi(3) * (1.0 - 2.0 * p * ((p - 2.0) * p * (p * (2.0 * p - 5.0) + 6.0) + 4.0))
        + a * a * (2.0 * p - 1.0) * (p * (3.0 * p * ((p - 2.0) * p + 3.0) - 5.0) + 1.0)
        - a * q * q * p * p
        - (p - 1.0).powi(2) * p.powi(3) * (2.0 * p - 1.0);
    let denominator = -2.0 * a.powi(5) * (2.0 * p - 1.0).powi(3)
        - a.powi(4) * q * q * ((p - 11.0) * p + 6.0)
        + a.powi(3) * (2.0 * p - 1.0) * (2.0 * p * (p.powi(3) - 9.0 * p + 10.0) - 5.0)
        - a * a * (p + 1.0) * (2.0 * p - 1.0) * (p * (p * (3.0 * p - 7.0) + 6.0) - 1.0)
        + a * p * p * (2.0 * p - 1.0)
        + (p - 1.0).powi(2) * p.powi(3);
    numerator / denominator
}

pub fn drift_closed_movavg(alpha: f64, p: f64) -> Result<f64, DriftError> {
    unit("alpha", alpha)?;
    unit("p", p)?;
    if (alpha - 0.5).abs() < RECURRENCE_TOL || (p - 0.5).abs() < RECURRENCE_TOL {
        return Ok(0.0);
    }
    if alpha == 0.0 || alpha == 1.0 {
        // Every site has the same type: a simple biased walk.
        return Ok(if alpha == 1.0 {
            2.0 * p - 1.0
        } else {
            1.0 - 2.0 * p
        });
    }
    let p_cutoff = movavg_p_cutoff(alpha)?;
    let e_u0 = (2.0 * alpha - 1.0) * (-2.0 * alpha * alpha + 2.0 * alpha + 1.0);
    Ok(piecewise_drift(e_u0, p, p_cutoff, |q| {
        movavg_positive_branch(alpha, q)
    }))
}
