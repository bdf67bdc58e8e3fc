use super::EnvError;

/// Values of the inverse moment map this close to 0 or 1 are snapped onto
/// the boundary.
const SNAP_TOL: f64 = 1e-12;

fn open_unit(name: &str, value: f64) -> Result<f64, EnvError> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(EnvError::OutOfRange {
            name: name.to_string(),
            value,
            range: "(0, 1)",
        })
    }
}

fn closed_unit(name: &str, value: f64) -> Result<f64, EnvError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(EnvError::OutOfRange {
            name: name.to_string(),
            value,
            range: "[0, 1]",
        })
    }
}

/// Two-state chain on `{-1, +1}`: `a = P(-1 -> +1)`, `b = P(+1 -> -1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovParams {
    a: f64,
    b: f64,
}

impl MarkovParams {
    pub fn new(a: f64, b: f64) -> Result<Self, EnvError> {
        Ok(Self {
            a: open_unit("a", a)?,
            b: open_unit("b", b)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Stationary `P(U_0 = +1) = a / (a + b)`.
    pub fn alpha(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    /// Lag-one correlation `1 - a - b`.
    pub fn rho(&self) -> f64 {
        1.0 - self.a - self.b
    }
}

/// Parameters of the 2-dependent environment. `a_minus` is
/// `P(U_i = +1 | U_{i-2} = -1, U_{i-1} = -1)`, `a_plus` the same with
/// `U_{i-2} = +1`; `b_minus`/`b_plus` are `P(U_i = -1 | U_{i-2} = -/+, U_{i-1} = +1)`.
///
/// Values on the closed interval are accepted; boundary values that make the
/// chain reducible are rejected by [`super::build_two_dep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDepParams {
    pub a_minus: f64,
    pub a_plus: f64,
    pub b_minus: f64,
    pub b_plus: f64,
}

impl TwoDepParams {
    pub fn new(a_minus: f64, a_plus: f64, b_minus: f64, b_plus: f64) -> Result<Self, EnvError> {
        Ok(Self {
            a_minus: closed_unit("a_minus", a_minus)?,
            a_plus: closed_unit("a_plus", a_plus)?,
            b_minus: closed_unit("b_minus", b_minus)?,
            b_plus: closed_unit("b_plus", b_plus)?,
        })
    }

    /// The 1-dependent (Markov) special case.
    pub fn from_markov(params: MarkovParams) -> Self {
        Self {
            a_minus: params.a(),
            a_plus: params.a(),
            b_minus: params.b(),
            b_plus: params.b(),
        }
    }

    /// Effective `A = a_- + a_+ b_- - a_- b_-`, playing the role of `a`.
    pub fn big_a(&self) -> f64 {
        self.a_minus + self.a_plus * self.b_minus - self.a_minus * self.b_minus
    }

    /// Effective `B = b_+ + a_+ b_- - a_+ b_+`, playing the role of `b`.
    pub fn big_b(&self) -> f64 {
        self.b_plus + self.a_plus * self.b_minus - self.a_plus * self.b_plus
    }
}

/// Moment parameterization of the 2-dependent environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentParams2Dep {
    /// `P(U_0 = 1)`
    pub alpha: f64,
    /// `corr(U_0, U_1)`
    pub rho01: f64,
    /// `corr(U_0, U_2)`
    pub rho02: f64,
    /// `E[U_0 U_1 U_2]`
    pub e012: f64,
}

/// `a = (1 - rho) alpha`, `b = (1 - rho)(1 - alpha)`.
pub fn markov_from_correlation(alpha: f64, rho: f64) -> Result<MarkovParams, EnvError> {
    open_unit("alpha", alpha)?;
    let lower = (1.0 - 1.0 / alpha).max(1.0 - 1.0 / (1.0 - alpha));
    if !(rho > lower && rho < 1.0) {
        return Err(EnvError::Infeasible(format!(
            "rho = {rho} must lie in ({lower}, 1) for alpha = {alpha}"
        )));
    }
    let a = (1.0 - rho) * alpha;
    let b = (1.0 - rho) * (1.0 - alpha);
    MarkovParams::new(a, b).map_err(|e| EnvError::Infeasible(e.to_string()))
}

pub fn moments_two_dep(params: &TwoDepParams) -> MomentParams2Dep {
    let TwoDepParams {
        a_minus: am,
        a_plus: ap,
        b_minus: bm,
        b_plus: bp,
    } = *params;
    let plus = am * (1.0 - bm + bp);
    let minus = bp * (1.0 - ap + am);
    let denom = plus + minus;
    let alpha = plus / denom;
    let rho01 = 1.0 - am / (am + 1.0 - ap) - bp / (bp + 1.0 - bm);
    let rho02 = 1.0 - (2.0 - ap - bm) * (1.0 - rho01);
    let e012 = (4.0 * am * bp * (bm - ap) + plus - minus) / denom;
    MomentParams2Dep {
        alpha,
        rho01,
        rho02,
        e012,
    }
}

/// Inverse of [`moments_two_dep`]. Fails when any recovered transition
/// probability leaves `[0, 1]`, naming the parameter.
pub fn two_dep_from_moments(moments: &MomentParams2Dep) -> Result<TwoDepParams, EnvError> {
    let MomentParams2Dep {
        alpha: al,
        rho01: r1,
        rho02: r2,
        e012: e,
    } = *moments;
    open_unit("alpha", al)?;
    for (name, v) in [("rho01", r1), ("rho02", r2), ("e012", e)] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(EnvError::OutOfRange {
                name: name.to_string(),
                value: v,
                range: "[-1, 1]",
            });
        }
    }
    if r1 >= 1.0 {
        return Err(EnvError::Infeasible(
            "rho01 = 1 leaves the chain undetermined".into(),
        ));
    }
    let am = -(2.0 * al * (2.0 * al * (r2 - 1.0) - 2.0 * r2 + 1.0) + e + 1.0)
        / (8.0 * (al - 1.0) * (al * (r1 - 1.0) + 1.0));
    let bm =
        (2.0 * al * (al * (4.0 * r1 - 2.0 * (r2 + 1.0)) - 4.0 * r1 + 2.0 * r2 + 1.0) + e + 1.0)
            / (8.0 * (al - 1.0) * al * (r1 - 1.0));
    let ap =
        -(2.0 * al * (2.0 * al * (-2.0 * r1 + r2 + 1.0) + 4.0 * r1 - 2.0 * r2 - 3.0) + e + 1.0)
            / (8.0 * (al - 1.0) * al * (r1 - 1.0));
    let bp = (2.0 * al * (-2.0 * al * (r2 - 1.0) + 2.0 * r2 - 3.0) + e + 1.0)
        / (8.0 * al * (al * (r1 - 1.0) - r1));

    let snap = |name: &str, v: f64| -> Result<f64, EnvError> {
        if !v.is_finite() || !(-SNAP_TOL..=1.0 + SNAP_TOL).contains(&v) {
            Err(EnvError::Infeasible(format!(
                "{name} = {v} outside [0, 1] for moments ({al}, {r1}, {r2}, {e})"
            )))
        } else {
            Ok(v.clamp(0.0, 1.0))
        }
    };
    Ok(TwoDepParams {
        a_minus: snap("a_minus", am)?,
        a_plus: snap("a_plus", ap)?,
        b_minus: snap("b_minus", bm)?,
        b_plus: snap("b_plus", bp)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markov_params_reject_boundary() {
        assert!(MarkovParams::new(0.0, 0.5).is_err());
        assert!(MarkovParams::new(0.5, 1.0).is_err());
        assert!(MarkovParams::new(0.999, 0.001).is_ok());
    }

    #[test]
    fn correlation_map_example() {
        let m = markov_from_correlation(0.95, 0.3).unwrap();
        assert!((m.a() - 0.665).abs() < 1e-15);
        assert!((m.b() - 0.035).abs() < 1e-15);
        assert!((m.rho() - 0.3).abs() < 1e-15);
        assert!((m.alpha() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn zero_correlation_is_iid() {
        let m = markov_from_correlation(0.8, 0.0).unwrap();
        assert_eq!(m.a(), 0.8);
        assert!((m.b() - 0.2).abs() < 1e-16);
    }

    #[test]
    fn negative_correlation_infeasible() {
        // a = 1.3 * 0.95 > 1
        assert!(matches!(
            markov_from_correlation(0.95, -0.3),
            Err(EnvError::Infeasible(_))
        ));
    }

    #[test]
    fn markov_moments_reduce() {
        let p = TwoDepParams::new(0.665, 0.665, 0.035, 0.035).unwrap();
        let m = moments_two_dep(&p);
        assert!((m.alpha - 0.95).abs() < 1e-14);
        assert!((m.rho01 - 0.3).abs() < 1e-14);
        // Markov: corr at lag 2 is rho^2
        assert!((m.rho02 - 0.09).abs() < 1e-14);
    }

    #[test]
    fn symmetric_params_have_half_alpha() {
        let p = TwoDepParams::new(0.3, 0.7, 0.3, 0.7).unwrap();
        assert!((moments_two_dep(&p).alpha - 0.5).abs() < 1e-15);
    }

    #[test]
    fn known_fraction_round_trip() {
        // Exact values: (9/13, 5/18, 11/180, 21/65).
        let p = TwoDepParams::new(0.6, 0.4, 0.3, 0.2).unwrap();
        let m = moments_two_dep(&p);
        assert!((m.alpha - 9.0 / 13.0).abs() < 1e-15);
        assert!((m.rho01 - 5.0 / 18.0).abs() < 1e-15);
        assert!((m.rho02 - 11.0 / 180.0).abs() < 1e-15);
        assert!((m.e012 - 21.0 / 65.0).abs() < 1e-15);
        let back = two_dep_from_moments(&m).unwrap();
        assert!((back.a_minus - 0.6).abs() < 1e-13);
        assert!((back.a_plus - 0.4).abs() < 1e-13);
        assert!((back.b_minus - 0.3).abs() < 1e-13);
        assert!((back.b_plus - 0.2).abs() < 1e-13);
    }

    #[test]
    fn maximal_boundary_tuple() {
        // Exact preimage: a- = 1, a+ = 66/133, b- = 0, b+ = 7/193.
        let m = MomentParams2Dep {
            alpha: 0.95,
            rho01: 0.3,
            rho02: -1.0 / 19.0,
            e012: 417.0 / 500.0,
        };
        let p = two_dep_from_moments(&m).unwrap();
        assert_eq!(p.a_minus, 1.0);
        assert_eq!(p.b_minus, 0.0);
        assert!((p.a_plus - 66.0 / 133.0).abs() < 1e-13);
        assert!((p.b_plus - 7.0 / 193.0).abs() < 1e-13);
        assert!((p.big_a() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rho02_zero_family_ends() {
        for (e, a_minus, b_minus) in [(0.824, 57.0 / 67.0, 0.0), (0.844, 1.0, 10.0 / 133.0)] {
            let m = MomentParams2Dep {
                alpha: 0.95,
                rho01: 0.3,
                rho02: 0.0,
                e012: e,
            };
            let p = two_dep_from_moments(&m).unwrap();
            assert!((p.a_minus - a_minus).abs() < 1e-12, "{e}: {p:?}");
            assert!((p.b_minus - b_minus).abs() < 1e-12, "{e}: {p:?}");
        }
        // Just outside the family.
        let m = MomentParams2Dep {
            alpha: 0.95,
            rho01: 0.3,
            rho02: 0.0,
            e012: 0.82,
        };
        let err = two_dep_from_moments(&m).unwrap_err();
        assert!(err.to_string().contains("b_minus"), "{err}");
    }
}
