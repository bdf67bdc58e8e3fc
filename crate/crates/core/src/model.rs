//! Named environment families, tying each builder to its closed-form drift.

use crate::drift::{
    self, drift_closed_iid, drift_closed_markov, drift_closed_markov_corr, drift_closed_movavg,
    drift_closed_two_dep, movavg_p_cutoff, DriftError,
};
use crate::env::{
    build_iid, build_k_dep, build_markov, build_moving_average, build_two_dep,
    markov_from_correlation, EnvError, EnvironmentSpec, KDepTable, MarkovParams, TwoDepParams,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Iid { alpha: f64 },
    Markov(MarkovParams),
    MarkovCorr { alpha: f64, rho: f64 },
    TwoDep(TwoDepParams),
    MovingAverage { alpha: f64 },
    KDep(KDepTable),
    Custom(EnvironmentSpec),
}

impl Model {
    pub fn spec(&self) -> Result<EnvironmentSpec, EnvError> {
        match self {
            Model::Iid { alpha } => build_iid(*alpha),
            Model::Markov(params) => Ok(build_markov(*params)),
            Model::MarkovCorr { alpha, rho } => {
                Ok(build_markov(markov_from_correlation(*alpha, *rho)?))
            }
            Model::TwoDep(params) => build_two_dep(*params),
            Model::MovingAverage { alpha } => build_moving_average(*alpha),
            Model::KDep(table) => build_k_dep(table),
            Model::Custom(spec) => Ok(spec.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Model::Iid { alpha } => format!("iid(alpha={alpha})"),
            Model::Markov(m) => format!("markov(a={}, b={})", m.a(), m.b()),
            Model::MarkovCorr { alpha, rho } => format!("markov(alpha={alpha}, rho={rho})"),
            Model::TwoDep(t) => format!(
                "twodep(a-={}, a+={}, b-={}, b+={})",
                t.a_minus, t.a_plus, t.b_minus, t.b_plus
            ),
            Model::MovingAverage { alpha } => format!("movavg(alpha={alpha})"),
            Model::KDep(table) => format!("kdep(k={})", table.k),
            Model::Custom(spec) => spec.label().to_string(),
        }
    }

    /// k-dependent tables with `k <= 2` reduce to the Markov and 2-dependent
    /// forms.
    fn reduced(&self) -> Result<Option<Model>, DriftError> {
        let Model::KDep(table) = self else {
            return Ok(Some(self.clone()));
        };
        let get = |key: &[i8]| {
            table.entries.get(key).copied().ok_or_else(|| {
                DriftError::Env(EnvError::KDepTable(format!("missing history {key:?}")))
            })
        };
        match table.k {
            1 => {
                let (a, b) = get(&[])?;
                Ok(Some(Model::Markov(MarkovParams::new(a, b)?)))
            }
            2 => {
                let (am, bm) = get(&[-1])?;
                let (ap, bp) = get(&[1])?;
                Ok(Some(Model::TwoDep(TwoDepParams::new(am, ap, bm, bp)?)))
            }
            _ => Ok(None),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(self.reduced(), Ok(Some(m)) if !matches!(m, Model::Custom(_)))
    }

    pub fn drift_closed(&self, p: f64) -> Result<f64, DriftError> {
        let no_closed = || DriftError::NoClosedForm(self.label());
        match self.reduced()?.ok_or_else(no_closed)? {
            Model::Iid { alpha } => drift_closed_iid(alpha, p),
            Model::Markov(params) => drift_closed_markov(params, p),
            Model::MarkovCorr { alpha, rho } => drift_closed_markov_corr(alpha, rho, p),
            Model::TwoDep(params) => drift_closed_two_dep(&params, p),
            Model::MovingAverage { alpha } => drift_closed_movavg(alpha, p),
            Model::KDep(_) | Model::Custom(_) => Err(no_closed()),
        }
    }

    /// Cutoff from the family's explicit formula; `None` for custom specs and
    /// for `k >= 3`.
    pub fn p_cutoff_closed(&self) -> Result<Option<f64>, DriftError> {
        let Some(model) = self.reduced()? else {
            return Ok(None);
        };
        let markov = |a: f64, b: f64| (1.0 - b) / ((1.0 - a) + (1.0 - b));
        let e_u0 = match &model {
            Model::Iid { alpha } => 2.0 * alpha - 1.0,
            Model::Markov(m) => m.a() - m.b(),
            Model::MarkovCorr { alpha, .. } => 2.0 * alpha - 1.0,
            Model::TwoDep(t) => drift::two_dep_e_u0(t),
            Model::MovingAverage { alpha } => 2.0 * alpha - 1.0,
            Model::KDep(_) | Model::Custom(_) => return Ok(None),
        };
        if e_u0.abs() < drift::RECURRENCE_TOL {
            return Err(DriftError::NoCutoff(e_u0));
        }
        Ok(Some(match model {
            Model::Iid { alpha } => alpha,
            Model::Markov(m) => markov(m.a(), m.b()),
            Model::MarkovCorr { alpha, rho } => {
                let m = markov_from_correlation(alpha, rho)?;
                markov(m.a(), m.b())
            }
            Model::TwoDep(t) => markov(t.big_a(), t.big_b()),
            Model::MovingAverage { alpha } => movavg_p_cutoff(alpha)?,
            Model::KDep(_) | Model::Custom(_) => unreachable!(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{cutoff, drift_generic};

    #[test]
    fn closed_and_generic_agree_per_family() {
        let models = [
            Model::Iid { alpha: 0.8 },
            Model::Markov(MarkovParams::new(0.665, 0.035).unwrap()),
            Model::MarkovCorr {
                alpha: 0.95,
                rho: 0.3,
            },
            Model::TwoDep(TwoDepParams::new(0.6, 0.4, 0.3, 0.2).unwrap()),
            Model::MovingAverage { alpha: 0.7 },
            Model::KDep(
                KDepTable::from_strings(2, [("-", (0.6, 0.3)), ("+", (0.4, 0.2))]).unwrap(),
            ),
        ];
        for model in &models {
            let spec = model.spec().unwrap();
            for p in [0.3, 0.45, 0.6, 0.7] {
                let c = model.drift_closed(p).unwrap();
                let g = drift_generic(&spec, p).unwrap().value;
                assert!((c - g).abs() < 1e-10, "{}: p={p} {c} vs {g}", model.label());
            }
        }
    }

    #[test]
    fn closed_cutoffs_match_root_finder() {
        let models = [
            Model::Iid { alpha: 0.3 },
            Model::Markov(MarkovParams::new(0.665, 0.035).unwrap()),
            Model::TwoDep(TwoDepParams::new(0.6, 0.4, 0.3, 0.2).unwrap()),
            Model::MovingAverage { alpha: 0.8 },
        ];
        for model in &models {
            let closed = model.p_cutoff_closed().unwrap().unwrap();
            let found = cutoff(&model.spec().unwrap()).unwrap().p_cutoff;
            assert!(
                (closed - found).abs() < 1e-9,
                "{}: {closed} vs {found}",
                model.label()
            );
        }
    }

    #[test]
    fn no_closed_form_for_custom_or_deep_tables() {
        let custom = Model::Custom(build_iid(0.7).unwrap());
        let err = custom.drift_closed(0.6).unwrap_err();
        assert!(err.to_string().starts_with("no closed form"));
        let deep = Model::KDep(KDepTable::uniform(3, 0.6, 0.3));
        assert!(!deep.has_closed_form());
        assert!(deep.drift_closed(0.6).is_err());
        assert_eq!(deep.p_cutoff_closed().unwrap(), None);
    }
}
