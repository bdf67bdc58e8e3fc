//! Parameter sweeps behind the drift and cutoff figures, as tables.

use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::drift::{
    classify, drift_closed_iid, drift_closed_markov_corr, drift_closed_movavg,
    drift_closed_two_dep, movavg_p_cutoff, regime_case, DriftError,
};
use crate::env::{
    markov_from_correlation, two_dep_from_moments, EnvironmentSpec, MomentParams2Dep,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("unknown figure `{0}` (expected fig2..fig7)")]
    UnknownFigure(String),
    #[error("need at least {min} grid points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("row {row} has {got} cells, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error(transparent)]
    Drift(#[from] DriftError),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Rectangular table; numbers are written with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<Self, SweepError> {
        let expected = columns.len();
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != expected) {
            return Err(SweepError::Ragged {
                row,
                got: r.len(),
                expected,
            });
        }
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), SweepError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, SweepError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json_string(&self) -> Result<String, SweepError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `n + 1` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

fn need(points: usize, min: usize) -> Result<(), SweepError> {
    if points < min {
        Err(SweepError::TooFewPoints { min, got: points })
    } else {
        Ok(())
    }
}

/// `1, 0.95, ..., 0.55`.
pub fn figure_alphas() -> Vec<f64> {
    (0..10).map(|i| (100 - 5 * i) as f64 / 100.0).collect()
}

/// Iid phase diagram on the closed unit square.
pub fn fig2(points: usize) -> Result<SweepTable, SweepError> {
    need(points, 2)?;
    let grid = linspace(0.0, 1.0, points);
    let cells: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&p| (a, p)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(alpha, p)| {
            let drift = drift_closed_iid(alpha, p)?;
            let regime = regime_case(2.0 * alpha - 1.0, p, alpha);
            Ok(vec![
                alpha.into(),
                p.into(),
                drift.into(),
                regime.code().into(),
                alpha.into(),
            ])
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepTable::new(
        ["alpha", "p", "drift", "regime", "p_cutoff"]
            .map(String::from)
            .to_vec(),
        rows,
    )
}

fn fig3_curves() -> Vec<(f64, f64)> {
    let mut curves = Vec::new();
    for rho in [0.0, 0.3] {
        curves.extend(figure_alphas().into_iter().map(|a| (rho, a)));
    }
    curves.extend(
        figure_alphas()
            .into_iter()
            .filter(|&a| a <= 0.75)
            .map(|a| (-0.3, a)),
    );
    curves
}

/// Markov drift against `p`, one column per `(rho, alpha)`.
pub fn fig3(points: usize) -> Result<SweepTable, SweepError> {
    need(points, 1)?;
    let curves = fig3_curves();
    let mut columns = vec!["p".to_string()];
    columns.extend(
        curves
            .iter()
            .map(|&(rho, a)| format!("drift_rho{rho}_alpha{a}")),
    );
    let rows = linspace(0.5, 1.0, points)
        .par_iter()
        .map(|&p| {
            let mut row = vec![Cell::Num(p)];
            for &(rho, alpha) in &curves {
                row.push(drift_closed_markov_corr(alpha, rho, p)?.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepTable::new(columns, rows)
}

/// Markov drift against the correlation at `p = 0.7` and `p = 0.9`;
/// infeasible `(alpha, rho)` pairs are left out.
pub fn fig4(points: usize) -> Result<SweepTable, SweepError> {
    need(points, 2)?;
    let rhos: Vec<f64> = (1..points)
        .map(|i| -1.0 + 2.0 * i as f64 / points as f64)
        .collect();
    let mut tasks = Vec::new();
    for p in [0.7, 0.9] {
        for alpha in figure_alphas() {
            for &rho in &rhos {
                tasks.push((p, alpha, rho));
            }
        }
    }
    let rows: Vec<Option<Vec<Cell>>> = tasks
        .par_iter()
        .map(|&(p, alpha, rho)| {
            let a = (1.0 - rho) * alpha;
            let b = (1.0 - rho) * (1.0 - alpha);
            if a > 1.0 || b > 1.0 {
                return Ok(None);
            }
            let drift = drift_closed_markov_corr(alpha, rho, p)?;
            let p_cutoff = if alpha == 1.0 {
                1.0
            } else {
                (1.0 - b) / ((1.0 - a) + (1.0 - b))
            };
            let e_u0 = 2.0 * alpha - 1.0;
            Ok(Some(vec![
                rho.into(),
                p.into(),
                alpha.into(),
                drift.into(),
                regime_case(e_u0, p, p_cutoff).code().into(),
                p_cutoff.into(),
            ]))
        })
        .collect::<Result<_, SweepError>>()?;
    SweepTable::new(
        ["rho", "p", "alpha", "drift", "regime", "p_cutoff"]
            .map(String::from)
            .to_vec(),
        rows.into_iter().flatten().collect(),
    )
}

/// `e012` values for the `rho02 = 0` family in the 2-dependent figure.
pub fn fig5_e012_values() -> Vec<f64> {
    (0..=4).map(|i| 0.824 + 0.005 * i as f64).collect()
}

/// The "maximal" boundary tuple at `alpha = 0.95`, `rho01 = 0.3`.
pub fn maximal_moments() -> MomentParams2Dep {
    MomentParams2Dep {
        alpha: 0.95,
        rho01: 0.3,
        rho02: -1.0 / 19.0,
        e012: 417.0 / 500.0,
    }
}

/// 2-dependent drift at `alpha = 0.95`, `rho01 = 0.3` against `p`, with the
/// Markov and iid curves for reference.
pub fn fig5(points: usize) -> Result<SweepTable, SweepError> {
    need(points, 1)?;
    let (alpha, rho01) = (0.95, 0.3);
    let mut curves = Vec::new();
    let mut columns = vec!["p".to_string(), "markov".to_string(), "iid".to_string()];
    for e012 in fig5_e012_values() {
        let m = MomentParams2Dep {
            alpha,
            rho01,
            rho02: 0.0,
            e012,
        };
        curves.push(two_dep_from_moments(&m)?);
        columns.push(format!("twodep_rho02_0_e012_{e012:.3}"));
    }
    curves.push(two_dep_from_moments(&maximal_moments())?);
    columns.push("maximal".to_string());
    // Validates feasibility up front.
    markov_from_correlation(alpha, rho01)?;
    let rows = linspace(0.5, 1.0, points)
        .par_iter()
        .map(|&p| {
            let mut row = vec![
                Cell::Num(p),
                drift_closed_markov_corr(alpha, rho01, p)?.into(),
                drift_closed_iid(alpha, p)?.into(),
            ];
            for params in &curves {
                row.push(drift_closed_two_dep(params, p)?.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepTable::new(columns, rows)
}

/// Moving-average cutoff against `alpha` on `alpha = j/(points+1)`.
pub fn fig6(points: usize) -> Result<SweepTable, SweepError> {
    need(points, 1)?;
    let alphas: Vec<f64> = (1..=points)
        .map(|j| j as f64 / (points + 1) as f64)
        .collect();
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let movavg = match movavg_p_cutoff(alpha) {
                Ok(pc) => pc,
                // Both cutoffs meet 1/2 at the symmetric point.
                Err(DriftError::NoCutoff(_)) => 0.5,
                Err(e) => return Err(e.into()),
            };
            Ok(vec![alpha.into(), movavg.into(), alpha.into()])
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepTable::new(
        ["alpha", "p_cutoff_movavg", "p_cutoff_iid"]
            .map(String::from)
            .to_vec(),
        rows,
    )
}

/// Moving-average and iid drift against `p`, one pair of columns per `alpha`.
pub fn fig7(points: usize) -> Result<SweepTable, SweepError> {
    need(points, 1)?;
    let alphas = figure_alphas();
    let mut columns = vec!["p".to_string()];
    for &a in &alphas {
        columns.push(format!("movavg_alpha{a}"));
        columns.push(format!("iid_alpha{a}"));
    }
    let rows = linspace(0.5, 1.0, points)
        .par_iter()
        .map(|&p| {
            let mut row = vec![Cell::Num(p)];
            for &a in &alphas {
                row.push(drift_closed_movavg(a, p)?.into());
                row.push(drift_closed_iid(a, p)?.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepTable::new(columns, rows)
}

pub fn figure(name: &str, points: usize) -> Result<SweepTable, SweepError> {
    match name {
        "fig2" => fig2(points),
        "fig3" => fig3(points),
        "fig4" => fig4(points),
        "fig5" => fig5(points),
        "fig6" => fig6(points),
        "fig7" => fig7(points),
        other => Err(SweepError::UnknownFigure(other.to_string())),
    }
}

/// Generic-pipeline drift and regime over `p` in `[p_min, p_max]`, a
/// subinterval of `(0, 1)`.
pub fn sweep_spec(
    spec: &EnvironmentSpec,
    p_min: f64,
    p_max: f64,
    points: usize,
) -> Result<SweepTable, SweepError> {
    need(points, 1)?;
    let rows = linspace(p_min, p_max, points)
        .par_iter()
        .map(|&p| {
            let report = classify(spec, p)?;
            Ok(vec![
                p.into(),
                report.drift.into(),
                report.regime.code().into(),
                report.sp_forward.into(),
                report.sp_backward.into(),
            ])
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepTable::new(
        ["p", "drift", "regime", "sp_forward", "sp_backward"]
            .map(String::from)
            .to_vec(),
        rows,
    )
}
