//! Environment models: finite-state Markov chains whose states are mapped to
//! the site types `-1` / `+1`.
//!
//! States of tuple-valued chains (k-dependent, moving average) are ordered
//! lexicographically with `-1 < +1`, first component most significant.

mod builders;
mod params;

pub use builders::{
    build_iid, build_k_dep, build_markov, build_moving_average, build_two_dep, parse_history,
    KDepTable,
};
pub use params::{
    markov_from_correlation, moments_two_dep, two_dep_from_moments, MarkovParams, MomentParams2Dep,
    TwoDepParams,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row sums must match 1 this closely.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: String,
        value: f64,
        range: &'static str,
    },
    #[error("transition matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("sign map has {got} entries, expected {expected}")]
    SignLength { expected: usize, got: usize },
    #[error("sign map entry {index} is {value}, expected -1 or +1")]
    BadSign { index: usize, value: i64 },
    #[error("transition entry P[{row}][{col}] = {value} is not a probability")]
    BadEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} of the transition matrix sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("transition matrix is reducible: state {to} is not reachable from state {from}")]
    Reducible { from: usize, to: usize },
    #[error("declared state count m = {declared} does not match matrix size {actual}")]
    StateCount { declared: usize, actual: usize },
    #[error("empty environment (m = 0)")]
    Empty,
    #[error("stationary system is singular; the chain is not irreducible")]
    SingularStationary,
    #[error("k-dependent table: {0}")]
    KDepTable(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("invalid environment JSON: {0}")]
    Json(String),
}

/// A validated environment: row-stochastic irreducible `transition` matrix and
/// a sign `g(y)` for every state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentSpec {
    transition: DMatrix<f64>,
    signs: Vec<i8>,
    label: String,
}

impl EnvironmentSpec {
    pub fn new(
        transition: DMatrix<f64>,
        signs: Vec<i8>,
        label: impl Into<String>,
    ) -> Result<Self, EnvError> {
        let m = transition.nrows();
        if m == 0 {
            return Err(EnvError::Empty);
        }
        if transition.ncols() != m {
            return Err(EnvError::NotSquare {
                rows: m,
                row: 0,
                len: transition.ncols(),
            });
        }
        if signs.len() != m {
            return Err(EnvError::SignLength {
                expected: m,
                got: signs.len(),
            });
        }
        if let Some((index, &value)) = signs.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(EnvError::BadSign {
                index,
                value: value as i64,
            });
        }
        for row in 0..m {
            let mut sum = 0.0;
            for col in 0..m {
                let value = transition[(row, col)];
                if !(0.0..=1.0).contains(&value) {
                    return Err(EnvError::BadEntry { row, col, value });
                }
                sum += value;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(EnvError::RowSum { row, sum });
            }
        }
        check_irreducible(&transition)?;
        Ok(Self {
            transition,
            signs,
            label: label.into(),
        })
    }

    /// Builds a spec from row-major nested vectors.
    pub fn from_rows(
        rows: &[Vec<f64>],
        signs: &[i64],
        label: impl Into<String>,
    ) -> Result<Self, EnvError> {
        let m = rows.len();
        if m == 0 {
            return Err(EnvError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(EnvError::NotSquare {
                    rows: m,
                    row,
                    len: r.len(),
                });
            }
        }
        let mut g = Vec::with_capacity(signs.len());
        for (index, &value) in signs.iter().enumerate() {
            match value {
                1 => g.push(1),
                -1 => g.push(-1),
                _ => return Err(EnvError::BadSign { index, value }),
            }
        }
        let transition = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
        Self::new(transition, g, label)
    }

    pub fn m(&self) -> usize {
        self.signs.len()
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The same chain with every site type flipped.
    pub fn mirror(&self) -> Self {
        Self {
            transition: self.transition.clone(),
            signs: self.signs.iter().map(|s| -s).collect(),
            label: format!("mirror({})", self.label),
        }
    }

    /// Time-reversed chain `π_{y'} P_{y'y} / π_y` with the same sign map: the
    /// law of the environment read from right to left.
    pub fn time_reversed(&self) -> Result<Self, EnvError> {
        let pi = stationary_distribution(self)?.pi;
        let m = self.m();
        let p = &self.transition;
        let mut q = DMatrix::from_fn(m, m, |y, z| pi[z] * p[(z, y)] / pi[y]);
        for mut row in q.row_iter_mut() {
            let total = row.sum();
            row /= total;
        }
        Self::new(q, self.signs.clone(), format!("reversed({})", self.label))
    }

    pub fn from_json_str(text: &str) -> Result<Self, EnvError> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| EnvError::Json(e.to_string()))?;
        file.into_spec()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SpecFile::from(self)).expect("spec file serializes")
    }
}

/// On-disk form of a custom environment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub m: usize,
    #[serde(rename = "P")]
    pub transition: Vec<Vec<f64>>,
    pub g: Vec<i64>,
    #[serde(default)]
    pub label: String,
}

impl SpecFile {
    pub fn into_spec(self) -> Result<EnvironmentSpec, EnvError> {
        if self.m != self.transition.len() {
            return Err(EnvError::StateCount {
                declared: self.m,
                actual: self.transition.len(),
            });
        }
        let label = if self.label.is_empty() {
            "custom".to_string()
        } else {
            self.label
        };
        EnvironmentSpec::from_rows(&self.transition, &self.g, label)
    }
}

impl From<&EnvironmentSpec> for SpecFile {
    fn from(spec: &EnvironmentSpec) -> Self {
        let m = spec.m();
        Self {
            m,
            transition: (0..m)
                .map(|i| (0..m).map(|j| spec.transition[(i, j)]).collect())
                .collect(),
            g: spec.signs.iter().map(|&s| s as i64).collect(),
            label: spec.label.clone(),
        }
    }
}

fn check_irreducible(p: &DMatrix<f64>) -> Result<(), EnvError> {
    let m = p.nrows();
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..m {
                let w = if forward { p[(i, j)] } else { p[(j, i)] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    if let Some(to) = reach(true).iter().position(|&s| !s) {
        return Err(EnvError::Reducible { from: 0, to });
    }
    if let Some(from) = reach(false).iter().position(|&s| !s) {
        return Err(EnvError::Reducible { from, to: 0 });
    }
    Ok(())
}

/// Stationary law `pi` of the environment chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
}

impl StationaryDistribution {
    /// `E[U_0] = sum_y pi_y g(y)`.
    pub fn mean_sign(&self, spec: &EnvironmentSpec) -> f64 {
        self.pi
            .iter()
            .zip(spec.signs())
            .map(|(p, &s)| p * s as f64)
            .sum()
    }

    /// `P(U_0 = +1)`.
    pub fn prob_plus(&self, spec: &EnvironmentSpec) -> f64 {
        self.pi
            .iter()
            .zip(spec.signs())
            .filter(|(_, &s)| s == 1)
            .map(|(p, _)| p)
            .sum()
    }

    /// Largest componentwise `|pi P - pi|`.
    pub fn residual(&self, spec: &EnvironmentSpec) -> f64 {
        let pi = DVector::from_column_slice(&self.pi);
        let moved = spec.transition().tr_mul(&pi);
        (moved - pi).amax()
    }
}

/// Solves `pi P = pi`, `sum pi = 1` by replacing the last equation of
/// `(P^T - I) pi = 0` with the normalization row.
pub fn stationary_distribution(spec: &EnvironmentSpec) -> Result<StationaryDistribution, EnvError> {
    let m = spec.m();
    let mut system = spec.transition().transpose() - DMatrix::<f64>::identity(m, m);
    for j in 0..m {
        system[(m - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m);
    rhs[m - 1] = 1.0;
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(EnvError::SingularStationary)?;
    if solution.iter().any(|x| !x.is_finite() || *x < -1e-9) {
        return Err(EnvError::SingularStationary);
    }
    // Clip roundoff below zero and renormalize.
    let mut pi: Vec<f64> = solution.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    Ok(StationaryDistribution { pi })
}
