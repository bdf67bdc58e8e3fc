//! Drift, regime and cutoff computations for one-dimensional random walks in
//! dependent random environments.
//!
//! Sites carry a type `U_i` in `{-1, +1}` produced by a finite-state Markov
//! chain ([`env`]). At a `+1` site the walk steps right with probability `p`,
//! at a `-1` site with probability `1 - p`. The drift `lim X_n / n` follows
//! from the Perron root and a linear solve on the tilted matrix `PD(σ)`
//! ([`spectral`], [`drift`]), with closed forms for the iid, Markov,
//! 2-dependent and moving-average families and a Monte Carlo estimator
//! ([`mc`]) as an independent check.

pub mod drift;
pub mod env;
pub mod mc;
pub mod model;
pub mod spectral;
pub mod sweep;

pub use drift::{
    classify, cutoff, drift_generic, CutoffResult, DriftError, DriftResult, Regime, RegimeReport,
};
pub use env::{EnvError, EnvironmentSpec, StationaryDistribution};
pub use mc::{estimate_drift, DriftEstimate, McError, SimConfig};
pub use model::Model;
pub use spectral::SpectralError;
pub use sweep::{SweepError, SweepTable};
