use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "rwre",
    version,
    about = "Drift and regimes of random walks in dependent random environments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime, drift and the quantities that decide them.
    Classify {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Drift by the generic matrix pipeline, a closed form, or simulation.
    Drift {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = DriftMethod::Generic)]
        method: DriftMethod,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cutoff where the drift vanishes.
    Cutoff {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Figure data as CSV or JSON.
    Sweep {
        /// fig2 .. fig7, or `custom` with an environment and a p range.
        figure: String,
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 0.01)]
        p_min: f64,
        #[arg(long, default_value_t = 0.99)]
        p_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Monte Carlo drift estimate.
    Simulate {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Analytic drift against simulation; exit status 1 on disagreement.
    Compare {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args, Default)]
#[group(id = "environment", multiple = false)]
pub struct EnvArgs {
    /// iid environment with P(U = 1) = ALPHA.
    #[arg(long, value_name = "ALPHA")]
    pub iid: Option<f64>,
    /// Markov environment, `a,b`.
    #[arg(long, value_name = "A,B", value_parser = parse_list::<2>)]
    pub markov: Option<Floats>,
    /// Markov environment by `alpha,rho`.
    #[arg(long, value_name = "ALPHA,RHO", value_parser = parse_list::<2>)]
    pub markov_corr: Option<Floats>,
    /// 2-dependent environment, `a-,a+,b-,b+`.
    #[arg(long, value_name = "A-,A+,B-,B+", value_parser = parse_list::<4>)]
    pub twodep: Option<Floats>,
    /// 2-dependent environment by moments `alpha,rho01,rho02,e012`.
    #[arg(long, value_name = "ALPHA,RHO01,RHO02,E012", value_parser = parse_list::<4>)]
    pub twodep_moments: Option<Floats>,
    /// Majority-of-three moving average with P(+1) = ALPHA.
    #[arg(long, value_name = "ALPHA")]
    pub movavg: Option<f64>,
    /// k-dependent table, `{"k": .., "table": {"-": [a, b], ..}}`.
    #[arg(long, value_name = "FILE")]
    pub kdep: Option<PathBuf>,
    /// Custom chain, `{"m": .., "P": [[..]], "g": [..], "label": ..}`.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
}

impl EnvArgs {
    pub fn is_empty(&self) -> bool {
        self.iid.is_none()
            && self.markov.is_none()
            && self.markov_corr.is_none()
            && self.twodep.is_none()
            && self.twodep_moments.is_none()
            && self.movavg.is_none()
            && self.kdep.is_none()
            && self.spec.is_none()
    }
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SimArgs {
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub burn_in: u64,
    #[arg(long, value_enum, default_value_t = Strategy::Reversal)]
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriftMethod {
    Generic,
    Closed,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Reversal,
    Reflected,
}

/// Comma-separated numbers of a fixed count.
#[derive(Debug, Clone, PartialEq)]
pub struct Floats(pub Vec<f64>);

fn parse_list<const N: usize>(text: &str) -> Result<Floats, String> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != N {
        return Err(format!(
            "expected {N} comma-separated numbers, got {}",
            values.len()
        ));
    }
    Ok(Floats(values))
}
