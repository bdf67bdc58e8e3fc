//! `rwre`: drift, regime, cutoff, figure sweeps and Monte Carlo checks from the
//! command line.

mod args;

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use rwre_core::drift::Method;
use rwre_core::env::{
    two_dep_from_moments, KDepTable, MarkovParams, MomentParams2Dep, TwoDepParams,
};
use rwre_core::mc::NegativeSide;
use rwre_core::{
    classify, cutoff, drift_generic, estimate_drift, sweep, CutoffResult, DriftError, EnvError,
    EnvironmentSpec, McError, Model, SimConfig, SweepError,
};
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use args::{Cli, Command, DriftMethod, EnvArgs, Format, SimArgs, Strategy};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Drift(#[from] DriftError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

const ENV_FLAGS: &str =
    "--iid, --markov, --markov-corr, --twodep, --twodep-moments, --movavg, --kdep or --spec";

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn model_from(env: &EnvArgs) -> Result<Model, CliError> {
    if let Some(alpha) = env.iid {
        return Ok(Model::Iid { alpha });
    }
    if let Some(args::Floats(v)) = &env.markov {
        return Ok(Model::Markov(MarkovParams::new(v[0], v[1])?));
    }
    if let Some(args::Floats(v)) = &env.markov_corr {
        return Ok(Model::MarkovCorr {
            alpha: v[0],
            rho: v[1],
        });
    }
    if let Some(args::Floats(v)) = &env.twodep {
        return Ok(Model::TwoDep(TwoDepParams::new(v[0], v[1], v[2], v[3])?));
    }
    if let Some(args::Floats(v)) = &env.twodep_moments {
        let moments = MomentParams2Dep {
            alpha: v[0],
            rho01: v[1],
            rho02: v[2],
            e012: v[3],
        };
        return Ok(Model::TwoDep(two_dep_from_moments(&moments)?));
    }
    if let Some(alpha) = env.movavg {
        return Ok(Model::MovingAverage { alpha });
    }
    if let Some(path) = &env.kdep {
        return Ok(Model::KDep(KDepTable::from_json_str(&read_file(path)?)?));
    }
    if let Some(path) = &env.spec {
        return Ok(Model::Custom(EnvironmentSpec::from_json_str(&read_file(
            path,
        )?)?));
    }
    Err(CliError::Usage(format!(
        "missing environment: pass one of {ENV_FLAGS}"
    )))
}

fn check_p(p: f64) -> Result<f64, CliError> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(CliError::Usage(format!("--p {p} must lie in (0, 1)")))
    }
}

fn sim_config(sim: SimArgs) -> SimConfig {
    SimConfig {
        steps: sim.steps,
        replications: sim.reps,
        seed: sim.seed,
        burn_in: sim.burn_in,
        strategy: match sim.strategy {
            Strategy::Reversal => NegativeSide::Reversal,
            Strategy::Reflected => NegativeSide::Reflected,
        },
    }
}

#[derive(Serialize)]
struct McDrift {
    value: f64,
    method: Method,
    stderr: f64,
    replications: usize,
    steps: u64,
    positive_fraction: f64,
}

#[derive(Serialize)]
struct CutoffReport {
    environment: String,
    #[serde(flatten)]
    result: CutoffResult,
    p_cutoff_closed: Option<f64>,
}

#[derive(Serialize)]
struct Comparison {
    environment: String,
    p: f64,
    generic: f64,
    closed: Option<f64>,
    mc_mean: f64,
    mc_stderr: f64,
    tolerance: f64,
    verdict: &'static str,
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::Null => "none".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Renders a flat record as `key: value` lines, one JSON object, or a
/// two-line CSV.
fn render(record: &impl Serialize, format: Format, out: &mut impl Write) -> Result<(), CliError> {
    let value = serde_json::to_value(record).map_err(io::Error::other)?;
    let fields: Map<String, Value> = match value {
        Value::Object(map) => map,
        other => Map::from_iter([("value".to_string(), other)]),
    };
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &fields).map_err(io::Error::other)?;
            writeln!(out)?;
        }
        Format::Text => {
            let width = fields.keys().map(String::len).max().unwrap_or(0);
            for (key, value) in &fields {
                writeln!(out, "{key:<width$}  {}", scalar_text(value))?;
            }
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(&mut *out);
            writer.write_record(fields.keys())?;
            writer.write_record(fields.values().map(scalar_text))?;
            writer.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Classify { env, p, format } => {
            let spec = model_from(&env)?.spec()?;
            render(&classify(&spec, check_p(p)?)?, format, out)?;
        }
        Command::Drift {
            env,
            p,
            method,
            sim,
            format,
        } => {
            let model = model_from(&env)?;
            let p = check_p(p)?;
            match method {
                DriftMethod::Generic => render(&drift_generic(&model.spec()?, p)?, format, out)?,
                DriftMethod::Closed => {
                    let value = model.drift_closed(p)?;
                    render(&rwre_core::DriftResult::closed(value), format, out)?;
                }
                DriftMethod::Mc => {
                    let est = estimate_drift(&model.spec()?, p, &sim_config(sim))?;
                    let record = McDrift {
                        value: est.mean,
                        method: Method::MonteCarlo,
                        stderr: est.stderr,
                        replications: est.replications,
                        steps: est.steps,
                        positive_fraction: est.positive_fraction,
                    };
                    render(&record, format, out)?;
                }
            }
        }
        Command::Cutoff { env, format } => {
            let model = model_from(&env)?;
            let report = CutoffReport {
                environment: model.label(),
                result: cutoff(&model.spec()?)?,
                p_cutoff_closed: model.p_cutoff_closed()?,
            };
            render(&report, format, out)?;
        }
        Command::Sweep {
            figure,
            env,
            points,
            p_min,
            p_max,
            out: path,
            format,
        } => {
            let table = if figure == "custom" {
                let model = model_from(&env)?;
                if !(0.0 < p_min && p_min < p_max && p_max < 1.0) {
                    return Err(CliError::Usage(format!(
                        "--p-min {p_min} and --p-max {p_max} must satisfy 0 < p-min < p-max < 1"
                    )));
                }
                sweep::sweep_spec(&model.spec()?, p_min, p_max, points)?
            } else {
                if !env.is_empty() {
                    return Err(CliError::Usage(format!(
                        "{ENV_FLAGS} apply only to `sweep custom`"
                    )));
                }
                sweep::figure(&figure, points)?
            };
            let text = match format {
                Format::Json => table.to_json_string()? + "\n",
                Format::Csv => table.to_csv_string()?,
                Format::Text => {
                    return Err(CliError::Usage(
                        "--format for sweep must be csv or json".into(),
                    ))
                }
            };
            match path {
                Some(path) => fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Simulate {
            env,
            p,
            sim,
            format,
        } => {
            let spec = model_from(&env)?.spec()?;
            render(
                &estimate_drift(&spec, check_p(p)?, &sim_config(sim))?,
                format,
                out,
            )?;
        }
        Command::Compare {
            env,
            p,
            sim,
            format,
        } => {
            let model = model_from(&env)?;
            let p = check_p(p)?;
            let spec = model.spec()?;
            let generic = drift_generic(&spec, p)?.value;
            let closed = if model.has_closed_form() {
                Some(model.drift_closed(p)?)
            } else {
                None
            };
            let est = estimate_drift(&spec, p, &sim_config(sim))?;
            let tolerance = 3.0 * est.stderr;
            let agrees = |v: f64| (v - est.mean).abs() <= tolerance;
            let pass = agrees(generic) && closed.is_none_or(agrees);
            let record = Comparison {
                environment: model.label(),
                p,
                generic,
                closed,
                mc_mean: est.mean,
                mc_stderr: est.stderr,
                tolerance,
                verdict: if pass { "PASS" } else { "FAIL" },
            };
            render(&record, format, out)?;
            if !pass {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("rwre: {err}");
            ExitCode::from(2)
        }
    }
}
