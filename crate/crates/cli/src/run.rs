//! Execution of a [`RunConfig`] and rendering of its output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use shotnoise_core::levyou::levyou_moments;
use shotnoise_core::limits::check_conditions;
use shotnoise_core::montecarlo::{compare_experiment, run_ensemble, run_path_ensemble, ProcessSpec};
use shotnoise_core::shotnoise::{shot_moments, simulate_path, SamplePath};
use shotnoise_core::real::fmt_f64 as f;
use shotnoise_core::RngStream;

use crate::config::{CommandConfig, OutFormat, RunConfig, Times};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rendered result: the file body plus text meant for the terminal.
pub struct Output {
    pub body: String,
    pub console: Option<String>,
    /// Event list of an exact path, when one was requested.
    pub path: Option<SamplePath>,
    /// Exit code to use after writing, for partially failed experiments.
    pub status: i32,
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    shotnoise_version: &'a str,
    config: &'a RunConfig,
    seed: u64,
    data: Value,
}

fn csv_header(cfg: &RunConfig) -> Result<String, CliError> {
    let json = serde_json::to_string(cfg).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(format!("# shotnoise {VERSION}\n# config: {json}\n# seed: {}\n", cfg.seed))
}

fn json_doc(cfg: &RunConfig, data: Value) -> Result<String, CliError> {
    let doc = JsonDoc { shotnoise_version: VERSION, config: cfg, seed: cfg.seed, data };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), f)
}

/// Parse the configuration embedded in an earlier output file.
pub fn embedded_config(text: &str) -> Result<RunConfig, CliError> {
    let bad = |e: serde_json::Error| CliError::usage(format!("embedded config: {e}"));
    if text.starts_with('#') {
        let line = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| CliError::usage("no '# config:' line in file"))?;
        serde_json::from_str(line).map_err(bad)
    } else {
        let v: Value = serde_json::from_str(text).map_err(bad)?;
        let c = v.get("config").cloned().ok_or_else(|| CliError::usage("no \"config\" field in file"))?;
        serde_json::from_value(c).map_err(bad)
    }
}

pub fn execute(cfg: &RunConfig, workers: usize) -> Result<Output, CliError> {
    let mut out = Output { body: String::new(), console: None, path: None, status: 0 };
    match &cfg.command {
        CommandConfig::Simulate { process, times, n, exact_path } => match times {
            Times::At(t) => {
                let res = run_ensemble(process, *t, *n, cfg.seed, workers)?;
                out.body = match cfg.format {
                    OutFormat::Csv => {
                        let mut s = csv_header(cfg)?;
                        s.push_str("sample,value\n");
                        for (i, v) in res.samples.iter().enumerate() {
                            writeln!(s, "{i},{}", f(*v)).unwrap();
                        }
                        s
                    }
                    OutFormat::Json => json_doc(cfg, serde_json::json!({ "t": t, "values": res.samples }))?,
                };
            }
            Times::Grid(grid) => {
                let paths = if *exact_path {
                    let ProcessSpec::Shot(p) = process else {
                        return Err(CliError::usage("exact paths need a shot-noise process"));
                    };
                    let horizon = grid.last().copied().unwrap_or(0.0);
                    let path = simulate_path(p, horizon, grid, &mut RngStream::new(cfg.seed, 0))?;
                    let values = path.values.clone();
                    out.path = Some(path);
                    vec![values]
                } else {
                    run_path_ensemble(process, grid, *n, cfg.seed, workers)?
                };
                out.body = match cfg.format {
                    OutFormat::Csv => {
                        let mut s = csv_header(cfg)?;
                        s.push_str("path,time,value\n");
                        for (i, p) in paths.iter().enumerate() {
                            for (t, v) in grid.iter().zip(p) {
                                writeln!(s, "{i},{},{}", f(*t), f(*v)).unwrap();
                            }
                        }
                        s
                    }
                    OutFormat::Json => json_doc(cfg, serde_json::json!({ "times": grid, "paths": paths }))?,
                };
            }
        },
        CommandConfig::Moments { process, t, s } => {
            let (mean, variance, covariance, fourth, nonneg) = match process {
                ProcessSpec::Shot(p) => {
                    let m = shot_moments(p, *t, *s);
                    (m.mean, m.variance, m.covariance, Some(m.fourth_moment), None)
                }
                ProcessSpec::Stein(p) => {
                    let m = shot_moments(&p.to_mixture()?, *t, *s);
                    (m.mean, m.variance, m.covariance, Some(m.fourth_moment), None)
                }
                ProcessSpec::LevyOu(p) => {
                    let m = levyou_moments(p, *t, *s);
                    (m.mean, m.variance, m.covariance, None, None)
                }
                ProcessSpec::GaussianOu(p) => {
                    (p.mean(*t), p.variance(*t), p.covariance(*t, *s), None, Some(p.nonneg_prob(*t)))
                }
            };
            out.body = match cfg.format {
                OutFormat::Csv => {
                    let mut b = csv_header(cfg)?;
                    b.push_str("t,s,mean,variance,covariance,fourth_moment,nonneg_prob\n");
                    writeln!(b, "{},{},{},{},{},{},{}", f(*t), f(*s), f(mean), f(variance), f(covariance), opt(fourth), opt(nonneg)).unwrap();
                    b
                }
                OutFormat::Json => json_doc(
                    cfg,
                    serde_json::json!({
                        "t": t, "s": s, "mean": mean, "variance": variance, "covariance": covariance,
                        "fourth_moment": fourth, "nonneg_prob": nonneg,
                    }),
                )?,
            };
        }
        CommandConfig::Check { family, lambda_grid } => {
            let report = check_conditions(family, lambda_grid)?;
            let data = serde_json::to_value(&report).map_err(|e| CliError::usage(e.to_string()))?;
            out.console = Some(format!("{}\n", report.classification));
            out.body = match cfg.format {
                OutFormat::Json => json_doc(cfg, data)?,
                OutFormat::Csv => {
                    let mut b = csv_header(cfg)?;
                    b.push_str(&report.to_table());
                    b
                }
            };
        }
        CommandConfig::Tails { sub, x } => {
            let mut rows = Vec::with_capacity(x.len());
            for &xi in x {
                rows.push((xi, sub.levy_tail_detailed(xi)?));
            }
            out.body = match cfg.format {
                OutFormat::Csv => {
                    let mut b = csv_header(cfg)?;
                    b.push_str("x,tail,est_abs_error,by_quadrature,divergence_risk\n");
                    for (xi, v) in &rows {
                        writeln!(b, "{},{},{},{},{}", f(*xi), f(v.value), f(v.est_abs_error), v.by_quadrature, v.divergence_risk)
                            .unwrap();
                    }
                    b
                }
                OutFormat::Json => {
                    let data: Vec<Value> = rows
                        .iter()
                        .map(|(xi, v)| {
                            serde_json::json!({
                                "x": xi, "tail": v.value, "est_abs_error": v.est_abs_error,
                                "by_quadrature": v.by_quadrature, "divergence_risk": v.divergence_risk,
                            })
                        })
                        .collect();
                    json_doc(cfg, Value::Array(data))?
                }
            };
        }
        CommandConfig::Compare { experiment } => {
            let table = compare_experiment(experiment, workers);
            if !table.rows.is_empty() && table.failed() == table.rows.len() {
                out.status = 4;
            }
            out.body = match cfg.format {
                OutFormat::Csv => {
                    let mut buf = Vec::new();
                    table.write_csv(&mut buf)?;
                    csv_header(cfg)? + &String::from_utf8_lossy(&buf)
                }
                OutFormat::Json => {
                    json_doc(cfg, serde_json::to_value(&table.rows).map_err(|e| CliError::usage(e.to_string()))?)?
                }
            };
            let failed = table.failed();
            if failed > 0 {
                out.console = Some(format!("{failed} of {} cells failed\n", table.rows.len()));
            }
        }
    }
    Ok(out)
}
