//! Command-line front end: reproduces the numerical tables, evaluates the
//! bound for JSON model files, and runs the verification suites.
//!
//! Exit codes: 0 success, 1 validity failure (a bound that cannot be
//! certified, or a failing verify suite), 2 input error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use geombound::bounds::{self, BoundReport, HorizonModel};
use geombound::markov::{bd_extinction_bound, BdX, BirthDeathSpec};
use geombound::metrics::tv_distance;
use geombound::pmf::{geometric_pmf_auto, DiscretePmf};
use geombound::queueing::{
    busy_period_bound, corollary_q1_bound, BusyPeriodX, Mg1System, ServiceTimeModel,
};
use geombound::reliability::{failure_rates, Classification};
use geombound::tables;
use geombound::verify;

#[derive(Parser)]
#[command(name = "geombound", version, about = "Compound geometric approximation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Format {
    /// Emit JSON instead of CSV.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (the default).
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Pólya comparison table (Table 1 layout by default).
    PolyaTable {
        /// JSON file with rows [[m, d], ...].
        #[arg(long)]
        rows: Option<String>,
        #[command(flatten)]
        format: Format,
    },
    /// Erlang-service U grid (Table 2 layout by default).
    ErlangTable {
        /// JSON file {"ks": [...], "lambdas": ["...", ...], "betas": [...]}.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        format: Format,
    },
    /// Evaluate the bound described by a JSON model file.
    Bound {
        #[arg(long)]
        model: String,
        #[command(flatten)]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        /// One of: stein, orders, soundness, simulation.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 12345)]
        seed: u64,
    },
}

/// Input-side failure (bad file, bad JSON, bad parameters): exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::PolyaTable { rows, format } => cmd_polya_table(rows.as_deref(), &format),
        Command::ErlangTable { grid, format } => cmd_erlang_table(grid.as_deref(), &format),
        Command::Bound { model, format } => cmd_bound(&model, &format),
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
    };
    match outcome {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// RFC 4180 quoting: quote when the field contains comma, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

fn parse_num(s: &str, what: &str) -> Result<f64, InputError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| InputError(format!("{what}: cannot parse number '{s}'")))
}

fn parse_pmf(probs: &[String], what: &str) -> Result<DiscretePmf, InputError> {
    let vals = probs
        .iter()
        .map(|s| parse_num(s, what))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(DiscretePmf::from_probs(vals)?)
}

fn cmd_polya_table(rows_file: Option<&str>, format: &Format) -> Result<ExitCode, InputError> {
    let rows: Vec<(usize, usize)> = match rows_file {
        None => tables::default_polya_rows(),
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
    };
    let table = tables::polya_table(&rows)?;
    if format.json {
        let entries: Vec<_> = table
            .iter()
            .map(|r| {
                json!({
                    "m": r.m, "d": r.d,
                    "p": tables::format_4dp(r.p),
                    "tv_exact": tables::format_4sf(r.tv_exact),
                    "upper_tv": tables::format_4sf(r.upper_tv),
                    "upper_kolmogorov": tables::format_4sf(r.upper_k),
                    "lower_tv": tables::format_4sf(r.lower_tv),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"schema": 1, "rows": entries}))?
        );
    } else {
        println!("m,d,p,tv_exact,upper_tv,upper_kolmogorov,lower_tv");
        for r in &table {
            println!(
                "{}",
                csv_line(&[
                    r.m.to_string(),
                    r.d.to_string(),
                    tables::format_4dp(r.p),
                    tables::format_4sf(r.tv_exact),
                    tables::format_4sf(r.upper_tv),
                    tables::format_4sf(r.upper_k),
                    tables::format_4sf(r.lower_tv),
                ])
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct GridFile {
    ks: Vec<u32>,
    lambdas: Vec<String>,
    betas: Vec<String>,
}

fn cmd_erlang_table(grid_file: Option<&str>, format: &Format) -> Result<ExitCode, InputError> {
    let (ks, lambdas, betas) = match grid_file {
        None => tables::default_erlang_grid(),
        Some(path) => {
            let g: GridFile = serde_json::from_str(&fs::read_to_string(path)?)?;
            let lambdas = g
                .lambdas
                .iter()
                .map(|s| parse_num(s, "lambda"))
                .collect::<Result<Vec<_>, _>>()?;
            let betas = g
                .betas
                .iter()
                .map(|s| parse_num(s, "beta"))
                .collect::<Result<Vec<_>, _>>()?;
            (g.ks, lambdas, betas)
        }
    };
    let table = tables::erlang_table(&ks, &lambdas, &betas)?;
    if format.json {
        let mut cells = Vec::new();
        for (ki, &k) in ks.iter().enumerate() {
            for (li, &lambda) in lambdas.iter().enumerate() {
                for (bi, &beta) in betas.iter().enumerate() {
                    cells.push(json!({
                        "k": k, "lambda": lambda, "beta": beta,
                        "u": table.cell(ki, li, bi).render(),
                    }));
                }
            }
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"schema": 1, "cells": cells}))?
        );
    } else {
        let mut header = vec!["k".to_string(), "lambda".to_string()];
        header.extend(betas.iter().map(|b| format!("beta={b}")));
        println!("{}", csv_line(&header));
        for (ki, &k) in ks.iter().enumerate() {
            for (li, &lambda) in lambdas.iter().enumerate() {
                let mut fields = vec![k.to_string(), lambda.to_string()];
                fields.extend((0..betas.len()).map(|bi| table.cell(ki, li, bi).render()));
                println!("{}", csv_line(&fields));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum ServiceFile {
    Exponential { rate: String },
    Erlang { k: u32, beta: String },
    Deterministic { value: String },
}

impl ServiceFile {
    fn build(&self) -> Result<ServiceTimeModel, InputError> {
        Ok(match self {
            ServiceFile::Exponential { rate } => {
                ServiceTimeModel::exponential(parse_num(rate, "service rate")?)?
            }
            ServiceFile::Erlang { k, beta } => {
                ServiceTimeModel::erlang(*k, parse_num(beta, "service beta")?)?
            }
            ServiceFile::Deterministic { value } => {
                ServiceTimeModel::deterministic(parse_num(value, "service value")?)?
            }
        })
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ModelFile {
    /// A pmf compared to the geometric with the same mass at zero.
    Pmf { probs: Vec<String> },
    Mg1 {
        lambda: String,
        service: ServiceFile,
    },
    BusyPeriod {
        lambda: String,
        service: ServiceFile,
        x: Option<Vec<String>>,
    },
    BirthDeath {
        p: String,
        q: String,
        r: String,
        bd3_asserted: bool,
    },
    Translated {
        probs: Vec<String>,
        m: usize,
        x: Vec<String>,
    },
    HazardOrder { probs: Vec<String> },
    PoissonProcess {
        lambda: String,
        alpha: String,
        beta: String,
    },
}

struct Evaluated {
    report: BoundReport,
    /// Exact TV enclosure when the model's law is computable.
    exact: Option<(f64, f64)>,
}

fn evaluate_model(model: &ModelFile) -> Result<Evaluated, InputError> {
    Ok(match model {
        ModelFile::Pmf { probs } => {
            let w = parse_pmf(probs, "probs")?;
            let p = w.prob(0);
            let moments = w.moments();
            let mut report = bounds::corollary_ifr_bound(p, moments.mean)?;
            let profile = failure_rates(&w);
            if report.valid && profile.classification != Classification::Ifr {
                report.valid = false;
                report.invalid_reason = Some(format!(
                    "W not certified IFR (classified {:?})",
                    profile.classification
                ));
            }
            let g = geometric_pmf_auto(p, 1e-13)?;
            let tv = tv_distance(&w, &g);
            Evaluated {
                report,
                exact: Some((tv.lo, tv.hi)),
            }
        }
        ModelFile::Mg1 { lambda, service } => {
            let sys = Mg1System::new(parse_num(lambda, "lambda")?, service.build()?)?;
            Evaluated {
                report: corollary_q1_bound(&sys)?,
                exact: None,
            }
        }
        ModelFile::BusyPeriod { lambda, service, x } => {
            let sys = Mg1System::new(parse_num(lambda, "lambda")?, service.build()?)?;
            let report = match x {
                None => busy_period_bound(&sys, BusyPeriodX::Auto)?,
                Some(probs) => {
                    let xp = parse_pmf(probs, "x")?;
                    busy_period_bound(&sys, BusyPeriodX::Explicit(&xp))?
                }
            };
            Evaluated {
                report,
                exact: None,
            }
        }
        ModelFile::BirthDeath {
            p,
            q,
            r,
            bd3_asserted,
        } => {
            let spec = BirthDeathSpec::constant(
                parse_num(p, "p")?,
                parse_num(q, "q")?,
                parse_num(r, "r")?,
            );
            Evaluated {
                report: bd_extinction_bound(&spec, BdX::Auto, *bd3_asserted)?,
                exact: None,
            }
        }
        ModelFile::Translated { probs, m, x } => {
            let w = parse_pmf(probs, "probs")?;
            let xp = parse_pmf(x, "x")?;
            Evaluated {
                report: bounds::translated_bound(&w, *m, &xp)?,
                exact: None,
            }
        }
        ModelFile::HazardOrder { probs } => {
            let w = parse_pmf(probs, "probs")?;
            let p = w.prob(0);
            let cert = bounds::hazard_certificate_from_pmf(&w);
            let report = bounds::hazard_order_bound(p, w.moments().mean, cert)?;
            let g = geometric_pmf_auto(p, 1e-13)?;
            let tv = tv_distance(&w, &g);
            Evaluated {
                report,
                exact: Some((tv.lo, tv.hi)),
            }
        }
        ModelFile::PoissonProcess {
            lambda,
            alpha,
            beta,
        } => {
            let lambda = parse_num(lambda, "lambda")?;
            let alpha = parse_num(alpha, "alpha")?;
            let beta = parse_num(beta, "beta")?;
            if alpha <= 0.0 || beta <= 0.0 {
                return Err(InputError("alpha and beta must be positive".into()));
            }
            let horizon = HorizonModel {
                mean: alpha / beta,
                var: alpha / (beta * beta),
                laplace_at_lambda: (1.0 + lambda / beta).powf(-alpha),
                ifr_certified: alpha >= 1.0,
            };
            let b = bounds::poisson_process_bounds(lambda, &horizon)?;
            let n = geombound::pmf::mixed_poisson_gamma_pmf(alpha, beta, lambda, 400)?;
            let g = geometric_pmf_auto(horizon.laplace_at_lambda, 1e-13)?;
            let tv = tv_distance(&n, &g);
            Evaluated {
                report: b.tv,
                exact: Some((tv.lo, tv.hi)),
            }
        }
    })
}

fn report_json(e: &Evaluated) -> serde_json::Value {
    let r = &e.report;
    let i = &r.ingredients;
    json!({
        "schema": 1,
        "value": r.value,
        "target": r.target.as_str(),
        "approximant_p": r.approximant_p,
        "approximant_x": r.approximant_x.as_ref().map(|x| x.probs().to_vec()),
        "ingredients": {
            "p": i.p, "delta": i.delta, "ex": i.ex, "ey": i.ey,
            "ew": i.ew, "h_factor": i.h_factor, "u": i.u,
        },
        "valid": r.valid,
        "invalid_reason": r.invalid_reason,
        "provenance": r.provenance,
        "wasserstein_value": r.wasserstein_value,
        "exact_tv": e.exact.map(|(lo, hi)| json!({"lo": lo, "hi": hi})),
    })
}

fn cmd_bound(model_path: &str, format: &Format) -> Result<ExitCode, InputError> {
    let model: ModelFile = serde_json::from_str(&fs::read_to_string(model_path)?)?;
    let evaluated = evaluate_model(&model)?;
    if format.json || !format.csv {
        println!("{}", serde_json::to_string_pretty(&report_json(&evaluated))?);
    } else {
        let r = &evaluated.report;
        println!("value,target,approximant_p,valid,invalid_reason,provenance,exact_tv_lo,exact_tv_hi");
        let (lo, hi) = evaluated
            .exact
            .map(|(lo, hi)| (lo.to_string(), hi.to_string()))
            .unwrap_or_default();
        println!(
            "{}",
            csv_line(&[
                r.value.to_string(),
                r.target.as_str().to_string(),
                r.approximant_p.to_string(),
                r.valid.to_string(),
                r.invalid_reason.clone().unwrap_or_default(),
                r.provenance.to_string(),
                lo,
                hi,
            ])
        );
    }
    Ok(if evaluated.report.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify(suite: &str, seed: u64) -> Result<ExitCode, InputError> {
    let report = verify::run_suite(suite, seed)?;
    for c in &report.checks {
        println!(
            "{} {} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let passed = report.passed();
    println!(
        "suite {}: {} ({} checks)",
        report.suite,
        if passed { "PASS" } else { "FAIL" },
        report.checks.len()
    );
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
