//! Command-line front end for the dimension-witness toolkit: ideal-model
//! prediction, synthetic data generation, dataset analysis, maxima search
//! and gate-identity verification.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use dimwit::circuit::{simulated_probability_matrix, verify_identities_corrupting};
use dimwit::experiment::{
    full_report, load_dataset, sample_counts, save_dataset, ExperimentDataset, JobCounts, Report,
    Scheduling,
};
use dimwit::maxima::{
    anneal_quantum_max, classical_max_det, closed_form_config, evaluate_config, known_quantum_max,
    table_matrix, verify_table_matrix, AnnealConfig, ClosedFormCase, Field, MAX_DET_BINARY,
};
use dimwit::witness::{adjugate, rank_threshold, witness, Model, Verdict};

#[derive(Debug, Parser)]
#[command(name = "dimwit", version)]
#[command(about = "prepare-and-prepare dimension-witness test: predict, simulate, analyze")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the ideal 5×5 probability matrix, its adjugate, W and verdict
    Ideal {
        /// Simulate with two-qubit gates decomposed into ECR + one-qubit gates
        #[arg(long)]
        decompose_ecr: bool,
    },

    /// Sample a synthetic count dataset from the ideal model
    Simulate {
        /// Shots per circuit cell
        #[arg(long, default_value_t = 20_000)]
        shots: u64,

        /// Number of jobs (half ALAP, half ASAP)
        #[arg(long, default_value_t = 10)]
        jobs: usize,

        /// RNG seed (falls back to DIMWIT_SEED, then 42)
        #[arg(long)]
        seed: Option<u64>,

        /// Output path for the dataset JSON
        #[arg(long)]
        out: PathBuf,
    },

    /// Analyze a count dataset: pooled and per-job witnesses with verdicts
    Analyze {
        /// Dataset JSON path
        #[arg(long = "in")]
        input: PathBuf,

        /// Violation threshold in standard errors
        #[arg(long, default_value_t = 6.0)]
        sigma: f64,

        /// Also write per-job W values as CSV for external plotting
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Search or look up maxima of |W_n|
    Maxima {
        #[arg(long, value_enum, default_value_t = Mode::Anneal)]
        mode: Mode,

        /// Number of preparations per side
        #[arg(long)]
        n: usize,

        /// Hilbert-space dimension (required for the annealing search)
        #[arg(long)]
        d: Option<usize>,

        /// real or complex
        #[arg(long)]
        field: Option<Field>,

        /// RNG seed (falls back to DIMWIT_SEED, then 42)
        #[arg(long)]
        seed: Option<u64>,

        /// Override the number of annealing restarts
        #[arg(long)]
        restarts: Option<usize>,
    },

    /// Verify the transpilation identities behind the hardware circuits
    Gates {
        /// Corrupt one named identity (negative control)
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Anneal,
    ClosedForm,
    Classical,
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (`dimwit gates | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Ideal { decompose_ecr } => cmd_ideal(cli.format, decompose_ecr),
        Command::Simulate {
            shots,
            jobs,
            seed,
            out,
        } => cmd_simulate(cli.format, shots, jobs, seed, &out),
        Command::Analyze { input, sigma, csv } => cmd_analyze(cli.format, &input, sigma, csv),
        Command::Maxima {
            mode,
            n,
            d,
            field,
            seed,
            restarts,
        } => cmd_maxima(cli.format, mode, n, d, field, seed, restarts),
        Command::Gates { corrupt } => cmd_gates(cli.format, corrupt),
    }
}

/// --seed flag, then DIMWIT_SEED, then a fixed default.
fn resolve_seed(flag: Option<u64>) -> anyhow::Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("DIMWIT_SEED") {
        Ok(raw) => raw
            .parse()
            .with_context(|| format!("DIMWIT_SEED is not a valid seed: {raw:?}")),
        Err(_) => Ok(42),
    }
}

fn print_matrix(rows: &[Vec<f64>], precision: usize) {
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .map(|v| format!("{v:>width$.precision$}", width = precision + 4))
            .collect();
        println!("  {}", line.join(" "));
    }
}

fn cmd_ideal(format: Format, decompose_ecr: bool) -> anyhow::Result<ExitCode> {
    let p = simulated_probability_matrix(decompose_ecr);
    let w = witness(&p);
    let adj = adjugate(&p);
    let null_ok = w.abs() <= 1e-12;

    match format {
        Format::Json => {
            let value = serde_json::json!({
                "n": p.n(),
                "d": 2,
                "decompose_ecr": decompose_ecr,
                "p": p.rows(),
                "adjugate": adj,
                "W": w,
                "forced_zero_from_n": {
                    "classical": rank_threshold(2, Model::Classical),
                    "quantum_real": rank_threshold(2, Model::QuantumReal),
                    "quantum_complex": rank_threshold(2, Model::QuantumComplex),
                },
                "null_consistent": null_ok,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Format::Text => {
            println!(
                "ideal prepare-and-prepare test: n = 5 Viviani preparations, qubit measurement{}",
                if decompose_ecr {
                    " (ECR decomposition)"
                } else {
                    ""
                }
            );
            println!("p:");
            print_matrix(&p.rows(), 6);
            println!("adjugate:");
            print_matrix(&adj, 9);
            println!("W = det p = {w:.3e}");
            println!(
                "forced zero from: n ≥ {} classical, n ≥ {} quantum-real, n ≥ {} quantum-complex",
                rank_threshold(2, Model::Classical),
                rank_threshold(2, Model::QuantumReal),
                rank_threshold(2, Model::QuantumComplex),
            );
            if null_ok {
                println!("verdict: |W| ≤ 1e-12 — consistent with complex qubit preparations");
            } else {
                println!("verdict: |W| > 1e-12 — ideal model violated (simulation bug)");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// splitmix64 step; distinct jobs get independent cell streams.
fn job_seed(seed: u64, job: usize) -> u64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(1 + job as u64));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn cmd_simulate(
    format: Format,
    shots: u64,
    jobs: usize,
    seed: Option<u64>,
    out: &Path,
) -> anyhow::Result<ExitCode> {
    if shots == 0 {
        bail!("--shots must be positive");
    }
    if jobs == 0 {
        bail!("--jobs must be positive");
    }
    let seed = resolve_seed(seed)?;
    let p = simulated_probability_matrix(false);

    let job_counts: Vec<JobCounts> = (0..jobs)
        .map(|job| {
            let mut counts = sample_counts(&p, shots, job_seed(seed, job));
            counts.job_id = format!("sim-{job:03}");
            counts.scheduling = if job % 2 == 0 {
                Scheduling::Alap
            } else {
                Scheduling::Asap
            };
            counts
        })
        .collect();

    let mut metadata = BTreeMap::new();
    metadata.insert("source".to_string(), "synthetic ideal model".to_string());
    metadata.insert("seed".to_string(), seed.to_string());
    let ds = ExperimentDataset {
        n: p.n(),
        jobs: job_counts,
        metadata,
    };
    ds.validate()?;
    save_dataset(&ds, out).with_context(|| format!("writing {}", out.display()))?;

    match format {
        Format::Json => {
            let value = serde_json::json!({
                "out": out.display().to_string(),
                "n": ds.n,
                "jobs": jobs,
                "shots_per_cell": shots,
                "seed": seed,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Format::Text => {
            println!("seed: {seed}");
            println!(
                "wrote {jobs} jobs × {shots} shots/cell (n = {}) to {}",
                ds.n,
                out.display()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report_text(report: &Report) {
    println!(
        "dataset: n = {}, {} jobs, sigma threshold {}",
        report.n, report.overall.jobs, report.sigma_threshold
    );
    for (key, value) in &report.metadata {
        println!("  {key}: {value}");
    }
    let sections = std::iter::once(&report.overall).chain(&report.by_scheduling);
    for part in sections {
        let pooled = &part.pooled;
        println!(
            "[{}] pooled W' = {:+.4e} ± {:.3e}  z = {:>6.2}  {}",
            part.label,
            pooled.w,
            pooled.stderr,
            pooled.zscore.unwrap_or(f64::NAN),
            part.pooled_verdict,
        );
        match (&part.per_job, &part.per_job_verdict) {
            (Some(pj), Some(verdict)) => println!(
                "[{}] per-job W\" = {:+.4e} ± {:.3e}  z = {:>6.2}  {}",
                part.label,
                pj.w,
                pj.stderr,
                pj.zscore.unwrap_or(f64::NAN),
                verdict,
            ),
            _ => println!("[{}] per-job: not enough jobs", part.label),
        }
    }
    println!("pooled frequencies:");
    print_matrix(&report.frequencies, 6);
    if let Some(dev) = &report.ideal_deviation {
        let max_dev = dev
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        println!("max |p̂ − p_ideal| = {max_dev:.3e}");
    }
}

fn cmd_analyze(
    format: Format,
    input: &Path,
    sigma: f64,
    csv: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    if !sigma.is_finite() || sigma <= 0.0 {
        bail!("--sigma must be positive");
    }
    let ds = load_dataset(input).with_context(|| format!("reading {}", input.display()))?;
    let report = full_report(&ds, sigma)?;

    if let Some(csv_path) = csv {
        let mut lines = String::from("job,scheduling,W\n");
        for (job, w) in ds.jobs.iter().zip(&report.overall.per_job_values) {
            lines.push_str(&format!("{},{},{w:e}\n", job.job_id, job.scheduling));
        }
        std::fs::write(&csv_path, lines)
            .with_context(|| format!("writing {}", csv_path.display()))?;
    }

    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => print_report_text(&report),
    }

    let violated = report.overall.pooled_verdict == Verdict::Violated
        || report.overall.per_job_verdict == Some(Verdict::Violated);
    Ok(if violated {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn maxima_json(
    case: &str,
    n: usize,
    d: Option<usize>,
    field: Option<Field>,
    value: f64,
    reference_value: Option<f64>,
    config: serde_json::Value,
) -> serde_json::Value {
    serde_json::json!({
        "case": case,
        "n": n,
        "d": d,
        "field": field,
        "value": value,
        "reference_value": reference_value,
        "abs_error": reference_value.map(|p| (value - p).abs()),
        "config": config,
    })
}

fn cmd_maxima(
    format: Format,
    mode: Mode,
    n: usize,
    d: Option<usize>,
    field: Option<Field>,
    seed: Option<u64>,
    restarts: Option<usize>,
) -> anyhow::Result<ExitCode> {
    let mut entries = Vec::new();

    match mode {
        Mode::Classical => {
            if !(1..=9).contains(&n) {
                bail!("classical maxima are tabulated for n = 1..=9");
            }
            let (det, matrix, how) = if n <= 5 {
                let (det, matrix) = classical_max_det(n)?;
                (det, matrix, "exhaustive search")
            } else {
                let det = verify_table_matrix(n)?;
                (det, table_matrix(n)?, "table matrix")
            };
            let reference = MAX_DET_BINARY[n - 1];
            entries.push((
                format!("classical_n{n}"),
                n,
                None,
                None,
                det as f64,
                Some(reference as f64),
                serde_json::json!({ "matrix": matrix.rows() }),
                how,
            ));
        }
        Mode::ClosedForm => {
            let cases: Vec<ClosedFormCase> = ClosedFormCase::all()
                .iter()
                .copied()
                .filter(|case| {
                    case.n() == n
                        && d.is_none_or(|d| case.d() == d)
                        && field.is_none_or(|f| case.field() == f)
                })
                .collect();
            if cases.is_empty() {
                bail!("no closed-form case matches n = {n} with the given --d/--field");
            }
            for case in cases {
                let config = closed_form_config(case)?;
                let value = evaluate_config(&config)?;
                entries.push((
                    case.name().to_string(),
                    case.n(),
                    Some(case.d()),
                    Some(case.field()),
                    value,
                    Some(case.reference_value()),
                    serde_json::to_value(&config)?,
                    "closed form",
                ));
            }
        }
        Mode::Anneal => {
            let d = d.context("--d is required for the annealing search")?;
            let field = field.unwrap_or(Field::Real);
            let seed = resolve_seed(seed)?;
            let mut cfg = AnnealConfig {
                seed,
                ..AnnealConfig::default()
            };
            if let Some(r) = restarts {
                cfg.restarts = r;
            }
            if format == Format::Text {
                println!(
                    "annealing n = {n}, d = {d}, {field} (seed {seed}, {} restarts)",
                    cfg.restarts
                );
            }
            let (value, config) = anneal_quantum_max(n, d, field, &cfg)?;
            entries.push((
                format!("anneal_n{n}_d{d}_{field}"),
                n,
                Some(d),
                Some(field),
                value,
                known_quantum_max(n, d, field),
                serde_json::to_value(&config)?,
                "simulated annealing",
            ));
        }
    }

    match format {
        Format::Json => {
            let values: Vec<serde_json::Value> = entries
                .iter()
                .map(|(case, n, d, field, value, reference, config, _)| {
                    maxima_json(case, *n, *d, *field, *value, *reference, config.clone())
                })
                .collect();
            let out = if values.len() == 1 {
                values.into_iter().next().unwrap()
            } else {
                serde_json::Value::Array(values)
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            for (case, _, _, _, value, reference, _, how) in &entries {
                match reference {
                    Some(p) => println!(
                        "{case}: value = {value:.12}, reference = {p:.12}, |err| = {:.2e}  ({how})",
                        (value - p).abs()
                    ),
                    None => println!("{case}: value = {value:.12}  ({how})"),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gates(format: Format, corrupt: Option<String>) -> anyhow::Result<ExitCode> {
    let checks = verify_identities_corrupting(corrupt.as_deref());
    if let Some(name) = &corrupt {
        if !checks.iter().any(|c| c.name == name) {
            bail!("--corrupt {name:?} does not name any checked identity");
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);

    match format {
        Format::Json => {
            let items: Vec<serde_json::Value> = checks
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "name": c.name,
                        "pass": c.pass,
                        "deviation": c.deviation,
                    })
                })
                .collect();
            let value = serde_json::json!({ "identities": items, "all_pass": all_pass });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Format::Text => {
            for check in &checks {
                println!(
                    "{} {:<28} max deviation {:.2e}",
                    if check.pass { "ok  " } else { "FAIL" },
                    check.name,
                    check.deviation,
                );
            }
            println!(
                "{} of {} identities hold",
                checks.iter().filter(|c| c.pass).count(),
                checks.len()
            );
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
