//! Finite statistics: shot sampling, count files, pooled vs per-job analysis.
//!
//! Calibration drift between jobs makes the witness — a nonlinear function
//! of probabilities — sensitive to how counts are aggregated, so both
//! estimators are computed: the pooled witness W′ from total frequencies,
//! and the per-job witness W″ (mean of per-job determinants with its
//! empirical standard error). Each stored job record is one analysis unit.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::simulated_probability_matrix;
use crate::witness::{dimension_verdict, witness, ProbabilityMatrix, Verdict, WitnessResult};
use crate::{Error, Result};

/// Gate scheduling policy of a job; metadata only, never simulated timing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheduling {
    #[serde(rename = "ALAP")]
    Alap,
    #[serde(rename = "ASAP")]
    Asap,
    #[serde(rename = "unspecified")]
    Unspecified,
}

impl std::fmt::Display for Scheduling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheduling::Alap => write!(f, "ALAP"),
            Scheduling::Asap => write!(f, "ASAP"),
            Scheduling::Unspecified => write!(f, "unspecified"),
        }
    }
}

/// Outcome-0 tallies of one job: `counts0[i][j]` successes out of
/// `shots_per_cell` for circuit (i, j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobCounts {
    pub job_id: String,
    pub scheduling: Scheduling,
    pub shots_per_cell: u64,
    pub counts0: Vec<Vec<u64>>,
}

impl JobCounts {
    fn validate(&self, n: usize) -> Result<()> {
        if self.counts0.len() != n || self.counts0.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidJob {
                job_id: self.job_id.clone(),
                reason: format!("counts0 is not {n}x{n}"),
            });
        }
        for row in &self.counts0 {
            for &count in row {
                if count > self.shots_per_cell {
                    return Err(Error::InvalidJob {
                        job_id: self.job_id.clone(),
                        reason: format!(
                            "count {count} exceeds shots_per_cell {}",
                            self.shots_per_cell
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn frequencies(&self) -> ProbabilityMatrix {
        let rows: Vec<Vec<f64>> = self
            .counts0
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| c as f64 / self.shots_per_cell as f64)
                    .collect()
            })
            .collect();
        ProbabilityMatrix::from_rows(&rows).expect("frequencies are in [0,1]")
    }
}

/// A full test run: jobs sharing one matrix size plus free-form metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDataset {
    pub n: usize,
    pub jobs: Vec<JobCounts>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ExperimentDataset {
    pub fn validate(&self) -> Result<()> {
        for job in &self.jobs {
            job.validate(self.n)?;
        }
        Ok(())
    }
}

fn cell_rng(seed: u64, i: usize, j: usize) -> ChaCha8Rng {
    // splitmix64 step keyed by (seed, cell index): deterministic and
    // independent of sampling order, so jobs parallelize safely.
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(1 + (i * 31 + j) as u64));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Draws one synthetic job: every cell is Binomial(N, p_ij) with its own
/// RNG stream keyed by (seed, i, j).
pub fn sample_counts(p: &ProbabilityMatrix, shots_per_cell: u64, seed: u64) -> JobCounts {
    let n = p.n();
    let counts0: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let prob = p.get(i, j);
                    if prob <= 0.0 {
                        0
                    } else if prob >= 1.0 {
                        shots_per_cell
                    } else {
                        let mut rng = cell_rng(seed, i, j);
                        Binomial::new(shots_per_cell, prob)
                            .expect("probability validated by ProbabilityMatrix")
                            .sample(&mut rng)
                    }
                })
                .collect()
        })
        .collect();
    JobCounts {
        job_id: format!("synthetic-{seed}"),
        scheduling: Scheduling::Unspecified,
        shots_per_cell,
        counts0,
    }
}

fn pooled_frequencies(ds: &ExperimentDataset) -> Result<(ProbabilityMatrix, u64)> {
    if ds.jobs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    ds.validate()?;
    let n = ds.n;
    let total_shots: u64 = ds.jobs.iter().map(|j| j.shots_per_cell).sum();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let total: u64 = ds.jobs.iter().map(|job| job.counts0[i][j]).sum();
                    total as f64 / total_shots as f64
                })
                .collect()
        })
        .collect();
    Ok((ProbabilityMatrix::from_rows(&rows)?, total_shots))
}

/// W′: witness of the aggregate frequencies, with the analytic error bar
/// at `N_total` shots per cell.
pub fn pooled_analysis(ds: &ExperimentDataset) -> Result<WitnessResult> {
    let (p, total_shots) = pooled_frequencies(ds)?;
    Ok(WitnessResult::from_probabilities(&p, total_shots))
}

/// W″: mean of per-job witnesses, with the empirical standard error of the
/// mean — this is what catches drift between calibrations.
pub fn per_job_analysis(ds: &ExperimentDataset) -> Result<WitnessResult> {
    if ds.jobs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if ds.jobs.len() < 2 {
        return Err(Error::TooFewJobs(ds.jobs.len()));
    }
    ds.validate()?;
    let values = per_job_witnesses(ds);
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let stderr = (var / k).sqrt();
    let shots = ds.jobs.iter().map(|j| j.shots_per_cell).min().unwrap_or(0);
    Ok(WitnessResult {
        w: mean,
        stderr,
        zscore: (stderr > 0.0).then(|| mean.abs() / stderr),
        n: ds.n,
        n_per_cell: shots,
        reliable: true,
    })
}

/// The individual witness values, job by job (the scatter-plot data).
pub fn per_job_witnesses(ds: &ExperimentDataset) -> Vec<f64> {
    ds.jobs
        .par_iter()
        .map(|job| witness(&job.frequencies()))
        .collect()
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<ExperimentDataset> {
    let text = std::fs::read_to_string(path)?;
    let ds: ExperimentDataset =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    ds.validate()?;
    Ok(ds)
}

pub fn save_dataset(ds: &ExperimentDataset, path: impl AsRef<Path>) -> Result<()> {
    ds.validate()?;
    let text = serde_json::to_string_pretty(ds).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// One scheduling partition's results within a report.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub label: String,
    pub jobs: usize,
    pub pooled: WitnessResult,
    pub pooled_verdict: Verdict,
    pub per_job: Option<WitnessResult>,
    pub per_job_verdict: Option<Verdict>,
    pub per_job_values: Vec<f64>,
}

/// Full analysis: pooled and per-job witnesses with verdicts, the empirical
/// frequency matrix, its deviation from the ideal prediction, and one
/// sub-report per scheduling label.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub n: usize,
    pub sigma_threshold: f64,
    pub metadata: BTreeMap<String, String>,
    pub overall: PartitionReport,
    pub by_scheduling: Vec<PartitionReport>,
    pub frequencies: Vec<Vec<f64>>,
    /// `p̂ − p_ideal`, present only for the 5×5 demonstration geometry.
    pub ideal_deviation: Option<Vec<Vec<f64>>>,
}

fn partition_report(
    label: String,
    ds: &ExperimentDataset,
    sigma_threshold: f64,
) -> Result<PartitionReport> {
    let pooled = pooled_analysis(ds)?;
    let pooled_verdict = dimension_verdict(&pooled, sigma_threshold)?;
    let (per_job, per_job_verdict) = match per_job_analysis(ds) {
        Ok(result) => {
            let verdict = dimension_verdict(&result, sigma_threshold)?;
            (Some(result), Some(verdict))
        }
        Err(Error::TooFewJobs(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(PartitionReport {
        label,
        jobs: ds.jobs.len(),
        pooled,
        pooled_verdict,
        per_job,
        per_job_verdict,
        per_job_values: per_job_witnesses(ds),
    })
}

pub fn full_report(ds: &ExperimentDataset, sigma_threshold: f64) -> Result<Report> {
    let overall = partition_report("all".into(), ds, sigma_threshold)?;
    let (frequencies, _) = pooled_frequencies(ds)?;

    let mut by_scheduling = Vec::new();
    for sched in [Scheduling::Alap, Scheduling::Asap, Scheduling::Unspecified] {
        let jobs: Vec<JobCounts> = ds
            .jobs
            .iter()
            .filter(|j| j.scheduling == sched)
            .cloned()
            .collect();
        if jobs.is_empty() || jobs.len() == ds.jobs.len() {
            continue;
        }
        let sub = ExperimentDataset {
            n: ds.n,
            jobs,
            metadata: ds.metadata.clone(),
        };
        by_scheduling.push(partition_report(sched.to_string(), &sub, sigma_threshold)?);
    }

    let ideal_deviation = (ds.n == 5).then(|| {
        let ideal = simulated_probability_matrix(false);
        (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| frequencies.get(i, j) - ideal.get(i, j))
                    .collect()
            })
            .collect()
    });

    Ok(Report {
        n: ds.n,
        sigma_threshold,
        metadata: ds.metadata.clone(),
        overall,
        by_scheduling,
        frequencies: frequencies.rows(),
        ideal_deviation,
    })
}
