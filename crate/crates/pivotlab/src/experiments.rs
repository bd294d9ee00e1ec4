//! Monte Carlo harness for the three experiment models: the 1-sided naive
//! model, the 2-sided worst-case model on the Wilkinson matrix, and the
//! 2-sided max-movement model on PL-max draws.
//!
//! Trials are independent; each derives its own random stream from the
//! master seed and trial index, so results depend only on the config and
//! never on scheduling.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{sample, sample_pl, EnsembleSpec, PlVariant, XiSpec};
use crate::error::{Error, Result};
use crate::linalg::{gepp_factor, wilkinson_matrix};
use crate::matrix::DenseMatrix;
use crate::rng::RandomStream;
use crate::stirling::PivotCountLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Count pivots of one ensemble draw.
    Naive,
    /// Count pivots of U * A_n * V^H for iid transform draws U, V.
    WorstCase,
    /// Count pivots of U * (PL) * V^H for a fresh PL-max(Uniform[-1,1]) draw.
    MaxMove,
}

impl Model {
    pub fn label(&self) -> &'static str {
        match self {
            Model::Naive => "naive",
            Model::WorstCase => "worstcase",
            Model::MaxMove => "maxmove",
        }
    }

    pub fn parse(s: &str) -> Result<Model> {
        match s {
            "naive" => Ok(Model::Naive),
            "worstcase" => Ok(Model::WorstCase),
            "maxmove" => Ok(Model::MaxMove),
            other => Err(Error::ConfigError(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub ensemble: EnsembleSpec,
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub output_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub pivot_count: usize,
    pub growth: f64,
    pub singular: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    pub count_used: usize,
    pub count_excluded: usize,
    /// Lower median: for an even count the smaller middle value.
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation with divisor count - 1; 0 for a single
    /// observation.
    pub std: f64,
    /// Counts over pivot values 0..n-1 for the non-excluded trials.
    pub histogram: Vec<u64>,
}

pub fn validate_config(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.n == 0 {
        return Err(Error::ConfigError("dimension must be positive".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::ConfigError("trial count must be positive".into()));
    }
    match cfg.model {
        Model::Naive => Ok(()),
        Model::WorstCase | Model::MaxMove => {
            if !cfg.ensemble.is_transform() {
                return Err(Error::ConfigError(format!(
                    "model `{}` admits only the seven transform ensembles, got `{}`",
                    cfg.model.label(),
                    cfg.ensemble.label()
                )));
            }
            if cfg.model == Model::MaxMove && cfg.n < 2 {
                return Err(Error::ConfigError("max-movement model needs n >= 2".into()));
            }
            Ok(())
        }
    }
}

/// Deterministic per-trial stream: a splitmix64 chain keyed by the master
/// seed and trial index feeds a ChaCha key, so distinct indices give
/// independent counter-mode streams.
pub fn seed_stream(master_seed: u64, trial_index: u64) -> RandomStream {
    let mut state = master_seed ^ trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    RandomStream::from_seed(key)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub stats: SummaryStats,
}

fn one_trial(
    cfg: &ExperimentConfig,
    wilkinson: Option<&DenseMatrix>,
    trial: u64,
) -> Result<TrialRecord> {
    let mut rng = seed_stream(cfg.master_seed, trial);
    let m = match cfg.model {
        Model::Naive => sample(&cfg.ensemble, cfg.n, &mut rng)?,
        Model::WorstCase => {
            let u = sample(&cfg.ensemble, cfg.n, &mut rng)?;
            let v = sample(&cfg.ensemble, cfg.n, &mut rng)?;
            u.matmul(wilkinson.expect("worst-case target"))
                .matmul(&v.conj_transpose())
        }
        Model::MaxMove => {
            let pl = sample_pl(PlVariant::Max, XiSpec::UniformSym, cfg.n, &mut rng)?;
            let u = sample(&cfg.ensemble, cfg.n, &mut rng)?;
            let v = sample(&cfg.ensemble, cfg.n, &mut rng)?;
            u.matmul(&pl).matmul(&v.conj_transpose())
        }
    };
    let r = gepp_factor(&m)?;
    Ok(TrialRecord {
        trial_index: trial,
        pivot_count: r.pivot_count,
        growth: r.growth,
        singular: r.singular,
    })
}

/// Run all trials (in parallel on the current rayon pool), returning records
/// sorted by trial index plus summary statistics over the non-singular
/// trials.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    validate_config(cfg)?;
    let wilkinson = match cfg.model {
        Model::WorstCase => Some(wilkinson_matrix(cfg.n)),
        _ => None,
    };
    let mut records = (0..cfg.trials)
        .into_par_iter()
        .map(|t| one_trial(cfg, wilkinson.as_ref(), t))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.trial_index);
    let stats = summarize(&records, cfg.n)?;
    Ok(ExperimentOutput { records, stats })
}

/// Aggregate non-singular records: lower median, sample mean and std, and a
/// full histogram over 0..n-1.
pub fn summarize(records: &[TrialRecord], n: usize) -> Result<SummaryStats> {
    let mut counts: Vec<usize> = records
        .iter()
        .filter(|r| !r.singular)
        .map(|r| r.pivot_count)
        .collect();
    let excluded = records.len() - counts.len();
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    counts.sort_unstable();
    let m = counts.len();
    let median = counts[(m - 1) / 2] as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / m as f64;
    let std = if m > 1 {
        (counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (m - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let mut histogram = vec![0u64; n];
    for &c in &counts {
        histogram[c] += 1;
    }
    Ok(SummaryStats {
        count_used: m,
        count_excluded: excluded,
        median,
        mean,
        std,
        histogram,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoryComparison {
    /// (sample mean - law mean) / (law std / sqrt(count)).
    pub z_mean: f64,
    /// (sample std - law std) / (law std / sqrt(2 (count - 1))).
    pub z_std: f64,
    /// Total-variation distance between the empirical histogram and the law.
    pub tv_distance: f64,
}

pub fn compare_to_theory(stats: &SummaryStats, law: &PivotCountLaw) -> TheoryComparison {
    let m = stats.count_used as f64;
    let z_of = |delta: f64, scale: f64| {
        if scale > 0.0 {
            delta / scale
        } else if delta == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let z_mean = z_of(stats.mean - law.mean, law.std / m.sqrt());
    let z_std = z_of(stats.std - law.std, law.std / (2.0 * (m - 1.0).max(1.0)).sqrt());
    let mut tv = 0.0;
    for k in 0..law.pmf.len().max(stats.histogram.len()) {
        let emp = stats.histogram.get(k).copied().unwrap_or(0) as f64 / m;
        let th = law.pmf.get(k).copied().unwrap_or(0.0);
        tv += (emp - th).abs();
    }
    TheoryComparison {
        z_mean,
        z_std,
        tv_distance: tv / 2.0,
    }
}

/// Stable CSV rendering: header `trial,pivot_count,growth,singular`, one row
/// per trial in index order, growth in shortest round-trip form and the
/// singular flag as 0/1.
pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from("trial,pivot_count,growth,singular\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.trial_index,
            r.pivot_count,
            r.growth,
            if r.singular { 1 } else { 0 }
        ));
    }
    s
}
