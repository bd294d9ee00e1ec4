//! JSON rendering for CLI outputs. Everything goes through serde_json
//! values with insertion-ordered maps, so files are stable for diffing.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use pivotlab::ensembles::{EnsembleSpec, PlVariant, XiSpec};
use pivotlab::error::Error;
use pivotlab::esd::{RadialProfile, SpectralSample};
use pivotlab::experiments::{ExperimentConfig, Model, SummaryStats, TheoryComparison};
use pivotlab::linalg::GeppResult;
use pivotlab::matrix::{DenseMatrix, Field};
use pivotlab::stirling::PivotCountLaw;

fn ensemble_value(spec: &EnsembleSpec) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), Value::String(spec.label().into()));
    match spec {
        EnsembleSpec::Bernoulli(p) => {
            m.insert("p".into(), json!(p));
        }
        EnsembleSpec::PlMax(xi) | EnsembleSpec::Pl(xi) => {
            m.insert("xi".into(), Value::String(xi.label().into()));
        }
        EnsembleSpec::PlAlpha(xi, alpha) => {
            m.insert("xi".into(), Value::String(xi.label().into()));
            m.insert("alpha".into(), json!(alpha));
        }
        _ => {}
    }
    Value::Object(m)
}

fn matrix_value(m: &DenseMatrix) -> Value {
    let rows: Vec<Value> = (0..m.n_rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.n_cols())
                .map(|j| match m.field() {
                    Field::Real => json!(m.get_real(i, j)),
                    Field::Complex => {
                        let z = m.get(i, j);
                        json!([z.re, z.im])
                    }
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn sample_sidecar(spec: &EnsembleSpec, n: usize, seed: u64, out: &Path) -> String {
    let v = json!({
        "version": pivotlab::VERSION,
        "subcommand": "sample",
        "ensemble": ensemble_value(spec),
        "n": n,
        "seed": seed,
        "out": out.display().to_string(),
    });
    serde_json::to_string_pretty(&v).unwrap()
}

pub fn factor_json(input: &Path, m: &DenseMatrix, r: &GeppResult) -> String {
    let v = json!({
        "version": pivotlab::VERSION,
        "input": input.display().to_string(),
        "n": m.n_rows(),
        "field": m.field().to_string(),
        "perm": r.perm.image(),
        "pivot_sequence": r.pivots.indices(),
        "pivot_count": r.pivot_count,
        "growth": r.growth,
        "singular": r.singular,
        "lower": matrix_value(&r.lower),
        "upper": matrix_value(&r.upper),
    });
    serde_json::to_string_pretty(&v).unwrap()
}

pub fn experiment_summary(
    cfg: &ExperimentConfig,
    stats: &SummaryStats,
    theory: Option<&(TheoryComparison, PivotCountLaw)>,
) -> String {
    let theory_value = match theory {
        Some((cmp, law)) => json!({
            "law_mean": law.mean,
            "law_std": law.std,
            "z_mean": cmp.z_mean,
            "z_std": cmp.z_std,
            "tv_distance": cmp.tv_distance,
        }),
        None => Value::Null,
    };
    let v = json!({
        "version": pivotlab::VERSION,
        "config": {
            "model": cfg.model.label(),
            "ensemble": ensemble_value(&cfg.ensemble),
            "n": cfg.n,
            "trials": cfg.trials,
            "seed": cfg.master_seed,
            "out": cfg.output_path,
        },
        "stats": {
            "count_used": stats.count_used,
            "count_excluded": stats.count_excluded,
            "median": stats.median,
            "mean": stats.mean,
            "std": stats.std,
            "histogram": stats.histogram,
        },
        "theory": theory_value,
    });
    serde_json::to_string_pretty(&v).unwrap()
}

pub fn esd_sidecar(
    sample: &SpectralSample,
    profile: &RadialProfile,
    seed: u64,
    variant: PlVariant,
) -> String {
    let variant_name = match variant {
        PlVariant::Max => "max",
        PlVariant::Uniform => "uniform",
        PlVariant::Alpha(_) => "alpha",
    };
    let v = json!({
        "version": pivotlab::VERSION,
        "subcommand": "esd",
        "variant": variant_name,
        "n": sample.n,
        "alpha": sample.alpha,
        "xi": sample.xi.label(),
        "scale": sample.scale,
        "seed": seed,
        "radial": {
            "radii": profile.radii,
            "cdf": profile.cdf,
        },
    });
    serde_json::to_string_pretty(&v).unwrap()
}

/// Experiment config JSON: keys model, ensemble, n, trials, seed, out plus
/// optional p, xi, alpha.
pub fn read_config_json(path: &PathBuf) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::ConfigError(format!("bad JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::ConfigError("config must be a JSON object".into()))?;
    let get_str = |key: &str| -> Result<&str, Error> {
        obj.get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::ConfigError(format!("missing string key `{key}`")))
    };
    let get_u64 = |key: &str| -> Result<u64, Error> {
        obj.get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::ConfigError(format!("missing integer key `{key}`")))
    };
    let model = Model::parse(get_str("model")?)?;
    let xi = match obj.get("xi").and_then(Value::as_str) {
        Some(s) => Some(s.parse::<XiSpec>()?),
        None => None,
    };
    let ensemble = EnsembleSpec::parse(
        get_str("ensemble")?,
        obj.get("p").and_then(Value::as_f64),
        xi,
        obj.get("alpha").and_then(Value::as_f64),
    )?;
    Ok(ExperimentConfig {
        model,
        ensemble,
        n: get_u64("n")? as usize,
        trials: get_u64("trials")?,
        master_seed: get_u64("seed")?,
        output_path: obj
            .get("out")
            .and_then(Value::as_str)
            .map(|s| s.to_string()),
    })
}
