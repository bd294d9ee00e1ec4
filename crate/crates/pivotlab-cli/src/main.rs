//! pivotlab CLI: sampling, factorization, Monte Carlo experiments, Stirling
//! queries, butterfly pivot configurations, spectral probes, and the
//! verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use pivotlab::ensembles::{
    walsh_signed_with, EnsembleSpec, PlVariant, WalshOrdering, XiSpec,
};
use pivotlab::error::Error;
use pivotlab::esd::{radial_profile, scaled_esd};
use pivotlab::experiments::{
    compare_to_theory, records_to_csv, run_experiment, seed_stream, ExperimentConfig, Model,
};
use pivotlab::linalg::gepp_factor;
use pivotlab::matrix::DenseMatrix;
use pivotlab::perm::pivot_configurations;
use pivotlab::stirling::{butterfly_pivot_law, pivot_law, stirling_table, stirling1_distribution};

#[derive(Parser)]
#[command(
    name = "pivotlab",
    version,
    about = "Gaussian elimination pivot-movement laboratory",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EnsembleParams {
    /// Bernoulli entry probability (bernoulli only)
    #[arg(long)]
    p: Option<f64>,
    /// Sparsity parameter in [0, 1) (pl-alpha only)
    #[arg(long)]
    alpha: Option<f64>,
    /// Entry law for PL ensembles: uniform-sym, uniform-disk, rademacher,
    /// std-normal
    #[arg(long)]
    xi: Option<String>,
}

impl EnsembleParams {
    fn resolve(&self, kind: &str) -> Result<EnsembleSpec, Error> {
        let xi = self.xi.as_deref().map(XiSpec::from_str).transpose()?;
        EnsembleSpec::parse(kind, self.p, xi, self.alpha)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw one matrix from an ensemble and write it as CSV
    Sample {
        /// Ensemble kind: ginibre, ginibre-complex, goe, gue, bernoulli,
        /// haar-orthogonal, haar-butterfly, butterfly-scalar,
        /// butterfly-simple-diag, butterfly-diag, walsh, dct, pl-max, pl,
        /// pl-alpha, wilkinson
        #[arg(long)]
        ensemble: String,
        #[command(flatten)]
        params: EnsembleParams,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Walsh row ordering (walsh only)
        #[arg(long, value_parser = parse_ordering)]
        ordering: Option<WalshOrdering>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a matrix CSV and write its GEPP factorization as JSON
    Factor {
        #[arg(long)]
        input: PathBuf,
        /// Output JSON path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo pivot-count experiment
    Experiment {
        /// JSON config file (keys model, ensemble, n, trials, seed, out and
        /// optional p, xi, alpha); exclusive with the individual flags
        #[arg(long)]
        config: Option<PathBuf>,
        /// naive, worstcase or maxmove
        #[arg(long)]
        model: Option<String>,
        /// Ensemble kind (see `sample --help`)
        #[arg(long)]
        ensemble: Option<String>,
        #[command(flatten)]
        params: EnsembleParams,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for results.csv and summary.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a Stirling row with its pmf as CSV (n, k, count, pmf)
    Stirling {
        #[arg(long)]
        n: usize,
    },
    /// Print butterfly pivot-location configurations with probabilities
    Configs {
        #[arg(long = "N")]
        n_dim: usize,
    },
    /// Sample a PL draw, compute its scaled spectrum, write eigenvalues CSV
    Esd {
        /// max, uniform or alpha
        #[arg(long, default_value = "alpha")]
        variant: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "std-normal")]
        xi: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Radial profile grid points
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance suite and print one pass/fail line per criterion
    Verify {
        /// Comma-separated criterion ids to run (default: all)
        #[arg(long)]
        only: Option<String>,
    },
}

fn parse_ordering(s: &str) -> Result<WalshOrdering, String> {
    match s {
        "sequency" => Ok(WalshOrdering::Sequency),
        "natural" => Ok(WalshOrdering::Natural),
        other => Err(format!("unknown ordering `{other}` (sequency|natural)")),
    }
}

fn main() -> ExitCode {
    // cap the worker pool before any rayon use
    if let Ok(v) = std::env::var("PIVOTLAB_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, anything else is usage
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sample {
            ensemble,
            params,
            n,
            seed,
            ordering,
            out,
        } => cmd_sample(&ensemble, &params, n, seed, ordering, out),
        Command::Factor { input, out } => cmd_factor(input, out),
        Command::Experiment {
            config,
            model,
            ensemble,
            params,
            n,
            trials,
            seed,
            out,
        } => cmd_experiment(config, model, ensemble, &params, n, trials, seed, out),
        Command::Stirling { n } => cmd_stirling(n),
        Command::Configs { n_dim } => cmd_configs(n_dim),
        Command::Esd {
            variant,
            alpha,
            xi,
            n,
            seed,
            grid,
            out,
        } => cmd_esd(variant, alpha, xi, n, seed, grid, out),
        Command::Verify { only } => cmd_verify(only),
    }
}

fn cmd_sample(
    ensemble: &str,
    params: &EnsembleParams,
    n: usize,
    seed: u64,
    ordering: Option<WalshOrdering>,
    out: PathBuf,
) -> Result<(), Error> {
    let spec = params.resolve(ensemble)?;
    let mut rng = seed_stream(seed, 0);
    let m = match (&spec, ordering) {
        (EnsembleSpec::WalshSigned, Some(ord)) => walsh_signed_with(n, ord, &mut rng)?,
        (_, Some(_)) => {
            return Err(Error::InvalidParameter(
                "--ordering applies only to the walsh ensemble".into(),
            ))
        }
        (spec, None) => pivotlab::ensembles::sample(spec, n, &mut rng)?,
    };
    let mut csv = m.to_csv();
    csv.push_str(&format!("# seed={seed},version={}\n", pivotlab::VERSION));
    std::fs::write(&out, csv)?;
    let sidecar = output::sample_sidecar(&spec, n, seed, &out);
    std::fs::write(out.with_extension("meta.json"), sidecar)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_factor(input: PathBuf, out: Option<PathBuf>) -> Result<(), Error> {
    let text = std::fs::read_to_string(&input)?;
    let m = DenseMatrix::from_csv(&text)?;
    let r = gepp_factor(&m)?;
    let json = output::factor_json(&input, &m, &r);
    match out {
        Some(path) => {
            std::fs::write(&path, json)?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    config: Option<PathBuf>,
    model: Option<String>,
    ensemble: Option<String>,
    params: &EnsembleParams,
    n: Option<usize>,
    trials: u64,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    let cfg = match config {
        Some(path) => {
            if model.is_some() || ensemble.is_some() || n.is_some() || seed.is_some() {
                return Err(Error::ConfigError(
                    "--config is exclusive with --model/--ensemble/--n/--seed".into(),
                ));
            }
            output::read_config_json(&path)?
        }
        None => {
            let model = Model::parse(&model.ok_or_else(|| {
                Error::ConfigError("--model required (or use --config)".into())
            })?)?;
            let kind = ensemble
                .ok_or_else(|| Error::ConfigError("--ensemble required".into()))?;
            ExperimentConfig {
                model,
                ensemble: params.resolve(&kind)?,
                n: n.ok_or_else(|| Error::ConfigError("--n required".into()))?,
                trials,
                master_seed: seed.ok_or_else(|| Error::ConfigError("--seed required".into()))?,
                output_path: out.as_ref().map(|p| p.display().to_string()),
            }
        }
    };
    let out_dir = cfg
        .output_path
        .clone()
        .ok_or_else(|| Error::ConfigError("--out directory required".into()))?;
    let out_dir = PathBuf::from(out_dir);
    std::fs::create_dir_all(&out_dir)?;

    let result = run_experiment(&cfg)?;
    let theory = theoretical_law(&cfg).map(|law| (compare_to_theory(&result.stats, &law), law));
    std::fs::write(out_dir.join("results.csv"), records_to_csv(&result.records))?;
    let summary = output::experiment_summary(&cfg, &result.stats, theory.as_ref());
    std::fs::write(out_dir.join("summary.json"), &summary)?;
    println!(
        "{} trials: median {}, mean {:.4}, std {:.4}, excluded {}",
        result.stats.count_used,
        result.stats.median,
        result.stats.mean,
        result.stats.std,
        result.stats.count_excluded
    );
    println!("wrote {}", out_dir.join("results.csv").display());
    println!("wrote {}", out_dir.join("summary.json").display());
    Ok(())
}

/// Exact pivot-count law when one applies to the configured run.
fn theoretical_law(cfg: &ExperimentConfig) -> Option<pivotlab::stirling::PivotCountLaw> {
    match (cfg.model, &cfg.ensemble) {
        (Model::Naive, EnsembleSpec::HaarButterflySs) => butterfly_pivot_law(cfg.n).ok(),
        (Model::Naive, EnsembleSpec::HaarOrthogonal)
        | (Model::Naive, EnsembleSpec::Ginibre)
        | (Model::Naive, EnsembleSpec::GinibreComplex)
        | (Model::WorstCase, EnsembleSpec::HaarOrthogonal)
        | (Model::MaxMove, EnsembleSpec::HaarOrthogonal) => Some(pivot_law(cfg.n)),
        _ => None,
    }
}

fn cmd_stirling(n: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("--n must be positive".into()));
    }
    let table = stirling_table(n);
    let dist = stirling1_distribution(n);
    println!("n,k,stirling,pmf");
    for k in 1..=n {
        println!("{n},{k},{},{}", table.get(n, k), dist.pmf[k - 1]);
    }
    Ok(())
}

fn cmd_configs(n_dim: usize) -> Result<(), Error> {
    let configs = pivot_configurations(n_dim)?;
    println!("bitmask,numerator,denominator");
    for c in &configs {
        println!("{},{},{}", c.bitmask_hex(), c.numerator, c.denominator);
    }
    Ok(())
}

fn cmd_esd(
    variant: String,
    alpha: Option<f64>,
    xi: String,
    n: usize,
    seed: u64,
    grid: usize,
    out: PathBuf,
) -> Result<(), Error> {
    let xi = XiSpec::from_str(&xi)?;
    let variant = match variant.as_str() {
        "max" => PlVariant::Max,
        "uniform" => PlVariant::Uniform,
        "alpha" => PlVariant::Alpha(alpha.ok_or_else(|| {
            Error::InvalidParameter("--alpha required for the alpha variant".into())
        })?),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown variant `{other}` (max|uniform|alpha)"
            )))
        }
    };
    if grid < 2 {
        return Err(Error::InvalidParameter("--grid must be at least 2".into()));
    }
    let mut rng = seed_stream(seed, 0);
    let sample = scaled_esd(variant, xi, n, &mut rng)?;
    let profile = radial_profile(&sample, grid);
    let mut csv = String::from("re,im\n");
    for z in &sample.eigenvalues {
        csv.push_str(&format!("{},{}\n", z.re, z.im));
    }
    csv.push_str(&format!("# seed={seed},version={}\n", pivotlab::VERSION));
    std::fs::write(&out, csv)?;
    let sidecar = output::esd_sidecar(&sample, &profile, seed, variant);
    std::fs::write(out.with_extension("meta.json"), sidecar)?;
    println!("wrote {} ({} eigenvalues)", out.display(), n);
    Ok(())
}

fn cmd_verify(only: Option<String>) -> Result<(), Error> {
    use pivotlab::acceptance as acc;
    let wanted: Option<Vec<usize>> = match only {
        Some(list) => Some(
            list.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidParameter(format!("bad criterion id `{s}`")))
                })
                .collect::<Result<_, _>>()?,
        ),
        None => None,
    };
    let all: Vec<(usize, fn() -> acc::CriterionResult)> = vec![
        (1, acc::criterion_1_stirling_exactness),
        (2, acc::criterion_2_ginibre_law),
        (3, acc::criterion_3_butterfly_law),
        (4, acc::criterion_4_haar_orthogonal_law),
        (5, acc::criterion_5_deterministic_transforms),
        (6, acc::criterion_6_small_matrix_probabilities),
        (7, acc::criterion_7_butterfly_closed_forms),
        (8, acc::criterion_8_worstcase_model),
        (9, acc::criterion_9_maxmove_model),
        (10, acc::criterion_10_esd_probes),
        (11, acc::criterion_11_reproducibility),
    ];
    let mut failed = false;
    for (id, f) in all {
        if let Some(ids) = &wanted {
            if !ids.contains(&id) {
                continue;
            }
        }
        let r = f();
        println!("{}", r.line());
        failed |= !r.passed;
    }
    if failed {
        Err(Error::InvalidInput("verification failed".into()))
    } else {
        Ok(())
    }
}
