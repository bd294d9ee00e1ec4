//! The acceptance gate: one function per criterion, each returning a
//! pass/fail verdict with a one-line detail string. The `acceptance`
//! integration test target asserts them; the CLI `verify` subcommand prints
//! them.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::ensembles::{
    butterfly_gepp_prediction, sample, sample_butterfly, sample_pl,
    ButterflyStructure, EnsembleSpec, PlVariant, XiSpec,
};
use crate::esd::{rank_nullity_probe, scaled_esd};
use crate::experiments::{
    compare_to_theory, records_to_csv, run_experiment, seed_stream, ExperimentConfig, Model,
};
use crate::linalg::{genp_factor, gepp_factor, growth_factor, wilkinson_matrix};
use crate::matrix::DenseMatrix;
use crate::perm::{cycle_decomposition, Permutation};
use crate::scalar::MACHINE_EPS;
use crate::stirling::{butterfly_pivot_law, pivot_law, stirling_table};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} ({:.1}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed_secs,
            self.detail
        )
    }
}

fn finish(
    id: usize,
    name: &'static str,
    start: std::time::Instant,
    passed: bool,
    detail: String,
) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

/// Iterative Heap's algorithm; calls `f` with every permutation image of
/// 1..=n.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// 1. Exact Stirling triangle: row sums equal n! for n <= 20 and the values
/// match exhaustive cycle-count enumeration for n <= 7.
pub fn criterion_1_stirling_exactness() -> CriterionResult {
    let start = std::time::Instant::now();
    let table = stirling_table(20);
    let mut fact = BigUint::one();
    for n in 1..=20usize {
        fact *= BigUint::from(n);
        let sum: BigUint = table.row(n).iter().sum();
        if sum != fact {
            return finish(
                1,
                "stirling exactness",
                start,
                false,
                format!("row {n} sum != {n}!"),
            );
        }
    }
    for n in 1..=7usize {
        let mut counts = vec![0u64; n + 1];
        for_each_permutation(n, |image| {
            let p = Permutation::from_image(image.to_vec()).unwrap();
            counts[cycle_decomposition(&p).cycle_count] += 1;
        });
        for k in 1..=n {
            if BigUint::from(counts[k]) != *table.get(n, k) {
                return finish(
                    1,
                    "stirling exactness",
                    start,
                    false,
                    format!("|s({n},{k})| != enumeration count {}", counts[k]),
                );
            }
        }
    }
    finish(
        1,
        "stirling exactness",
        start,
        true,
        "row sums exact to n=20, enumeration match to n=7".into(),
    )
}

/// 2. Ginibre naive model at n = 6: total-variation distance to the
/// Stirling pivot law under 0.01 at 1e5 trials.
pub fn criterion_2_ginibre_law() -> CriterionResult {
    let start = std::time::Instant::now();
    let cfg = ExperimentConfig {
        model: Model::Naive,
        ensemble: EnsembleSpec::Ginibre,
        n: 6,
        trials: 100_000,
        master_seed: 0x01A2,
        output_path: None,
    };
    let out = run_experiment(&cfg).unwrap();
    let cmp = compare_to_theory(&out.stats, &pivot_law(6));
    finish(
        2,
        "Ginibre pivot law (n=6)",
        start,
        cmp.tv_distance < 0.01,
        format!("tv distance {:.5} (< 0.01)", cmp.tv_distance),
    )
}

/// 3. Haar-butterfly naive model at N = 16 and 256: support in {0, N/2},
/// mean within 3 standard errors of (N/2)(1-1/N), and P(0) within 0.01 of
/// 1/N.
pub fn criterion_3_butterfly_law() -> CriterionResult {
    let start = std::time::Instant::now();
    let mut details = Vec::new();
    let mut passed = true;
    for n_dim in [16usize, 256] {
        let trials = 10_000u64;
        let cfg = ExperimentConfig {
            model: Model::Naive,
            ensemble: EnsembleSpec::HaarButterflySs,
            n: n_dim,
            trials,
            master_seed: 0x03B1,
            output_path: None,
        };
        let out = run_experiment(&cfg).unwrap();
        let law = butterfly_pivot_law(n_dim).unwrap();
        let support_ok = out
            .stats
            .histogram
            .iter()
            .enumerate()
            .all(|(k, &c)| c == 0 || k == 0 || k == n_dim / 2);
        let se = law.std / (trials as f64).sqrt();
        let mean_ok = (out.stats.mean - law.mean).abs() <= 3.0 * se;
        let p0 = out.stats.histogram[0] as f64 / out.stats.count_used as f64;
        let p0_ok = (p0 - 1.0 / n_dim as f64).abs() <= 0.01;
        passed &= support_ok && mean_ok && p0_ok;
        details.push(format!(
            "N={n_dim}: mean {:.3} (target {:.3} ± {:.3}), P(0) {:.4}, support {}",
            out.stats.mean,
            law.mean,
            3.0 * se,
            p0,
            if support_ok { "ok" } else { "VIOLATED" }
        ));
    }
    finish(
        3,
        "Haar-butterfly scaled-Bernoulli law",
        start,
        passed,
        details.join("; "),
    )
}

/// 4. Haar orthogonal naive model at N = 16: mean within 3 standard errors
/// of 16 - H_16 and std within 0.1 of sqrt(H_16 - H_16^(2)).
pub fn criterion_4_haar_orthogonal_law() -> CriterionResult {
    let start = std::time::Instant::now();
    let mean_target = 12.619271006771006;
    let std_target = 1.340291930806123;
    let trials = 10_000u64;
    let cfg = ExperimentConfig {
        model: Model::Naive,
        ensemble: EnsembleSpec::HaarOrthogonal,
        n: 16,
        trials,
        master_seed: 0x04C2,
        output_path: None,
    };
    let out = run_experiment(&cfg).unwrap();
    let se = std_target / (trials as f64).sqrt();
    let mean_ok = (out.stats.mean - mean_target).abs() <= 3.0 * se;
    let std_ok = (out.stats.std - std_target).abs() <= 0.1;
    finish(
        4,
        "Haar orthogonal Stirling law (N=16)",
        start,
        mean_ok && std_ok,
        format!(
            "mean {:.4} (target {mean_target:.4} ± {:.4}), std {:.4} (target {std_target:.4} ± 0.1)",
            out.stats.mean,
            3.0 * se,
            out.stats.std
        ),
    )
}

/// 5. Deterministic transforms: Walsh pivot counts 6 and 120, DCT-II 13 and
/// 249, with zero standard deviation over 100 sign draws.
pub fn criterion_5_deterministic_transforms() -> CriterionResult {
    let start = std::time::Instant::now();
    let mut passed = true;
    let mut details = Vec::new();
    for (ens, n_dim, want) in [
        (EnsembleSpec::WalshSigned, 16usize, 6usize),
        (EnsembleSpec::WalshSigned, 256, 120),
        (EnsembleSpec::DctSigned, 16, 13),
        (EnsembleSpec::DctSigned, 256, 249),
    ] {
        let cfg = ExperimentConfig {
            model: Model::Naive,
            ensemble: ens.clone(),
            n: n_dim,
            trials: 100,
            master_seed: 0x05D3,
            output_path: None,
        };
        let out = run_experiment(&cfg).unwrap();
        let ok = out.stats.mean == want as f64 && out.stats.std == 0.0;
        passed &= ok;
        details.push(format!(
            "{} N={n_dim}: count {} (want {want}), std {}",
            ens.label(),
            out.stats.mean,
            out.stats.std
        ));
    }
    finish(
        5,
        "Walsh/DCT deterministic pivot counts",
        start,
        passed,
        details.join("; "),
    )
}

/// 6. Exact 2x2 pivot probabilities: GOE, GUE and Bernoulli(1/2) at 1e6
/// trials within 0.005 of their closed forms.
pub fn criterion_6_small_matrix_probabilities() -> CriterionResult {
    let start = std::time::Instant::now();
    let trials = 1_000_000u64;
    let cases: [(EnsembleSpec, f64, &str); 3] = [
        (EnsembleSpec::Goe, 0.391826552, "GOE"),
        (EnsembleSpec::Gue, 0.577350269, "GUE"),
        (EnsembleSpec::Bernoulli(0.5), 0.25, "Bernoulli"),
    ];
    let mut passed = true;
    let mut details = Vec::new();
    for (ens, target, tag) in cases {
        let moves: u64 = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed_stream(0x06E4 + target.to_bits() as u64, t);
                let a = sample(&ens, 2, &mut rng).unwrap();
                // singular Bernoulli draws still have a well-defined pivot
                // choice, so no exclusion here
                gepp_factor(&a).unwrap().pivot_count as u64
            })
            .sum();
        let freq = moves as f64 / trials as f64;
        let ok = (freq - target).abs() <= 0.005;
        passed &= ok;
        details.push(format!("{tag}: {freq:.6} (target {target} ± 0.005)"));
    }
    finish(
        6,
        "2x2 exact pivot probabilities",
        start,
        passed,
        details.join("; "),
    )
}

/// 7. Butterfly closed forms at N in {4, 8, 16}: the GEPP prediction matches
/// elimination exactly in the permutation and within 32 N eps in the
/// factors; GENP factors match the Kronecker closed forms.
pub fn criterion_7_butterfly_closed_forms() -> CriterionResult {
    let start = std::time::Instant::now();
    for n_dim in [4usize, 8, 16] {
        let tol = 32.0 * n_dim as f64 * MACHINE_EPS;
        for trial in 0..1000u64 {
            let mut rng = seed_stream(0x07F5 + n_dim as u64, trial);
            let (m, angles) =
                sample_butterfly(ButterflyStructure::SimpleScalar, n_dim, &mut rng).unwrap();
            let pred = match butterfly_gepp_prediction(&angles) {
                Ok(p) => p,
                // |tan theta| = 1 ties carry probability zero under uniform
                // angles; the closed form is undefined there
                Err(_) => continue,
            };
            let actual = gepp_factor(&m).unwrap();
            if pred.perm != actual.perm {
                return finish(
                    7,
                    "butterfly closed forms",
                    start,
                    false,
                    format!("permutation mismatch at N={n_dim} trial {trial}"),
                );
            }
            let scale_l = actual.lower.max_norm().max(1.0);
            let scale_u = actual.upper.max_norm().max(1.0);
            for i in 0..n_dim {
                for j in 0..n_dim {
                    let dl = (pred.lower.get_real(i, j) - actual.lower.get_real(i, j)).abs();
                    let du = (pred.upper.get_real(i, j) - actual.upper.get_real(i, j)).abs();
                    if dl > tol * scale_l || du > tol * scale_u {
                        return finish(
                            7,
                            "butterfly closed forms",
                            start,
                            false,
                            format!("factor mismatch at N={n_dim} trial {trial} ({i},{j})"),
                        );
                    }
                }
            }
            // GENP closed form: ⊗ L_theta, ⊗ U_theta on the raw angles
            let thetas = angles.simple_scalar().unwrap();
            if thetas.iter().any(|t| t.cos().abs() < 1e-8) {
                continue;
            }
            let (l, u) = genp_factor(&m).unwrap();
            let mut lw = DenseMatrix::from_real(1, 1, vec![1.0]);
            let mut uw = DenseMatrix::from_real(1, 1, vec![1.0]);
            for &t in thetas.iter().rev() {
                lw = lw.kron(&DenseMatrix::from_rows(&[
                    vec![1.0, 0.0],
                    vec![-t.tan(), 1.0],
                ]));
                uw = uw.kron(&DenseMatrix::from_rows(&[
                    vec![t.cos(), t.sin()],
                    vec![0.0, 1.0 / t.cos()],
                ]));
            }
            let scale_l = l.max_norm().max(1.0);
            let scale_u = u.max_norm().max(1.0);
            for i in 0..n_dim {
                for j in 0..n_dim {
                    let dl = (l.get_real(i, j) - lw.get_real(i, j)).abs();
                    let du = (u.get_real(i, j) - uw.get_real(i, j)).abs();
                    if dl > tol * scale_l || du > tol * scale_u {
                        return finish(
                            7,
                            "butterfly closed forms",
                            start,
                            false,
                            format!("GENP mismatch at N={n_dim} trial {trial} ({i},{j})"),
                        );
                    }
                }
            }
        }
    }
    finish(
        7,
        "butterfly closed forms",
        start,
        true,
        "1000 draws each at N=4,8,16: permutations exact, factors within 32 N eps".into(),
    )
}

/// 8. Worst-case model: Haar orthogonal 2-sided at N = 256 matches the
/// Stirling law mean within 3 standard errors; Wilkinson growth is exactly
/// 2^(n-1) for n <= 30.
pub fn criterion_8_worstcase_model() -> CriterionResult {
    let start = std::time::Instant::now();
    let mean_target = 249.8756550371827;
    let std_theory = 2.117382706670809;
    let trials = 1000u64;
    let cfg = ExperimentConfig {
        model: Model::WorstCase,
        ensemble: EnsembleSpec::HaarOrthogonal,
        n: 256,
        trials,
        master_seed: 0x08A6,
        output_path: None,
    };
    let out = run_experiment(&cfg).unwrap();
    let se = std_theory / (trials as f64).sqrt();
    let mean_ok = (out.stats.mean - mean_target).abs() <= 3.0 * se;
    let mut growth_ok = true;
    for n in 1..=30usize {
        if growth_factor(&wilkinson_matrix(n)).unwrap() != (2.0f64).powi(n as i32 - 1) {
            growth_ok = false;
        }
    }
    finish(
        8,
        "worst-case model",
        start,
        mean_ok && growth_ok,
        format!(
            "mean {:.4} (target {mean_target:.4} ± {:.4}); Wilkinson growth exact to n=30: {}",
            out.stats.mean,
            3.0 * se,
            growth_ok
        ),
    )
}

/// 9. Max-movement model: every PL-max draw needs n-1 movements at unit
/// growth, and each of the seven 2-sided transforms at N = 16 matches the
/// Stirling law mean within 3 standard errors.
pub fn criterion_9_maxmove_model() -> CriterionResult {
    let start = std::time::Instant::now();
    let pl_ok = (0..1000u64).into_par_iter().all(|t| {
        let mut rng = seed_stream(0x09B7, t);
        let a = sample_pl(PlVariant::Max, XiSpec::UniformSym, 256, &mut rng).unwrap();
        let r = gepp_factor(&a).unwrap();
        r.pivot_count == 255 && r.growth == 1.0
    });
    let law = pivot_law(16);
    let trials = 10_000u64;
    let se = law.std / (trials as f64).sqrt();
    let ensembles = [
        EnsembleSpec::HaarButterflySs,
        EnsembleSpec::ButterflyScalar,
        EnsembleSpec::ButterflySimpleDiag,
        EnsembleSpec::ButterflyDiag,
        EnsembleSpec::WalshSigned,
        EnsembleSpec::HaarOrthogonal,
        EnsembleSpec::DctSigned,
    ];
    let mut passed = pl_ok;
    let mut details = vec![format!("PL-max draws: {}", if pl_ok { "ok" } else { "FAIL" })];
    for ens in ensembles {
        let cfg = ExperimentConfig {
            model: Model::MaxMove,
            ensemble: ens.clone(),
            n: 16,
            trials,
            master_seed: 0x09C8,
            output_path: None,
        };
        let out = run_experiment(&cfg).unwrap();
        let ok = (out.stats.mean - law.mean).abs() <= 3.0 * se;
        passed &= ok;
        details.push(format!(
            "{}: {:.4}{}",
            ens.label(),
            out.stats.mean,
            if ok { "" } else { " OUT" }
        ));
    }
    details.push(format!("(target {:.4} ± {:.4})", law.mean, 3.0 * se));
    finish(9, "max-movement model", start, passed, details.join("; "))
}

/// 10. ESD probes at n = 512: Ginibre radial CDF near r^2, radial mass at
/// 1/2 non-decreasing in alpha on three seeds, and the rank/nullity probe
/// within 5% of its targets at alpha = 3/4.
pub fn criterion_10_esd_probes() -> CriterionResult {
    let start = std::time::Instant::now();
    let n = 512usize;

    // (a) circular law radial CDF
    let mut rng = seed_stream(0x0AD9, 0);
    let ginibre = scaled_esd(PlVariant::Alpha(0.0), XiSpec::StdNormal, n, &mut rng).unwrap();
    let mut sup_dev = 0.0f64;
    for i in 0..=70 {
        let r = 0.2 + 0.7 * i as f64 / 70.0;
        sup_dev = sup_dev.max((ginibre.radial_cdf_at(r) - r * r).abs());
    }
    let a_ok = sup_dev < 0.05;

    // (b) monotone interpolation across alpha on three seeds
    let alphas = [0.0, 0.25, 0.5, 0.75];
    let seeds = [1u64, 2, 3];
    let grid: Vec<(u64, f64)> = seeds
        .iter()
        .flat_map(|&s| alphas.iter().map(move |&a| (s, a)))
        .collect();
    let cdf_vals: Vec<((u64, f64), f64)> = grid
        .par_iter()
        .map(|&(seed, alpha)| {
            let mut rng = seed_stream(0x0BEA, seed);
            let s = scaled_esd(PlVariant::Alpha(alpha), XiSpec::StdNormal, n, &mut rng).unwrap();
            ((seed, alpha), s.radial_cdf_at(0.5))
        })
        .collect();
    let mut b_ok = true;
    for &seed in &seeds {
        let mut prev = -1.0;
        for &alpha in &alphas {
            let v = cdf_vals
                .iter()
                .find(|((s, a), _)| *s == seed && *a == alpha)
                .unwrap()
                .1;
            if v < prev {
                b_ok = false;
            }
            prev = v;
        }
    }

    // (c) rank and zero-eigenvalue multiplicity at alpha = 3/4
    let mut rng = seed_stream(0x0CFB, 0);
    let probe = rank_nullity_probe(0.75, XiSpec::StdNormal, n, &mut rng).unwrap();
    let rank_target = (2.0f64 * 0.25).sqrt() * n as f64;
    let zero_target = 0.5 * n as f64;
    let c_ok = (probe.numerical_rank as f64 - rank_target).abs() <= 0.05 * rank_target
        && (probe.zero_eig_multiplicity as f64 - zero_target).abs() <= 0.05 * zero_target;

    finish(
        10,
        "ESD probes (n=512)",
        start,
        a_ok && b_ok && c_ok,
        format!(
            "radial sup-dev {:.4} (< 0.05); monotone in alpha: {}; rank {} (target {:.0} ± 5%), zero mult {} (target {:.0} ± 5%)",
            sup_dev, b_ok, probe.numerical_rank, rank_target, probe.zero_eig_multiplicity, zero_target
        ),
    )
}

/// 11. Reproducibility: the same experiment on 1 and 4 worker threads gives
/// byte-identical CSV output.
pub fn criterion_11_reproducibility() -> CriterionResult {
    let start = std::time::Instant::now();
    let cfg = ExperimentConfig {
        model: Model::Naive,
        ensemble: EnsembleSpec::HaarButterflySs,
        n: 16,
        trials: 500,
        master_seed: 0x0D0C,
        output_path: None,
    };
    let run_with = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).map(|o| records_to_csv(&o.records)))
    };
    let one = run_with(1).unwrap();
    let four = run_with(4).unwrap();
    let identical = one == four;
    finish(
        11,
        "reproducibility across worker counts",
        start,
        identical,
        format!(
            "1-thread and 4-thread CSV outputs {} ({} bytes)",
            if identical { "identical" } else { "DIFFER" },
            one.len()
        ),
    )
}

/// Run every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1_stirling_exactness(),
        criterion_2_ginibre_law(),
        criterion_3_butterfly_law(),
        criterion_4_haar_orthogonal_law(),
        criterion_5_deterministic_transforms(),
        criterion_6_small_matrix_probabilities(),
        criterion_7_butterfly_closed_forms(),
        criterion_8_worstcase_model(),
        criterion_9_maxmove_model(),
        criterion_10_esd_probes(),
        criterion_11_reproducibility(),
    ]
}
