//! Shared statistical helpers for integration tests.

/// One-sample Kolmogorov-Smirnov statistic against Uniform[0, 1).
pub fn ks_uniform(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((x - lo).abs()).max((hi - x).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j) = (0usize, 0usize);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS critical value at significance 0.001 for a one-sample test.
pub fn ks_critical_one(n: usize) -> f64 {
    1.9495 / (n as f64).sqrt()
}

/// KS critical value at significance 0.001 for a two-sample test.
pub fn ks_critical_two(n: usize, m: usize) -> f64 {
    1.9495 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Pearson chi-square statistic for observed counts against expected
/// probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}
