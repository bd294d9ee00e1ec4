//! Exact Stirling numbers of the first kind, the cycle-count distribution of
//! a uniform permutation, and the derived pivot-count laws.
//!
//! Table values are exact big integers; only probability conversions are
//! floating point, and those go through an extended-precision big-integer
//! quotient rather than floating factorials.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Triangle of |s(n,k)| for 0 <= k <= n <= n_max.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    n_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// |s(n,k)|; zero outside 1 <= k <= n except |s(0,0)| = 1.
    pub fn get(&self, n: usize, k: usize) -> &BigUint {
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if n <= self.n_max && k < self.rows[n].len() {
            &self.rows[n][k]
        } else {
            ZERO.get_or_init(BigUint::zero)
        }
    }

    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n]
    }

    pub fn factorial(&self, n: usize) -> BigUint {
        self.rows[n].iter().sum()
    }
}

/// Build the triangle with |s(n,k)| = |s(n-1,k-1)| + (n-1)|s(n-1,k)|.
pub fn stirling_table(n_max: usize) -> StirlingTable {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![BigUint::one()]);
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let mut row = vec![BigUint::zero(); n + 1];
        let weight = BigUint::from(n - 1);
        for k in 1..=n {
            let mut v = if k <= n - 1 {
                &weight * &prev[k]
            } else {
                BigUint::zero()
            };
            if k >= 1 && k - 1 <= n - 1 {
                v += &prev[k - 1];
            }
            row[k] = v;
        }
        rows.push(row);
    }
    StirlingTable { n_max, rows }
}

/// Correctly-rounded-to-a-few-ulps `num/den` for positive big integers whose
/// ratio fits in f64. Shifts the numerator so the quotient carries at least
/// 64 significant bits, then scales back by an exact power of two.
pub(crate) fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = (den.bits() as i64 - num.bits() as i64) + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_f64().expect("quotient fits f64");
    q * (2.0f64).powi(-shift as i32)
}

/// The cycle-count distribution of a uniform permutation of n objects:
/// P(k) = |s(n,k)|/n! on k = 1..n, mean H_n, variance H_n - H_n^(2).
#[derive(Debug, Clone, Serialize)]
pub struct Stirling1Distribution {
    pub n: usize,
    /// pmf[k-1] = P(k cycles).
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

pub fn stirling1_distribution(n: usize) -> Stirling1Distribution {
    assert!(n >= 1);
    let table = stirling_table(n);
    let fact = table.factorial(n);
    let pmf: Vec<f64> = (1..=n)
        .map(|k| big_ratio_to_f64(table.get(n, k), &fact))
        .collect();
    Stirling1Distribution {
        n,
        pmf,
        mean: harmonic(n, 1),
        variance: harmonic(n, 1) - harmonic(n, 2),
    }
}

/// Generalized harmonic number H_n^(m), summed smallest term first.
pub fn harmonic(n: usize, m: u32) -> f64 {
    assert!(n >= 1 && m >= 1);
    let mut total = 0.0;
    for j in (1..=n).rev() {
        total += (j as f64).powi(-(m as i32));
    }
    total
}

/// A pivot-movement count law on {0..n-1}.
#[derive(Debug, Clone, Serialize)]
pub struct PivotCountLaw {
    pub n: usize,
    /// pmf[m] = P(exactly m pivot movements).
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl PivotCountLaw {
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.pmf
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(m, _)| m)
    }
}

/// Pivot-movement law for a uniform GEPP permutation factor:
/// P(m) = |s(n, n-m)|/n!, mean n - H_n, std sqrt(H_n - H_n^(2)).
pub fn pivot_law(n: usize) -> PivotCountLaw {
    assert!(n >= 1);
    let d = stirling1_distribution(n);
    let pmf: Vec<f64> = (0..n).map(|m| d.pmf[n - m - 1]).collect();
    PivotCountLaw {
        n,
        pmf,
        mean: n as f64 - d.mean,
        std: d.variance.sqrt(),
    }
}

/// Pivot-movement law for a Haar-butterfly matrix of size N = 2^k:
/// mass 1/N at 0 and 1 - 1/N at N/2.
pub fn butterfly_pivot_law(n_dim: usize) -> Result<PivotCountLaw> {
    if n_dim < 2 || !n_dim.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "butterfly law needs a power-of-two size, got {n_dim}"
        )));
    }
    let nf = n_dim as f64;
    let p = 1.0 - 1.0 / nf;
    let mut pmf = vec![0.0; n_dim];
    pmf[0] = 1.0 / nf;
    pmf[n_dim / 2] = p;
    Ok(PivotCountLaw {
        n: n_dim,
        pmf,
        mean: nf / 2.0 * p,
        std: nf / 2.0 * (p / nf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{cycle_decomposition, Permutation};
    use crate::scalar::MACHINE_EPS;
    use itertools::Itertools;
    use num_rational::BigRational;
    use num_traits::FromPrimitive;

    #[test]
    fn row_four() {
        let t = stirling_table(4);
        let row: Vec<u64> = (1..=4).map(|k| t.get(4, k).to_u64().unwrap()).collect();
        assert_eq!(row, vec![6, 11, 6, 1]);
    }

    #[test]
    fn edge_columns() {
        let t = stirling_table(10);
        let mut fact = 1u64;
        for n in 1..=10usize {
            assert_eq!(t.get(n, n).to_u64().unwrap(), 1);
            assert_eq!(t.get(n, 1).to_u64().unwrap(), fact);
            fact *= n as u64;
        }
    }

    #[test]
    fn row_sums_are_factorials() {
        let t = stirling_table(25);
        let mut fact = BigUint::one();
        for n in 1..=25usize {
            fact *= BigUint::from(n);
            let sum: BigUint = t.row(n).iter().sum();
            assert_eq!(sum, fact, "row {n}");
        }
        assert_eq!(t.factorial(6).to_u64().unwrap(), 720);
    }

    #[test]
    fn matches_cycle_count_enumeration() {
        let t = stirling_table(7);
        for n in 1..=7usize {
            let mut counts = vec![0u64; n + 1];
            for image in (1..=n).permutations(n) {
                let p = Permutation::from_image(image).unwrap();
                counts[cycle_decomposition(&p).cycle_count] += 1;
            }
            for k in 1..=n {
                assert_eq!(BigUint::from(counts[k]), *t.get(n, k), "n={n} k={k}");
            }
        }
    }

    /// e_j(1, 2, ..., n-1) by direct polynomial expansion.
    fn elementary_symmetric(values: &[u64]) -> Vec<BigUint> {
        let mut coeffs = vec![BigUint::one()];
        for &a in values {
            let mut next = vec![BigUint::zero(); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j] += c;
                next[j + 1] += c * BigUint::from(a);
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn symmetric_polynomial_identity() {
        let t = stirling_table(12);
        for n in 1..=12usize {
            let values: Vec<u64> = (1..n as u64).collect();
            let e = elementary_symmetric(&values);
            for j in 0..n {
                assert_eq!(*t.get(n, n - j), e[j], "n={n} j={j}");
            }
        }
    }

    #[test]
    fn distribution_small() {
        let d2 = stirling1_distribution(2);
        assert_eq!(d2.pmf, vec![0.5, 0.5]);
        let d1 = stirling1_distribution(1);
        assert_eq!(d1.pmf, vec![1.0]);
        assert_eq!(d1.mean, 1.0);
        assert_eq!(d1.variance, 0.0);
    }

    #[test]
    fn distribution_n16_reference_mean() {
        let d = stirling1_distribution(16);
        assert!((16.0 - d.mean - 12.619271006771006).abs() < 1e-12);
    }

    #[test]
    fn pmf_normalization_and_moments() {
        for n in [1usize, 2, 5, 16, 64, 150, 300] {
            let d = stirling1_distribution(n);
            let sum: f64 = d.pmf.iter().sum();
            assert!(
                (sum - 1.0).abs() < 8.0 * n as f64 * MACHINE_EPS,
                "n={n} sum={sum}"
            );
            let mean: f64 = d.pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum();
            let var: f64 = d
                .pmf
                .iter()
                .enumerate()
                .map(|(i, p)| ((i + 1) as f64 - mean).powi(2) * p)
                .sum();
            let tol = 16.0 * n as f64 * MACHINE_EPS;
            assert!((mean - d.mean).abs() <= tol * d.mean.max(1.0), "n={n}");
            assert!((var - d.variance).abs() <= tol * d.variance.max(1.0), "n={n}");
        }
    }

    #[test]
    fn table_300_is_fast_and_exact() {
        let start = std::time::Instant::now();
        let t = stirling_table(300);
        assert!(start.elapsed().as_secs_f64() < 1.0);
        let sum: BigUint = t.row(300).iter().sum();
        let mut fact = BigUint::one();
        for n in 1..=300u32 {
            fact *= BigUint::from(n);
        }
        assert_eq!(sum, fact);
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1, 1), 1.0);
        assert!((harmonic(16, 1) - 3.3807289933).abs() < 1e-10);
        // exact-rational cross-check
        let exact: BigRational = (1..=16)
            .map(|j| BigRational::new(1.into(), j.into()))
            .sum();
        let exact = exact.to_f64().unwrap();
        assert!((harmonic(16, 1) - exact).abs() < 8.0 * MACHINE_EPS);

        let n = 1_000_000usize;
        let gamma = 0.5772156649;
        assert!((harmonic(n, 1) - (n as f64).ln() - gamma).abs() < 1e-6);
    }

    #[test]
    fn pivot_law_small_and_reference_values() {
        let l2 = pivot_law(2);
        assert_eq!(l2.pmf, vec![0.5, 0.5]);
        assert_eq!(l2.mean, 0.5);

        let l16 = pivot_law(16);
        assert!((l16.mean - 12.619271006771006).abs() < 1e-12);
        assert!((l16.std - 1.340291930806123).abs() < 1e-12);

        let l256 = pivot_law(256);
        assert!((l256.mean - 249.8756550371827).abs() < 1e-10);
        assert!((l256.std - 2.117382706670809).abs() < 1e-10);
    }

    #[test]
    fn pivot_law_matches_exact_rationals() {
        // pmf entries are |s(n,n-m)|/n! through the big-ratio path, at a size
        // where n! overflows f64; verify each against the exact rational by
        // integer cross-multiplication: |exact - float| <= 2^-50 * exact
        let n = 200usize;
        let t = stirling_table(n);
        let fact = t.factorial(n);
        let law = pivot_law(n);
        let mut checked = 0;
        for m in (0..n).step_by(17) {
            let ours = law.pmf[m];
            if ours == 0.0 {
                // tail entries like 1/200! underflow f64; nothing to compare
                continue;
            }
            checked += 1;
            let approx = BigRational::from_f64(ours).unwrap();
            let (n2, d2) = (approx.numer().clone(), approx.denom().clone());
            let n1: num_bigint::BigInt = t.get(n, n - m).clone().into();
            let d1: num_bigint::BigInt = fact.clone().into();
            let lhs = (&n1 * &d2 - &n2 * &d1).magnitude().clone();
            let rhs = (n1 * d2).magnitude().clone();
            assert!(lhs << 50 <= rhs, "m = {m}: relative error above 2^-50");
        }
        assert!(checked >= 5);
    }

    #[test]
    fn butterfly_law_values() {
        let l16 = butterfly_pivot_law(16).unwrap();
        assert_eq!(l16.mean, 7.5);
        assert!((l16.std - 1.93649167).abs() < 1e-8);
        assert_eq!(l16.pmf[0], 1.0 / 16.0);
        assert_eq!(l16.pmf[8], 15.0 / 16.0);

        let l2 = butterfly_pivot_law(2).unwrap();
        assert_eq!(l2.pmf, pivot_law(2).pmf);

        let l256 = butterfly_pivot_law(256).unwrap();
        assert_eq!(l256.mean, 127.5);
        assert!((l256.std - 7.98435971).abs() < 1e-8);

        assert!(butterfly_pivot_law(12).is_err());
    }
}
