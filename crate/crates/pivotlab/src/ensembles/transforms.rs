//! Deterministic orthonormal transform matrices (Walsh-Hadamard, DCT-II)
//! paired with uniform random sign diagonals.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalshOrdering {
    /// Rows sorted by sign-change count; the fast-transform default the
    /// pivot-count conformance values (6 at N=16, 120 at N=256) pin down.
    Sequency,
    /// Plain Sylvester recursion order.
    Natural,
}

/// Orthonormal Walsh-Hadamard matrix of order `N = 2^k`.
pub fn walsh_matrix(n_dim: usize, ordering: WalshOrdering) -> Result<DenseMatrix> {
    if n_dim < 1 || !n_dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "Walsh matrix needs a power-of-two order, got {n_dim}"
        )));
    }
    // Sylvester recursion on sign grids
    let mut h: Vec<Vec<i8>> = vec![vec![1]];
    while h.len() < n_dim {
        let m = h.len();
        let mut next = vec![vec![0i8; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    let mut order: Vec<usize> = (0..n_dim).collect();
    if ordering == WalshOrdering::Sequency {
        let sequency = |row: &[i8]| row.windows(2).filter(|w| w[0] != w[1]).count();
        order.sort_by_key(|&i| sequency(&h[i]));
    }
    let scale = 1.0 / (n_dim as f64).sqrt();
    Ok(DenseMatrix::from_fn_real(n_dim, n_dim, |i, j| {
        h[order[i]][j] as f64 * scale
    }))
}

fn random_sign_columns(w: &DenseMatrix, rng: &mut RandomStream) -> DenseMatrix {
    let n = w.n_rows();
    let signs: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    DenseMatrix::from_fn_real(n, n, |i, j| w.get_real(i, j) * signs[j])
}

/// Sequency-ordered orthonormal Walsh matrix times a uniform ±1 diagonal.
/// The GEPP permutation factor is independent of the sign draw.
pub fn walsh_signed(n_dim: usize, rng: &mut RandomStream) -> Result<DenseMatrix> {
    walsh_signed_with(n_dim, WalshOrdering::Sequency, rng)
}

/// Sign-randomized Walsh matrix with an explicit row ordering.
pub fn walsh_signed_with(
    n_dim: usize,
    ordering: WalshOrdering,
    rng: &mut RandomStream,
) -> Result<DenseMatrix> {
    Ok(random_sign_columns(&walsh_matrix(n_dim, ordering)?, rng))
}

/// Orthonormal DCT-II matrix: row 0 scaled by 1/sqrt(2).
pub fn dct_matrix(n_dim: usize) -> DenseMatrix {
    assert!(n_dim >= 1);
    let nf = n_dim as f64;
    let base = (2.0 / nf).sqrt();
    DenseMatrix::from_fn_real(n_dim, n_dim, |k, j| {
        let w = if k == 0 {
            base * std::f64::consts::FRAC_1_SQRT_2
        } else {
            base
        };
        w * (std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2.0 * nf)).cos()
    })
}

/// Orthonormal DCT-II matrix times a uniform ±1 diagonal.
pub fn dct_signed(n_dim: usize, rng: &mut RandomStream) -> DenseMatrix {
    random_sign_columns(&dct_matrix(n_dim), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::seed_stream;
    use crate::linalg::gepp_factor;
    use crate::scalar::MACHINE_EPS;

    fn orthogonality_defect(q: &DenseMatrix) -> f64 {
        let n = q.n_rows();
        let qtq = q.conj_transpose().matmul(q);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((qtq.get_real(i, j) - want).abs());
            }
        }
        worst
    }

    #[test]
    fn walsh_orthonormal() {
        for n in [2usize, 16, 64] {
            let w = walsh_matrix(n, WalshOrdering::Sequency).unwrap();
            assert!(orthogonality_defect(&w) <= 64.0 * n as f64 * MACHINE_EPS);
        }
        assert!(walsh_matrix(10, WalshOrdering::Sequency).is_err());
    }

    #[test]
    fn walsh_sequency_rows_increase() {
        let w = walsh_matrix(8, WalshOrdering::Sequency).unwrap();
        let changes: Vec<usize> = (0..8)
            .map(|i| {
                (1..8)
                    .filter(|&j| (w.get_real(i, j) > 0.0) != (w.get_real(i, j - 1) > 0.0))
                    .count()
            })
            .collect();
        assert_eq!(changes, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn walsh_pivot_counts_match_table() {
        let mut rng = seed_stream(77, 0);
        for (n, want) in [(16usize, 6usize), (256, 120)] {
            for _ in 0..5 {
                let m = walsh_signed(n, &mut rng).unwrap();
                assert_eq!(gepp_factor(&m).unwrap().pivot_count, want, "N={n}");
            }
        }
    }

    #[test]
    fn natural_ordering_needs_no_pivots() {
        let w = walsh_matrix(16, WalshOrdering::Natural).unwrap();
        assert_eq!(gepp_factor(&w).unwrap().pivot_count, 0);
    }

    #[test]
    fn dct_orthonormal_and_pivot_counts() {
        let mut rng = seed_stream(77, 1);
        for n in [2usize, 16, 64] {
            assert!(orthogonality_defect(&dct_matrix(n)) <= 64.0 * n as f64 * MACHINE_EPS);
        }
        for (n, want) in [(16usize, 13usize), (256, 249)] {
            for _ in 0..3 {
                let m = dct_signed(n, &mut rng);
                assert_eq!(gepp_factor(&m).unwrap().pivot_count, want, "N={n}");
            }
        }
    }
}
