//! GENP/GEPP factorization with pivot-sequence and growth-factor
//! instrumentation.
//!
//! Elimination is a plain dense column sweep: at step `k` the pivot search
//! scans column `k` of the working matrix for the largest modulus, the
//! earliest row wins ties, rows are swapped, and the trailing block is
//! updated. The growth factor is tracked as a running maximum over every
//! intermediate, so no intermediate matrix is stored.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, MatrixData};
use crate::perm::{from_pivot_sequence, Permutation, PivotSequence};
use crate::scalar::{Scalar, MACHINE_EPS};

/// GEPP output: `perm` is the permutation with `P A = lower * upper`,
/// `pivots` records the row chosen at each step, `pivot_count` counts the
/// steps with an actual row movement, and `growth` is the ratio of the
/// largest intermediate entry to the largest input entry.
#[derive(Debug, Clone)]
pub struct GeppResult {
    pub perm: Permutation,
    pub lower: DenseMatrix,
    pub upper: DenseMatrix,
    pub pivots: PivotSequence,
    pub pivot_count: usize,
    pub growth: f64,
    /// Set when some pivot column was entirely zero; elimination continued
    /// with zero multipliers.
    pub singular: bool,
}

struct EliminationCore<T> {
    packed: Vec<T>,
    pivots: Vec<usize>,
    growth: f64,
    singular: bool,
}

/// Column-sweep GEPP on a row-major buffer. Multipliers overwrite the strict
/// lower triangle, U the rest. Pivot indices are 1-based.
fn gepp_core<T: Scalar>(mut a: Vec<T>, n: usize) -> EliminationCore<T> {
    let mut pivots = Vec::with_capacity(n.saturating_sub(1));
    let input_max = a.iter().fold(0.0f64, |m, x| m.max(x.modulus()));
    let mut running_max = input_max;
    let mut singular = false;
    let mut pivot_row = vec![T::zero(); n];
    for k in 0..n.saturating_sub(1) {
        // smallest row index attaining the max modulus: strict > to displace
        let mut best = k;
        let mut best_mod = a[k * n + k].modulus_sqr();
        for i in k + 1..n {
            let m = a[i * n + k].modulus_sqr();
            if m > best_mod {
                best_mod = m;
                best = i;
            }
        }
        pivots.push(best + 1);
        if best != k {
            for j in 0..n {
                a.swap(k * n + j, best * n + j);
            }
        }
        let pivot = a[k * n + k];
        if pivot == T::zero() {
            // whole pivot column is zero: record, emit zero multipliers, go on
            singular = true;
            continue;
        }
        pivot_row[k + 1..n].copy_from_slice(&a[k * n + k + 1..k * n + n]);
        for i in k + 1..n {
            let m = a[i * n + k] / pivot;
            a[i * n + k] = m;
            if m == T::zero() {
                continue;
            }
            let row = &mut a[i * n + k + 1..i * n + n];
            for (x, &p) in row.iter_mut().zip(&pivot_row[k + 1..n]) {
                *x -= m * p;
                let modl = x.modulus();
                if modl > running_max {
                    running_max = modl;
                }
            }
        }
    }
    let growth = if input_max > 0.0 {
        running_max / input_max
    } else {
        1.0
    };
    EliminationCore {
        packed: a,
        pivots,
        growth,
        singular,
    }
}

fn split_lu<T: Scalar>(packed: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut lower = vec![T::zero(); n * n];
    let mut upper = vec![T::zero(); n * n];
    for i in 0..n {
        lower[i * n + i] = T::one();
        for j in 0..i {
            lower[i * n + j] = packed[i * n + j];
        }
        for j in i..n {
            upper[i * n + j] = packed[i * n + j];
        }
    }
    (lower, upper)
}

fn require_square(a: &DenseMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    Ok(a.n_rows())
}

/// Gaussian elimination with partial pivoting. Singular inputs are allowed:
/// a fully zero pivot column keeps `i_k = k` and flags the result.
pub fn gepp_factor(a: &DenseMatrix) -> Result<GeppResult> {
    let n = require_square(a)?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if !a.all_finite() {
        return Err(Error::InvalidInput(
            "matrix contains NaN or infinite entries".into(),
        ));
    }
    let (lower, upper, pivot_indices, growth, singular) = match a.data() {
        MatrixData::Real(v) => {
            let core = gepp_core(v.clone(), n);
            let (l, u) = split_lu(&core.packed, n);
            (
                DenseMatrix::from_real(n, n, l),
                DenseMatrix::from_real(n, n, u),
                core.pivots,
                core.growth,
                core.singular,
            )
        }
        MatrixData::Complex(v) => {
            let core = gepp_core(v.clone(), n);
            let (l, u) = split_lu(&core.packed, n);
            (
                DenseMatrix::from_complex(n, n, l),
                DenseMatrix::from_complex(n, n, u),
                core.pivots,
                core.growth,
                core.singular,
            )
        }
    };
    let pivots = PivotSequence::new(n, pivot_indices)?;
    let pivot_count = pivots.movement_count();
    let perm = from_pivot_sequence(&pivots);
    Ok(GeppResult {
        perm,
        lower,
        upper,
        pivots,
        pivot_count,
        growth,
        singular,
    })
}

fn genp_core<T: Scalar>(mut a: Vec<T>, n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut pivot_row = vec![T::zero(); n];
    for k in 0..n.saturating_sub(1) {
        let pivot = a[k * n + k];
        if pivot == T::zero() {
            return Err(Error::ZeroPivot(k + 1));
        }
        pivot_row[k + 1..n].copy_from_slice(&a[k * n + k + 1..k * n + n]);
        for i in k + 1..n {
            let m = a[i * n + k] / pivot;
            a[i * n + k] = m;
            if m == T::zero() {
                continue;
            }
            let row = &mut a[i * n + k + 1..i * n + n];
            for (x, &p) in row.iter_mut().zip(&pivot_row[k + 1..n]) {
                *x -= m * p;
            }
        }
    }
    Ok(split_lu(&a, n))
}

/// Gaussian elimination with no pivoting. Fails with `ZeroPivot(k)` when the
/// leading entry of the step-`k` subsystem is exactly zero.
pub fn genp_factor(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = require_square(a)?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if !a.all_finite() {
        return Err(Error::InvalidInput(
            "matrix contains NaN or infinite entries".into(),
        ));
    }
    match a.data() {
        MatrixData::Real(v) => {
            let (l, u) = genp_core(v.clone(), n)?;
            Ok((
                DenseMatrix::from_real(n, n, l),
                DenseMatrix::from_real(n, n, u),
            ))
        }
        MatrixData::Complex(v) => {
            let (l, u) = genp_core(v.clone(), n)?;
            Ok((
                DenseMatrix::from_complex(n, n, l),
                DenseMatrix::from_complex(n, n, u),
            ))
        }
    }
}

/// GEPP growth factor, max_k ||A^(k)||_max / ||A||_max.
pub fn growth_factor(a: &DenseMatrix) -> Result<f64> {
    require_square(a)?;
    if a.max_norm() == 0.0 {
        return Err(Error::InvalidInput("zero matrix has no growth factor".into()));
    }
    Ok(gepp_factor(a)?.growth)
}

/// The Wilkinson worst-case matrix: 1 on the diagonal and last column, -1
/// strictly below the diagonal.
pub fn wilkinson_matrix(n: usize) -> DenseMatrix {
    assert!(n >= 1);
    DenseMatrix::from_fn_real(n, n, |i, j| {
        if j == n - 1 {
            1.0
        } else if i == j {
            1.0
        } else if i > j {
            -1.0
        } else {
            0.0
        }
    })
}

fn entrywise_close(a: &DenseMatrix, b: &DenseMatrix, rel: f64) -> bool {
    if (a.n_rows(), a.n_cols()) != (b.n_rows(), b.n_cols()) {
        return false;
    }
    for i in 0..a.n_rows() {
        for j in 0..a.n_cols() {
            let x = a.get(i, j);
            let y = b.get(i, j);
            let scale = x.norm().max(y.norm());
            if (x - y).norm() > rel * scale {
                return false;
            }
        }
    }
    true
}

/// True when GEPP applied to `a` and to the row-permuted `q * a` produces
/// the same L and U factors within a 4-eps relative tolerance. Guaranteed
/// whenever all multipliers satisfy a strict |L_ij| < 1; ties can break it.
pub fn gepp_row_invariance_check(a: &DenseMatrix, q: &Permutation) -> Result<bool> {
    let ra = gepp_factor(a)?;
    let rb = gepp_factor(&q.apply_rows(a))?;
    let tol = 4.0 * MACHINE_EPS;
    Ok(entrywise_close(&ra.lower, &rb.lower, tol) && entrywise_close(&ra.upper, &rb.upper, tol))
}

/// Max-norm of `P*A - L*U`; reconstruction residual for tests and the
/// acceptance gate.
pub fn reconstruction_residual(a: &DenseMatrix, r: &GeppResult) -> f64 {
    let pa = r.perm.apply_rows(a);
    let lu = r.lower.matmul(&r.upper);
    let mut worst = 0.0f64;
    for i in 0..a.n_rows() {
        for j in 0..a.n_cols() {
            worst = worst.max((pa.get(i, j) - lu.get(i, j)).norm());
        }
    }
    worst
}
