//! Haar sampling on O(n) and U(n) by Householder QR of a Ginibre draw with
//! the sign convention that makes the implied R diagonal positive.

use num_complex::Complex64;

use crate::matrix::DenseMatrix;
use crate::rng::{standard_complex_normal, standard_normal, RandomStream};
use crate::scalar::Scalar;

fn phase<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        x / T::from_f64(x.modulus())
    }
}

/// Apply H = I - tau v v^H to rows `k..k+v.len()` of the row-major buffer,
/// columns `j0..n`, streaming each row once.
fn apply_reflector_rows<T: Scalar>(
    a: &mut [T],
    n: usize,
    k: usize,
    j0: usize,
    v: &[T],
    tau: f64,
    w: &mut [T],
) {
    for x in w[j0..n].iter_mut() {
        *x = T::zero();
    }
    for (off, vi) in v.iter().enumerate() {
        let vc = vi.conj();
        let row = &a[(k + off) * n..(k + off) * n + n];
        for (x, &r) in w[j0..n].iter_mut().zip(&row[j0..n]) {
            *x += vc * r;
        }
    }
    for (off, vi) in v.iter().enumerate() {
        let t = *vi * T::from_f64(tau);
        let row = &mut a[(k + off) * n..(k + off) * n + n];
        for (&x, r) in w[j0..n].iter().zip(row[j0..n].iter_mut()) {
            *r -= t * x;
        }
    }
}

/// Householder QR on a row-major n x n buffer; returns the accumulated Q
/// with columns already corrected so that the implied R diagonal is real
/// positive.
fn haar_from_gaussian<T: Scalar>(mut a: Vec<T>, n: usize) -> Vec<T> {
    let mut reflectors: Vec<(usize, Vec<T>, f64)> = Vec::with_capacity(n);
    let mut diag_phase: Vec<T> = Vec::with_capacity(n);
    let mut w = vec![T::zero(); n];
    for k in 0..n {
        let mut norm_sq = 0.0;
        for i in k..n {
            norm_sq += a[i * n + k].modulus_sqr();
        }
        let norm = norm_sq.sqrt();
        let x0 = a[k * n + k];
        let alpha = -phase(x0) * T::from_f64(norm);
        if norm == 0.0 || k == n - 1 {
            // last column reduces to a single diagonal entry
            diag_phase.push(phase(if k == n - 1 { x0 } else { alpha }));
            if k == n - 1 {
                break;
            }
            continue;
        }
        let mut v: Vec<T> = (k..n).map(|i| a[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.modulus_sqr()).sum();
        let tau = 2.0 / vnorm_sq;
        apply_reflector_rows(&mut a, n, k, k, &v, tau, &mut w);
        diag_phase.push(phase(a[k * n + k]));
        reflectors.push((k, v, tau));
    }
    // Q = H_0 H_1 ... H_{n-2} I, built by applying reflectors back to front
    let mut q = vec![T::zero(); n * n];
    for i in 0..n {
        q[i * n + i] = T::one();
    }
    for (k, v, tau) in reflectors.iter().rev() {
        apply_reflector_rows(&mut q, n, *k, *k, v, *tau, &mut w);
    }
    // column phase fix: Q <- Q * diag(phase(R_kk))
    for (j, ph) in diag_phase.iter().enumerate() {
        for i in 0..n {
            q[i * n + j] *= *ph;
        }
    }
    q
}

/// One draw from Haar(O(n)).
pub fn haar_orthogonal(n: usize, rng: &mut RandomStream) -> DenseMatrix {
    assert!(n >= 1);
    let g: Vec<f64> = (0..n * n).map(|_| standard_normal(rng)).collect();
    DenseMatrix::from_real(n, n, haar_from_gaussian(g, n))
}

/// One draw from Haar(U(n)).
pub fn haar_unitary(n: usize, rng: &mut RandomStream) -> DenseMatrix {
    assert!(n >= 1);
    let g: Vec<Complex64> = (0..n * n).map(|_| standard_complex_normal(rng)).collect();
    DenseMatrix::from_complex(n, n, haar_from_gaussian(g, n))
}
