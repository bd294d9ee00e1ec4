//! Dense nonsymmetric eigenvalue solver: permutation-based eigenvalue
//! isolation, Osborne scaling, Householder Hessenberg reduction, and
//! explicit single-shift QR with Wilkinson shifts, all over Complex64.
//! Real input is promoted, so one path serves both fields.
//!
//! Every solve ends with a residual spot check on a handful of computed
//! eigenvalues via inverse iteration; a failed check is reported as
//! `NoConvergence`, never silently ignored.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::MACHINE_EPS;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const DESK_CAP: usize = 2048;
const MAX_SWEEPS_PER_EIG: usize = 60;

/// All n eigenvalues of a square matrix (with multiplicity), in deflation
/// order.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    if n == 0 || n > DESK_CAP {
        return Err(Error::InvalidInput(format!(
            "eigenvalue solver handles 1 <= n <= {DESK_CAP}, got {n}"
        )));
    }
    if !a.all_finite() {
        return Err(Error::InvalidInput(
            "matrix contains NaN or infinite entries".into(),
        ));
    }
    let original: Vec<Complex64> = (0..n * n)
        .map(|idx| a.get(idx / n, idx % n))
        .collect();
    let mut h = original.clone();

    let (lo, hi) = isolate(&mut h, n);
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    for i in 0..lo {
        eigs.push(h[i * n + i]);
    }
    for i in hi + 1..n {
        eigs.push(h[i * n + i]);
    }
    balance_scale(&mut h, n, lo, hi);
    hessenberg(&mut h, n, lo, hi);
    comqr(&mut h, n, lo, hi, &mut eigs)?;
    debug_assert_eq!(eigs.len(), n);

    residual_spot_check(&original, n, &eigs)?;
    Ok(eigs)
}

/// Permute rows/columns so that rows (columns) whose off-diagonal entries in
/// the active window are all zero move to the bottom (top), exposing their
/// diagonal entries as exact eigenvalues. Returns the remaining active
/// window [lo, hi] inclusive.
fn isolate(a: &mut [Complex64], n: usize) -> (usize, usize) {
    let mut lo = 0usize;
    let mut hi = n - 1;
    'outer: while lo < hi {
        for i in (lo..=hi).rev() {
            let row_zero = (lo..=hi).all(|j| j == i || a[i * n + j] == ZERO);
            if row_zero {
                exchange(a, n, lo, hi, i, hi);
                hi -= 1;
                continue 'outer;
            }
        }
        for j in lo..=hi {
            let col_zero = (lo..=hi).all(|i| i == j || a[i * n + j] == ZERO);
            if col_zero {
                exchange(a, n, lo, hi, j, lo);
                lo += 1;
                continue 'outer;
            }
        }
        break;
    }
    (lo, hi)
}

/// Symmetric permutation of indices j and m, touching only the rows/columns
/// a later stage can still read.
fn exchange(a: &mut [Complex64], n: usize, lo: usize, hi: usize, j: usize, m: usize) {
    if j == m {
        return;
    }
    for i in 0..=hi {
        a.swap(i * n + j, i * n + m);
    }
    for k in lo..n {
        a.swap(j * n + k, m * n + k);
    }
}

/// Osborne balancing on the active window: powers-of-two row/column scalings
/// equalizing 1-norms. Exact in floating point, so it changes no eigenvalue.
fn balance_scale(a: &mut [Complex64], n: usize, lo: usize, hi: usize) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = 4.0;
    loop {
        let mut converged = true;
        for i in lo..=hi {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in lo..=hi {
                if j != i {
                    col += a[j * n + i].norm();
                    row += a[i * n + j].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            let mut g = row / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = row * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + row) / f < 0.95 * total {
                converged = false;
                let inv = 1.0 / f;
                for j in lo..n {
                    a[i * n + j] *= inv;
                }
                for j in 0..=hi {
                    a[j * n + i] *= f;
                }
            }
        }
        if converged {
            return;
        }
    }
}

fn phase(z: Complex64) -> Complex64 {
    let m = z.norm();
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / m
    }
}

/// Householder reduction of the active window to upper Hessenberg form.
fn hessenberg(a: &mut [Complex64], n: usize, lo: usize, hi: usize) {
    if hi < lo + 2 {
        return;
    }
    let mut v: Vec<Complex64> = Vec::new();
    for k in lo..hi - 1 {
        let mut norm_sq = 0.0;
        for i in k + 1..=hi {
            norm_sq += a[i * n + k].norm_sqr();
        }
        let below_sq: f64 = (k + 2..=hi).map(|i| a[i * n + k].norm_sqr()).sum();
        if below_sq == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = -phase(x0) * norm_sq.sqrt();
        v.clear();
        v.extend((k + 1..=hi).map(|i| a[i * n + k]));
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm_sq;
        // left: rows k+1..=hi over cols k..=hi
        for j in k..=hi {
            let mut w = ZERO;
            for (off, vi) in v.iter().enumerate() {
                w += vi.conj() * a[(k + 1 + off) * n + j];
            }
            w *= tau;
            for (off, vi) in v.iter().enumerate() {
                a[(k + 1 + off) * n + j] -= vi * w;
            }
        }
        // right: cols k+1..=hi over rows lo..=hi
        for i in lo..=hi {
            let mut w = ZERO;
            for (off, vj) in v.iter().enumerate() {
                w += a[i * n + k + 1 + off] * vj;
            }
            w *= tau;
            for (off, vj) in v.iter().enumerate() {
                a[i * n + k + 1 + off] -= w * vj.conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..=hi {
            a[i * n + k] = ZERO;
        }
    }
}

/// Unitary Givens pair with [[c, s], [-conj(s), c]] [x; y] = [r; 0], c real.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    let xm = x.norm();
    if xm == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    (xm / r, phase(x) * y.conj() / r)
}

/// Explicit single-shift QR with Wilkinson shifts on the Hessenberg window,
/// deflating eigenvalues from the bottom into `eigs`.
fn comqr(
    a: &mut [Complex64],
    n: usize,
    lo: usize,
    hi: usize,
    eigs: &mut Vec<Complex64>,
) -> Result<()> {
    let mut block_scale = 0.0;
    for i in lo..=hi {
        for j in lo..=hi {
            block_scale += a[i * n + j].norm();
        }
    }
    if block_scale == 0.0 {
        block_scale = 1.0;
    }
    let mut total_sweeps = 0usize;
    let mut en = hi;
    loop {
        let mut sweeps = 0usize;
        loop {
            // look for a negligible subdiagonal entry, bottom up
            let mut l = lo;
            let mut m = en;
            while m > lo {
                let s = a[(m - 1) * n + (m - 1)].norm() + a[m * n + m].norm();
                let s = if s == 0.0 { block_scale } else { s };
                if a[m * n + m - 1].norm() <= MACHINE_EPS * s {
                    a[m * n + m - 1] = ZERO;
                    l = m;
                    break;
                }
                m -= 1;
            }
            if l == en {
                eigs.push(a[en * n + en]);
                break;
            }
            if sweeps >= MAX_SWEEPS_PER_EIG {
                return Err(Error::NoConvergence {
                    iterations: total_sweeps,
                });
            }
            sweeps += 1;
            total_sweeps += 1;
            let shift = if sweeps % 10 == 0 {
                // exceptional shift to break limit cycles
                let extra = a[en * n + en - 1].norm()
                    + if en >= l + 2 {
                        a[(en - 1) * n + en - 2].norm()
                    } else {
                        0.0
                    };
                a[en * n + en] + Complex64::new(extra, 0.0)
            } else {
                wilkinson_shift(a, n, en)
            };
            qr_sweep(a, n, l, en, shift);
        }
        if en == lo {
            return Ok(());
        }
        en -= 1;
    }
}

fn wilkinson_shift(a: &[Complex64], n: usize, en: usize) -> Complex64 {
    let p = a[(en - 1) * n + (en - 1)];
    let q = a[(en - 1) * n + en];
    let r = a[en * n + (en - 1)];
    let s = a[en * n + en];
    let mid = (p + s) * 0.5;
    let disc = ((p - s) * 0.5 * ((p - s) * 0.5) + q * r).sqrt();
    let lam1 = mid + disc;
    let lam2 = mid - disc;
    if (lam1 - s).norm() <= (lam2 - s).norm() {
        lam1
    } else {
        lam2
    }
}

fn qr_sweep(a: &mut [Complex64], n: usize, l: usize, en: usize, shift: Complex64) {
    for i in l..=en {
        a[i * n + i] -= shift;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(en - l);
    for k in l..en {
        let (c, s) = givens(a[k * n + k], a[(k + 1) * n + k]);
        for j in k..=en {
            let t1 = a[k * n + j];
            let t2 = a[(k + 1) * n + j];
            a[k * n + j] = c * t1 + s * t2;
            a[(k + 1) * n + j] = -s.conj() * t1 + c * t2;
        }
        a[(k + 1) * n + k] = ZERO;
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = l + off;
        for i in l..=en.min(k + 2) {
            let t1 = a[i * n + k];
            let t2 = a[i * n + k + 1];
            a[i * n + k] = c * t1 + s.conj() * t2;
            a[i * n + k + 1] = -s * t1 + c * t2;
        }
    }
    for i in l..=en {
        a[i * n + i] += shift;
    }
}

/// In-place complex LU with partial pivoting; exactly zero pivots are
/// replaced by a tiny multiple of the matrix scale so inverse iteration can
/// proceed through singular shifts.
fn lu_factor(m: &mut [Complex64], n: usize, scale: f64) -> Vec<usize> {
    let tiny = Complex64::new(MACHINE_EPS * scale.max(f64::MIN_POSITIVE), 0.0);
    let mut piv = Vec::with_capacity(n);
    for k in 0..n {
        let mut best = k;
        let mut best_mod = m[k * n + k].norm_sqr();
        for i in k + 1..n {
            let v = m[i * n + k].norm_sqr();
            if v > best_mod {
                best_mod = v;
                best = i;
            }
        }
        piv.push(best);
        if best != k {
            for j in 0..n {
                m.swap(k * n + j, best * n + j);
            }
        }
        if m[k * n + k] == ZERO {
            m[k * n + k] = tiny;
        }
        let pivot = m[k * n + k];
        for i in k + 1..n {
            let mult = m[i * n + k] / pivot;
            m[i * n + k] = mult;
            if mult == ZERO {
                continue;
            }
            for j in k + 1..n {
                let upd = m[k * n + j] * mult;
                m[i * n + j] -= upd;
            }
        }
    }
    piv
}

fn lu_solve(m: &[Complex64], piv: &[usize], n: usize, b: &mut [Complex64]) {
    for k in 0..n {
        b.swap(k, piv[k]);
        for i in k + 1..n {
            let upd = m[i * n + k] * b[k];
            b[i] -= upd;
        }
    }
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= m[i * n + j] * b[j];
        }
        b[i] = acc / m[i * n + i];
    }
}

fn residual_spot_check(a: &[Complex64], n: usize, eigs: &[Complex64]) -> Result<()> {
    let anorm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if anorm == 0.0 {
        return Ok(());
    }
    let count = 5.min(n);
    let mut rng = crate::experiments::seed_stream(0x51DE_C4EC, n as u64);
    let bound = 1e3 * n as f64 * MACHINE_EPS * anorm;
    for c in 0..count {
        let lam = eigs[c * eigs.len() / count];
        let mut shifted = a.to_vec();
        for i in 0..n {
            shifted[i * n + i] -= lam;
        }
        let piv = lu_factor(&mut shifted, n, anorm);
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        for _ in 0..2 {
            lu_solve(&shifted, &piv, n, &mut v);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            for z in v.iter_mut() {
                *z /= norm;
            }
        }
        // residual ||(A - lam I) v||_2 for the unit vector v
        let mut res_sq = 0.0;
        for i in 0..n {
            let mut acc = ZERO;
            for j in 0..n {
                acc += a[i * n + j] * v[j];
            }
            acc -= lam * v[i];
            res_sq += acc.norm_sqr();
        }
        if res_sq.sqrt() > bound {
            return Err(Error::NoConvergence { iterations: 0 });
        }
    }
    Ok(())
}
