use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scalar field tag carried by every matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Dense row-major matrix over `f64` or `Complex64`.
///
/// Values are immutable once constructed as far as the library API is
/// concerned; all factorizations copy their input.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: MatrixData,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        let data = match field {
            Field::Real => MatrixData::Real(vec![0.0; rows * cols]),
            Field::Complex => MatrixData::Complex(vec![Complex64::new(0.0, 0.0); rows * cols]),
        };
        DenseMatrix { rows, cols, data }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set_complex(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry grid size mismatch");
        DenseMatrix {
            rows,
            cols,
            data: MatrixData::Real(entries),
        }
    }

    pub fn from_complex(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry grid size mismatch");
        DenseMatrix {
            rows,
            cols,
            data: MatrixData::Complex(entries),
        }
    }

    /// Build from a row-major closure returning real entries.
    pub fn from_fn_real(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut v = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                v.push(f(i, j));
            }
        }
        Self::from_real(rows, cols, v)
    }

    pub fn from_fn_complex(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut v = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                v.push(f(i, j));
            }
        }
        Self::from_complex(rows, cols, v)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut v = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            v.extend_from_slice(row);
        }
        Self::from_real(r, c, v)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        match self.data {
            MatrixData::Real(_) => Field::Real,
            MatrixData::Complex(_) => Field::Complex,
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &MatrixData {
        &self.data
    }

    /// Entry as a complex number regardless of field.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let idx = i * self.cols + j;
        match &self.data {
            MatrixData::Real(v) => Complex64::new(v[idx], 0.0),
            MatrixData::Complex(v) => v[idx],
        }
    }

    /// Real-part accessor; panics on complex matrices with nonzero imaginary part.
    pub fn get_real(&self, i: usize, j: usize) -> f64 {
        match &self.data {
            MatrixData::Real(v) => v[i * self.cols + j],
            MatrixData::Complex(v) => {
                let z = v[i * self.cols + j];
                debug_assert_eq!(z.im, 0.0);
                z.re
            }
        }
    }

    pub fn set_complex(&mut self, i: usize, j: usize, z: Complex64) {
        let idx = i * self.cols + j;
        match &mut self.data {
            MatrixData::Real(v) => {
                assert_eq!(z.im, 0.0, "cannot store complex value in real matrix");
                v[idx] = z.re;
            }
            MatrixData::Complex(v) => v[idx] = z,
        }
    }

    pub fn set_real(&mut self, i: usize, j: usize, x: f64) {
        self.set_complex(i, j, Complex64::new(x, 0.0));
    }

    pub fn real_entries(&self) -> Option<&[f64]> {
        match &self.data {
            MatrixData::Real(v) => Some(v),
            MatrixData::Complex(_) => None,
        }
    }

    pub fn complex_entries(&self) -> Option<&[Complex64]> {
        match &self.data {
            MatrixData::Complex(v) => Some(v),
            MatrixData::Real(_) => None,
        }
    }

    /// Copy with entries promoted to complex storage.
    pub fn to_complex(&self) -> DenseMatrix {
        match &self.data {
            MatrixData::Real(v) => DenseMatrix::from_complex(
                self.rows,
                self.cols,
                v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            ),
            MatrixData::Complex(_) => self.clone(),
        }
    }

    pub fn all_finite(&self) -> bool {
        match &self.data {
            MatrixData::Real(v) => v.iter().all(|x| x.is_finite()),
            MatrixData::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }

    /// Element-wise max norm, max |a_ij|.
    pub fn max_norm(&self) -> f64 {
        match &self.data {
            MatrixData::Real(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            MatrixData::Complex(v) => v.iter().fold(0.0, |m, z| m.max(z.norm())),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.data {
            MatrixData::Real(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            MatrixData::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        match &self.data {
            MatrixData::Real(v) => {
                DenseMatrix::from_real(self.rows, self.cols, v.iter().map(|x| c * x).collect())
            }
            MatrixData::Complex(v) => {
                DenseMatrix::from_complex(self.rows, self.cols, v.iter().map(|z| c * z).collect())
            }
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        match (&self.data, &other.data) {
            (MatrixData::Real(a), MatrixData::Real(b)) => DenseMatrix::from_real(
                self.rows,
                self.cols,
                a.iter().zip(b).map(|(x, y)| x + y).collect(),
            ),
            _ => {
                let a = self.to_complex();
                let b = other.to_complex();
                let av = a.complex_entries().unwrap();
                let bv = b.complex_entries().unwrap();
                DenseMatrix::from_complex(
                    self.rows,
                    self.cols,
                    av.iter().zip(bv).map(|(x, y)| x + y).collect(),
                )
            }
        }
    }

    /// Conjugate transpose (plain transpose for real matrices).
    pub fn conj_transpose(&self) -> DenseMatrix {
        match &self.data {
            MatrixData::Real(v) => {
                let mut out = vec![0.0; self.rows * self.cols];
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        out[j * self.rows + i] = v[i * self.cols + j];
                    }
                }
                DenseMatrix::from_real(self.cols, self.rows, out)
            }
            MatrixData::Complex(v) => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.rows * self.cols];
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        out[j * self.rows + i] = v[i * self.cols + j].conj();
                    }
                }
                DenseMatrix::from_complex(self.cols, self.rows, out)
            }
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        match (&self.data, &other.data) {
            (MatrixData::Real(a), MatrixData::Real(b)) => {
                let c = matmul_kernel(a, b, self.rows, self.cols, other.cols);
                DenseMatrix::from_real(self.rows, other.cols, c)
            }
            _ => {
                let a = self.to_complex();
                let b = other.to_complex();
                let c = matmul_kernel(
                    a.complex_entries().unwrap(),
                    b.complex_entries().unwrap(),
                    self.rows,
                    self.cols,
                    other.cols,
                );
                DenseMatrix::from_complex(self.rows, other.cols, c)
            }
        }
    }

    /// Kronecker product, self ⊗ other.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let use_complex = self.field() == Field::Complex || other.field() == Field::Complex;
        if use_complex {
            DenseMatrix::from_fn_complex(r1 * r2, c1 * c2, |i, j| {
                self.get(i / r2, j / c2) * other.get(i % r2, j % c2)
            })
        } else {
            DenseMatrix::from_fn_real(r1 * r2, c1 * c2, |i, j| {
                self.get_real(i / r2, j / c2) * other.get_real(i % r2, j % c2)
            })
        }
    }

    /// CSV export: header line `# rows,cols,field`, then row-major entries.
    /// Values use the shortest round-trip float formatting, so import is
    /// bit-exact.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# {},{},{}\n", self.rows, self.cols, self.field());
        for i in 0..self.rows {
            let mut cells = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                match &self.data {
                    MatrixData::Real(v) => cells.push(format!("{}", v[i * self.cols + j])),
                    MatrixData::Complex(v) => cells.push(format!("{}", v[i * self.cols + j])),
                }
            }
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<DenseMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix CSV".into()))?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing `# rows,cols,field` header".into()))?
            .trim();
        let parts: Vec<&str> = header.split(',').map(|p| p.trim()).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let rows: usize = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad row count `{}`", parts[0])))?;
        let cols: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad col count `{}`", parts[1])))?;
        let field = match parts[2] {
            "real" => Field::Real,
            "complex" => Field::Complex,
            other => return Err(Error::Parse(format!("unknown field tag `{other}`"))),
        };
        let mut real = Vec::new();
        let mut complex = Vec::new();
        for line in lines {
            // further comment lines (seed/version annotations) are skipped
            if line.trim_start().starts_with('#') {
                continue;
            }
            for cell in line.trim().split(',') {
                let cell = cell.trim();
                match field {
                    Field::Real => real.push(
                        f64::from_str(cell)
                            .map_err(|_| Error::Parse(format!("bad real entry `{cell}`")))?,
                    ),
                    Field::Complex => complex.push(
                        Complex64::from_str(cell)
                            .map_err(|_| Error::Parse(format!("bad complex entry `{cell}`")))?,
                    ),
                }
            }
        }
        let expect = rows * cols;
        match field {
            Field::Real => {
                if real.len() != expect {
                    return Err(Error::Parse(format!(
                        "expected {expect} entries, found {}",
                        real.len()
                    )));
                }
                Ok(DenseMatrix::from_real(rows, cols, real))
            }
            Field::Complex => {
                if complex.len() != expect {
                    return Err(Error::Parse(format!(
                        "expected {expect} entries, found {}",
                        complex.len()
                    )));
                }
                Ok(DenseMatrix::from_complex(rows, cols, complex))
            }
        }
    }
}

/// Row-major `C += A*B` kernel with the k-loop in the middle so the innermost
/// loop streams both C and B rows.
pub(crate) fn matmul_kernel<T: Scalar>(a: &[T], b: &[T], m: usize, k: usize, n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); m * n];
    for i in 0..m {
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == T::zero() {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            let crow = &mut c[i * n..(i + 1) * n];
            for j in 0..n {
                crow[j] += aip * brow[j];
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_real() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -2.5], vec![0.125, 3.0e-17]]);
        let b = DenseMatrix::from_csv(&a.to_csv()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip_complex() {
        let a = DenseMatrix::from_fn_complex(3, 2, |i, j| {
            Complex64::new(i as f64 + 0.25, -(j as f64) - 0.5)
        });
        let b = DenseMatrix::from_csv(&a.to_csv()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.field(), Field::Complex);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(DenseMatrix::from_csv("").is_err());
        assert!(DenseMatrix::from_csv("1,2\n3,4\n").is_err());
        assert!(DenseMatrix::from_csv("# 2,2,real\n1,2\n3\n").is_err());
    }

    #[test]
    fn matmul_identity() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let i = DenseMatrix::identity(2, Field::Real);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(i.matmul(&a), a);
    }

    #[test]
    fn kron_small() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let k = a.kron(&b);
        assert_eq!(k.n_rows(), 4);
        assert_eq!(k.get_real(0, 1), 1.0);
        assert_eq!(k.get_real(0, 3), 2.0);
        assert_eq!(k.get_real(3, 0), 3.0);
    }

    #[test]
    fn conj_transpose_complex() {
        let a = DenseMatrix::from_fn_complex(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        let h = a.conj_transpose();
        assert_eq!(h.get(1, 0), Complex64::new(0.0, -1.0));
    }
}
