//! Samplers for every random matrix law used by the experiment harness,
//! deterministic transform matrices, and butterfly closed forms.

pub mod butterfly;
pub mod haar;
pub mod pl;
pub mod transforms;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::wilkinson_matrix;
use crate::matrix::DenseMatrix;
use crate::rng::{standard_complex_normal, RandomStream};

pub use butterfly::{
    butterfly_gepp_prediction, sample_butterfly, simple_scalar_matrix, ButterflyAngles,
    ButterflyGeppPrediction, ButterflyStructure,
};
pub use haar::{haar_orthogonal, haar_unitary};
pub use pl::{density_ratio, k_alpha, sample_pl, PlVariant};
pub use transforms::{dct_matrix, dct_signed, walsh_matrix, walsh_signed, walsh_signed_with, WalshOrdering};

/// Entry law for the lower factor of PL ensembles. All laws are centered
/// with finite fourth moment; the bounded ones keep |xi| <= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiSpec {
    /// Uniform on [-1, 1], variance 1/3.
    UniformSym,
    /// Uniform on the complex unit disk, variance 1/2.
    UniformDisk,
    /// ±1 with equal probability.
    Rademacher,
    /// Standard real Gaussian.
    StdNormal,
}

impl XiSpec {
    pub fn variance(self) -> f64 {
        match self {
            XiSpec::UniformSym => 1.0 / 3.0,
            XiSpec::UniformDisk => 0.5,
            XiSpec::Rademacher => 1.0,
            XiSpec::StdNormal => 1.0,
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, XiSpec::UniformDisk)
    }

    pub fn sample_real(self, rng: &mut RandomStream) -> f64 {
        match self {
            XiSpec::UniformSym => rng.gen::<f64>() * 2.0 - 1.0,
            XiSpec::Rademacher => {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            XiSpec::StdNormal => rng.sample(StandardNormal),
            XiSpec::UniformDisk => panic!("UniformDisk is complex-valued"),
        }
    }

    pub fn sample_complex(self, rng: &mut RandomStream) -> Complex64 {
        match self {
            XiSpec::UniformDisk => loop {
                // rejection from the bounding square, ~4/pi tries per draw
                let x = rng.gen::<f64>() * 2.0 - 1.0;
                let y = rng.gen::<f64>() * 2.0 - 1.0;
                if x * x + y * y < 1.0 {
                    return Complex64::new(x, y);
                }
            },
            other => Complex64::new(other.sample_real(rng), 0.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            XiSpec::UniformSym => "uniform-sym",
            XiSpec::UniformDisk => "uniform-disk",
            XiSpec::Rademacher => "rademacher",
            XiSpec::StdNormal => "std-normal",
        }
    }
}

impl FromStr for XiSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-sym" => Ok(XiSpec::UniformSym),
            "uniform-disk" => Ok(XiSpec::UniformDisk),
            "rademacher" => Ok(XiSpec::Rademacher),
            "std-normal" => Ok(XiSpec::StdNormal),
            other => Err(Error::InvalidParameter(format!("unknown xi law `{other}`"))),
        }
    }
}

impl fmt::Display for XiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Tagged description of a random matrix law.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleSpec {
    Ginibre,
    GinibreComplex,
    Goe,
    Gue,
    Bernoulli(f64),
    HaarOrthogonal,
    HaarButterflySs,
    ButterflyScalar,
    ButterflySimpleDiag,
    ButterflyDiag,
    WalshSigned,
    DctSigned,
    PlMax(XiSpec),
    Pl(XiSpec),
    PlAlpha(XiSpec, f64),
    Wilkinson,
}

impl EnsembleSpec {
    /// The seven transform ensembles admitted by the 2-sided experiment
    /// models.
    pub fn is_transform(&self) -> bool {
        matches!(
            self,
            EnsembleSpec::HaarButterflySs
                | EnsembleSpec::ButterflyScalar
                | EnsembleSpec::ButterflySimpleDiag
                | EnsembleSpec::ButterflyDiag
                | EnsembleSpec::WalshSigned
                | EnsembleSpec::HaarOrthogonal
                | EnsembleSpec::DctSigned
        )
    }

    pub fn requires_power_of_two(&self) -> bool {
        matches!(
            self,
            EnsembleSpec::HaarButterflySs
                | EnsembleSpec::ButterflyScalar
                | EnsembleSpec::ButterflySimpleDiag
                | EnsembleSpec::ButterflyDiag
                | EnsembleSpec::WalshSigned
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            EnsembleSpec::Ginibre => "ginibre",
            EnsembleSpec::GinibreComplex => "ginibre-complex",
            EnsembleSpec::Goe => "goe",
            EnsembleSpec::Gue => "gue",
            EnsembleSpec::Bernoulli(_) => "bernoulli",
            EnsembleSpec::HaarOrthogonal => "haar-orthogonal",
            EnsembleSpec::HaarButterflySs => "haar-butterfly",
            EnsembleSpec::ButterflyScalar => "butterfly-scalar",
            EnsembleSpec::ButterflySimpleDiag => "butterfly-simple-diag",
            EnsembleSpec::ButterflyDiag => "butterfly-diag",
            EnsembleSpec::WalshSigned => "walsh",
            EnsembleSpec::DctSigned => "dct",
            EnsembleSpec::PlMax(_) => "pl-max",
            EnsembleSpec::Pl(_) => "pl",
            EnsembleSpec::PlAlpha(..) => "pl-alpha",
            EnsembleSpec::Wilkinson => "wilkinson",
        }
    }

    /// Parse a kebab-case kind name; `p`, `xi` and `alpha` supply the
    /// parameters for the kinds that need them.
    pub fn parse(
        kind: &str,
        p: Option<f64>,
        xi: Option<XiSpec>,
        alpha: Option<f64>,
    ) -> Result<EnsembleSpec> {
        let xi_or_default = xi.unwrap_or(XiSpec::UniformSym);
        Ok(match kind {
            "ginibre" => EnsembleSpec::Ginibre,
            "ginibre-complex" => EnsembleSpec::GinibreComplex,
            "goe" => EnsembleSpec::Goe,
            "gue" => EnsembleSpec::Gue,
            "bernoulli" => EnsembleSpec::Bernoulli(p.unwrap_or(0.5)),
            "haar-orthogonal" => EnsembleSpec::HaarOrthogonal,
            "haar-butterfly" => EnsembleSpec::HaarButterflySs,
            "butterfly-scalar" => EnsembleSpec::ButterflyScalar,
            "butterfly-simple-diag" => EnsembleSpec::ButterflySimpleDiag,
            "butterfly-diag" => EnsembleSpec::ButterflyDiag,
            "walsh" => EnsembleSpec::WalshSigned,
            "dct" => EnsembleSpec::DctSigned,
            "pl-max" => EnsembleSpec::PlMax(xi_or_default),
            "pl" => EnsembleSpec::Pl(xi_or_default),
            "pl-alpha" => {
                let alpha = alpha.ok_or_else(|| {
                    Error::InvalidParameter("pl-alpha needs --alpha".into())
                })?;
                EnsembleSpec::PlAlpha(xi_or_default, alpha)
            }
            "wilkinson" => EnsembleSpec::Wilkinson,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown ensemble `{other}`"
                )))
            }
        })
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn ginibre(n: usize, rng: &mut RandomStream) -> DenseMatrix {
    let entries: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::from_real(n, n, entries)
}

fn ginibre_complex(n: usize, rng: &mut RandomStream) -> DenseMatrix {
    let entries: Vec<Complex64> = (0..n * n).map(|_| standard_complex_normal(rng)).collect();
    DenseMatrix::from_complex(n, n, entries)
}

fn goe(n: usize, rng: &mut RandomStream) -> DenseMatrix {
    let g = ginibre(n, rng);
    let sym = g.add(&g.conj_transpose());
    sym.scale(std::f64::consts::FRAC_1_SQRT_2)
}

fn gue(n: usize, rng: &mut RandomStream) -> DenseMatrix {
    let h = ginibre_complex(n, rng);
    let herm = h.add(&h.conj_transpose());
    herm.scale(std::f64::consts::FRAC_1_SQRT_2)
}

fn bernoulli(p: f64, n: usize, rng: &mut RandomStream) -> DenseMatrix {
    DenseMatrix::from_fn_real(n, n, |_, _| if rng.gen_bool(p) { 1.0 } else { 0.0 })
}

/// One n x n draw from the named law.
pub fn sample(spec: &EnsembleSpec, n: usize, rng: &mut RandomStream) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::DimensionMismatch("dimension must be positive".into()));
    }
    if spec.requires_power_of_two() && !(n >= 2 && n.is_power_of_two()) {
        return Err(Error::DimensionMismatch(format!(
            "{} needs a power-of-two dimension, got {n}",
            spec.label()
        )));
    }
    match spec {
        EnsembleSpec::Ginibre => Ok(ginibre(n, rng)),
        EnsembleSpec::GinibreComplex => Ok(ginibre_complex(n, rng)),
        EnsembleSpec::Goe => Ok(goe(n, rng)),
        EnsembleSpec::Gue => Ok(gue(n, rng)),
        EnsembleSpec::Bernoulli(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidParameter(format!(
                    "Bernoulli parameter {p} outside [0, 1]"
                )));
            }
            Ok(bernoulli(*p, n, rng))
        }
        EnsembleSpec::HaarOrthogonal => Ok(haar_orthogonal(n, rng)),
        EnsembleSpec::HaarButterflySs => {
            Ok(sample_butterfly(ButterflyStructure::SimpleScalar, n, rng)?.0)
        }
        EnsembleSpec::ButterflyScalar => {
            Ok(sample_butterfly(ButterflyStructure::Scalar, n, rng)?.0)
        }
        EnsembleSpec::ButterflySimpleDiag => {
            Ok(sample_butterfly(ButterflyStructure::SimpleDiag, n, rng)?.0)
        }
        EnsembleSpec::ButterflyDiag => Ok(sample_butterfly(ButterflyStructure::Diag, n, rng)?.0),
        EnsembleSpec::WalshSigned => walsh_signed(n, rng),
        EnsembleSpec::DctSigned => Ok(dct_signed(n, rng)),
        EnsembleSpec::PlMax(xi) => sample_pl(PlVariant::Max, *xi, n, rng),
        EnsembleSpec::Pl(xi) => sample_pl(PlVariant::Uniform, *xi, n, rng),
        EnsembleSpec::PlAlpha(xi, alpha) => sample_pl(PlVariant::Alpha(*alpha), *xi, n, rng),
        EnsembleSpec::Wilkinson => Ok(wilkinson_matrix(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::seed_stream;
    use crate::matrix::Field;
    use crate::linalg::gepp_factor;

    #[test]
    fn bernoulli_two_by_two_exhaustive_law() {
        // enumerate all 16 sign patterns: a pivot move happens only for
        // A11 = 0, A21 = 1, i.e. probability p(1-p) = 1/4 at p = 1/2
        let mut moved = 0;
        for bits in 0..16u32 {
            let e = |k: u32| ((bits >> k) & 1) as f64;
            let a = DenseMatrix::from_rows(&[vec![e(0), e(1)], vec![e(2), e(3)]]);
            let r = gepp_factor(&a).unwrap();
            if r.pivot_count == 1 {
                moved += 1;
            }
        }
        assert_eq!(moved, 4);
    }

    #[test]
    fn wilkinson_kind_is_deterministic() {
        let mut rng = seed_stream(5, 0);
        let a = sample(&EnsembleSpec::Wilkinson, 7, &mut rng).unwrap();
        assert_eq!(a, wilkinson_matrix(7));
    }

    #[test]
    fn goe_two_by_two_pivot_frequency() {
        // P(|G21| > |G11|) = (2/pi) arctan(1/sqrt(2))
        let mut rng = seed_stream(5, 1);
        let trials = 200_000;
        let mut moves = 0usize;
        for _ in 0..trials {
            let g = sample(&EnsembleSpec::Goe, 2, &mut rng).unwrap();
            moves += gepp_factor(&g).unwrap().pivot_count;
        }
        let freq = moves as f64 / trials as f64;
        assert!((freq - 0.391826552).abs() < 0.005, "freq {freq}");
    }

    #[test]
    fn gue_matrices_are_hermitian() {
        let mut rng = seed_stream(5, 2);
        let g = sample(&EnsembleSpec::Gue, 5, &mut rng).unwrap();
        assert_eq!(g.field(), Field::Complex);
        for i in 0..5 {
            for j in 0..5 {
                let d = g.get(i, j) - g.get(j, i).conj();
                assert!(d.norm() < 1e-15);
            }
            assert!(g.get(i, i).im.abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_checks() {
        let mut rng = seed_stream(5, 3);
        assert!(sample(&EnsembleSpec::HaarButterflySs, 12, &mut rng).is_err());
        assert!(sample(&EnsembleSpec::WalshSigned, 3, &mut rng).is_err());
        assert!(sample(&EnsembleSpec::Bernoulli(1.5), 4, &mut rng).is_err());
        assert!(sample(&EnsembleSpec::DctSigned, 3, &mut rng).is_ok());
    }

    #[test]
    fn parse_round_trips_labels() {
        for kind in [
            "ginibre",
            "ginibre-complex",
            "goe",
            "gue",
            "bernoulli",
            "haar-orthogonal",
            "haar-butterfly",
            "butterfly-scalar",
            "butterfly-simple-diag",
            "butterfly-diag",
            "walsh",
            "dct",
            "pl-max",
            "pl",
            "wilkinson",
        ] {
            let spec = EnsembleSpec::parse(kind, None, None, None).unwrap();
            assert_eq!(spec.label(), kind);
        }
        let spec = EnsembleSpec::parse("pl-alpha", None, Some(XiSpec::StdNormal), Some(0.75));
        assert_eq!(
            spec.unwrap(),
            EnsembleSpec::PlAlpha(XiSpec::StdNormal, 0.75)
        );
        assert!(EnsembleSpec::parse("pl-alpha", None, None, None).is_err());
        assert!(EnsembleSpec::parse("nope", None, None, None).is_err());
    }

    #[test]
    fn xi_laws_have_stated_variance() {
        let mut rng = seed_stream(5, 4);
        let trials = 200_000;
        for xi in [
            XiSpec::UniformSym,
            XiSpec::UniformDisk,
            XiSpec::Rademacher,
            XiSpec::StdNormal,
        ] {
            let mut acc = 0.0;
            let mut mean = Complex64::new(0.0, 0.0);
            for _ in 0..trials {
                let z = xi.sample_complex(&mut rng);
                acc += z.norm_sqr();
                mean += z;
            }
            let var = acc / trials as f64;
            assert!((var - xi.variance()).abs() < 0.01, "{xi:?} var {var}");
            assert!((mean / trials as f64).norm() < 0.01);
        }
    }
}
