//! Empirical spectral distribution probes for the PL ensembles: scaled
//! eigenvalue clouds, radial statistics, and the rank/nullity probe for the
//! sparse regime.

mod eigen;

pub use eigen::eigenvalues;

use num_complex::Complex64;
use serde::Serialize;

use crate::ensembles::{k_alpha, sample_pl, PlVariant, XiSpec};
use crate::error::{Error, Result};
use crate::matrix::MatrixData;
use crate::rng::RandomStream;
use crate::scalar::{Scalar, MACHINE_EPS};

/// Eigenvalues of one PL draw divided by sqrt(n sigma^2 (1 - alpha)).
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSample {
    pub n: usize,
    /// Sparsity used for the scale; 1/2 for the max/uniform variants.
    pub alpha: f64,
    pub xi: XiSpec,
    pub eigenvalues: Vec<Complex64>,
    pub scale: f64,
}

impl SpectralSample {
    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0, |m, z| f64::max(m, z.norm()))
    }

    pub fn min_modulus(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, z| f64::min(m, z.norm()))
    }

    /// Fraction of scaled eigenvalues with modulus at most r.
    pub fn radial_cdf_at(&self, r: f64) -> f64 {
        let hits = self.eigenvalues.iter().filter(|z| z.norm() <= r).count();
        hits as f64 / self.eigenvalues.len() as f64
    }
}

/// Empirical radial CDF of a spectral sample on a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub cdf: Vec<f64>,
}

/// Draw one PL sample, compute its spectrum, and scale it. The max and
/// uniform variants use the lower factor's asymptotic density 1/2 in place
/// of alpha.
pub fn scaled_esd(
    variant: PlVariant,
    xi: XiSpec,
    n: usize,
    rng: &mut RandomStream,
) -> Result<SpectralSample> {
    let alpha = match variant {
        PlVariant::Max | PlVariant::Uniform => 0.5,
        PlVariant::Alpha(a) => a,
    };
    let a = sample_pl(variant, xi, n, rng)?;
    let scale = (n as f64 * xi.variance() * (1.0 - alpha)).sqrt();
    let eigenvalues = eigenvalues(&a)?
        .into_iter()
        .map(|z| z / scale)
        .collect();
    Ok(SpectralSample {
        n,
        alpha,
        xi,
        eigenvalues,
        scale,
    })
}

/// Radial CDF values on `grid_points` evenly spaced radii from 0 to the
/// largest modulus in the sample.
pub fn radial_profile(s: &SpectralSample, grid_points: usize) -> RadialProfile {
    assert!(grid_points >= 2, "need at least two grid points");
    let top = s.max_modulus();
    let radii: Vec<f64> = (0..grid_points)
        .map(|i| top * i as f64 / (grid_points - 1) as f64)
        .collect();
    let cdf = radii.iter().map(|&r| s.radial_cdf_at(r)).collect();
    RadialProfile { radii, cdf }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RankNullity {
    pub numerical_rank: usize,
    pub zero_eig_multiplicity: usize,
}

/// Numerical rank (column-pivoted QR, threshold n eps |R_11|) and
/// zero-eigenvalue count (modulus below n eps ||A||_max) of one
/// fixed-sparsity PL draw.
pub fn rank_nullity_probe(
    alpha: f64,
    xi: XiSpec,
    n: usize,
    rng: &mut RandomStream,
) -> Result<RankNullity> {
    if n > 1024 {
        return Err(Error::InvalidInput(format!(
            "rank/nullity probe capped at n = 1024, got {n}"
        )));
    }
    // validates alpha
    let _ = k_alpha(n, alpha)?;
    let a = sample_pl(PlVariant::Alpha(alpha), xi, n, rng)?;
    let rdiag = match a.data() {
        MatrixData::Real(v) => qrcp_rdiag(v.clone(), n),
        MatrixData::Complex(v) => qrcp_rdiag(v.clone(), n),
    };
    let rank_threshold = n as f64 * MACHINE_EPS * rdiag[0];
    let numerical_rank = rdiag.iter().filter(|&&d| d > rank_threshold).count();
    let eig_threshold = n as f64 * MACHINE_EPS * a.max_norm();
    let zero_eig_multiplicity = eigenvalues(&a)?
        .iter()
        .filter(|z| z.norm() < eig_threshold)
        .count();
    Ok(RankNullity {
        numerical_rank,
        zero_eig_multiplicity,
    })
}

/// |R_kk| from a Householder QR with column pivoting. Column norms are
/// recomputed exactly at every step, which is O(n^3) but immune to
/// downdating drift at desk scale.
fn qrcp_rdiag<T: Scalar>(mut a: Vec<T>, n: usize) -> Vec<f64> {
    let mut rdiag = vec![0.0; n];
    for k in 0..n {
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let norm: f64 = (k..n).map(|i| a[i * n + j].modulus_sqr()).sum();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        if best != k {
            for i in 0..n {
                a.swap(i * n + k, i * n + best);
            }
        }
        let norm = best_norm.max(0.0).sqrt();
        rdiag[k] = norm;
        if norm == 0.0 {
            break;
        }
        let x0 = a[k * n + k];
        let ph = if x0 == T::zero() {
            T::one()
        } else {
            x0 / T::from_f64(x0.modulus())
        };
        let alpha = -ph * T::from_f64(norm);
        let mut v: Vec<T> = (k..n).map(|i| a[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.modulus_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm_sq;
        for j in k + 1..n {
            let mut w = T::zero();
            for (off, vi) in v.iter().enumerate() {
                w += vi.conj() * a[(k + off) * n + j];
            }
            w *= T::from_f64(tau);
            for (off, vi) in v.iter().enumerate() {
                let upd = *vi * w;
                a[(k + off) * n + j] -= upd;
            }
        }
        a[k * n + k] = alpha;
        for i in k + 1..n {
            a[i * n + k] = T::zero();
        }
    }
    rdiag
}
