//! Random butterfly matrices: recursive orthogonal constructions built from
//! commuting cosine/sine blocks, and closed-form GENP/GEPP factors for the
//! simple scalar (Haar-butterfly) case.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::perm::Permutation;
use crate::rng::{uniform_angle, RandomStream};
use crate::scalar::MACHINE_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ButterflyStructure {
    /// One shared recursive branch, one angle per level: the Haar-butterfly
    /// construction B(theta_n) ⊗ ... ⊗ B(theta_1).
    SimpleScalar,
    /// Independent branches, one angle per recursion node (N-1 angles).
    Scalar,
    /// One shared branch, one angle per diagonal entry per level (N-1).
    SimpleDiag,
    /// Independent branches with per-entry diagonal angles (N/2 * log2 N).
    Diag,
}

/// Angles drawn during a butterfly construction, grouped per recursive
/// level. `levels[l]` holds the angles used at block size `2^(l+1)`, ordered
/// by node visit (parent before children, left branch first).
#[derive(Debug, Clone, Serialize)]
pub struct ButterflyAngles {
    pub structure: ButterflyStructure,
    pub levels: Vec<Vec<f64>>,
}

impl ButterflyAngles {
    pub fn total(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Simple-scalar angle vector (theta_1, ..., theta_n), innermost first.
    pub fn simple_scalar(&self) -> Option<Vec<f64>> {
        if self.structure != ButterflyStructure::SimpleScalar {
            return None;
        }
        Some(self.levels.iter().map(|l| l[0]).collect())
    }
}

/// Assemble [[C, S], [-S, C]] (A1 ⊕ A2) for diagonal C = diag(cos t_i),
/// S = diag(sin t_i); scalar structures pass a single repeated angle.
fn assemble(cosines: &[f64], sines: &[f64], a1: &DenseMatrix, a2: &DenseMatrix) -> DenseMatrix {
    let m = a1.n_rows();
    DenseMatrix::from_fn_real(2 * m, 2 * m, |i, j| {
        if i < m {
            if j < m {
                cosines[i] * a1.get_real(i, j)
            } else {
                sines[i] * a2.get_real(i, j - m)
            }
        } else if j < m {
            -sines[i - m] * a1.get_real(i - m, j)
        } else {
            cosines[i - m] * a2.get_real(i - m, j - m)
        }
    })
}

fn build(
    structure: ButterflyStructure,
    size: usize,
    rng: &mut RandomStream,
    levels: &mut Vec<Vec<f64>>,
) -> DenseMatrix {
    if size == 1 {
        return DenseMatrix::from_real(1, 1, vec![1.0]);
    }
    let m = size / 2;
    let level_idx = size.trailing_zeros() as usize - 1;
    let angle_count = match structure {
        ButterflyStructure::SimpleScalar | ButterflyStructure::Scalar => 1,
        ButterflyStructure::SimpleDiag | ButterflyStructure::Diag => m,
    };
    let angles: Vec<f64> = (0..angle_count).map(|_| uniform_angle(rng)).collect();
    levels[level_idx].extend_from_slice(&angles);
    let (cosines, sines): (Vec<f64>, Vec<f64>) = if angle_count == 1 {
        (vec![angles[0].cos(); m], vec![angles[0].sin(); m])
    } else {
        (
            angles.iter().map(|t| t.cos()).collect(),
            angles.iter().map(|t| t.sin()).collect(),
        )
    };
    let simple = matches!(
        structure,
        ButterflyStructure::SimpleScalar | ButterflyStructure::SimpleDiag
    );
    let a1 = build(structure, m, rng, levels);
    let a2 = if simple {
        a1.clone()
    } else {
        build(structure, m, rng, levels)
    };
    assemble(&cosines, &sines, &a1, &a2)
}

/// One draw of a random butterfly matrix of order `N = 2^n` with iid
/// Uniform[0, 2pi) angles, together with the angles that produced it.
pub fn sample_butterfly(
    structure: ButterflyStructure,
    n_dim: usize,
    rng: &mut RandomStream,
) -> Result<(DenseMatrix, ButterflyAngles)> {
    if n_dim < 2 || !n_dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "butterfly matrices need a power-of-two order, got {n_dim}"
        )));
    }
    let n_levels = n_dim.trailing_zeros() as usize;
    let mut levels = vec![Vec::new(); n_levels];
    let matrix = build(structure, n_dim, rng, &mut levels);
    Ok((
        matrix,
        ButterflyAngles {
            structure,
            levels,
        },
    ))
}

/// Materialize the simple scalar butterfly B(theta_n) ⊗ ... ⊗ B(theta_1)
/// from explicit angles (innermost angle first).
pub fn simple_scalar_matrix(angles: &[f64]) -> DenseMatrix {
    let mut acc = DenseMatrix::from_real(1, 1, vec![1.0]);
    for &t in angles.iter().rev() {
        acc = acc.kron(&rotation(t));
    }
    acc
}

pub fn rotation(theta: f64) -> DenseMatrix {
    DenseMatrix::from_rows(&[
        vec![theta.cos(), theta.sin()],
        vec![-theta.sin(), theta.cos()],
    ])
}

fn lower_factor(theta: f64) -> DenseMatrix {
    DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![-theta.tan(), 1.0]])
}

fn upper_factor(theta: f64, flip_first_col: bool) -> DenseMatrix {
    let d = if flip_first_col { -1.0 } else { 1.0 };
    DenseMatrix::from_rows(&[
        vec![d * theta.cos(), theta.sin()],
        vec![0.0, 1.0 / theta.cos()],
    ])
}

/// Closed-form GEPP factors of a simple scalar butterfly.
#[derive(Debug, Clone)]
pub struct ButterflyGeppPrediction {
    pub perm: Permutation,
    pub lower: DenseMatrix,
    pub upper: DenseMatrix,
}

impl ButterflyGeppPrediction {
    pub fn pivot_count(&self) -> usize {
        crate::perm::to_pivot_sequence(&self.perm).movement_count()
    }
}

/// Predict the GEPP factorization of the simple scalar butterfly with the
/// given angles without running elimination: the permutation is
/// ⊗ P_(1 2)^{e_j} with e_j = [|tan theta_j| > 1], the factors are the
/// Kronecker products of the per-angle 2x2 closed forms under
/// theta_j' = (pi/2) e_j + (-1)^{e_j} theta_j.
pub fn butterfly_gepp_prediction(angles: &ButterflyAngles) -> Result<ButterflyGeppPrediction> {
    let thetas = angles.simple_scalar().ok_or_else(|| {
        Error::InvalidParameter("GEPP prediction needs simple-scalar angles".into())
    })?;
    let mut flags = Vec::with_capacity(thetas.len());
    for (j, &t) in thetas.iter().enumerate() {
        let tan_mod = t.tan().abs();
        if (tan_mod - 1.0).abs() <= 4.0 * MACHINE_EPS {
            return Err(Error::TieAngle(j + 1));
        }
        flags.push(tan_mod > 1.0);
    }
    let swap = Permutation::from_image(vec![2, 1]).unwrap();
    let id2 = Permutation::identity(2);
    let mut perm = Permutation::identity(1);
    let mut lower = DenseMatrix::from_real(1, 1, vec![1.0]);
    let mut upper = DenseMatrix::from_real(1, 1, vec![1.0]);
    for j in (0..thetas.len()).rev() {
        let e = flags[j];
        let tp = if e {
            std::f64::consts::FRAC_PI_2 - thetas[j]
        } else {
            thetas[j]
        };
        perm = perm.kron(if e { &swap } else { &id2 });
        lower = lower.kron(&lower_factor(tp));
        upper = upper.kron(&upper_factor(tp, e));
    }
    Ok(ButterflyGeppPrediction { perm, lower, upper })
}
