//! Permutation algebra: the transposition normal form produced by partial
//! pivoting, cycle structure, uniform and n-cycle sampling, and the butterfly
//! permutation group.
//!
//! Permutations are 1-based throughout: `image[k-1]` is the image of `k`,
//! with values in `1..=n`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Field};
use crate::rng::RandomStream;

/// Row-pivot indices `i_1..i_{n-1}` recorded by partial pivoting, one per
/// elimination step, with `k <= i_k <= n`. Doubles as the transposition
/// normal form `(n-1 i_{n-1})···(2 i_2)(1 i_1)` of a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PivotSequence {
    n: usize,
    indices: Vec<usize>,
}

impl PivotSequence {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSequence("n must be positive".into()));
        }
        if indices.len() + 1 != n {
            return Err(Error::InvalidSequence(format!(
                "expected {} indices for n = {n}, got {}",
                n - 1,
                indices.len()
            )));
        }
        for (k0, &ik) in indices.iter().enumerate() {
            let k = k0 + 1;
            if ik < k || ik > n {
                return Err(Error::InvalidSequence(format!(
                    "i_{k} = {ik} outside {k}..={n}"
                )));
            }
        }
        Ok(PivotSequence { n, indices })
    }

    pub fn identity(n: usize) -> Self {
        PivotSequence {
            n,
            indices: (1..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `i_k` for `k` in `1..=n-1`.
    pub fn index(&self, k: usize) -> usize {
        self.indices[k - 1]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Steps `k` with `i_k > k`, i.e. the steps where an actual row
    /// transposition happens.
    pub fn movement_steps(&self) -> Vec<usize> {
        self.indices
            .iter()
            .enumerate()
            .filter(|&(k0, &ik)| ik > k0 + 1)
            .map(|(k0, _)| k0 + 1)
            .collect()
    }

    pub fn movement_count(&self) -> usize {
        self.indices
            .iter()
            .enumerate()
            .filter(|&(k0, &ik)| ik > k0 + 1)
            .count()
    }

    /// Number of fixed steps `i_k = k`, counting the vacuous `i_n = n`.
    pub fn fixed_count(&self) -> usize {
        self.n - self.movement_count()
    }
}

/// A permutation of `{1..n}` stored by its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n).collect(),
        }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n + 1];
        for &v in &image {
            if v < 1 || v > n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "image list is not a bijection of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// sigma(k), 1-based.
    pub fn apply(&self, k: usize) -> usize {
        self.image[k - 1]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (k0, &v) in self.image.iter().enumerate() {
            inv[v - 1] = k0 + 1;
        }
        Permutation { image: inv }
    }

    /// Composition `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n());
        Permutation {
            image: other.image.iter().map(|&v| self.image[v - 1]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k0, &v)| v == k0 + 1)
    }

    /// Kronecker product of the corresponding permutation matrices:
    /// `P_self ⊗ P_other` acting on `{1..n*m}`.
    pub fn kron(&self, other: &Permutation) -> Permutation {
        let m = other.n();
        let mut image = vec![0; self.n() * m];
        for i in 1..=self.n() {
            for j in 1..=m {
                image[(i - 1) * m + j - 1] = (self.apply(i) - 1) * m + other.apply(j);
            }
        }
        Permutation { image }
    }

    /// The permutation matrix `P` with `P e_k = e_{sigma(k)}`.
    pub fn to_matrix(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n, Field::Real);
        for k in 1..=n {
            m.set_real(self.apply(k) - 1, k - 1, 1.0);
        }
        m
    }

    /// `P_sigma * A`: row `i` of the output is row `sigma^{-1}(i)` of `A`.
    pub fn apply_rows(&self, a: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n(), a.n_rows());
        let n = a.n_rows();
        let cols = a.n_cols();
        match a.field() {
            Field::Real => {
                let src = a.real_entries().unwrap();
                let mut out = vec![0.0; n * cols];
                for i in 1..=n {
                    let dst = self.apply(i) - 1;
                    out[dst * cols..(dst + 1) * cols]
                        .copy_from_slice(&src[(i - 1) * cols..i * cols]);
                }
                DenseMatrix::from_real(n, cols, out)
            }
            Field::Complex => {
                let src = a.complex_entries().unwrap();
                let mut out = vec![num_complex::Complex64::new(0.0, 0.0); n * cols];
                for i in 1..=n {
                    let dst = self.apply(i) - 1;
                    out[dst * cols..(dst + 1) * cols]
                        .copy_from_slice(&src[(i - 1) * cols..i * cols]);
                }
                DenseMatrix::from_complex(n, cols, out)
            }
        }
    }
}

/// Disjoint-cycle form; fixed points appear as 1-cycles. Cycles are listed
/// by increasing minimal element, each rotated to start at its minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
    pub cycle_count: usize,
}

/// Compose `(n-1 i_{n-1})···(2 i_2)(1 i_1)` right-to-left, `(1 i_1)` first.
pub fn from_pivot_sequence(s: &PivotSequence) -> Permutation {
    let n = s.n();
    let mut image: Vec<usize> = (1..=n).collect();
    for k in 1..n {
        let ik = s.index(k);
        if ik != k {
            // Post-compose with the transposition (k ik): swap the values
            // k and ik wherever they occur in the image.
            for v in image.iter_mut() {
                if *v == k {
                    *v = ik;
                } else if *v == ik {
                    *v = k;
                }
            }
        }
    }
    Permutation { image }
}

/// Inverse of [`from_pivot_sequence`]; every permutation has exactly one
/// normal form, so the round trip is the identity.
pub fn to_pivot_sequence(p: &Permutation) -> PivotSequence {
    let n = p.n();
    let mut work = p.clone();
    let mut indices = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        // Peel (k i_k) off the right: i_k is the preimage of k, and the
        // remainder fixes k.
        let ik = work.inverse().apply(k);
        indices.push(ik);
        if ik != k {
            work.image.swap(k - 1, ik - 1);
        }
    }
    PivotSequence { n, indices }
}

pub fn cycle_decomposition(p: &Permutation) -> CycleDecomposition {
    let n = p.n();
    let mut seen = vec![false; n + 1];
    let mut cycles = Vec::new();
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = p.apply(start);
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = p.apply(cur);
        }
        cycles.push(cycle);
    }
    let cycle_count = cycles.len();
    CycleDecomposition {
        cycles,
        cycle_count,
    }
}

/// Uniform draw from `S_n` via the subgroup algorithm: each `i_k` uniform on
/// `{k..n}`, composed as the normal form.
pub fn sample_uniform(rng: &mut RandomStream, n: usize) -> Permutation {
    assert!(n >= 1);
    let indices: Vec<usize> = (1..n).map(|k| rng.gen_range(k..=n)).collect();
    from_pivot_sequence(&PivotSequence { n, indices })
}

/// Uniform draw from the n-cycles of `S_n` via `i_k` uniform on `{k+1..n}`.
pub fn sample_uniform_ncycle(rng: &mut RandomStream, n: usize) -> Result<Permutation> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "n-cycle sampling needs n >= 2".into(),
        ));
    }
    let indices: Vec<usize> = (1..n).map(|k| rng.gen_range(k + 1..=n)).collect();
    Ok(from_pivot_sequence(&PivotSequence { n, indices }))
}

/// The `N` butterfly permutations `⊗_{j=1}^n P_{(1 2)}^{e_j}` for
/// `e ∈ {0,1}^n`, listed with `e_1` as the low-order bit of the element
/// index. The set is a group isomorphic to `(Z/2Z)^n`.
pub fn butterfly_perm_group(n_dim: usize) -> Result<Vec<Permutation>> {
    if n_dim < 2 || !n_dim.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "butterfly permutations need a power-of-two size, got {n_dim}"
        )));
    }
    let levels = n_dim.trailing_zeros() as usize;
    let swap = Permutation::from_image(vec![2, 1]).unwrap();
    let id2 = Permutation::identity(2);
    let mut out = Vec::with_capacity(n_dim);
    for m in 0..n_dim {
        let mut acc = Permutation::identity(1);
        // Kronecker slot j (outermost first) is controlled by bit j-1 of m.
        for j in 0..levels {
            let factor = if (m >> j) & 1 == 1 { &swap } else { &id2 };
            acc = acc.kron(factor);
        }
        out.push(acc);
    }
    Ok(out)
}

/// One deduplicated GEPP pivot-location configuration for butterfly
/// permutations of size `2^n_power`, with its probability `multiplicity / N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PivotConfiguration {
    pub n_power: usize,
    /// Elimination steps (1-based) where a pivot movement occurs; empty or
    /// exactly `N/2` elements.
    pub pivot_steps: Vec<usize>,
    pub numerator: usize,
    pub denominator: usize,
}

impl PivotConfiguration {
    pub fn probability(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Bitmask with bit `k-1` set for each step `k`, rendered as hex.
    pub fn bitmask_hex(&self) -> String {
        let n_dim = 1usize << self.n_power;
        let mut bytes = vec![0u8; (n_dim + 7) / 8];
        for &k in &self.pivot_steps {
            bytes[(k - 1) / 8] |= 1 << ((k - 1) % 8);
        }
        let mut s = String::from("0x");
        for b in bytes.iter().rev() {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }
}

/// Group the butterfly permutations of size `N` by their pivot-movement step
/// sets. Sorted by descending probability, ties by descending bitmask.
pub fn pivot_configurations(n_dim: usize) -> Result<Vec<PivotConfiguration>> {
    let group = butterfly_perm_group(n_dim)?;
    let n_power = n_dim.trailing_zeros() as usize;
    let mut by_steps: Vec<(Vec<usize>, usize)> = Vec::new();
    for p in &group {
        let steps = to_pivot_sequence(p).movement_steps();
        match by_steps.iter_mut().find(|(s, _)| *s == steps) {
            Some((_, count)) => *count += 1,
            None => by_steps.push((steps, 1)),
        }
    }
    let mut configs: Vec<PivotConfiguration> = by_steps
        .into_iter()
        .map(|(pivot_steps, mult)| PivotConfiguration {
            n_power,
            pivot_steps,
            numerator: mult,
            denominator: n_dim,
        })
        .collect();
    configs.sort_by(|a, b| {
        b.numerator
            .cmp(&a.numerator)
            .then_with(|| b.pivot_steps.cmp(&a.pivot_steps))
    });
    Ok(configs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::seed_stream;
    use std::collections::HashSet;

    fn seq(n: usize, idx: &[usize]) -> PivotSequence {
        PivotSequence::new(n, idx.to_vec()).unwrap()
    }

    #[test]
    fn normal_form_worked_example() {
        // (5 6)(3 4)(2 4)(1 3) composed right-to-left is (1 4 2 3)(5 6).
        let s = seq(6, &[3, 4, 4, 4, 6]);
        let p = from_pivot_sequence(&s);
        assert_eq!(p.image(), &[4, 3, 1, 2, 6, 5]);
        let d = cycle_decomposition(&p);
        assert_eq!(d.cycle_count, 2);
        assert_eq!(d.cycles, vec![vec![1, 4, 2, 3], vec![5, 6]]);
        // maximal elements of the two cycles
        let maxes: Vec<usize> = d.cycles.iter().map(|c| *c.iter().max().unwrap()).collect();
        assert_eq!(maxes, vec![4, 6]);
        // and the inverse map recovers the sequence
        assert_eq!(to_pivot_sequence(&p), s);
    }

    #[test]
    fn identity_sequence() {
        let s = PivotSequence::identity(5);
        assert!(from_pivot_sequence(&s).is_identity());
        assert_eq!(s.movement_count(), 0);
        assert_eq!(s.fixed_count(), 5);
    }

    #[test]
    fn rejects_out_of_range_indices() {
        assert!(PivotSequence::new(4, vec![0, 2, 3]).is_err());
        assert!(PivotSequence::new(4, vec![1, 2, 5]).is_err());
        assert!(PivotSequence::new(4, vec![1, 1, 3]).is_err());
        assert!(PivotSequence::new(4, vec![1, 2]).is_err());
    }

    #[test]
    fn all_sequences_enumerate_s4() {
        let mut images = HashSet::new();
        for i1 in 1..=4 {
            for i2 in 2..=4 {
                for i3 in 3..=4 {
                    let p = from_pivot_sequence(&seq(4, &[i1, i2, i3]));
                    images.insert(p.image().to_vec());
                }
            }
        }
        assert_eq!(images.len(), 24);
    }

    #[test]
    fn round_trip_random() {
        let mut rng = seed_stream(0xABCD, 0);
        for _ in 0..1000 {
            let p = sample_uniform(&mut rng, 8);
            assert_eq!(from_pivot_sequence(&to_pivot_sequence(&p)), p);
        }
    }

    #[test]
    fn cycle_count_equals_fixed_indices_exhaustive() {
        for n in 1..=7 {
            let mut stack = vec![Vec::new()];
            while let Some(prefix) = stack.pop() {
                let k = prefix.len() + 1;
                if k == n {
                    let s = seq(n, &prefix);
                    let p = from_pivot_sequence(&s);
                    assert_eq!(cycle_decomposition(&p).cycle_count, s.fixed_count());
                } else {
                    for ik in k..=n {
                        let mut next = prefix.clone();
                        next.push(ik);
                        stack.push(next);
                    }
                }
            }
        }
    }

    #[test]
    fn identity_has_n_cycles() {
        let p = Permutation::identity(9);
        assert_eq!(cycle_decomposition(&p).cycle_count, 9);
    }

    #[test]
    fn round_trip_exhaustive_small_n() {
        use itertools::Itertools;
        for n in 1..=7 {
            for image in (1..=n).permutations(n) {
                let p = Permutation::from_image(image).unwrap();
                assert_eq!(from_pivot_sequence(&to_pivot_sequence(&p)), p);
            }
        }
    }

    #[test]
    fn cycle_count_identity_randomized_n64() {
        let mut rng = seed_stream(0xCC, 0);
        for _ in 0..500 {
            let p = sample_uniform(&mut rng, 64);
            let s = to_pivot_sequence(&p);
            assert_eq!(cycle_decomposition(&p).cycle_count, s.fixed_count());
        }
    }

    #[test]
    fn s5_cycle_count_histogram() {
        use itertools::Itertools;
        let mut hist = [0usize; 6];
        for image in (1..=5).permutations(5) {
            let p = Permutation::from_image(image).unwrap();
            hist[cycle_decomposition(&p).cycle_count] += 1;
        }
        assert_eq!(&hist[1..], &[24, 50, 35, 10, 1]);
    }

    #[test]
    fn uniform_sampler_n1_and_frequencies() {
        let mut rng = seed_stream(7, 0);
        assert!(sample_uniform(&mut rng, 1).is_identity());

        let trials = 60_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let p = sample_uniform(&mut rng, 3);
            *counts.entry(p.image().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "freq {freq}");
        }
    }

    #[test]
    fn uniform_sampler_s4_cycle_distribution() {
        let mut rng = seed_stream(11, 0);
        let trials = 50_000;
        let mut hist = [0usize; 5];
        for _ in 0..trials {
            hist[cycle_decomposition(&sample_uniform(&mut rng, 4)).cycle_count] += 1;
        }
        let expected = [6.0, 11.0, 6.0, 1.0];
        for k in 1..=4 {
            let freq = hist[k] as f64 / trials as f64;
            assert!((freq - expected[k - 1] / 24.0).abs() < 0.01, "k={k} freq {freq}");
        }
    }

    #[test]
    fn ncycle_sampler_properties() {
        let mut rng = seed_stream(13, 0);
        assert!(sample_uniform_ncycle(&mut rng, 1).is_err());
        for _ in 0..100 {
            let p = sample_uniform_ncycle(&mut rng, 2).unwrap();
            assert_eq!(p.image(), &[2, 1]);
        }
        // every draw is a single cycle and its sequence moves at every step
        for n in [3usize, 5, 8, 17] {
            for _ in 0..200 {
                let p = sample_uniform_ncycle(&mut rng, n).unwrap();
                assert_eq!(cycle_decomposition(&p).cycle_count, 1);
                assert_eq!(to_pivot_sequence(&p).movement_count(), n - 1);
            }
        }
        // n = 4: all six 4-cycles roughly uniform
        let trials = 60_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let p = sample_uniform_ncycle(&mut rng, 4).unwrap();
            *counts.entry(p.image().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            assert!((c as f64 / trials as f64 - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn butterfly_group_small() {
        let g2 = butterfly_perm_group(2).unwrap();
        assert_eq!(g2.len(), 2);
        assert!(g2[0].is_identity());
        assert_eq!(g2[1].image(), &[2, 1]);

        let g4 = butterfly_perm_group(4).unwrap();
        let images: Vec<&[usize]> = g4.iter().map(|p| p.image()).collect();
        // {1, (2 4)(1 3), (3 4)(1 2), (2 3)(1 4)}
        assert_eq!(
            images,
            vec![
                &[1, 2, 3, 4][..],
                &[3, 4, 1, 2][..],
                &[2, 1, 4, 3][..],
                &[4, 3, 2, 1][..],
            ]
        );
        assert!(butterfly_perm_group(6).is_err());
        assert!(butterfly_perm_group(1).is_err());
    }

    #[test]
    fn butterfly_group_n8_matches_expected_cycles() {
        let g8 = butterfly_perm_group(8).unwrap();
        let expected: Vec<Vec<Vec<usize>>> = vec![
            vec![],
            vec![vec![1, 5], vec![2, 6], vec![3, 7], vec![4, 8]],
            vec![vec![1, 3], vec![2, 4], vec![5, 7], vec![6, 8]],
            vec![vec![1, 7], vec![2, 8], vec![3, 5], vec![4, 6]],
            vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]],
            vec![vec![1, 6], vec![2, 5], vec![3, 8], vec![4, 7]],
            vec![vec![1, 4], vec![2, 3], vec![5, 8], vec![6, 7]],
            vec![vec![1, 8], vec![2, 7], vec![3, 6], vec![4, 5]],
        ];
        for (p, exp) in g8.iter().zip(&expected) {
            let transpositions: Vec<Vec<usize>> = cycle_decomposition(p)
                .cycles
                .into_iter()
                .filter(|c| c.len() > 1)
                .collect();
            assert_eq!(&transpositions, exp);
        }
    }

    #[test]
    fn butterfly_group_closure_and_involutions() {
        for n_dim in [2usize, 4, 8, 16] {
            let g = butterfly_perm_group(n_dim).unwrap();
            let set: HashSet<Vec<usize>> = g.iter().map(|p| p.image().to_vec()).collect();
            for a in &g {
                assert!(set.contains(&a.compose(a).image().to_vec()));
                assert!(a.compose(a).is_identity());
                for b in &g {
                    assert!(set.contains(&a.compose(b).image().to_vec()));
                }
            }
        }
    }

    #[test]
    fn configurations_n2() {
        let cfgs = pivot_configurations(2).unwrap();
        assert_eq!(cfgs.len(), 2);
        for c in &cfgs {
            assert_eq!(c.denominator, 2);
            assert_eq!(c.numerator, 1);
        }
        assert_eq!(cfgs[0].pivot_steps, vec![1]);
        assert!(cfgs[1].pivot_steps.is_empty());
    }

    #[test]
    fn configurations_n8_match_expected() {
        let cfgs = pivot_configurations(8).unwrap();
        let as_tuples: Vec<(Vec<usize>, usize, usize)> = cfgs
            .iter()
            .map(|c| (c.pivot_steps.clone(), c.numerator, c.denominator))
            .collect();
        assert_eq!(
            as_tuples,
            vec![
                (vec![1, 2, 3, 4], 4, 8),
                (vec![1, 2, 5, 6], 2, 8),
                (vec![1, 3, 5, 7], 1, 8),
                (vec![], 1, 8),
            ]
        );
        let total: f64 = cfgs.iter().map(|c| c.probability()).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn configurations_nonempty_have_half_steps() {
        for n_dim in [2usize, 4, 8, 16, 32, 64] {
            let cfgs = pivot_configurations(n_dim).unwrap();
            let mut empties = 0;
            for c in &cfgs {
                if c.pivot_steps.is_empty() {
                    empties += 1;
                    assert_eq!(c.numerator, 1);
                } else {
                    assert_eq!(c.pivot_steps.len(), n_dim / 2, "N = {n_dim}");
                }
            }
            assert_eq!(empties, 1);
            // the every-other-step configuration appears with probability 1/N
            let alternating: Vec<usize> = (1..n_dim).step_by(2).collect();
            let alt = cfgs.iter().find(|c| c.pivot_steps == alternating).unwrap();
            assert_eq!(alt.numerator, 1);
        }
    }

    #[test]
    fn bitmask_hex_small() {
        let cfgs = pivot_configurations(8).unwrap();
        let alt = cfgs
            .iter()
            .find(|c| c.pivot_steps == vec![1, 3, 5, 7])
            .unwrap();
        assert_eq!(alt.bitmask_hex(), "0x55");
    }

    #[test]
    fn perm_matrix_and_row_action_agree() {
        let mut rng = seed_stream(99, 3);
        let p = sample_uniform(&mut rng, 6);
        let a = DenseMatrix::from_fn_real(6, 6, |i, j| (i * 6 + j) as f64);
        let via_matrix = p.to_matrix().matmul(&a);
        let via_rows = p.apply_rows(&a);
        assert_eq!(via_matrix, via_rows);
    }
}
