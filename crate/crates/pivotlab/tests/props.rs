//! Property tests for the factorization contracts and the pivot-sequence
//! bijection.

use pivotlab::linalg::{genp_factor, gepp_factor, reconstruction_residual};
use pivotlab::matrix::DenseMatrix;
use pivotlab::perm::{from_pivot_sequence, to_pivot_sequence, Permutation, PivotSequence};
use pivotlab::scalar::MACHINE_EPS;
use proptest::prelude::*;

fn arb_matrix(max_n: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(-100.0f64..100.0, n * n),
            )
        })
        .prop_map(|(n, entries)| DenseMatrix::from_real(n, n, entries))
}

fn arb_pivot_sequence(max_n: usize) -> impl Strategy<Value = PivotSequence> {
    (1..=max_n)
        .prop_flat_map(|n| {
            let choices: Vec<BoxedStrategy<usize>> =
                (1..n).map(|k| (k..=n).boxed()).collect();
            (Just(n), choices)
        })
        .prop_map(|(n, indices)| PivotSequence::new(n, indices).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gepp_contracts(a in arb_matrix(12)) {
        let n = a.n_rows();
        let r = gepp_factor(&a).unwrap();
        // reconstruction
        let tol = 64.0 * n as f64 * MACHINE_EPS * a.max_norm();
        prop_assert!(reconstruction_residual(&a, &r) <= tol);
        // multiplier bound, exact on stored values
        for i in 0..n {
            for j in 0..i {
                prop_assert!(r.lower.get_real(i, j).abs() <= 1.0);
            }
        }
        // movement count range
        prop_assert!(r.pivot_count <= n.saturating_sub(1));
        // growth window
        prop_assert!(r.growth >= 1.0 - 1e-12);
        prop_assert!(r.growth <= (2.0f64).powi(n as i32 - 1) * (1.0 + 1e-12));
        // zero movements means GENP agrees bitwise
        if r.pivot_count == 0 && !r.singular {
            let (l, u) = genp_factor(&a).unwrap();
            prop_assert!(l == r.lower && u == r.upper);
        }
    }

    #[test]
    fn pivot_sequence_round_trip(s in arb_pivot_sequence(24)) {
        let p = from_pivot_sequence(&s);
        prop_assert_eq!(to_pivot_sequence(&p), s);
    }

    #[test]
    fn permutation_round_trip(image in proptest::sample::subsequence((1..=16usize).collect::<Vec<_>>(), 16).prop_shuffle()) {
        let p = Permutation::from_image(image).unwrap();
        let s = to_pivot_sequence(&p);
        prop_assert_eq!(from_pivot_sequence(&s), p);
    }

    #[test]
    fn csv_round_trip(a in arb_matrix(6)) {
        let b = DenseMatrix::from_csv(&a.to_csv()).unwrap();
        prop_assert_eq!(a, b);
    }
}
