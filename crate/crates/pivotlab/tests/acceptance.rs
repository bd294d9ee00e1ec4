//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them as they finish).

use pivotlab::acceptance::*;

fn check(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn accept_01_stirling_exactness() {
    check(criterion_1_stirling_exactness());
}

#[test]
fn accept_02_ginibre_pivot_law() {
    check(criterion_2_ginibre_law());
}

#[test]
fn accept_03_butterfly_pivot_law() {
    check(criterion_3_butterfly_law());
}

#[test]
fn accept_04_haar_orthogonal_law() {
    check(criterion_4_haar_orthogonal_law());
}

#[test]
fn accept_05_deterministic_transforms() {
    check(criterion_5_deterministic_transforms());
}

#[test]
fn accept_06_small_matrix_probabilities() {
    check(criterion_6_small_matrix_probabilities());
}

#[test]
fn accept_07_butterfly_closed_forms() {
    check(criterion_7_butterfly_closed_forms());
}

#[test]
fn accept_08_worstcase_model() {
    check(criterion_8_worstcase_model());
}

#[test]
fn accept_09_maxmove_model() {
    check(criterion_9_maxmove_model());
}

#[test]
fn accept_10_esd_probes() {
    check(criterion_10_esd_probes());
}

#[test]
fn accept_11_reproducibility() {
    check(criterion_11_reproducibility());
}
