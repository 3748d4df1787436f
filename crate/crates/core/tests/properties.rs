#[allow(dead_code)]
mod support;

use support::properties::*;

#[test]
fn normalization_is_idempotent() {
    normalize_idempotence(CASES).unwrap();
}

#[test]
fn total_derivatives_commute() {
    total_derivative_commutation(CASES).unwrap();
}

#[test]
fn brackets_are_antisymmetric_and_satisfy_jacobi() {
    bracket_identities(CASES).unwrap();
}

#[test]
fn on_shell_elimination_is_confluent() {
    on_shell_confluence(CASES).unwrap();
}

#[test]
fn noether_symmetries_give_conserved_vectors() {
    noether_implies_conservation(CASES).unwrap();
}
