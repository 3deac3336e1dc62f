mod props;

#[test]
fn metric_symmetry_triangle_lower_bound_refinement() {
    props::metric_invariants(64).unwrap();
}

#[test]
fn initial_forms_multiply() {
    props::initial_form_multiplicative(256).unwrap();
}

#[test]
fn initial_forms_satisfy_euler() {
    props::euler_identity(256).unwrap();
}

#[test]
fn printed_polynomials_reparse() {
    props::print_parse_round_trip(256).unwrap();
}

#[test]
fn corpus_expressions_round_trip() {
    assert!(props::corpus_round_trip().unwrap() >= 7);
}

#[test]
fn gradients_match_finite_differences() {
    props::gradient_matches_differences(256).unwrap();
}
