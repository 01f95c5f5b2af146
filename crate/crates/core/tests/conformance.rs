mod common;

use common::conformance::*;

#[test]
fn bm25_matches_reference_weights_and_rankings() {
    bm25_fixture().unwrap();
}

#[test]
fn metrics_match_trec_eval() {
    metrics_fixture().unwrap();
}

#[test]
fn fusion_matches_brute_force_tables() {
    fusion_fixture().unwrap();
}
