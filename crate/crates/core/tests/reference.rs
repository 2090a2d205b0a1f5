mod common;

use infoest::EstimatorId;

#[test]
fn golden_corpus_has_twenty_histograms_and_every_estimator() {
    let rows = common::load_golden();
    assert_eq!(rows.len(), 20);
    for row in &rows {
        assert_eq!(row.values.len(), EstimatorId::ALL.len());
    }
}

#[test]
fn every_estimator_matches_the_golden_corpus() {
    let bad = common::golden_mismatches();
    assert!(bad.is_empty(), "{} mismatches:\n{}", bad.len(), bad.join("\n"));
}

#[test]
fn degenerate_cells_match_literally() {
    for row in common::load_golden() {
        let h = row.histogram();
        for &(id, want) in &row.values {
            let got = infoest::entropy(&h, &row.spec(id)).unwrap();
            if want.is_nan() || want.is_infinite() {
                assert!(common::matches(got, want, 0.0), "{id} on {:?}: {got}", row.counts);
            }
        }
    }
}
