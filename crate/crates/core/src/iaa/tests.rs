use proptest::prelude::*;

use super::*;
use crate::model::ScoreCategory::{self, *};

/// Direct K x K double loop over proportions, no shortcuts.
fn brute_weighted(pairs: &[(ScoreCategory, ScoreCategory)], quadratic: bool) -> Option<f64> {
    let k = 6usize;
    let n = pairs.len() as f64;
    let mut o = [[0.0f64; 6]; 6];
    for (a, b) in pairs {
        o[a.index()][b.index()] += 1.0 / n;
    }
    let row: Vec<f64> = (0..k).map(|i| (0..k).map(|j| o[i][j]).sum()).collect();
    let col: Vec<f64> = (0..k).map(|j| (0..k).map(|i| o[i][j]).sum()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let d = (i as f64 - j as f64).abs() / (k - 1) as f64;
            let w = if quadratic { d * d } else { d };
            num += w * o[i][j];
            den += w * row[i] * col[j];
        }
    }
    (den > 1e-12).then(|| 1.0 - num / den)
}

fn brute_kappa(pairs: &[(ScoreCategory, ScoreCategory)]) -> Option<f64> {
    let n = pairs.len() as f64;
    let mut o = [[0.0f64; 2]; 2];
    for (a, b) in pairs {
        o[usize::from(a.is_correct())][usize::from(b.is_correct())] += 1.0 / n;
    }
    let po = o[0][0] + o[1][1];
    let pe = (o[0][0] + o[0][1]) * (o[0][0] + o[1][0]) + (o[1][0] + o[1][1]) * (o[0][1] + o[1][1]);
    (1.0 - pe > 1e-12).then(|| (po - pe) / (1.0 - pe))
}

fn ps(v: &[(ScoreCategory, ScoreCategory)]) -> PairedScores {
    PairedScores::new(v.to_vec())
}

#[test]
fn perfect_agreement_anchors() {
    let p = ps(&[
        (Explicate, Explicate),
        (Different, Different),
        (Related, Related),
        (General, General),
    ]);
    assert_eq!(cohen_kappa_thresholded(&p).unwrap(), 1.0);
    assert_eq!(weighted_kappa(&p, Weighting::Linear).unwrap(), 1.0);
    assert_eq!(weighted_kappa(&p, Weighting::Quadratic).unwrap(), 1.0);
    assert_eq!(score_error(&p, ErrorMetric::Mae).unwrap(), 0.0);
    assert_eq!(score_error(&p, ErrorMetric::Rmse).unwrap(), 0.0);
}

#[test]
fn hand_computed_two_by_two_is_zero() {
    // One cell of each: po = 0.5, both marginals 0.5/0.5, pe = 0.5.
    let p = ps(&[
        (Explicate, Explicate),
        (Explicate, Different),
        (Different, Explicate),
        (Different, Different),
    ]);
    assert_eq!(cohen_kappa_thresholded(&p).unwrap(), 0.0);
}

#[test]
fn error_example() {
    // |100-80| = 20 and 0 -> MAE 10, RMSE sqrt(200)
    let p = ps(&[(Explicate, General), (Referral, Referral)]);
    assert_eq!(score_error(&p, ErrorMetric::Mae).unwrap(), 10.0);
    assert!((score_error(&p, ErrorMetric::Rmse).unwrap() - 200f64.sqrt()).abs() < 1e-12);
}

#[test]
fn maximal_disagreement_on_both_ends() {
    let p = ps(&[(Explicate, Different), (Different, Explicate)]);
    assert_eq!(cohen_kappa_thresholded(&p).unwrap(), -1.0);
    assert_eq!(weighted_kappa(&p, Weighting::Quadratic).unwrap(), -1.0);
    assert_eq!(score_error(&p, ErrorMetric::Mae).unwrap(), 99.0);
}

#[test]
fn empty_input_is_an_error() {
    let p = PairedScores::default();
    assert_eq!(cohen_kappa_thresholded(&p), Err(IaaError::Empty));
    assert_eq!(weighted_kappa(&p, Weighting::Linear), Err(IaaError::Empty));
    assert_eq!(score_error(&p, ErrorMetric::Mae), Err(IaaError::Empty));
}

#[test]
fn degenerate_marginals() {
    // Everyone agrees on one category: kappa is defined as 1.
    let same = ps(&[(General, General), (General, General)]);
    assert_eq!(cohen_kappa_thresholded(&same).unwrap(), 1.0);
    assert_eq!(weighted_kappa(&same, Weighting::Linear).unwrap(), 1.0);

    // After binarizing, both are always "correct" but differ in rank: Cohen
    // is degenerate-but-agreeing, the weighted kappa is well defined.
    let p = ps(&[(Explicate, Referral), (General, General)]);
    assert_eq!(cohen_kappa_thresholded(&p).unwrap(), 1.0);
    let lwk = weighted_kappa(&p, Weighting::Linear).unwrap();
    assert!((lwk - brute_weighted(&p.0, false).unwrap()).abs() < 1e-12);
}

#[test]
fn contingency_table_marginals() {
    let p = ps(&[
        (Explicate, General),
        (Explicate, Explicate),
        (Different, General),
    ]);
    let t = ContingencyTable::from_scores(&p);
    assert_eq!(t.n, 3);
    assert_eq!(t.row_totals[Explicate.index()], 2);
    assert_eq!(t.col_totals[General.index()], 2);
    assert!((t.expected[Explicate.index()][General.index()] - 4.0 / 3.0).abs() < 1e-12);
    let b = ContingencyTable::binarized(&p);
    assert_eq!(b.observed, vec![vec![0, 1], vec![0, 2]]);
}

fn category() -> impl Strategy<Value = ScoreCategory> {
    (0usize..6).prop_map(|i| ScoreCategory::from_index(i).unwrap())
}

fn paired(max: usize) -> impl Strategy<Value = Vec<(ScoreCategory, ScoreCategory)>> {
    prop::collection::vec((category(), category()), 1..=max)
}

proptest! {
    #[test]
    fn closed_forms_match_double_loop(v in paired(50)) {
        let p = ps(&v);
        for (quadratic, w) in [(false, Weighting::Linear), (true, Weighting::Quadratic)] {
            match (weighted_kappa(&p, w), brute_weighted(&v, quadratic)) {
                (Ok(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}"),
                (Ok(a), None) => prop_assert_eq!(a, 1.0),
                (Err(IaaError::DegenerateMarginals), None) => {}
                (got, want) => prop_assert!(false, "{got:?} vs {want:?}"),
            }
        }
        match (cohen_kappa_thresholded(&p), brute_kappa(&v)) {
            (Ok(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9),
            (Ok(a), None) => prop_assert_eq!(a, 1.0),
            (Err(IaaError::DegenerateMarginals), None) => {}
            (got, want) => prop_assert!(false, "{got:?} vs {want:?}"),
        }
    }

    #[test]
    fn metrics_are_symmetric(v in paired(40)) {
        let p = ps(&v);
        let q = p.swapped();
        prop_assert_eq!(cohen_kappa_thresholded(&p).ok(), cohen_kappa_thresholded(&q).ok());
        for w in [Weighting::Linear, Weighting::Quadratic] {
            match (weighted_kappa(&p, w), weighted_kappa(&q, w)) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
            }
        }
        prop_assert_eq!(score_error(&p, ErrorMetric::Mae).unwrap(), score_error(&q, ErrorMetric::Mae).unwrap());
    }

    #[test]
    fn kappas_are_bounded_and_rmse_dominates_mae(v in paired(40)) {
        let p = ps(&v);
        for r in [
            cohen_kappa_thresholded(&p),
            weighted_kappa(&p, Weighting::Linear),
            weighted_kappa(&p, Weighting::Quadratic),
        ]
        .into_iter()
        .flatten()
        {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        }
        let mae = score_error(&p, ErrorMetric::Mae).unwrap();
        let rmse = score_error(&p, ErrorMetric::Rmse).unwrap();
        prop_assert!(rmse + 1e-9 >= mae);
        prop_assert!((0.0..=99.0).contains(&mae));
    }

    #[test]
    fn identical_annotations_agree_perfectly(v in prop::collection::vec(category(), 1..40)) {
        let p: PairedScores = v.iter().map(|&c| (c, c)).collect();
        prop_assert_eq!(cohen_kappa_thresholded(&p).unwrap(), 1.0);
        prop_assert_eq!(weighted_kappa(&p, Weighting::Linear).unwrap(), 1.0);
        prop_assert_eq!(weighted_kappa(&p, Weighting::Quadratic).unwrap(), 1.0);
        prop_assert_eq!(score_error(&p, ErrorMetric::Rmse).unwrap(), 0.0);
    }
}

mod report {
    use chrono::Utc;

    use super::super::*;
    use crate::model::{ScoreCategory, ScoredSenseAnnotation};

    fn ann(
        who: &str,
        sent: &str,
        pos: usize,
        sense: &str,
        inv: &str,
        c: ScoreCategory,
    ) -> ScoredSenseAnnotation {
        ScoredSenseAnnotation {
            sentence_id: sent.into(),
            token_position: pos,
            sense_id: sense.into(),
            inventory_id: inv.into(),
            category: c,
            annotator_id: who.into(),
            timestamp: Utc::now(),
        }
    }

    #[test]
    fn pairing_joins_on_token_and_sense_and_counts_leftovers() {
        use ScoreCategory::*;
        let a = vec![
            ann("a1", "s1", 0, "x1", "m", Explicate),
            ann("a1", "s1", 0, "x2", "m", Different),
            ann("a1", "s1", 1, "y1", "m", General),
            ann("a2", "s1", 0, "x1", "m", General),
            ann("a2", "s1", 0, "x2", "m", Different),
            ann("a2", "s2", 0, "z1", "m", General),
            ann("a2", "s1", 0, "x1", "g", General),
        ];
        let p = pair_scores(&a, &"a1".into(), &"a2".into(), &"m".into());
        assert_eq!(
            p.scores.0,
            vec![(Explicate, General), (Different, Different)]
        );
        assert_eq!((p.unpaired_a, p.unpaired_b), (1, 1));
        assert_eq!(annotator_pairs(&a), vec![("a1".into(), "a2".into())]);
    }

    #[test]
    fn summary_uses_population_std() {
        use ScoreCategory::*;
        // pair (a1,a2) agrees fully; pair (a1,a3) has MAE 20
        let mut a = Vec::new();
        for (i, c) in [Explicate, Different, Related, General]
            .into_iter()
            .enumerate()
        {
            a.push(ann("a1", "s", i, "x", "m", c));
            a.push(ann("a2", "s", i, "x", "m", c));
        }
        let a3 = [General, Different, Related, Explicate];
        for (i, c) in a3.into_iter().enumerate() {
            a.push(ann("a3", "s", i, "x", "m", c));
        }
        let pairs = annotator_pairs(&a);
        assert_eq!(pairs.len(), 3);
        let r = iaa_report(&a, &pairs[..2], &["m".into()]).unwrap();
        let inv = &r.inventories[&crate::model::InventoryId::new("m")];
        assert_eq!(inv.pairs[0].metrics.mae, 0.0);
        assert_eq!(inv.pairs[1].metrics.mae, 10.0);
        assert_eq!(inv.summary.mean.mae, 5.0);
        assert_eq!(inv.summary.std.mae, 5.0);
    }

    #[test]
    fn no_pairs_is_an_error() {
        assert_eq!(iaa_report(&[], &[], &["m".into()]), Err(IaaError::NoPairs));
    }
}
