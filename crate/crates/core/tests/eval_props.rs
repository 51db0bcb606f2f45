mod common;

use common::oracles;
use emoprosody::eval::{
    classification_accuracy, edit_distance, mcd, mcd_scale, pir_confusion, wer, CepstraSequence, McdConfig,
    PirResponse,
};
use emoprosody::rank::IntensityLevel;
use proptest::prelude::*;

fn tokens() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..9)
}

fn frames(max_t: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, k), 1..=max_t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn edit_distance_is_a_metric(a in tokens(), b in tokens(), c in tokens()) {
        let ab = edit_distance(&a, &b);
        prop_assert_eq!(ab, oracles::levenshtein(&a, &b));
        prop_assert_eq!(ab, edit_distance(&b, &a));
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
    }

    #[test]
    fn wer_is_zero_on_itself(words in prop::collection::vec("[a-z]{1,5}", 1..8)) {
        let s = words.join(" ");
        prop_assert_eq!(wer(&s, &s).unwrap().rate, 0.0);
    }

    #[test]
    fn wer_is_invariant_to_duplication(
        r in prop::collection::vec("[a-m]{1,3}", 1..6),
        h in prop::collection::vec("[n-z]{1,3}", 0..6),
        k in 1usize..5,
    ) {
        let once = wer(&r.join(" "), &h.join(" ")).unwrap().rate;
        let rep = |v: &Vec<String>| vec![v.join(" "); k].join(" ");
        let many = wer(&rep(&r), &rep(&h)).unwrap().rate;
        prop_assert!((once - many).abs() < 1e-12);
    }

    #[test]
    fn dtw_matches_enumeration(a in frames(5, 3), b in frames(5, 3), exclude in any::<bool>()) {
        let sa = CepstraSequence::new("a", a.clone()).unwrap();
        let sb = CepstraSequence::new("b", b.clone()).unwrap();
        let res = mcd(&sa, &sb, McdConfig { exclude_c0: exclude, dtw: true }).unwrap();
        let brute = oracles::dtw_brute(&a, &b, usize::from(exclude));
        prop_assert!((res.total_cost - brute).abs() <= 1e-9 * (1.0 + brute));
        prop_assert_eq!(res.path.first().copied(), Some((0, 0)));
        prop_assert_eq!(res.path.last().copied(), Some((a.len() - 1, b.len() - 1)));
        for w in res.path.windows(2) {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            prop_assert!(matches!((di, dj), (1, 0) | (0, 1) | (1, 1)));
        }
        prop_assert!(res.mcd >= 0.0);
        let expected = mcd_scale::<f64>() * res.total_cost / res.path.len() as f64;
        prop_assert!((res.mcd - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn mcd_of_self_is_zero(a in frames(8, 5)) {
        let s = CepstraSequence::new("a", a).unwrap();
        prop_assert_eq!(mcd(&s, &s, McdConfig::default()).unwrap().mcd, 0.0);
    }

    #[test]
    fn confusion_conserves_counts(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..60)) {
        let responses: Vec<PirResponse> = pairs
            .iter()
            .map(|&(a, p)| PirResponse {
                rater_id: "r".into(),
                utterance_id: "u".into(),
                annotated: IntensityLevel::ALL[a],
                perceived: IntensityLevel::ALL[p],
            })
            .collect();
        let m = pir_confusion(&responses).unwrap();
        prop_assert_eq!(m.total() as usize, responses.len());
        let acc = m.accuracy();
        prop_assert!((0.0..=1.0).contains(&acc));
        let correct = pairs.iter().filter(|(a, p)| a == p).count();
        prop_assert_eq!(acc, correct as f64 / pairs.len() as f64);
    }

    #[test]
    fn accuracy_is_a_fraction(pred in prop::collection::vec(0u8..3, 1..50)) {
        let truth: Vec<u8> = pred.iter().map(|p| (p + 1) % 3).collect();
        prop_assert_eq!(classification_accuracy(&pred, &pred).unwrap(), 1.0);
        prop_assert_eq!(classification_accuracy(&pred, &truth).unwrap(), 0.0);
    }
}

#[test]
fn single_frame_closed_form() {
    for delta in [1e-3f64, 0.25, 1.0, -2.5] {
        let a = CepstraSequence::new("a", vec![vec![0.3, 1.0, -1.0]]).unwrap();
        let b = CepstraSequence::new("b", vec![vec![0.3, 1.0 + delta, -1.0]]).unwrap();
        let got = mcd(&a, &b, McdConfig::default()).unwrap().mcd;
        let expected = 10.0 / std::f64::consts::LN_10 * 2f64.sqrt() * delta.abs();
        assert!((got - expected).abs() <= 1e-9, "{got} vs {expected}");
    }
}

#[test]
fn duplicated_frame_is_absorbed() {
    let a = CepstraSequence::new("a", vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
    let b = CepstraSequence::new("b", vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
    assert_eq!(mcd(&a, &b, McdConfig::default()).unwrap().mcd, 0.0);
}

#[test]
fn wer_examples() {
    assert!((wer("a b c", "a x c").unwrap().rate - 1.0 / 3.0).abs() < 1e-15);
    assert!(wer("a b", "x y z w").unwrap().rate > 1.0);
    assert!(wer("", "a").is_err());
}
