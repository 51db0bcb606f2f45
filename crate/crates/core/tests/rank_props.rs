mod common;

use common::oracles;
use emoprosody::formats;
use emoprosody::rank::{
    build_pairs, train_model, train_rank, Emotion, PairSet, RankConfig, RankParams,
};
use proptest::prelude::*;
use rand::Rng;

fn separable(seed: u64, dim: usize, n_hi: usize, n_lo: usize) -> (Vec<Vec<f64>>, PairSet) {
    let mut rng = common::rng(seed);
    let mut rows = Vec::new();
    for i in 0..n_hi + n_lo {
        let mut r: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        r[0] = if i < n_hi { rng.random_range(2.0..4.0) } else { rng.random_range(-2.0..0.0) };
        rows.push(r);
    }
    let ordered = (0..n_hi).flat_map(|h| (n_hi..n_hi + n_lo).map(move |l| (h, l))).collect();
    (rows, PairSet { ordered, similar: Vec::new() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn separable_pairs_are_all_ordered(seed in any::<u64>(), dim in 1usize..6) {
        let (rows, pairs) = separable(seed, dim, 6, 5);
        let fit = train_rank(&rows, &pairs, &RankParams { c: 1.0, tolerance: 1e-9, max_iter: 200 }).unwrap();
        let z = oracles::standardize(&rows);
        for &(hi, lo) in &pairs.ordered {
            let margin: f64 = z[hi].iter().zip(&z[lo]).zip(&fit.weights).map(|((a, b), w)| w * (a - b)).sum();
            prop_assert!(margin > 0.0);
        }
    }

    #[test]
    fn positive_rescaling_keeps_the_ranking(seed in any::<u64>(), lambda in 1e-3f64..1e3) {
        let mut rng = common::rng(seed);
        let corpus = common::synthetic_corpus(&mut rng, &["s"], &[Emotion::Happy], 6, 5);
        let model = train_model(&corpus, "s", Emotion::Happy, &RankConfig::default()).unwrap();
        let mut scaled = model.clone();
        for w in &mut scaled.weights {
            *w *= lambda;
        }
        let order = |m: &emoprosody::rank::RankModel<f64>| {
            let raw: Vec<f64> = corpus.iter().map(|u| m.raw_score(&u.features).unwrap()).collect();
            let mut idx: Vec<usize> = (0..raw.len()).collect();
            idx.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]).then(a.cmp(&b)));
            idx
        };
        prop_assert_eq!(order(&model), order(&scaled));
    }

    #[test]
    fn scores_lie_in_unit_interval_and_follow_raw(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let corpus = common::synthetic_corpus(&mut rng, &["s"], &[Emotion::Sad], 5, 4);
        let model = train_model(&corpus, "s", Emotion::Sad, &RankConfig::default()).unwrap();
        let mut probes = corpus.iter().map(|u| u.features.clone()).collect::<Vec<_>>();
        for _ in 0..20 {
            probes.push((0..4).map(|_| rng.random_range(-20.0..20.0)).collect());
        }
        let mut pts: Vec<(f64, f64)> = probes
            .iter()
            .map(|x| (model.raw_score(x).unwrap(), model.score_features(x).unwrap()))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pts.windows(2) {
            prop_assert!(w[0].1 <= w[1].1);
        }
        prop_assert!(pts.iter().all(|&(_, s)| (0.0..=1.0).contains(&s)));
    }

    #[test]
    fn pair_building_is_deterministic(seed in any::<u64>(), limit in 1usize..40) {
        let corpus = common::synthetic_corpus(&mut common::rng(3), &["s"], &[Emotion::Angry], 7, 2);
        let a = build_pairs(&corpus, "s", Emotion::Angry, limit, seed).unwrap();
        let b = build_pairs(&corpus, "s", Emotion::Angry, limit, seed).unwrap();
        prop_assert!(a.ordered.len() <= limit && a.similar.len() <= limit);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn objective_matches_grid_search_in_one_and_two_dimensions() {
    for (dim, seed) in [(1, 1u64), (1, 2), (2, 3), (2, 4)] {
        let mut rng = common::rng(seed);
        let rows: Vec<Vec<f64>> = (0..8).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let ordered = vec![(0, 1), (2, 3), (4, 5), (0, 5), (6, 1)];
        let similar = vec![(1, 3), (6, 7)];
        let pairs = PairSet { ordered: ordered.clone(), similar: similar.clone() };
        let c = 0.1;
        let fit = train_rank(&rows, &pairs, &RankParams { c, tolerance: 1e-9, max_iter: 200 }).unwrap();
        let z = oracles::standardize(&rows);
        let f = |w: &[f64]| oracles::rank_objective(&z, &ordered, &similar, c, w);
        let radius = (2.0 * c * ordered.len() as f64).sqrt();
        let (grid, _) = oracles::grid_minimum(dim, radius, f);
        let solver = f(&fit.weights);
        assert!((solver - grid).abs() <= 1e-3 * grid, "dim {dim}: solver {solver} vs grid {grid}");
        assert!((fit.objective - solver).abs() <= 1e-9 * solver);
    }
}

#[test]
fn training_is_byte_deterministic() {
    let corpus = common::synthetic_corpus(&mut common::rng(11), &["a"], &[Emotion::Surprise], 10, 16);
    let cfg = RankConfig { pair_limit: 30, seed: 5, ..RankConfig::default() };
    let dir = tempfile::tempdir().unwrap();
    let bytes: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let m = train_model(&corpus, "a", Emotion::Surprise, &cfg).unwrap();
            let p = dir.path().join(format!("m{i}.json"));
            formats::write_model(&p, &m).unwrap();
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn informative_dimension_dominates() {
    let mut rng = common::rng(21);
    let mut rows = Vec::new();
    for i in 0..20 {
        let level = if i < 10 { 1.0 + i as f64 * 0.1 } else { 0.0 };
        rows.push(vec![level + rng.random_range(-0.05..0.05), rng.random_range(-1.0..1.0)]);
    }
    let ordered = (0..10).flat_map(|h| (10..20).map(move |l| (h, l))).collect();
    let pairs = PairSet { ordered, similar: Vec::new() };
    let fit = train_rank(&rows, &pairs, &RankParams::default()).unwrap();
    assert!(fit.weights[0].abs() > 10.0 * fit.weights[1].abs(), "{:?}", fit.weights);
    assert!(fit.training_scores[..10].iter().all(|&s| fit.training_scores[10..].iter().all(|&n| s > n)));
}
