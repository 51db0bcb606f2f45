mod common;

use emoprosody::prosody::{
    apply_scaling, map_plan, scale_track, Interval, MappedScalingPlan, QuadraticMap, RawFactors,
    RawScalingPlan, ScalingRanges,
};
use proptest::prelude::*;

fn ranges() -> ScalingRanges<f64> {
    ScalingRanges::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn neutral_plan_is_identity(seed in any::<u64>()) {
        let track = common::random_track(&mut common::rng(seed), "u");
        let plan = RawScalingPlan::neutral(&track.word_strings());
        let out = scale_track(&track, &plan, &ranges()).unwrap();
        prop_assert_eq!(&out.track, &track);
        prop_assert!(out.warnings.is_empty());
        let direct = apply_scaling(&track, &MappedScalingPlan::neutral(track.words.len())).unwrap();
        prop_assert_eq!(direct.track, track);
    }

    #[test]
    fn mapped_factors_stay_in_bounds(seed in any::<u64>(), spread in 0.0f64..3.0) {
        let mut rng = common::rng(seed);
        let track = common::random_track(&mut rng, "u");
        let plan = common::random_plan(&mut rng, &track.word_strings(), spread);
        let r = ranges();
        let mapped = map_plan(&plan, &track.pitch_range, &r).unwrap().plan;
        let lo = track.pitch_range.p_min.min(0.0);
        let hi = track.pitch_range.p_max.max(0.0);
        for f in std::iter::once(&mapped.global).chain(&mapped.locals) {
            prop_assert!((0.74..=1.34).contains(&f.duration), "duration {}", f.duration);
            prop_assert!((0.5..=2.0).contains(&f.energy), "energy {}", f.energy);
        }
        for l in &mapped.locals {
            let combined = mapped.global.pitch_offset + l.pitch_offset;
            prop_assert!(combined >= lo - 1e-12 && combined <= hi + 1e-12, "offset {combined}");
        }
    }

    #[test]
    fn ratio_law(d in 1e-3f64..1e4, g in -2.0f64..2.0, s in -2.0f64..2.0) {
        let mut track = common::random_track(&mut common::rng(1), "u");
        track.phonemes[0].duration = d;
        let mut plan = RawScalingPlan::neutral(&track.word_strings());
        plan.global.duration = g;
        plan.locals[0].duration = s;
        let mapped = map_plan(&plan, &track.pitch_range, &ranges()).unwrap().plan;
        let out = apply_scaling(&track, &mapped).unwrap().track;
        let ratio = out.phonemes[0].duration / d;
        let expected = mapped.global.duration * mapped.locals[0].duration;
        prop_assert!((ratio - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn global_then_local_equals_combined(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let track = common::random_track(&mut rng, "u");
        let plan = common::random_plan(&mut rng, &track.word_strings(), 0.9);
        let r = ranges();
        let combined = scale_track(&track, &plan, &r).unwrap().track;
        let first = scale_track(&track, &plan.clone().global_only(), &r).unwrap();
        let second = scale_track(&first.track, &plan.clone().local_only(), &r).unwrap();
        let staged_warnings: Vec<_> = first.warnings.iter().chain(&second.warnings).cloned().collect();
        let second = second.track;
        for (a, b) in combined.phonemes.iter().zip(&second.phonemes) {
            prop_assert!((a.duration - b.duration).abs() <= 1e-12 * a.duration.abs());
            prop_assert!((a.energy - b.energy).abs() <= 1e-12 * a.energy.abs());
        }
        let mapped = map_plan(&plan, &track.pitch_range, &r).unwrap();
        let pitch_clamped = mapped.warnings.iter().chain(&staged_warnings).any(|w| w.field.ends_with(".pitch"));
        if !pitch_clamped {
            for ((a, b), orig) in combined.phonemes.iter().zip(&second.phonemes).zip(&track.phonemes) {
                let da = a.pitch - orig.pitch;
                let db = b.pitch - orig.pitch;
                prop_assert!((da - db).abs() <= 1e-12 * (1.0 + orig.pitch.abs()));
            }
        }
    }

    #[test]
    fn local_only_leaves_global_neutral(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let track = common::random_track(&mut rng, "u");
        let plan = common::random_plan(&mut rng, &track.word_strings(), 1.0).local_only();
        let mapped = map_plan(&plan, &track.pitch_range, &ranges()).unwrap().plan;
        prop_assert_eq!(mapped.global.duration, 1.0);
        prop_assert_eq!(mapped.global.energy, 1.0);
        prop_assert_eq!(mapped.global.pitch_offset, 0.0);
    }
}

#[test]
fn quadratic_maps_are_strictly_increasing_on_a_dense_grid() {
    let r = ranges();
    for map in [r.duration_map().unwrap(), r.energy_map().unwrap()] {
        let n = 100_000;
        let (lo, hi) = (map.raw.lo, map.raw.hi);
        let mut prev = map.map(lo).value;
        for i in 1..=n {
            let v = lo + (hi - lo) * i as f64 / n as f64;
            let y = map.map(v).value;
            assert!(y > prev, "not increasing at {v}");
            prev = y;
        }
    }
}

#[test]
fn non_monotone_map_is_rejected() {
    let err = QuadraticMap::fit(Interval::new(-5.0, 5.0).unwrap(), Interval::new(0.9, 5.0).unwrap());
    assert!(err.is_err());
}

#[test]
fn global_energy_plus_five_doubles_energy() {
    let track = common::random_track(&mut common::rng(3), "u");
    let mut plan = RawScalingPlan::neutral(&track.word_strings());
    plan.global = RawFactors { pitch: 0.0, energy: 5.0, duration: 0.0 };
    let out = scale_track(&track, &plan, &ranges()).unwrap().track;
    for (a, b) in out.phonemes.iter().zip(&track.phonemes) {
        assert_eq!(a.energy, 2.0 * b.energy);
        assert_eq!(a.duration, b.duration);
    }
}
