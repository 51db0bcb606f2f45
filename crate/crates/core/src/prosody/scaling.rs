//! Global/local prosody scaling.
//!
//! For each word `i` and each phoneme inside it:
//!
//! ```text
//! d' = d · G_d · σ_i        G_d, σ_i ∈ duration target (default [0.74, 1.34])
//! e' = e · G_e · ε_i        G_e, ε_i ∈ energy target   (default [0.5, 2])
//! p' = p + G_p + π_i        G_p + π_i ∈ [p_min, p_max]
//! ```

use super::mapping::ScalingRanges;
use super::plan::{MappedFactors, MappedScalingPlan, RawFactors, RawScalingPlan};
use super::track::{PitchRange, ProsodyTrack};
use super::ProsodyError;
use crate::scalar::Scalar;
use crate::warning::Warning;

/// A mapped plan together with every clamp that was needed to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedPlanOutcome<T> {
    pub plan: MappedScalingPlan<T>,
    pub warnings: Vec<Warning>,
}

/// Maps a raw plan into multiplicative factors and pitch offsets.
///
/// Duration and energy go through the fitted quadratic maps. Pitch is mapped
/// linearly; the global offset is fixed first and each local offset is then
/// clamped so the combined offset stays inside the pitch interval.
pub fn map_plan<T: Scalar>(
    raw: &RawScalingPlan<T>,
    pitch_range: &PitchRange<T>,
    ranges: &ScalingRanges<T>,
) -> Result<MappedPlanOutcome<T>, ProsodyError> {
    pitch_range.validate()?;
    ranges.validate()?;
    let duration_map = ranges.duration_map()?;
    let energy_map = ranges.energy_map()?;
    let span = pitch_range.span();
    // Zero offset stays admissible so a neutral plan is always the identity.
    let offset_lo = pitch_range.p_min.min(T::zero());
    let offset_hi = pitch_range.p_max.max(T::zero());

    let mut warnings = Vec::new();
    let mut map_triple = |prefix: &str, f: &RawFactors<T>| -> MappedFactors<T> {
        let d = duration_map.map(f.duration);
        let e = energy_map.map(f.energy);
        let p = ranges.pitch_offset(f.pitch, span);
        for (name, out, v) in [
            ("duration", d.clamped, f.duration),
            ("energy", e.clamped, f.energy),
            ("pitch", p.clamped, f.pitch),
        ] {
            if out {
                warnings.push(Warning::new(
                    format!("{prefix}.{name}"),
                    format!("raw value {v} outside the allowed range, clamped"),
                ));
            }
        }
        MappedFactors {
            duration: d.value,
            energy: e.value,
            pitch_offset: p.value,
        }
    };

    let global = map_triple("global", &raw.global);
    let mut locals: Vec<MappedFactors<T>> = raw
        .locals
        .iter()
        .enumerate()
        .map(|(i, w)| map_triple(&format!("words[{i}]"), &w.factors()))
        .collect();

    for (i, local) in locals.iter_mut().enumerate() {
        let combined = global.pitch_offset + local.pitch_offset;
        let limited = combined.clamp_to(offset_lo, offset_hi);
        if limited != combined {
            local.pitch_offset = residual(global.pitch_offset, limited, offset_lo, offset_hi);
            warnings.push(Warning::new(
                format!("words[{i}].pitch"),
                format!(
                    "combined pitch offset {combined} outside [{offset_lo}, {offset_hi}], clamped to {limited}"
                ),
            ));
        }
    }

    Ok(MappedPlanOutcome {
        plan: MappedScalingPlan { global, locals },
        warnings,
    })
}

/// `r` with `g + r` inside `[lo, hi]` after rounding, as close to `target - g` as the grid allows.
fn residual<T: Scalar>(g: T, target: T, lo: T, hi: T) -> T {
    let mut r = target - g;
    for _ in 0..8 {
        let s = g + r;
        let over = if s > hi {
            s - hi
        } else if s < lo {
            s - lo
        } else {
            break;
        };
        let ulp = T::epsilon() * g.abs().max(r.abs()).max(T::min_positive_value());
        r = r - if over.abs() < ulp { ulp.copysign(over) } else { over };
    }
    r
}

/// A freshly scaled track and any range notices raised while scaling it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTrack<T> {
    pub track: ProsodyTrack<T>,
    pub warnings: Vec<Warning>,
}

/// Applies a mapped plan to every phoneme of every word. The input is untouched.
pub fn apply_scaling<T: Scalar>(
    track: &ProsodyTrack<T>,
    plan: &MappedScalingPlan<T>,
) -> Result<ScaledTrack<T>, ProsodyError> {
    if plan.locals.len() != track.words.len() {
        return Err(ProsodyError::Alignment {
            utterance_id: track.utterance_id.clone(),
            expected: track.words.len(),
            found: plan.locals.len(),
        });
    }
    let mut out = track.clone();
    let mut warnings = Vec::new();
    let g = plan.global;
    for (span, local) in track.words.iter().zip(&plan.locals) {
        for idx in span.phonemes() {
            let ph = &mut out.phonemes[idx];
            ph.duration = ph.duration * g.duration * local.duration;
            ph.energy = ph.energy * g.energy * local.energy;
            ph.pitch = ph.pitch + g.pitch_offset + local.pitch_offset;
            if !track.pitch_range.contains(ph.pitch) {
                warnings.push(Warning::new(
                    format!("phonemes[{idx}].pitch"),
                    format!(
                        "scaled pitch {} leaves [{}, {}]",
                        ph.pitch, track.pitch_range.p_min, track.pitch_range.p_max
                    ),
                ));
            }
        }
    }
    Ok(ScaledTrack {
        track: out,
        warnings,
    })
}

/// Convenience: [`map_plan`] followed by [`apply_scaling`], warnings merged.
pub fn scale_track<T: Scalar>(
    track: &ProsodyTrack<T>,
    raw: &RawScalingPlan<T>,
    ranges: &ScalingRanges<T>,
) -> Result<ScaledTrack<T>, ProsodyError> {
    if raw.locals.len() != track.words.len() {
        return Err(ProsodyError::Alignment {
            utterance_id: track.utterance_id.clone(),
            expected: track.words.len(),
            found: raw.locals.len(),
        });
    }
    let mapped = map_plan(raw, &track.pitch_range, ranges)?;
    let mut scaled = apply_scaling(track, &mapped.plan)?;
    let mut warnings = mapped.warnings;
    warnings.append(&mut scaled.warnings);
    scaled.warnings = warnings;
    Ok(scaled)
}

/// Integer frame counts for a length regulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameExport {
    pub frames: Vec<u32>,
    pub total: u64,
}

/// Rounds each duration half-to-even with a floor of one frame.
pub fn export_durations<T: Scalar>(track: &ProsodyTrack<T>) -> FrameExport {
    let frames: Vec<u32> = track
        .phonemes
        .iter()
        .map(|p| {
            let r = p.duration.to_f64_lossy().round_ties_even();
            if r < 1.0 {
                1
            } else if r >= u32::MAX as f64 {
                u32::MAX
            } else {
                r as u32
            }
        })
        .collect();
    let total = frames.iter().map(|&f| f as u64).sum();
    FrameExport { frames, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prosody::{PhonemeProsody, WordFactors, WordSpan};

    fn track(durations: &[f64], pitch: f64, range: (f64, f64)) -> ProsodyTrack<f64> {
        let phonemes = durations
            .iter()
            .map(|&d| PhonemeProsody {
                symbol: "AA".into(),
                duration: d,
                energy: 1.5,
                pitch,
            })
            .collect();
        let words = (0..durations.len())
            .map(|i| WordSpan::new(format!("w{i}"), i, i))
            .collect();
        ProsodyTrack::new(
            "u",
            "",
            phonemes,
            words,
            PitchRange::new(range.0, range.1).unwrap(),
        )
        .unwrap()
    }

    fn raw(global: RawFactors<f64>, local: RawFactors<f64>, n: usize) -> RawScalingPlan<f64> {
        RawScalingPlan {
            global,
            locals: (0..n).map(|i| WordFactors::new(format!("w{i}"), local)).collect(),
            rationale: None,
        }
    }

    #[test]
    fn neutral_plan_maps_to_unit_factors() {
        let plan = RawScalingPlan::<f64>::neutral(&["a", "b"]);
        let out = map_plan(
            &plan,
            &PitchRange::new(-3.0, 3.0).unwrap(),
            &ScalingRanges::default(),
        )
        .unwrap();
        assert_eq!(out.plan, MappedScalingPlan::neutral(2));
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn global_energy_extreme() {
        let g = RawFactors { pitch: 0.0, energy: 5.0, duration: 0.0 };
        let out = map_plan(
            &raw(g, RawFactors::zero(), 1),
            &PitchRange::new(-3.0, 3.0).unwrap(),
            &ScalingRanges::default(),
        )
        .unwrap();
        assert!((out.plan.global.energy - 2.0).abs() < 1e-12);
        assert_eq!(out.plan.locals[0].energy, 1.0);
    }

    #[test]
    fn residual_keeps_rounded_sum_inside_bounds() {
        let mut x = 0.123_456_789f64;
        for _ in 0..10_000 {
            x = (x * 9301.0 + 0.4927).fract();
            let (g, lo, hi) = (x * 3.0 - 1.5, -0.35798364532517635, 2.4250837235124476);
            for target in [lo, hi] {
                let r = residual(g, target, lo, hi);
                assert!(g + r >= lo && g + r <= hi, "g={g} r={r}");
                assert!((g + r - target).abs() <= 4.0 * f64::EPSILON * g.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pitch_offsets_are_linear_then_clamped() {
        let r = PitchRange::new(-3.0, 3.0).unwrap();
        let g = RawFactors { pitch: 5.0, energy: 0.0, duration: 0.0 };
        let out = map_plan(&raw(g, RawFactors::zero(), 1), &r, &ScalingRanges::default()).unwrap();
        assert_eq!(out.plan.global.pitch_offset, 3.0);

        let l = RawFactors { pitch: 5.0, energy: 0.0, duration: 0.0 };
        let out = map_plan(&raw(g, l, 2), &r, &ScalingRanges::default()).unwrap();
        for local in &out.plan.locals {
            assert_eq!(out.plan.global.pitch_offset + local.pitch_offset, 3.0);
        }
        assert_eq!(out.warnings.len(), 2);
    }

    #[test]
    fn raw_values_out_of_range_warn() {
        let g = RawFactors { pitch: 0.0, energy: 9.0, duration: -3.0 };
        let out = map_plan(
            &raw(g, RawFactors::zero(), 1),
            &PitchRange::new(-1.0, 1.0).unwrap(),
            &ScalingRanges::default(),
        )
        .unwrap();
        assert_eq!(out.plan.global.energy, 2.0);
        assert!((out.plan.global.duration - 0.74).abs() < 1e-12);
        assert_eq!(out.warnings.len(), 2);
    }

    #[test]
    fn scaling_arithmetic() {
        let t = track(&[10.0], 0.4, (-3.0, 3.0));
        let plan = MappedScalingPlan {
            global: MappedFactors { duration: 1.2, energy: 1.0, pitch_offset: 0.8 },
            locals: vec![MappedFactors { duration: 1.1, energy: 1.0, pitch_offset: -0.3 }],
        };
        let out = apply_scaling(&t, &plan).unwrap().track;
        assert!((out.phonemes[0].duration - 13.2).abs() < 1e-12);
        assert!((out.phonemes[0].pitch - 0.9).abs() < 1e-12);
        // input untouched
        assert_eq!(t.phonemes[0].duration, 10.0);
    }

    #[test]
    fn local_factors_apply_to_all_phonemes_of_their_word() {
        let phonemes = (0..3)
            .map(|_| PhonemeProsody { symbol: "x".into(), duration: 2.0, energy: 1.0, pitch: 0.0 })
            .collect();
        let t = ProsodyTrack::new(
            "u",
            "ab c",
            phonemes,
            vec![WordSpan::new("ab", 0, 1), WordSpan::new("c", 2, 2)],
            PitchRange::new(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        let plan = MappedScalingPlan {
            global: MappedFactors::neutral(),
            locals: vec![
                MappedFactors { duration: 1.25, energy: 2.0, pitch_offset: 0.5 },
                MappedFactors::neutral(),
            ],
        };
        let out = apply_scaling(&t, &plan).unwrap().track;
        let d: Vec<f64> = out.phonemes.iter().map(|p| p.duration).collect();
        assert_eq!(d, vec![2.5, 2.5, 2.0]);
        assert_eq!(out.phonemes[1].energy, 2.0);
        assert_eq!(out.phonemes[2].pitch, 0.0);
    }

    #[test]
    fn misaligned_plan_is_rejected() {
        let t = track(&[1.0, 2.0], 0.0, (-1.0, 1.0));
        let err = apply_scaling(&t, &MappedScalingPlan::neutral(3)).unwrap_err();
        assert!(matches!(err, ProsodyError::Alignment { expected: 2, found: 3, .. }));
        let err = scale_track(&t, &RawScalingPlan::neutral(&["a"]), &ScalingRanges::default());
        assert!(err.is_err());
    }

    #[test]
    fn scaled_pitch_outside_range_warns_but_is_kept() {
        let t = track(&[1.0], 0.9, (-1.0, 1.0));
        let plan = MappedScalingPlan {
            global: MappedFactors { duration: 1.0, energy: 1.0, pitch_offset: 0.5 },
            locals: vec![MappedFactors::neutral()],
        };
        let out = apply_scaling(&t, &plan).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert!((out.track.phonemes[0].pitch - 1.4).abs() < 1e-12);
    }

    #[test]
    fn frame_export_rounding() {
        assert_eq!(export_durations(&track(&[2.5], 0.0, (-1.0, 1.0))).frames, vec![2]);
        assert_eq!(export_durations(&track(&[3.5], 0.0, (-1.0, 1.0))).frames, vec![4]);
        assert_eq!(export_durations(&track(&[0.2], 0.0, (-1.0, 1.0))).frames, vec![1]);
        let e = export_durations(&track(&[1.6, 2.4], 0.0, (-1.0, 1.0)));
        assert_eq!(e.frames, vec![2, 2]);
        assert_eq!(e.total, 4);
    }
}
