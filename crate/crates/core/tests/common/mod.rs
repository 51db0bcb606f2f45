//! Shared generators and fixtures for the integration tests.
#![allow(dead_code)]

pub mod oracles;

use std::path::{Path, PathBuf};

use emoprosody::eval::CepstraSequence;
use emoprosody::formats::{self, Transcript};
use emoprosody::prosody::{PhonemeProsody, PitchRange, ProsodyTrack, RawFactors, RawScalingPlan, WordFactors, WordSpan};
use emoprosody::rank::{AcousticFeatureVector, Emotion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const VOCAB: &[&str] = &["the", "cat", "sat", "on", "a", "warm", "mat", "today", "why", "now"];

/// A valid track with 1–6 words of 1–4 phonemes each.
pub fn random_track(rng: &mut impl Rng, id: &str) -> ProsodyTrack<f64> {
    let n_words = rng.random_range(1..=6);
    let p_min = rng.random_range(-3.0..-0.2);
    let p_max = rng.random_range(0.2..3.0);
    let mut phonemes = Vec::new();
    let mut words = Vec::new();
    let mut text = Vec::new();
    for _ in 0..n_words {
        let w = VOCAB[rng.random_range(0..VOCAB.len())];
        let first = phonemes.len();
        for k in 0..rng.random_range(1..=4) {
            phonemes.push(PhonemeProsody {
                symbol: format!("{}{k}", &w[..1]),
                duration: rng.random_range(0.2..25.0),
                energy: rng.random_range(0.05..4.0),
                pitch: rng.random_range(p_min..p_max),
            });
        }
        words.push(WordSpan::new(w, first, phonemes.len() - 1));
        text.push(w);
    }
    ProsodyTrack::new(id, text.join(" "), phonemes, words, PitchRange::new(p_min, p_max).unwrap()).unwrap()
}

/// Raw values drawn from a range wider than the admissible one.
pub fn random_plan(rng: &mut impl Rng, words: &[String], spread: f64) -> RawScalingPlan<f64> {
    let triple = |rng: &mut dyn rand::RngCore| RawFactors {
        pitch: rng.random_range(-5.0 * spread..=5.0 * spread),
        energy: rng.random_range(-5.0 * spread..=5.0 * spread),
        duration: rng.random_range(-2.0 * spread..=2.0 * spread),
    };
    let global = triple(rng);
    let locals = words.iter().map(|w| WordFactors::new(w.clone(), triple(rng))).collect();
    RawScalingPlan {
        global,
        locals,
        rationale: None,
    }
}

/// `dim`-wide features where dimension 0 grows with intensity, the rest is
/// noise. Emotional utterances sit above neutral ones on dimension 0.
pub fn synthetic_corpus(
    rng: &mut impl Rng,
    speakers: &[&str],
    emotions: &[Emotion],
    per_class: usize,
    dim: usize,
) -> Vec<AcousticFeatureVector<f64>> {
    let mut out = Vec::new();
    for spk in speakers {
        let mut classes = vec![Emotion::Neutral];
        classes.extend_from_slice(emotions);
        for (ci, &emo) in classes.iter().enumerate() {
            for k in 0..per_class {
                let level = if emo == Emotion::Neutral { 0.0 } else { 1.0 + k as f64 / per_class as f64 };
                let mut features: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                features[0] = 3.0 * level + rng.random_range(-0.1..0.1);
                if dim > 1 {
                    features[1] += ci as f64 * 0.01;
                }
                out.push(AcousticFeatureVector::new(
                    format!("{spk}_{}_{k:03}", emo.as_str().to_lowercase()),
                    *spk,
                    emo,
                    features,
                ));
            }
        }
    }
    out
}

pub fn cepstra(rng: &mut impl Rng, id: &str, frames: usize, order: usize) -> CepstraSequence<f64> {
    let rows = (0..frames).map(|_| (0..order).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    CepstraSequence::new(id, rows).unwrap()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_emoprosody")
}

/// Runs the binary with `args` in `cwd`, returning (exit code, stderr).
pub fn run_cli(cwd: &Path, args: &[&str]) -> (i32, String) {
    let out = std::process::Command::new(bin())
        .args(args)
        .current_dir(cwd)
        .env("EMOPROSODY_LOG", "warn")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

/// Paths of the end-to-end fixture corpus.
pub struct Fixture {
    pub root: PathBuf,
    pub features: PathBuf,
    pub tracks: PathBuf,
    pub replay: PathBuf,
    pub reference_text: PathBuf,
    pub hypothesis_text: PathBuf,
    pub reference_cep: PathBuf,
    pub synthesized_cep: PathBuf,
}

/// 3 speakers × 2 emotions plus neutral, 384-dim features, one track per
/// emotional utterance, a replay plan file, transcripts and cepstra.
pub fn write_fixture(root: &Path) -> Fixture {
    let mut r = rng(7);
    let speakers = ["spk1", "spk2", "spk3"];
    let corpus = synthetic_corpus(&mut r, &speakers, &[Emotion::Angry, Emotion::Sad], 8, 384);
    let f = Fixture {
        root: root.to_path_buf(),
        features: root.join("features.csv"),
        tracks: root.join("tracks.jsonl"),
        replay: root.join("replay.jsonl"),
        reference_text: root.join("ref.csv"),
        hypothesis_text: root.join("hyp.csv"),
        reference_cep: root.join("cep_ref"),
        synthesized_cep: root.join("cep_syn"),
    };
    formats::write_features(&f.features, &corpus).unwrap();

    let emotional: Vec<_> = corpus.iter().filter(|u| u.emotion != Emotion::Neutral).collect();
    let tracks: Vec<_> = emotional.iter().map(|u| random_track(&mut r, &u.utterance_id)).collect();
    formats::write_tracks(&f.tracks, &tracks).unwrap();

    let plans: Vec<_> = tracks
        .iter()
        .map(|t| formats::PlanRecord {
            utterance_id: t.utterance_id.clone(),
            degraded: false,
            attempts: 1,
            plan: random_plan(&mut r, &t.word_strings(), 1.0),
        })
        .collect();
    formats::write_plans(&f.replay, &plans).unwrap();

    let mut refs = Vec::new();
    let mut hyps = Vec::new();
    for t in &tracks {
        refs.push(Transcript { utterance_id: t.utterance_id.clone(), text: t.text.clone() });
        let mut words: Vec<&str> = t.text.split(' ').collect();
        if r.random_bool(0.5) {
            words[0] = "uh";
        }
        hyps.push(Transcript { utterance_id: t.utterance_id.clone(), text: words.join(" ") });
    }
    write_transcripts(&f.reference_text, &refs);
    write_transcripts(&f.hypothesis_text, &hyps);

    for t in tracks.iter().take(6) {
        let a = cepstra(&mut r, &t.utterance_id, 12, 13);
        let b = cepstra(&mut r, &t.utterance_id, 10, 13);
        formats::write_cepstra_bin(&f.reference_cep.join(format!("{}.bin", t.utterance_id)), &a).unwrap();
        formats::write_cepstra_csv(&f.synthesized_cep.join(format!("{}.csv", t.utterance_id)), &b).unwrap();
    }
    f
}

pub fn write_transcripts(path: &Path, rows: &[Transcript]) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["utterance_id", "text"]).unwrap();
    for t in rows {
        w.write_record([&t.utterance_id, &t.text]).unwrap();
    }
    w.flush().unwrap();
}

/// Reads every regular file below `dir` as (relative path, bytes), sorted.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                let rel = p.strip_prefix(base).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
