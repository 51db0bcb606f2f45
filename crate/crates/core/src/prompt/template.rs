use serde::{Deserialize, Serialize};

use super::request::{ControlMode, PromptRequest};
use crate::prosody::Interval;

pub const PROMPT_TEMPLATE_VERSION: &str = "v1";

const SYSTEM_TEMPLATE: &str = include_str!("../../assets/prompt_system_v1.txt");
const USER_TEMPLATE: &str = include_str!("../../assets/prompt_user_v1.txt");

const LOCAL_ONLY_INSTRUCTION: &str = "MODE: LOCAL ONLY\n\
The global tone is fixed. The \"global\" object MUST be all zero: \
{\"pitch\": 0, \"energy\": 0, \"duration\": 0}. Express the emotion through the word-level factors only.\n";

const GLOBAL_AND_LOCAL_INSTRUCTION: &str = "MODE: GLOBAL AND LOCAL\n\
Set the global factors first, then the word-level factors as refinements on top of them.\n";

/// Ranges the language model is asked to answer in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawRanges {
    pub pitch: Interval<f64>,
    pub energy: Interval<f64>,
    pub duration: Interval<f64>,
}

impl Default for RawRanges {
    fn default() -> Self {
        Self {
            pitch: Interval { lo: -5.0, hi: 5.0 },
            energy: Interval { lo: -5.0, hi: 5.0 },
            duration: Interval { lo: -2.0, hi: 2.0 },
        }
    }
}

impl From<&crate::prosody::ScalingRanges<f64>> for RawRanges {
    fn from(r: &crate::prosody::ScalingRanges<f64>) -> Self {
        Self {
            pitch: r.pitch_raw,
            energy: r.energy_raw,
            duration: r.duration_raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: "system".into(), content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: "user".into(), content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: "assistant".into(), content: content.into() }
    }
}

pub fn system_prompt() -> &'static str {
    SYSTEM_TEMPLATE.trim_end()
}

/// Renders the user prompt for `req` with the default raw ranges.
pub fn build_prompt(req: &PromptRequest) -> String {
    build_prompt_with(req, &RawRanges::default())
}

pub fn build_prompt_with(req: &PromptRequest, ranges: &RawRanges) -> String {
    let intensity_line = match req.intensity_bucket {
        Some(level) => format!("Intensity: {level} (make the emotion {} pronounced)\n", match level {
            crate::rank::IntensityLevel::Low => "only slightly",
            crate::rank::IntensityLevel::Medium => "moderately",
            crate::rank::IntensityLevel::High => "strongly",
        }),
        None => String::new(),
    };
    let word_list = req
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{i}: {w}"))
        .collect::<Vec<_>>()
        .join("\n");
    let mode_instruction = match req.mode {
        ControlMode::LocalOnly => LOCAL_ONLY_INSTRUCTION,
        ControlMode::GlobalAndLocal | ControlMode::None => GLOBAL_AND_LOCAL_INSTRUCTION,
    };
    USER_TEMPLATE
        .replace("{emotion}", req.target_emotion.as_str())
        .replace("{intensity_line}", &intensity_line)
        .replace("{text}", &req.text)
        .replace("{word_count}", &req.words.len().to_string())
        .replace("{word_list}", &word_list)
        .replace("{pitch_lo}", &ranges.pitch.lo.to_string())
        .replace("{pitch_hi}", &ranges.pitch.hi.to_string())
        .replace("{energy_lo}", &ranges.energy.lo.to_string())
        .replace("{energy_hi}", &ranges.energy.hi.to_string())
        .replace("{duration_lo}", &ranges.duration.lo.to_string())
        .replace("{duration_hi}", &ranges.duration.hi.to_string())
        .replace("{mode_instruction}", mode_instruction)
}

/// Initial conversation for one request.
pub fn conversation(req: &PromptRequest, ranges: &RawRanges) -> Vec<ChatMessage> {
    vec![
        ChatMessage::system(system_prompt()),
        ChatMessage::user(build_prompt_with(req, ranges)),
    ]
}
