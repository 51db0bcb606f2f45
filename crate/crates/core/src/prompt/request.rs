use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PromptError;
use crate::rank::{Emotion, IntensityLevel};

/// Which levels of prompt control are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    /// Global and local factors.
    GlobalAndLocal,
    /// Local factors only; the global triple is forced to zero.
    LocalOnly,
    /// No prompt control; tracks pass through unchanged.
    None,
}

impl ControlMode {
    pub fn flag(&self) -> &'static str {
        match self {
            ControlMode::GlobalAndLocal => "gl",
            ControlMode::LocalOnly => "local",
            ControlMode::None => "none",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for ControlMode {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gl" | "g&l" | "global_and_local" | "global-and-local" => Ok(ControlMode::GlobalAndLocal),
            "l" | "local" | "local_only" | "local-only" => Ok(ControlMode::LocalOnly),
            "none" | "off" => Ok(ControlMode::None),
            other => Err(PromptError::InvalidRequest(format!(
                "unknown prompt-control mode `{other}` (expected none, gl or local)"
            ))),
        }
    }
}

/// Everything the prompt needs to know about one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRequest {
    pub utterance_id: String,
    pub text: String,
    /// Word list of the prosody track, in order. Authoritative for alignment.
    pub words: Vec<String>,
    pub target_emotion: Emotion,
    pub intensity_bucket: Option<IntensityLevel>,
    pub mode: ControlMode,
}

impl PromptRequest {
    pub fn new(
        utterance_id: impl Into<String>,
        text: impl Into<String>,
        words: Vec<String>,
        target_emotion: Emotion,
        mode: ControlMode,
    ) -> Self {
        Self {
            utterance_id: utterance_id.into(),
            text: text.into(),
            words,
            target_emotion,
            intensity_bucket: None,
            mode,
        }
    }

    /// Splits `text` on whitespace, punctuation stays attached to its word.
    pub fn from_text(
        utterance_id: impl Into<String>,
        text: &str,
        target_emotion: Emotion,
        mode: ControlMode,
    ) -> Self {
        let words = text.split_whitespace().map(str::to_string).collect();
        Self::new(utterance_id, text, words, target_emotion, mode)
    }

    pub fn with_intensity(mut self, level: IntensityLevel) -> Self {
        self.intensity_bucket = Some(level);
        self
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        if self.mode != ControlMode::None && self.words.is_empty() {
            return Err(PromptError::InvalidRequest(format!(
                "utterance {} has no words",
                self.utterance_id
            )));
        }
        if let Some(i) = self.words.iter().position(|w| w.trim().is_empty()) {
            return Err(PromptError::InvalidRequest(format!(
                "utterance {}: word {i} is blank",
                self.utterance_id
            )));
        }
        Ok(())
    }
}
