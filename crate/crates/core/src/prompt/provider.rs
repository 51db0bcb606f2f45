//! Sources of model replies: canned stub, offline replay, HTTP endpoint.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::request::PromptRequest;
use super::template::ChatMessage;
use crate::formats;
use crate::prosody::{RawFactors, RawScalingPlan, WordFactors};
use crate::rank::Emotion;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("authentication failure: {0}")]
    Auth(String),
    #[error("no recorded plan for utterance {0}")]
    MissingReplay(String),
    #[error("provider configuration: {0}")]
    Config(String),
}

/// Anything that can answer a chat conversation for a given request.
pub trait CompletionProvider: Send + Sync {
    fn name(&self) -> &str;

    fn complete(
        &self,
        request: &PromptRequest,
        messages: &[ChatMessage],
    ) -> Result<String, ProviderError>;
}

/// Serializes a plan exactly as the output contract asks the model to.
pub fn render_contract(plan: &RawScalingPlan<f64>) -> String {
    serde_json::to_string(plan).expect("plan serializes")
}

/// Fixed global and per-word factors for one emotion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CannedFactors {
    pub global: RawFactors<f64>,
    pub local: RawFactors<f64>,
}

/// Deterministic provider answering from a per-emotion table.
#[derive(Debug, Clone)]
pub struct StubProvider {
    table: BTreeMap<Emotion, CannedFactors>,
}

impl StubProvider {
    /// Rough textbook tendencies: anger and surprise raise pitch and energy,
    /// sadness lowers both and slows down.
    pub fn expressive() -> Self {
        let f = |pitch, energy, duration| RawFactors { pitch, energy, duration };
        let table = BTreeMap::from([
            (Emotion::Angry, CannedFactors { global: f(1.5, 3.0, -0.5), local: f(0.5, 1.0, 0.0) }),
            (Emotion::Happy, CannedFactors { global: f(2.0, 1.5, -0.3), local: f(1.0, 0.5, 0.0) }),
            (Emotion::Neutral, CannedFactors { global: RawFactors::zero(), local: RawFactors::zero() }),
            (Emotion::Sad, CannedFactors { global: f(-2.0, -2.0, 1.0), local: f(-0.5, -0.5, 0.25) }),
            (Emotion::Surprise, CannedFactors { global: f(3.0, 1.0, -0.2), local: f(1.0, 0.5, 0.0) }),
        ]);
        Self { table }
    }

    /// Answers the all-zero plan for every emotion.
    pub fn neutral() -> Self {
        let zero = CannedFactors { global: RawFactors::zero(), local: RawFactors::zero() };
        Self {
            table: Emotion::ALL.iter().map(|&e| (e, zero)).collect(),
        }
    }

    pub fn with(mut self, emotion: Emotion, factors: CannedFactors) -> Self {
        self.table.insert(emotion, factors);
        self
    }

    pub fn plan_for(&self, request: &PromptRequest) -> RawScalingPlan<f64> {
        let canned = self
            .table
            .get(&request.target_emotion)
            .copied()
            .unwrap_or(CannedFactors { global: RawFactors::zero(), local: RawFactors::zero() });
        RawScalingPlan {
            global: canned.global,
            locals: request
                .words
                .iter()
                .map(|w| WordFactors::new(w.clone(), canned.local))
                .collect(),
            rationale: Some(format!("canned {} profile", request.target_emotion)),
        }
    }
}

impl CompletionProvider for StubProvider {
    fn name(&self) -> &str {
        "stub"
    }

    fn complete(&self, request: &PromptRequest, _: &[ChatMessage]) -> Result<String, ProviderError> {
        Ok(render_contract(&self.plan_for(request)))
    }
}

/// Replays plans recorded in a plans JSON-Lines file, keyed by utterance id.
#[derive(Debug, Clone, Default)]
pub struct ReplayProvider {
    plans: BTreeMap<String, RawScalingPlan<f64>>,
}

impl ReplayProvider {
    pub fn new(plans: BTreeMap<String, RawScalingPlan<f64>>) -> Self {
        Self { plans }
    }

    pub fn open(path: &Path) -> Result<Self, ProviderError> {
        let batch = formats::read_plans(path)
            .map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))?;
        if let Some(bad) = batch.errors.first() {
            return Err(ProviderError::Config(format!(
                "{}: line {}: {}",
                path.display(),
                bad.line,
                bad.message
            )));
        }
        Ok(Self::new(
            batch
                .items
                .into_iter()
                .map(|r| (r.utterance_id, r.plan))
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

impl CompletionProvider for ReplayProvider {
    fn name(&self) -> &str {
        "replay"
    }

    fn complete(&self, request: &PromptRequest, _: &[ChatMessage]) -> Result<String, ProviderError> {
        self.plans
            .get(&request.utterance_id)
            .map(render_contract)
            .ok_or_else(|| ProviderError::MissingReplay(request.utterance_id.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::ControlMode;

    #[test]
    fn stub_is_deterministic_per_emotion() {
        let s = StubProvider::expressive();
        let r = PromptRequest::from_text("u", "you did what", Emotion::Angry, ControlMode::GlobalAndLocal);
        let a = s.complete(&r, &[]).unwrap();
        assert_eq!(a, s.complete(&r, &[]).unwrap());
        let plan = s.plan_for(&r);
        assert_eq!(plan.global.energy, 3.0);
        assert_eq!(plan.locals.len(), 3);
    }

    #[test]
    fn replay_missing_utterance() {
        let p = ReplayProvider::default();
        let r = PromptRequest::from_text("nope", "x", Emotion::Sad, ControlMode::GlobalAndLocal);
        assert_eq!(p.complete(&r, &[]), Err(ProviderError::MissingReplay("nope".into())));
    }
}
