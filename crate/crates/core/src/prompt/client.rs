use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::http::{HttpProvider, ProviderConfig};
use super::parse::{clamp_plan, parse_response};
use super::provider::{CompletionProvider, ReplayProvider, StubProvider};
use super::request::{ControlMode, PromptRequest};
use super::template::{conversation, ChatMessage, RawRanges};
use super::PromptError;
use crate::prosody::RawScalingPlan;
use crate::warning::Warning;

/// Result of asking for one plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome {
    pub plan: RawScalingPlan<f64>,
    /// Every attempt failed to parse; `plan` is the neutral fallback.
    pub degraded: bool,
    pub attempts: u32,
    /// One entry per failed attempt.
    pub failures: Vec<String>,
    pub warnings: Vec<Warning>,
}

/// Asks `provider` for a plan, retrying unusable replies up to `max_retries`
/// times with the error fed back into the conversation.
///
/// Whatever the provider returns, the plan lies inside `ranges`, matches the
/// request's word count, and has a zero global triple in local-only mode.
/// Transport failures are errors; unparseable replies end in a flagged
/// neutral plan.
pub fn request_plan(
    req: &PromptRequest,
    provider: &dyn CompletionProvider,
    max_retries: u32,
    ranges: &RawRanges,
) -> Result<PlanOutcome, PromptError> {
    req.validate()?;
    if req.mode == ControlMode::None {
        return Ok(PlanOutcome {
            plan: RawScalingPlan::neutral(&req.words),
            degraded: false,
            attempts: 0,
            failures: Vec::new(),
            warnings: Vec::new(),
        });
    }

    let mut messages = conversation(req, ranges);
    let mut failures = Vec::new();
    for attempt in 1..=max_retries + 1 {
        let reply = provider.complete(req, &messages)?;
        match parse_response(&reply, &req.words, ranges) {
            Ok(parsed) => {
                let mut plan = parsed.plan;
                let mut warnings = parsed.warnings;
                warnings.extend(clamp_plan(&mut plan, ranges));
                if req.mode == ControlMode::LocalOnly && !plan.global.is_zero() {
                    warnings.push(Warning::new("global", "non-zero global factors discarded in local-only mode"));
                    plan = plan.local_only();
                }
                return Ok(PlanOutcome {
                    plan,
                    degraded: false,
                    attempts: attempt,
                    failures,
                    warnings,
                });
            }
            Err(e) => {
                tracing::warn!(
                    utterance = %req.utterance_id,
                    attempt,
                    provider = provider.name(),
                    "unusable reply: {e}"
                );
                failures.push(format!("attempt {attempt}: {e}"));
                messages.push(ChatMessage::assistant(reply));
                messages.push(ChatMessage::user(format!(
                    "Your previous reply could not be used: {e}. Reply again with only the JSON object \
                     described in the output requirements, with exactly {} entries in \"words\".",
                    req.words.len()
                )));
            }
        }
    }
    Ok(PlanOutcome {
        plan: RawScalingPlan::neutral(&req.words),
        degraded: true,
        attempts: max_retries + 1,
        failures,
        warnings: Vec::new(),
    })
}

/// Provider selector as written on the command line or in a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderKind {
    Http,
    Stub,
    StubNeutral,
    Replay(PathBuf),
}

impl FromStr for ProviderKind {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "http" => Ok(ProviderKind::Http),
            "stub" => Ok(ProviderKind::Stub),
            "stub:neutral" | "stub-neutral" => Ok(ProviderKind::StubNeutral),
            other => match other.strip_prefix("replay:") {
                Some(path) if !path.is_empty() => Ok(ProviderKind::Replay(PathBuf::from(path))),
                _ => Err(PromptError::InvalidRequest(format!(
                    "unknown provider `{other}` (expected http, stub, stub:neutral or replay:<path>)"
                ))),
            },
        }
    }
}

impl ProviderKind {
    pub fn build(&self, cfg: &ProviderConfig) -> Result<Box<dyn CompletionProvider>, PromptError> {
        Ok(match self {
            ProviderKind::Http => Box::new(HttpProvider::from_env(cfg.clone())?),
            ProviderKind::Stub => Box::new(StubProvider::expressive()),
            ProviderKind::StubNeutral => Box::new(StubProvider::neutral()),
            ProviderKind::Replay(path) => Box::new(ReplayProvider::open(path)?),
        })
    }
}
