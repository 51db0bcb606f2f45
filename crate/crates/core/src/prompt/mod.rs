//! Language-model prompt control: prompt rendering, reply parsing and repair,
//! and the providers that produce replies.

mod client;
mod http;
mod parse;
mod provider;
mod request;
mod template;

pub use client::{request_plan, PlanOutcome, ProviderKind};
pub use http::{HttpProvider, ProviderConfig, RequestSlots};
pub use parse::{clamp_plan, extract_json_object, parse_response, ParseError, ParsedPlan};
pub use provider::{
    render_contract, CannedFactors, CompletionProvider, ProviderError, ReplayProvider,
    StubProvider,
};
pub use request::{ControlMode, PromptRequest};
pub use template::{
    build_prompt, build_prompt_with, conversation, system_prompt, ChatMessage, RawRanges,
    PROMPT_TEMPLATE_VERSION,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PromptError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}
