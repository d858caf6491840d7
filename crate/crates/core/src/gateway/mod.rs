//! LLM access: prompt templates, strict response parsers and providers.
//!
//! Every phase call is a fresh, self-contained prompt. Responses are
//! expected to carry a fenced code block; anything else parses to
//! [`ParsedResponse::Unparseable`].

mod live;
mod prompt;
mod provider;
mod report;
mod response;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use live::{LiveClient, LiveEndpoint};
pub use prompt::{
    build_approximation_prompt, build_refinement_prompt, build_repair_prompt,
    build_translation_prompt, Prompt,
};
pub use provider::{
    LlmClient, LlmProvider, ScriptedClient, Transcript, TranscriptEntry, TranscriptMatch,
};
pub use report::{MissingLink, MissingReport};
pub use response::{extract_fences, parse_response, Fence, ParsedResponse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Approximation,
    Refinement,
    Translation,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Approximation => "approximation",
            Phase::Refinement => "refinement",
            Phase::Translation => "translation",
        })
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("{phase} prompt needs about {estimated} tokens, over the budget of {budget}")]
    BudgetExceeded {
        phase: Phase,
        estimated: usize,
        budget: usize,
    },
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: usize, message: String },
    #[error("endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed completion: {0}")]
    MalformedReply(String),
    #[error("no transcript entry matches the {phase} prompt with hash {hash}")]
    NoTranscriptMatch { phase: Phase, hash: String },
    #[error("invalid provider: {0}")]
    InvalidProvider(String),
    #[error("invalid transcript: {0}")]
    Transcript(String),
}
