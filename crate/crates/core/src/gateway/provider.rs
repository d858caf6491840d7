use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GatewayError, LiveClient, LiveEndpoint, Phase, Prompt};

/// One conversation partner for a single pipeline session.
pub trait LlmClient {
    fn call(&mut self, prompt: &Prompt) -> Result<String, GatewayError>;

    /// Short description recorded in session logs.
    fn describe(&self) -> String;
}

/// Immutable provider configuration. Each session gets its own client.
#[derive(Debug, Clone)]
pub enum LlmProvider {
    Live(LiveEndpoint),
    Scripted(Transcript),
}

impl LlmProvider {
    pub fn client(&self) -> Result<Box<dyn LlmClient>, GatewayError> {
        match self {
            LlmProvider::Live(endpoint) => Ok(Box::new(LiveClient::new(endpoint.clone())?)),
            LlmProvider::Scripted(transcript) => {
                Ok(Box::new(ScriptedClient::new(transcript.clone())))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptMatch {
    Any,
    Hash(String),
}

impl FromStr for TranscriptMatch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "any" {
            return Ok(TranscriptMatch::Any);
        }
        match s.strip_prefix("hash:") {
            Some(hex) if hex.len() == 64 && hex.bytes().all(|b| b.is_ascii_hexdigit()) => {
                Ok(TranscriptMatch::Hash(hex.to_ascii_lowercase()))
            }
            _ => Err(format!(
                "matcher must be \"any\" or \"hash:<64 hex digits>\", got {s:?}"
            )),
        }
    }
}

impl fmt::Display for TranscriptMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranscriptMatch::Any => f.write_str("any"),
            TranscriptMatch::Hash(h) => write!(f, "hash:{h}"),
        }
    }
}

impl Serialize for TranscriptMatch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TranscriptMatch {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub phase: Phase,
    #[serde(rename = "match")]
    pub matcher: TranscriptMatch,
    pub response: String,
}

/// Canned responses, consumed in order by a [`ScriptedClient`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn from_json(text: &str) -> Result<Self, GatewayError> {
        serde_json::from_str(text).map_err(|e| GatewayError::Transcript(e.to_string()))
    }
}

/// Replays a transcript. The first unused entry whose phase and matcher fit
/// the prompt wins and is consumed.
#[derive(Debug, Clone)]
pub struct ScriptedClient {
    entries: Vec<(TranscriptEntry, bool)>,
}

impl ScriptedClient {
    pub fn new(transcript: Transcript) -> Self {
        ScriptedClient {
            entries: transcript.entries.into_iter().map(|e| (e, false)).collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.entries.iter().filter(|(_, used)| !used).count()
    }
}

impl LlmClient for ScriptedClient {
    fn call(&mut self, prompt: &Prompt) -> Result<String, GatewayError> {
        let hash = prompt.hash();
        let hit = self.entries.iter_mut().find(|(entry, used)| {
            !*used
                && entry.phase == prompt.phase
                && match &entry.matcher {
                    TranscriptMatch::Any => true,
                    TranscriptMatch::Hash(h) => *h == hash,
                }
        });
        match hit {
            Some((entry, used)) => {
                *used = true;
                Ok(entry.response.clone())
            }
            None => Err(GatewayError::NoTranscriptMatch {
                phase: prompt.phase,
                hash,
            }),
        }
    }

    fn describe(&self) -> String {
        "scripted".to_string()
    }
}
