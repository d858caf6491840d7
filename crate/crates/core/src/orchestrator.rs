//! The question-answering state machine.
//!
//! ```text
//! Approximation -> Refinement(1) -> ... -> Refinement(n) -> Translation
//!                        |                       |               |
//!                        +------- Proposed <-----+---------------+
//!                                    |
//!                             Done | Failed
//! ```
//!
//! The refinement loop ends when the model reports nothing missing, when it
//! repeats the same report [`NO_PROGRESS_REPEATS`] times in a row, when a
//! report cannot be grounded at all, or after the configured step limit.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{
    build_approximation_prompt, build_refinement_prompt, build_repair_prompt,
    build_translation_prompt, parse_response, GatewayError, LlmClient, LlmProvider, MissingReport,
    ParsedResponse, Phase, Prompt,
};
use crate::ontology::{Iri, NameIndex, Ontology};
use crate::pathfinder::{resolve_missing, Resolution, DEFAULT_MAX_HOPS};
use crate::slicer::{expand_slice, seed_slice, Slice};
use crate::sparql::{check_conformance, extract_skeleton, ConformanceViolation};
use crate::verbalizer::{verbalize_catalog_with, verbalize_slice, CatalogStyle, TokenEstimate};

/// Consecutive identical missing reports that end the loop.
pub const NO_PROGRESS_REPEATS: usize = 2;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct PipelineConfig {
    pub context_budget_tokens: usize,
    pub max_refinement_steps: usize,
    pub max_hops: usize,
    pub catalog_style: CatalogStyle,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            context_budget_tokens: 32768,
            max_refinement_steps: 5,
            max_hops: DEFAULT_MAX_HOPS,
            catalog_style: CatalogStyle::Detailed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    NoProgress,
    StepLimit,
    NonconformingQuery,
    ProviderError,
    Budget,
    UnparseableResponse,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::NoProgress => "no-progress",
            FailureKind::StepLimit => "step-limit",
            FailureKind::NonconformingQuery => "nonconforming-query",
            FailureKind::ProviderError => "provider-error",
            FailureKind::Budget => "budget",
            FailureKind::UnparseableResponse => "unparseable-response",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum PhaseState {
    Approximation,
    Refinement {
        step: usize,
        slice: Slice,
        previous_report: Option<MissingReport>,
        /// How many times in a row `previous_report` has been seen.
        repeats: usize,
    },
    Translation {
        slice: Slice,
    },
    /// A query waiting for the conformance gate.
    Proposed {
        query: String,
        slice: Slice,
    },
    Done {
        query: String,
        final_slice: Slice,
    },
    Failed {
        reason: FailureKind,
        detail: String,
    },
}

impl PhaseState {
    pub fn is_terminal(&self) -> bool {
        matches!(self, PhaseState::Done { .. } | PhaseState::Failed { .. })
    }

    fn failed(reason: FailureKind, detail: impl Into<String>) -> Self {
        PhaseState::Failed {
            reason,
            detail: detail.into(),
        }
    }
}

/// The ontology service's answer to a missing report: what was resolved
/// and the slice grown from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub resolution: Resolution,
    pub grown: Slice,
}

/// Next state after a refinement response. Pure and total; states other
/// than `Refinement` are returned unchanged.
pub fn decide_transition(
    state: &PhaseState,
    parsed: &ParsedResponse,
    expansion: Option<&Expansion>,
    max_refinement_steps: usize,
) -> PhaseState {
    let PhaseState::Refinement {
        step,
        slice,
        previous_report,
        repeats,
    } = state
    else {
        return state.clone();
    };
    match parsed {
        ParsedResponse::SparqlProposed { query } => PhaseState::Proposed {
            query: query.clone(),
            slice: slice.clone(),
        },
        ParsedResponse::Missing { report } if report.is_empty() => PhaseState::Translation {
            slice: slice.clone(),
        },
        ParsedResponse::Missing { report } => {
            let repeats = if previous_report.as_ref() == Some(report) {
                repeats + 1
            } else {
                1
            };
            if repeats >= NO_PROGRESS_REPEATS {
                return PhaseState::failed(
                    FailureKind::NoProgress,
                    format!("the same missing report was returned {repeats} times in a row"),
                );
            }
            let stuck = match expansion {
                None => true,
                Some(e) => e.resolution.is_empty() && e.grown == *slice,
            };
            if stuck {
                return PhaseState::failed(
                    FailureKind::NoProgress,
                    "nothing in the missing report could be resolved",
                );
            }
            if step + 1 > max_refinement_steps {
                return PhaseState::failed(
                    FailureKind::StepLimit,
                    format!("no query after {max_refinement_steps} refinement steps"),
                );
            }
            PhaseState::Refinement {
                step: step + 1,
                slice: expansion.expect("checked above").grown.clone(),
                previous_report: Some(report.clone()),
                repeats,
            }
        }
        ParsedResponse::Unparseable { reason } => {
            PhaseState::failed(FailureKind::UnparseableResponse, reason.clone())
        }
        ParsedResponse::GroundedNames { .. } => PhaseState::failed(
            FailureKind::UnparseableResponse,
            "grounded names where a query or report was expected",
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmExchange {
    pub phase: Phase,
    /// Refinement step, for refinement exchanges.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub step: Option<usize>,
    pub prompt: String,
    pub prompt_hash: String,
    pub prompt_tokens: TokenEstimate,
    pub raw_response: String,
    pub parsed: ParsedResponse,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resolution: Option<Resolution>,
    /// Conformance problems of the query this exchange proposed.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<ConformanceViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLog {
    pub question: String,
    pub provider: String,
    pub config: PipelineConfig,
    /// Names from the approximation phase that matched nothing.
    pub ungrounded: Vec<String>,
    pub exchanges: Vec<LlmExchange>,
    pub slices: Vec<Slice>,
    pub outcome: PhaseState,
}

impl SessionLog {
    pub fn exchanges_in(&self, phase: Phase) -> usize {
        self.exchanges.iter().filter(|e| e.phase == phase).count()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("session logs serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("the question is empty")]
    EmptyQuestion,
    #[error(transparent)]
    Provider(#[from] GatewayError),
}

pub fn run_pipeline(
    question: &str,
    ontology: &Ontology,
    provider: &LlmProvider,
    config: &PipelineConfig,
) -> Result<SessionLog, PipelineError> {
    let mut client = provider.client()?;
    run_with_client(
        question,
        ontology,
        &NameIndex::build(ontology),
        client.as_mut(),
        config,
    )
}

struct Session<'a> {
    ontology: &'a Ontology,
    client: &'a mut dyn LlmClient,
    config: &'a PipelineConfig,
    log: SessionLog,
}

impl Session<'_> {
    /// Sends `prompt` and records the exchange; a failed call becomes the
    /// terminal state.
    #[allow(clippy::result_large_err)]
    fn exchange(
        &mut self,
        prompt: Result<Prompt, GatewayError>,
        step: Option<usize>,
    ) -> Result<&mut LlmExchange, PhaseState> {
        let prompt = prompt.map_err(failure_from)?;
        let raw = self.client.call(&prompt).map_err(failure_from)?;
        let parsed = parse_response(prompt.phase, &raw);
        self.log.exchanges.push(LlmExchange {
            phase: prompt.phase,
            step,
            prompt: prompt.text(),
            prompt_hash: prompt.hash(),
            prompt_tokens: prompt.tokens(),
            raw_response: raw,
            parsed,
            resolution: None,
            violations: Vec::new(),
        });
        Ok(self.log.exchanges.last_mut().unwrap())
    }

    fn slice_text(&self, slice: &Slice) -> String {
        if slice.is_empty() {
            String::new()
        } else {
            verbalize_slice(self.ontology, slice).expect("pipeline slices belong to the ontology")
        }
    }

    fn gate(&self, query: &str, slice: &Slice) -> Vec<ConformanceViolation> {
        match extract_skeleton(query) {
            Ok(skeleton) => check_conformance(&skeleton, self.ontology, slice),
            Err(violations) => violations,
        }
    }

    fn approximation(&mut self, question: &str, index: &NameIndex) -> PhaseState {
        let catalog = verbalize_catalog_with(self.ontology, self.config.catalog_style);
        let budget = self.config.context_budget_tokens;
        let parsed =
            match self.exchange(build_approximation_prompt(question, &catalog, budget), None) {
                Ok(e) => e.parsed.clone(),
                Err(state) => return state,
            };
        let ParsedResponse::GroundedNames {
            concepts,
            relationships,
        } = parsed
        else {
            let reason = match parsed {
                ParsedResponse::Unparseable { reason } => reason,
                _ => "expected grounded names".to_string(),
            };
            return PhaseState::failed(FailureKind::UnparseableResponse, reason);
        };
        let mut grounded: Vec<Iri> = Vec::new();
        for name in concepts.iter().chain(&relationships) {
            let found = index.resolve(name);
            if found.is_empty() {
                self.log.ungrounded.push(name.clone());
            }
            grounded.extend(found);
        }
        let slice =
            seed_slice(self.ontology, &grounded).expect("grounded IRIs come from the ontology");
        self.log.slices.push(slice.clone());
        PhaseState::Refinement {
            step: 1,
            slice,
            previous_report: None,
            repeats: 0,
        }
    }

    fn refinement(&mut self, question: &str, index: &NameIndex, state: PhaseState) -> PhaseState {
        let PhaseState::Refinement {
            step, ref slice, ..
        } = state
        else {
            return state;
        };
        let text = self.slice_text(slice);
        let prompt = build_refinement_prompt(question, &text, self.config.context_budget_tokens);
        let (ontology, max_hops) = (self.ontology, self.config.max_hops);
        let exchange = match self.exchange(prompt, Some(step)) {
            Ok(e) => e,
            Err(failed) => return failed,
        };
        let expansion = match &exchange.parsed {
            ParsedResponse::Missing { report } if !report.is_empty() => {
                let resolution = resolve_missing(ontology, index, report, max_hops);
                let grown = expand_slice(ontology, slice, &resolution.additions, &resolution.paths)
                    .expect("resolved IRIs come from the ontology");
                exchange.resolution = Some(resolution.clone());
                Some(Expansion { resolution, grown })
            }
            _ => None,
        };
        let parsed = exchange.parsed.clone();
        let next = decide_transition(
            &state,
            &parsed,
            expansion.as_ref(),
            self.config.max_refinement_steps,
        );
        if let PhaseState::Refinement { slice, .. } = &next {
            self.log.slices.push(slice.clone());
        }
        next
    }

    fn translation(&mut self, question: &str, slice: Slice) -> PhaseState {
        let text = self.slice_text(&slice);
        let prompt = build_translation_prompt(question, &text, self.config.context_budget_tokens);
        match self.exchange(prompt, None) {
            Ok(e) => match &e.parsed {
                ParsedResponse::SparqlProposed { query } => PhaseState::Proposed {
                    query: query.clone(),
                    slice,
                },
                ParsedResponse::Unparseable { reason } => {
                    PhaseState::failed(FailureKind::UnparseableResponse, reason.clone())
                }
                _ => PhaseState::failed(FailureKind::UnparseableResponse, "expected a query"),
            },
            Err(failed) => failed,
        }
    }

    /// Conformance gate with a single repair attempt.
    fn conformance(&mut self, question: &str, query: String, slice: Slice) -> PhaseState {
        let violations = self.gate(&query, &slice);
        if violations.is_empty() {
            return PhaseState::Done {
                query,
                final_slice: slice,
            };
        }
        let lines: Vec<String> = violations.iter().map(describe_violation).collect();
        if let Some(last) = self.log.exchanges.last_mut() {
            last.violations = violations;
        }
        let text = self.slice_text(&slice);
        let prompt = build_repair_prompt(
            question,
            &text,
            &query,
            &lines,
            self.config.context_budget_tokens,
        );
        let repaired = match self.exchange(prompt, None) {
            Ok(e) => e.parsed.clone(),
            Err(failed) => return failed,
        };
        let ParsedResponse::SparqlProposed { query } = repaired else {
            return PhaseState::failed(
                FailureKind::NonconformingQuery,
                format!(
                    "repair produced no query; original problems: {}",
                    lines.join("; ")
                ),
            );
        };
        let violations = self.gate(&query, &slice);
        if violations.is_empty() {
            return PhaseState::Done {
                query,
                final_slice: slice,
            };
        }
        let detail = violations
            .iter()
            .map(describe_violation)
            .collect::<Vec<_>>()
            .join("; ");
        if let Some(last) = self.log.exchanges.last_mut() {
            last.violations = violations;
        }
        PhaseState::failed(FailureKind::NonconformingQuery, detail)
    }
}

fn describe_violation(v: &ConformanceViolation) -> String {
    format!(
        "{} {} at {} ({})",
        v.kind, v.offending, v.location, v.detail
    )
}

fn failure_from(e: GatewayError) -> PhaseState {
    let reason = match e {
        GatewayError::BudgetExceeded { .. } => FailureKind::Budget,
        _ => FailureKind::ProviderError,
    };
    PhaseState::failed(reason, e.to_string())
}

/// Runs one session against an existing client.
pub fn run_with_client(
    question: &str,
    ontology: &Ontology,
    index: &NameIndex,
    client: &mut dyn LlmClient,
    config: &PipelineConfig,
) -> Result<SessionLog, PipelineError> {
    let question = question.trim();
    if question.is_empty() {
        return Err(PipelineError::EmptyQuestion);
    }
    let mut session = Session {
        ontology,
        log: SessionLog {
            question: question.to_string(),
            provider: client.describe(),
            config: config.clone(),
            ungrounded: Vec::new(),
            exchanges: Vec::new(),
            slices: Vec::new(),
            outcome: PhaseState::Approximation,
        },
        client,
        config,
    };
    let mut state = PhaseState::Approximation;
    while !state.is_terminal() {
        state = match state {
            PhaseState::Approximation => session.approximation(question, index),
            s @ PhaseState::Refinement { .. } => session.refinement(question, index, s),
            PhaseState::Translation { slice } => session.translation(question, slice),
            PhaseState::Proposed { query, slice } => session.conformance(question, query, slice),
            terminal => terminal,
        };
    }
    session.log.outcome = state;
    Ok(session.log)
}
