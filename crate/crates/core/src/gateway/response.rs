use serde::{Deserialize, Serialize};

use super::{MissingLink, MissingReport, Phase};
use crate::ontology::canonicalize_name;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ParsedResponse {
    GroundedNames {
        concepts: Vec<String>,
        relationships: Vec<String>,
    },
    SparqlProposed {
        query: String,
    },
    Missing {
        report: MissingReport,
    },
    Unparseable {
        reason: String,
    },
}

impl ParsedResponse {
    fn unparseable(reason: impl Into<String>) -> Self {
        ParsedResponse::Unparseable {
            reason: reason.into(),
        }
    }
}

/// A fenced code block: its info string (lowercased) and body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fence {
    pub info: String,
    pub body: String,
}

/// All closed ``` blocks in order, and whether an unclosed one trails.
pub fn extract_fences(text: &str) -> (Vec<Fence>, bool) {
    let mut fences = Vec::new();
    let mut open: Option<(String, Vec<&str>)> = None;
    for line in text.lines() {
        let trimmed = line.trim();
        match &mut open {
            None => {
                if let Some(info) = trimmed.strip_prefix("```") {
                    open = Some((info.trim().to_lowercase(), Vec::new()));
                }
            }
            Some((info, body)) => {
                if trimmed == "```" {
                    fences.push(Fence {
                        info: std::mem::take(info),
                        body: body.join("\n"),
                    });
                    open = None;
                } else {
                    body.push(line);
                }
            }
        }
    }
    (fences, open.is_some())
}

fn is_sparql(fence: &Fence) -> bool {
    fence.info == "sparql" || (fence.info.is_empty() && looks_like_query(&fence.body))
}

fn looks_like_query(body: &str) -> bool {
    let head = body.trim_start().to_ascii_uppercase();
    head.starts_with("SELECT") || head.starts_with("PREFIX")
}

fn is_structured(fence: &Fence) -> bool {
    fence.info == "json" || (fence.info.is_empty() && !looks_like_query(&fence.body))
}

#[derive(Deserialize)]
struct NamesReply {
    concepts: Vec<String>,
    relationships: Vec<String>,
}

#[derive(Deserialize)]
struct MissingReply {
    missing_concepts: Vec<String>,
    missing_links: Vec<LinkReply>,
}

#[derive(Deserialize)]
struct LinkReply {
    from: String,
    to: String,
}

fn canonical_list(names: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = names
        .iter()
        .map(|n| canonicalize_name(n))
        .filter(|n| !n.is_empty())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn sparql(fence: &Fence) -> ParsedResponse {
    if fence.body.trim().is_empty() {
        ParsedResponse::unparseable("empty sparql block")
    } else {
        ParsedResponse::SparqlProposed {
            query: fence.body.clone(),
        }
    }
}

/// Parses a raw model reply according to the contract of `phase`. Total:
/// every input maps to some variant.
pub fn parse_response(phase: Phase, raw: &str) -> ParsedResponse {
    let (fences, unclosed) = extract_fences(raw);
    if fences.is_empty() {
        return ParsedResponse::unparseable(if unclosed {
            "unterminated fenced block"
        } else {
            "no fenced block"
        });
    }
    match phase {
        Phase::Approximation => {
            let Some(fence) = fences.iter().find(|f| is_structured(f)) else {
                return ParsedResponse::unparseable("no json block");
            };
            match serde_json::from_str::<NamesReply>(&fence.body) {
                Ok(reply) => ParsedResponse::GroundedNames {
                    concepts: canonical_list(reply.concepts),
                    relationships: canonical_list(reply.relationships),
                },
                Err(e) => ParsedResponse::unparseable(format!("invalid names object: {e}")),
            }
        }
        Phase::Refinement => {
            if let Some(fence) = fences.iter().find(|f| is_sparql(f)) {
                return sparql(fence);
            }
            let Some(fence) = fences.iter().find(|f| is_structured(f)) else {
                return ParsedResponse::unparseable("no sparql or json block");
            };
            match serde_json::from_str::<MissingReply>(&fence.body) {
                Ok(reply) => ParsedResponse::Missing {
                    report: MissingReport::new(
                        reply.missing_concepts,
                        reply
                            .missing_links
                            .into_iter()
                            .map(|l| MissingLink::new(l.from, l.to)),
                    ),
                },
                Err(e) => ParsedResponse::unparseable(format!("invalid missing report: {e}")),
            }
        }
        Phase::Translation => match fences.iter().find(|f| is_sparql(f)) {
            Some(fence) => sparql(fence),
            None => ParsedResponse::unparseable("no sparql block"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_missing_report() {
        let raw = "```json\n{\"missing_concepts\": [], \"missing_links\": []}\n```";
        assert_eq!(
            parse_response(Phase::Refinement, raw),
            ParsedResponse::Missing {
                report: MissingReport::default()
            }
        );
    }

    #[test]
    fn sparql_fence_contents_are_exact() {
        let raw = "Here you go:\n```sparql\nSELECT ?x\nWHERE { ?x ?p ?o }\n```\nDone.";
        assert_eq!(
            parse_response(Phase::Translation, raw),
            ParsedResponse::SparqlProposed {
                query: "SELECT ?x\nWHERE { ?x ?p ?o }".into()
            }
        );
    }

    #[test]
    fn prose_only() {
        assert_eq!(
            parse_response(Phase::Refinement, "I think you need a Plan."),
            ParsedResponse::Unparseable {
                reason: "no fenced block".into()
            }
        );
        assert_eq!(
            parse_response(Phase::Translation, "```sparql\nSELECT"),
            ParsedResponse::Unparseable {
                reason: "unterminated fenced block".into()
            }
        );
    }

    #[test]
    fn sparql_wins_over_report_in_refinement() {
        let raw = "```json\n{\"missing_concepts\": [\"Plan\"], \"missing_links\": []}\n```\n```sparql\nSELECT * WHERE { ?s ?p ?o }\n```\n";
        assert!(matches!(
            parse_response(Phase::Refinement, raw),
            ParsedResponse::SparqlProposed { .. }
        ));
    }

    #[test]
    fn translation_rejects_reports() {
        let raw = "```json\n{\"missing_concepts\": [], \"missing_links\": []}\n```";
        assert_eq!(
            parse_response(Phase::Translation, raw),
            ParsedResponse::Unparseable {
                reason: "no sparql block".into()
            }
        );
    }

    #[test]
    fn grounded_names_are_canonical() {
        let raw = "```json\n{\"concepts\": [\"Customer\", \" customer \", \"Plan\"], \"relationships\": [\"has plan\"]}\n```";
        assert_eq!(
            parse_response(Phase::Approximation, raw),
            ParsedResponse::GroundedNames {
                concepts: vec!["customer".into(), "plan".into()],
                relationships: vec!["has plan".into()],
            }
        );
        assert!(matches!(
            parse_response(Phase::Approximation, "```json\n{\"concepts\": []}\n```"),
            ParsedResponse::Unparseable { .. }
        ));
    }

    #[test]
    fn missing_links_parse() {
        let raw = "```\n{\"missing_concepts\": [\"Invoice\"], \"missing_links\": [{\"from\": \"Customer\", \"to\": \"Invoice\"}]}\n```";
        let ParsedResponse::Missing { report } = parse_response(Phase::Refinement, raw) else {
            panic!("expected a report");
        };
        assert_eq!(report.missing_concepts(), ["invoice"]);
        assert_eq!(
            report.missing_links(),
            [MissingLink::new("customer", "invoice")]
        );
    }

    fn report_strategy() -> impl Strategy<Value = MissingReport> {
        (
            prop::collection::vec("[A-Za-z][A-Za-z ]{0,10}", 0..5),
            prop::collection::vec(("[A-Za-z]{1,8}", "[A-Za-z]{1,8}"), 0..4),
        )
            .prop_map(|(c, l)| {
                MissingReport::new(c, l.into_iter().map(|(a, b)| MissingLink::new(a, b)))
            })
    }

    proptest! {
        #[test]
        fn report_round_trips(report in report_strategy()) {
            let parsed = parse_response(Phase::Refinement, &report.to_response());
            prop_assert_eq!(parsed, ParsedResponse::Missing { report });
        }

        #[test]
        fn parser_is_total(raw in ".{0,200}", phase in prop_oneof![Just(Phase::Approximation), Just(Phase::Refinement), Just(Phase::Translation)]) {
            let _ = parse_response(phase, &raw);
        }
    }
}
