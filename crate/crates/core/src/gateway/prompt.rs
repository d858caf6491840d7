use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GatewayError, Phase};
use crate::verbalizer::{estimate_tokens, TokenEstimate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub phase: Phase,
    pub system: String,
    pub user: String,
}

impl Prompt {
    /// System and user messages joined by a blank line. Hashes and token
    /// estimates are taken over this text.
    pub fn text(&self) -> String {
        format!("{}\n\n{}", self.system, self.user)
    }

    /// Lowercase hex SHA-256 of [`Prompt::text`].
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.text().as_bytes()))
    }

    pub fn tokens(&self) -> TokenEstimate {
        estimate_tokens(&self.text())
    }

    fn within(self, budget: usize) -> Result<Prompt, GatewayError> {
        let estimated = self.tokens().estimated_tokens;
        if estimated > budget {
            return Err(GatewayError::BudgetExceeded {
                phase: self.phase,
                estimated,
                budget,
            });
        }
        Ok(self)
    }
}

const APPROXIMATION_SYSTEM: &str =
    "You are an assistant that maps questions about an enterprise knowledge graph \
onto the vocabulary of its ontology.";

const QUERY_SYSTEM: &str =
    "You are an assistant that writes SPARQL queries over an enterprise knowledge graph. \
You only use vocabulary that is declared in the ontology you are given.";

fn or_none(text: &str) -> &str {
    if text.trim().is_empty() {
        "none"
    } else {
        text.trim_end()
    }
}

pub fn build_approximation_prompt(
    question: &str,
    catalog: &str,
    budget: usize,
) -> Result<Prompt, GatewayError> {
    let user = format!(
        "Ontology catalog:\n{catalog}\n\n\
         Question: {question}\n\n\
         List the names of the concepts and relationships from the catalog that the question refers to. \
         Attributes count as relationships. Use the names exactly as written in the catalog.\n\
         Reply with one fenced ```json block holding an object with exactly two keys:\n\
         {{\"concepts\": [names], \"relationships\": [names]}}\n",
        catalog = or_none(catalog),
        question = question.trim(),
    );
    Prompt {
        phase: Phase::Approximation,
        system: APPROXIMATION_SYSTEM.to_string(),
        user,
    }
    .within(budget)
}

fn slice_section(question: &str, slice_turtle: &str) -> String {
    let slice = if slice_turtle.trim().is_empty() {
        "none".to_string()
    } else {
        format!("```turtle\n{}\n```", slice_turtle.trim_end())
    };
    format!(
        "Ontology slice:\n{slice}\n\nQuestion: {}\n\n",
        question.trim()
    )
}

const SPARQL_CONTRACT: &str = "reply with one fenced ```sparql block holding a SELECT query that answers the \
question. Declare every prefix you use and use only classes and properties declared in the slice.\n";

pub fn build_refinement_prompt(
    question: &str,
    slice_turtle: &str,
    budget: usize,
) -> Result<Prompt, GatewayError> {
    let user = format!(
        "{}If the slice contains everything needed to answer the question, {SPARQL_CONTRACT}\
         Otherwise reply with one fenced ```json block holding an object that lists what the slice lacks:\n\
         {{\"missing_concepts\": [names], \"missing_links\": [{{\"from\": name, \"to\": name}}]}}\n\
         A missing link names two concepts that must be connected for the question to be answered.\n",
        slice_section(question, slice_turtle)
    );
    Prompt {
        phase: Phase::Refinement,
        system: QUERY_SYSTEM.to_string(),
        user,
    }
    .within(budget)
}

pub fn build_translation_prompt(
    question: &str,
    slice_turtle: &str,
    budget: usize,
) -> Result<Prompt, GatewayError> {
    let user = format!(
        "{}Using this slice, {SPARQL_CONTRACT}",
        slice_section(question, slice_turtle)
    );
    Prompt {
        phase: Phase::Translation,
        system: QUERY_SYSTEM.to_string(),
        user,
    }
    .within(budget)
}

/// The translation prompt followed by the rejected query and its violations.
pub fn build_repair_prompt(
    question: &str,
    slice_turtle: &str,
    previous_query: &str,
    violations: &[String],
    budget: usize,
) -> Result<Prompt, GatewayError> {
    let mut prompt = build_translation_prompt(question, slice_turtle, usize::MAX)?;
    prompt.user.push_str(&format!(
        "\nYour previous query was rejected:\n```sparql\n{}\n```\nProblems:\n",
        previous_query.trim_end()
    ));
    for v in violations {
        prompt.user.push_str(&format!("- {v}\n"));
    }
    prompt
        .user
        .push_str("Reply with a corrected query in one fenced ```sparql block.\n");
    prompt.within(budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs_render_none() {
        let p = build_approximation_prompt("Which plans exist?", "", 1000).unwrap();
        assert!(p.user.contains("Ontology catalog:\nnone\n"));
        let p = build_refinement_prompt("Which plans exist?", "  \n", 1000).unwrap();
        assert!(p.user.contains("Ontology slice:\nnone\n"));
    }

    #[test]
    fn prompts_are_deterministic() {
        let a = build_refinement_prompt("q", "ex:A a owl:Class .", 1000).unwrap();
        let b = build_refinement_prompt("q", "ex:A a owl:Class .", 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        assert_ne!(
            a.hash(),
            build_translation_prompt("q", "ex:A a owl:Class .", 1000)
                .unwrap()
                .hash()
        );
    }

    #[test]
    fn translation_has_no_missing_branch() {
        let p = build_translation_prompt("q", "x", 1000).unwrap();
        assert!(p.user.contains("```sparql"));
        assert!(!p.user.contains("missing_concepts"));
        let r = build_refinement_prompt("q", "x", 1000).unwrap();
        assert!(r.user.contains("missing_concepts") && r.user.contains("missing_links"));
    }

    #[test]
    fn budget_is_enforced() {
        let err = build_approximation_prompt("q", &"x".repeat(400), 50).unwrap_err();
        assert!(matches!(
            err,
            GatewayError::BudgetExceeded {
                phase: Phase::Approximation,
                budget: 50,
                ..
            }
        ));
    }

    #[test]
    fn repair_lists_violations() {
        let p = build_repair_prompt(
            "q",
            "x",
            "SELECT * {}",
            &["unknown-predicate ex:foo at 1:3".into()],
            1000,
        )
        .unwrap();
        assert_eq!(p.phase, Phase::Translation);
        assert!(p.user.contains("- unknown-predicate ex:foo at 1:3\n"));
    }
}
