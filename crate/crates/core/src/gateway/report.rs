use serde::{Deserialize, Serialize};

use crate::ontology::canonicalize_name;

/// A link between two concepts that the model could not find in its slice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MissingLink {
    pub from: String,
    pub to: String,
}

impl MissingLink {
    pub fn new(from: impl AsRef<str>, to: impl AsRef<str>) -> Self {
        MissingLink {
            from: canonicalize_name(from.as_ref()),
            to: canonicalize_name(to.as_ref()),
        }
    }
}

/// The model's account of what its slice lacks.
///
/// Names are canonicalized on construction (lowercased, whitespace
/// collapsed, sorted, deduplicated, blanks dropped) so that equality is set
/// equality. That equality drives the no-progress termination rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawReport")]
pub struct MissingReport {
    missing_concepts: Vec<String>,
    missing_links: Vec<MissingLink>,
}

#[derive(Deserialize)]
struct RawReport {
    missing_concepts: Vec<String>,
    missing_links: Vec<MissingLink>,
}

impl From<RawReport> for MissingReport {
    fn from(raw: RawReport) -> Self {
        MissingReport::new(raw.missing_concepts, raw.missing_links)
    }
}

impl MissingReport {
    pub fn new<S: AsRef<str>>(
        concepts: impl IntoIterator<Item = S>,
        links: impl IntoIterator<Item = MissingLink>,
    ) -> Self {
        let mut missing_concepts: Vec<String> = concepts
            .into_iter()
            .map(|c| canonicalize_name(c.as_ref()))
            .filter(|c| !c.is_empty())
            .collect();
        missing_concepts.sort();
        missing_concepts.dedup();
        let mut missing_links: Vec<MissingLink> = links
            .into_iter()
            .map(|l| MissingLink::new(&l.from, &l.to))
            .filter(|l| !l.from.is_empty() && !l.to.is_empty())
            .collect();
        missing_links.sort();
        missing_links.dedup();
        MissingReport {
            missing_concepts,
            missing_links,
        }
    }

    pub fn missing_concepts(&self) -> &[String] {
        &self.missing_concepts
    }

    pub fn missing_links(&self) -> &[MissingLink] {
        &self.missing_links
    }

    pub fn is_empty(&self) -> bool {
        self.missing_concepts.is_empty() && self.missing_links.is_empty()
    }

    /// Renders the report in the fenced form the refinement prompt asks for.
    pub fn to_response(&self) -> String {
        let body = serde_json::to_string_pretty(self).expect("report serializes");
        format!("```json\n{body}\n```\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonicalizes_and_deduplicates() {
        let r = MissingReport::new(
            ["  Plan", "plan", "INVOICE", ""],
            [
                MissingLink::new("Customer ", "invoice"),
                MissingLink::new("customer", "INVOICE"),
            ],
        );
        assert_eq!(r.missing_concepts(), ["invoice", "plan"]);
        assert_eq!(r.missing_links(), [MissingLink::new("customer", "invoice")]);
        assert_eq!(
            r,
            MissingReport::new(
                ["invoice", "plan"],
                [MissingLink::new("customer", "invoice")]
            )
        );
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(
            concepts in prop::collection::vec("[ a-zA-Z]{0,8}", 0..6),
            links in prop::collection::vec(("[ a-zA-Z]{0,6}", "[ a-zA-Z]{0,6}"), 0..4),
        ) {
            let once = MissingReport::new(&concepts, links.iter().map(|(a, b)| MissingLink { from: a.clone(), to: b.clone() }));
            let twice = MissingReport::new(once.missing_concepts(), once.missing_links().iter().cloned());
            prop_assert_eq!(once, twice);
        }
    }
}
