//! Text renderings of an ontology for prompts.
//!
//! The catalog is the informal, one-line-per-element description used to
//! ground a question; a slice is rendered formally as Turtle.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::ontology::{Iri, Ontology};
use crate::slicer::{Slice, SliceError};
use crate::turtle::serialize_turtle;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogStyle {
    /// Names plus relationship endpoints, attribute owners and comments.
    #[default]
    Detailed,
    /// Element names only.
    NamesOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenEstimate {
    pub chars: usize,
    pub estimated_tokens: usize,
}

/// Four characters per token, rounded up.
pub fn estimate_tokens(text: &str) -> TokenEstimate {
    let chars = text.chars().count();
    TokenEstimate {
        chars,
        estimated_tokens: chars.div_ceil(4),
    }
}

pub fn verbalize_catalog(ontology: &Ontology) -> String {
    verbalize_catalog_with(ontology, CatalogStyle::Detailed)
}

pub fn verbalize_catalog_with(ontology: &Ontology, style: CatalogStyle) -> String {
    let name = |iri: &Iri| ontology.display_name(iri);
    let by_name =
        |a: &(String, &Iri), b: &(String, &Iri)| -> Ordering { a.0.cmp(&b.0).then(a.1.cmp(b.1)) };
    let names_of = |iris: &mut dyn Iterator<Item = &Iri>| -> String {
        let mut names: Vec<String> = iris.map(name).collect();
        names.sort();
        names.join(" or ")
    };
    let with_comment = |line: String, comment: &Option<String>| match comment {
        Some(c) if !c.trim().is_empty() && style == CatalogStyle::Detailed => {
            format!(
                "{line} — {}",
                c.split_whitespace().collect::<Vec<_>>().join(" ")
            )
        }
        _ => line,
    };

    let mut out = String::new();
    let mut concepts: Vec<_> = ontology.concepts().keys().map(|i| (name(i), i)).collect();
    concepts.sort_by(by_name);
    for (n, iri) in concepts {
        let line = with_comment(format!("Concept: {n}"), &ontology.concepts()[iri].comment);
        out.push_str(&line);
        out.push('\n');
    }

    let mut relationships: Vec<_> = ontology
        .relationships()
        .keys()
        .map(|i| (name(i), i))
        .collect();
    relationships.sort_by(by_name);
    for (n, iri) in relationships {
        let rel = &ontology.relationships()[iri];
        let line = match style {
            CatalogStyle::NamesOnly => format!("Relationship: {n}"),
            CatalogStyle::Detailed => with_comment(
                format!(
                    "Relationship: {n} (connects {} to {})",
                    names_of(&mut rel.domains.iter()),
                    names_of(&mut rel.ranges.iter())
                ),
                &rel.comment,
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }

    let mut attributes: Vec<_> = ontology.attributes().keys().map(|i| (name(i), i)).collect();
    attributes.sort_by(by_name);
    for (n, iri) in attributes {
        let attr = &ontology.attributes()[iri];
        let line = match style {
            CatalogStyle::NamesOnly => format!("Attribute: {n}"),
            CatalogStyle::Detailed => format!(
                "Attribute: {n} of {}, a {}",
                names_of(&mut attr.domains.iter()),
                attr.datatype.local_name()
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Turtle of the sub-ontology induced by `slice`.
pub fn verbalize_slice(ontology: &Ontology, slice: &Slice) -> Result<String, SliceError> {
    Ok(serialize_turtle(&slice.induce(ontology)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{vocab, Attribute, Concept, ElementKind, Relationship};
    use crate::slicer::{full_slice, seed_slice};

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://ex.org/t#{s}")).unwrap()
    }

    fn toy() -> Ontology {
        let mut b = Ontology::builder();
        b.prefix("ex", Iri::new("http://ex.org/t#").unwrap())
            .prefix("owl", Iri::new(vocab::OWL).unwrap());
        let mut customer = Concept::new(iri("Customer"));
        customer.comment = Some("Someone who pays.".into());
        b.concept(customer)
            .concept(Concept::new(iri("Plan")))
            .concept(Concept::new(iri("Store")));
        let mut has_plan = Relationship::new(iri("hasPlan"));
        has_plan.domains.insert(iri("Customer"));
        has_plan.ranges.insert(iri("Plan"));
        b.relationship(has_plan);
        b.attribute(Attribute {
            iri: iri("monthlyFee"),
            label: Some("monthly fee".into()),
            comment: None,
            domains: [iri("Store")].into(),
            datatype: Iri::new(format!("{}decimal", vocab::XSD)).unwrap(),
        });
        b.build().unwrap()
    }

    #[test]
    fn token_estimates() {
        assert_eq!(
            estimate_tokens(""),
            TokenEstimate {
                chars: 0,
                estimated_tokens: 0
            }
        );
        assert_eq!(estimate_tokens("abcdefgh").estimated_tokens, 2);
        assert_eq!(estimate_tokens("abcdefghi").estimated_tokens, 3);
        assert_eq!(estimate_tokens("ééé").chars, 3);
    }

    #[test]
    fn empty_catalog() {
        assert_eq!(verbalize_catalog(&Ontology::default()), "");
    }

    #[test]
    fn detailed_catalog_lines() {
        let text = verbalize_catalog(&toy());
        assert_eq!(
            text,
            "Concept: Customer — Someone who pays.\n\
             Concept: Plan\n\
             Concept: Store\n\
             Relationship: has plan (connects Customer to Plan)\n\
             Attribute: monthly fee of Store, a decimal\n"
        );
    }

    #[test]
    fn names_only_catalog() {
        let text = verbalize_catalog_with(&toy(), CatalogStyle::NamesOnly);
        assert_eq!(
            text,
            "Concept: Customer\nConcept: Plan\nConcept: Store\nRelationship: has plan\nAttribute: monthly fee\n"
        );
    }

    #[test]
    fn catalog_line_count_matches_elements_and_is_shorter_than_turtle() {
        let o = toy();
        let catalog = verbalize_catalog(&o);
        assert_eq!(catalog.lines().count(), o.len());
        assert!(catalog.chars().count() < serialize_turtle(&o).chars().count());
    }

    #[test]
    fn slice_renderings() {
        let o = toy();
        assert_eq!(
            verbalize_slice(&o, &full_slice(&o)).unwrap(),
            serialize_turtle(&o)
        );
        let empty = verbalize_slice(&o, &Slice::default()).unwrap();
        assert!(empty.lines().all(|l| l.starts_with("@prefix")));

        let s = seed_slice(&o, &[iri("hasPlan")]).unwrap();
        let text = verbalize_slice(&o, &s).unwrap();
        assert_eq!(text.split("\n\n").count() - 1, 3);

        let mut foreign = Slice::default();
        foreign.insert(iri("Ghost"), ElementKind::Concept);
        assert!(verbalize_slice(&o, &foreign).is_err());
    }
}
