//! Vocabulary extraction from SPARQL queries and conformance with a slice.
//!
//! The parser accepts a SELECT subset covering analytical questions over a
//! schema: prefix declarations, projections with expressions,
//! basic graph patterns, `UNION`, `OPTIONAL`, `FILTER`, sequence and inverse
//! property paths, solution modifiers, the five standard aggregates and
//! subqueries one level deep. Anything else is reported as a parse error
//! rather than silently accepted.

mod lexer;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::{Iri, Ontology};
use crate::slicer::Slice;

pub use lexer::{tokenize, LexError, Tok, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feature {
    Union,
    Optional,
    Filter,
    GroupBy,
    Having,
    OrderBy,
    Subquery,
    PropertyPath,
    AggregateCount,
    AggregateSum,
    AggregateAvg,
    AggregateMin,
    AggregateMax,
}

/// Where an IRI first appears in the query, spelled as in the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IriUse {
    pub token: String,
    pub location: Location,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparqlSkeleton {
    /// Objects of `rdf:type` patterns.
    pub class_iris: BTreeSet<Iri>,
    /// IRIs in predicate position, built-in vocabularies excluded.
    pub predicate_iris: BTreeSet<Iri>,
    pub variables: BTreeSet<String>,
    pub features: BTreeSet<Feature>,
    pub prefix_decls: BTreeMap<String, Iri>,
    pub occurrences: BTreeMap<Iri, IriUse>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    UnknownClass,
    UnknownPredicate,
    UnprefixedName,
    ParseError,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::UnknownClass => "unknown-class",
            ViolationKind::UnknownPredicate => "unknown-predicate",
            ViolationKind::UnprefixedName => "unprefixed-name",
            ViolationKind::ParseError => "parse-error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceViolation {
    pub kind: ViolationKind,
    /// Source text of the offending token; empty at end of input.
    pub offending: String,
    pub location: Location,
    pub detail: String,
}

pub const NOT_IN_SLICE: &str = "not in slice";
pub const NOT_IN_ONTOLOGY: &str = "not in ontology";

/// Tab-separated: kind, offending token, line:column, detail.
impl fmt::Display for ConformanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.kind, self.offending, self.location, self.detail
        )
    }
}

pub fn extract_skeleton(query: &str) -> Result<SparqlSkeleton, Vec<ConformanceViolation>> {
    parser::parse(query)
}

/// Every class must be a concept of `slice` and every predicate one of its
/// relationships or attributes. Violations come out in source order.
pub fn check_conformance(
    skeleton: &SparqlSkeleton,
    ontology: &Ontology,
    slice: &Slice,
) -> Vec<ConformanceViolation> {
    let mut out = Vec::new();
    let mut flag = |iri: &Iri, kind: ViolationKind| {
        let detail = if ontology.contains(iri) {
            NOT_IN_SLICE
        } else {
            NOT_IN_ONTOLOGY
        };
        let (offending, location) = match skeleton.occurrences.get(iri) {
            Some(u) => (u.token.clone(), u.location),
            None => (format!("<{iri}>"), Location { line: 0, column: 0 }),
        };
        out.push(ConformanceViolation {
            kind,
            offending,
            location,
            detail: detail.to_string(),
        });
    };
    for iri in &skeleton.class_iris {
        if !slice.concepts().contains(iri) {
            flag(iri, ViolationKind::UnknownClass);
        }
    }
    for iri in &skeleton.predicate_iris {
        if !slice.relationships().contains(iri) && !slice.attributes().contains(iri) {
            flag(iri, ViolationKind::UnknownPredicate);
        }
    }
    out.sort_by(|a, b| a.location.cmp(&b.location).then(a.kind.cmp(&b.kind)));
    out
}
