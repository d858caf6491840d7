//! Turtle input and output for the supported OWL subset.
//!
//! Parsing is all-or-nothing: either a valid [`Ontology`] plus warnings for
//! the statements that were skipped, or the full list of diagnostics.

mod lexer;
mod parser;
mod writer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::ontology::{
    vocab, Attribute, Concept, ElementKind, Iri, Ontology, OntologyError, Relationship,
};

pub use parser::{parse_document, Document, Term, Triple};
pub use writer::serialize_turtle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub(crate) fn error(pos: Position, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line: pos.line,
            column: pos.column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub(crate) fn warning(pos: Position, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: Severity::Warning,
            ..Self::error(pos, message)
        }
    }

    pub fn position(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, severity, self.message
        )
    }
}

/// A successfully loaded ontology and the warnings for skipped statements.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub ontology: Ontology,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Parses raw bytes, reporting invalid UTF-8 as a diagnostic.
pub fn parse_turtle_bytes(input: &[u8]) -> Result<Parsed, Vec<ParseDiagnostic>> {
    match std::str::from_utf8(input) {
        Ok(text) => parse_turtle(text),
        Err(e) => {
            let valid = String::from_utf8_lossy(&input[..e.valid_up_to()]);
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(vec![ParseDiagnostic::error(
                Position { line, column },
                "input is not valid UTF-8",
            )])
        }
    }
}

pub fn parse_turtle(input: &str) -> Result<Parsed, Vec<ParseDiagnostic>> {
    let document = parse_document(input)?;
    interpret(&document)
}

struct Declared {
    kind: ElementKind,
    pos: Position,
}

#[derive(Default)]
struct Draft {
    label: Option<String>,
    comment: Option<String>,
    superclasses: BTreeSet<Iri>,
    domains: BTreeSet<Iri>,
    ranges: BTreeSet<Iri>,
}

fn literal_text(term: &Term) -> Option<&str> {
    match term {
        Term::Literal {
            value,
            datatype: None,
            ..
        } => Some(value),
        Term::Literal {
            value,
            datatype: Some(dt),
            ..
        } if dt.as_str() == vocab::XSD_STRING => Some(value),
        _ => None,
    }
}

/// Maps parsed triples onto the ontology subset.
fn interpret(document: &Document) -> Result<Parsed, Vec<ParseDiagnostic>> {
    let mut diagnostics = Vec::new();
    let mut declared: BTreeMap<Iri, Declared> = BTreeMap::new();

    for t in &document.triples {
        if t.predicate.as_str() != vocab::RDF_TYPE {
            continue;
        }
        let kind = match t.object.as_iri().map(Iri::as_str) {
            Some(vocab::OWL_CLASS) => ElementKind::Concept,
            Some(vocab::OWL_OBJECT_PROPERTY) => ElementKind::Relationship,
            Some(vocab::OWL_DATATYPE_PROPERTY) => ElementKind::Attribute,
            _ => continue,
        };
        let Some(subject) = t.subject.as_iri() else {
            diagnostics.push(ParseDiagnostic::warning(
                t.subject_pos,
                "anonymous declarations are not supported; skipped",
            ));
            continue;
        };
        if subject.is_builtin() {
            diagnostics.push(ParseDiagnostic::warning(
                t.subject_pos,
                format!("declaration of built-in {subject} skipped"),
            ));
            continue;
        }
        match declared.get(subject) {
            Some(existing) if existing.kind != kind => diagnostics.push(ParseDiagnostic::error(
                t.subject_pos,
                format!(
                    "{subject} is declared both as {:?} and {:?}",
                    existing.kind, kind
                ),
            )),
            Some(_) => {}
            None => {
                declared.insert(
                    subject.clone(),
                    Declared {
                        kind,
                        pos: t.subject_pos,
                    },
                );
            }
        }
    }

    let mut drafts: BTreeMap<Iri, Draft> = declared
        .keys()
        .map(|k| (k.clone(), Draft::default()))
        .collect();
    let kind_of = |iri: &Iri| declared.get(iri).map(|d| d.kind);

    for t in &document.triples {
        let subject = match &t.subject {
            Term::Iri(iri) => iri,
            Term::Blank {
                generated: true, ..
            } => continue,
            Term::Blank { id, .. } => {
                diagnostics.push(ParseDiagnostic::warning(
                    t.subject_pos,
                    format!("statement about blank node _:{id} skipped"),
                ));
                continue;
            }
            Term::Literal { .. } => continue,
        };
        let predicate = t.predicate.as_str();
        match predicate {
            vocab::RDF_TYPE => {
                let supported = matches!(
                    t.object.as_iri().map(Iri::as_str),
                    Some(
                        vocab::OWL_CLASS
                            | vocab::OWL_OBJECT_PROPERTY
                            | vocab::OWL_DATATYPE_PROPERTY
                    )
                );
                if !supported {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.object_pos,
                        format!("unsupported type for {subject}; statement skipped"),
                    ));
                }
            }
            vocab::RDFS_LABEL | vocab::RDFS_COMMENT => {
                let Some(draft) = drafts.get_mut(subject) else {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.subject_pos,
                        format!("annotation on undeclared {subject} skipped"),
                    ));
                    continue;
                };
                let Some(text) = literal_text(&t.object) else {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.object_pos,
                        "annotation value is not a string literal; skipped",
                    ));
                    continue;
                };
                let is_label = predicate == vocab::RDFS_LABEL;
                let slot = if is_label {
                    &mut draft.label
                } else {
                    &mut draft.comment
                };
                if is_label && text.trim().is_empty() {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.object_pos,
                        "empty label skipped",
                    ));
                } else if slot.is_some() {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.object_pos,
                        "additional annotation value ignored; the first one wins",
                    ));
                } else {
                    *slot = Some(text.to_string());
                }
            }
            vocab::RDFS_SUBCLASS_OF | vocab::RDFS_DOMAIN | vocab::RDFS_RANGE => {
                let subject_kind = kind_of(subject);
                let expected_subject = if predicate == vocab::RDFS_SUBCLASS_OF {
                    matches!(subject_kind, Some(ElementKind::Concept))
                } else {
                    matches!(
                        subject_kind,
                        Some(ElementKind::Relationship | ElementKind::Attribute)
                    )
                };
                if !expected_subject {
                    let wanted = if predicate == vocab::RDFS_SUBCLASS_OF {
                        "an owl:Class"
                    } else {
                        "an owl:ObjectProperty or owl:DatatypeProperty"
                    };
                    diagnostics.push(ParseDiagnostic::error(
                        t.subject_pos,
                        format!("{subject} is not declared as {wanted}"),
                    ));
                    continue;
                }
                let Some(object) = t.object.as_iri() else {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.object_pos,
                        "class expressions are not supported; statement skipped",
                    ));
                    continue;
                };
                let draft = drafts
                    .get_mut(subject)
                    .expect("declared subjects have drafts");
                let attribute_range =
                    predicate == vocab::RDFS_RANGE && subject_kind == Some(ElementKind::Attribute);
                if attribute_range {
                    if !object.as_str().starts_with(vocab::XSD) {
                        diagnostics.push(ParseDiagnostic::error(
                            t.object_pos,
                            format!("range of attribute {subject} must be an xsd datatype"),
                        ));
                    } else if draft.ranges.insert(object.clone()) && draft.ranges.len() > 1 {
                        diagnostics.push(ParseDiagnostic::error(
                            t.object_pos,
                            format!("attribute {subject} has more than one datatype"),
                        ));
                    }
                    continue;
                }
                if predicate == vocab::RDFS_SUBCLASS_OF && object.as_str() == vocab::OWL_THING {
                    diagnostics.push(ParseDiagnostic::warning(
                        t.object_pos,
                        "subclass of owl:Thing is implicit; skipped",
                    ));
                    continue;
                }
                if kind_of(object) != Some(ElementKind::Concept) {
                    diagnostics.push(ParseDiagnostic::error(
                        t.object_pos,
                        format!("{object} is not a declared owl:Class"),
                    ));
                    continue;
                }
                if predicate == vocab::RDFS_SUBCLASS_OF && object == subject {
                    diagnostics.push(ParseDiagnostic::error(
                        t.object_pos,
                        format!("{subject} cannot be its own superclass"),
                    ));
                    continue;
                }
                let set = match predicate {
                    vocab::RDFS_SUBCLASS_OF => &mut draft.superclasses,
                    vocab::RDFS_DOMAIN => &mut draft.domains,
                    _ => &mut draft.ranges,
                };
                set.insert(object.clone());
            }
            _ => diagnostics.push(ParseDiagnostic::warning(
                t.subject_pos,
                format!("unsupported predicate {predicate}; statement skipped"),
            )),
        }
    }

    let mut builder = Ontology::builder();
    for (prefix, namespace) in &document.prefixes {
        builder.prefix(prefix.clone(), namespace.clone());
    }
    for (iri, draft) in drafts {
        let decl = &declared[&iri];
        let missing = |what: &str| ParseDiagnostic::error(decl.pos, format!("{iri} has no {what}"));
        match decl.kind {
            ElementKind::Concept => {
                builder.concept(Concept {
                    iri: iri.clone(),
                    label: draft.label,
                    comment: draft.comment,
                    superclasses: draft.superclasses,
                });
            }
            ElementKind::Relationship => {
                if draft.domains.is_empty() {
                    diagnostics.push(missing("rdfs:domain"));
                }
                if draft.ranges.is_empty() {
                    diagnostics.push(missing("rdfs:range"));
                }
                builder.relationship(Relationship {
                    iri: iri.clone(),
                    label: draft.label,
                    comment: draft.comment,
                    domains: draft.domains,
                    ranges: draft.ranges,
                });
            }
            ElementKind::Attribute => {
                if draft.domains.is_empty() {
                    diagnostics.push(missing("rdfs:domain"));
                }
                match draft.ranges.iter().next() {
                    None => diagnostics.push(missing("xsd datatype range")),
                    Some(datatype) => {
                        builder.attribute(Attribute {
                            iri: iri.clone(),
                            label: draft.label,
                            comment: draft.comment,
                            domains: draft.domains,
                            datatype: datatype.clone(),
                        });
                    }
                }
            }
        }
    }

    if diagnostics.iter().any(ParseDiagnostic::is_error) {
        diagnostics.sort_by_key(|d| (d.line, d.column));
        return Err(diagnostics);
    }
    match builder.build() {
        Ok(ontology) => {
            diagnostics.sort_by_key(|d| (d.line, d.column));
            Ok(Parsed {
                ontology,
                warnings: diagnostics,
            })
        }
        Err(e) => {
            let pos = offending_iri(&e)
                .and_then(|iri| declared.get(iri))
                .map_or(Position { line: 1, column: 1 }, |d| d.pos);
            diagnostics.push(ParseDiagnostic::error(pos, e.to_string()));
            diagnostics.sort_by_key(|d| (d.line, d.column));
            Err(diagnostics)
        }
    }
}

fn offending_iri(error: &OntologyError) -> Option<&Iri> {
    match error {
        OntologyError::DuplicateElement(i)
        | OntologyError::ReservedIri(i)
        | OntologyError::EmptyLabel(i)
        | OntologyError::SelfSuperclass(i)
        | OntologyError::SuperclassCycle(i)
        | OntologyError::MissingDomain(i)
        | OntologyError::MissingRange(i)
        | OntologyError::UnknownConcept(i) => Some(i),
        OntologyError::DanglingReference { element, .. } => Some(element),
        OntologyError::NonXsdDatatype { attribute, .. } => Some(attribute),
        OntologyError::InvalidIri(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "@prefix ex: <http://ex.org/t#> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n";

    fn parse_ok(body: &str) -> Parsed {
        parse_turtle(&format!("{HEADER}{body}")).unwrap_or_else(|d| panic!("{d:?}"))
    }

    fn parse_err(body: &str) -> Vec<ParseDiagnostic> {
        parse_turtle(&format!("{HEADER}{body}")).unwrap_err()
    }

    #[test]
    fn empty_input_is_empty_ontology() {
        let parsed = parse_turtle("").unwrap();
        assert!(parsed.ontology.is_empty());
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn three_line_class_document() {
        let parsed = parse_turtle(
            "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n<http://ex.org/Customer> a owl:Class ; rdfs:label \"Customer\" .",
        )
        .unwrap();
        assert_eq!(parsed.ontology.concepts().len(), 1);
        assert_eq!(parsed.ontology.axiom_count(), 2);
    }

    #[test]
    fn undeclared_prefix_is_one_error_at_its_line() {
        let errors =
            parse_turtle("@prefix owl: <http://www.w3.org/2002/07/owl#> .\nex:A a owl:Class .")
                .unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].line, 2);
        assert!(errors[0].is_error());
    }

    #[test]
    fn language_tags_are_stripped_and_first_value_wins() {
        let p = parse_ok("ex:A a owl:Class ; rdfs:label \"Kunde\"@de , \"Customer\"@en .");
        let a = p
            .ontology
            .concept(&Iri::new("http://ex.org/t#A").unwrap())
            .unwrap();
        assert_eq!(a.label.as_deref(), Some("Kunde"));
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn unsupported_statements_warn_and_skip() {
        let p = parse_ok(
            "<http://ex.org/t> a owl:Ontology .\nex:A a owl:Class ; ex:note \"x\" ; rdfs:subClassOf owl:Thing .\nex:p a owl:ObjectProperty ; rdfs:domain ex:A ; rdfs:range ex:A ; rdfs:range [ owl:unionOf ( ex:A ex:A ) ] .",
        );
        assert_eq!(p.ontology.len(), 2);
        assert_eq!(p.warnings.len(), 4, "{:?}", p.warnings);
        assert!(p.warnings.iter().all(|w| !w.is_error()));
    }

    #[test]
    fn structural_violations_are_errors() {
        let errors = parse_err("ex:p a owl:ObjectProperty ; rdfs:domain ex:Ghost .");
        assert_eq!(errors.len(), 3, "{errors:?}");
        assert!(errors.iter().any(|e| e.message.contains("Ghost")));
        assert!(errors.iter().any(|e| e.message.contains("rdfs:range")));

        let errors = parse_err(
            "ex:A a owl:Class ; rdfs:subClassOf ex:B .\nex:B a owl:Class ; rdfs:subClassOf ex:A .",
        );
        assert_eq!(errors.len(), 1);
        assert!(errors[0].message.contains("cycle"));

        let errors = parse_err("ex:A a owl:Class .\nex:A a owl:ObjectProperty .");
        assert!(errors.iter().any(|e| e.line == 6));
    }

    #[test]
    fn attribute_ranges_must_be_single_xsd_datatype() {
        let p = parse_ok("ex:A a owl:Class .\nex:n a owl:DatatypeProperty ; rdfs:domain ex:A ; rdfs:range xsd:string .");
        assert_eq!(p.ontology.attributes().len(), 1);
        assert!(parse_err("ex:A a owl:Class .\nex:n a owl:DatatypeProperty ; rdfs:domain ex:A ; rdfs:range ex:A .")
            .iter()
            .any(|e| e.message.contains("xsd")));
        assert!(parse_err(
            "ex:A a owl:Class .\nex:n a owl:DatatypeProperty ; rdfs:domain ex:A ; rdfs:range xsd:string, xsd:integer ."
        )
        .iter()
        .any(|e| e.message.contains("more than one")));
    }

    #[test]
    fn invalid_utf8_is_a_diagnostic() {
        let errors = parse_turtle_bytes(b"ex:a\n  \xff").unwrap_err();
        assert_eq!((errors[0].line, errors[0].column), (2, 3));
    }
}
