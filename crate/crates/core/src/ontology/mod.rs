//! In-memory model of the OWL subset the pipeline understands.
//!
//! An [`Ontology`] is built once through [`OntologyBuilder`], validated, and
//! then only read. Besides the three element maps it keeps the derived
//! indexes that slicing and path-finding traverse: the undirected neighbor
//! lists, the subclass lists and the attributes attached to each concept.

mod index;
pub mod vocab;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use index::{canonicalize_name, split_identifier, NameIndex};

/// An absolute IRI, compared byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, OntologyError> {
        let value = value.into();
        if is_absolute_iri(&value) {
            Ok(Iri(value))
        } else {
            Err(OntologyError::InvalidIri(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#`, `/` or `:`.
    pub fn local_name(&self) -> &str {
        let cut = self
            .0
            .rfind('#')
            .or_else(|| self.0.rfind('/'))
            .or_else(|| self.0.find(':'))
            .map_or(0, |i| i + 1);
        &self.0[cut..]
    }

    pub fn is_builtin(&self) -> bool {
        vocab::is_builtin(&self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = OntologyError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn is_absolute_iri(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !value.chars().any(|c| {
            c.is_whitespace()
                || c.is_control()
                || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("not an absolute IRI: {0:?}")]
    InvalidIri(String),
    #[error("element {0} is declared more than once")]
    DuplicateElement(Iri),
    #[error("element {0} uses a reserved rdf/rdfs/owl/xsd IRI")]
    ReservedIri(Iri),
    #[error("element {0} has an empty label")]
    EmptyLabel(Iri),
    #[error("concept {0} is its own superclass")]
    SelfSuperclass(Iri),
    #[error("superclass cycle through {0}")]
    SuperclassCycle(Iri),
    #[error("{element} references {referenced}, which is not a concept")]
    DanglingReference { element: Iri, referenced: Iri },
    #[error("property {0} has no domain")]
    MissingDomain(Iri),
    #[error("property {0} has no range")]
    MissingRange(Iri),
    #[error("attribute {attribute} has non-xsd datatype {datatype}")]
    NonXsdDatatype { attribute: Iri, datatype: Iri },
    #[error("unknown concept {0}")]
    UnknownConcept(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub iri: Iri,
    pub label: Option<String>,
    pub comment: Option<String>,
    pub superclasses: BTreeSet<Iri>,
}

impl Concept {
    pub fn new(iri: Iri) -> Self {
        Concept {
            iri,
            label: None,
            comment: None,
            superclasses: BTreeSet::new(),
        }
    }
}

/// An object property. Several domains or ranges are read as alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relationship {
    pub iri: Iri,
    pub label: Option<String>,
    pub comment: Option<String>,
    pub domains: BTreeSet<Iri>,
    pub ranges: BTreeSet<Iri>,
}

impl Relationship {
    pub fn new(iri: Iri) -> Self {
        Relationship {
            iri,
            label: None,
            comment: None,
            domains: BTreeSet::new(),
            ranges: BTreeSet::new(),
        }
    }
}

/// A datatype property with an xsd range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub iri: Iri,
    pub label: Option<String>,
    pub comment: Option<String>,
    pub domains: BTreeSet<Iri>,
    pub datatype: Iri,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Concept,
    Relationship,
    Attribute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Outgoing,
    Incoming,
    Super,
    Sub,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Outgoing => Direction::Incoming,
            Direction::Incoming => Direction::Outgoing,
            Direction::Super => Direction::Sub,
            Direction::Sub => Direction::Super,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Outgoing => "outgoing",
            Direction::Incoming => "incoming",
            Direction::Super => "super",
            Direction::Sub => "sub",
        })
    }
}

/// One edge of the undirected concept graph, seen from a concept.
///
/// Subclass edges carry `rdfs:subClassOf` as their edge IRI. Ordering is by
/// edge IRI, then the other endpoint, then direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Neighbor {
    pub edge: Iri,
    pub other: Iri,
    pub direction: Direction,
}

#[derive(Debug, Default, Clone)]
pub struct OntologyBuilder {
    prefixes: BTreeMap<String, Iri>,
    concepts: Vec<Concept>,
    relationships: Vec<Relationship>,
    attributes: Vec<Attribute>,
}

impl OntologyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prefix(&mut self, prefix: impl Into<String>, namespace: Iri) -> &mut Self {
        self.prefixes.insert(prefix.into(), namespace);
        self
    }

    pub fn concept(&mut self, concept: Concept) -> &mut Self {
        self.concepts.push(concept);
        self
    }

    pub fn relationship(&mut self, relationship: Relationship) -> &mut Self {
        self.relationships.push(relationship);
        self
    }

    pub fn attribute(&mut self, attribute: Attribute) -> &mut Self {
        self.attributes.push(attribute);
        self
    }

    pub fn build(self) -> Result<Ontology, OntologyError> {
        let mut seen = BTreeSet::new();
        let declared = self
            .concepts
            .iter()
            .map(|c| &c.iri)
            .chain(self.relationships.iter().map(|r| &r.iri))
            .chain(self.attributes.iter().map(|a| &a.iri));
        for iri in declared {
            if iri.is_builtin() {
                return Err(OntologyError::ReservedIri(iri.clone()));
            }
            if !seen.insert(iri.clone()) {
                return Err(OntologyError::DuplicateElement(iri.clone()));
            }
        }

        let concepts: BTreeMap<Iri, Concept> = self
            .concepts
            .into_iter()
            .map(|c| (c.iri.clone(), c))
            .collect();
        let relationships: BTreeMap<Iri, Relationship> = self
            .relationships
            .into_iter()
            .map(|r| (r.iri.clone(), r))
            .collect();
        let attributes: BTreeMap<Iri, Attribute> = self
            .attributes
            .into_iter()
            .map(|a| (a.iri.clone(), a))
            .collect();

        let check_ref = |element: &Iri, referenced: &Iri| {
            if concepts.contains_key(referenced) {
                Ok(())
            } else {
                Err(OntologyError::DanglingReference {
                    element: element.clone(),
                    referenced: referenced.clone(),
                })
            }
        };
        let check_label = |iri: &Iri, label: &Option<String>| match label {
            Some(l) if l.trim().is_empty() => Err(OntologyError::EmptyLabel(iri.clone())),
            _ => Ok(()),
        };

        for c in concepts.values() {
            check_label(&c.iri, &c.label)?;
            if c.superclasses.contains(&c.iri) {
                return Err(OntologyError::SelfSuperclass(c.iri.clone()));
            }
            for s in &c.superclasses {
                check_ref(&c.iri, s)?;
            }
        }
        for r in relationships.values() {
            check_label(&r.iri, &r.label)?;
            if r.domains.is_empty() {
                return Err(OntologyError::MissingDomain(r.iri.clone()));
            }
            if r.ranges.is_empty() {
                return Err(OntologyError::MissingRange(r.iri.clone()));
            }
            for c in r.domains.iter().chain(&r.ranges) {
                check_ref(&r.iri, c)?;
            }
        }
        for a in attributes.values() {
            check_label(&a.iri, &a.label)?;
            if a.domains.is_empty() {
                return Err(OntologyError::MissingDomain(a.iri.clone()));
            }
            for c in &a.domains {
                check_ref(&a.iri, c)?;
            }
            if !a.datatype.as_str().starts_with(vocab::XSD) {
                return Err(OntologyError::NonXsdDatatype {
                    attribute: a.iri.clone(),
                    datatype: a.datatype.clone(),
                });
            }
        }
        check_acyclic(&concepts)?;

        Ok(Ontology::with_indexes(
            self.prefixes,
            concepts,
            relationships,
            attributes,
        ))
    }
}

fn check_acyclic(concepts: &BTreeMap<Iri, Concept>) -> Result<(), OntologyError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Finished,
    }
    let mut marks: BTreeMap<&Iri, Mark> = BTreeMap::new();
    for root in concepts.keys() {
        if marks.contains_key(root) {
            continue;
        }
        // Iterative DFS; each frame holds a node and its remaining superclasses.
        let mut stack = vec![(root, concepts[root].superclasses.iter())];
        marks.insert(root, Mark::Active);
        while let Some((node, supers)) = stack.last_mut() {
            match supers.next() {
                Some(next) => match marks.get(next) {
                    Some(Mark::Active) => return Err(OntologyError::SuperclassCycle(next.clone())),
                    Some(Mark::Finished) => {}
                    None => {
                        marks.insert(next, Mark::Active);
                        stack.push((next, concepts[next].superclasses.iter()));
                    }
                },
                None => {
                    marks.insert(node, Mark::Finished);
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}

/// A validated, immutable ontology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    prefixes: BTreeMap<String, Iri>,
    concepts: BTreeMap<Iri, Concept>,
    relationships: BTreeMap<Iri, Relationship>,
    attributes: BTreeMap<Iri, Attribute>,
    adjacency: BTreeMap<Iri, Vec<Neighbor>>,
    subclasses: BTreeMap<Iri, BTreeSet<Iri>>,
    attributes_by_domain: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl Default for Ontology {
    fn default() -> Self {
        Ontology::with_indexes(
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        )
    }
}

impl Ontology {
    pub fn builder() -> OntologyBuilder {
        OntologyBuilder::new()
    }

    fn with_indexes(
        prefixes: BTreeMap<String, Iri>,
        concepts: BTreeMap<Iri, Concept>,
        relationships: BTreeMap<Iri, Relationship>,
        attributes: BTreeMap<Iri, Attribute>,
    ) -> Self {
        let subclass_edge = Iri(vocab::RDFS_SUBCLASS_OF.to_string());
        let mut adjacency: BTreeMap<Iri, BTreeSet<Neighbor>> = concepts
            .keys()
            .map(|c| (c.clone(), BTreeSet::new()))
            .collect();
        let mut subclasses: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        let mut link = |from: &Iri, edge: &Iri, direction: Direction, to: &Iri| {
            if let Some(list) = adjacency.get_mut(from) {
                list.insert(Neighbor {
                    edge: edge.clone(),
                    other: to.clone(),
                    direction,
                });
            }
            if let Some(list) = adjacency.get_mut(to) {
                list.insert(Neighbor {
                    edge: edge.clone(),
                    other: from.clone(),
                    direction: direction.reversed(),
                });
            }
        };
        for c in concepts.values() {
            for s in &c.superclasses {
                link(&c.iri, &subclass_edge, Direction::Super, s);
                subclasses
                    .entry(s.clone())
                    .or_default()
                    .insert(c.iri.clone());
            }
        }
        for r in relationships.values() {
            for d in &r.domains {
                for g in &r.ranges {
                    link(d, &r.iri, Direction::Outgoing, g);
                }
            }
        }
        let mut attributes_by_domain: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for a in attributes.values() {
            for d in &a.domains {
                attributes_by_domain
                    .entry(d.clone())
                    .or_default()
                    .insert(a.iri.clone());
            }
        }
        Ontology {
            prefixes,
            concepts,
            relationships,
            attributes,
            adjacency: adjacency
                .into_iter()
                .map(|(k, v)| (k, v.into_iter().collect()))
                .collect(),
            subclasses,
            attributes_by_domain,
        }
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    pub fn concepts(&self) -> &BTreeMap<Iri, Concept> {
        &self.concepts
    }

    pub fn relationships(&self) -> &BTreeMap<Iri, Relationship> {
        &self.relationships
    }

    pub fn attributes(&self) -> &BTreeMap<Iri, Attribute> {
        &self.attributes
    }

    pub fn concept(&self, iri: &Iri) -> Option<&Concept> {
        self.concepts.get(iri)
    }

    pub fn relationship(&self, iri: &Iri) -> Option<&Relationship> {
        self.relationships.get(iri)
    }

    pub fn attribute(&self, iri: &Iri) -> Option<&Attribute> {
        self.attributes.get(iri)
    }

    pub fn kind_of(&self, iri: &Iri) -> Option<ElementKind> {
        if self.concepts.contains_key(iri) {
            Some(ElementKind::Concept)
        } else if self.relationships.contains_key(iri) {
            Some(ElementKind::Relationship)
        } else if self.attributes.contains_key(iri) {
            Some(ElementKind::Attribute)
        } else {
            None
        }
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.kind_of(iri).is_some()
    }

    /// Total number of concepts, relationships and attributes.
    pub fn len(&self) -> usize {
        self.concepts.len() + self.relationships.len() + self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every element IRI with its kind, concepts first.
    pub fn elements(&self) -> impl Iterator<Item = (&Iri, ElementKind)> {
        self.concepts
            .keys()
            .map(|i| (i, ElementKind::Concept))
            .chain(
                self.relationships
                    .keys()
                    .map(|i| (i, ElementKind::Relationship)),
            )
            .chain(self.attributes.keys().map(|i| (i, ElementKind::Attribute)))
    }

    /// Number of axioms, equal to the number of triples the Turtle writer
    /// emits for this ontology.
    pub fn axiom_count(&self) -> usize {
        let annotations = |label: &Option<String>, comment: &Option<String>| {
            1 + usize::from(label.is_some()) + usize::from(comment.is_some())
        };
        let concepts: usize = self
            .concepts
            .values()
            .map(|c| annotations(&c.label, &c.comment) + c.superclasses.len())
            .sum();
        let relationships: usize = self
            .relationships
            .values()
            .map(|r| annotations(&r.label, &r.comment) + r.domains.len() + r.ranges.len())
            .sum();
        let attributes: usize = self
            .attributes
            .values()
            .map(|a| annotations(&a.label, &a.comment) + a.domains.len() + 1)
            .sum();
        concepts + relationships + attributes
    }

    /// Relationship and subclass edges touching `concept`, sorted by
    /// (edge, other, direction).
    pub fn neighbors(&self, concept: &Iri) -> Result<&[Neighbor], OntologyError> {
        self.adjacency
            .get(concept)
            .map(Vec::as_slice)
            .ok_or_else(|| OntologyError::UnknownConcept(concept.clone()))
    }

    /// Direct subclasses of `concept`.
    pub fn subclasses_of(&self, concept: &Iri) -> impl Iterator<Item = &Iri> {
        self.subclasses.get(concept).into_iter().flatten()
    }

    /// Attributes whose domains include `concept`.
    pub fn attributes_of(&self, concept: &Iri) -> impl Iterator<Item = &Iri> {
        self.attributes_by_domain.get(concept).into_iter().flatten()
    }

    pub fn label(&self, iri: &Iri) -> Option<&str> {
        let label = match self.kind_of(iri)? {
            ElementKind::Concept => &self.concepts[iri].label,
            ElementKind::Relationship => &self.relationships[iri].label,
            ElementKind::Attribute => &self.attributes[iri].label,
        };
        label.as_deref()
    }

    /// Human-facing name: the label when present, else the split local name.
    pub fn display_name(&self, iri: &Iri) -> String {
        match self.label(iri) {
            Some(label) => label.trim().to_string(),
            None => split_identifier(iri.local_name()),
        }
    }

    /// Expands `prefix:local` using the ontology's prefixes.
    pub fn expand_prefixed(&self, name: &str) -> Option<Iri> {
        let (prefix, local) = name.split_once(':')?;
        let namespace = self.prefixes.get(prefix)?;
        Iri::new(format!("{}{}", namespace.as_str(), local)).ok()
    }

    /// Shortest prefixed form of `iri`, if any prefix covers it.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        self.prefixes
            .iter()
            .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()))
            .max_by(|a, b| {
                a.1.as_str()
                    .len()
                    .cmp(&b.1.as_str().len())
                    .then(b.0.cmp(a.0))
            })
            .map(|(p, ns)| format!("{}:{}", p, &iri.as_str()[ns.as_str().len()..]))
    }

    /// The sub-ontology containing exactly the given elements. Callers
    /// guarantee the element sets are closed under references.
    pub(crate) fn restrict(
        &self,
        concepts: &BTreeSet<Iri>,
        relationships: &BTreeSet<Iri>,
        attributes: &BTreeSet<Iri>,
    ) -> Ontology {
        fn pick<T: Clone>(map: &BTreeMap<Iri, T>, keys: &BTreeSet<Iri>) -> BTreeMap<Iri, T> {
            map.iter()
                .filter(|(k, _)| keys.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect()
        }
        Ontology::with_indexes(
            self.prefixes.clone(),
            pick(&self.concepts, concepts),
            pick(&self.relationships, relationships),
            pick(&self.attributes, attributes),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn iri(s: &str) -> Iri {
        Iri::new(format!("http://example.org/t#{s}")).unwrap()
    }

    fn concept(name: &str, supers: &[&str]) -> Concept {
        let mut c = Concept::new(iri(name));
        c.superclasses = supers.iter().map(|s| iri(s)).collect();
        c
    }

    fn relationship(name: &str, domain: &[&str], range: &[&str]) -> Relationship {
        let mut r = Relationship::new(iri(name));
        r.domains = domain.iter().map(|s| iri(s)).collect();
        r.ranges = range.iter().map(|s| iri(s)).collect();
        r
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://example.org/x").is_ok());
        assert!(Iri::new("urn:isbn:123").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("Customer").is_err());
        assert!(Iri::new("1http://x").is_err());
        assert!(Iri::new("http://ex ample.org").is_err());
        assert!(Iri::new("http://example.org/<x>").is_err());
    }

    #[test]
    fn local_names() {
        assert_eq!(iri("Customer").local_name(), "Customer");
        assert_eq!(Iri::new("http://a.org/b/c").unwrap().local_name(), "c");
        assert_eq!(Iri::new("urn:x").unwrap().local_name(), "x");
    }

    #[test]
    fn empty_ontology_has_no_axioms() {
        assert_eq!(Ontology::default().axiom_count(), 0);
        assert!(Ontology::builder().build().unwrap().is_empty());
    }

    #[test]
    fn axiom_count_concept_with_label_comment_superclass() {
        let mut b = Ontology::builder();
        let mut c = concept("Plan", &["Product"]);
        c.label = Some("Plan".into());
        c.comment = Some("A service plan.".into());
        b.concept(c).concept(concept("Product", &[]));
        let o = b.build().unwrap();
        // Plan: declaration + label + comment + 1 superclass = 4; Product: 1.
        assert_eq!(o.axiom_count(), 4 + 1);
    }

    #[test]
    fn rejects_dangling_and_missing_endpoints() {
        let mut b = Ontology::builder();
        b.concept(concept("A", &["Ghost"]));
        assert!(matches!(
            b.build(),
            Err(OntologyError::DanglingReference { .. })
        ));

        let mut b = Ontology::builder();
        b.concept(concept("A", &[]))
            .relationship(relationship("r", &["A"], &[]));
        assert_eq!(b.build(), Err(OntologyError::MissingRange(iri("r"))));

        let mut b = Ontology::builder();
        b.concept(concept("A", &[]))
            .relationship(relationship("r", &[], &["A"]));
        assert_eq!(b.build(), Err(OntologyError::MissingDomain(iri("r"))));
    }

    #[test]
    fn rejects_superclass_cycles() {
        let mut b = Ontology::builder();
        b.concept(concept("A", &["B"]))
            .concept(concept("B", &["C"]))
            .concept(concept("C", &["A"]));
        assert!(matches!(b.build(), Err(OntologyError::SuperclassCycle(_))));

        let mut b = Ontology::builder();
        b.concept(concept("A", &["A"]));
        assert_eq!(b.build(), Err(OntologyError::SelfSuperclass(iri("A"))));
    }

    #[test]
    fn rejects_overlapping_kinds_and_reserved_iris() {
        let mut b = Ontology::builder();
        b.concept(concept("A", &[]))
            .relationship(relationship("A", &["A"], &["A"]));
        assert_eq!(b.build(), Err(OntologyError::DuplicateElement(iri("A"))));

        let mut b = Ontology::builder();
        b.concept(Concept::new(Iri::new(vocab::OWL_THING).unwrap()));
        assert!(matches!(b.build(), Err(OntologyError::ReservedIri(_))));
    }

    #[test]
    fn rejects_empty_label_and_non_xsd_datatype() {
        let mut b = Ontology::builder();
        let mut c = concept("A", &[]);
        c.label = Some("   ".into());
        b.concept(c);
        assert_eq!(b.build(), Err(OntologyError::EmptyLabel(iri("A"))));

        let mut b = Ontology::builder();
        b.concept(concept("A", &[])).attribute(Attribute {
            iri: iri("name"),
            label: None,
            comment: None,
            domains: [iri("A")].into(),
            datatype: iri("NotXsd"),
        });
        assert!(matches!(
            b.build(),
            Err(OntologyError::NonXsdDatatype { .. })
        ));
    }

    #[test]
    fn neighbors_of_isolated_concept_are_empty() {
        let mut b = Ontology::builder();
        b.concept(concept("Lonely", &[]));
        let o = b.build().unwrap();
        assert!(o.neighbors(&iri("Lonely")).unwrap().is_empty());
        assert_eq!(
            o.neighbors(&iri("Nope")),
            Err(OntologyError::UnknownConcept(iri("Nope")))
        );
    }

    #[test]
    fn neighbors_single_edge_is_symmetric() {
        let mut b = Ontology::builder();
        b.concept(concept("Customer", &[]))
            .concept(concept("Plan", &["Product"]))
            .concept(concept("Product", &[]))
            .relationship(relationship("hasPlan", &["Customer"], &["Plan"]));
        let o = b.build().unwrap();
        let out = Neighbor {
            edge: iri("hasPlan"),
            other: iri("Plan"),
            direction: Direction::Outgoing,
        };
        let inc = Neighbor {
            edge: iri("hasPlan"),
            other: iri("Customer"),
            direction: Direction::Incoming,
        };
        assert_eq!(o.neighbors(&iri("Customer")).unwrap(), &[out]);
        assert!(o.neighbors(&iri("Plan")).unwrap().contains(&inc));
        let sub = Iri::new(vocab::RDFS_SUBCLASS_OF).unwrap();
        assert!(o.neighbors(&iri("Plan")).unwrap().contains(&Neighbor {
            edge: sub.clone(),
            other: iri("Product"),
            direction: Direction::Super,
        }));
        assert!(o.neighbors(&iri("Product")).unwrap().contains(&Neighbor {
            edge: sub,
            other: iri("Plan"),
            direction: Direction::Sub,
        }));
        assert_eq!(
            o.subclasses_of(&iri("Product")).collect::<Vec<_>>(),
            [&iri("Plan")]
        );
    }

    #[test]
    fn union_domains_give_one_edge_per_pair() {
        let mut b = Ontology::builder();
        for n in ["A", "B", "C", "D"] {
            b.concept(concept(n, &[]));
        }
        b.relationship(relationship("r", &["A", "B"], &["C", "D"]));
        let o = b.build().unwrap();
        assert_eq!(o.neighbors(&iri("A")).unwrap().len(), 2);
        assert_eq!(o.neighbors(&iri("D")).unwrap().len(), 2);
    }

    #[test]
    fn compact_prefers_longest_namespace() {
        let mut b = Ontology::builder();
        b.prefix("ex", Iri::new("http://example.org/").unwrap())
            .prefix("t", Iri::new("http://example.org/t#").unwrap());
        let o = b.build().unwrap();
        assert_eq!(o.compact(&iri("A")).as_deref(), Some("t:A"));
        assert_eq!(o.expand_prefixed("t:A"), Some(iri("A")));
        assert_eq!(o.expand_prefixed("zz:A"), None);
    }
}
