//! Ontology slices: closed sub-ontologies that only ever grow.
//!
//! A slice is seeded from the elements grounded in the approximation phase
//! and then expanded with newly reported concepts and connecting paths. The
//! structural rules that keep a slice self-contained live behind
//! [`ClosurePolicy`], with [`StandardClosure`] as the rule set used by the
//! pipeline:
//!
//! * an included relationship brings all of its domains and ranges,
//! * an included attribute brings all of its domains,
//! * an included concept brings its direct superclasses (and so, by
//!   repetition, its whole superclass chain) and every attribute declared on
//!   it.
//!
//! Subclasses and siblings are never pulled in.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{ElementKind, Iri, Ontology};
use crate::pathfinder::Path;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SliceError {
    #[error("unknown IRIs: {}", join(.0))]
    UnknownIris(Vec<Iri>),
    #[error("slice is not closed; missing {}", join(.0))]
    NotClosed(Vec<Iri>),
}

fn join(iris: &[Iri]) -> String {
    iris.iter().map(Iri::as_str).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slice {
    concepts: BTreeSet<Iri>,
    relationships: BTreeSet<Iri>,
    attributes: BTreeSet<Iri>,
}

impl Slice {
    pub fn concepts(&self) -> &BTreeSet<Iri> {
        &self.concepts
    }

    pub fn relationships(&self) -> &BTreeSet<Iri> {
        &self.relationships
    }

    pub fn attributes(&self) -> &BTreeSet<Iri> {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.concepts.len() + self.relationships.len() + self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.concepts.contains(iri)
            || self.relationships.contains(iri)
            || self.attributes.contains(iri)
    }

    /// Elementwise inclusion on all three sets.
    pub fn is_subset_of(&self, other: &Slice) -> bool {
        self.concepts.is_subset(&other.concepts)
            && self.relationships.is_subset(&other.relationships)
            && self.attributes.is_subset(&other.attributes)
    }

    /// All element IRIs: concepts, then relationships, then attributes.
    pub fn iris(&self) -> impl Iterator<Item = &Iri> {
        self.concepts
            .iter()
            .chain(&self.relationships)
            .chain(&self.attributes)
    }

    /// Inserts `iri` under `kind`; true when it was not already present.
    pub fn insert(&mut self, iri: Iri, kind: ElementKind) -> bool {
        match kind {
            ElementKind::Concept => self.concepts.insert(iri),
            ElementKind::Relationship => self.relationships.insert(iri),
            ElementKind::Attribute => self.attributes.insert(iri),
        }
    }

    /// Builds a slice from an explicit element list, which must already be
    /// closed under the standard rules.
    pub fn from_elements<'a>(
        ontology: &Ontology,
        iris: impl IntoIterator<Item = &'a Iri>,
    ) -> Result<Slice, SliceError> {
        let slice = unclosed(ontology, iris)?;
        let mut closed = slice.clone();
        StandardClosure.close(ontology, &mut closed);
        if closed == slice {
            Ok(slice)
        } else {
            let missing = closed
                .iris()
                .filter(|i| !slice.contains(i))
                .cloned()
                .collect();
            Err(SliceError::NotClosed(missing))
        }
    }

    /// Checks that every element exists in `ontology` with the matching kind.
    pub fn check_against(&self, ontology: &Ontology) -> Result<(), SliceError> {
        let wrong: Vec<Iri> = self
            .concepts
            .iter()
            .filter(|i| ontology.kind_of(i) != Some(ElementKind::Concept))
            .chain(
                self.relationships
                    .iter()
                    .filter(|i| ontology.kind_of(i) != Some(ElementKind::Relationship)),
            )
            .chain(
                self.attributes
                    .iter()
                    .filter(|i| ontology.kind_of(i) != Some(ElementKind::Attribute)),
            )
            .cloned()
            .collect();
        if wrong.is_empty() {
            Ok(())
        } else {
            Err(SliceError::UnknownIris(wrong))
        }
    }

    /// The sub-ontology induced by this slice.
    pub fn induce(&self, ontology: &Ontology) -> Result<Ontology, SliceError> {
        self.check_against(ontology)?;
        Ok(ontology.restrict(&self.concepts, &self.relationships, &self.attributes))
    }
}

fn unclosed<'a>(
    ontology: &Ontology,
    iris: impl IntoIterator<Item = &'a Iri>,
) -> Result<Slice, SliceError> {
    let mut slice = Slice::default();
    let mut unknown = BTreeSet::new();
    for iri in iris {
        match ontology.kind_of(iri) {
            Some(kind) => {
                slice.insert(iri.clone(), kind);
            }
            None => {
                unknown.insert(iri.clone());
            }
        }
    }
    if unknown.is_empty() {
        Ok(slice)
    } else {
        Err(SliceError::UnknownIris(unknown.into_iter().collect()))
    }
}

/// Structural rules that make a set of elements a self-contained slice.
pub trait ClosurePolicy {
    /// Grows `slice` in place to the least closed superset.
    fn close(&self, ontology: &Ontology, slice: &mut Slice);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardClosure;

impl ClosurePolicy for StandardClosure {
    fn close(&self, ontology: &Ontology, slice: &mut Slice) {
        let mut queue: Vec<(Iri, ElementKind)> = slice
            .concepts
            .iter()
            .map(|i| (i.clone(), ElementKind::Concept))
            .chain(
                slice
                    .relationships
                    .iter()
                    .map(|i| (i.clone(), ElementKind::Relationship)),
            )
            .chain(
                slice
                    .attributes
                    .iter()
                    .map(|i| (i.clone(), ElementKind::Attribute)),
            )
            .collect();
        let add = |slice: &mut Slice, queue: &mut Vec<(Iri, ElementKind)>, iri: &Iri, kind| {
            if slice.insert(iri.clone(), kind) {
                queue.push((iri.clone(), kind));
            }
        };
        while let Some((iri, kind)) = queue.pop() {
            match kind {
                ElementKind::Concept => {
                    if let Some(concept) = ontology.concept(&iri) {
                        for s in &concept.superclasses {
                            add(slice, &mut queue, s, ElementKind::Concept);
                        }
                    }
                    for a in ontology.attributes_of(&iri) {
                        add(slice, &mut queue, a, ElementKind::Attribute);
                    }
                }
                ElementKind::Relationship => {
                    if let Some(rel) = ontology.relationship(&iri) {
                        for c in rel.domains.iter().chain(&rel.ranges) {
                            add(slice, &mut queue, c, ElementKind::Concept);
                        }
                    }
                }
                ElementKind::Attribute => {
                    if let Some(attr) = ontology.attribute(&iri) {
                        for c in &attr.domains {
                            add(slice, &mut queue, c, ElementKind::Concept);
                        }
                    }
                }
            }
        }
    }
}

/// The closed slice generated by `grounded`.
pub fn seed_slice<'a>(
    ontology: &Ontology,
    grounded: impl IntoIterator<Item = &'a Iri>,
) -> Result<Slice, SliceError> {
    seed_slice_with(&StandardClosure, ontology, grounded)
}

pub fn seed_slice_with<'a>(
    policy: &impl ClosurePolicy,
    ontology: &Ontology,
    grounded: impl IntoIterator<Item = &'a Iri>,
) -> Result<Slice, SliceError> {
    let mut slice = unclosed(ontology, grounded)?;
    policy.close(ontology, &mut slice);
    Ok(slice)
}

/// Closure of `slice`, the `additions` and every concept and relationship on
/// the given `paths`. The result always contains `slice`.
pub fn expand_slice<'a>(
    ontology: &Ontology,
    slice: &Slice,
    additions: impl IntoIterator<Item = &'a Iri>,
    paths: &'a [Path],
) -> Result<Slice, SliceError> {
    expand_slice_with(&StandardClosure, ontology, slice, additions, paths)
}

pub fn expand_slice_with<'a>(
    policy: &impl ClosurePolicy,
    ontology: &Ontology,
    slice: &Slice,
    additions: impl IntoIterator<Item = &'a Iri>,
    paths: &'a [Path],
) -> Result<Slice, SliceError> {
    let on_paths = paths.iter().flat_map(Path::elements);
    let extra = unclosed(ontology, additions.into_iter().chain(on_paths))?;
    let mut grown = slice.clone();
    for iri in extra.iris() {
        if let Some(kind) = ontology.kind_of(iri) {
            grown.insert(iri.clone(), kind);
        }
    }
    policy.close(ontology, &mut grown);
    Ok(grown)
}

/// The slice containing every element of `ontology`.
pub fn full_slice(ontology: &Ontology) -> Slice {
    Slice {
        concepts: ontology.concepts().keys().cloned().collect(),
        relationships: ontology.relationships().keys().cloned().collect(),
        attributes: ontology.attributes().keys().cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{Attribute, Concept, Direction, Relationship};
    use crate::pathfinder::PathStep;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://ex.org/t#{s}")).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<Iri> {
        names.iter().map(|n| iri(n)).collect()
    }

    /// Customer -hasPlan-> Plan, Plan ⊑ Product, Lonely ⊑ Thingy, attributes
    /// on Customer, Product and Lonely.
    fn fixture() -> Ontology {
        let mut b = Ontology::builder();
        let concept = |name: &str, supers: &[&str]| Concept {
            superclasses: set(supers),
            ..Concept::new(iri(name))
        };
        b.concept(concept("Customer", &[]))
            .concept(concept("Plan", &["Product"]))
            .concept(concept("Product", &[]))
            .concept(concept("Premium", &["Plan"]))
            .concept(concept("Invoice", &[]))
            .concept(concept("Lonely", &["Thingy"]))
            .concept(concept("Thingy", &[]));
        let rel = |name: &str, d: &str, r: &str| Relationship {
            domains: set(&[d]),
            ranges: set(&[r]),
            ..Relationship::new(iri(name))
        };
        b.relationship(rel("hasPlan", "Customer", "Plan"))
            .relationship(rel("billedBy", "Plan", "Invoice"));
        let attr = |name: &str, d: &[&str]| Attribute {
            iri: iri(name),
            label: None,
            comment: None,
            domains: set(d),
            datatype: Iri::new(crate::ontology::vocab::XSD_STRING).unwrap(),
        };
        b.attribute(attr("customerName", &["Customer"]))
            .attribute(attr("sku", &["Product"]))
            .attribute(attr("mood", &["Lonely"]))
            .attribute(attr("shared", &["Invoice", "Thingy"]));
        b.build().unwrap()
    }

    #[test]
    fn empty_seed_is_empty_slice() {
        let o = fixture();
        assert!(seed_slice(&o, &[]).unwrap().is_empty());
    }

    #[test]
    fn seed_from_relationship_pulls_endpoints_superclasses_and_attributes() {
        let o = fixture();
        let s = seed_slice(&o, &[iri("hasPlan")]).unwrap();
        assert_eq!(s.concepts(), &set(&["Customer", "Plan", "Product"]));
        assert_eq!(s.relationships(), &set(&["hasPlan"]));
        assert_eq!(s.attributes(), &set(&["customerName", "sku"]));
    }

    #[test]
    fn seed_rejects_unknown_iris_listing_all() {
        let o = fixture();
        let err = seed_slice(&o, &[iri("Ghost"), iri("Plan"), iri("Phantom")]).unwrap_err();
        assert_eq!(
            err,
            SliceError::UnknownIris(vec![iri("Ghost"), iri("Phantom")])
        );
    }

    #[test]
    fn expand_with_nothing_is_identity() {
        let o = fixture();
        let s = seed_slice(&o, &[iri("hasPlan")]).unwrap();
        assert_eq!(expand_slice(&o, &s, &[], &[]).unwrap(), s);
    }

    #[test]
    fn expand_with_isolated_concept_adds_chain_and_attributes() {
        let o = fixture();
        let s = seed_slice(&o, &[iri("hasPlan")]).unwrap();
        let grown = expand_slice(&o, &s, &[iri("Lonely")], &[]).unwrap();
        let added: BTreeSet<Iri> = grown.iris().filter(|i| !s.contains(i)).cloned().collect();
        // shared hangs off Thingy and also brings Invoice, its other domain.
        assert_eq!(
            added,
            set(&["Lonely", "Thingy", "Invoice", "mood", "shared"])
        );
    }

    #[test]
    fn expand_with_path_adds_path_elements() {
        let o = fixture();
        let path = Path {
            steps: vec![
                PathStep {
                    from: iri("Customer"),
                    edge: iri("hasPlan"),
                    direction: Direction::Outgoing,
                    to: iri("Plan"),
                },
                PathStep {
                    from: iri("Plan"),
                    edge: iri("billedBy"),
                    direction: Direction::Outgoing,
                    to: iri("Invoice"),
                },
            ],
        };
        let grown = expand_slice(&o, &Slice::default(), &[], &[path]).unwrap();
        assert!(grown.relationships().contains(&iri("billedBy")));
        assert!(grown
            .concepts()
            .is_superset(&set(&["Customer", "Plan", "Invoice", "Product"])));
        // Invoice pulls `shared`, whose other domain Thingy comes along.
        assert!(grown.concepts().contains(&iri("Thingy")));
        assert!(!grown.concepts().contains(&iri("Premium")));
    }

    #[test]
    fn full_slice_equals_saturated_seed() {
        let o = fixture();
        let all: Vec<Iri> = o.elements().map(|(i, _)| i.clone()).collect();
        assert_eq!(seed_slice(&o, &all).unwrap(), full_slice(&o));
        assert!(full_slice(&Ontology::default()).is_empty());
    }

    #[test]
    fn from_elements_requires_closure() {
        let o = fixture();
        let s = seed_slice(&o, &[iri("Plan")]).unwrap();
        assert_eq!(Slice::from_elements(&o, s.iris()).unwrap(), s);
        assert_eq!(
            Slice::from_elements(&o, &[iri("Plan")]),
            Err(SliceError::NotClosed(vec![iri("Product"), iri("sku")]))
        );
    }

    #[test]
    fn induce_rejects_foreign_elements() {
        let o = fixture();
        let mut s = Slice::default();
        s.insert(iri("Nope"), ElementKind::Concept);
        assert!(s.induce(&o).is_err());
        let mut s = Slice::default();
        s.insert(iri("Plan"), ElementKind::Relationship);
        assert!(s.check_against(&o).is_err());
    }
}
