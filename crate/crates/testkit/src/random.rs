//! Small random ontologies with multiple inheritance and multi-endpoint
//! properties, built independently of the generator under test.

use rand::seq::SliceRandom;
use rand::Rng;

use ontoslice::ontology::vocab;
use ontoslice::{Attribute, Concept, Iri, Ontology, Relationship};

pub fn iri(kind: &str, i: usize) -> Iri {
    Iri::new(format!("http://example.org/r#{kind}{i}")).unwrap()
}

fn pick<'a>(rng: &mut impl Rng, from: &'a [Iri], max: usize) -> Vec<&'a Iri> {
    let n = rng.gen_range(1..=max.min(from.len()));
    from.choose_multiple(rng, n).collect()
}

/// At most `max_elements` elements, at least one concept.
pub fn ontology(rng: &mut impl Rng, max_elements: usize) -> Ontology {
    let total = rng.gen_range(1..=max_elements);
    let n_c = rng.gen_range(1..=total.min(12));
    let n_r = rng.gen_range(0..=total - n_c);
    let n_a = rng.gen_range(0..=total - n_c - n_r);
    let concepts: Vec<Iri> = (0..n_c).map(|i| iri("C", i)).collect();
    let mut b = Ontology::builder();
    for (i, c) in concepts.iter().enumerate() {
        let mut concept = Concept::new(c.clone());
        if i > 0 && rng.gen_bool(0.4) {
            for s in pick(rng, &concepts[..i], 2) {
                concept.superclasses.insert(s.clone());
            }
        }
        b.concept(concept);
    }
    for i in 0..n_r {
        let mut r = Relationship::new(iri("r", i));
        r.domains
            .extend(pick(rng, &concepts, 2).into_iter().cloned());
        r.ranges
            .extend(pick(rng, &concepts, 2).into_iter().cloned());
        b.relationship(r);
    }
    for i in 0..n_a {
        b.attribute(Attribute {
            iri: iri("a", i),
            label: None,
            comment: None,
            domains: pick(rng, &concepts, 2).into_iter().cloned().collect(),
            datatype: Iri::new(format!("{}string", vocab::XSD)).unwrap(),
        });
    }
    b.build().unwrap()
}

/// A connected concept graph: a random spanning tree of relationships plus
/// extra relationships and subclass links.
pub fn connected(rng: &mut impl Rng, max_concepts: usize) -> Ontology {
    let n = rng.gen_range(1..=max_concepts);
    let concepts: Vec<Iri> = (0..n).map(|i| iri("C", i)).collect();
    let mut b = Ontology::builder();
    for (i, c) in concepts.iter().enumerate() {
        let mut concept = Concept::new(c.clone());
        if i > 0 && rng.gen_bool(0.2) {
            concept
                .superclasses
                .insert(concepts[rng.gen_range(0..i)].clone());
        }
        b.concept(concept);
    }
    let mut count = 0;
    let mut add = |b: &mut ontoslice::OntologyBuilder, d: &Iri, g: &Iri| {
        let mut r = Relationship::new(iri("r", count));
        count += 1;
        r.domains.insert(d.clone());
        r.ranges.insert(g.clone());
        b.relationship(r);
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        if rng.gen_bool(0.5) {
            add(&mut b, &concepts[i], &concepts[j]);
        } else {
            add(&mut b, &concepts[j], &concepts[i]);
        }
    }
    for _ in 0..rng.gen_range(0..=n) {
        let d = concepts.choose(rng).unwrap().clone();
        let g = concepts.choose(rng).unwrap().clone();
        add(&mut b, &d, &g);
    }
    b.build().unwrap()
}
