//! Seeded synthetic ontologies and the bundled toy ontology.
//!
//! Generation uses ChaCha8 seeded from the spec, so the same spec yields
//! the same ontology on every platform.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{vocab, Attribute, Concept, Iri, Ontology, Relationship};
use crate::turtle::parse_turtle;

pub const GEN_NAMESPACE: &str = "http://example.org/generated#";

const TOY_TTL: &str = include_str!("../data/toy.ttl");

/// The bundled telecom ontology: 11 concepts, 18 relationships and 17
/// attributes.
pub fn toy_ontology() -> Ontology {
    parse_turtle(TOY_TTL)
        .expect("bundled toy ontology parses")
        .ontology
}

pub fn toy_turtle() -> &'static str {
    TOY_TTL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Connected,
    /// Exactly this many connected components.
    Components(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub n_concepts: usize,
    pub n_relationships: usize,
    pub n_attributes: usize,
    /// Length of the longest superclass chain.
    pub hierarchy_depth: usize,
    pub connectivity: Connectivity,
}

impl GenSpec {
    /// The enterprise-scale parameter point: 500 concepts, 1000
    /// relationships, 300 attributes.
    pub fn enterprise(seed: u64) -> Self {
        GenSpec {
            seed,
            n_concepts: 500,
            n_relationships: 1000,
            n_attributes: 300,
            hierarchy_depth: 4,
            connectivity: Connectivity::Connected,
        }
    }

    pub fn components(&self) -> usize {
        match self.connectivity {
            Connectivity::Connected => 1,
            Connectivity::Components(k) => k,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let k = self.components();
        if self.n_concepts == 0 {
            if self.n_relationships > 0 || self.n_attributes > 0 {
                return Err(GenError::NoConcepts);
            }
            return Ok(());
        }
        if k == 0 || k > self.n_concepts {
            return Err(GenError::Components {
                components: k,
                concepts: self.n_concepts,
            });
        }
        if self.n_relationships < self.n_concepts - k {
            return Err(GenError::TooFewRelationships {
                needed: self.n_concepts - k,
                given: self.n_relationships,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("relationships and attributes need at least one concept")]
    NoConcepts,
    #[error("cannot split {concepts} concepts into {components} components")]
    Components { components: usize, concepts: usize },
    #[error("connectivity needs at least {needed} relationships, got {given}")]
    TooFewRelationships { needed: usize, given: usize },
}

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "gr", "kr",
    "st", "tr", "ch", "sh",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ea", "io", "ou"];
const CODAS: &[&str] = &["", "", "", "n", "r", "l", "s", "x", "m"];
const VERBS: &[&str] = &[
    "has",
    "owns",
    "uses",
    "serves",
    "holds",
    "tracks",
    "covers",
    "manages",
    "supplies",
    "follows",
    "requires",
    "contains",
    "approves",
    "schedules",
    "reports",
    "assigns",
];
const ATTRIBUTE_KINDS: &[(&str, &str)] = &[
    ("code", "string"),
    ("name", "string"),
    ("status", "string"),
    ("date", "date"),
    ("timestamp", "dateTime"),
    ("amount", "decimal"),
    ("rate", "decimal"),
    ("count", "integer"),
    ("level", "integer"),
    ("flag", "boolean"),
];
const CONCEPT_NOTES: &[&str] = &[
    "Core business entity.",
    "Tracked by operations.",
    "Kept by the back office.",
    "Reported on monthly.",
    "Shared across regions.",
];
const RELATIONSHIP_NOTES: &[&str] = &[
    "Set at creation.",
    "Kept up to date nightly.",
    "Maintained by billing.",
    "Optional association.",
    "Audited yearly.",
];

struct Namer {
    rng: ChaCha8Rng,
    used: HashSet<String>,
}

impl Namer {
    fn word(&mut self) -> String {
        let syllables = self.rng.gen_range(2..=3);
        (0..syllables)
            .map(|_| {
                format!(
                    "{}{}{}",
                    ONSETS.choose(&mut self.rng).unwrap(),
                    VOWELS.choose(&mut self.rng).unwrap(),
                    CODAS.choose(&mut self.rng).unwrap()
                )
            })
            .collect()
    }

    /// Reserves the first unused local name among the candidates, falling
    /// back to appending fresh words.
    fn claim(&mut self, mut label: String) -> (String, String) {
        loop {
            let local = camel(&label);
            if self.used.insert(local.to_ascii_lowercase()) {
                return (local, label);
            }
            label = format!("{label} {}", self.word());
        }
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    chars
        .next()
        .map(|c| c.to_uppercase().chain(chars).collect())
        .unwrap_or_default()
}

/// "has dorva tun" -> "hasDorvaTun"; "Dorva" stays "Dorva".
fn camel(label: &str) -> String {
    label
        .split_whitespace()
        .enumerate()
        .map(|(i, w)| if i == 0 { w.to_string() } else { capitalize(w) })
        .collect()
}

fn gen_iri(local: &str) -> Iri {
    Iri::new(format!("{GEN_NAMESPACE}{local}")).expect("generated IRIs are valid")
}

pub fn generate(spec: &GenSpec) -> Result<Ontology, GenError> {
    spec.validate()?;
    let mut namer = Namer {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        used: HashSet::new(),
    };
    let mut builder = Ontology::builder();
    builder
        .prefix("gen", Iri::new(GEN_NAMESPACE).unwrap())
        .prefix("owl", Iri::new(vocab::OWL).unwrap())
        .prefix("rdfs", Iri::new(vocab::RDFS).unwrap())
        .prefix("xsd", Iri::new(vocab::XSD).unwrap());

    let n = spec.n_concepts;
    let k = spec.components().max(1);
    // Component c owns the contiguous index range groups[c].
    let groups: Vec<std::ops::Range<usize>> = (0..k)
        .map(|c| (c * n / k)..((c + 1) * n / k))
        .filter(|r| !r.is_empty())
        .collect();
    let group_of: Vec<usize> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, r)| r.clone().map(move |_| g))
        .collect();

    let mut labels = Vec::with_capacity(n);
    let mut iris = Vec::with_capacity(n);
    for _ in 0..n {
        let word = namer.word();
        let (local, label) = namer.claim(capitalize(&word));
        iris.push(gen_iri(&local));
        labels.push(label);
    }

    // Superclass forest: each group starts with a chain of the full depth,
    // later members hang below a random earlier member with room to spare.
    let mut level = vec![0usize; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for range in &groups {
        for i in range.clone() {
            let offset = i - range.start;
            if offset == 0 || spec.hierarchy_depth == 0 {
                continue;
            }
            if offset <= spec.hierarchy_depth {
                parent[i] = Some(i - 1);
            } else if namer.rng.gen_ratio(1, 3) {
                let candidates: Vec<usize> = (range.start..i)
                    .filter(|&j| level[j] < spec.hierarchy_depth)
                    .collect();
                parent[i] = candidates.choose(&mut namer.rng).copied();
            }
            if let Some(p) = parent[i] {
                level[i] = level[p] + 1;
            }
        }
    }
    for i in 0..n {
        let mut concept = Concept::new(iris[i].clone());
        concept.label = Some(labels[i].clone());
        concept.comment = Some(match parent[i] {
            Some(p) => format!("A kind of {}.", labels[p]),
            None => CONCEPT_NOTES.choose(&mut namer.rng).unwrap().to_string(),
        });
        if let Some(p) = parent[i] {
            concept.superclasses.insert(iris[p].clone());
        }
        builder.concept(concept);
    }

    // Spanning trees first, then random edges inside a component.
    let mut edges = Vec::with_capacity(spec.n_relationships);
    for range in &groups {
        for i in range.clone().skip(1) {
            edges.push((namer.rng.gen_range(range.start..i), i));
        }
    }
    while edges.len() < spec.n_relationships {
        let a = namer.rng.gen_range(0..n);
        let range = &groups[group_of[a]];
        let b = if range.len() == 1 {
            a
        } else {
            loop {
                let b = namer.rng.gen_range(range.clone());
                if b != a {
                    break b;
                }
            }
        };
        edges.push((a, b));
    }
    for (a, b) in edges {
        let (domain, range) = if namer.rng.gen_bool(0.5) {
            (a, b)
        } else {
            (b, a)
        };
        let verb = VERBS.choose(&mut namer.rng).unwrap();
        let (local, label) = namer.claim(format!("{verb} {}", labels[range].to_lowercase()));
        let mut rel = Relationship::new(gen_iri(&local));
        rel.label = Some(label);
        rel.comment = Some(
            RELATIONSHIP_NOTES
                .choose(&mut namer.rng)
                .unwrap()
                .to_string(),
        );
        rel.domains.insert(iris[domain].clone());
        rel.ranges.insert(iris[range].clone());
        builder.relationship(rel);
    }

    for _ in 0..spec.n_attributes {
        let owner = namer.rng.gen_range(0..n);
        let (suffix, datatype) = ATTRIBUTE_KINDS.choose(&mut namer.rng).unwrap();
        let (local, label) = namer.claim(format!("{} {suffix}", labels[owner].to_lowercase()));
        builder.attribute(Attribute {
            iri: gen_iri(&local),
            label: Some(label),
            comment: Some(format!("The {suffix} of a {}.", labels[owner])),
            domains: [iris[owner].clone()].into(),
            datatype: Iri::new(format!("{}{datatype}", vocab::XSD)).unwrap(),
        });
    }

    Ok(builder
        .build()
        .expect("generator output satisfies ontology invariants"))
}

/// Length of the longest superclass chain (0 for a flat ontology).
pub fn hierarchy_depth(ontology: &Ontology) -> usize {
    let mut memo: BTreeMap<&Iri, usize> = BTreeMap::new();
    fn depth<'a>(o: &'a Ontology, iri: &'a Iri, memo: &mut BTreeMap<&'a Iri, usize>) -> usize {
        if let Some(d) = memo.get(iri) {
            return *d;
        }
        let d = o
            .concept(iri)
            .map(|c| {
                c.superclasses
                    .iter()
                    .map(|s| depth(o, s, memo) + 1)
                    .max()
                    .unwrap_or(0)
            })
            .unwrap_or(0);
        memo.insert(iri, d);
        d
    }
    ontology
        .concepts()
        .keys()
        .map(|c| depth(ontology, c, &mut memo))
        .max()
        .unwrap_or(0)
}
