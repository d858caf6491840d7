//! Shortest connecting paths through the concept graph.
//!
//! The graph is undirected: relationship edges can be walked against their
//! declared direction and subclass edges in either direction, each at a cost
//! of one hop.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gateway::MissingReport;
use crate::ontology::{
    vocab, Direction, ElementKind, Iri, NameIndex, Neighbor, Ontology, OntologyError,
};

pub const DEFAULT_MAX_HOPS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathStep {
    pub from: Iri,
    /// Relationship IRI, or `rdfs:subClassOf` for hierarchy hops.
    pub edge: Iri,
    pub direction: Direction,
    pub to: Iri,
}

impl PathStep {
    pub fn is_subclass_hop(&self) -> bool {
        self.edge.as_str() == vocab::RDFS_SUBCLASS_OF
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub steps: Vec<PathStep>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Concepts visited, in order.
    pub fn concepts(&self) -> Vec<&Iri> {
        let mut out: Vec<&Iri> = self.steps.first().map(|s| &s.from).into_iter().collect();
        out.extend(self.steps.iter().map(|s| &s.to));
        out
    }

    /// Every concept and relationship on the path.
    pub fn elements(&self) -> impl Iterator<Item = &Iri> {
        self.concepts().into_iter().chain(
            self.steps
                .iter()
                .filter(|s| !s.is_subclass_hop())
                .map(|s| &s.edge),
        )
    }

    /// Chain property, edge existence and simplicity against `ontology`.
    pub fn is_valid_in(&self, ontology: &Ontology) -> bool {
        let chained = self.steps.windows(2).all(|w| w[0].to == w[1].from);
        let edges_exist = self.steps.iter().all(|s| {
            ontology.neighbors(&s.from).is_ok_and(|ns| {
                ns.contains(&Neighbor {
                    edge: s.edge.clone(),
                    other: s.to.clone(),
                    direction: s.direction,
                })
            })
        });
        let concepts = self.concepts();
        let unique: HashSet<&Iri> = concepts.iter().copied().collect();
        chained && edges_exist && unique.len() == concepts.len()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(
                f,
                "{} {} {} {}",
                step.from, step.edge, step.direction, step.to
            )?;
        }
        Ok(())
    }
}

/// A shortest path of at most `max_hops` steps from `source` to `target`.
///
/// Among equally short paths the one whose sequence of `(edge, to)` pairs is
/// lexicographically smallest wins, with the step direction as a final
/// tie-break. `Ok(None)` means no path exists within the bound.
pub fn find_path(
    ontology: &Ontology,
    source: &Iri,
    target: &Iri,
    max_hops: usize,
) -> Result<Option<Path>, OntologyError> {
    ontology.neighbors(source)?;
    ontology.neighbors(target)?;
    if source == target {
        return Ok(Some(Path::default()));
    }

    // Distances to the target, explored until the source is reached.
    let mut dist: HashMap<&Iri, usize> = HashMap::from([(target, 0)]);
    let mut queue = VecDeque::from([target]);
    'bfs: while let Some(node) = queue.pop_front() {
        let d = dist[node];
        if d >= max_hops {
            continue;
        }
        for n in ontology.neighbors(node)? {
            if !dist.contains_key(&n.other) {
                dist.insert(&n.other, d + 1);
                if &n.other == source {
                    break 'bfs;
                }
                queue.push_back(&n.other);
            }
        }
    }
    let Some(&hops) = dist.get(source) else {
        return Ok(None);
    };

    // Neighbor lists are sorted by (edge, other, direction), so the first
    // neighbor one hop closer is the lexicographically smallest choice.
    let mut steps = Vec::with_capacity(hops);
    let mut current = source;
    for remaining in (0..hops).rev() {
        let next = ontology
            .neighbors(current)?
            .iter()
            .find(|n| dist.get(&n.other) == Some(&remaining))
            .expect("a node at distance d+1 has a neighbor at distance d");
        steps.push(PathStep {
            from: current.clone(),
            edge: next.edge.clone(),
            direction: next.direction,
            to: next.other.clone(),
        });
        current = &next.other;
    }
    Ok(Some(Path { steps }))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Unresolved {
    Concept { name: String },
    Link { from: String, to: String },
}

impl fmt::Display for Unresolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unresolved::Concept { name } => f.write_str(name),
            Unresolved::Link { from, to } => write!(f, "{from} -> {to}"),
        }
    }
}

/// What the ontology service could make of a missing report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub additions: BTreeSet<Iri>,
    pub paths: Vec<Path>,
    pub unresolved: Vec<Unresolved>,
}

impl Resolution {
    /// True when nothing in the report could be grounded.
    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.paths.is_empty()
    }
}

/// Grounds missing concepts by name and missing links by path-finding.
///
/// Ambiguous names contribute every candidate. For a link, paths are tried
/// between every concept candidate pair and the shortest overall is kept.
pub fn resolve_missing(
    ontology: &Ontology,
    index: &NameIndex,
    report: &MissingReport,
    max_hops: usize,
) -> Resolution {
    let mut resolution = Resolution::default();
    for name in report.missing_concepts() {
        let found = index.resolve(name);
        if found.is_empty() {
            resolution
                .unresolved
                .push(Unresolved::Concept { name: name.clone() });
        }
        resolution.additions.extend(found);
    }
    for link in report.missing_links() {
        let concepts_for = |name: &str| -> Vec<Iri> {
            index
                .resolve(name)
                .into_iter()
                .filter(|i| ontology.kind_of(i) == Some(ElementKind::Concept))
                .collect()
        };
        let sources = concepts_for(&link.from);
        let targets = concepts_for(&link.to);
        let mut best: Option<Path> = None;
        for a in &sources {
            for b in &targets {
                let Ok(Some(path)) = find_path(ontology, a, b, max_hops) else {
                    continue;
                };
                if best.as_ref().is_none_or(|p| path.len() < p.len()) {
                    if path.is_empty() {
                        resolution.additions.insert(a.clone());
                    }
                    best = Some(path);
                }
            }
        }
        match best {
            Some(path) if !path.is_empty() => {
                if !resolution.paths.contains(&path) {
                    resolution.paths.push(path);
                }
            }
            Some(_) => {}
            None => resolution.unresolved.push(Unresolved::Link {
                from: link.from.clone(),
                to: link.to.clone(),
            }),
        }
    }
    resolution
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::MissingLink;
    use crate::ontology::{Concept, Relationship};

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://ex.org/t#{s}")).unwrap()
    }

    fn chain() -> Ontology {
        let mut b = Ontology::builder();
        for c in ["Customer", "Plan", "Invoice", "Island"] {
            let mut concept = Concept::new(iri(c));
            concept.label = Some(c.to_string());
            b.concept(concept);
        }
        for (r, d, g) in [
            ("hasPlan", "Customer", "Plan"),
            ("billedBy", "Plan", "Invoice"),
        ] {
            let mut rel = Relationship::new(iri(r));
            rel.domains.insert(iri(d));
            rel.ranges.insert(iri(g));
            b.relationship(rel);
        }
        b.build().unwrap()
    }

    #[test]
    fn reflexive_path_is_empty() {
        let o = chain();
        let p = find_path(&o, &iri("Plan"), &iri("Plan"), 0)
            .unwrap()
            .unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn single_edge_path() {
        let o = chain();
        let p = find_path(&o, &iri("Customer"), &iri("Plan"), 5)
            .unwrap()
            .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.steps[0].edge, iri("hasPlan"));
        assert_eq!(p.steps[0].direction, Direction::Outgoing);
    }

    #[test]
    fn walks_edges_backwards_and_respects_hop_bound() {
        let o = chain();
        let p = find_path(&o, &iri("Invoice"), &iri("Customer"), 2)
            .unwrap()
            .unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.steps[0].direction, Direction::Incoming);
        assert!(p.is_valid_in(&o));
        assert_eq!(
            find_path(&o, &iri("Invoice"), &iri("Customer"), 1).unwrap(),
            None
        );
        assert_eq!(
            find_path(&o, &iri("Invoice"), &iri("Island"), 9).unwrap(),
            None
        );
    }

    #[test]
    fn unknown_concepts_are_errors() {
        let o = chain();
        assert!(find_path(&o, &iri("hasPlan"), &iri("Plan"), 3).is_err());
        assert!(find_path(&o, &iri("Plan"), &iri("Nope"), 3).is_err());
    }

    #[test]
    fn resolve_empty_report() {
        let o = chain();
        let index = NameIndex::build(&o);
        let r = resolve_missing(&o, &index, &MissingReport::default(), 6);
        assert_eq!(r, Resolution::default());
    }

    #[test]
    fn resolve_concepts_and_links() {
        let o = chain();
        let index = NameIndex::build(&o);
        let report = MissingReport::new(
            ["plan", "gadget"],
            [
                MissingLink::new("customer", "invoice"),
                MissingLink::new("island", "plan"),
                MissingLink::new("plan", "plan"),
            ],
        );
        let r = resolve_missing(&o, &index, &report, 6);
        assert_eq!(r.additions, [iri("Plan")].into());
        assert_eq!(r.paths.len(), 1);
        assert_eq!(r.paths[0].len(), 2);
        assert_eq!(
            r.unresolved,
            vec![
                Unresolved::Concept {
                    name: "gadget".into()
                },
                Unresolved::Link {
                    from: "island".into(),
                    to: "plan".into()
                },
            ]
        );
    }
}
