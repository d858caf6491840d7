//! Reference implementations that only read the raw ontology maps.

use std::collections::{BTreeSet, HashMap, VecDeque};

use ontoslice::pathfinder::Path;
use ontoslice::{Direction, Iri, Ontology};

/// Fixpoint of the closure rules by repeated full scans.
pub fn closure(o: &Ontology, start: BTreeSet<Iri>) -> BTreeSet<Iri> {
    let mut current = start;
    loop {
        let mut next = current.clone();
        for (iri, c) in o.concepts() {
            if current.contains(iri) {
                next.extend(c.superclasses.iter().cloned());
            }
        }
        for (iri, r) in o.relationships() {
            if current.contains(iri) {
                next.extend(r.domains.iter().cloned());
                next.extend(r.ranges.iter().cloned());
            }
        }
        for (iri, a) in o.attributes() {
            if current.contains(iri) {
                next.extend(a.domains.iter().cloned());
            }
            if a.domains.iter().any(|d| current.contains(d)) {
                next.insert(iri.clone());
            }
        }
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Concepts and relationships a path walks through.
pub fn path_elements(p: &Path) -> BTreeSet<Iri> {
    let mut out = BTreeSet::new();
    for s in &p.steps {
        out.insert(s.from.clone());
        out.insert(s.to.clone());
        if s.edge.as_str() != "http://www.w3.org/2000/01/rdf-schema#subClassOf" {
            out.insert(s.edge.clone());
        }
    }
    out
}

/// Undirected concept adjacency built from domains, ranges and superclasses.
pub fn undirected_edges(o: &Ontology) -> HashMap<Iri, BTreeSet<Iri>> {
    let mut adj: HashMap<Iri, BTreeSet<Iri>> = o
        .concepts()
        .keys()
        .map(|c| (c.clone(), BTreeSet::new()))
        .collect();
    let mut link = |a: &Iri, b: &Iri| {
        adj.get_mut(a).unwrap().insert(b.clone());
        adj.get_mut(b).unwrap().insert(a.clone());
    };
    for r in o.relationships().values() {
        for d in &r.domains {
            for g in &r.ranges {
                link(d, g);
            }
        }
    }
    for (iri, c) in o.concepts() {
        for s in &c.superclasses {
            link(iri, s);
        }
    }
    adj
}

pub fn bfs_distance(adj: &HashMap<Iri, BTreeSet<Iri>>, from: &Iri, to: &Iri) -> Option<usize> {
    let mut dist = HashMap::from([(from.clone(), 0usize)]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(n) = queue.pop_front() {
        if &n == to {
            return Some(dist[&n]);
        }
        for m in &adj[&n] {
            if !dist.contains_key(m) {
                dist.insert(m.clone(), dist[&n] + 1);
                queue.push_back(m.clone());
            }
        }
    }
    None
}

/// Every step corresponds to a declared edge, walked in the stated direction.
pub fn steps_exist(o: &Ontology, p: &Path) -> bool {
    p.steps.iter().all(|s| match s.direction {
        Direction::Outgoing => o
            .relationship(&s.edge)
            .is_some_and(|r| r.domains.contains(&s.from) && r.ranges.contains(&s.to)),
        Direction::Incoming => o
            .relationship(&s.edge)
            .is_some_and(|r| r.ranges.contains(&s.from) && r.domains.contains(&s.to)),
        Direction::Super => o
            .concept(&s.from)
            .is_some_and(|c| c.superclasses.contains(&s.to)),
        Direction::Sub => o
            .concept(&s.to)
            .is_some_and(|c| c.superclasses.contains(&s.from)),
    })
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[ra] = rb;
    }

    pub fn components(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&i| self.find(i) == i)
            .count()
    }
}

/// Connected components of the concept graph.
pub fn component_count(o: &Ontology) -> usize {
    let index: HashMap<&Iri, usize> = o
        .concepts()
        .keys()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut uf = UnionFind::new(index.len());
    for (a, ns) in undirected_edges(o) {
        for b in ns {
            uf.union(index[&a], index[&b]);
        }
    }
    uf.components()
}
