use std::collections::{BTreeMap, BTreeSet};

use super::{Iri, Ontology};

/// Lowercases and collapses whitespace runs to single spaces.
pub fn canonicalize_name(name: &str) -> String {
    name.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits a camel-case or snake-case identifier into space-separated words.
///
/// `hasAccountManager` becomes `has account manager`; `HTTPServer` becomes
/// `HTTP server`. The first word keeps its case, later words are lowercased.
pub fn split_identifier(ident: &str) -> String {
    let chars: Vec<char> = ident.chars().collect();
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' || c.is_whitespace() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        if c.is_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_is_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase()
                || prev.is_ascii_digit()
                || (prev.is_uppercase() && next_is_lower)
            {
                words.push(std::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
        .into_iter()
        .enumerate()
        .map(|(i, w)| if i == 0 { w } else { w.to_lowercase() })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Maps canonical surface names to the elements that carry them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameIndex {
    entries: BTreeMap<String, BTreeSet<Iri>>,
}

impl NameIndex {
    /// Indexes each element under its label, its local name and the split
    /// form of its local name.
    pub fn build(ontology: &Ontology) -> Self {
        let mut entries: BTreeMap<String, BTreeSet<Iri>> = BTreeMap::new();
        for (iri, _) in ontology.elements() {
            let local = iri.local_name();
            let mut names = vec![
                canonicalize_name(local),
                canonicalize_name(&split_identifier(local)),
            ];
            if let Some(label) = ontology.label(iri) {
                names.push(canonicalize_name(label));
            }
            for name in names.into_iter().filter(|n| !n.is_empty()) {
                entries.entry(name).or_default().insert(iri.clone());
            }
        }
        NameIndex { entries }
    }

    /// Exact lookup after canonicalization; empty when unknown.
    pub fn resolve(&self, name: &str) -> BTreeSet<Iri> {
        self.entries
            .get(&canonicalize_name(name))
            .cloned()
            .unwrap_or_default()
    }

    pub fn entries(&self) -> &BTreeMap<String, BTreeSet<Iri>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
