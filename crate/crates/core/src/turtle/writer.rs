use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::ontology::{vocab, Iri, Ontology};

/// A predicate and its objects, already rendered.
type PredicateObjects = (String, Vec<String>);

/// Deterministic Turtle rendering: prefixes sorted by name, one block per
/// element in IRI order, predicates in a fixed order.
pub fn serialize_turtle(ontology: &Ontology) -> String {
    let mut out = String::new();
    for (prefix, namespace) in ontology.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{}> .", namespace.as_str());
    }

    let writer = TermWriter { ontology };
    let mut blocks: Vec<(&Iri, Vec<PredicateObjects>)> = Vec::new();
    for concept in ontology.concepts().values() {
        let mut lines = writer.header(vocab::OWL_CLASS, &concept.label, &concept.comment);
        writer.push_iris(&mut lines, vocab::RDFS_SUBCLASS_OF, &concept.superclasses);
        blocks.push((&concept.iri, lines));
    }
    for rel in ontology.relationships().values() {
        let mut lines = writer.header(vocab::OWL_OBJECT_PROPERTY, &rel.label, &rel.comment);
        writer.push_iris(&mut lines, vocab::RDFS_DOMAIN, &rel.domains);
        writer.push_iris(&mut lines, vocab::RDFS_RANGE, &rel.ranges);
        blocks.push((&rel.iri, lines));
    }
    for attr in ontology.attributes().values() {
        let mut lines = writer.header(vocab::OWL_DATATYPE_PROPERTY, &attr.label, &attr.comment);
        writer.push_iris(&mut lines, vocab::RDFS_DOMAIN, &attr.domains);
        writer.push_iris(
            &mut lines,
            vocab::RDFS_RANGE,
            &BTreeSet::from([attr.datatype.clone()]),
        );
        blocks.push((&attr.iri, lines));
    }
    blocks.sort_by(|a, b| a.0.cmp(b.0));

    for (subject, lines) in blocks {
        out.push('\n');
        out.push_str(&writer.iri(subject));
        let count = lines.len();
        for (i, (predicate, objects)) in lines.into_iter().enumerate() {
            if i == 0 {
                out.push(' ');
            } else {
                out.push_str("    ");
            }
            out.push_str(&predicate);
            out.push(' ');
            out.push_str(&objects.join(", "));
            out.push_str(if i + 1 == count { " .\n" } else { " ;\n" });
        }
    }
    out
}

struct TermWriter<'a> {
    ontology: &'a Ontology,
}

impl TermWriter<'_> {
    fn header(
        &self,
        class: &str,
        label: &Option<String>,
        comment: &Option<String>,
    ) -> Vec<PredicateObjects> {
        let mut lines = vec![("a".to_string(), vec![self.builtin(class)])];
        if let Some(label) = label {
            lines.push((self.builtin(vocab::RDFS_LABEL), vec![quote(label)]));
        }
        if let Some(comment) = comment {
            lines.push((self.builtin(vocab::RDFS_COMMENT), vec![quote(comment)]));
        }
        lines
    }

    fn push_iris(
        &self,
        lines: &mut Vec<PredicateObjects>,
        predicate: &str,
        objects: &BTreeSet<Iri>,
    ) {
        if !objects.is_empty() {
            lines.push((
                self.builtin(predicate),
                objects.iter().map(|o| self.iri(o)).collect(),
            ));
        }
    }

    fn builtin(&self, iri: &str) -> String {
        self.iri(&Iri::new(iri).expect("vocabulary constants are valid IRIs"))
    }

    fn iri(&self, iri: &Iri) -> String {
        match self.ontology.compact(iri) {
            Some(pname) if is_safe_pname(&pname) => pname,
            _ => format!("<{}>", iri.as_str()),
        }
    }
}

/// Prefixed names restricted to what the reader lexes back unchanged.
fn is_safe_pname(pname: &str) -> bool {
    let Some((prefix, local)) = pname.split_once(':') else {
        return false;
    };
    let name_char = |c: char| c.is_alphanumeric() || c == '_' || c == '-';
    let prefix_ok = prefix.is_empty()
        || (prefix.starts_with(|c: char| c.is_alphabetic()) && prefix.chars().all(name_char));
    prefix_ok && !local.is_empty() && local.chars().all(name_char) && !local.starts_with('-')
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{Concept, Relationship};
    use crate::turtle::parse_turtle;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn sample(with_prefixes: bool) -> Ontology {
        let mut b = Ontology::builder();
        if with_prefixes {
            b.prefix("ex", iri("http://ex.org/t#"))
                .prefix("owl", iri(vocab::OWL))
                .prefix("rdfs", iri(vocab::RDFS));
        }
        let mut c = Concept::new(iri("http://ex.org/t#Customer"));
        c.label = Some("Customer".into());
        c.comment = Some("Says \"hi\"\\\n\tand\u{1}".into());
        let p = Concept::new(iri("http://ex.org/t#Plan"));
        let mut r = Relationship::new(iri("http://ex.org/t#hasPlan"));
        r.domains.insert(c.iri.clone());
        r.ranges.insert(p.iri.clone());
        b.concept(c).concept(p).relationship(r);
        b.build().unwrap()
    }

    #[test]
    fn empty_ontology_serializes_to_nothing() {
        assert_eq!(serialize_turtle(&Ontology::default()), "");
    }

    #[test]
    fn golden_small_ontology() {
        let text = serialize_turtle(&sample(true));
        let expected = "@prefix ex: <http://ex.org/t#> .\n\
@prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
\n\
ex:Customer a owl:Class ;\n    rdfs:label \"Customer\" ;\n    rdfs:comment \"Says \\\"hi\\\"\\\\\\n\\tand\\u0001\" .\n\
\n\
ex:Plan a owl:Class .\n\
\n\
ex:hasPlan a owl:ObjectProperty ;\n    rdfs:domain ex:Customer ;\n    rdfs:range ex:Plan .\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trips_with_and_without_prefixes() {
        for with_prefixes in [true, false] {
            let o = sample(with_prefixes);
            let text = serialize_turtle(&o);
            let back = parse_turtle(&text).unwrap();
            assert!(back.warnings.is_empty());
            assert_eq!(back.ontology, o);
            assert_eq!(serialize_turtle(&o), text);
        }
    }

    #[test]
    fn unsafe_local_names_fall_back_to_full_iris() {
        assert!(is_safe_pname("ex:Customer"));
        assert!(is_safe_pname(":x"));
        assert!(!is_safe_pname("ex:"));
        assert!(!is_safe_pname("ex:a.b"));
        assert!(!is_safe_pname("ex:a/b"));
        assert!(!is_safe_pname("1x:a"));
    }
}
