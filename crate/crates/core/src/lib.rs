//! Incremental ontology slicing for translating natural-language questions
//! into SPARQL.
//!
//! An LLM first maps a question onto names from a compact catalog of the
//! ontology. The resulting elements seed a slice, which is rendered as Turtle
//! and grown from the model's reports of missing concepts and links (resolved
//! by path-finding over the ontology graph) until the model can emit a query.
//! The final query is checked against the last slice before it is accepted.

pub mod gateway;
pub mod ontology;
pub mod orchestrator;
pub mod pathfinder;
pub mod slicer;
pub mod sparql;
pub mod synthgen;
pub mod turtle;
pub mod verbalizer;

pub use gateway::{LlmProvider, MissingLink, MissingReport, ParsedResponse, Phase};
pub use ontology::{
    Attribute, Concept, Direction, ElementKind, Iri, NameIndex, Neighbor, Ontology,
    OntologyBuilder, OntologyError, Relationship,
};
pub use orchestrator::{run_pipeline, FailureKind, PhaseState, PipelineConfig, SessionLog};
pub use pathfinder::{find_path, resolve_missing, Path};
pub use slicer::{expand_slice, full_slice, seed_slice, Slice};
pub use sparql::{check_conformance, extract_skeleton, ConformanceViolation};
pub use turtle::{parse_turtle, serialize_turtle, ParseDiagnostic, Parsed};
pub use verbalizer::{estimate_tokens, verbalize_catalog, verbalize_slice};
