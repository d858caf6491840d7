//! `ontoslice` command-line front end.

mod config;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use ontoslice::orchestrator::PipelineError;
use ontoslice::pathfinder::DEFAULT_MAX_HOPS;
use ontoslice::synthgen::{generate, Connectivity, GenSpec};
use ontoslice::turtle::parse_turtle_bytes;
use ontoslice::verbalizer::{verbalize_catalog_with, CatalogStyle};
use ontoslice::{
    check_conformance, extract_skeleton, find_path, full_slice, run_pipeline, seed_slice,
    serialize_turtle, verbalize_slice, ElementKind, FailureKind, Iri, NameIndex, Ontology,
    PhaseState, SessionLog, Slice,
};
use sha2::{Digest, Sha256};

use config::{Config, Overrides, API_KEY_ENV, CONFIG_ENV};

pub mod exit {
    pub const OK: u8 = 0;
    pub const PARSE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PROVIDER: u8 = 3;
    pub const NO_PROGRESS: u8 = 4;
    pub const STEP_LIMIT: u8 = 5;
    pub const NONCONFORMING: u8 = 6;
    pub const BUDGET: u8 = 7;
    pub const UNPARSEABLE: u8 = 8;
    pub const NOT_FOUND: u8 = 9;
}

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  parse or I/O failure
  2  usage or configuration error
  3  provider error
  4  no progress during refinement
  5  refinement step limit reached
  6  nonconforming query
  7  context budget exceeded
  8  unparseable model response
  9  name or path not found";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(exit::USAGE, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(exit::PARSE, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(exit::PARSE, message)
    }
}

fn failure_code(kind: FailureKind) -> u8 {
    match kind {
        FailureKind::NoProgress => exit::NO_PROGRESS,
        FailureKind::StepLimit => exit::STEP_LIMIT,
        FailureKind::NonconformingQuery => exit::NONCONFORMING,
        FailureKind::ProviderError => exit::PROVIDER,
        FailureKind::Budget => exit::BUDGET,
        FailureKind::UnparseableResponse => exit::UNPARSEABLE,
    }
}

#[derive(Parser)]
#[command(name = "ontoslice", version, about = "Ontology-sliced natural language to SPARQL", after_help = EXIT_CODES)]
struct Cli {
    /// Config file (TOML). Defaults to ./ontoslice.toml when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Ontology in Turtle; overrides `ontology_path` from the config file.
    #[arg(long, short = 'o', global = true)]
    ontology: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an ontology and print element and axiom counts.
    Ingest { path: PathBuf },
    /// Translate a question to SPARQL.
    Ask(AskArgs),
    /// Print the closed slice generated by the named elements.
    Slice {
        #[arg(required = true)]
        names: Vec<String>,
        /// Print the slice as Turtle instead of an element list.
        #[arg(long)]
        turtle: bool,
    },
    /// Print a shortest path between two concepts.
    Path {
        from: String,
        to: String,
        #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
        max_hops: usize,
    },
    /// Check a query against the ontology or a slice of it.
    Validate {
        query: PathBuf,
        /// Element list, one name or IRI per line; `#` starts a comment.
        /// Without it the whole ontology is the slice.
        #[arg(long)]
        slice: Option<PathBuf>,
    },
    /// Generate a synthetic ontology.
    Gen(GenArgs),
    /// Print the informal catalog or the formal Turtle rendering.
    Verbalize(VerbalizeArgs),
}

#[derive(Args)]
struct AskArgs {
    question: String,
    /// Replay a scripted transcript instead of calling a live endpoint.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    log_dir: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    max_hops: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    concepts: usize,
    #[arg(long, default_value_t = 1000)]
    relationships: usize,
    #[arg(long, default_value_t = 300)]
    attributes: usize,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Number of connected components.
    #[arg(long, default_value_t = 1)]
    components: usize,
    /// Output file; standard output when omitted.
    #[arg(long, short = 'O')]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("form").required(true).args(["catalog", "formal"])))]
struct VerbalizeArgs {
    #[arg(long)]
    catalog: bool,
    #[arg(long)]
    formal: bool,
    /// Catalog with element names only.
    #[arg(long, requires = "catalog")]
    names_only: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("ontoslice: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut overrides = Overrides {
        config: cli.config,
        ontology: cli.ontology,
        ..Overrides::default()
    };
    if let Command::Ask(a) = &cli.command {
        overrides.log_dir = a.log_dir.clone();
        overrides.context_budget_tokens = a.budget;
        overrides.max_refinement_steps = a.max_steps;
        overrides.max_hops = a.max_hops;
        overrides.transcript = a.transcript.clone();
        overrides.endpoint = a.endpoint.clone();
        overrides.model = a.model.clone();
    }
    let config = move || {
        Config::load(
            overrides,
            std::env::var_os(CONFIG_ENV).map(PathBuf::from),
            std::env::var(API_KEY_ENV).ok(),
        )
    };

    match cli.command {
        Command::Ingest { path } => ingest(&path),
        Command::Gen(args) => gen(&args),
        Command::Ask(args) => {
            let config = config()?;
            let ontology = load_ontology(config.ontology_path()?)?;
            ask(&args.question, &ontology, &config)
        }
        command => {
            let config = config()?;
            let ontology = load_ontology(config.ontology_path()?)?;
            match command {
                Command::Slice { names, turtle } => slice(&ontology, &names, turtle),
                Command::Path { from, to, max_hops } => path(&ontology, &from, &to, max_hops),
                Command::Validate { query, slice } => validate(&ontology, &query, slice.as_deref()),
                Command::Verbalize(args) => verbalize(&ontology, &args),
                Command::Ingest { .. } | Command::Gen(_) | Command::Ask(_) => unreachable!(),
            }
        }
    }
}

fn load_ontology(path: &Path) -> Result<Ontology, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    match parse_turtle_bytes(&bytes) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("{}:{w}", path.display());
            }
            Ok(parsed.ontology)
        }
        Err(diagnostics) => {
            let mut message = String::new();
            for d in &diagnostics {
                let _ = writeln!(message, "{}:{d}", path.display());
            }
            let _ = write!(message, "{} diagnostics", diagnostics.len());
            Err(Failure::parse(message))
        }
    }
}

fn ingest(path: &Path) -> Result<(), Failure> {
    let o = load_ontology(path)?;
    println!("concepts: {}", o.concepts().len());
    println!("relationships: {}", o.relationships().len());
    println!("attributes: {}", o.attributes().len());
    println!("axioms: {}", o.axiom_count());
    Ok(())
}

fn ask(question: &str, ontology: &Ontology, config: &Config) -> Result<(), Failure> {
    let provider = config.provider()?;
    let log =
        run_pipeline(question, ontology, &provider, &config.pipeline).map_err(|e| match e {
            PipelineError::EmptyQuestion => Failure::usage(e.to_string()),
            PipelineError::Provider(e) => Failure::new(exit::PROVIDER, e.to_string()),
        })?;
    let log_path = write_session_log(&config.log_dir, &log)?;
    eprintln!("session log: {}", log_path.display());
    match &log.outcome {
        PhaseState::Done { query, .. } => {
            println!("{query}");
            Ok(())
        }
        PhaseState::Failed { reason, detail } => Err(Failure::new(
            failure_code(*reason),
            format!("{reason}: {detail}"),
        )),
        other => Err(Failure::new(
            exit::PROVIDER,
            format!("pipeline stopped in a non-terminal state: {other:?}"),
        )),
    }
}

fn write_session_log(dir: &Path, log: &SessionLog) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let hash = format!("{:x}", Sha256::digest(log.question.as_bytes()));
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.6fZ");
    let path = dir.join(format!("{stamp}-{}.json", &hash[..12]));
    fs::write(&path, log.to_json()).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// A full IRI (`<...>` or `scheme://...`), a prefixed name or a label.
fn resolve_name(o: &Ontology, index: &NameIndex, name: &str) -> BTreeSet<Iri> {
    let trimmed = name.trim();
    let unbracketed = trimmed.strip_prefix('<').and_then(|s| s.strip_suffix('>'));
    if let Some(iri) = unbracketed.or(trimmed.contains("://").then_some(trimmed)) {
        return Iri::new(iri)
            .ok()
            .filter(|i| o.contains(i))
            .into_iter()
            .collect();
    }
    if let Some(iri) = o.expand_prefixed(trimmed).filter(|i| o.contains(i)) {
        return [iri].into();
    }
    index.resolve(trimmed)
}

fn resolve_all(o: &Ontology, names: &[String]) -> Result<BTreeSet<Iri>, Failure> {
    let index = NameIndex::build(o);
    let mut found = BTreeSet::new();
    let mut unresolved = Vec::new();
    for name in names {
        let iris = resolve_name(o, &index, name);
        if iris.is_empty() {
            unresolved.push(format!("unresolved: {name}"));
        }
        found.extend(iris);
    }
    if unresolved.is_empty() {
        Ok(found)
    } else {
        Err(Failure::new(exit::NOT_FOUND, unresolved.join("\n")))
    }
}

fn short(o: &Ontology, iri: &Iri) -> String {
    o.compact(iri).unwrap_or_else(|| format!("<{iri}>"))
}

fn slice(o: &Ontology, names: &[String], turtle: bool) -> Result<(), Failure> {
    let grounded = resolve_all(o, names)?;
    let s = seed_slice(o, &grounded).map_err(|e| Failure::new(exit::NOT_FOUND, e.to_string()))?;
    if turtle {
        print!(
            "{}",
            verbalize_slice(o, &s).map_err(|e| Failure::new(exit::NOT_FOUND, e.to_string()))?
        );
        return Ok(());
    }
    print!("{}", element_list(o, &s));
    Ok(())
}

fn element_list(o: &Ontology, s: &Slice) -> String {
    let mut out = String::new();
    for (kind, iris) in [
        (ElementKind::Concept, s.concepts()),
        (ElementKind::Relationship, s.relationships()),
        (ElementKind::Attribute, s.attributes()),
    ] {
        let label = match kind {
            ElementKind::Concept => "concept",
            ElementKind::Relationship => "relationship",
            ElementKind::Attribute => "attribute",
        };
        for iri in iris {
            let _ = writeln!(out, "{label}\t{}", short(o, iri));
        }
    }
    out
}

fn single_concept(o: &Ontology, index: &NameIndex, name: &str) -> Result<Iri, Failure> {
    let found: Vec<Iri> = resolve_name(o, index, name)
        .into_iter()
        .filter(|i| o.kind_of(i) == Some(ElementKind::Concept))
        .collect();
    match found.as_slice() {
        [] => Err(Failure::new(exit::NOT_FOUND, format!("unresolved: {name}"))),
        [one] => Ok(one.clone()),
        many => Err(Failure::usage(format!(
            "{name} is ambiguous: {}",
            many.iter()
                .map(|i| short(o, i))
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

fn path(o: &Ontology, from: &str, to: &str, max_hops: usize) -> Result<(), Failure> {
    let index = NameIndex::build(o);
    let (a, b) = (
        single_concept(o, &index, from)?,
        single_concept(o, &index, to)?,
    );
    let found =
        find_path(o, &a, &b, max_hops).map_err(|e| Failure::new(exit::NOT_FOUND, e.to_string()))?;
    let Some(p) = found else {
        return Err(Failure::new(
            exit::NOT_FOUND,
            format!(
                "no path from {} to {} within {max_hops} hops",
                short(o, &a),
                short(o, &b)
            ),
        ));
    };
    println!("length: {}", p.len());
    for s in &p.steps {
        println!(
            "{}\t{}\t{}\t{}",
            short(o, &s.from),
            short(o, &s.edge),
            s.direction,
            short(o, &s.to)
        );
    }
    Ok(())
}

fn validate(o: &Ontology, query: &Path, slice_file: Option<&Path>) -> Result<(), Failure> {
    let text =
        fs::read_to_string(query).map_err(|e| Failure::io(format!("{}: {e}", query.display())))?;
    let s = match slice_file {
        None => full_slice(o),
        Some(path) => {
            let list = fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let names: Vec<String> = list
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            seed_slice(o, &resolve_all(o, &names)?)
                .map_err(|e| Failure::new(exit::NOT_FOUND, e.to_string()))?
        }
    };
    let violations = match extract_skeleton(&text) {
        Ok(skeleton) => check_conformance(&skeleton, o, &s),
        Err(violations) => violations,
    };
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(exit::NONCONFORMING, String::new()))
    }
}

fn gen(args: &GenArgs) -> Result<(), Failure> {
    let spec = GenSpec {
        seed: args.seed,
        n_concepts: args.concepts,
        n_relationships: args.relationships,
        n_attributes: args.attributes,
        hierarchy_depth: args.depth,
        connectivity: match args.components {
            1 => Connectivity::Connected,
            k => Connectivity::Components(k),
        },
    };
    let o = generate(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    let text = serialize_turtle(&o);
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {} ({} axioms)", path.display(), o.axiom_count());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn verbalize(o: &Ontology, args: &VerbalizeArgs) -> Result<(), Failure> {
    if args.formal {
        print!("{}", serialize_turtle(o));
    } else {
        let style = if args.names_only {
            CatalogStyle::NamesOnly
        } else {
            CatalogStyle::Detailed
        };
        print!("{}", verbalize_catalog_with(o, style));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use ontoslice::synthgen::toy_ontology;

    #[test]
    fn command_line_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_failure_kind_has_a_distinct_code() {
        let kinds = [
            FailureKind::NoProgress,
            FailureKind::StepLimit,
            FailureKind::NonconformingQuery,
            FailureKind::ProviderError,
            FailureKind::Budget,
            FailureKind::UnparseableResponse,
        ];
        let codes: BTreeSet<u8> = kinds.iter().map(|k| failure_code(*k)).collect();
        assert_eq!(codes.len(), kinds.len());
        assert!(
            !codes.contains(&exit::OK)
                && !codes.contains(&exit::USAGE)
                && !codes.contains(&exit::PARSE)
        );
    }

    #[test]
    fn names_resolve_by_iri_prefix_or_label() {
        let o = toy_ontology();
        let index = NameIndex::build(&o);
        let plan = Iri::new("http://example.org/telecom#Plan").unwrap();
        for name in [
            "<http://example.org/telecom#Plan>",
            "http://example.org/telecom#Plan",
            "tel:Plan",
            "plan",
            " Plan ",
        ] {
            assert_eq!(
                resolve_name(&o, &index, name),
                [plan.clone()].into(),
                "{name}"
            );
        }
        assert!(resolve_name(&o, &index, "tel:Nope").is_empty());
        assert!(resolve_name(&o, &index, "<http://example.org/telecom#Nope>").is_empty());
    }
}
