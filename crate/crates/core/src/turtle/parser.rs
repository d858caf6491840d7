//! Statement-level Turtle parser producing positioned raw triples.

use std::collections::BTreeMap;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseDiagnostic, Position};
use crate::ontology::{vocab, Iri};

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Iri(Iri),
    /// Labeled or generated blank node. `generated` is true for `[...]` and
    /// collection nodes.
    Blank {
        id: String,
        generated: bool,
    },
    Literal {
        value: String,
        lang: Option<String>,
        datatype: Option<Iri>,
    },
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
    pub subject_pos: Position,
    pub object_pos: Position,
}

#[derive(Debug, Default)]
pub struct Document {
    pub prefixes: BTreeMap<String, Iri>,
    pub triples: Vec<Triple>,
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: Position,
    prefixes: BTreeMap<String, Iri>,
    triples: Vec<Triple>,
    errors: Vec<ParseDiagnostic>,
    blank_counter: usize,
}

type PResult<T> = Result<T, ParseDiagnostic>;

/// Parses the statement grammar into triples; all syntax errors are
/// collected, recovering at the next top-level '.'.
pub fn parse_document(input: &str) -> Result<Document, Vec<ParseDiagnostic>> {
    let (tokens, mut errors) = tokenize(input);
    let end = end_position(input);
    let mut parser = Parser {
        tokens,
        at: 0,
        end,
        prefixes: BTreeMap::new(),
        triples: Vec::new(),
        errors: Vec::new(),
        blank_counter: 0,
    };
    while parser.peek().is_some() {
        if let Err(diag) = parser.statement() {
            parser.errors.push(diag);
            parser.recover();
        }
    }
    errors.append(&mut parser.errors);
    if errors.is_empty() {
        Ok(Document {
            prefixes: parser.prefixes,
            triples: parser.triples,
        })
    } else {
        errors.sort_by_key(|d| (d.line, d.column));
        Err(errors)
    }
}

fn end_position(input: &str) -> Position {
    let mut pos = Position { line: 1, column: 1 };
    for c in input.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> Position {
        self.tokens.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn next(&mut self) -> PResult<Token> {
        let token = self
            .tokens
            .get(self.at)
            .cloned()
            .ok_or_else(|| ParseDiagnostic::error(self.end, "unexpected end of input"))?;
        self.at += 1;
        Ok(token)
    }

    fn expect(&mut self, want: &Tok, what: &str) -> PResult<()> {
        let pos = self.pos();
        match self.next() {
            Ok(t) if &t.tok == want => Ok(()),
            Ok(t) => Err(ParseDiagnostic::error(
                pos,
                format!("expected {what}, found {}", t.tok.describe()),
            )),
            Err(e) => Err(ParseDiagnostic::error(
                e.position(),
                format!("expected {what}, found end of input"),
            )),
        }
    }

    fn recover(&mut self) {
        let mut depth = 0i32;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::OpenBracket | Tok::OpenParen => depth += 1,
                Tok::CloseBracket | Tok::CloseParen => depth -= 1,
                Tok::Dot if depth <= 0 => {
                    self.at += 1;
                    return;
                }
                _ => {}
            }
            self.at += 1;
        }
    }

    fn statement(&mut self) -> PResult<()> {
        match self.peek() {
            Some(Tok::Directive(d)) if d == "prefix" => {
                self.at += 1;
                self.prefix_decl()?;
                self.expect(&Tok::Dot, "'.' after @prefix")
            }
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("prefix") => {
                self.at += 1;
                self.prefix_decl()
            }
            Some(Tok::Directive(_)) => {
                Err(ParseDiagnostic::error(self.pos(), "@base is not supported"))
            }
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("base") => {
                Err(ParseDiagnostic::error(self.pos(), "BASE is not supported"))
            }
            _ => {
                self.triples_statement()?;
                self.expect(&Tok::Dot, "'.' at end of statement")
            }
        }
    }

    fn prefix_decl(&mut self) -> PResult<()> {
        let pos = self.pos();
        let prefix = match self.next()?.tok {
            Tok::PrefixedName { prefix, local } if local.is_empty() => prefix,
            other => {
                return Err(ParseDiagnostic::error(
                    pos,
                    format!(
                        "expected a prefix name like 'ex:', found {}",
                        other.describe()
                    ),
                ))
            }
        };
        let pos = self.pos();
        let namespace = match self.next()?.tok {
            Tok::IriRef(iri) => {
                Iri::new(iri).map_err(|e| ParseDiagnostic::error(pos, e.to_string()))?
            }
            other => {
                return Err(ParseDiagnostic::error(
                    pos,
                    format!("expected a namespace IRI, found {}", other.describe()),
                ))
            }
        };
        self.prefixes.insert(prefix, namespace);
        Ok(())
    }

    fn triples_statement(&mut self) -> PResult<()> {
        let subject_pos = self.pos();
        if self.peek() == Some(&Tok::OpenBracket) {
            let subject = self.blank_property_list()?;
            if self.peek() != Some(&Tok::Dot) {
                self.predicate_object_list(&subject, subject_pos)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject, subject_pos)
    }

    fn subject(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::OpenParen) => self.collection(),
            Some(Tok::IriRef(_) | Tok::PrefixedName { .. } | Tok::BlankLabel(_)) => self.term(),
            Some(other) => Err(ParseDiagnostic::error(
                pos,
                format!("expected a subject, found {}", other.describe()),
            )),
            None => Err(ParseDiagnostic::error(
                pos,
                "expected a subject, found end of input",
            )),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term, subject_pos: Position) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            loop {
                let object_pos = self.pos();
                let object = self.object()?;
                self.triples.push(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                    subject_pos,
                    object_pos,
                });
                if self.peek() == Some(&Tok::Comma) {
                    self.at += 1;
                } else {
                    break;
                }
            }
            // One or more ';' may precede the next verb or the terminator.
            let mut saw_semicolon = false;
            while self.peek() == Some(&Tok::Semicolon) {
                self.at += 1;
                saw_semicolon = true;
            }
            if !saw_semicolon {
                return Ok(());
            }
            if matches!(self.peek(), Some(Tok::Dot | Tok::CloseBracket) | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Iri> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Word(w)) if w == "a" => {
                self.at += 1;
                Ok(Iri::new(vocab::RDF_TYPE).expect("valid constant"))
            }
            Some(Tok::IriRef(_) | Tok::PrefixedName { .. }) => match self.term()? {
                Term::Iri(iri) => Ok(iri),
                _ => Err(ParseDiagnostic::error(pos, "expected a predicate IRI")),
            },
            Some(other) => Err(ParseDiagnostic::error(
                pos,
                format!("expected a predicate, found {}", other.describe()),
            )),
            None => Err(ParseDiagnostic::error(
                pos,
                "expected a predicate, found end of input",
            )),
        }
    }

    fn object(&mut self) -> PResult<Term> {
        match self.peek() {
            Some(Tok::OpenBracket) => self.blank_property_list(),
            Some(Tok::OpenParen) => self.collection(),
            _ => self.term(),
        }
    }

    fn fresh_blank(&mut self) -> Term {
        self.blank_counter += 1;
        Term::Blank {
            id: format!("genid{}", self.blank_counter),
            generated: true,
        }
    }

    fn blank_property_list(&mut self) -> PResult<Term> {
        let pos = self.pos();
        self.expect(&Tok::OpenBracket, "'['")?;
        let node = self.fresh_blank();
        if self.peek() == Some(&Tok::CloseBracket) {
            self.at += 1;
            return Ok(node);
        }
        self.predicate_object_list(&node, pos)?;
        self.expect(&Tok::CloseBracket, "']'")?;
        Ok(node)
    }

    fn collection(&mut self) -> PResult<Term> {
        let pos = self.pos();
        self.expect(&Tok::OpenParen, "'('")?;
        let nil = Term::Iri(Iri::new(format!("{}nil", vocab::RDF)).expect("valid constant"));
        let first = Iri::new(format!("{}first", vocab::RDF)).expect("valid constant");
        let rest = Iri::new(format!("{}rest", vocab::RDF)).expect("valid constant");
        let mut items = Vec::new();
        while self.peek() != Some(&Tok::CloseParen) {
            if self.peek().is_none() {
                return Err(ParseDiagnostic::error(self.end, "unterminated collection"));
            }
            let item_pos = self.pos();
            items.push((self.object()?, item_pos));
        }
        self.at += 1;
        let mut head = nil;
        for (item, item_pos) in items.into_iter().rev() {
            let node = self.fresh_blank();
            self.triples.push(Triple {
                subject: node.clone(),
                predicate: first.clone(),
                object: item,
                subject_pos: pos,
                object_pos: item_pos,
            });
            self.triples.push(Triple {
                subject: node.clone(),
                predicate: rest.clone(),
                object: head,
                subject_pos: pos,
                object_pos: pos,
            });
            head = node;
        }
        Ok(head)
    }

    fn term(&mut self) -> PResult<Term> {
        let token = self.next()?;
        let pos = token.pos;
        match token.tok {
            Tok::IriRef(iri) => Iri::new(iri.clone()).map(Term::Iri).map_err(|_| {
                ParseDiagnostic::error(
                    pos,
                    format!("relative or invalid IRI <{iri}> is not supported"),
                )
            }),
            Tok::PrefixedName { prefix, local } => self.expand(&prefix, &local, pos).map(Term::Iri),
            Tok::BlankLabel(id) => Ok(Term::Blank {
                id,
                generated: false,
            }),
            Tok::Str(value) => {
                let mut lang = None;
                let mut datatype = None;
                match self.peek() {
                    Some(Tok::LangTag(_)) => {
                        if let Tok::LangTag(tag) = self.next()?.tok {
                            lang = Some(tag);
                        }
                    }
                    Some(Tok::DoubleCaret) => {
                        self.at += 1;
                        let dt_pos = self.pos();
                        match self.term()? {
                            Term::Iri(iri) => datatype = Some(iri),
                            _ => {
                                return Err(ParseDiagnostic::error(
                                    dt_pos,
                                    "expected a datatype IRI",
                                ))
                            }
                        }
                    }
                    _ => {}
                }
                Ok(Term::Literal {
                    value,
                    lang,
                    datatype,
                })
            }
            Tok::Number(n) => {
                let kind = if n.contains(['e', 'E']) {
                    "double"
                } else if n.contains('.') {
                    "decimal"
                } else {
                    "integer"
                };
                Ok(Term::Literal {
                    value: n,
                    lang: None,
                    datatype: Iri::new(format!("{}{kind}", vocab::XSD)).ok(),
                })
            }
            Tok::Word(w) if w == "true" || w == "false" => Ok(Term::Literal {
                value: w,
                lang: None,
                datatype: Iri::new(format!("{}boolean", vocab::XSD)).ok(),
            }),
            other => Err(ParseDiagnostic::error(
                pos,
                format!(
                    "expected an IRI, blank node or literal, found {}",
                    other.describe()
                ),
            )),
        }
    }

    fn expand(&self, prefix: &str, local: &str, pos: Position) -> PResult<Iri> {
        let namespace = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| ParseDiagnostic::error(pos, format!("undeclared prefix '{prefix}:'")))?;
        Iri::new(format!("{}{}", namespace.as_str(), local))
            .map_err(|e| ParseDiagnostic::error(pos, e.to_string()))
    }
}
