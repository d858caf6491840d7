use super::lexer::{tokenize, Tok, Token};
use super::{ConformanceViolation, Feature, IriUse, SparqlSkeleton, ViolationKind};
use crate::ontology::{vocab, Iri};

const MAX_NESTING: usize = 64;

const BUILTINS: &[&str] = &[
    "STR",
    "LANG",
    "LANGMATCHES",
    "DATATYPE",
    "BOUND",
    "IRI",
    "URI",
    "BNODE",
    "RAND",
    "ABS",
    "CEIL",
    "FLOOR",
    "ROUND",
    "CONCAT",
    "STRLEN",
    "UCASE",
    "LCASE",
    "ENCODE_FOR_URI",
    "CONTAINS",
    "STRSTARTS",
    "STRENDS",
    "STRBEFORE",
    "STRAFTER",
    "YEAR",
    "MONTH",
    "DAY",
    "HOURS",
    "MINUTES",
    "SECONDS",
    "TIMEZONE",
    "TZ",
    "NOW",
    "UUID",
    "STRUUID",
    "MD5",
    "SHA1",
    "SHA256",
    "SHA384",
    "SHA512",
    "COALESCE",
    "IF",
    "STRLANG",
    "STRDT",
    "SAMETERM",
    "ISIRI",
    "ISURI",
    "ISBLANK",
    "ISLITERAL",
    "ISNUMERIC",
    "REGEX",
    "SUBSTR",
    "REPLACE",
];

const UNSUPPORTED: &[&str] = &[
    "BASE",
    "MINUS",
    "BIND",
    "VALUES",
    "SERVICE",
    "GRAPH",
    "EXISTS",
    "GROUP_CONCAT",
    "SAMPLE",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "FROM",
    "NAMED",
];

type PResult<T> = Result<T, ConformanceViolation>;

/// A term in subject or object position.
enum Node {
    Iri(Iri, Token),
    Other,
}

/// A parsed verb: `None` for a variable, else the path steps as
/// `(iri, inverse)` pairs.
type Verb = Option<Vec<(Option<Iri>, bool)>>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sk: SparqlSkeleton,
    soft: Vec<ConformanceViolation>,
    nesting: usize,
    in_subquery: bool,
}

pub(super) fn parse(query: &str) -> Result<SparqlSkeleton, Vec<ConformanceViolation>> {
    let toks = match tokenize(query) {
        Ok(t) => t,
        Err(e) => {
            return Err(vec![ConformanceViolation {
                kind: ViolationKind::ParseError,
                offending: e.text,
                location: e.loc,
                detail: e.message,
            }])
        }
    };
    let mut p = Parser {
        toks,
        pos: 0,
        sk: SparqlSkeleton::default(),
        soft: Vec::new(),
        nesting: 0,
        in_subquery: false,
    };
    match p.query() {
        Ok(()) if p.soft.is_empty() => Ok(p.sk),
        Ok(()) => Err(p.soft),
        Err(e) => {
            p.soft.push(e);
            Err(p.soft)
        }
    }
}

fn rdf_type() -> Iri {
    Iri::new(vocab::RDF_TYPE).expect("valid IRI")
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, detail: impl Into<String>) -> ConformanceViolation {
        ConformanceViolation {
            kind: ViolationKind::ParseError,
            offending: token.text.clone(),
            location: token.loc,
            detail: detail.into(),
        }
    }

    fn error(&self, detail: impl Into<String>) -> ConformanceViolation {
        self.error_at(self.peek(), detail)
    }

    fn is_word(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn word(&self) -> Option<String> {
        match &self.peek().tok {
            Tok::Word(w) => Some(w.to_ascii_uppercase()),
            _ => None,
        }
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        let hit = self.is_word(kw);
        if hit {
            self.advance();
        }
        hit
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Token> {
        if self.is_punct(p) {
            Ok(self.advance())
        } else {
            Err(self.error(format!("expected '{p}'")))
        }
    }

    fn expect_word(&mut self, kw: &str) -> PResult<()> {
        if self.eat_word(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected {kw}")))
        }
    }

    fn reject_unsupported(&self) -> PResult<()> {
        match self.word() {
            Some(w) if UNSUPPORTED.contains(&w.as_str()) => {
                Err(self.error(format!("{w} is not supported")))
            }
            _ => Ok(()),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(self.error("nesting too deep"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.nesting -= 1;
    }

    fn var(&mut self) -> PResult<()> {
        match self.advance() {
            Token {
                tok: Tok::Var(v), ..
            } => {
                self.sk.variables.insert(v);
                Ok(())
            }
            t => Err(self.error_at(&t, "expected a variable")),
        }
    }

    /// Resolves an IRI token. Undeclared prefixes and relative IRIs are
    /// recorded as violations and yield `None`.
    fn resolve(&mut self, token: &Token) -> Option<Iri> {
        let (iri, what) = match &token.tok {
            Tok::IriRef(s) => (Iri::new(s.as_str()).ok(), "relative or malformed IRI"),
            Tok::PName { prefix, local } => match self.sk.prefix_decls.get(prefix) {
                Some(ns) => (Iri::new(format!("{ns}{local}")).ok(), "malformed IRI"),
                None => (None, "undeclared prefix"),
            },
            Tok::Word(w) if w == "a" => (Some(rdf_type()), ""),
            _ => (None, "expected an IRI"),
        };
        if iri.is_none() {
            self.soft.push(ConformanceViolation {
                kind: ViolationKind::UnprefixedName,
                offending: token.text.clone(),
                location: token.loc,
                detail: what.to_string(),
            });
        }
        if let Some(i) = &iri {
            self.sk
                .occurrences
                .entry(i.clone())
                .or_insert_with(|| IriUse {
                    token: token.text.clone(),
                    location: token.loc,
                });
        }
        iri
    }

    fn is_iri_token(&self) -> bool {
        matches!(self.peek().tok, Tok::IriRef(_) | Tok::PName { .. })
    }

    fn query(&mut self) -> PResult<()> {
        loop {
            if self.eat_word("PREFIX") {
                let name = self.advance();
                let Tok::PName { prefix, local } = &name.tok else {
                    return Err(self.error_at(&name, "expected a prefix name ending in ':'"));
                };
                if !local.is_empty() {
                    return Err(self.error_at(&name, "expected a prefix name ending in ':'"));
                }
                let target = self.advance();
                let Tok::IriRef(ns) = &target.tok else {
                    return Err(self.error_at(&target, "expected an IRI in angle brackets"));
                };
                match Iri::new(ns.as_str()) {
                    Ok(iri) => {
                        self.sk.prefix_decls.insert(prefix.clone(), iri);
                    }
                    Err(_) => self.soft.push(ConformanceViolation {
                        kind: ViolationKind::UnprefixedName,
                        offending: target.text.clone(),
                        location: target.loc,
                        detail: "relative or malformed IRI".into(),
                    }),
                }
            } else {
                self.reject_unsupported()?;
                break;
            }
        }
        if !self.eat_word("SELECT") {
            return Err(self.error("expected SELECT"));
        }
        self.select_body()?;
        if self.peek().tok != Tok::Eof {
            return Err(self.error("unexpected input after the query"));
        }
        Ok(())
    }

    /// Everything after the SELECT keyword.
    fn select_body(&mut self) -> PResult<()> {
        if !self.eat_word("DISTINCT") {
            self.eat_word("REDUCED");
        }
        if !self.eat_punct("*") {
            let mut any = false;
            loop {
                match self.peek().tok {
                    Tok::Var(_) => self.var()?,
                    Tok::Punct("(") => {
                        self.advance();
                        self.expression()?;
                        self.expect_word("AS")?;
                        self.var()?;
                        self.expect_punct(")")?;
                    }
                    _ => break,
                }
                any = true;
            }
            if !any {
                return Err(self.error("expected a variable, expression or '*' after SELECT"));
            }
        }
        self.reject_unsupported()?;
        self.eat_word("WHERE");
        self.group_graph_pattern()?;
        self.solution_modifiers()
    }

    fn solution_modifiers(&mut self) -> PResult<()> {
        if self.is_word("GROUP") {
            self.advance();
            self.expect_word("BY")?;
            self.sk.features.insert(Feature::GroupBy);
            let mut any = false;
            loop {
                match &self.peek().tok {
                    Tok::Var(_) => self.var()?,
                    Tok::Punct("(") => {
                        self.advance();
                        self.expression()?;
                        if self.eat_word("AS") {
                            self.var()?;
                        }
                        self.expect_punct(")")?;
                    }
                    Tok::Word(_)
                        if matches!(self.peek_at(1), Tok::Punct("("))
                            && !self.is_modifier_keyword() =>
                    {
                        self.primary()?;
                    }
                    _ => break,
                }
                any = true;
            }
            if !any {
                return Err(self.error("expected a grouping condition"));
            }
        }
        if self.eat_word("HAVING") {
            self.sk.features.insert(Feature::Having);
            self.constraint()?;
            while self.is_punct("(") || (self.word().is_some() && !self.is_modifier_keyword()) {
                self.constraint()?;
            }
        }
        if self.is_word("ORDER") {
            self.advance();
            self.expect_word("BY")?;
            self.sk.features.insert(Feature::OrderBy);
            let mut any = false;
            loop {
                if self.is_word("ASC") || self.is_word("DESC") {
                    self.advance();
                    self.expect_punct("(")?;
                    self.enter()?;
                    self.expression()?;
                    self.leave();
                    self.expect_punct(")")?;
                } else if matches!(self.peek().tok, Tok::Var(_)) {
                    self.var()?;
                } else if self.is_punct("(")
                    || (self.word().is_some() && !self.is_modifier_keyword())
                {
                    self.constraint()?;
                } else {
                    break;
                }
                any = true;
            }
            if !any {
                return Err(self.error("expected an ordering condition"));
            }
        }
        let (mut limit, mut offset) = (false, false);
        loop {
            if !limit && self.is_word("LIMIT") {
                limit = true;
            } else if !offset && self.is_word("OFFSET") {
                offset = true;
            } else {
                break;
            }
            self.advance();
            match self.advance() {
                Token {
                    tok: Tok::Number(n),
                    ..
                } if n.bytes().all(|b| b.is_ascii_digit()) => {}
                t => return Err(self.error_at(&t, "expected a non-negative integer")),
            }
        }
        self.reject_unsupported()
    }

    fn is_modifier_keyword(&self) -> bool {
        matches!(
            self.word().as_deref(),
            Some("GROUP" | "HAVING" | "ORDER" | "LIMIT" | "OFFSET" | "ASC" | "DESC" | "BY")
        )
    }

    fn group_graph_pattern(&mut self) -> PResult<()> {
        self.expect_punct("{")?;
        self.enter()?;
        if self.is_word("SELECT") {
            if self.in_subquery {
                return Err(self.error("subqueries nest at most one level deep"));
            }
            self.advance();
            self.sk.features.insert(Feature::Subquery);
            self.in_subquery = true;
            self.select_body()?;
            self.in_subquery = false;
        } else {
            self.group_body()?;
        }
        self.leave();
        self.expect_punct("}")?;
        Ok(())
    }

    fn group_body(&mut self) -> PResult<()> {
        // Triples directly after triples need a '.' between them.
        let mut open_triples = false;
        loop {
            self.reject_unsupported()?;
            match &self.peek().tok {
                Tok::Punct("}") | Tok::Eof => return Ok(()),
                Tok::Punct(".") => {
                    if !open_triples {
                        return Err(self.error("unexpected '.'"));
                    }
                    self.advance();
                    open_triples = false;
                }
                Tok::Punct("{") => {
                    self.group_graph_pattern()?;
                    while self.eat_word("UNION") {
                        self.sk.features.insert(Feature::Union);
                        self.group_graph_pattern()?;
                    }
                    open_triples = false;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("OPTIONAL") => {
                    self.advance();
                    self.sk.features.insert(Feature::Optional);
                    self.group_graph_pattern()?;
                    open_triples = false;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.advance();
                    self.sk.features.insert(Feature::Filter);
                    self.constraint()?;
                    open_triples = false;
                }
                _ => {
                    if open_triples {
                        return Err(self.error("expected '.' between triple patterns"));
                    }
                    self.triples_same_subject()?;
                    open_triples = true;
                }
            }
        }
    }

    fn triples_same_subject(&mut self) -> PResult<()> {
        if self.is_punct("[") {
            let open = self.advance();
            self.enter()?;
            if self.eat_punct("]") {
                self.leave();
                return self.property_list(Node::Other);
            }
            self.property_list(Node::Other)?;
            self.leave();
            self.expect_punct("]")
                .map_err(|_| self.error_at(&open, "unclosed '['"))?;
            if self.starts_verb() {
                self.property_list(Node::Other)?;
            }
            return Ok(());
        }
        let subject = self.term()?;
        self.property_list(subject)
    }

    fn starts_verb(&self) -> bool {
        matches!(
            self.peek().tok,
            Tok::Var(_) | Tok::IriRef(_) | Tok::PName { .. } | Tok::Punct("^" | "(")
        ) || matches!(&self.peek().tok, Tok::Word(w) if w == "a")
    }

    fn property_list(&mut self, subject: Node) -> PResult<()> {
        if !self.starts_verb() {
            return Err(self.error("expected a predicate"));
        }
        loop {
            let verb = self.verb()?;
            if let Some(steps) = &verb {
                if let (Some((Some(first), true)), Node::Iri(iri, tok)) = (steps.first(), &subject)
                {
                    if *first == rdf_type() {
                        self.add_class(iri.clone(), tok);
                    }
                }
            }
            self.object_list(&verb)?;
            if !self.eat_punct(";") {
                return Ok(());
            }
            while self.eat_punct(";") {}
            if !self.starts_verb() {
                return Ok(());
            }
        }
    }

    fn add_class(&mut self, iri: Iri, tok: &Token) {
        self.sk
            .occurrences
            .entry(iri.clone())
            .or_insert_with(|| IriUse {
                token: tok.text.clone(),
                location: tok.loc,
            });
        self.sk.class_iris.insert(iri);
    }

    fn verb(&mut self) -> PResult<Verb> {
        if matches!(self.peek().tok, Tok::Var(_)) {
            self.var()?;
            return Ok(None);
        }
        let mut steps = Vec::new();
        let mut complex = false;
        self.path(&mut steps, &mut complex)?;
        if complex || steps.len() > 1 || steps.iter().any(|(_, inv)| *inv) {
            self.sk.features.insert(Feature::PropertyPath);
        }
        Ok(Some(steps))
    }

    fn path(&mut self, steps: &mut Vec<(Option<Iri>, bool)>, complex: &mut bool) -> PResult<()> {
        loop {
            let inverse = self.eat_punct("^");
            if self.is_punct("(") {
                self.advance();
                self.enter()?;
                *complex = true;
                let start = steps.len();
                self.path(steps, complex)?;
                if inverse {
                    // ^(a/b) walks b backwards, then a.
                    steps[start..].reverse();
                    for s in &mut steps[start..] {
                        s.1 = !s.1;
                    }
                }
                self.leave();
                self.expect_punct(")")?;
            } else {
                let tok = self.advance();
                let is_a = matches!(&tok.tok, Tok::Word(w) if w == "a");
                if !is_a && !matches!(tok.tok, Tok::IriRef(_) | Tok::PName { .. }) {
                    return Err(self.error_at(&tok, "expected a predicate"));
                }
                let iri = self.resolve(&tok);
                if let Some(i) = &iri {
                    if !vocab::is_builtin(i.as_str()) {
                        self.sk.predicate_iris.insert(i.clone());
                    }
                }
                steps.push((iri, inverse));
            }
            if matches!(self.peek().tok, Tok::Punct("*" | "+" | "?" | "!")) {
                return Err(self.error("path modifiers and negated paths are not supported"));
            }
            if self.is_punct("|") {
                return Err(self.error("alternative paths are not supported"));
            }
            if !self.eat_punct("/") {
                return Ok(());
            }
        }
    }

    fn object_list(&mut self, verb: &Verb) -> PResult<()> {
        let types_object = matches!(verb, Some(steps) if steps.last().is_some_and(|(i, inv)| !inv && *i == Some(rdf_type())));
        loop {
            if self.is_punct("[") {
                let open = self.advance();
                self.enter()?;
                if !self.eat_punct("]") {
                    self.property_list(Node::Other)?;
                    self.expect_punct("]")
                        .map_err(|_| self.error_at(&open, "unclosed '['"))?;
                }
                self.leave();
            } else if let Node::Iri(iri, tok) = self.term()? {
                if types_object {
                    self.add_class(iri, &tok);
                }
            }
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    /// A variable, IRI, literal or blank node label.
    fn term(&mut self) -> PResult<Node> {
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Var(_) => {
                self.var()?;
                Ok(Node::Other)
            }
            Tok::IriRef(_) | Tok::PName { .. } => {
                self.advance();
                Ok(match self.resolve(&tok) {
                    Some(iri) => Node::Iri(iri, tok),
                    None => Node::Other,
                })
            }
            Tok::Blank(_) => {
                self.advance();
                Ok(Node::Other)
            }
            Tok::Str(_) | Tok::Number(_) | Tok::Punct("-" | "+") => {
                self.literal()?;
                Ok(Node::Other)
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.advance();
                Ok(Node::Other)
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn literal(&mut self) -> PResult<()> {
        let tok = self.advance();
        match tok.tok {
            Tok::Str(_) => {
                if matches!(self.peek().tok, Tok::LangTag(_)) {
                    self.advance();
                } else if self.eat_punct("^^") {
                    let dt = self.advance();
                    if !matches!(dt.tok, Tok::IriRef(_) | Tok::PName { .. }) {
                        return Err(self.error_at(&dt, "expected a datatype IRI"));
                    }
                    self.resolve(&dt);
                }
                Ok(())
            }
            Tok::Number(_) => Ok(()),
            Tok::Punct("-" | "+") => match self.advance().tok {
                Tok::Number(_) => Ok(()),
                _ => Err(self.error_at(&tok, "expected a number")),
            },
            _ => Err(self.error_at(&tok, "expected a literal")),
        }
    }

    /// A bracketed expression or a function call.
    fn constraint(&mut self) -> PResult<()> {
        if self.is_punct("(") || self.word().is_some() || self.is_iri_token() {
            self.primary()
        } else {
            Err(self.error("expected a constraint"))
        }
    }

    fn expression(&mut self) -> PResult<()> {
        self.enter()?;
        self.and_expr()?;
        while self.eat_punct("||") {
            self.and_expr()?;
        }
        self.leave();
        Ok(())
    }

    fn and_expr(&mut self) -> PResult<()> {
        self.relational()?;
        while self.eat_punct("&&") {
            self.relational()?;
        }
        Ok(())
    }

    fn relational(&mut self) -> PResult<()> {
        self.additive()?;
        if matches!(
            self.peek().tok,
            Tok::Punct("=" | "!=" | "<" | ">" | "<=" | ">=")
        ) {
            self.advance();
            self.additive()?;
        } else if self.is_word("IN")
            || (self.is_word("NOT")
                && matches!(self.peek_at(1), Tok::Word(w) if w.eq_ignore_ascii_case("IN")))
        {
            self.eat_word("NOT");
            self.advance();
            self.arguments()?;
        }
        Ok(())
    }

    fn additive(&mut self) -> PResult<()> {
        self.multiplicative()?;
        while matches!(self.peek().tok, Tok::Punct("+" | "-")) {
            self.advance();
            self.multiplicative()?;
        }
        Ok(())
    }

    fn multiplicative(&mut self) -> PResult<()> {
        self.unary()?;
        while matches!(self.peek().tok, Tok::Punct("*" | "/")) {
            self.advance();
            self.unary()?;
        }
        Ok(())
    }

    fn unary(&mut self) -> PResult<()> {
        if matches!(self.peek().tok, Tok::Punct("!" | "-" | "+")) {
            self.advance();
        }
        self.primary()
    }

    fn arguments(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        if !self.eat_punct(")") {
            self.expression()?;
            while self.eat_punct(",") {
                self.expression()?;
            }
            self.expect_punct(")")?;
        }
        Ok(())
    }

    fn primary(&mut self) -> PResult<()> {
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Punct("(") => {
                self.advance();
                self.expression()?;
                self.expect_punct(")")?;
                Ok(())
            }
            Tok::Var(_) => self.var(),
            Tok::Str(_) | Tok::Number(_) => self.literal(),
            Tok::IriRef(_) | Tok::PName { .. } => {
                self.advance();
                self.resolve(&tok);
                if self.is_punct("(") {
                    self.arguments()?;
                }
                Ok(())
            }
            Tok::Word(w) => {
                let upper = w.to_ascii_uppercase();
                if w == "true" || w == "false" {
                    self.advance();
                    return Ok(());
                }
                let aggregate = match upper.as_str() {
                    "COUNT" => Some(Feature::AggregateCount),
                    "SUM" => Some(Feature::AggregateSum),
                    "AVG" => Some(Feature::AggregateAvg),
                    "MIN" => Some(Feature::AggregateMin),
                    "MAX" => Some(Feature::AggregateMax),
                    _ => None,
                };
                if let Some(feature) = aggregate {
                    self.advance();
                    self.sk.features.insert(feature);
                    self.expect_punct("(")?;
                    self.eat_word("DISTINCT");
                    if !(feature == Feature::AggregateCount && self.eat_punct("*")) {
                        self.expression()?;
                    }
                    self.expect_punct(")")?;
                    return Ok(());
                }
                if BUILTINS.contains(&upper.as_str()) {
                    self.advance();
                    return self.arguments();
                }
                self.reject_unsupported()?;
                if upper == "NOT" {
                    return Err(self.error("NOT EXISTS is not supported"));
                }
                Err(self.error(format!("unknown function {w}")))
            }
            _ => Err(self.error("expected an expression")),
        }
    }
}
