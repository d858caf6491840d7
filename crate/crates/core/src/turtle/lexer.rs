use super::{ParseDiagnostic, Position};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    IriRef(String),
    PrefixedName { prefix: String, local: String },
    BlankLabel(String),
    Str(String),
    LangTag(String),
    Directive(String),
    Number(String),
    Word(String),
    Dot,
    Semicolon,
    Comma,
    OpenBracket,
    CloseBracket,
    OpenParen,
    CloseParen,
    DoubleCaret,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::PrefixedName { prefix, local } => format!("{prefix}:{local}"),
            Tok::BlankLabel(l) => format!("_:{l}"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::LangTag(t) => format!("@{t}"),
            Tok::Directive(d) => format!("@{d}"),
            Tok::Number(n) => n.clone(),
            Tok::Word(w) => w.clone(),
            Tok::Dot => "'.'".into(),
            Tok::Semicolon => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::OpenBracket => "'['".into(),
            Tok::CloseBracket => "']'".into(),
            Tok::OpenParen => "'('".into(),
            Tok::CloseParen => "')'".into(),
            Tok::DoubleCaret => "'^^'".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

struct Cursor<'a> {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.at + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

/// Tokenizes the whole input. Lexical errors are collected and the offending
/// character skipped so later errors are still reported.
pub(crate) fn tokenize(input: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let mut cur = Cursor {
        chars: input.chars().collect(),
        at: 0,
        line: 1,
        column: 1,
        _src: input,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let tok = match c {
            '<' => lex_iri(&mut cur).map(Tok::IriRef),
            '"' | '\'' => lex_string(&mut cur).map(Tok::Str),
            '@' => {
                cur.bump();
                let mut word = String::new();
                while let Some(c) = cur
                    .peek()
                    .filter(|c| c.is_ascii_alphanumeric() || *c == '-')
                {
                    word.push(c);
                    cur.bump();
                }
                if word.is_empty() {
                    Err("expected a language tag or directive after '@'".to_string())
                } else if word == "prefix" || word == "base" {
                    Ok(Tok::Directive(word))
                } else {
                    Ok(Tok::LangTag(word))
                }
            }
            '.' if !cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                cur.bump();
                Ok(Tok::Dot)
            }
            ';' => {
                cur.bump();
                Ok(Tok::Semicolon)
            }
            ',' => {
                cur.bump();
                Ok(Tok::Comma)
            }
            '[' => {
                cur.bump();
                Ok(Tok::OpenBracket)
            }
            ']' => {
                cur.bump();
                Ok(Tok::CloseBracket)
            }
            '(' => {
                cur.bump();
                Ok(Tok::OpenParen)
            }
            ')' => {
                cur.bump();
                Ok(Tok::CloseParen)
            }
            '^' if cur.peek_at(1) == Some('^') => {
                cur.bump();
                cur.bump();
                Ok(Tok::DoubleCaret)
            }
            '_' if cur.peek_at(1) == Some(':') => {
                cur.bump();
                cur.bump();
                let label = lex_name(&mut cur);
                if label.is_empty() {
                    Err("empty blank node label".to_string())
                } else {
                    Ok(Tok::BlankLabel(label))
                }
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => lex_number(&mut cur),
            c if is_name_start(c) || c == ':' => lex_word_or_pname(&mut cur),
            other => {
                cur.bump();
                Err(format!("unexpected character {other:?}"))
            }
        };
        match tok {
            Ok(tok) => tokens.push(Token { tok, pos }),
            Err(message) => errors.push(ParseDiagnostic::error(pos, message)),
        }
    }
    (tokens, errors)
}

/// Reads name characters, leaving a trailing '.' for the statement terminator.
fn lex_name(cur: &mut Cursor<'_>) -> String {
    let mut name = String::new();
    while let Some(c) = cur.peek() {
        if c == '.' && !cur.peek_at(1).is_some_and(is_name_char_not_dot) {
            break;
        }
        if !is_name_char(c) {
            break;
        }
        name.push(c);
        cur.bump();
    }
    name
}

fn is_name_char_not_dot(c: char) -> bool {
    is_name_char(c) && c != '.'
}

fn lex_word_or_pname(cur: &mut Cursor<'_>) -> Result<Tok, String> {
    let prefix = if cur.peek() == Some(':') {
        String::new()
    } else {
        lex_name(cur)
    };
    if cur.peek() != Some(':') {
        return Ok(Tok::Word(prefix));
    }
    cur.bump();
    let mut local = String::new();
    while let Some(c) = cur.peek() {
        if c == '\\' {
            cur.bump();
            match cur.bump() {
                Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                _ => return Err("invalid escape in prefixed name".to_string()),
            }
            continue;
        }
        if c == '.'
            && !cur
                .peek_at(1)
                .is_some_and(|n| is_name_char_not_dot(n) || n == ':')
        {
            break;
        }
        if !(is_name_char(c) || c == ':' || c == '%') {
            break;
        }
        local.push(c);
        cur.bump();
    }
    Ok(Tok::PrefixedName { prefix, local })
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<Tok, String> {
    let mut text = String::new();
    if let Some(sign) = cur.peek().filter(|c| *c == '+' || *c == '-') {
        text.push(sign);
        cur.bump();
    }
    let mut digits = 0;
    while let Some(c) = cur.peek() {
        let exponent_sign = (c == '+' || c == '-') && text.ends_with(['e', 'E']);
        if c.is_ascii_digit() {
            digits += 1;
        } else if (c == '.' && !cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
            || !(c == '.' || c == 'e' || c == 'E' || exponent_sign)
        {
            break;
        }
        text.push(c);
        cur.bump();
    }
    if digits == 0 {
        Err(format!("malformed number {text:?}"))
    } else {
        Ok(Tok::Number(text))
    }
}

fn lex_iri(cur: &mut Cursor<'_>) -> Result<String, String> {
    cur.bump();
    let mut iri = String::new();
    loop {
        match cur.bump() {
            None => return Err("unterminated IRI".to_string()),
            Some('>') => return Ok(iri),
            Some('\\') => iri.push(lex_unicode_escape(cur)?),
            Some(c) if c.is_whitespace() || c.is_control() || "<\"{}|^`".contains(c) => {
                return Err(format!("invalid character {c:?} in IRI"))
            }
            Some(c) => iri.push(c),
        }
    }
}

fn lex_unicode_escape(cur: &mut Cursor<'_>) -> Result<char, String> {
    let len = match cur.bump() {
        Some('u') => 4,
        Some('U') => 8,
        _ => return Err("invalid escape sequence".to_string()),
    };
    let mut hex = String::new();
    for _ in 0..len {
        match cur.bump() {
            Some(h) if h.is_ascii_hexdigit() => hex.push(h),
            _ => return Err("truncated unicode escape".to_string()),
        }
    }
    u32::from_str_radix(&hex, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| format!("invalid code point \\u{hex}"))
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<String, String> {
    let quote = cur.peek().unwrap_or('"');
    let long: String = std::iter::repeat_n(quote, 3).collect();
    let is_long = cur.starts_with(&long);
    for _ in 0..if is_long { 3 } else { 1 } {
        cur.bump();
    }
    let mut value = String::new();
    loop {
        if is_long && cur.starts_with(&long) {
            for _ in 0..3 {
                cur.bump();
            }
            return Ok(value);
        }
        match cur.bump() {
            None => return Err("unterminated string literal".to_string()),
            Some(c) if c == quote && !is_long => return Ok(value),
            Some('\n' | '\r') if !is_long => {
                return Err("newline in short string literal".to_string())
            }
            Some('\\') => {
                let escaped = match cur.peek() {
                    Some('t') => '\t',
                    Some('b') => '\u{8}',
                    Some('n') => '\n',
                    Some('r') => '\r',
                    Some('f') => '\u{c}',
                    Some('"') => '"',
                    Some('\'') => '\'',
                    Some('\\') => '\\',
                    Some('u' | 'U') => {
                        value.push(lex_unicode_escape(cur)?);
                        continue;
                    }
                    _ => return Err("invalid escape sequence in string".to_string()),
                };
                cur.bump();
                value.push(escaped);
            }
            Some(c) => value.push(c),
        }
    }
}
