use super::Location;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Var(String),
    Str(String),
    LangTag(String),
    Number(String),
    Blank(String),
    Word(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub text: String,
    pub loc: Location,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub message: String,
    pub text: String,
    pub loc: Location,
}

const PUNCT: [&str; 22] = [
    "^^", "&&", "||", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ".", ";", ",", "*", "/", "^",
    "|", "=", "<", ">",
];
const SINGLE: [&str; 4] = ["!", "+", "-", "?"];

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn loc(&self) -> Location {
        Location {
            line: self.line,
            column: self.column,
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek(0).filter(|c| pred(*c)) {
            out.push(c);
            self.bump();
        }
        out
    }
}

/// Splits `src` into tokens. Stops at the first lexical error.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek(0) {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                cur.take_while(|c| c != '\n');
            } else {
                break;
            }
        }
        let loc = cur.loc();
        let start = cur.pos;
        let Some(c) = cur.peek(0) else {
            out.push(Token {
                tok: Tok::Eof,
                text: String::new(),
                loc,
            });
            return Ok(out);
        };
        let err = |message: &str, cur: &Cursor| LexError {
            message: message.to_string(),
            text: cur.chars[start..cur.pos.max(start + 1).min(cur.chars.len())]
                .iter()
                .collect(),
            loc,
        };

        let tok = if c == '<' && iri_ahead(&cur) {
            cur.bump();
            let iri = cur.take_while(|c| c != '>');
            cur.bump();
            Tok::IriRef(iri)
        } else if (c == '?' || c == '$') && cur.peek(1).is_some_and(|c| is_name_char(c) && c != '-')
        {
            cur.bump();
            Tok::Var(cur.take_while(|c| c.is_alphanumeric() || c == '_'))
        } else if c == '"' || c == '\'' {
            Tok::Str(string(&mut cur).map_err(|m| err(m, &cur))?)
        } else if c == '@' {
            cur.bump();
            let tag = cur.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
            if tag.is_empty() {
                return Err(err("expected a language tag after '@'", &cur));
            }
            Tok::LangTag(tag)
        } else if c.is_ascii_digit()
            || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit()))
        {
            let mut n = cur.take_while(|c| c.is_ascii_digit());
            if cur.peek(0) == Some('.') && cur.peek(1).is_some_and(|d| d.is_ascii_digit()) {
                cur.bump();
                n.push('.');
                n.push_str(&cur.take_while(|c| c.is_ascii_digit()));
            }
            if matches!(cur.peek(0), Some('e' | 'E')) {
                let sign = usize::from(matches!(cur.peek(1), Some('+' | '-')));
                if cur.peek(1 + sign).is_some_and(|d| d.is_ascii_digit()) {
                    for _ in 0..=sign {
                        n.push(cur.bump().unwrap());
                    }
                    n.push_str(&cur.take_while(|c| c.is_ascii_digit()));
                }
            }
            Tok::Number(n)
        } else if c == '_' && cur.peek(1) == Some(':') {
            cur.bump();
            cur.bump();
            let label = cur.take_while(is_name_char);
            if label.is_empty() {
                return Err(err("expected a blank node label", &cur));
            }
            Tok::Blank(label)
        } else if is_name_start(c) || c == ':' {
            let prefix = cur.take_while(is_name_char);
            if cur.peek(0) == Some(':') {
                cur.bump();
                let mut local = String::new();
                loop {
                    local.push_str(&cur.take_while(|c| is_name_char(c) || c == ':'));
                    // A dot inside a local name, but never a trailing one.
                    if cur.peek(0) == Some('.') && cur.peek(1).is_some_and(is_name_char) {
                        cur.bump();
                        local.push('.');
                    } else {
                        break;
                    }
                }
                Tok::PName { prefix, local }
            } else {
                Tok::Word(prefix)
            }
        } else if let Some(p) = PUNCT.iter().chain(&SINGLE).find(|p| cur.starts_with(p)) {
            for _ in 0..p.len() {
                cur.bump();
            }
            Tok::Punct(p)
        } else {
            cur.bump();
            return Err(err(&format!("unexpected character {c:?}"), &cur));
        };
        out.push(Token {
            tok,
            text: cur.chars[start..cur.pos].iter().collect(),
            loc,
        });
    }
}

/// `<` opens an IRI when a `>` follows before any whitespace or quote.
fn iri_ahead(cur: &Cursor) -> bool {
    let mut i = 1;
    while let Some(c) = cur.peek(i) {
        match c {
            '>' => return true,
            c if c.is_whitespace()
                || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') =>
            {
                return false
            }
            _ => i += 1,
        }
    }
    false
}

fn string(cur: &mut Cursor) -> Result<String, &'static str> {
    let quote = cur.bump().unwrap();
    let long = cur.peek(0) == Some(quote) && cur.peek(1) == Some(quote);
    if long {
        cur.bump();
        cur.bump();
    }
    let mut out = String::new();
    loop {
        let Some(c) = cur.bump() else {
            return Err("unterminated string");
        };
        if c == quote {
            if !long {
                return Ok(out);
            }
            if cur.peek(0) == Some(quote) && cur.peek(1) == Some(quote) {
                cur.bump();
                cur.bump();
                return Ok(out);
            }
            out.push(c);
        } else if c == '\\' {
            let e = cur.bump().ok_or("unterminated string")?;
            out.push(match e {
                't' => '\t',
                'n' => '\n',
                'r' => '\r',
                'b' => '\u{8}',
                'f' => '\u{c}',
                '"' | '\'' | '\\' => e,
                _ => return Err("invalid escape sequence"),
            });
        } else if c == '\n' && !long {
            return Err("newline in string");
        } else {
            out.push(c);
        }
    }
}
