use std::fmt;

use super::Grammar;
use crate::error::{EvalError, ParseError};

/// A parse tree: a terminal leaf or a builtin applied to subprograms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Program {
    Leaf(String),
    Node(String, Vec<Program>),
}

impl Program {
    pub fn leaf(name: impl Into<String>) -> Self {
        Program::Leaf(name.into())
    }

    pub fn node(name: impl Into<String>, children: Vec<Program>) -> Self {
        Program::Node(name.into(), children)
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            Program::Leaf(_) => 1,
            Program::Node(_, cs) => 1 + cs.iter().map(Program::size).sum::<usize>(),
        }
    }

    /// Tree height, a leaf having height 1.
    pub fn height(&self) -> usize {
        match self {
            Program::Leaf(_) => 1,
            Program::Node(_, cs) => 1 + cs.iter().map(Program::height).max().unwrap_or(0),
        }
    }

    /// Parses the canonical S-expression form and checks every name and
    /// arity against `grammar`.
    pub fn parse(text: &str, grammar: &Grammar) -> Result<Program, ParseError> {
        let mut parser = Parser { text, pos: 0 };
        let p = parser.program()?;
        parser.skip_ws();
        if parser.pos < text.len() {
            return Err(ParseError::Trailing(parser.pos));
        }
        check_symbols(&p, grammar)?;
        Ok(p)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Leaf(name) => f.write_str(name),
            Program::Node(name, children) => {
                write!(f, "({name}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn check_symbols(p: &Program, g: &Grammar) -> Result<(), EvalError> {
    match p {
        Program::Leaf(name) => g
            .lookup_terminal(name)
            .map(|_| ())
            .ok_or_else(|| EvalError::UnknownSymbol(name.clone())),
        Program::Node(name, children) => {
            let f = g
                .lookup_builtin(name)
                .ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
            let arity = g.builtin(f).arity;
            if arity != children.len() {
                return Err(EvalError::Arity {
                    name: name.clone(),
                    expected: arity,
                    found: children.len(),
                });
            }
            children.iter().try_for_each(|c| check_symbols(c, g))
        }
    }
}

/// Canonical spelling of a string constant as an atom.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Inverse of [`quote`] and of the single-quoted token spelling.
pub fn unquote(atom: &str) -> Option<String> {
    let delim = atom.chars().next()?;
    if !(delim == '"' || delim == '\'') || atom.len() < 2 || !atom.ends_with(delim) {
        return None;
    }
    let inner = &atom[1..atom.len() - 1];
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next()? {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                other => out.push(other),
            }
        } else {
            out.push(c);
        }
    }
    Some(out)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(ParseError::UnexpectedEof),
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let head = match self.peek() {
                    Some('(') | Some(')') => {
                        return Err(ParseError::Unexpected {
                            found: self.peek().unwrap().to_string(),
                            offset: self.pos,
                        })
                    }
                    _ => self.atom()?,
                };
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ParseError::UnexpectedEof),
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Program::Node(head, children));
                        }
                        _ => children.push(self.program()?),
                    }
                }
            }
            Some(')') => Err(ParseError::Unexpected {
                found: ")".into(),
                offset: self.pos,
            }),
            Some(_) => Ok(Program::Leaf(self.atom()?)),
        }
    }

    fn atom(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::UnexpectedEof),
            Some(q @ ('"' | '\'')) => {
                self.pos += 1;
                loop {
                    match self.peek() {
                        None => return Err(ParseError::Unterminated(start)),
                        Some('\\') => {
                            self.pos += 1;
                            match self.peek() {
                                None => return Err(ParseError::Unterminated(start)),
                                Some(c) => self.pos += c.len_utf8(),
                            }
                        }
                        Some(c) if c == q => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => self.pos += c.len_utf8(),
                    }
                }
                let raw = &self.text[start..self.pos];
                // normalise escapes so the atom matches the terminal's name
                let body = unquote(raw).ok_or(ParseError::Unterminated(start))?;
                Ok(if q == '"' {
                    quote(&body)
                } else {
                    super::strings::quote_char_token(&body)
                })
            }
            Some(_) => {
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                Ok(self.text[start..self.pos].to_string())
            }
        }
    }
}
