//! String transformation DSL:
//!
//! ```text
//! e := Str(f) | Concat(f, e)
//! f := ConstStr(s) | SubStr(x, p, p)
//! p := Pos(x, τ, k, d) | ConstPos(k)
//! d := Start | End
//! ```
//!
//! Positions are gap indices `0..=len(x)`. `Pos` resolves to a gap directly.
//! `ConstPos(k)` keeps its raw `k`; a negative `k` counts from the end and
//! is resolved against the input by `SubStr`, where out-of-range positions
//! make the program undefined.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::program::{quote, unquote};
use super::{Grammar, GrammarBuilder};
use crate::error::GrammarError;
use crate::value::{Dir, Value};

/// Token classes matched by `Pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Digits,
    Alphabets,
    Lowercase,
    Uppercase,
    Whitespace,
    /// A single literal character, typically punctuation from the constants.
    Char(char),
}

impl Token {
    pub const CLASSES: [Token; 5] = [
        Token::Digits,
        Token::Alphabets,
        Token::Lowercase,
        Token::Uppercase,
        Token::Whitespace,
    ];

    fn class_contains(self, c: char) -> bool {
        match self {
            Token::Digits => c.is_ascii_digit(),
            Token::Alphabets => c.is_alphabetic(),
            Token::Lowercase => c.is_lowercase(),
            Token::Uppercase => c.is_uppercase(),
            Token::Whitespace => c.is_whitespace(),
            Token::Char(t) => t == c,
        }
    }

    /// Maximal non-overlapping matches, left to right, as `(start, end)` gap
    /// pairs. Class tokens match maximal runs; a literal character matches
    /// each of its occurrences.
    pub fn matches(self, s: &str) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut run: Option<usize> = None;
        let mut n = 0;
        for (i, c) in s.chars().enumerate() {
            n = i + 1;
            let hit = self.class_contains(c);
            match (hit, run, self) {
                (true, _, Token::Char(_)) => out.push((i, i + 1)),
                (true, None, _) => run = Some(i),
                (false, Some(st), _) => {
                    out.push((st, i));
                    run = None;
                }
                _ => {}
            }
        }
        if let Some(st) = run {
            out.push((st, n));
        }
        out
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Digits => f.write_str("Digits"),
            Token::Alphabets => f.write_str("Alphabets"),
            Token::Lowercase => f.write_str("Lowercase"),
            Token::Uppercase => f.write_str("Uppercase"),
            Token::Whitespace => f.write_str("Whitespace"),
            Token::Char(c) => f.write_str(&quote_char_token(&c.to_string())),
        }
    }
}

impl FromStr for Token {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Digits" => Ok(Token::Digits),
            "Alphabets" => Ok(Token::Alphabets),
            "Lowercase" => Ok(Token::Lowercase),
            "Uppercase" => Ok(Token::Uppercase),
            "Whitespace" => Ok(Token::Whitespace),
            _ => {
                let body = unquote(s).filter(|_| s.starts_with('\''));
                let mut chars = body.as_deref().unwrap_or("").chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Token::Char(c)),
                    _ => Err(GrammarError::UnknownToken(s.to_string())),
                }
            }
        }
    }
}

pub(crate) fn quote_char_token(body: &str) -> String {
    let q = quote(body);
    let inner = &q[1..q.len() - 1];
    let inner = inner.replace("\\\"", "\"").replace('\'', "\\'");
    format!("'{inner}'")
}

/// Resolves a `Pos` against `s`; `k` counts from 1, negative from the end.
pub fn token_position(s: &str, token: Token, k: i64, dir: Dir) -> Option<usize> {
    let ms = token.matches(s);
    let idx = if k >= 1 {
        usize::try_from(k - 1).ok()?
    } else if k <= -1 {
        ms.len().checked_sub(usize::try_from(-k).ok()?)?
    } else {
        return None;
    };
    let (st, en) = *ms.get(idx)?;
    Some(match dir {
        Dir::Start => st,
        Dir::End => en,
    })
}

/// Resolves a raw position value (a gap, or a negative `ConstPos` offset)
/// against a string of `len` characters.
pub fn resolve_position(raw: i64, len: usize) -> Option<usize> {
    let len = len as i64;
    let gap = if raw >= 0 { raw } else { len + raw + 1 };
    (0..=len).contains(&gap).then_some(gap as usize)
}

pub fn substring(s: &str, p1: i64, p2: i64) -> Option<String> {
    let len = s.chars().count();
    let a = resolve_position(p1, len)?;
    let b = resolve_position(p2, len)?;
    (a <= b).then(|| s.chars().skip(a).take(b - a).collect())
}

/// The five token classes plus one literal token per distinct
/// non-alphanumeric, non-space character of the constants.
pub fn default_tokens<S: AsRef<str>>(constants: &[S]) -> Vec<Token> {
    let mut tokens = Token::CLASSES.to_vec();
    let chars: BTreeSet<char> = constants
        .iter()
        .flat_map(|s| s.as_ref().chars())
        .filter(|c| !c.is_alphanumeric() && !c.is_whitespace())
        .collect();
    tokens.extend(chars.into_iter().map(Token::Char));
    tokens
}

/// Configuration of the string DSL's finite parameter sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringDsl {
    pub constants: Vec<String>,
    /// Occurrence indices for `Pos`.
    pub ks: Vec<i64>,
    /// Offsets for `ConstPos`.
    pub const_positions: Vec<i64>,
    pub tokens: Vec<Token>,
    pub input: String,
}

impl StringDsl {
    pub const DEFAULT_KS: [i64; 6] = [1, 2, 3, -1, -2, -3];
    pub const DEFAULT_CONST_POSITIONS: [i64; 5] = [0, 1, 2, 3, -1];

    /// Default parameters for the given string constants.
    pub fn new<I, S>(constants: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let constants: Vec<String> = constants.into_iter().map(Into::into).collect();
        StringDsl {
            tokens: default_tokens(&constants),
            constants,
            ks: Self::DEFAULT_KS.to_vec(),
            const_positions: Self::DEFAULT_CONST_POSITIONS.to_vec(),
            input: "x".into(),
        }
    }

    pub fn grammar(&self) -> Result<Grammar, GrammarError> {
        if self.ks.is_empty() {
            return Err(GrammarError::Empty("k"));
        }
        if self.tokens.is_empty() {
            return Err(GrammarError::Empty("token"));
        }
        if let Some(&k) = self.ks.iter().find(|&&k| k == 0) {
            return Err(GrammarError::ZeroIndex(k));
        }

        let mut b = GrammarBuilder::new("string");
        for nt in ["e", "f", "p", "src", "tok", "k", "cpos", "d", "s"] {
            b.nonterminal(nt);
        }
        b.variable(&self.input).leaf("src", &self.input);

        let tokens: BTreeSet<Token> = self.tokens.iter().copied().collect();
        for t in tokens {
            let name = t.to_string();
            b.constant(&name, Value::Tok(t)).leaf("tok", &name);
        }
        let ints: BTreeSet<i64> = self.ks.iter().chain(&self.const_positions).copied().collect();
        for i in ints {
            b.constant(&i.to_string(), Value::Int(i));
        }
        for k in self.ks.iter().collect::<BTreeSet<_>>() {
            b.leaf("k", &k.to_string());
        }
        for k in self.const_positions.iter().collect::<BTreeSet<_>>() {
            b.leaf("cpos", &k.to_string());
        }
        b.constant("Start", Value::Dir(Dir::Start))
            .constant("End", Value::Dir(Dir::End))
            .leaf("d", "Start")
            .leaf("d", "End");
        for c in self.constants.iter().collect::<BTreeSet<_>>() {
            let name = quote(c);
            b.constant(&name, Value::Str(c.clone())).leaf("s", &name);
        }

        b.builtin("Str", 1, |a| match a {
            [v @ Value::Str(_)] => Some((*v).clone()),
            _ => None,
        })
        .with_length(|l| l[0]);
        b.builtin("Concat", 2, |a| match a {
            [Value::Str(x), Value::Str(y)] => {
                let mut s = String::with_capacity(x.len() + y.len());
                s.push_str(x);
                s.push_str(y);
                Some(Value::Str(s))
            }
            _ => None,
        })
        .with_length(|l| l[0] + l[1]);
        b.builtin("ConstStr", 1, |a| match a {
            [v @ Value::Str(_)] => Some((*v).clone()),
            _ => None,
        })
        .with_length(|l| l[0]);
        b.builtin("SubStr", 3, |a| match a {
            [Value::Str(s), Value::Int(p1), Value::Int(p2)] => substring(s, *p1, *p2).map(Value::Str),
            _ => None,
        });
        b.builtin("Pos", 4, |a| match a {
            [Value::Str(s), Value::Tok(t), Value::Int(k), Value::Dir(d)] => {
                token_position(s, *t, *k, *d).map(|g| Value::Int(g as i64))
            }
            _ => None,
        });
        b.builtin("ConstPos", 1, |a| match a {
            [v @ Value::Int(_)] => Some((*v).clone()),
            _ => None,
        });

        b.production("e", "Str", &["f"])
            .production("e", "Concat", &["f", "e"])
            .production("f", "ConstStr", &["s"])
            .production("f", "SubStr", &["src", "p", "p"])
            .production("p", "Pos", &["src", "tok", "k", "d"])
            .production("p", "ConstPos", &["cpos"])
            .start("e");
        b.build()
    }
}

/// Builds the string DSL with the default position parameters.
pub fn string_grammar(constants: &[&str], ks: &[i64], tokens: &[Token]) -> Result<Grammar, GrammarError> {
    let mut dsl = StringDsl::new(constants.iter().copied());
    dsl.ks = ks.to_vec();
    dsl.tokens = tokens.to_vec();
    dsl.grammar()
}
