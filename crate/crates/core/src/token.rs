//! Identifiers for states, actions and reactions.
//!
//! Composite systems need structured identifiers (pairs of states, lists of
//! actions, multisets of states, translation tables), so every identifier is a
//! [`Token`]. Tokens have a total order and a textual syntax:
//!
//! ```text
//! token ::= atom | "\"" chars "\"" | "(" tokens ")" | "[" tokens "]" | "{" entries "}"
//! ```
//!
//! `(a, b)` is a tuple (pairs are 2-tuples), `[a, b]` a multiset and
//! `{a: b}` a finite map.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::multiset::Multiset;

/// Children are shared, so cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Atom(Arc<str>),
    Tuple(Arc<[Token]>),
    Bag(Arc<Multiset<Token>>),
    /// Finite map, sorted by key, keys distinct.
    Map(Arc<[(Token, Token)]>),
}

impl Token {
    pub fn atom(name: impl AsRef<str>) -> Token {
        Token::Atom(Arc::from(name.as_ref()))
    }

    /// The single state, action and reaction of the trivial system.
    pub fn star() -> Token {
        Token::atom("*")
    }

    pub fn pair(a: Token, b: Token) -> Token {
        Token::Tuple(Arc::from([a, b]))
    }

    pub fn tuple(items: Vec<Token>) -> Token {
        Token::Tuple(items.into())
    }

    pub fn bag(items: Vec<Token>) -> Token {
        Token::multiset(Multiset::from_list(items))
    }

    pub fn multiset(m: Multiset<Token>) -> Token {
        Token::Bag(Arc::new(m))
    }

    pub fn map(mut entries: Vec<(Token, Token)>) -> Token {
        entries.sort_by(|x, y| x.0.cmp(&y.0));
        entries.dedup_by(|x, y| x.0 == y.0);
        Token::Map(entries.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Token::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Token]> {
        match self {
            Token::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Token, &Token)> {
        match self {
            Token::Tuple(items) if items.len() == 2 => Some((&items[0], &items[1])),
            _ => None,
        }
    }

    pub fn as_bag(&self) -> Option<&Multiset<Token>> {
        match self {
            Token::Bag(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&[(Token, Token)]> {
        match self {
            Token::Map(entries) => Some(entries),
            _ => None,
        }
    }

    /// Looks up `key` in a map token.
    pub fn lookup(&self, key: &Token) -> Option<&Token> {
        let entries = self.as_map()?;
        entries
            .binary_search_by(|(k, _)| k.cmp(key))
            .ok()
            .map(|i| &entries[i].1)
    }
}

impl From<&str> for Token {
    fn from(s: &str) -> Token {
        Token::atom(s)
    }
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '[' | ']' | '{' | '}' | ',' | ':' | '"')
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atom(s) => {
                if !s.is_empty() && s.chars().all(is_atom_char) {
                    write!(f, "{s}")
                } else {
                    write!(f, "{s:?}")
                }
            }
            Token::Tuple(items) => {
                write!(f, "(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Token::Bag(m) => write!(f, "{m}"),
            Token::Map(entries) => {
                write!(f, "{{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed token at offset {offset}: {message}")]
pub struct TokenParseError {
    pub offset: usize,
    pub message: String,
}

struct TokenParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> TokenParser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TokenParseError> {
        Err(TokenParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn token(&mut self) -> Result<Token, TokenParseError> {
        self.skip_ws();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                Ok(Token::tuple(self.sequence(')')?))
            }
            Some('[') => {
                self.pos += 1;
                Ok(Token::bag(self.sequence(']')?))
            }
            Some('{') => {
                self.pos += 1;
                let mut entries = Vec::new();
                if !self.eat('}') {
                    loop {
                        let k = self.token()?;
                        if !self.eat(':') {
                            return self.err("expected ':' in map");
                        }
                        let v = self.token()?;
                        entries.push((k, v));
                        if self.eat('}') {
                            break;
                        }
                        if !self.eat(',') {
                            return self.err("expected ',' or '}'");
                        }
                    }
                }
                Ok(Token::map(entries))
            }
            Some('"') => {
                let rest = &self.src[self.pos..];
                let mut de = serde_json::Deserializer::from_str(rest).into_iter::<String>();
                match de.next() {
                    Some(Ok(s)) => {
                        self.pos += de.byte_offset();
                        Ok(Token::atom(s))
                    }
                    _ => self.err("bad quoted atom"),
                }
            }
            Some(c) if is_atom_char(c) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if is_atom_char(c) {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                Ok(Token::atom(&self.src[start..self.pos]))
            }
            Some(c) => self.err(format!("unexpected character {c:?}")),
        }
    }

    fn sequence(&mut self, close: char) -> Result<Vec<Token>, TokenParseError> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.token()?);
            if self.eat(close) {
                return Ok(items);
            }
            if !self.eat(',') {
                return self.err(format!("expected ',' or '{close}'"));
            }
        }
    }
}

impl FromStr for Token {
    type Err = TokenParseError;

    fn from_str(s: &str) -> Result<Token, TokenParseError> {
        let mut p = TokenParser { src: s, pos: 0 };
        let t = p.token()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(t)
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Token, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Left-nested tensor representation of a list of components:
/// `[]` is `*`, `[x]` is `x`, and `[x, y, z]` is `((x, y), z)`.
pub fn nest_tensor(parts: Vec<Token>) -> Token {
    let mut iter = parts.into_iter();
    match iter.next() {
        None => Token::star(),
        Some(first) => iter.fold(first, Token::pair),
    }
}

/// Inverse of [`nest_tensor`] for a known number of components.
pub fn unnest_tensor(token: &Token, arity: usize) -> Option<Vec<Token>> {
    match arity {
        0 => (*token == Token::star()).then(Vec::new),
        1 => Some(vec![token.clone()]),
        _ => {
            let (rest, last) = token.as_pair()?;
            let mut parts = unnest_tensor(rest, arity - 1)?;
            parts.push(last.clone());
            Some(parts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_tokens() {
        let t: Token = "((a, b), [c, a], {x: y}, ())".parse().unwrap();
        let expected = Token::tuple(vec![
            Token::pair("a".into(), "b".into()),
            Token::bag(vec!["c".into(), "a".into()]),
            Token::map(vec![("x".into(), "y".into())]),
            Token::tuple(vec![]),
        ]);
        assert_eq!(t, expected);
        assert_eq!(t.to_string(), "((a, b), [a, c], {x: y}, ())");
    }

    #[test]
    fn quotes_atoms_with_special_characters() {
        let t = Token::atom("a b");
        assert_eq!(t.to_string(), "\"a b\"");
        assert_eq!(t.to_string().parse::<Token>().unwrap(), t);
        assert_eq!(
            Token::atom("").to_string().parse::<Token>().unwrap(),
            Token::atom("")
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!("(a, b".parse::<Token>().is_err());
        assert!("a b".parse::<Token>().is_err());
        assert!("{a}".parse::<Token>().is_err());
    }

    #[test]
    fn tensor_nesting_roundtrips() {
        let parts: Vec<Token> = vec!["a".into(), "b".into(), "c".into()];
        let nested = nest_tensor(parts.clone());
        assert_eq!(nested.to_string(), "((a, b), c)");
        assert_eq!(unnest_tensor(&nested, 3), Some(parts));
        assert_eq!(nest_tensor(vec![]), Token::star());
    }
}
