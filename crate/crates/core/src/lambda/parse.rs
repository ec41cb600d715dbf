//! Text syntax for types and terms.
//!
//! ```text
//! type    ::= atom ("->" type)?           atom ::= IDENT | "(" type ")"
//! term    ::= summand ("+" summand)*
//! summand ::= "\" IDENT ":" type "." term
//!           | "D" summand "." summand
//!           | "(" term ")" summand?       application when an argument follows
//!           | "0" (":" type)?
//!           | IDENT
//! ```
//!
//! `λ` may be written for `\`. `#` starts a comment running to the end of
//! the line. `D` is reserved.

use thiserror::Error;

use super::term::Term;
use super::typecheck::Context;
use super::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Colon,
    Dot,
    Open,
    Close,
    Plus,
    Arrow,
    Zero,
    D,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Lambda => "`\\`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Zero => "`0`".into(),
            Tok::D => "`D`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        let mut chars = src.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c == '#' {
                while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                    chars.next();
                }
                continue;
            }
            let single = match c {
                '\\' | 'λ' => Some(Tok::Lambda),
                ':' => Some(Tok::Colon),
                '.' => Some(Tok::Dot),
                '(' => Some(Tok::Open),
                ')' => Some(Tok::Close),
                '+' => Some(Tok::Plus),
                _ => None,
            };
            if let Some(t) = single {
                chars.next();
                lx.toks.push((t, i));
                continue;
            }
            if c == '-' {
                chars.next();
                if chars.next_if(|&(_, c)| c == '>').is_some() {
                    lx.toks.push((Tok::Arrow, i));
                    continue;
                }
                return Err(error_at(src, i, "expected `->`"));
            }
            if c == '0' {
                chars.next();
                if chars.peek().is_some_and(|&(_, c)| is_ident_char(c)) {
                    return Err(error_at(src, i, "numerals other than 0 are not terms"));
                }
                lx.toks.push((Tok::Zero, i));
                continue;
            }
            if is_ident_start(c) {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                }
                let word = &src[i..end];
                let tok = if word == "D" {
                    Tok::D
                } else {
                    Tok::Ident(word.to_string())
                };
                lx.toks.push((tok, i));
                continue;
            }
            return Err(error_at(src, i, &format!("unexpected character `{c}`")));
        }
        lx.toks.push((Tok::End, lx.src.len()));
        Ok(lx.toks)
    }
}

fn error_at(src: &str, offset: usize, message: &str) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError {
        offset,
        line,
        column,
        message: message.to_string(),
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser {
            src,
            toks: Lexer::run(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(error_at(
            self.src,
            self.offset(),
            &format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&tok.describe())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail("an identifier"),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let from = match self.peek() {
            Tok::Ident(_) => Type::Base(self.ident()?),
            Tok::Open => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::Close)?;
                t
            }
            _ => return self.fail("a type"),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(from, self.ty()?))
        } else {
            Ok(from)
        }
    }

    fn starts_summand(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Lambda | Tok::Open | Tok::Zero | Tok::D
        )
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut members = vec![self.summand()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            members.push(self.summand()?);
        }
        Ok(if members.len() == 1 {
            members.pop().expect("one member")
        } else {
            Term::sum(members)
        })
    }

    fn summand(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Term::Var(x))
            }
            Tok::Lambda => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                Ok(Term::lam(x, ty, self.term()?))
            }
            Tok::D => {
                self.bump();
                let t = self.summand()?;
                self.expect(Tok::Dot)?;
                let u = self.summand()?;
                Ok(Term::diff(t, u))
            }
            Tok::Zero => {
                self.bump();
                if *self.peek() == Tok::Colon {
                    self.bump();
                    Ok(Term::Zero(Some(self.ty()?)))
                } else {
                    Ok(Term::zero())
                }
            }
            Tok::Open => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::Close)?;
                if self.starts_summand() {
                    let u = self.summand()?;
                    Ok(Term::app(t, u))
                } else {
                    Ok(t)
                }
            }
            _ => self.fail("a term"),
        }
    }
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// A context written `x1 : T1, x2 : T2`. Empty text is the empty context.
pub fn parse_context(src: &str) -> Result<Context, ParseError> {
    let mut out: Vec<(String, Type)> = Vec::new();
    if src.trim().is_empty() {
        return Ok(Context::new());
    }
    for part in src.split(',') {
        let offset = part.as_ptr() as usize - src.as_ptr() as usize;
        let Some((name, ty)) = part.split_once(':') else {
            return Err(error_at(src, offset, "expected `name : type`"));
        };
        let name = name.trim();
        if name.is_empty()
            || !name.chars().next().is_some_and(is_ident_start)
            || !name.chars().all(is_ident_char)
            || name == "D"
        {
            return Err(error_at(
                src,
                offset,
                &format!("bad variable name `{name}`"),
            ));
        }
        let ty = parse_type(ty)
            .map_err(|e| error_at(src, offset + name.len() + 1 + e.offset, &e.message))?;
        if out.iter().any(|(y, _)| y == name) {
            return Err(error_at(
                src,
                offset,
                &format!("variable `{name}` is declared twice"),
            ));
        }
        out.push((name.to_string(), ty));
    }
    Ok(Context::from_entries(out).expect("names are distinct"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Type {
        Type::base("X")
    }

    #[test]
    fn identity() {
        assert_eq!(
            parse_term("\\x:X. x").unwrap(),
            Term::lam("x", x(), Term::var("x"))
        );
        assert_eq!(
            parse_term("λx:X. x").unwrap(),
            Term::lam("x", x(), Term::var("x"))
        );
    }

    #[test]
    fn krivine_application() {
        assert_eq!(
            parse_term("(t) u").unwrap(),
            Term::app(Term::var("t"), Term::var("u"))
        );
        assert_eq!(
            parse_term("((f) a) b").unwrap(),
            Term::apps(Term::var("f"), [Term::var("a"), Term::var("b")])
        );
        assert_eq!(
            parse_term("(f) (g) a").unwrap(),
            Term::app(Term::var("f"), Term::app(Term::var("g"), Term::var("a")))
        );
    }

    #[test]
    fn differential_application() {
        assert_eq!(
            parse_term("D (\\x:X. x) . y").unwrap(),
            Term::diff(Term::lam("x", x(), Term::var("x")), Term::var("y"))
        );
    }

    #[test]
    fn sums_and_zero() {
        assert_eq!(
            parse_term("a + 0 : X + b").unwrap(),
            Term::sum([Term::var("a"), Term::var("b")])
        );
        assert_eq!(
            parse_term("0 : X -> X").unwrap(),
            Term::Zero(Some(Type::arrow(x(), x())))
        );
        assert_eq!(parse_term("0").unwrap(), Term::zero());
        // a lambda body extends as far as possible
        assert_eq!(
            parse_term("\\x:X. x + y").unwrap(),
            Term::lam("x", x(), Term::sum([Term::var("x"), Term::var("y")]))
        );
    }

    #[test]
    fn types_are_right_associative() {
        assert_eq!(
            parse_type("X -> Y -> X").unwrap(),
            Type::arrow(x(), Type::arrow(Type::base("Y"), x()))
        );
        assert_eq!(
            parse_type("(X -> Y) -> X").unwrap(),
            Type::arrow(Type::arrow(x(), Type::base("Y")), x())
        );
    }

    #[test]
    fn comments_and_errors() {
        assert_eq!(
            parse_term("# the identity\n\\x:X. x # done").unwrap(),
            Term::lam("x", x(), Term::var("x"))
        );
        let e = parse_term("\\x:X.\n  (x").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        assert!(parse_term("(x) y z").is_err());
        assert!(parse_term("D").is_err());
        assert!(parse_term("12").is_err());
    }

    #[test]
    fn contexts() {
        let c = parse_context("x : X -> X, y : X").unwrap();
        assert_eq!(
            c.entries(),
            &[("x".into(), Type::arrow(x(), x())), ("y".into(), x())]
        );
        assert!(parse_context("x : X, x : X").is_err());
        assert!(parse_context("").unwrap().is_empty());
        assert!(parse_context("x X").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "\\x:X. \\y:Y. x",
            "(\\x:X. x) y",
            "D (\\x:X. (x) x) . y",
            "((f) a) (g) b",
            "(\\x:X -> X. x) + (\\x:X -> X. \\y:X. (x) y)",
            "D (D f . a) . \\z:X. z",
            "((\\x:X. x) + f) 0 : X",
            "D x . (a + b)",
        ] {
            let t = parse_term(src).unwrap();
            let printed = t.to_string();
            assert_eq!(
                parse_term(&printed).unwrap(),
                t,
                "{src} printed as {printed}"
            );
        }
    }
}
