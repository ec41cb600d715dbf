use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::connectives::{Bang, BangMode, Lollipop};
use crate::lambda::{Context, Type, TypeError};
use crate::multiset::{multisets_up_to, Multiset};
use crate::system::{SystemError, SystemRef};
use crate::token::Token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("no interaction system for base type `{0}`")]
    UnboundBase(String),
}

/// An element of `|ω|`: a state at base type, `(μ, p)` at arrow type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Base(Token),
    Arrow(Multiset<Point>, Box<Point>),
}

impl Point {
    pub fn arrow(mu: Multiset<Point>, p: Point) -> Point {
        Point::Arrow(mu, Box::new(p))
    }

    /// The state of `[[ω]]` this point stands for.
    pub fn to_token(&self) -> Token {
        match self {
            Point::Base(s) => s.clone(),
            Point::Arrow(mu, p) => {
                Token::pair(Token::multiset(mu.map(Point::to_token)), p.to_token())
            }
        }
    }

    /// Splits `(μ1, (μ2, … (μm, s)))` into `[μ1, …, μm]` and `s`.
    pub fn uncurry(&self) -> (Vec<&Multiset<Point>>, &Point) {
        let mut args = Vec::new();
        let mut p = self;
        while let Point::Arrow(mu, q) = p {
            args.push(mu);
            p = q;
        }
        (args, p)
    }

    /// Largest multiset anywhere inside.
    pub fn width(&self) -> usize {
        match self {
            Point::Base(_) => 0,
            Point::Arrow(mu, p) => mu
                .iter()
                .map(Point::width)
                .chain([mu.len(), p.width()])
                .max()
                .unwrap_or(0),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_token())
    }
}

/// One multiset of points per context entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Environment(pub Vec<Multiset<Point>>);

impl Environment {
    pub fn empty(n: usize) -> Self {
        Environment(vec![Multiset::new(); n])
    }

    /// `[s]` at `i`, `[]` elsewhere.
    pub fn singleton(n: usize, i: usize, p: Point) -> Self {
        let mut e = Environment::empty(n);
        e.0[i] = Multiset::singleton(p);
        e
    }

    /// Pointwise sum, or `None` when a coordinate would exceed `k`.
    pub fn add_within(&self, other: &Environment, k: usize) -> Option<Environment> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a.len() + b.len() > k {
                return None;
            }
            out.push(a + b);
        }
        Some(Environment(out))
    }

    /// Largest multiset anywhere inside.
    pub fn width(&self) -> usize {
        self.0
            .iter()
            .flat_map(|m| m.iter().map(Point::width).chain([m.len()]))
            .max()
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(Multiset::len).sum()
    }

    pub fn tokens(&self) -> Vec<Token> {
        self.0
            .iter()
            .map(|m| Token::multiset(m.map(Point::to_token)))
            .collect()
    }

    /// `x1:=μ1, …, xn:=μn`.
    pub fn display(&self, ctx: &Context) -> String {
        if self.0.is_empty() {
            return "()".to_string();
        }
        ctx.names()
            .zip(&self.0)
            .map(|(x, m)| format!("{x}:={}", Token::multiset(m.map(Point::to_token))))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Base-type names mapped to interaction systems.
#[derive(Clone, Default)]
pub struct Valuation {
    systems: BTreeMap<String, SystemRef>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn with(mut self, name: impl Into<String>, w: SystemRef) -> Self {
        self.systems.insert(name.into(), w);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, w: SystemRef) {
        self.systems.insert(name.into(), w);
    }

    pub fn get(&self, name: &str) -> Result<&SystemRef, SemanticsError> {
        self.systems
            .get(name)
            .ok_or_else(|| SemanticsError::UnboundBase(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.systems.keys().map(String::as_str)
    }
}

/// `[[ω]]` with every `!` truncated at `k`: `ρ(X)` at base type and
/// `!ω ⊸ ω'` at arrow type.
pub fn interpret(
    ty: &Type,
    rho: &Valuation,
    k: usize,
    cap: u128,
) -> Result<SystemRef, SemanticsError> {
    match ty {
        Type::Base(x) => Ok(rho.get(x)?.clone()),
        Type::Arrow(a, b) => {
            let bang: SystemRef = Arc::new(Bang::with_cap(
                interpret(a, rho, k, cap)?,
                k,
                BangMode::Canonical,
                cap,
            ));
            Ok(Arc::new(Lollipop::with_cap(
                bang,
                interpret(b, rho, k, cap)?,
                cap,
            )))
        }
    }
}

/// `![[ω]]` at width `k`.
pub fn interpret_bang(
    ty: &Type,
    rho: &Valuation,
    k: usize,
    cap: u128,
) -> Result<SystemRef, SemanticsError> {
    Ok(Arc::new(Bang::with_cap(
        interpret(ty, rho, k, cap)?,
        k,
        BangMode::Canonical,
        cap,
    )))
}

/// All points of type `ty` whose multisets have at most `k` elements.
pub fn states_of(ty: &Type, rho: &Valuation, k: usize) -> Result<Vec<Point>, SemanticsError> {
    match ty {
        Type::Base(x) => Ok(rho.get(x)?.states().into_iter().map(Point::Base).collect()),
        Type::Arrow(a, b) => {
            let args = multisets_up_to(&states_of(a, rho, k)?, k);
            let results = states_of(b, rho, k)?;
            Ok(args
                .iter()
                .flat_map(|mu| {
                    results
                        .iter()
                        .map(move |p| Point::arrow(mu.clone(), p.clone()))
                })
                .collect())
        }
    }
}
