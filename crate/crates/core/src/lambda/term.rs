use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::types::Type;

/// Church-style terms of the differential λ-calculus.
///
/// Sums are sets: members are distinct, never sums themselves and never
/// zero. Build them with [`Term::sum`], which maintains this.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `0`, optionally annotated with its type.
    Zero(Option<Type>),
    Sum(BTreeSet<Term>),
    /// `D t · u`
    Diff(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn lam(name: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Lam(name.into(), ty, Box::new(body))
    }

    pub fn app(t: Term, u: Term) -> Term {
        Term::App(Box::new(t), Box::new(u))
    }

    /// `(t) u1 … un`
    pub fn apps(t: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(t, Term::app)
    }

    pub fn zero() -> Term {
        Term::Zero(None)
    }

    pub fn diff(t: Term, u: Term) -> Term {
        Term::Diff(Box::new(t), Box::new(u))
    }

    /// Flattens nested sums and drops zeros. No member left gives a zero
    /// (keeping an annotation if one was seen); one member is returned as is.
    pub fn sum(members: impl IntoIterator<Item = Term>) -> Term {
        let mut set = BTreeSet::new();
        let mut zero_ty = None;
        let mut stack: Vec<Term> = members.into_iter().collect();
        while let Some(t) = stack.pop() {
            match t {
                Term::Sum(ms) => stack.extend(ms),
                Term::Zero(ty) => {
                    if zero_ty.is_none() {
                        zero_ty = ty;
                    }
                }
                other => {
                    set.insert(other);
                }
            }
        }
        match set.len() {
            0 => Term::Zero(zero_ty),
            1 => set.into_iter().next().expect("one member"),
            _ => Term::Sum(set),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Zero(_))
    }

    /// The members of a sum; a zero has none and anything else is its own
    /// only member.
    pub fn summands(&self) -> Vec<&Term> {
        match self {
            Term::Sum(ms) => ms.iter().collect(),
            Term::Zero(_) => Vec::new(),
            t => vec![t],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, _, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(t, u) | Term::Diff(t, u) => {
                t.collect_free(bound, out);
                u.collect_free(bound, out);
            }
            Term::Zero(_) => {}
            Term::Sum(ms) => ms.iter().for_each(|m| m.collect_free(bound, out)),
        }
    }

    /// Free occurrences of `x`, counting the busiest summand of a sum.
    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(y == x),
            Term::Lam(y, _, b) => {
                if y == x {
                    0
                } else {
                    b.occurrences(x)
                }
            }
            Term::App(t, u) | Term::Diff(t, u) => t.occurrences(x) + u.occurrences(x),
            Term::Zero(_) => 0,
            Term::Sum(ms) => ms.iter().map(|m| m.occurrences(x)).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero(_) => 1,
            Term::Lam(_, _, b) => 1 + b.size(),
            Term::App(t, u) | Term::Diff(t, u) => 1 + t.size() + u.size(),
            Term::Sum(ms) => 1 + ms.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Bound variables renamed by binding depth, so that alpha-equivalent
    /// terms become equal. Zero annotations are dropped.
    pub fn canonical(&self) -> Term {
        self.canon(&mut BTreeMap::new(), 0)
    }

    fn canon(&self, env: &mut BTreeMap<String, Vec<String>>, depth: usize) -> Term {
        match self {
            Term::Var(x) => match env.get(x).and_then(|v| v.last()) {
                Some(n) => Term::Var(n.clone()),
                None => Term::Var(x.clone()),
            },
            Term::Lam(x, ty, b) => {
                let name = format!("%{depth}");
                env.entry(x.clone()).or_default().push(name.clone());
                let body = b.canon(env, depth + 1);
                env.get_mut(x).expect("pushed above").pop();
                Term::Lam(name, ty.clone(), Box::new(body))
            }
            Term::App(t, u) => Term::app(t.canon(env, depth), u.canon(env, depth)),
            Term::Diff(t, u) => Term::diff(t.canon(env, depth), u.canon(env, depth)),
            Term::Zero(_) => Term::Zero(None),
            Term::Sum(ms) => Term::sum(ms.iter().map(|m| m.canon(env, depth))),
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Whether the printed term could swallow a following `+` or `.`.
fn ends_open(t: &Term) -> bool {
    match t {
        Term::Lam(..) => true,
        Term::App(_, u) | Term::Diff(_, u) => ends_open(u),
        Term::Zero(Some(_)) => true,
        _ => false,
    }
}

struct Summand<'a>(&'a Term);

impl fmt::Display for Summand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Sum(_) => write!(f, "({})", self.0),
            t => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Lam(x, ty, b) => write!(f, "\\{x}:{ty}. {b}"),
            Term::App(t, u) => write!(f, "({t}) {}", Summand(u)),
            Term::Zero(None) => write!(f, "0"),
            Term::Zero(Some(ty)) => write!(f, "0 : {ty}"),
            Term::Sum(ms) => {
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if ends_open(m) {
                        write!(f, "({m})")?;
                    } else {
                        write!(f, "{m}")?;
                    }
                }
                Ok(())
            }
            Term::Diff(t, u) => {
                if matches!(t.as_ref(), Term::Var(_)) {
                    write!(f, "D {t} . {}", Summand(u))
                } else {
                    write!(f, "D ({t}) . {}", Summand(u))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Type {
        Type::base("X")
    }

    #[test]
    fn sums_flatten_and_absorb_zero() {
        let a = Term::var("a");
        let b = Term::var("b");
        let s = Term::sum([a.clone(), Term::sum([b.clone(), Term::zero()]), a.clone()]);
        assert_eq!(s.summands(), vec![&a, &b]);
        assert_eq!(Term::sum([Term::zero(), a.clone()]), a);
        assert_eq!(Term::sum([]), Term::zero());
        assert_eq!(Term::sum([Term::Zero(Some(x()))]), Term::Zero(Some(x())));
    }

    #[test]
    fn free_variables_and_occurrences() {
        let t = Term::lam(
            "y",
            x(),
            Term::apps(Term::var("x"), [Term::var("y"), Term::var("x")]),
        );
        assert_eq!(t.free_vars(), ["x".to_string()].into_iter().collect());
        assert_eq!(t.occurrences("x"), 2);
        assert_eq!(t.occurrences("y"), 0);
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Term::lam("x", x(), Term::lam("y", x(), Term::var("x")));
        let b = Term::lam("u", x(), Term::lam("v", x(), Term::var("u")));
        let c = Term::lam("u", x(), Term::lam("v", x(), Term::var("v")));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn printing() {
        let id = Term::lam("x", x(), Term::var("x"));
        assert_eq!(id.to_string(), "\\x:X. x");
        assert_eq!(
            Term::app(id.clone(), Term::var("y")).to_string(),
            "(\\x:X. x) y"
        );
        assert_eq!(
            Term::diff(id.clone(), Term::var("y")).to_string(),
            "D (\\x:X. x) . y"
        );
        let s = Term::sum([id.clone(), Term::var("z")]);
        assert_eq!(s.to_string(), "z + (\\x:X. x)");
    }
}
