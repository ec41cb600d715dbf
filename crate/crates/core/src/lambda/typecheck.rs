use thiserror::Error;

use super::term::Term;
use super::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{term}` has type {found}, expected {expected}")]
    Mismatch {
        term: String,
        expected: Type,
        found: Type,
    },
    #[error("`{term}` is applied but has type {found}")]
    NotAFunction { term: String, found: Type },
    #[error("`{term}` is checked against {expected}, which is not an arrow type")]
    ExpectedArrow { term: String, expected: Type },
    #[error("cannot determine the type of `{0}`: annotate its zero as `0 : T`")]
    ZeroNeedsType(String),
    #[error("variable `{0}` is declared twice in the context")]
    DuplicateBinding(String),
}

/// Typing context: variable declarations, later ones shadowing earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(String, Type)>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    /// A context with distinct names.
    pub fn from_entries(entries: Vec<(String, Type)>) -> Result<Self, TypeError> {
        for (i, (x, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(y, _)| y == x) {
                return Err(TypeError::DuplicateBinding(x.clone()));
            }
        }
        Ok(Context { entries })
    }

    pub fn entries(&self) -> &[(String, Type)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.entries
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t)
    }

    pub fn position(&self, x: &str) -> Option<usize> {
        self.entries.iter().position(|(y, _)| y == x)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(x, _)| x.as_str())
    }

    /// This context extended with `x : ty`, which may shadow an earlier `x`.
    pub fn with(&self, x: &str, ty: &Type) -> Context {
        let mut c = self.clone();
        c.entries.push((x.to_string(), ty.clone()));
        c
    }
}

/// The type of `t`. Fails on terms whose type depends on an unannotated zero.
pub fn typecheck(ctx: &Context, t: &Term) -> Result<Type, TypeError> {
    infer(ctx, t)?.ok_or_else(|| TypeError::ZeroNeedsType(t.to_string()))
}

/// Checks `t` against a known type; zeros need no annotation here.
pub fn check(ctx: &Context, t: &Term, expected: &Type) -> Result<(), TypeError> {
    match t {
        Term::Zero(None) => Ok(()),
        Term::Sum(ms) => ms.iter().try_for_each(|m| check(ctx, m, expected)),
        Term::Lam(x, ty, body) => {
            let (from, to) = arrow_of(t, expected)?;
            if from != ty {
                return Err(mismatch(t, expected, &Type::arrow(ty.clone(), to.clone())));
            }
            check(&ctx.with(x, ty), body, to)
        }
        Term::Diff(f, u) => {
            let (from, _) = arrow_of(t, expected)?;
            check(ctx, f, expected)?;
            check(ctx, u, from)
        }
        Term::App(f, u) => match infer(ctx, f)? {
            Some(fty) => {
                let (from, to) = function_of(f, &fty)?;
                check(ctx, u, from)?;
                same(t, expected, to)
            }
            None => {
                let _ = infer(ctx, u)?;
                Ok(())
            }
        },
        Term::Var(_) | Term::Zero(Some(_)) => match infer(ctx, t)? {
            Some(found) => same(t, expected, &found),
            None => Ok(()),
        },
    }
}

/// The type of `t`, or `None` for a zero-like term valid at any type.
pub fn infer_type(ctx: &Context, t: &Term) -> Result<Option<Type>, TypeError> {
    infer(ctx, t)
}

fn infer(ctx: &Context, t: &Term) -> Result<Option<Type>, TypeError> {
    match t {
        Term::Var(x) => ctx
            .lookup(x)
            .cloned()
            .map(Some)
            .ok_or_else(|| TypeError::Unbound(x.clone())),
        Term::Lam(x, ty, body) => {
            let inner = ctx.with(x, ty);
            Ok(infer(&inner, body)?.map(|b| Type::arrow(ty.clone(), b)))
        }
        Term::App(f, u) => match infer(ctx, f)? {
            Some(fty) => {
                let (from, to) = function_of(f, &fty)?;
                check(ctx, u, from)?;
                Ok(Some(to.clone()))
            }
            None => {
                infer(ctx, u)?;
                Ok(None)
            }
        },
        Term::Zero(ty) => Ok(ty.clone()),
        Term::Sum(ms) => {
            let mut found = None;
            for m in ms {
                if let Some(ty) = infer(ctx, m)? {
                    found = Some(ty);
                    break;
                }
            }
            match found {
                Some(ty) => {
                    for m in ms {
                        check(ctx, m, &ty)?;
                    }
                    Ok(Some(ty))
                }
                None => Ok(None),
            }
        }
        Term::Diff(f, u) => match infer(ctx, f)? {
            Some(fty) => {
                let (from, _) = function_of(f, &fty)?;
                check(ctx, u, from)?;
                Ok(Some(fty))
            }
            None => {
                infer(ctx, u)?;
                Ok(None)
            }
        },
    }
}

fn mismatch(t: &Term, expected: &Type, found: &Type) -> TypeError {
    TypeError::Mismatch {
        term: t.to_string(),
        expected: expected.clone(),
        found: found.clone(),
    }
}

fn same(t: &Term, expected: &Type, found: &Type) -> Result<(), TypeError> {
    if expected == found {
        Ok(())
    } else {
        Err(mismatch(t, expected, found))
    }
}

fn function_of<'a>(f: &Term, ty: &'a Type) -> Result<(&'a Type, &'a Type), TypeError> {
    ty.as_arrow().ok_or_else(|| TypeError::NotAFunction {
        term: f.to_string(),
        found: ty.clone(),
    })
}

fn arrow_of<'a>(t: &Term, ty: &'a Type) -> Result<(&'a Type, &'a Type), TypeError> {
    ty.as_arrow().ok_or_else(|| TypeError::ExpectedArrow {
        term: t.to_string(),
        expected: ty.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse::{parse_term, parse_type};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn infer_closed(s: &str) -> Result<Type, TypeError> {
        typecheck(&Context::new(), &parse_term(s).unwrap())
    }

    #[test]
    fn combinators() {
        assert_eq!(infer_closed("\\x:X. \\y:Y. x").unwrap(), ty("X -> Y -> X"));
        assert_eq!(
            infer_closed("\\x:X -> Y -> Z. \\y:X -> Y. \\z:X. ((x) z) (y) z").unwrap(),
            ty("(X -> Y -> Z) -> (X -> Y) -> X -> Z")
        );
    }

    #[test]
    fn application_in_context() {
        let ctx =
            Context::from_entries(vec![("x".into(), ty("X -> X")), ("y".into(), ty("X"))]).unwrap();
        assert_eq!(
            typecheck(&ctx, &parse_term("(x) y").unwrap()).unwrap(),
            ty("X")
        );
        assert!(matches!(
            typecheck(&ctx, &parse_term("(y) x").unwrap()),
            Err(TypeError::NotAFunction { .. })
        ));
    }

    #[test]
    fn differential_application() {
        let ctx = Context::from_entries(vec![("u".into(), ty("X"))]).unwrap();
        assert_eq!(
            typecheck(&ctx, &parse_term("D (\\x:X. x) . u").unwrap()).unwrap(),
            ty("X -> X")
        );
        assert!(typecheck(&ctx, &parse_term("D u . u").unwrap()).is_err());
    }

    #[test]
    fn zeros() {
        assert!(matches!(
            infer_closed("0"),
            Err(TypeError::ZeroNeedsType(_))
        ));
        assert_eq!(infer_closed("0 : X -> X").unwrap(), ty("X -> X"));
        assert_eq!(infer_closed("\\x:X. x + 0").unwrap(), ty("X -> X"));
        assert!(check(
            &Context::new(),
            &parse_term("\\x:X. 0").unwrap(),
            &ty("X -> Y")
        )
        .is_ok());
        assert!(check(
            &Context::new(),
            &parse_term("\\x:X. 0").unwrap(),
            &ty("Y -> Y")
        )
        .is_err());
    }

    #[test]
    fn errors() {
        assert_eq!(infer_closed("x"), Err(TypeError::Unbound("x".into())));
        assert!(infer_closed("\\x:X. \\y:Y. x + y").is_err());
        assert!(Context::from_entries(vec![("x".into(), ty("X")), ("x".into(), ty("X"))]).is_err());
    }
}
