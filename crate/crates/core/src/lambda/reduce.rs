use thiserror::Error;

use super::subst::{diff_substitute, fresh, substitute};
use super::term::Term;

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no normal form within {steps} steps")]
pub struct StepLimit {
    pub steps: usize,
}

/// Which rule fired at the root of a redex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `(λx.t) u → t[u/x]`
    Beta,
    /// `D(λx.t)·u → λx.(∂t/∂x·u)`
    DiffBeta,
    /// Sums and zeros moved out of linear positions.
    Linear,
}

/// The rule applicable at the root of `t`, and its result.
pub fn root_step(t: &Term) -> Option<(Rule, Term)> {
    match t {
        Term::App(f, u) => match f.as_ref() {
            Term::Lam(x, _, body) => Some((Rule::Beta, substitute(body, x, u))),
            Term::Sum(ms) => Some((
                Rule::Linear,
                Term::sum(ms.iter().map(|m| Term::app(m.clone(), (**u).clone()))),
            )),
            Term::Zero(_) => Some((Rule::Linear, Term::zero())),
            _ => None,
        },
        Term::Diff(f, u) => match (f.as_ref(), u.as_ref()) {
            (Term::Zero(_), _) | (_, Term::Zero(_)) => Some((Rule::Linear, Term::zero())),
            (Term::Sum(ms), _) => Some((
                Rule::Linear,
                Term::sum(ms.iter().map(|m| Term::diff(m.clone(), (**u).clone()))),
            )),
            (_, Term::Sum(ms)) => Some((
                Rule::Linear,
                Term::sum(ms.iter().map(|m| Term::diff((**f).clone(), m.clone()))),
            )),
            (Term::Lam(x, ty, body), _) => {
                let (x, body) = if u.free_vars().contains(x) {
                    let mut avoid = u.free_vars();
                    avoid.extend(body.free_vars());
                    let z = fresh(x, &avoid);
                    let body = substitute(body, x, &Term::Var(z.clone()));
                    (z, body)
                } else {
                    (x.clone(), (**body).clone())
                };
                let inner = diff_substitute(&body, &x, u);
                Some((Rule::DiffBeta, Term::lam(x, ty.clone(), inner)))
            }
            _ => None,
        },
        Term::Lam(x, ty, body) => match body.as_ref() {
            Term::Zero(_) => Some((Rule::Linear, Term::zero())),
            Term::Sum(ms) => Some((
                Rule::Linear,
                Term::sum(
                    ms.iter()
                        .map(|m| Term::lam(x.clone(), ty.clone(), m.clone())),
                ),
            )),
            _ => None,
        },
        _ => None,
    }
}

/// One leftmost-outermost step, if `t` is not normal.
pub fn reduce(t: &Term) -> Option<Term> {
    reduce_with_rule(t).map(|(_, t)| t)
}

/// As [`reduce`], also naming the rule that fired.
pub fn reduce_with_rule(t: &Term) -> Option<(Rule, Term)> {
    if let Some(step) = root_step(t) {
        return Some(step);
    }
    match t {
        Term::Var(_) | Term::Zero(_) => None,
        Term::Lam(x, ty, body) => {
            reduce_with_rule(body).map(|(r, b)| (r, Term::lam(x.clone(), ty.clone(), b)))
        }
        Term::App(f, u) => {
            if let Some((r, f2)) = reduce_with_rule(f) {
                return Some((r, Term::app(f2, (**u).clone())));
            }
            reduce_with_rule(u).map(|(r, u2)| (r, Term::app((**f).clone(), u2)))
        }
        Term::Diff(f, u) => {
            if let Some((r, f2)) = reduce_with_rule(f) {
                return Some((r, Term::diff(f2, (**u).clone())));
            }
            reduce_with_rule(u).map(|(r, u2)| (r, Term::diff((**f).clone(), u2)))
        }
        Term::Sum(ms) => ms.iter().enumerate().find_map(|(i, m)| {
            reduce_with_rule(m).map(|(r, m2)| {
                let rest = ms
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, t)| t.clone());
                (r, Term::sum(rest.chain(std::iter::once(m2))))
            })
        }),
    }
}

pub fn is_normal(t: &Term) -> bool {
    reduce(t).is_none()
}

/// Iterates [`reduce`] for at most `max_steps` steps.
pub fn normalize(t: &Term, max_steps: usize) -> Result<Term, StepLimit> {
    let mut cur = t.clone();
    for _ in 0..max_steps {
        match reduce(&cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    if is_normal(&cur) {
        Ok(cur)
    } else {
        Err(StepLimit { steps: max_steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn beta() {
        assert_eq!(reduce(&p("(\\x:X. x) u")), Some(p("u")));
        assert_eq!(reduce_with_rule(&p("(\\x:X. x) u")).unwrap().0, Rule::Beta);
    }

    #[test]
    fn differential_beta() {
        let (rule, r) = reduce_with_rule(&p("D (\\x:X. x) . u")).unwrap();
        assert_eq!(rule, Rule::DiffBeta);
        assert_eq!(r, p("\\x:X. u"));
    }

    #[test]
    fn differential_beta_renames_a_captured_binder() {
        let r = reduce(&p("D (\\x:X. (f) x) . x")).unwrap();
        let x = crate::lambda::Type::base("X");
        let expected = Term::lam(
            "x'",
            x,
            Term::sum([
                Term::app(Term::zero(), p("x'")),
                Term::app(p("D f . x"), p("x'")),
            ]),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn outermost_first() {
        // the outer redex fires before the inner one
        let t = p("(\\x:X. \\y:X. x) ((\\z:X. z) a)");
        assert_eq!(reduce(&t), Some(p("\\y:X. (\\z:X. z) a")));
    }

    #[test]
    fn linearity_steps() {
        assert_eq!(reduce(&p("(a + b) c")), Some(p("(a) c + (b) c")));
        assert_eq!(reduce(&p("(0) c")), Some(Term::zero()));
        assert_eq!(reduce(&p("D a . 0")), Some(Term::zero()));
        assert_eq!(reduce(&p("D a . (b + c)")), Some(p("D a . b + D a . c")));
        assert_eq!(reduce(&p("\\x:X. 0")), Some(Term::zero()));
        assert_eq!(reduce(&p("\\x:X. x + y")), Some(p("(\\x:X. x) + \\x:X. y")));
    }

    #[test]
    fn normalization() {
        let k = "\\x:X. \\y:X. x";
        let i = "\\x:X. x";
        let t = p(&format!("(({k}) {i}) a"));
        assert_eq!(normalize(&t, 100).unwrap(), p(i));
        let twice = p("(\\f:X -> X. \\y:X. (f) (f) y) \\z:X. z");
        assert_eq!(normalize(&twice, 100).unwrap(), p("\\y:X. y"));
        assert_eq!(
            normalize(&p("(\\x:X. x) a"), 0),
            Err(StepLimit { steps: 0 })
        );
    }
}
