use std::collections::BTreeSet;

use super::term::Term;

/// `name` followed by enough primes to avoid `avoid`.
pub fn fresh(name: &str, avoid: &BTreeSet<String>) -> String {
    let mut candidate = format!("{name}'");
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Renames binder `y` of `λy.body` when it would capture a free variable of `u`.
fn open_binder(y: &str, body: &Term, x: &str, u: &Term) -> (String, Term) {
    let fv_u = u.free_vars();
    if !fv_u.contains(y) {
        return (y.to_string(), body.clone());
    }
    let mut avoid = fv_u;
    avoid.extend(body.free_vars());
    avoid.insert(x.to_string());
    let z = fresh(y, &avoid);
    let renamed = substitute(body, y, &Term::Var(z.clone()));
    (z, renamed)
}

/// `t[u/x]`, capture-avoiding.
pub fn substitute(t: &Term, x: &str, u: &Term) -> Term {
    match t {
        Term::Var(y) => {
            if y == x {
                u.clone()
            } else {
                t.clone()
            }
        }
        Term::Lam(y, ty, body) => {
            if y == x || !body.free_vars().contains(x) {
                return t.clone();
            }
            let (y, body) = open_binder(y, body, x, u);
            Term::lam(y, ty.clone(), substitute(&body, x, u))
        }
        Term::App(f, a) => Term::app(substitute(f, x, u), substitute(a, x, u)),
        Term::Diff(f, a) => Term::diff(substitute(f, x, u), substitute(a, x, u)),
        Term::Zero(_) => t.clone(),
        Term::Sum(ms) => Term::sum(ms.iter().map(|m| substitute(m, x, u))),
    }
}

/// `∂t/∂x · u`: the sum of the ways of replacing exactly one free occurrence
/// of `x` in `t` by `u`.
pub fn diff_substitute(t: &Term, x: &str, u: &Term) -> Term {
    if !t.free_vars().contains(x) {
        return Term::zero();
    }
    match t {
        Term::Var(y) => {
            if y == x {
                u.clone()
            } else {
                Term::zero()
            }
        }
        Term::Lam(y, ty, body) => {
            if y == x {
                return Term::zero();
            }
            let (y, body) = open_binder(y, body, x, u);
            Term::lam(y, ty.clone(), diff_substitute(&body, x, u))
        }
        Term::App(f, s) => Term::sum([
            Term::app(diff_substitute(f, x, u), (**s).clone()),
            Term::app(
                Term::diff((**f).clone(), diff_substitute(s, x, u)),
                (**s).clone(),
            ),
        ]),
        Term::Diff(f, s) => Term::sum([
            Term::diff(diff_substitute(f, x, u), (**s).clone()),
            Term::diff((**f).clone(), diff_substitute(s, x, u)),
        ]),
        Term::Zero(_) => Term::zero(),
        Term::Sum(ms) => Term::sum(ms.iter().map(|m| diff_substitute(m, x, u))),
    }
}
