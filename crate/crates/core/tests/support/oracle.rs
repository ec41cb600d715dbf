//! Reference implementations written straight from the definitions, with no
//! search engine or pruning. The membership oracle caches its answers.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use intsys::lambda::{infer_type, Context, Term, Type};
use intsys::multiset::{multisets_up_to, Multiset};
use intsys::semantics::{states_of, Environment, Point, Valuation};
use intsys::{InteractionSystem, Relation, Token};

/// `∀(s1, s2) ∈ r ∀a1 ∃a2 ∀d2 ∃d1. (s1[a1/d1], s2[a2/d2]) ∈ r`, read literally.
pub fn is_simulation(w1: &InteractionSystem, w2: &InteractionSystem, r: &Relation) -> bool {
    r.iter().all(|(s1, s2)| {
        w1.actions(s1).unwrap().iter().all(|a1| {
            w2.actions(s2).unwrap().iter().any(|a2| {
                w2.reactions(s2, a2).unwrap().iter().all(|d2| {
                    let n2 = w2.next(s2, a2, d2).unwrap();
                    w1.reactions(s1, a1)
                        .unwrap()
                        .iter()
                        .any(|d1| r.contains(w1.next(s1, a1, d1).unwrap(), n2))
                })
            })
        })
    })
}

/// The union of every simulation, found by trying every subset of `S1 × S2`.
/// Only usable while `|S1|·|S2|` stays small.
pub fn greatest_by_subsets(w1: &InteractionSystem, w2: &InteractionSystem) -> Relation {
    let all: Vec<(Token, Token)> = Relation::total(w1.state_list(), w2.state_list())
        .iter()
        .cloned()
        .collect();
    assert!(all.len() <= 16, "too many pairs for subset enumeration");
    let mut out = Relation::empty();
    for mask in 0u32..(1 << all.len()) {
        let r: Relation = all
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        if is_simulation(w1, w2, &r) {
            for (a, b) in r.iter() {
                out.insert(a.clone(), b.clone());
            }
        }
    }
    out
}

/// Number of `(f, G)` pairs at `(s1, s2)` of `w1 ⊸ w2`, counted by listing
/// them: `f` picks an `a2` for each `a1`, and `G` a `d1` for each `d2`.
pub fn lollipop_actions_by_listing(
    w1: &InteractionSystem,
    s1: &Token,
    w2: &InteractionSystem,
    s2: &Token,
) -> usize {
    let a1s = w1.actions(s1).unwrap();
    let a2s = w2.actions(s2).unwrap();
    let mut count = 0;
    let mut f = vec![0usize; a1s.len()];
    if !a1s.is_empty() && a2s.is_empty() {
        return 0;
    }
    loop {
        let mut product = 1usize;
        for (i, a1) in a1s.iter().enumerate() {
            let a2 = &a2s[f[i]];
            let d1 = w1.reactions(s1, a1).unwrap().len();
            let d2 = w2.reactions(s2, a2).unwrap().len();
            product *= d1.pow(d2 as u32);
        }
        count += product;
        let mut i = 0;
        loop {
            if i == f.len() {
                return count;
            }
            f[i] += 1;
            if f[i] < a2s.len() {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}

/// Every way of writing `env` as `left + right`.
fn env_splits(env: &Environment) -> Vec<(Environment, Environment)> {
    let mut out = vec![(Environment(vec![]), Environment(vec![]))];
    for m in &env.0 {
        let mut next = Vec::new();
        for (l, r) in &out {
            for (a, b) in m.splits() {
                let mut l = l.clone();
                let mut r = r.clone();
                l.0.push(a);
                r.0.push(b);
                next.push((l, r));
            }
        }
        out = next;
    }
    out
}

type Query = (Vec<(String, Type)>, Term, Environment, Point);

/// Membership in `[[t]]`, decided top-down from the defining clauses.
/// Answers are cached, which changes nothing but the running time.
pub struct Membership<'a> {
    rho: &'a Valuation,
    k: usize,
    memo: RefCell<HashMap<Query, bool>>,
    points: RefCell<HashMap<Type, Rc<Vec<Point>>>>,
}

impl<'a> Membership<'a> {
    pub fn new(rho: &'a Valuation, k: usize) -> Self {
        Membership {
            rho,
            k,
            memo: RefCell::default(),
            points: RefCell::default(),
        }
    }

    fn points(&self, ty: &Type) -> Rc<Vec<Point>> {
        self.points
            .borrow_mut()
            .entry(ty.clone())
            .or_insert_with(|| Rc::new(states_of(ty, self.rho, self.k).unwrap()))
            .clone()
    }

    fn arg_type(ctx: &Context, f: &Term, u: &Term) -> Option<Type> {
        match infer_type(ctx, f).unwrap() {
            Some(Type::Arrow(a, _)) => Some(*a),
            Some(_) => unreachable!("well typed"),
            None => infer_type(ctx, u).unwrap(),
        }
    }

    pub fn contains(&self, ctx: &Context, t: &Term, env: &Environment, p: &Point) -> bool {
        let key = (ctx.entries().to_vec(), t.clone(), env.clone(), p.clone());
        if let Some(&known) = self.memo.borrow().get(&key) {
            return known;
        }
        let answer = self.decide(ctx, t, env, p);
        self.memo.borrow_mut().insert(key, answer);
        answer
    }

    fn decide(&self, ctx: &Context, t: &Term, env: &Environment, p: &Point) -> bool {
        match t {
            Term::Var(x) => {
                let i = ctx.names().collect::<Vec<_>>().iter().rposition(|y| y == x);
                let i = i.expect("bound variable");
                env.0.iter().enumerate().all(|(j, m)| {
                    if j == i {
                        m == &Multiset::singleton(p.clone())
                    } else {
                        m.is_empty()
                    }
                })
            }
            Term::Lam(x, a, body) => match p {
                Point::Arrow(mu, q) => {
                    let mut inner = env.clone();
                    inner.0.push(mu.clone());
                    self.contains(&ctx.with(x, a), body, &inner, q)
                }
                Point::Base(_) => false,
            },
            Term::Zero(_) => false,
            Term::Sum(ms) => ms.iter().any(|m| self.contains(ctx, m, env, p)),
            Term::App(f, u) => {
                let Some(a) = Self::arg_type(ctx, f, u) else {
                    return false;
                };
                let candidates = self.points(&a);
                env_splits(env).iter().any(|(head, rest)| {
                    (0..=self.k).any(|n| {
                        self.arguments(ctx, u, &candidates, rest, n)
                            .into_iter()
                            .any(|mu| self.contains(ctx, f, head, &Point::arrow(mu, p.clone())))
                    })
                })
            }
            Term::Diff(f, u) => {
                let Point::Arrow(mu, q) = p else {
                    return false;
                };
                if mu.len() + 1 > self.k {
                    return false;
                }
                let Some(a) = Self::arg_type(ctx, f, u) else {
                    return false;
                };
                let candidates = self.points(&a);
                env_splits(env).iter().any(|(left, right)| {
                    candidates.iter().any(|s| {
                        self.contains(ctx, u, right, s)
                            && self.contains(
                                ctx,
                                f,
                                left,
                                &Point::arrow(mu.insert(s.clone()), (**q).clone()),
                            )
                    })
                })
            }
        }
    }

    /// The multisets `[s1, …, sn]` with `rest = γ1 + … + γn` and each
    /// `(γi, si)` in `[[u]]`.
    fn arguments(
        &self,
        ctx: &Context,
        u: &Term,
        candidates: &[Point],
        rest: &Environment,
        n: usize,
    ) -> Vec<Multiset<Point>> {
        if n == 0 {
            return if rest.total() == 0 {
                vec![Multiset::new()]
            } else {
                vec![]
            };
        }
        let mut out = Vec::new();
        for (one, others) in env_splits(rest) {
            for s in candidates {
                if self.contains(ctx, u, &one, s) {
                    for mu in self.arguments(ctx, u, candidates, &others, n - 1) {
                        let mu = mu.insert(s.clone());
                        if !out.contains(&mu) {
                            out.push(mu);
                        }
                    }
                }
            }
        }
        out
    }

    /// All environments of `ctx` with coordinates of size at most `k`.
    pub fn environments(&self, ctx: &Context) -> Vec<Environment> {
        let mut out = vec![Environment(vec![])];
        for (_, a) in ctx.entries() {
            let ms = multisets_up_to(&self.points(a), self.k);
            out = out
                .into_iter()
                .flat_map(|e| {
                    ms.iter().map(move |m| {
                        let mut e = e.clone();
                        e.0.push(m.clone());
                        e
                    })
                })
                .collect();
        }
        out
    }

    /// `[[t]]` by testing every candidate pair.
    pub fn denotation(&self, ctx: &Context, t: &Term, ty: &Type) -> Vec<(Environment, Point)> {
        let points = self.points(ty);
        let mut out = Vec::new();
        for env in self.environments(ctx) {
            for p in points.iter() {
                if self.contains(ctx, t, &env, p) {
                    out.push((env.clone(), p.clone()));
                }
            }
        }
        out.sort();
        out
    }
}
