//! Random well-typed terms and random systems from a seed.

use intsys::fixtures::{random_system, RandomShape};
use intsys::lambda::{Context, Term, Type};
use intsys::InteractionSystem;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn system(seed: u64) -> InteractionSystem {
    random_system(&mut rng(seed), RandomShape::SMALL)
}

pub fn x() -> Type {
    Type::base("X")
}

/// A small type over the single base `X`.
pub fn small_type<R: Rng>(rng: &mut R, depth: usize) -> Type {
    if depth == 0 || rng.gen_ratio(1, 2) {
        x()
    } else {
        Type::arrow(small_type(rng, depth - 1), small_type(rng, depth - 1))
    }
}

/// Generates terms of a requested type; binders get fresh names.
pub struct TermGen<R> {
    pub rng: R,
    /// Allow `0`, sums and `D t · u`.
    pub differential: bool,
    counter: usize,
}

impl<R: Rng> TermGen<R> {
    pub fn new(rng: R, differential: bool) -> Self {
        TermGen {
            rng,
            differential,
            counter: 0,
        }
    }

    fn fresh(&mut self) -> String {
        self.counter += 1;
        format!("v{}", self.counter)
    }

    /// Variables whose type, after zero or more arguments, is `ty`.
    fn heads(ctx: &Context, ty: &Type) -> Vec<(String, Vec<Type>)> {
        let mut out = Vec::new();
        for (x, a) in ctx.entries() {
            let mut args = Vec::new();
            let mut cur = a.clone();
            loop {
                if &cur == ty {
                    out.push((x.clone(), args.clone()));
                }
                match cur {
                    Type::Arrow(from, to) => {
                        args.push(*from);
                        cur = *to;
                    }
                    Type::Base(_) => break,
                }
            }
        }
        out
    }

    pub fn term(&mut self, ctx: &Context, ty: &Type, depth: usize) -> Term {
        let heads = Self::heads(ctx, ty);
        if depth == 0 {
            return self.leaf(ctx, ty, &heads);
        }
        let mut choices: Vec<u8> = Vec::new();
        if !heads.is_empty() {
            choices.extend([0, 0, 0]);
        }
        if ty.as_arrow().is_some() {
            choices.extend([1, 1]);
        }
        choices.push(2);
        if self.differential {
            choices.extend([3, 4]);
            if ty.as_arrow().is_some() {
                choices.push(5);
            }
        }
        match *choices.choose(&mut self.rng).unwrap() {
            0 => {
                let (x, args) = heads.choose(&mut self.rng).unwrap().clone();
                let args: Vec<Term> = args
                    .iter()
                    .map(|a| self.term(ctx, a, depth - 1))
                    .collect();
                Term::apps(Term::var(x), args)
            }
            1 => {
                let (a, b) = ty.as_arrow().unwrap();
                let (a, b) = (a.clone(), b.clone());
                let x = self.fresh();
                let body = self.term(&ctx.with(&x, &a), &b, depth - 1);
                Term::lam(x, a, body)
            }
            2 => self.redex(ctx, ty, depth),
            3 => Term::Zero(Some(ty.clone())),
            4 => {
                let l = self.term(ctx, ty, depth - 1);
                let r = self.term(ctx, ty, depth - 1);
                Term::sum([l, r])
            }
            _ => {
                let (a, _) = ty.as_arrow().unwrap();
                let a = a.clone();
                let f = self.term(ctx, ty, depth - 1);
                let u = self.term(ctx, &a, depth - 1);
                Term::diff(f, u)
            }
        }
    }

    /// A variable, an abstraction over a leaf, or `0`.
    fn leaf(&mut self, ctx: &Context, ty: &Type, heads: &[(String, Vec<Type>)]) -> Term {
        let vars: Vec<&String> = heads
            .iter()
            .filter(|(_, args)| args.is_empty())
            .map(|(x, _)| x)
            .collect();
        if let Some(x) = vars.choose(&mut self.rng) {
            return Term::var(*x);
        }
        match ty.as_arrow() {
            Some((a, b)) => {
                let (a, b) = (a.clone(), b.clone());
                let x = self.fresh();
                let inner = ctx.with(&x, &a);
                let heads = Self::heads(&inner, &b);
                let body = self.leaf(&inner, &b, &heads);
                Term::lam(x, a, body)
            }
            None => Term::Zero(Some(ty.clone())),
        }
    }

    /// `(λx:A. t) u` at type `ty`.
    pub fn redex(&mut self, ctx: &Context, ty: &Type, depth: usize) -> Term {
        let a = small_type(&mut self.rng, 1);
        let x = self.fresh();
        let body = self.term(&ctx.with(&x, &a), ty, depth - 1);
        let arg = self.term(ctx, &a, depth - 1);
        Term::app(Term::lam(x, a, body), arg)
    }
}

/// A random term of a random small type, with a context of up to two
/// variables.
pub fn typed_term(seed: u64, depth: usize, differential: bool) -> (Context, Term, Type) {
    let mut r = rng(seed);
    let mut ctx = Context::new();
    for i in 0..r.gen_range(0..=2) {
        let a = small_type(&mut r, 1);
        ctx = ctx.with(&format!("c{i}"), &a);
    }
    let ty = small_type(&mut r, 2);
    let mut g = TermGen::new(r, differential);
    let t = g.term(&ctx, &ty, depth);
    (ctx, t, ty)
}
