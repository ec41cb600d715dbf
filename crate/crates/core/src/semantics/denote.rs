use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::lambda::{check, infer_type, typecheck, Context, Term, Type, TypeError};
use crate::multiset::Multiset;

use super::point::{states_of, Environment, Point, SemanticsError, Valuation};

/// `[[t]]` restricted to environments and points whose multisets all have
/// at most `bound` elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Denotation {
    pub bound: usize,
    pub pairs: BTreeSet<(Environment, Point)>,
}

impl Denotation {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, env: &Environment, p: &Point) -> bool {
        self.pairs.contains(&(env.clone(), p.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Environment, Point)> {
        self.pairs.iter()
    }

    /// The pairs whose environment and point have width at most `k`.
    pub fn restrict(&self, k: usize) -> Denotation {
        Denotation {
            bound: k,
            pairs: self
                .pairs
                .iter()
                .filter(|(env, p)| env.width() <= k && p.width() <= k)
                .cloned()
                .collect(),
        }
    }

    pub fn union(&self, other: &Denotation) -> Denotation {
        Denotation {
            bound: self.bound,
            pairs: self.pairs.union(&other.pairs).cloned().collect(),
        }
    }
}

type Pairs = BTreeSet<(Environment, Point)>;

/// `[[t]]` at its inferred type.
pub fn denote(
    ctx: &Context,
    t: &Term,
    rho: &Valuation,
    k: usize,
) -> Result<Denotation, SemanticsError> {
    let ty = typecheck(ctx, t)?;
    denote_at(ctx, t, &ty, rho, k)
}

/// `[[t]]` at a given type, which lets unannotated zeros through.
pub fn denote_at(
    ctx: &Context,
    t: &Term,
    ty: &Type,
    rho: &Valuation,
    k: usize,
) -> Result<Denotation, SemanticsError> {
    check(ctx, t, ty)?;
    let mut ev = Evaluator {
        rho,
        k,
        memo: HashMap::new(),
        points: HashMap::new(),
    };
    let pairs = ev.eval(ctx, t, ty)?;
    Ok(Denotation {
        bound: k,
        pairs: (*pairs).clone(),
    })
}

/// `[[t]]` computed with every multiset cut at `internal`, then restricted to
/// width `k`. Grows with `internal` towards the exact restriction of `[[t]]`.
pub fn denote_within(
    ctx: &Context,
    t: &Term,
    ty: &Type,
    rho: &Valuation,
    k: usize,
    internal: usize,
) -> Result<Denotation, SemanticsError> {
    Ok(denote_at(ctx, t, ty, rho, internal.max(k))?.restrict(k))
}

struct Evaluator<'a> {
    rho: &'a Valuation,
    k: usize,
    memo: HashMap<(Vec<(String, Type)>, Term, Type), Rc<Pairs>>,
    points: HashMap<Type, Rc<Vec<Point>>>,
}

impl Evaluator<'_> {
    fn points(&mut self, ty: &Type) -> Result<Rc<Vec<Point>>, SemanticsError> {
        if let Some(p) = self.points.get(ty) {
            return Ok(p.clone());
        }
        let p = Rc::new(states_of(ty, self.rho, self.k)?);
        self.points.insert(ty.clone(), p.clone());
        Ok(p)
    }

    fn eval(&mut self, ctx: &Context, t: &Term, ty: &Type) -> Result<Rc<Pairs>, SemanticsError> {
        let key = (ctx.entries().to_vec(), t.clone(), ty.clone());
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let d = Rc::new(self.compute(ctx, t, ty)?);
        self.memo.insert(key, d.clone());
        Ok(d)
    }

    fn compute(&mut self, ctx: &Context, t: &Term, ty: &Type) -> Result<Pairs, SemanticsError> {
        let n = ctx.len();
        let k = self.k;
        let mut out = Pairs::new();
        match t {
            Term::Var(x) => {
                let i = ctx
                    .entries()
                    .iter()
                    .rposition(|(y, _)| y == x)
                    .ok_or_else(|| TypeError::Unbound(x.clone()))?;
                if k >= 1 {
                    for p in self.points(ty)?.iter() {
                        out.insert((Environment::singleton(n, i, p.clone()), p.clone()));
                    }
                }
            }
            Term::Lam(x, a, body) => {
                let (_, b) = ty.as_arrow().expect("checked against an arrow type");
                let inner = ctx.with(x, a);
                for (env, p) in self.eval(&inner, body, b)?.iter() {
                    let mut coords = env.0.clone();
                    let mu = coords.pop().expect("binder coordinate");
                    out.insert((Environment(coords), Point::arrow(mu, p.clone())));
                }
            }
            Term::App(f, u) => {
                let Some(fty) = infer_type(ctx, f)? else {
                    return Ok(out);
                };
                let (a, _) = fty.as_arrow().expect("checked as a function");
                let fun = self.eval(ctx, f, &fty)?;
                if fun.is_empty() {
                    return Ok(out);
                }
                let arg = self.eval(ctx, u, a)?;
                let by_point = index_by_point(&arg);
                for (g0, p) in fun.iter() {
                    let Point::Arrow(mu, s) = p else { continue };
                    let needs: Vec<&Point> = mu.iter().collect();
                    let mut options = Vec::with_capacity(needs.len());
                    for q in &needs {
                        match by_point.get(*q) {
                            Some(envs) => options.push(envs.as_slice()),
                            None => break,
                        }
                    }
                    if options.len() < needs.len() {
                        continue;
                    }
                    sum_choices(g0, &options, k, &mut |g| {
                        out.insert((g, (**s).clone()));
                    });
                }
            }
            Term::Zero(_) => {}
            Term::Sum(ms) => {
                for m in ms {
                    out.extend(self.eval(ctx, m, ty)?.iter().cloned());
                }
            }
            Term::Diff(f, u) => {
                let (a, _) = ty.as_arrow().expect("checked against an arrow type");
                let fun = self.eval(ctx, f, ty)?;
                if fun.is_empty() {
                    return Ok(out);
                }
                let arg = self.eval(ctx, u, a)?;
                let by_point = index_by_point(&arg);
                for (g1, p) in fun.iter() {
                    let Point::Arrow(nu, s2) = p else { continue };
                    for s in nu.distinct() {
                        let Some(envs) = by_point.get(s) else {
                            continue;
                        };
                        let mu = nu.remove_one(s).expect("s occurs in nu");
                        for g2 in envs {
                            if let Some(g) = g1.add_within(g2, k) {
                                out.insert((g, Point::arrow(mu.clone(), (**s2).clone())));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn index_by_point(d: &Pairs) -> HashMap<&Point, Vec<Environment>> {
    let mut m: HashMap<&Point, Vec<Environment>> = HashMap::new();
    for (env, p) in d {
        m.entry(p).or_default().push(env.clone());
    }
    m
}

/// Every `g0 + g1 + … + gn` with `gi` drawn from `options[i-1]`, pruned as
/// soon as a coordinate exceeds `k`.
fn sum_choices(
    g0: &Environment,
    options: &[&[Environment]],
    k: usize,
    emit: &mut dyn FnMut(Environment),
) {
    match options.split_first() {
        None => emit(g0.clone()),
        Some((first, rest)) => {
            for g in first.iter() {
                if let Some(sum) = g0.add_within(g, k) {
                    sum_choices(&sum, rest, k, emit);
                }
            }
        }
    }
}

/// The multiset of all points in an environment, for sanity checks.
pub fn environment_points(env: &Environment) -> Multiset<Point> {
    env.0.iter().fold(Multiset::new(), |acc, m| &acc + m)
}
