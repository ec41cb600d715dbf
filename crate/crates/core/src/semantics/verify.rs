use std::sync::Arc;

use serde::Serialize;

use crate::connectives::Tensor;
use crate::fixtures::skip;
use crate::lambda::{check, typecheck, Context, Term, Type};
use crate::relation::Relation;
use crate::simulation::{check_factored, check_simulation, FactoredOutcome};
use crate::system::{SystemError, SystemRef};
use crate::token::{nest_tensor, Token};

use super::denote::{denote_at, Denotation};
use super::point::{interpret, interpret_bang, SemanticsError, Valuation};

/// `[[t]]` as a relation from `!Γ1 ⊗ … ⊗ !Γn` (left-nested, `*` when
/// closed) to `[[ω]]`.
pub fn denotation_as_relation(d: &Denotation) -> Relation {
    let mut r = Relation::empty();
    for (env, p) in d.iter() {
        r.insert(nest_tensor(env.tokens()), p.to_token());
    }
    r
}

/// Each pair `(γ, (μ1, … (μm, s)))` flattened to `([γ1, …, γn, μ1, …, μm], s)`.
pub fn uncurried_pairs(d: &Denotation) -> Vec<(Vec<Token>, Token)> {
    d.iter()
        .map(|(env, p)| {
            let (args, s) = p.uncurry();
            let mut src = env.tokens();
            src.extend(
                args.iter()
                    .map(|mu| Token::multiset(mu.map(|q| q.to_token()))),
            );
            (src, s.to_token())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Holds { witnesses: usize },
    Fails { counterexample: String },
}

/// The same question asked directly of `!Γ ⊗ … ⊸ [[ω]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CurriedCheck {
    Agrees,
    Disagrees,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub context: String,
    pub term: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub bound: usize,
    pub pairs: usize,
    pub verdict: Verdict,
    pub curried: CurriedCheck,
}

impl CorrectnessReport {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::Holds { .. }) && self.curried != CurriedCheck::Disagrees
    }
}

/// Checks that the bounded denotation of `t` is a simulation.
pub fn verify_correctness(
    ctx: &Context,
    t: &Term,
    rho: &Valuation,
    k: usize,
    cap: u128,
) -> Result<CorrectnessReport, SemanticsError> {
    let ty = typecheck(ctx, t)?;
    let d = denote_at(ctx, t, &ty, rho, k)?;
    let mut report = verify_denotation(ctx, &ty, &d, rho, cap)?;
    report.term = t.to_string();
    Ok(report)
}

/// Checks an arbitrary set of pairs, such as a perturbed denotation,
/// against `!Γ → [[ω]]`.
pub fn verify_denotation(
    ctx: &Context,
    ty: &Type,
    d: &Denotation,
    rho: &Valuation,
    cap: u128,
) -> Result<CorrectnessReport, SemanticsError> {
    let k = d.bound;
    let (args, base) = ty.spine();
    let mut sources: Vec<SystemRef> = Vec::new();
    for (_, a) in ctx.entries() {
        sources.push(interpret_bang(a, rho, k, cap)?);
    }
    for a in &args {
        sources.push(interpret_bang(a, rho, k, cap)?);
    }
    let target = interpret(base, rho, k, cap)?;
    let views: Vec<&dyn crate::system::Interaction> = sources.iter().map(|w| &**w as _).collect();
    let verdict = match check_factored(&views, &*target, &uncurried_pairs(d))? {
        FactoredOutcome::Holds { witnesses } => Verdict::Holds { witnesses },
        FactoredOutcome::Fails(c) => Verdict::Fails {
            counterexample: c.to_string(),
        },
    };
    let curried = curried_check(ctx, ty, d, rho, cap, &verdict)?;
    Ok(CorrectnessReport {
        context: ctx
            .entries()
            .iter()
            .map(|(x, a)| format!("{x} : {a}"))
            .collect::<Vec<_>>()
            .join(", "),
        term: String::new(),
        ty: ty.to_string(),
        bound: k,
        pairs: d.len(),
        verdict,
        curried,
    })
}

fn curried_check(
    ctx: &Context,
    ty: &Type,
    d: &Denotation,
    rho: &Valuation,
    cap: u128,
    verdict: &Verdict,
) -> Result<CurriedCheck, SemanticsError> {
    if ty.as_arrow().is_none() {
        return Ok(CurriedCheck::Skipped {
            reason: "base type".to_string(),
        });
    }
    let k = d.bound;
    let mut source: SystemRef = skip().into_ref();
    for (i, (_, a)) in ctx.entries().iter().enumerate() {
        let b = interpret_bang(a, rho, k, cap)?;
        source = if i == 0 {
            b
        } else {
            Arc::new(Tensor::new(source, b))
        };
    }
    let target = interpret(ty, rho, k, cap)?;
    match check_simulation(&*source, &*target, &denotation_as_relation(d)) {
        Ok(holds) => Ok(if holds == matches!(verdict, Verdict::Holds { .. }) {
            CurriedCheck::Agrees
        } else {
            CurriedCheck::Disagrees
        }),
        Err(e @ SystemError::SizeGuard { .. }) => Ok(CurriedCheck::Skipped {
            reason: e.to_string(),
        }),
        Err(e) => Err(e.into()),
    }
}

/// How far beyond `k` [`verify_invariance`] lets intermediate multisets grow.
pub const MAX_SLACK: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub left: String,
    pub right: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub bound: usize,
    /// Width of intermediate multisets used for the comparison.
    pub internal: usize,
    /// Both sides were unchanged when `internal` was raised by one.
    pub stable: bool,
    pub left_size: usize,
    pub right_size: usize,
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
}

impl InvarianceReport {
    pub fn equal(&self) -> bool {
        self.stable && self.only_left.is_empty() && self.only_right.is_empty()
    }
}

/// Compares `[[t]]` and `[[u]]` at the type of `t`, restricted to width `k`.
///
/// Intermediate multisets may need more than `k` elements even when the
/// result has width `k` (`D t · u` adds one to the argument of `t`). Both
/// sides are therefore evaluated with a growing internal width until neither
/// changes, giving up after [`MAX_SLACK`] extra elements.
pub fn verify_invariance(
    ctx: &Context,
    t: &Term,
    u: &Term,
    rho: &Valuation,
    k: usize,
) -> Result<InvarianceReport, SemanticsError> {
    let ty = typecheck(ctx, t)?;
    check(ctx, u, &ty)?;
    let at = |internal: usize| -> Result<(Denotation, Denotation), SemanticsError> {
        Ok((
            denote_at(ctx, t, &ty, rho, internal)?.restrict(k),
            denote_at(ctx, u, &ty, rho, internal)?.restrict(k),
        ))
    };
    let mut internal = k;
    let (mut dt, mut du) = at(internal)?;
    let mut stable = false;
    while internal < k + MAX_SLACK {
        let (nt, nu) = at(internal + 1)?;
        stable = nt == dt && nu == du;
        if stable {
            break;
        }
        internal += 1;
        (dt, du) = (nt, nu);
    }
    let show = |(env, p): &(super::point::Environment, super::point::Point)| {
        format!("{} |- {}", env.display(ctx), p)
    };
    Ok(InvarianceReport {
        left: t.to_string(),
        right: u.to_string(),
        ty: ty.to_string(),
        bound: k,
        internal,
        stable,
        left_size: dt.len(),
        right_size: du.len(),
        only_left: dt.pairs.difference(&du.pairs).map(show).collect(),
        only_right: du.pairs.difference(&dt.pairs).map(show).collect(),
    })
}
