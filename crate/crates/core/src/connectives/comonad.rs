use serde::Serialize;

use crate::multiset::{multisets_up_to, Multiset};
use crate::relation::Relation;
use crate::simulation::{check_simulation, greatest_simulation, SimulationStrategy};
use crate::system::{Interaction, SystemError, SystemRef};
use crate::token::Token;

use super::bang::{bang_morphism, Bang, BangMode};

fn bag_of(t: &Token) -> Result<&Multiset<Token>, SystemError> {
    t.as_bag()
        .ok_or_else(|| SystemError::UnknownState(t.clone()))
}

fn tuple_of(t: &Token) -> Result<&[Token], SystemError> {
    t.as_tuple()
        .ok_or_else(|| SystemError::Invalid(format!("expected a tuple, got {t}")))
}

/// `ε : !w → w` on singletons: `([s], s)`, replaying the single thread.
pub fn counit(w: &SystemRef, k: usize, mode: BangMode) -> Result<SimulationStrategy, SystemError> {
    let mut out = SimulationStrategy::default();
    if k == 0 {
        return Ok(out);
    }
    for s in w.states() {
        let single = Token::bag(vec![s.clone()]);
        out.relation.insert(single.clone(), s.clone());
        for m in w.moves(&s)? {
            let lifted = match mode {
                BangMode::Canonical => Token::tuple(vec![m.action.clone()]),
                BangMode::Faithful => Token::pair(
                    Token::tuple(vec![s.clone()]),
                    Token::tuple(vec![m.action.clone()]),
                ),
            };
            out.act.insert(
                (single.clone(), s.clone(), lifted.clone()),
                m.action.clone(),
            );
            for o in m.outcomes {
                out.react.insert(
                    (
                        single.clone(),
                        s.clone(),
                        lifted.clone(),
                        o.reaction.clone(),
                    ),
                    Token::tuple(vec![o.reaction]),
                );
            }
        }
    }
    Ok(out)
}

/// A `!!w` action flattened to one list of threads.
struct Flat {
    states: Vec<Token>,
    actions: Vec<Token>,
    blocks: Vec<usize>,
}

/// Splits a bang action at `state` into its thread order and thread actions.
fn threads<'a>(
    state: &'a Token,
    action: &'a Token,
    mode: BangMode,
) -> Result<(Vec<Token>, &'a [Token]), SystemError> {
    match mode {
        BangMode::Canonical => Ok((bag_of(state)?.as_slice().to_vec(), tuple_of(action)?)),
        BangMode::Faithful => {
            let (rep, acts) = action.as_pair().ok_or_else(|| SystemError::UnknownAction {
                state: state.clone(),
                action: action.clone(),
            })?;
            Ok((tuple_of(rep)?.to_vec(), tuple_of(acts)?))
        }
    }
}

fn flatten(outer: &Token, action: &Token, mode: BangMode) -> Result<Flat, SystemError> {
    let bad = || SystemError::UnknownAction {
        state: outer.clone(),
        action: action.clone(),
    };
    let (inner_states, inner_actions) = threads(outer, action, mode)?;
    if inner_states.len() != inner_actions.len() {
        return Err(bad());
    }
    let mut flat = Flat {
        states: Vec::new(),
        actions: Vec::new(),
        blocks: Vec::new(),
    };
    for (mu, b) in inner_states.iter().zip(inner_actions) {
        let (ss, aa) = threads(mu, b, mode)?;
        if ss.len() != aa.len() {
            return Err(bad());
        }
        flat.blocks.push(ss.len());
        flat.states.extend(ss);
        flat.actions.extend(aa.iter().cloned());
    }
    Ok(flat)
}

/// Positions of the flattened threads in the target's thread order.
fn target_order(flat: &Flat, mode: BangMode) -> Vec<usize> {
    let mut order: Vec<usize> = (0..flat.states.len()).collect();
    if mode == BangMode::Canonical {
        order.sort_by(|&i, &j| {
            (&flat.states[i], &flat.actions[i]).cmp(&(&flat.states[j], &flat.actions[j]))
        });
    }
    order
}

/// The `!w` action simulating a `!!w` action at `outer`: all threads side
/// by side.
pub fn delta_translate_action(
    outer: &Token,
    action: &Token,
    mode: BangMode,
) -> Result<Token, SystemError> {
    let flat = flatten(outer, action, mode)?;
    let order = target_order(&flat, mode);
    let acts = Token::tuple(order.iter().map(|&i| flat.actions[i].clone()).collect());
    Ok(match mode {
        BangMode::Canonical => acts,
        BangMode::Faithful => Token::pair(
            Token::tuple(order.iter().map(|&i| flat.states[i].clone()).collect()),
            acts,
        ),
    })
}

/// The `!!w` reaction obtained by cutting a `!w` reaction back into blocks.
pub fn delta_translate_reaction(
    outer: &Token,
    action: &Token,
    reaction: &Token,
    mode: BangMode,
) -> Result<Token, SystemError> {
    let flat = flatten(outer, action, mode)?;
    let order = target_order(&flat, mode);
    let ds = tuple_of(reaction)?;
    if ds.len() != order.len() {
        return Err(SystemError::Invalid(format!(
            "reaction {reaction} has {} components, expected {}",
            ds.len(),
            order.len()
        )));
    }
    let mut original = vec![Token::star(); ds.len()];
    for (pos, &i) in order.iter().enumerate() {
        original[i] = ds[pos].clone();
    }
    let mut rest = original.into_iter();
    Ok(Token::tuple(
        flat.blocks
            .iter()
            .map(|&n| Token::tuple(rest.by_ref().take(n).collect()))
            .collect(),
    ))
}

fn concat(outer: &Token) -> Result<Token, SystemError> {
    let mut all = Vec::new();
    for mu in bag_of(outer)?.iter() {
        all.extend(bag_of(mu)?.iter().cloned());
    }
    Ok(Token::bag(all))
}

/// `δ : !!w → !w`, the graph of concatenation, from width `k` nested twice
/// to width `k·k`.
pub fn comultiplication(
    w: &SystemRef,
    k: usize,
    mode: BangMode,
) -> Result<SimulationStrategy, SystemError> {
    let inner: SystemRef = std::sync::Arc::new(Bang::new(w.clone(), k, mode));
    let source = Bang::new(inner, k, mode);
    let mut out = SimulationStrategy::default();
    for x in source.states() {
        let sigma = concat(&x)?;
        out.relation.insert(x.clone(), sigma.clone());
        for m in source.moves(&x)? {
            let a2 = delta_translate_action(&x, &m.action, mode)?;
            let flat = flatten(&x, &m.action, mode)?;
            let order = target_order(&flat, mode);
            for o in m.outcomes {
                let blocks = tuple_of(&o.reaction)?;
                let ds: Vec<Token> = blocks
                    .iter()
                    .map(tuple_of)
                    .collect::<Result<Vec<_>, _>>()?
                    .concat();
                let d2 = Token::tuple(order.iter().map(|&i| ds[i].clone()).collect());
                out.react
                    .insert((x.clone(), sigma.clone(), m.action.clone(), d2), o.reaction);
            }
            out.act.insert((x.clone(), sigma.clone(), m.action), a2);
        }
    }
    Ok(out)
}

/// `{(X, ΣX)}` for `X` ranging over multisets (size ≤ `outer`) of multisets
/// (size ≤ `inner`) over `base`.
fn concat_graph(base: &[Token], outer: usize, inner: usize) -> Result<Relation, SystemError> {
    let bags: Vec<Token> = multisets_up_to(base, inner)
        .into_iter()
        .map(Token::multiset)
        .collect();
    multisets_up_to(&bags, outer)
        .into_iter()
        .map(|x| {
            let x = Token::multiset(x);
            let s = concat(&x)?;
            Ok((x, s))
        })
        .collect()
}

fn within(r: Relation, keep: impl Fn(&Token, &Token) -> bool) -> Relation {
    r.into_iter().filter(|(a, b)| keep(a, b)).collect()
}

fn bag_len(t: &Token) -> usize {
    t.as_bag().map_or(usize::MAX, Multiset::len)
}

/// Outer, middle and inner sizes all at most `k`.
fn triple_nesting_within(t: &Token, k: usize) -> bool {
    t.as_bag().is_some_and(|z| {
        z.len() <= k
            && z.iter().all(|y| {
                y.as_bag()
                    .is_some_and(|y| y.len() <= k && y.iter().all(|x| bag_len(x) <= k))
            })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LawStatus {
    Holds,
    Fails {
        /// A few pairs on which the two sides differ.
        difference: Vec<(Token, Token)>,
    },
    InsufficientWidth {
        needed: usize,
        available: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub name: &'static str,
    #[serde(flatten)]
    pub status: LawStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub bound: usize,
    pub counit_simulation: bool,
    pub comultiplication_simulation: bool,
    pub laws: Vec<LawCheck>,
}

impl LawReport {
    /// Nothing failed. Insufficient width is not a failure.
    pub fn holds(&self) -> bool {
        self.counit_simulation
            && self.comultiplication_simulation
            && self
                .laws
                .iter()
                .all(|l| !matches!(l.status, LawStatus::Fails { .. }))
    }
}

const SHOWN_DIFFERENCES: usize = 8;

fn compare(lhs: &Relation, rhs: &Relation) -> LawStatus {
    let diff = lhs.symmetric_difference(rhs);
    if diff.is_empty() {
        LawStatus::Holds
    } else {
        LawStatus::Fails {
            difference: diff.into_iter().take(SHOWN_DIFFERENCES).collect(),
        }
    }
}

/// Checks the comonad structure of `!` on `w` at width `k`, with every
/// intermediate width widened to what the law needs.
pub fn check_comonad_laws(w: &SystemRef, k: usize) -> Result<LawReport, SystemError> {
    check_comonad_laws_with(w, k, None)
}

/// As [`check_comonad_laws`], but intermediate widths are capped at `width`
/// when given; laws needing more report [`LawStatus::InsufficientWidth`].
///
/// The unit and associativity laws are stated on `!S_k` with `δ` read
/// backwards (from a multiset to its decompositions).
pub fn check_comonad_laws_with(
    w: &SystemRef,
    k: usize,
    width: Option<usize>,
) -> Result<LawReport, SystemError> {
    let base = w.states();
    let bang_k = Bang::new(w.clone(), k, BangMode::Canonical);
    let singles = bang_k.states();
    let id = Relation::identity(&singles);
    let small = |_: &Token, b: &Token| bag_len(b) <= k;
    let mut laws = Vec::new();

    let mut widened =
        |name: &'static str,
         needed: usize,
         law: &dyn Fn(usize) -> Result<LawStatus, SystemError>| {
            let status = match width {
                Some(available) if available < needed => {
                    LawStatus::InsufficientWidth { needed, available }
                }
                _ => law(width.unwrap_or(needed).max(needed))?,
            };
            laws.push(LawCheck { name, status });
            Ok::<(), SystemError>(())
        };

    // ε_{!w} · δ = id
    widened("counit-left", 1, &|outer| {
        let split = within(concat_graph(&base, outer, k)?, small).converse();
        let eps: Relation = singles
            .iter()
            .map(|mu| (Token::bag(vec![mu.clone()]), mu.clone()))
            .collect();
        Ok(compare(&eps.after(&split), &id))
    })?;

    // !ε · δ = id
    widened("counit-right", k, &|outer| {
        let split = within(concat_graph(&base, outer, k)?, small).converse();
        let eps: Relation = base
            .iter()
            .map(|s| (Token::bag(vec![s.clone()]), s.clone()))
            .collect();
        Ok(compare(&bang_morphism(&eps, outer).after(&split), &id))
    })?;

    // !δ · δ = δ_{!w} · δ
    widened("coassociativity", k * k, &|outer| {
        let keep = |_: &Token, z: &Token| triple_nesting_within(z, k);
        let split = within(concat_graph(&base, k, k)?, small).converse();
        let lifted = bang_morphism(&concat_graph(&base, k, k)?.converse(), k);
        let lhs = within(lifted.after(&split), keep);
        let wide = within(concat_graph(&base, outer, k)?, small).converse();
        let bags: Vec<Token> = singles.clone();
        let regroup = concat_graph(&bags, k, k)?.converse();
        let rhs = within(regroup.after(&wide), keep);
        Ok(compare(&lhs, &rhs))
    })?;

    let r = greatest_simulation(w.as_ref(), w.as_ref())?;

    // r · ε = ε · !r
    widened("counit-naturality", 1, &|_| {
        let eps: Relation = if k == 0 {
            Relation::empty()
        } else {
            base.iter()
                .map(|s| (Token::bag(vec![s.clone()]), s.clone()))
                .collect()
        };
        Ok(compare(&r.after(&eps), &eps.after(&bang_morphism(&r, k))))
    })?;

    // δ · !!r = !r · δ
    widened("comultiplication-naturality", k * k, &|_| {
        let delta = concat_graph(&base, k, k)?;
        let lhs = delta.after(&bang_morphism(&bang_morphism(&r, k), k));
        let rhs = bang_morphism(&r, k * k).after(&delta);
        Ok(compare(&lhs, &rhs))
    })?;

    let eps = counit(w, k, BangMode::Canonical)?;
    let counit_simulation = check_simulation(&bang_k, w.as_ref(), &eps.relation)?;
    let delta = comultiplication(w, k, BangMode::Canonical)?;
    let inner: SystemRef = std::sync::Arc::new(Bang::new(w.clone(), k, BangMode::Canonical));
    let source = Bang::new(inner, k, BangMode::Canonical);
    let target = Bang::new(w.clone(), k * k, BangMode::Canonical);
    let comultiplication_simulation = check_simulation(&source, &target, &delta.relation)?;

    Ok(LawReport {
        bound: k,
        counit_simulation,
        comultiplication_simulation,
        laws,
    })
}
