use std::collections::BTreeSet;

use crate::fixtures::skip;
use crate::relation::Relation;
use crate::simulation::check_simulation;
use crate::system::{Interaction, InteractionSystem, Move, Outcome, SystemError, SystemRef};
use crate::token::Token;

use super::odometer;

pub const DEFAULT_CAP: u128 = 1_000_000;

/// `w1 ⊸ w2`: at `(s1, s2)` the Angel picks a translation `(f, G)` of every
/// action of `w1` into one of `w2` and of every answer back. The Demon picks
/// an `a1` and a reaction `d2` to `f(a1)`.
///
/// Actions are encoded as `(f, G)` with `f = {a1: a2}` and
/// `G = {a1: {d2: d1}}`; reactions as `(a1, d2)`.
#[derive(Clone)]
pub struct Lollipop {
    left: SystemRef,
    right: SystemRef,
    cap: u128,
}

impl Lollipop {
    pub fn new(left: SystemRef, right: SystemRef) -> Self {
        Lollipop::with_cap(left, right, DEFAULT_CAP)
    }

    pub fn with_cap(left: SystemRef, right: SystemRef, cap: u128) -> Self {
        Lollipop { left, right, cap }
    }
}

/// Builds the token of the action `(f, G)`.
pub fn lollipop_action(f: Vec<(Token, Token)>, g: Vec<(Token, Vec<(Token, Token)>)>) -> Token {
    Token::pair(
        Token::map(f),
        Token::map(g.into_iter().map(|(a, m)| (a, Token::map(m))).collect()),
    )
}

/// `Π_{a1} Σ_{a2} |D1(s1,a1)|^|D2(s2,a2)|`, saturating.
pub fn lollipop_action_count(left: &[Move], right: &[Move]) -> u128 {
    left.iter().fold(1u128, |acc, m1| {
        let d1 = m1.outcomes.len() as u128;
        let per: u128 = right.iter().fold(0u128, |sum, m2| {
            sum.saturating_add(saturating_pow(d1, m2.outcomes.len()))
        });
        acc.saturating_mul(per)
    })
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

/// One way of answering a fixed `a1`: the target move and, for each of its
/// outcomes, the index of the source outcome it is pulled back to.
struct Choice {
    target: usize,
    back: Vec<usize>,
}

fn choices(m1: &Move, right: &[Move]) -> Vec<Choice> {
    let mut out = Vec::new();
    for (j, m2) in right.iter().enumerate() {
        let n = m2.outcomes.len();
        if n > 0 && m1.outcomes.is_empty() {
            continue;
        }
        let mut back = vec![0usize; n];
        loop {
            out.push(Choice {
                target: j,
                back: back.clone(),
            });
            if !odometer(&mut back, |_| m1.outcomes.len()) {
                break;
            }
        }
    }
    out
}

impl Interaction for Lollipop {
    fn states(&self) -> Vec<Token> {
        let right = self.right.states();
        self.left
            .states()
            .into_iter()
            .flat_map(|a| right.iter().map(move |b| Token::pair(a.clone(), b.clone())))
            .collect()
    }

    fn has_state(&self, s: &Token) -> bool {
        s.as_pair()
            .is_some_and(|(a, b)| self.left.has_state(a) && self.right.has_state(b))
    }

    fn moves(&self, s: &Token) -> Result<Vec<Move>, SystemError> {
        let (s1, s2) = s
            .as_pair()
            .ok_or_else(|| SystemError::UnknownState(s.clone()))?;
        let left = self.left.moves(s1)?;
        let right = self.right.moves(s2)?;
        let count = lollipop_action_count(&left, &right);
        if count > self.cap {
            return Err(SystemError::SizeGuard {
                state: s.clone(),
                count,
                cap: self.cap,
            });
        }
        let per_action: Vec<Vec<Choice>> = left.iter().map(|m1| choices(m1, &right)).collect();
        let mut out = Vec::with_capacity(count as usize);
        if per_action.iter().any(|c| c.is_empty()) {
            return Ok(out);
        }
        let mut pick = vec![0usize; left.len()];
        loop {
            let mut f = Vec::with_capacity(left.len());
            let mut g = Vec::with_capacity(left.len());
            let mut outcomes = Vec::new();
            for (i, m1) in left.iter().enumerate() {
                let c = &per_action[i][pick[i]];
                let m2 = &right[c.target];
                f.push((m1.action.clone(), m2.action.clone()));
                let mut table = Vec::with_capacity(m2.outcomes.len());
                for (o2, &b) in m2.outcomes.iter().zip(&c.back) {
                    let o1 = &m1.outcomes[b];
                    table.push((o2.reaction.clone(), o1.reaction.clone()));
                    outcomes.push(Outcome {
                        reaction: Token::pair(m1.action.clone(), o2.reaction.clone()),
                        next: Token::pair(o1.next.clone(), o2.next.clone()),
                    });
                }
                g.push((m1.action.clone(), table));
            }
            out.push(Move {
                action: lollipop_action(f, g),
                outcomes,
            });
            if !odometer(&mut pick, |i| per_action[i].len()) {
                return Ok(out);
            }
        }
    }
}

pub fn lollipop(
    w1: &InteractionSystem,
    w2: &InteractionSystem,
    cap: u128,
) -> Result<InteractionSystem, SystemError> {
    let l = Lollipop::with_cap(w1.clone().into_ref(), w2.clone().into_ref(), cap);
    InteractionSystem::materialize(&l)
}

/// `{(*, s) | s ∈ x}`, a relation from `skip()`.
pub fn safety_relation(x: &BTreeSet<Token>) -> Relation {
    x.iter().map(|s| (Token::star(), s.clone())).collect()
}

/// Whether the Angel can stay inside `x` forever: `s ∈ x ⇒ ∃a ∀d. s[a/d] ∈ x`.
/// Decided as a simulation from `skip()`.
pub fn is_safety_property(w: &dyn Interaction, x: &BTreeSet<Token>) -> Result<bool, SystemError> {
    check_simulation(&skip(), w, &safety_relation(x))
}
