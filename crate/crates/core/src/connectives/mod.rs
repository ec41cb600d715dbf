//! Multiplicative-exponential connectives on interaction systems.
//!
//! Composite systems are lazy: [`Tensor`], [`Lollipop`], [`Multithread`] and
//! [`Bang`] implement [`Interaction`] by expanding their components on
//! demand. The free functions ([`tensor`], [`lollipop`], [`bang`], …) return
//! tabulated [`InteractionSystem`]s.

mod adjunction;
mod bang;
mod comonad;
mod lollipop;
mod tensor;

pub use adjunction::{curry, uncurry};
pub use bang::{bang, bang_morphism, multithread, Bang, BangMode, Multithread};
pub use comonad::{
    check_comonad_laws, check_comonad_laws_with, comultiplication, counit, delta_translate_action,
    delta_translate_reaction, LawCheck, LawReport, LawStatus,
};
pub use lollipop::{
    is_safety_property, lollipop, lollipop_action, lollipop_action_count, safety_relation,
    Lollipop, DEFAULT_CAP,
};
pub use tensor::{
    tensor, tensor_assoc, tensor_morphism, tensor_strategy, tensor_swap, tensor_unit_right, Tensor,
};

pub use crate::fixtures::{abort, magic, skip};

use crate::system::{Move, Outcome};
use crate::token::Token;

/// Synchronous product of local games: one action from each part, then one
/// reaction to each. `wrap_*` build the composite tokens.
pub(crate) fn product_moves(
    parts: &[&[Move]],
    wrap_action: impl Fn(Vec<Token>) -> Token,
    wrap_reaction: impl Fn(Vec<Token>) -> Token,
    wrap_next: impl Fn(Vec<Token>) -> Token,
) -> Vec<Move> {
    let mut out = Vec::new();
    if parts.iter().any(|p| p.is_empty()) {
        return out;
    }
    let mut combo = vec![0usize; parts.len()];
    loop {
        let chosen: Vec<&Move> = combo
            .iter()
            .enumerate()
            .map(|(i, &c)| &parts[i][c])
            .collect();
        let action = wrap_action(chosen.iter().map(|m| m.action.clone()).collect());
        let mut outcomes = Vec::new();
        if chosen.iter().all(|m| !m.outcomes.is_empty()) {
            let mut reply = vec![0usize; chosen.len()];
            loop {
                let picked: Vec<&Outcome> = reply
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| &chosen[i].outcomes[r])
                    .collect();
                outcomes.push(Outcome {
                    reaction: wrap_reaction(picked.iter().map(|o| o.reaction.clone()).collect()),
                    next: wrap_next(picked.iter().map(|o| o.next.clone()).collect()),
                });
                if !odometer(&mut reply, |i| chosen[i].outcomes.len()) {
                    break;
                }
            }
        }
        out.push(Move { action, outcomes });
        if !odometer(&mut combo, |i| parts[i].len()) {
            return out;
        }
    }
}

pub(crate) fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// `r` is a bijection whose graph and converse are both simulations.
pub fn is_isomorphism(
    w1: &dyn crate::system::Interaction,
    w2: &dyn crate::system::Interaction,
    r: &crate::relation::Relation,
) -> Result<bool, crate::system::SystemError> {
    use crate::relation::Relation;
    let back = r.converse();
    Ok(back.after(r) == Relation::identity(&w1.states())
        && r.after(&back) == Relation::identity(&w2.states())
        && crate::simulation::check_simulation(w1, w2, r)?
        && crate::simulation::check_simulation(w2, w1, &back)?)
}
