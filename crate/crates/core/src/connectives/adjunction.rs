use crate::relation::Relation;
use crate::simulation::{SimulationStrategy, StrategyError};
use crate::system::{Interaction, SystemRef};
use crate::token::Token;

use super::lollipop::{lollipop_action, Lollipop};
use super::tensor::Tensor;

fn missing(what: &str, at: String) -> StrategyError {
    StrategyError::Mismatch(format!("{what} {at}"))
}

/// Transports a strategy `w1 ⊗ w2 → w3` to `w1 → (w2 ⊸ w3)`.
///
/// At `(s1, (s2, s3))` and `a1`, the translation `(f, G)` is read off the
/// input with `a1` held fixed: `f(a2)` is the image of `(a1, a2)` and
/// `G_{a2}(d3)` the second half of the answer to `d3`.
pub fn curry(
    r: &SimulationStrategy,
    w1: &SystemRef,
    w2: &SystemRef,
    w3: &SystemRef,
    cap: u128,
) -> Result<SimulationStrategy, StrategyError> {
    let source = Tensor::new(w1.clone(), w2.clone());
    r.verify(&source, w3.as_ref())?;
    let target = Lollipop::with_cap(w2.clone(), w3.clone(), cap);
    let mut out = SimulationStrategy::default();
    for (s12, s3) in &r.relation {
        let (s1, s2) = s12
            .as_pair()
            .ok_or_else(|| missing("not a tensor state:", s12.to_string()))?;
        let s23 = Token::pair(s2.clone(), s3.clone());
        // rejects oversized function spaces before any table is built
        target.moves(&s23)?;
        out.relation.insert(s1.clone(), s23.clone());
        let moves2 = w2.moves(s2)?;
        let moves3 = w3.moves(s3)?;
        for m1 in w1.moves(s1)? {
            let a1 = &m1.action;
            let mut f = Vec::with_capacity(moves2.len());
            let mut g = Vec::with_capacity(moves2.len());
            let mut back = Vec::new();
            for m2 in &moves2 {
                let a12 = Token::pair(a1.clone(), m2.action.clone());
                let a3 = r
                    .act(s12, s3, &a12)
                    .ok_or_else(|| missing("no action for", format!("({s12}, {s3}, {a12})")))?;
                let m3 = moves3
                    .iter()
                    .find(|m| &m.action == a3)
                    .ok_or_else(|| missing("unknown target action", a3.to_string()))?;
                let mut table = Vec::with_capacity(m3.outcomes.len());
                for o3 in &m3.outcomes {
                    let d12 = r.react(s12, s3, &a12, &o3.reaction).ok_or_else(|| {
                        missing(
                            "no reaction for",
                            format!("({s12}, {s3}, {a12}, {})", o3.reaction),
                        )
                    })?;
                    let (d1, d2) = d12
                        .as_pair()
                        .ok_or_else(|| missing("not a tensor reaction:", d12.to_string()))?;
                    table.push((o3.reaction.clone(), d2.clone()));
                    back.push((
                        Token::pair(m2.action.clone(), o3.reaction.clone()),
                        d1.clone(),
                    ));
                }
                f.push((m2.action.clone(), a3.clone()));
                g.push((m2.action.clone(), table));
            }
            let action = lollipop_action(f, g);
            for (reaction, d1) in back {
                out.react
                    .insert((s1.clone(), s23.clone(), a1.clone(), reaction), d1);
            }
            out.act
                .insert((s1.clone(), s23.clone(), a1.clone()), action);
        }
    }
    Ok(out)
}

/// Transports a strategy `w1 → (w2 ⊸ w3)` back to `w1 ⊗ w2 → w3` by
/// evaluating the chosen `(f, G)`.
pub fn uncurry(
    r: &SimulationStrategy,
    w1: &SystemRef,
    w2: &SystemRef,
    w3: &SystemRef,
    cap: u128,
) -> Result<SimulationStrategy, StrategyError> {
    let target = Lollipop::with_cap(w2.clone(), w3.clone(), cap);
    r.verify(w1.as_ref(), &target)?;
    let mut out = SimulationStrategy {
        relation: Relation::empty(),
        ..Default::default()
    };
    for (s1, s23) in &r.relation {
        let (s2, s3) = s23
            .as_pair()
            .ok_or_else(|| missing("not an arrow state:", s23.to_string()))?;
        let s12 = Token::pair(s1.clone(), s2.clone());
        out.relation.insert(s12.clone(), s3.clone());
        let moves2 = w2.moves(s2)?;
        let moves3 = w3.moves(s3)?;
        for m1 in w1.moves(s1)? {
            let a1 = &m1.action;
            let fg = r
                .act(s1, s23, a1)
                .ok_or_else(|| missing("no action for", format!("({s1}, {s23}, {a1})")))?;
            let (f, g) = fg
                .as_pair()
                .ok_or_else(|| missing("not an arrow action:", fg.to_string()))?;
            for m2 in &moves2 {
                let a2 = &m2.action;
                let a3 = f
                    .lookup(a2)
                    .ok_or_else(|| missing("translation misses", a2.to_string()))?;
                let g2 = g
                    .lookup(a2)
                    .ok_or_else(|| missing("back-translation misses", a2.to_string()))?;
                let a12 = Token::pair(a1.clone(), a2.clone());
                out.act
                    .insert((s12.clone(), s3.clone(), a12.clone()), a3.clone());
                let m3 = moves3
                    .iter()
                    .find(|m| &m.action == a3)
                    .ok_or_else(|| missing("unknown target action", a3.to_string()))?;
                for o3 in &m3.outcomes {
                    let d3 = &o3.reaction;
                    let d1 = r
                        .react(s1, s23, a1, &Token::pair(a2.clone(), d3.clone()))
                        .ok_or_else(|| missing("no reaction for", format!("({a2}, {d3})")))?;
                    let d2 = g2
                        .lookup(d3)
                        .ok_or_else(|| missing("back-translation misses", d3.to_string()))?;
                    out.react.insert(
                        (s12.clone(), s3.clone(), a12.clone(), d3.clone()),
                        Token::pair(d1.clone(), d2.clone()),
                    );
                }
            }
        }
    }
    Ok(out)
}
