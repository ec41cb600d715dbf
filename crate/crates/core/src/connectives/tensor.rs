use crate::relation::Relation;
use crate::simulation::SimulationStrategy;
use crate::system::{Interaction, InteractionSystem, Move, SystemError, SystemRef};
use crate::token::Token;

use super::product_moves;

/// `w1 ⊗ w2` on `S1 × S2`: pairs of actions answered by pairs of reactions.
#[derive(Clone)]
pub struct Tensor {
    left: SystemRef,
    right: SystemRef,
}

impl Tensor {
    pub fn new(left: SystemRef, right: SystemRef) -> Self {
        Tensor { left, right }
    }
}

fn split(s: &Token) -> Result<(&Token, &Token), SystemError> {
    s.as_pair()
        .ok_or_else(|| SystemError::UnknownState(s.clone()))
}

impl Interaction for Tensor {
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
        let (a, b) = split(s)?;
        let left = self.left.moves(a)?;
        let right = self.right.moves(b)?;
        Ok(product_moves(
            &[&left, &right],
            Token::tuple,
            Token::tuple,
            Token::tuple,
        ))
    }
}

pub fn tensor(w1: &InteractionSystem, w2: &InteractionSystem) -> InteractionSystem {
    let t = Tensor::new(w1.clone().into_ref(), w2.clone().into_ref());
    InteractionSystem::materialize(&t).expect("tensor of tabulated systems is closed")
}

/// `r ⊗ r'`: `((s1, s1'), (s2, s2'))` related iff `s1 r s2` and `s1' r' s2'`.
pub fn tensor_morphism(r: &Relation, r2: &Relation) -> Relation {
    r.iter()
        .flat_map(|(a, b)| {
            r2.iter().map(move |(c, d)| {
                (
                    Token::pair(a.clone(), c.clone()),
                    Token::pair(b.clone(), d.clone()),
                )
            })
        })
        .collect()
}

/// Componentwise pairing of two strategies' witness tables.
pub fn tensor_strategy(x: &SimulationStrategy, y: &SimulationStrategy) -> SimulationStrategy {
    let mut out = SimulationStrategy {
        relation: tensor_morphism(&x.relation, &y.relation),
        ..Default::default()
    };
    for ((s1, s2, a1), a2) in &x.act {
        for ((t1, t2, b1), b2) in &y.act {
            out.act.insert(
                (
                    Token::pair(s1.clone(), t1.clone()),
                    Token::pair(s2.clone(), t2.clone()),
                    Token::pair(a1.clone(), b1.clone()),
                ),
                Token::pair(a2.clone(), b2.clone()),
            );
        }
    }
    for ((s1, s2, a1, d2), d1) in &x.react {
        for ((t1, t2, b1, e2), e1) in &y.react {
            out.react.insert(
                (
                    Token::pair(s1.clone(), t1.clone()),
                    Token::pair(s2.clone(), t2.clone()),
                    Token::pair(a1.clone(), b1.clone()),
                    Token::pair(d2.clone(), e2.clone()),
                ),
                Token::pair(d1.clone(), e1.clone()),
            );
        }
    }
    out
}

/// `{((s, *), s)}` from `w ⊗ ⊥` to `w`.
pub fn tensor_unit_right(w: &dyn Interaction) -> Relation {
    w.states()
        .into_iter()
        .map(|s| (Token::pair(s.clone(), Token::star()), s))
        .collect()
}

/// `{((a, b), (b, a))}` from `w1 ⊗ w2` to `w2 ⊗ w1`.
pub fn tensor_swap(w1: &dyn Interaction, w2: &dyn Interaction) -> Relation {
    let right = w2.states();
    w1.states()
        .into_iter()
        .flat_map(|a| {
            right.iter().map(move |b| {
                (
                    Token::pair(a.clone(), b.clone()),
                    Token::pair(b.clone(), a.clone()),
                )
            })
        })
        .collect()
}

/// `{(((a, b), c), (a, (b, c)))}` from `(w1 ⊗ w2) ⊗ w3` to `w1 ⊗ (w2 ⊗ w3)`.
pub fn tensor_assoc(w1: &dyn Interaction, w2: &dyn Interaction, w3: &dyn Interaction) -> Relation {
    let mut r = Relation::empty();
    for a in w1.states() {
        for b in w2.states() {
            for c in w3.states() {
                r.insert(
                    Token::pair(Token::pair(a.clone(), b.clone()), c.clone()),
                    Token::pair(a.clone(), Token::pair(b.clone(), c.clone())),
                );
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{skip, stack};
    use crate::simulation::check_simulation;

    #[test]
    fn skip_tensor_skip_is_trivial() {
        let t = tensor(&skip(), &skip());
        assert_eq!(t.state_count(), 1);
        let s = &t.state_list()[0];
        assert_eq!(t.actions(s).unwrap().len(), 1);
        let a = &t.actions(s).unwrap()[0];
        assert_eq!(t.reactions(s, a).unwrap().len(), 1);
    }

    #[test]
    fn stack_squared_has_nine_actions() {
        let t = tensor(&stack(1), &stack(1));
        for s in t.state_list() {
            assert_eq!(t.actions(s).unwrap().len(), 9);
        }
    }

    #[test]
    fn skip_is_a_unit_up_to_isomorphism() {
        let w = stack(1);
        let t = tensor(&w, &skip());
        let r = tensor_unit_right(&w);
        assert!(check_simulation(&t, &w, &r).unwrap());
        assert!(check_simulation(&w, &t, &r.converse()).unwrap());
    }

    #[test]
    fn empty_factor_gives_empty_morphism() {
        let id = Relation::identity(&stack(1).states());
        assert!(tensor_morphism(&Relation::empty(), &id).is_empty());
        let w = stack(1);
        let t = tensor(&w, &w);
        assert_eq!(tensor_morphism(&id, &id), Relation::identity(&t.states()));
    }
}
