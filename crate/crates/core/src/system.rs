//! Interaction systems: states, Angel actions, Demon reactions and the
//! next-state map `s[a/d]`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::token::Token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("unknown state {0}")]
    UnknownState(Token),
    #[error("unknown action {action} at state {state}")]
    UnknownAction { state: Token, action: Token },
    #[error("unknown reaction {reaction} to action {action} at state {state}")]
    UnknownReaction {
        state: Token,
        action: Token,
        reaction: Token,
    },
    #[error("duplicate {what} {token}")]
    Duplicate { what: &'static str, token: Token },
    #[error("missing {what} for {at}")]
    Missing { what: &'static str, at: String },
    #[error("state {state} has {count} actions, above the cap of {cap}")]
    SizeGuard {
        state: Token,
        count: u128,
        cap: u128,
    },
    #[error("{0}")]
    Invalid(String),
}

/// One reaction to an action together with the state it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub reaction: Token,
    pub next: Token,
}

/// One Angel action at a state, with every Demon reaction to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub action: Token,
    pub outcomes: Vec<Outcome>,
}

/// Anything that behaves like an interaction system.
///
/// Composite systems (tensor, linear arrow, exponential) implement this lazily
/// so that only the states actually visited are ever expanded.
pub trait Interaction {
    /// All states, in declared order.
    fn states(&self) -> Vec<Token>;

    fn has_state(&self, s: &Token) -> bool;

    /// The local game at `s`: actions in declared order, each with its reactions.
    fn moves(&self, s: &Token) -> Result<Vec<Move>, SystemError>;

    /// When `s` is a bag of independent threads of another system (as in
    /// `!w`), those threads. Lets checks avoid expanding the product game.
    fn threads(&self, _s: &Token) -> Option<Threads> {
        None
    }
}

/// The threads of a state, each a state of `system`. Actions of the whole are
/// the tuple of thread actions in this order, paired with the tuple of
/// thread states when `tagged`; reactions are tuples; next states are bags.
pub struct Threads {
    pub system: SystemRef,
    pub states: Vec<Token>,
    pub tagged: bool,
}

pub type SystemRef = Arc<dyn Interaction + Send + Sync>;

/// An explicitly tabulated finite interaction system.
#[derive(Clone, Debug)]
pub struct InteractionSystem {
    states: Vec<Token>,
    index: HashMap<Token, usize>,
    actions: Vec<Vec<Token>>,
    reactions: Vec<Vec<Vec<Token>>>,
    next: Vec<Vec<Vec<usize>>>,
    initial: Option<Token>,
}

impl PartialEq for InteractionSystem {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.actions == other.actions
            && self.reactions == other.reactions
            && self.next == other.next
            && self.initial == other.initial
    }
}

impl Eq for InteractionSystem {}

impl InteractionSystem {
    pub fn builder() -> SystemBuilder {
        SystemBuilder::default()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_list(&self) -> &[Token] {
        &self.states
    }

    pub fn initial(&self) -> Option<&Token> {
        self.initial.as_ref()
    }

    pub fn with_initial(mut self, initial: Option<Token>) -> Result<Self, SystemError> {
        if let Some(s) = &initial {
            if !self.index.contains_key(s) {
                return Err(SystemError::UnknownState(s.clone()));
            }
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn state_index(&self, s: &Token) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn idx(&self, s: &Token) -> Result<usize, SystemError> {
        self.state_index(s)
            .ok_or_else(|| SystemError::UnknownState(s.clone()))
    }

    pub fn actions(&self, s: &Token) -> Result<&[Token], SystemError> {
        Ok(&self.actions[self.idx(s)?])
    }

    fn action_index(&self, si: usize, a: &Token) -> Result<usize, SystemError> {
        self.actions[si]
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| SystemError::UnknownAction {
                state: self.states[si].clone(),
                action: a.clone(),
            })
    }

    pub fn reactions(&self, s: &Token, a: &Token) -> Result<&[Token], SystemError> {
        let si = self.idx(s)?;
        let ai = self.action_index(si, a)?;
        Ok(&self.reactions[si][ai])
    }

    /// `s[a/d]`.
    pub fn next(&self, s: &Token, a: &Token, d: &Token) -> Result<&Token, SystemError> {
        let si = self.idx(s)?;
        let ai = self.action_index(si, a)?;
        let di = self.reactions[si][ai]
            .iter()
            .position(|x| x == d)
            .ok_or_else(|| SystemError::UnknownReaction {
                state: s.clone(),
                action: a.clone(),
                reaction: d.clone(),
            })?;
        Ok(&self.states[self.next[si][ai][di]])
    }

    /// Tabulates any [`Interaction`] by expanding every state.
    pub fn materialize(w: &dyn Interaction) -> Result<InteractionSystem, SystemError> {
        let mut b = SystemBuilder::default();
        let states = w.states();
        for s in &states {
            b = b.state(s.clone());
        }
        for s in &states {
            for m in w.moves(s)? {
                b = b.action(s.clone(), m.action.clone());
                for o in m.outcomes {
                    b = b.reaction(s.clone(), m.action.clone(), o.reaction, o.next);
                }
            }
        }
        b.build()
    }

    pub fn into_ref(self) -> SystemRef {
        Arc::new(self)
    }
}

impl Interaction for InteractionSystem {
    fn states(&self) -> Vec<Token> {
        self.states.clone()
    }

    fn has_state(&self, s: &Token) -> bool {
        self.index.contains_key(s)
    }

    fn moves(&self, s: &Token) -> Result<Vec<Move>, SystemError> {
        let si = self.idx(s)?;
        Ok(self.actions[si]
            .iter()
            .enumerate()
            .map(|(ai, a)| Move {
                action: a.clone(),
                outcomes: self.reactions[si][ai]
                    .iter()
                    .zip(&self.next[si][ai])
                    .map(|(d, &n)| Outcome {
                        reaction: d.clone(),
                        next: self.states[n].clone(),
                    })
                    .collect(),
            })
            .collect())
    }
}

/// Incremental construction of an [`InteractionSystem`]; `build` validates
/// uniqueness and closure.
#[derive(Default, Clone, Debug)]
pub struct SystemBuilder {
    states: Vec<Token>,
    actions: Vec<(Token, Token)>,
    reactions: Vec<(Token, Token, Token, Token)>,
    initial: Option<Token>,
}

impl SystemBuilder {
    pub fn state(mut self, s: impl Into<Token>) -> Self {
        self.states.push(s.into());
        self
    }

    pub fn action(mut self, s: impl Into<Token>, a: impl Into<Token>) -> Self {
        self.actions.push((s.into(), a.into()));
        self
    }

    /// Adds reaction `d` to action `a` at `s`, leading to `next`.
    pub fn reaction(
        mut self,
        s: impl Into<Token>,
        a: impl Into<Token>,
        d: impl Into<Token>,
        next: impl Into<Token>,
    ) -> Self {
        self.reactions
            .push((s.into(), a.into(), d.into(), next.into()));
        self
    }

    pub fn initial(mut self, s: impl Into<Token>) -> Self {
        self.initial = Some(s.into());
        self
    }

    pub fn build(self) -> Result<InteractionSystem, SystemError> {
        let mut index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(SystemError::Duplicate {
                    what: "state",
                    token: s.clone(),
                });
            }
        }
        let n = self.states.len();
        let mut actions: Vec<Vec<Token>> = vec![Vec::new(); n];
        let mut seen_actions: HashSet<(usize, Token)> = HashSet::new();
        for (s, a) in &self.actions {
            let si = *index
                .get(s)
                .ok_or_else(|| SystemError::UnknownState(s.clone()))?;
            if !seen_actions.insert((si, a.clone())) {
                return Err(SystemError::Duplicate {
                    what: "action",
                    token: a.clone(),
                });
            }
            actions[si].push(a.clone());
        }
        let mut reactions: Vec<Vec<Vec<Token>>> = actions
            .iter()
            .map(|acts| vec![Vec::new(); acts.len()])
            .collect();
        let mut next: Vec<Vec<Vec<usize>>> = actions
            .iter()
            .map(|acts| vec![Vec::new(); acts.len()])
            .collect();
        for (s, a, d, t) in &self.reactions {
            let si = *index
                .get(s)
                .ok_or_else(|| SystemError::UnknownState(s.clone()))?;
            let ai = actions[si].iter().position(|x| x == a).ok_or_else(|| {
                SystemError::UnknownAction {
                    state: s.clone(),
                    action: a.clone(),
                }
            })?;
            if reactions[si][ai].contains(d) {
                return Err(SystemError::Duplicate {
                    what: "reaction",
                    token: d.clone(),
                });
            }
            let ti = *index
                .get(t)
                .ok_or_else(|| SystemError::UnknownState(t.clone()))?;
            reactions[si][ai].push(d.clone());
            next[si][ai].push(ti);
        }
        if let Some(s) = &self.initial {
            if !index.contains_key(s) {
                return Err(SystemError::UnknownState(s.clone()));
            }
        }
        Ok(InteractionSystem {
            states: self.states,
            index,
            actions,
            reactions,
            next,
            initial: self.initial,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dangling_next_state() {
        let err = InteractionSystem::builder()
            .state("s")
            .action("s", "a")
            .reaction("s", "a", "d", "t")
            .build()
            .unwrap_err();
        assert_eq!(err, SystemError::UnknownState("t".into()));
    }

    #[test]
    fn rejects_duplicates() {
        let err = InteractionSystem::builder().state("s").state("s").build();
        assert!(matches!(
            err,
            Err(SystemError::Duplicate { what: "state", .. })
        ));
        let err = InteractionSystem::builder()
            .state("s")
            .action("s", "a")
            .action("s", "a")
            .build();
        assert!(matches!(
            err,
            Err(SystemError::Duplicate { what: "action", .. })
        ));
    }

    #[test]
    fn empty_action_and_reaction_sets_are_allowed() {
        let w = InteractionSystem::builder()
            .state("s")
            .state("t")
            .action("t", "a")
            .build()
            .unwrap();
        assert!(w.actions(&"s".into()).unwrap().is_empty());
        assert!(w.reactions(&"t".into(), &"a".into()).unwrap().is_empty());
    }

    #[test]
    fn materialize_roundtrips_explicit_systems() {
        let w = InteractionSystem::builder()
            .state("s")
            .state("t")
            .action("s", "a")
            .reaction("s", "a", "d", "t")
            .reaction("s", "a", "e", "s")
            .action("t", "b")
            .build()
            .unwrap();
        assert_eq!(InteractionSystem::materialize(&w).unwrap(), w);
        assert_eq!(
            w.next(&"s".into(), &"a".into(), &"d".into()).unwrap(),
            &Token::atom("t")
        );
    }
}
