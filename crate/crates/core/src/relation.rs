//! Relations between the state sets of two systems.

use std::collections::{BTreeMap, BTreeSet};

use crate::system::{Interaction, SystemError};
use crate::token::Token;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pairs: BTreeSet<(Token, Token)>,
}

impl Relation {
    pub fn empty() -> Self {
        Relation::default()
    }

    pub fn identity(states: &[Token]) -> Self {
        states.iter().map(|s| (s.clone(), s.clone())).collect()
    }

    pub fn total(left: &[Token], right: &[Token]) -> Self {
        left.iter()
            .flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn insert(&mut self, a: Token, b: Token) -> bool {
        self.pairs.insert((a, b))
    }

    pub fn contains(&self, a: &Token, b: &Token) -> bool {
        // BTreeSet lookup needs an owned pair
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Token, Token)> {
        self.pairs.iter()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn converse(&self) -> Relation {
        self.pairs
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect()
    }

    /// `self · first`: pairs `(a, c)` with `(a, b) ∈ first` and `(b, c) ∈ self`.
    pub fn after(&self, first: &Relation) -> Relation {
        let mut by_left: BTreeMap<&Token, Vec<&Token>> = BTreeMap::new();
        for (b, c) in &self.pairs {
            by_left.entry(b).or_default().push(c);
        }
        let mut out = Relation::empty();
        for (a, b) in &first.pairs {
            if let Some(cs) = by_left.get(b) {
                for c in cs {
                    out.insert(a.clone(), (*c).clone());
                }
            }
        }
        out
    }

    /// Elements related to `a`, in order.
    pub fn image(&self, a: &Token) -> Vec<&Token> {
        self.pairs
            .iter()
            .filter(|(x, _)| x == a)
            .map(|(_, b)| b)
            .collect()
    }

    pub fn symmetric_difference(&self, other: &Relation) -> Vec<(Token, Token)> {
        self.pairs
            .symmetric_difference(&other.pairs)
            .cloned()
            .collect()
    }

    /// Checks that every pair lies in `S1 × S2`.
    pub fn validate(
        &self,
        left: &dyn Interaction,
        right: &dyn Interaction,
    ) -> Result<(), SystemError> {
        for (a, b) in &self.pairs {
            if !left.has_state(a) {
                return Err(SystemError::UnknownState(a.clone()));
            }
            if !right.has_state(b) {
                return Err(SystemError::UnknownState(b.clone()));
            }
        }
        Ok(())
    }
}

impl FromIterator<(Token, Token)> for Relation {
    fn from_iter<I: IntoIterator<Item = (Token, Token)>>(iter: I) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for Relation {
    type Item = (Token, Token);
    type IntoIter = std::collections::btree_set::IntoIter<(Token, Token)>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.into_iter()
    }
}

impl<'a> IntoIterator for &'a Relation {
    type Item = &'a (Token, Token);
    type IntoIter = std::collections::btree_set::Iter<'a, (Token, Token)>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// Set union of relations. The union of no relations is empty.
pub fn union(relations: &[Relation]) -> Relation {
    relations.iter().flat_map(|r| r.iter().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(pairs: &[(&str, &str)]) -> Relation {
        pairs
            .iter()
            .map(|(a, b)| (Token::atom(*a), Token::atom(*b)))
            .collect()
    }

    #[test]
    fn composition_follows_middle_states() {
        let r1 = rel(&[("a", "x"), ("b", "y")]);
        let r2 = rel(&[("x", "1"), ("x", "2"), ("z", "3")]);
        assert_eq!(r2.after(&r1), rel(&[("a", "1"), ("a", "2")]));
    }

    #[test]
    fn identity_is_a_unit() {
        let states: Vec<Token> = vec!["a".into(), "b".into()];
        let r = rel(&[("a", "b"), ("b", "b")]);
        let id = Relation::identity(&states);
        assert_eq!(r.after(&id), r);
        assert_eq!(id.after(&r), r);
    }

    #[test]
    fn union_is_idempotent_with_empty_unit() {
        let r = rel(&[("a", "b")]);
        assert_eq!(union(&[]), Relation::empty());
        assert_eq!(union(&[r.clone(), r.clone()]), r);
    }
}
