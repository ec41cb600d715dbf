use std::collections::BTreeMap;

use crate::multiset::{multisets_up_to, Multiset};
use crate::relation::Relation;
use crate::system::{Interaction, InteractionSystem, Move, SystemError, SystemRef, Threads};
use crate::token::Token;

use super::{product_moves, DEFAULT_CAP};

/// How the actions of `!w` at a multiset are indexed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BangMode {
    /// One thread order per state: the sorted one. Actions are `(a1, …, an)`.
    #[default]
    Canonical,
    /// Every distinct ordering of the threads. Actions are
    /// `((s1, …, sn), (a1, …, an))`.
    Faithful,
}

/// `!w` truncated to multisets of size at most `bound`.
#[derive(Clone)]
pub struct Bang {
    inner: SystemRef,
    bound: usize,
    mode: BangMode,
    cap: u128,
}

impl Bang {
    pub fn new(inner: SystemRef, bound: usize, mode: BangMode) -> Self {
        Bang::with_cap(inner, bound, mode, DEFAULT_CAP)
    }

    /// As [`Bang::new`], refusing states with more than `cap` actions.
    pub fn with_cap(inner: SystemRef, bound: usize, mode: BangMode, cap: u128) -> Self {
        Bang {
            inner,
            bound,
            mode,
            cap,
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn mode(&self) -> BangMode {
        self.mode
    }
}

impl Interaction for Bang {
    fn states(&self) -> Vec<Token> {
        multisets_up_to(&self.inner.states(), self.bound)
            .into_iter()
            .map(Token::multiset)
            .collect()
    }

    fn has_state(&self, s: &Token) -> bool {
        s.as_bag()
            .is_some_and(|m| m.len() <= self.bound && m.iter().all(|x| self.inner.has_state(x)))
    }

    fn moves(&self, s: &Token) -> Result<Vec<Move>, SystemError> {
        let mu = s
            .as_bag()
            .filter(|m| m.len() <= self.bound)
            .ok_or_else(|| SystemError::UnknownState(s.clone()))?;
        let mut local: BTreeMap<&Token, Vec<Move>> = BTreeMap::new();
        for x in mu.distinct() {
            local.insert(x, self.inner.moves(x)?);
        }
        let reps: Vec<Vec<Token>> = match self.mode {
            BangMode::Canonical => vec![mu.as_slice().to_vec()],
            BangMode::Faithful => mu.distinct_permutations(),
        };
        let per_rep = mu
            .iter()
            .try_fold(1u128, |acc, x| acc.checked_mul(local[x].len() as u128))
            .unwrap_or(u128::MAX);
        let count = per_rep.saturating_mul(reps.len() as u128);
        if count > self.cap {
            return Err(SystemError::SizeGuard {
                state: s.clone(),
                count,
                cap: self.cap,
            });
        }
        let mut out = Vec::new();
        for rep in reps {
            let parts: Vec<&[Move]> = rep.iter().map(|x| local[x].as_slice()).collect();
            let rep_token = Token::tuple(rep.clone());
            let mode = self.mode;
            out.extend(product_moves(
                &parts,
                |acts| match mode {
                    BangMode::Canonical => Token::tuple(acts),
                    BangMode::Faithful => Token::pair(rep_token.clone(), Token::tuple(acts)),
                },
                Token::tuple,
                Token::bag,
            ));
        }
        Ok(out)
    }

    fn threads(&self, s: &Token) -> Option<Threads> {
        let mu = s.as_bag().filter(|m| m.len() <= self.bound)?;
        Some(Threads {
            system: self.inner.clone(),
            states: mu.as_slice().to_vec(),
            tagged: self.mode == BangMode::Faithful,
        })
    }
}

/// Materialized `!w` at width `k`.
pub fn bang(w: &InteractionSystem, k: usize, mode: BangMode) -> InteractionSystem {
    let b = Bang::with_cap(w.clone().into_ref(), k, mode, u128::MAX);
    InteractionSystem::materialize(&b).expect("bang preserves cardinality")
}

/// `L(w)` restricted to lists of length `n`.
#[derive(Clone)]
pub struct Multithread {
    inner: SystemRef,
    width: usize,
}

impl Multithread {
    pub fn new(inner: SystemRef, width: usize) -> Self {
        Multithread { inner, width }
    }
}

impl Interaction for Multithread {
    fn states(&self) -> Vec<Token> {
        let base = self.inner.states();
        let mut lists: Vec<Vec<Token>> = vec![vec![]];
        for _ in 0..self.width {
            lists = lists
                .into_iter()
                .flat_map(|l| {
                    base.iter().map(move |s| {
                        let mut l = l.clone();
                        l.push(s.clone());
                        l
                    })
                })
                .collect();
        }
        lists.into_iter().map(Token::tuple).collect()
    }

    fn has_state(&self, s: &Token) -> bool {
        s.as_tuple()
            .is_some_and(|xs| xs.len() == self.width && xs.iter().all(|x| self.inner.has_state(x)))
    }

    fn moves(&self, s: &Token) -> Result<Vec<Move>, SystemError> {
        let xs = s
            .as_tuple()
            .filter(|xs| xs.len() == self.width)
            .ok_or_else(|| SystemError::UnknownState(s.clone()))?;
        let local: Vec<Vec<Move>> = xs
            .iter()
            .map(|x| self.inner.moves(x))
            .collect::<Result<_, _>>()?;
        let parts: Vec<&[Move]> = local.iter().map(Vec::as_slice).collect();
        Ok(product_moves(
            &parts,
            Token::tuple,
            Token::tuple,
            Token::tuple,
        ))
    }
}

pub fn multithread(w: &InteractionSystem, n: usize) -> InteractionSystem {
    let m = Multithread::new(w.clone().into_ref(), n);
    InteractionSystem::materialize(&m).expect("multithreading is closed")
}

/// `!r`: equal-size multisets (at most `k`) that can be paired element-wise in `r`.
pub fn bang_morphism(r: &Relation, k: usize) -> Relation {
    let pairs: Vec<(Token, Token)> = r.iter().cloned().collect();
    multisets_up_to(&pairs, k)
        .into_iter()
        .map(|m| {
            let (left, right): (Vec<Token>, Vec<Token>) = m.into_vec().into_iter().unzip();
            (
                Token::multiset(Multiset::from_list(left)),
                Token::multiset(Multiset::from_list(right)),
            )
        })
        .collect()
}
