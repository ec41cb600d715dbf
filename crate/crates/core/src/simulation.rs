//! Simulations between interaction systems.
//!
//! A relation `r ⊆ S1 × S2` is a simulation when every related pair satisfies
//! `∀a1 ∃a2 ∀d2 ∃d1. (s1[a1/d1], s2[a2/d2]) ∈ r`. Everything here is decided by
//! exhaustive enumeration of the finite local games.
//!
//! The search engine accepts a source given as a list of factors whose tensor
//! product is the real source system. The product is explored index-wise,
//! which keeps checks against `!Γ ⊗ !ω1 ⊗ …` affordable without ever building
//! the tensor.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

mod factored;

use crate::relation::Relation;
use crate::system::{Interaction, SystemError};
use crate::token::{nest_tensor, Token};

/// First failing `(s1, s2, a1)`: no action at `s2` simulates `a1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub source: Token,
    pub target: Token,
    pub action: Token,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.source, self.target, self.action)
    }
}

/// A simulation together with its constructive content: for each related
/// pair, the translation of actions forward and of reactions backward.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationStrategy {
    pub relation: Relation,
    /// `(s1, s2, a1) ↦ a2`
    pub act: BTreeMap<(Token, Token, Token), Token>,
    /// `(s1, s2, a1, d2) ↦ d1`
    pub react: BTreeMap<(Token, Token, Token, Token), Token>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("no action translation for ({0}, {1}, {2})")]
    MissingAct(Token, Token, Token),
    #[error("translated action {3} is not available at {1} (from ({0}, {1}, {2}))")]
    BadAct(Token, Token, Token, Token),
    #[error("no reaction translation for ({0}, {1}, {2}, {3})")]
    MissingReact(Token, Token, Token, Token),
    #[error("translated reaction {4} is not a reaction to {2} at {0} (from {3})")]
    BadReact(Token, Token, Token, Token, Token),
    #[error("successor pair ({0}, {1}) left the relation")]
    NotClosed(Token, Token),
    #[error("strategies do not compose: {0}")]
    Mismatch(String),
}

pub enum Synthesis {
    Strategy(SimulationStrategy),
    Counterexample(Counterexample),
}

impl Synthesis {
    pub fn strategy(self) -> Option<SimulationStrategy> {
        match self {
            Synthesis::Strategy(s) => Some(s),
            Synthesis::Counterexample(_) => None,
        }
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Synthesis::Strategy(_) => None,
            Synthesis::Counterexample(c) => Some(c),
        }
    }
}

pub fn check_simulation(
    w1: &dyn Interaction,
    w2: &dyn Interaction,
    r: &Relation,
) -> Result<bool, SystemError> {
    Ok(find_violation(w1, w2, r)?.is_none())
}

/// The first violation in relation order, if any.
pub fn find_violation(
    w1: &dyn Interaction,
    w2: &dyn Interaction,
    r: &Relation,
) -> Result<Option<Counterexample>, SystemError> {
    r.validate(w1, w2)?;
    let pairs = single_factor_pairs(r);
    let mut engine = Engine::new(&[w1], w2, &pairs);
    for p in 0..pairs.len() {
        if let Err(combo) = engine.solve_pair(p, &mut |_| {})? {
            return Ok(Some(engine.counterexample(p, &combo)));
        }
    }
    Ok(None)
}

/// Skolemizes the simulation condition: least working `a2`, least working `d1`.
pub fn synthesize_strategy(
    w1: &dyn Interaction,
    w2: &dyn Interaction,
    r: &Relation,
) -> Result<Synthesis, SystemError> {
    r.validate(w1, w2)?;
    let pairs = single_factor_pairs(r);
    let mut engine = Engine::new(&[w1], w2, &pairs);
    let mut strategy = SimulationStrategy {
        relation: r.clone(),
        ..Default::default()
    };
    for p in 0..pairs.len() {
        let mut found = Vec::new();
        if let Err(combo) = engine.solve_pair(p, &mut |w| found.push(w))? {
            return Ok(Synthesis::Counterexample(engine.counterexample(p, &combo)));
        }
        for w in found {
            engine.record(p, &w, &mut strategy);
        }
    }
    Ok(Synthesis::Strategy(strategy))
}

/// One refinement pass: keeps exactly the pairs of `r` satisfying the
/// simulation condition relative to `r`.
pub fn refine_once(
    w1: &dyn Interaction,
    w2: &dyn Interaction,
    r: &Relation,
) -> Result<Relation, SystemError> {
    let pairs = single_factor_pairs(r);
    let mut engine = Engine::new(&[w1], w2, &pairs);
    let mut kept = Relation::empty();
    for (p, (src, tgt)) in pairs.iter().enumerate() {
        if engine.solve_pair(p, &mut |_| {})?.is_ok() {
            kept.insert(src[0].clone(), tgt.clone());
        }
    }
    Ok(kept)
}

/// The largest simulation, by deleting violating pairs from `S1 × S2` until stable.
pub fn greatest_simulation(
    w1: &dyn Interaction,
    w2: &dyn Interaction,
) -> Result<Relation, SystemError> {
    let pairs = single_factor_pairs(&Relation::total(&w1.states(), &w2.states()));
    let mut engine = Engine::new(&[w1], w2, &pairs);
    let mut alive: Vec<bool> = vec![true; pairs.len()];
    loop {
        let mut removed = Vec::new();
        for p in 0..pairs.len() {
            if alive[p] && engine.solve_pair(p, &mut |_| {})?.is_err() {
                removed.push(p);
            }
        }
        if removed.is_empty() {
            break;
        }
        for p in removed {
            alive[p] = false;
            engine.forget(p);
        }
    }
    Ok(pairs
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|((mut src, tgt), _)| (src.remove(0), tgt))
        .collect())
}

/// Result of a check whose source is a tensor of several factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactoredOutcome {
    /// Holds; `witnesses` counts the action translations a strategy needs.
    Holds {
        witnesses: usize,
    },
    Fails(Counterexample),
}

/// Checks that `pairs` (states of `sources[0] ⊗ … ⊗ sources[n-1]` paired with
/// target states) form a simulation. Reported tokens use the left-nested
/// tensor layout of [`nest_tensor`].
pub fn check_factored(
    sources: &[&dyn Interaction],
    target: &dyn Interaction,
    pairs: &[(Vec<Token>, Token)],
) -> Result<FactoredOutcome, SystemError> {
    for (src, tgt) in pairs {
        if src.len() != sources.len() {
            return Err(SystemError::Invalid(format!(
                "expected {} source components, got {}",
                sources.len(),
                src.len()
            )));
        }
        for (w, s) in sources.iter().zip(src) {
            if !w.has_state(s) {
                return Err(SystemError::UnknownState(s.clone()));
            }
        }
        if !target.has_state(tgt) {
            return Err(SystemError::UnknownState(tgt.clone()));
        }
    }
    let mut sorted: Vec<(Vec<Token>, Token)> = pairs.to_vec();
    sorted.sort_by(|a, b| {
        nest_tensor(a.0.clone())
            .cmp(&nest_tensor(b.0.clone()))
            .then_with(|| a.1.cmp(&b.1))
    });
    sorted.dedup();
    factored::check(sources, target, &sorted)
}

fn single_factor_pairs(r: &Relation) -> Vec<(Vec<Token>, Token)> {
    r.iter()
        .map(|(a, b)| (vec![a.clone()], b.clone()))
        .collect()
}

const NONE: u32 = u32::MAX;

struct LocalMove {
    action: Token,
    reactions: Vec<Token>,
    next: Vec<u32>,
}

struct Side<'a> {
    system: &'a dyn Interaction,
    ids: HashMap<Token, u32>,
    cache: HashMap<u32, Rc<Vec<LocalMove>>>,
}

impl<'a> Side<'a> {
    fn new(system: &'a dyn Interaction) -> Self {
        Side {
            system,
            ids: HashMap::new(),
            cache: HashMap::new(),
        }
    }

    fn intern(&mut self, s: &Token) -> u32 {
        let n = self.ids.len() as u32;
        *self.ids.entry(s.clone()).or_insert(n)
    }

    fn local(&mut self, id: u32, s: &Token) -> Result<Rc<Vec<LocalMove>>, SystemError> {
        if let Some(m) = self.cache.get(&id) {
            return Ok(m.clone());
        }
        let moves: Vec<LocalMove> = self
            .system
            .moves(s)?
            .into_iter()
            .map(|m| {
                let (reactions, next) = m
                    .outcomes
                    .into_iter()
                    .map(|o| (o.reaction, self.ids.get(&o.next).copied().unwrap_or(NONE)))
                    .unzip();
                LocalMove {
                    action: m.action,
                    reactions,
                    next,
                }
            })
            .collect();
        let rc = Rc::new(moves);
        self.cache.insert(id, rc.clone());
        Ok(rc)
    }
}

/// Witness for one source action at one pair: which target move, and for each
/// of its reactions, which source reaction (one index per factor).
struct Witness {
    combo: Vec<usize>,
    target_move: usize,
    replies: Vec<Vec<usize>>,
}

struct Engine<'a> {
    sources: Vec<Side<'a>>,
    target: Side<'a>,
    pairs: Vec<(Vec<Token>, Token)>,
    keys: Vec<Vec<u32>>,
    related: HashSet<Box<[u32]>>,
}

impl<'a> Engine<'a> {
    fn new(
        sources: &[&'a dyn Interaction],
        target: &'a dyn Interaction,
        pairs: &[(Vec<Token>, Token)],
    ) -> Self {
        let mut src_sides: Vec<Side<'a>> = sources.iter().map(|w| Side::new(*w)).collect();
        let mut tgt_side = Side::new(target);
        let mut keys = Vec::with_capacity(pairs.len());
        let mut related = HashSet::with_capacity(pairs.len());
        for (src, tgt) in pairs {
            let mut key: Vec<u32> = src
                .iter()
                .zip(src_sides.iter_mut())
                .map(|(s, side)| side.intern(s))
                .collect();
            key.push(tgt_side.intern(tgt));
            related.insert(key.clone().into_boxed_slice());
            keys.push(key);
        }
        Engine {
            sources: src_sides,
            target: tgt_side,
            pairs: pairs.to_vec(),
            keys,
            related,
        }
    }

    fn forget(&mut self, p: usize) {
        self.related.remove(&self.keys[p][..]);
    }

    fn locals(
        &mut self,
        p: usize,
    ) -> Result<(Vec<Rc<Vec<LocalMove>>>, Rc<Vec<LocalMove>>), SystemError> {
        let key = self.keys[p].clone();
        let (src, tgt) = &self.pairs[p];
        let mut src_moves = Vec::with_capacity(src.len());
        for (i, s) in src.iter().enumerate() {
            src_moves.push(self.sources[i].local(key[i], s)?);
        }
        let tgt_moves = self.target.local(key[src.len()], tgt)?;
        Ok((src_moves, tgt_moves))
    }

    /// Decides one pair. `Err(combo)` is the first source action with no answer.
    fn solve_pair(
        &mut self,
        p: usize,
        on_witness: &mut dyn FnMut(Witness),
    ) -> Result<Result<(), Vec<usize>>, SystemError> {
        let (src_moves, tgt_moves) = self.locals(p)?;
        let n = src_moves.len();
        if src_moves.iter().any(|m| m.is_empty()) {
            return Ok(Ok(()));
        }
        let mut combo = vec![0usize; n];
        let mut key = vec![0u32; n + 1];
        let mut reply = vec![0usize; n];
        loop {
            let mut answered = None;
            'target: for (j, tm) in tgt_moves.iter().enumerate() {
                let mut replies = Vec::with_capacity(tm.next.len());
                for &tn in &tm.next {
                    if tn == NONE {
                        continue 'target;
                    }
                    key[n] = tn;
                    if !self.find_reply(&src_moves, &combo, &mut key, &mut reply) {
                        continue 'target;
                    }
                    replies.push(reply.clone());
                }
                answered = Some((j, replies));
                break;
            }
            match answered {
                None => return Ok(Err(combo)),
                Some((target_move, replies)) => on_witness(Witness {
                    combo: combo.clone(),
                    target_move,
                    replies,
                }),
            }
            if !advance(&mut combo, |i| src_moves[i].len()) {
                return Ok(Ok(()));
            }
        }
    }

    /// `∃ d1` over the product of the chosen source moves' reactions.
    fn find_reply(
        &self,
        src_moves: &[Rc<Vec<LocalMove>>],
        combo: &[usize],
        key: &mut [u32],
        reply: &mut [usize],
    ) -> bool {
        let n = combo.len();
        let chosen: Vec<&LocalMove> = (0..n).map(|i| &src_moves[i][combo[i]]).collect();
        if chosen.iter().any(|m| m.next.is_empty()) {
            return false;
        }
        reply.iter_mut().for_each(|r| *r = 0);
        loop {
            let mut known = true;
            for i in 0..n {
                let id = chosen[i].next[reply[i]];
                if id == NONE {
                    known = false;
                    break;
                }
                key[i] = id;
            }
            if known && self.related.contains(&key[..]) {
                return true;
            }
            if !advance(reply, |i| chosen[i].next.len()) {
                return false;
            }
        }
    }

    fn compose_source(&mut self, p: usize, combo: &[usize]) -> Result<Token, SystemError> {
        let (src_moves, _) = self.locals(p)?;
        Ok(nest_tensor(
            combo
                .iter()
                .enumerate()
                .map(|(i, &c)| src_moves[i][c].action.clone())
                .collect(),
        ))
    }

    fn counterexample(&mut self, p: usize, combo: &[usize]) -> Counterexample {
        let action = self
            .compose_source(p, combo)
            .expect("local games were expanded during the search");
        Counterexample {
            source: nest_tensor(self.pairs[p].0.clone()),
            target: self.pairs[p].1.clone(),
            action,
        }
    }

    fn record(&mut self, p: usize, w: &Witness, strategy: &mut SimulationStrategy) {
        let (src_moves, tgt_moves) = self.locals(p).expect("expanded during the search");
        let s1 = nest_tensor(self.pairs[p].0.clone());
        let s2 = self.pairs[p].1.clone();
        let a1 = nest_tensor(
            w.combo
                .iter()
                .enumerate()
                .map(|(i, &c)| src_moves[i][c].action.clone())
                .collect(),
        );
        let tm = &tgt_moves[w.target_move];
        strategy
            .act
            .insert((s1.clone(), s2.clone(), a1.clone()), tm.action.clone());
        for (t, reply) in w.replies.iter().enumerate() {
            let d1 = nest_tensor(
                reply
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| src_moves[i][w.combo[i]].reactions[r].clone())
                    .collect(),
            );
            strategy.react.insert(
                (s1.clone(), s2.clone(), a1.clone(), tm.reactions[t].clone()),
                d1,
            );
        }
    }
}

/// Odometer step, last position fastest. Returns false after the last tuple.
fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

impl SimulationStrategy {
    /// The copycat strategy on `w`: identity relation, actions and reactions
    /// passed through unchanged.
    pub fn copycat(w: &dyn Interaction) -> Result<SimulationStrategy, SystemError> {
        let mut strategy = SimulationStrategy::default();
        for s in w.states() {
            strategy.relation.insert(s.clone(), s.clone());
            for m in w.moves(&s)? {
                strategy
                    .act
                    .insert((s.clone(), s.clone(), m.action.clone()), m.action.clone());
                for o in m.outcomes {
                    strategy.react.insert(
                        (s.clone(), s.clone(), m.action.clone(), o.reaction.clone()),
                        o.reaction,
                    );
                }
            }
        }
        Ok(strategy)
    }

    pub fn act(&self, s1: &Token, s2: &Token, a1: &Token) -> Option<&Token> {
        self.act.get(&(s1.clone(), s2.clone(), a1.clone()))
    }

    pub fn react(&self, s1: &Token, s2: &Token, a1: &Token, d2: &Token) -> Option<&Token> {
        self.react
            .get(&(s1.clone(), s2.clone(), a1.clone(), d2.clone()))
    }

    /// Re-checks totality, membership and closure of the witness tables.
    pub fn verify(&self, w1: &dyn Interaction, w2: &dyn Interaction) -> Result<(), StrategyError> {
        self.relation.validate(w1, w2)?;
        for (s1, s2) in &self.relation {
            let moves2 = w2.moves(s2)?;
            for m1 in w1.moves(s1)? {
                let a1 = &m1.action;
                let a2 = self
                    .act(s1, s2, a1)
                    .ok_or_else(|| StrategyError::MissingAct(s1.clone(), s2.clone(), a1.clone()))?;
                let m2 = moves2.iter().find(|m| &m.action == a2).ok_or_else(|| {
                    StrategyError::BadAct(s1.clone(), s2.clone(), a1.clone(), a2.clone())
                })?;
                for o2 in &m2.outcomes {
                    let d1 = self.react(s1, s2, a1, &o2.reaction).ok_or_else(|| {
                        StrategyError::MissingReact(
                            s1.clone(),
                            s2.clone(),
                            a1.clone(),
                            o2.reaction.clone(),
                        )
                    })?;
                    let o1 = m1
                        .outcomes
                        .iter()
                        .find(|o| &o.reaction == d1)
                        .ok_or_else(|| {
                            StrategyError::BadReact(
                                s1.clone(),
                                s2.clone(),
                                a1.clone(),
                                o2.reaction.clone(),
                                d1.clone(),
                            )
                        })?;
                    if !self.relation.contains(&o1.next, &o2.next) {
                        return Err(StrategyError::NotClosed(o1.next.clone(), o2.next.clone()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `second · first`: translate actions through `first` then `second`, and
/// reactions back through `second` then `first`. When several middle states
/// connect a pair, the least one supplies the witness.
pub fn compose(
    second: &SimulationStrategy,
    first: &SimulationStrategy,
) -> Result<SimulationStrategy, StrategyError> {
    let mut middles: BTreeMap<(&Token, &Token), &Token> = BTreeMap::new();
    let mut by_middle: BTreeMap<&Token, Vec<&Token>> = BTreeMap::new();
    for (s2, s3) in &second.relation {
        by_middle.entry(s2).or_default().push(s3);
    }
    for (s1, s2) in &first.relation {
        for s3 in by_middle.get(s2).into_iter().flatten() {
            middles.entry((s1, *s3)).or_insert(s2);
        }
    }

    let mut out = SimulationStrategy {
        relation: second.relation.after(&first.relation),
        ..Default::default()
    };
    for ((s1, s3), s2) in middles {
        for ((t1, t2, a1), a2) in first.act.range((s1.clone(), s2.clone(), min_token())..) {
            if t1 != s1 || t2 != s2 {
                break;
            }
            let a3 = second.act(s2, s3, a2).ok_or_else(|| {
                StrategyError::Mismatch(format!("no translation of {a2} at ({s2}, {s3})"))
            })?;
            out.act
                .insert((s1.clone(), s3.clone(), a1.clone()), a3.clone());
            for ((u2, u3, b2, d3), d2) in second
                .react
                .range((s2.clone(), s3.clone(), a2.clone(), min_token())..)
            {
                if u2 != s2 || u3 != s3 || b2 != a2 {
                    break;
                }
                let d1 = first.react(s1, s2, a1, d2).ok_or_else(|| {
                    StrategyError::Mismatch(format!("no back-translation of {d2} at ({s1}, {s2})"))
                })?;
                out.react
                    .insert((s1.clone(), s3.clone(), a1.clone(), d3.clone()), d1.clone());
            }
        }
    }
    Ok(out)
}

/// Smallest token in the derived order, used as a range lower bound.
fn min_token() -> Token {
    Token::atom("")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn empty_relation_is_always_a_simulation() {
        let w = fixtures::stack(1);
        assert!(check_simulation(&w, &fixtures::magic(), &Relation::empty()).unwrap());
    }

    #[test]
    fn magic_cannot_be_simulated_by_skip() {
        let r: Relation = [(Token::star(), Token::star())].into_iter().collect();
        let cex = find_violation(&fixtures::magic(), &fixtures::skip(), &r)
            .unwrap()
            .unwrap();
        assert_eq!(cex.to_string(), "(*, *, *)");
    }

    #[test]
    fn abort_simulates_vacuously() {
        let w = fixtures::stack(1);
        let r = Relation::total(&[Token::star()], &w.states());
        assert!(check_simulation(&fixtures::abort(), &w, &r).unwrap());
    }

    #[test]
    fn validation_rejects_foreign_states() {
        let r: Relation = [(Token::atom("nope"), Token::star())].into_iter().collect();
        assert!(matches!(
            check_simulation(&fixtures::skip(), &fixtures::skip(), &r),
            Err(SystemError::UnknownState(_))
        ));
    }

    #[test]
    fn identity_synthesizes_copycat() {
        let w = fixtures::stack(1);
        let id = Relation::identity(&w.states());
        let s = synthesize_strategy(&w, &w, &id)
            .unwrap()
            .strategy()
            .unwrap();
        assert_eq!(s, SimulationStrategy::copycat(&w).unwrap());
        s.verify(&w, &w).unwrap();
    }

    #[test]
    fn greatest_simulation_examples() {
        let w = fixtures::stack(1);
        assert_eq!(
            greatest_simulation(&fixtures::abort(), &w).unwrap(),
            Relation::total(&[Token::star()], &w.states())
        );
        assert!(greatest_simulation(&fixtures::magic(), &fixtures::skip())
            .unwrap()
            .is_empty());
        assert!(Relation::identity(&w.states()).is_subset(&greatest_simulation(&w, &w).unwrap()));
    }

    #[test]
    fn verify_detects_broken_tables() {
        let w = fixtures::stack(1);
        let mut s = SimulationStrategy::copycat(&w).unwrap();
        let key = s.act.keys().next().unwrap().clone();
        s.act.remove(&key);
        assert!(matches!(
            s.verify(&w, &w),
            Err(StrategyError::MissingAct(..))
        ));
    }
}
