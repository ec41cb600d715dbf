//! The factored check, thread by thread.
//!
//! Each source factor at a related state is split into independent threads
//! (one per element when the factor is a `!`). The universally chosen source
//! action is then picked one thread at a time. After each pick only some
//! related pairs can still be reached, and that set of survivors is all the
//! rest of the search depends on, so results are cached on it.
//!
//! Thread actions are grouped by the successors they can lead to among the
//! states occurring in the relation; a group whose successors include those
//! of another group is never harder to answer and is skipped.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::system::{Interaction, SystemError, SystemRef};
use crate::token::{nest_tensor, Token};

use super::{Counterexample, FactoredOutcome};

/// The local game of one thread state, with successors as element ids.
struct RawGame {
    actions: Vec<Token>,
    next: Vec<Vec<u32>>,
}

/// Thread actions with the same relevant successors.
struct Group {
    next: Vec<u32>,
    action: usize,
}

enum Layout {
    /// The factor state itself is the only thread.
    Whole,
    /// A bag of threads.
    Bag,
}

struct Factor<'a> {
    system: &'a dyn Interaction,
    layout: Layout,
    /// Element tokens occurring in the relation.
    elems: HashMap<Token, u32>,
    /// Sorted element ids to state id, and back.
    states: HashMap<Vec<u32>, u32>,
    contents: Vec<Vec<u32>>,
    games: HashMap<Token, Rc<RawGame>>,
}

struct Thread {
    factor: usize,
    system: Option<SystemRef>,
    state: Token,
}

fn subset(small: &[u32], large: &[u32]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

impl Factor<'_> {
    fn intern_elem(&mut self, t: &Token) -> u32 {
        let n = self.elems.len() as u32;
        *self.elems.entry(t.clone()).or_insert(n)
    }

    fn intern_state(&mut self, mut ids: Vec<u32>) -> u32 {
        ids.sort_unstable();
        if let Some(&id) = self.states.get(&ids) {
            return id;
        }
        let id = self.contents.len() as u32;
        self.states.insert(ids.clone(), id);
        self.contents.push(ids);
        id
    }

    fn game(&mut self, thread: &Thread) -> Result<Rc<RawGame>, SystemError> {
        if let Some(g) = self.games.get(&thread.state) {
            return Ok(g.clone());
        }
        let moves = match &thread.system {
            Some(w) => w.moves(&thread.state)?,
            None => self.system.moves(&thread.state)?,
        };
        let mut actions = Vec::with_capacity(moves.len());
        let mut next = Vec::with_capacity(moves.len());
        for m in moves {
            let mut ids: Vec<u32> = m
                .outcomes
                .iter()
                .filter_map(|o| self.elems.get(&o.next).copied())
                .collect();
            ids.sort_unstable();
            ids.dedup();
            actions.push(m.action);
            next.push(ids);
        }
        let game = Rc::new(RawGame { actions, next });
        self.games.insert(thread.state.clone(), game.clone());
        Ok(game)
    }
}

/// The ⊆-minimal successor sets among a thread's actions, restricted to
/// `relevant`, in order of first occurrence.
fn groups(game: &RawGame, relevant: &BTreeSet<u32>) -> Vec<Group> {
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(game.next.len());
    let mut all: Vec<Group> = Vec::new();
    for (action, next) in game.next.iter().enumerate() {
        let next: Vec<u32> = next
            .iter()
            .copied()
            .filter(|e| relevant.contains(e))
            .collect();
        if seen.insert(next.clone()) {
            all.push(Group { next, action });
        }
    }
    let mut by_size: Vec<usize> = (0..all.len()).collect();
    by_size.sort_by_key(|&i| all[i].next.len());
    let mut minimal: Vec<usize> = Vec::new();
    for i in by_size {
        let size = all[i].next.len();
        if !minimal
            .iter()
            .take_while(|&&j| all[j].next.len() < size)
            .any(|&j| subset(&all[j].next, &all[i].next))
        {
            minimal.push(i);
        }
    }
    minimal.sort_unstable();
    let mut slots: Vec<Option<Group>> = all.into_iter().map(Some).collect();
    minimal
        .into_iter()
        .map(|i| slots[i].take().expect("kept once"))
        .collect()
}

pub(super) fn check(
    sources: &[&dyn Interaction],
    target: &dyn Interaction,
    pairs: &[(Vec<Token>, Token)],
) -> Result<FactoredOutcome, SystemError> {
    let mut factors: Vec<Factor> = sources
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let bag = pairs
                .first()
                .is_some_and(|(src, _)| w.threads(&src[i]).is_some());
            Factor {
                system: *w,
                layout: if bag { Layout::Bag } else { Layout::Whole },
                elems: HashMap::new(),
                states: HashMap::new(),
                contents: Vec::new(),
                games: HashMap::new(),
            }
        })
        .collect();
    let mut targets: HashMap<Token, u32> = HashMap::new();
    let mut by_target: HashMap<u32, Vec<Vec<u32>>> = HashMap::new();
    let mut split: Vec<Vec<Thread>> = Vec::with_capacity(pairs.len());
    for (src, tgt) in pairs {
        let mut key = Vec::with_capacity(src.len());
        let mut threads = Vec::new();
        for (i, (f, s)) in factors.iter_mut().zip(src).enumerate() {
            let ids: Vec<u32> = match f.layout {
                Layout::Whole => {
                    threads.push(Thread {
                        factor: i,
                        system: None,
                        state: s.clone(),
                    });
                    vec![f.intern_elem(s)]
                }
                Layout::Bag => {
                    let th = f.system.threads(s).ok_or_else(|| {
                        SystemError::Invalid(format!("{s} does not split into threads"))
                    })?;
                    let ids = th.states.iter().map(|x| f.intern_elem(x)).collect();
                    threads.extend(th.states.into_iter().map(|state| Thread {
                        factor: i,
                        system: Some(th.system.clone()),
                        state,
                    }));
                    ids
                }
            };
            key.push(f.intern_state(ids));
        }
        let n = targets.len() as u32;
        let tn = *targets.entry(tgt.clone()).or_insert(n);
        by_target.entry(tn).or_default().push(key);
        split.push(threads);
    }

    let mut witnesses = 0usize;
    let mut cache = GroupCache::new();
    for (p, threads) in split.iter().enumerate() {
        let raw: Vec<Rc<RawGame>> = threads
            .iter()
            .map(|t| factors[t.factor].game(t))
            .collect::<Result<_, _>>()?;
        if raw.iter().any(|g| g.actions.is_empty()) {
            continue;
        }
        witnesses = raw
            .iter()
            .fold(1usize, |acc, g| acc.saturating_mul(g.actions.len()))
            .saturating_add(witnesses);
        let search = Search::new(&factors, threads, &raw, target, &pairs[p].1, &targets, &by_target, &mut cache)?;
        if let Some(path) = search.run() {
            let action = search.action(&factors, &pairs[p].0, &raw, &path);
            return Ok(FactoredOutcome::Fails(Counterexample {
                source: nest_tensor(pairs[p].0.clone()),
                target: pairs[p].1.clone(),
                action,
            }));
        }
    }
    Ok(FactoredOutcome::Holds { witnesses })
}

/// A related pair still reachable, with the elements of the current factor
/// not yet matched to a thread.
type Item = (u32, Vec<u32>);

type GroupCache = HashMap<(usize, Token, BTreeSet<u32>), Rc<Vec<Group>>>;

struct Search<'s> {
    threads: &'s [Thread],
    /// Elements of each candidate, per factor.
    candidates: Vec<Vec<&'s [u32]>>,
    /// Local target index of each candidate.
    candidate_target: Vec<usize>,
    /// Per target move, the local indices of its successors, or `None` when
    /// one of them is related to nothing.
    target_moves: Vec<Option<Vec<usize>>>,
    groups: Vec<Rc<Vec<Group>>>,
    /// Per thread index, answers keyed by the surviving items.
    memo: Vec<std::cell::RefCell<HashMap<Vec<Item>, bool>>>,
}

impl<'s> Search<'s> {
    fn new(
        factors: &'s [Factor<'_>],
        threads: &'s [Thread],
        raw: &[Rc<RawGame>],
        target: &dyn Interaction,
        at: &Token,
        targets: &HashMap<Token, u32>,
        by_target: &'s HashMap<u32, Vec<Vec<u32>>>,
        cache: &mut GroupCache,
    ) -> Result<Self, SystemError> {
        let mut counts = vec![0usize; factors.len()];
        for t in threads {
            counts[t.factor] += 1;
        }
        let mut local: Vec<u32> = Vec::new();
        let mut target_moves = Vec::new();
        for m in target.moves(at)? {
            let mut idx = Vec::with_capacity(m.outcomes.len());
            let mut known = true;
            for o in &m.outcomes {
                match targets.get(&o.next) {
                    Some(&tn) if by_target.contains_key(&tn) => {
                        let i = local.iter().position(|&x| x == tn).unwrap_or_else(|| {
                            local.push(tn);
                            local.len() - 1
                        });
                        idx.push(i);
                    }
                    _ => known = false,
                }
            }
            target_moves.push(known.then_some(idx));
        }
        let mut candidates = Vec::new();
        let mut candidate_target = Vec::new();
        let mut relevant: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); factors.len()];
        for (li, tn) in local.iter().enumerate() {
            for key in &by_target[tn] {
                let elems: Vec<&[u32]> = key
                    .iter()
                    .zip(factors)
                    .map(|(&s, f)| f.contents[s as usize].as_slice())
                    .collect();
                if elems.iter().zip(&counts).all(|(e, &c)| e.len() == c) {
                    for (i, e) in elems.iter().enumerate() {
                        relevant[i].extend(e.iter().copied());
                    }
                    candidates.push(elems);
                    candidate_target.push(li);
                }
            }
        }
        let groups = threads
            .iter()
            .zip(raw)
            .map(|(t, g)| {
                let key = (t.factor, t.state.clone(), relevant[t.factor].clone());
                cache
                    .entry(key)
                    .or_insert_with(|| Rc::new(groups(g, &relevant[t.factor])))
                    .clone()
            })
            .collect();
        Ok(Search {
            threads,
            candidates,
            candidate_target,
            target_moves,
            groups,
            memo: (0..threads.len()).map(|_| Default::default()).collect(),
        })
    }

    fn first_of_factor(&self, t: usize) -> bool {
        t == 0 || self.threads[t - 1].factor != self.threads[t].factor
    }

    /// Some target move has every successor still reachable.
    fn answerable(&self, items: &[Item]) -> bool {
        let mut alive = vec![false; self.target_moves.len().max(1)];
        let mut reached: HashSet<usize> = HashSet::new();
        for (c, _) in items {
            reached.insert(self.candidate_target[*c as usize]);
        }
        for (j, m) in self.target_moves.iter().enumerate() {
            if let Some(next) = m {
                alive[j] = next.iter().all(|i| reached.contains(i));
            }
        }
        alive.iter().any(|&a| a)
    }

    fn step(&self, t: usize, items: &[Item], group: &Group) -> Vec<Item> {
        let factor = self.threads[t].factor;
        let fresh = self.first_of_factor(t);
        let mut out: BTreeSet<Item> = BTreeSet::new();
        let mut start: Vec<Item> = Vec::new();
        let items: &[Item] = if fresh {
            start.extend(
                items
                    .iter()
                    .map(|(c, _)| (*c, self.candidates[*c as usize][factor].to_vec())),
            );
            &start
        } else {
            items
        };
        for (c, rest) in items {
            let mut last = None;
            for (k, e) in rest.iter().enumerate() {
                if last == Some(e) || group.next.binary_search(e).is_err() {
                    last = Some(e);
                    continue;
                }
                last = Some(e);
                let mut r = rest.clone();
                r.remove(k);
                out.insert((*c, r));
            }
        }
        out.into_iter().collect()
    }

    fn holds(&self, t: usize, items: Vec<Item>) -> bool {
        if !self.answerable(&items) {
            return false;
        }
        if t == self.threads.len() {
            return true;
        }
        if let Some(&r) = self.memo[t].borrow().get(&items) {
            return r;
        }
        let r = self.groups[t]
            .iter()
            .all(|g| self.holds(t + 1, self.step(t, &items, g)));
        self.memo[t].borrow_mut().insert(items, r);
        r
    }

    fn start(&self) -> Vec<Item> {
        (0..self.candidates.len() as u32)
            .map(|c| (c, Vec::new()))
            .collect()
    }

    /// The groups picked by a source action nothing answers, if there is one.
    fn run(&self) -> Option<Vec<usize>> {
        let mut items = self.start();
        if self.holds(0, items.clone()) {
            return None;
        }
        let mut path = Vec::with_capacity(self.threads.len());
        for t in 0..self.threads.len() {
            if !self.answerable(&items) {
                path.push(0);
                continue;
            }
            let (g, next) = self.groups[t]
                .iter()
                .enumerate()
                .map(|(g, group)| (g, self.step(t, &items, group)))
                .find(|(_, next)| !self.holds(t + 1, next.clone()))
                .expect("a failing branch exists below a failing node");
            path.push(g);
            items = next;
        }
        Some(path)
    }

    fn action(
        &self,
        factors: &[Factor<'_>],
        source: &[Token],
        raw: &[Rc<RawGame>],
        path: &[usize],
    ) -> Token {
        let mut actions = Vec::with_capacity(factors.len());
        let mut t = 0;
        for (i, f) in factors.iter().enumerate() {
            let mut states = Vec::new();
            let mut acts = Vec::new();
            while t < self.threads.len() && self.threads[t].factor == i {
                let g = &self.groups[t][path[t]];
                states.push(self.threads[t].state.clone());
                acts.push(raw[t].actions[g.action].clone());
                t += 1;
            }
            actions.push(match f.layout {
                Layout::Whole => acts.pop().expect("one thread"),
                Layout::Bag => {
                    let tagged = f.system.threads(&source[i]).is_some_and(|th| th.tagged);
                    if tagged {
                        Token::pair(Token::tuple(states), Token::tuple(acts))
                    } else {
                        Token::tuple(acts)
                    }
                }
            });
        }
        nest_tensor(actions)
    }
}
