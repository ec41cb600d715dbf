//! Built-in systems: the trivial ones, a bounded stack of booleans, a small
//! four-state system and seeded random systems.

use rand::Rng;

use crate::system::InteractionSystem;
use crate::token::Token;

/// `⊥`: one state, one action, one reaction.
pub fn skip() -> InteractionSystem {
    InteractionSystem::builder()
        .state(Token::star())
        .action(Token::star(), Token::star())
        .reaction(Token::star(), Token::star(), Token::star(), Token::star())
        .build()
        .expect("skip is well formed")
}

/// One state and no action: the Angel is deadlocked.
pub fn abort() -> InteractionSystem {
    InteractionSystem::builder()
        .state(Token::star())
        .build()
        .expect("abort is well formed")
}

/// One state, one action and no reaction: the Demon is deadlocked.
pub fn magic() -> InteractionSystem {
    InteractionSystem::builder()
        .state(Token::star())
        .action(Token::star(), Token::star())
        .build()
        .expect("magic is well formed")
}

pub const PUSH_TRUE: &str = "push-true";
pub const PUSH_FALSE: &str = "push-false";
pub const POP: &str = "pop";

/// Stack of booleans holding at most `capacity` values. The top is the first
/// element of the tuple. Popping the empty stack answers `error` and leaves it
/// empty. Pushing onto a full stack drops the bottom value.
pub fn stack(capacity: usize) -> InteractionSystem {
    let mut states: Vec<Vec<bool>> = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..capacity {
        let mut grown = Vec::new();
        for s in &frontier {
            for b in [true, false] {
                let mut t = vec![b];
                t.extend_from_slice(s);
                grown.push(t);
            }
        }
        states.extend(grown.iter().cloned());
        frontier = grown;
    }
    let tok = |s: &[bool]| {
        Token::tuple(
            s.iter()
                .map(|b| Token::atom(if *b { "t" } else { "f" }))
                .collect(),
        )
    };
    let ok = Token::star();
    let mut b = InteractionSystem::builder();
    for s in &states {
        b = b.state(tok(s));
    }
    for s in &states {
        let here = tok(s);
        for (name, value) in [(PUSH_TRUE, true), (PUSH_FALSE, false)] {
            b = b.action(here.clone(), name);
            let mut t = vec![value];
            t.extend_from_slice(s);
            t.truncate(capacity);
            b = b.reaction(here.clone(), name, ok.clone(), tok(&t));
        }
        b = b.action(here.clone(), POP);
        match s.split_first() {
            None => b = b.reaction(here.clone(), POP, "error", here.clone()),
            Some((_, rest)) => b = b.reaction(here.clone(), POP, ok.clone(), tok(rest)),
        }
    }
    b.initial(tok(&[])).build().expect("stack is well formed")
}

/// Four states `s1 s2 s3 t1`, one action and one reaction each
/// (`a1/d1`, `a2/d2`, `a3/d3`, `b1/e1`), cycling `s1 → s2 → s3 → t1 → s1`.
pub fn four_cycle() -> InteractionSystem {
    let rows = [
        ("s1", "a1", "d1", "s2"),
        ("s2", "a2", "d2", "s3"),
        ("s3", "a3", "d3", "t1"),
        ("t1", "b1", "e1", "s1"),
    ];
    let mut b = InteractionSystem::builder();
    for (s, ..) in rows {
        b = b.state(s);
    }
    for (s, a, d, n) in rows {
        b = b.action(s, a).reaction(s, a, d, n);
    }
    b.build().expect("four_cycle is well formed")
}

/// Looks up a fixture by its command-line name.
pub fn by_name(name: &str) -> Option<InteractionSystem> {
    match name {
        "skip" => Some(skip()),
        "abort" => Some(abort()),
        "magic" => Some(magic()),
        "stack" => Some(stack(1)),
        "stack2" => Some(stack(2)),
        "four" => Some(four_cycle()),
        _ => None,
    }
}

pub const FIXTURE_NAMES: &[&str] = &["skip", "abort", "magic", "stack", "stack2", "four"];

/// Size limits for [`random_system`].
#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_reactions: usize,
}

impl RandomShape {
    pub const SMALL: RandomShape = RandomShape {
        max_states: 3,
        max_actions: 2,
        max_reactions: 2,
    };
}

/// A random system within `shape`. Empty action and reaction sets occur with
/// probability 1/8 each so that deadlocks are exercised too.
pub fn random_system<R: Rng>(rng: &mut R, shape: RandomShape) -> InteractionSystem {
    let n = rng.gen_range(1..=shape.max_states);
    let names: Vec<Token> = (0..n).map(|i| Token::atom(format!("s{i}"))).collect();
    let mut b = InteractionSystem::builder();
    for s in &names {
        b = b.state(s.clone());
    }
    for s in &names {
        let actions = if rng.gen_ratio(1, 8) {
            0
        } else {
            rng.gen_range(1..=shape.max_actions)
        };
        for a in 0..actions {
            let action = Token::atom(format!("a{a}"));
            b = b.action(s.clone(), action.clone());
            let reactions = if rng.gen_ratio(1, 8) {
                0
            } else {
                rng.gen_range(1..=shape.max_reactions)
            };
            for d in 0..reactions {
                let next = names[rng.gen_range(0..n)].clone();
                b = b.reaction(
                    s.clone(),
                    action.clone(),
                    Token::atom(format!("d{d}")),
                    next,
                );
            }
        }
    }
    b.build().expect("random systems are well formed")
}
