use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::relation::Relation;
use crate::simulation::SimulationStrategy;
use crate::system::{Interaction, InteractionSystem};
use crate::token::Token;

/// On-disk form of an interaction system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub states: Vec<Token>,
    pub actions: BTreeMap<Token, Vec<Token>>,
    pub reactions: BTreeMap<Token, BTreeMap<Token, Vec<Token>>>,
    pub next: BTreeMap<Token, BTreeMap<Token, BTreeMap<Token, Token>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Token>,
}

impl SystemFile {
    pub fn from_system(w: &InteractionSystem) -> Self {
        let mut file = SystemFile {
            states: w.state_list().to_vec(),
            actions: BTreeMap::new(),
            reactions: BTreeMap::new(),
            next: BTreeMap::new(),
            initial: w.initial().cloned(),
        };
        for s in w.state_list() {
            let moves = w.moves(s).expect("listed state");
            file.actions
                .insert(s.clone(), moves.iter().map(|m| m.action.clone()).collect());
            let reactions = file.reactions.entry(s.clone()).or_default();
            let next = file.next.entry(s.clone()).or_default();
            for m in moves {
                reactions.insert(
                    m.action.clone(),
                    m.outcomes.iter().map(|o| o.reaction.clone()).collect(),
                );
                next.insert(
                    m.action,
                    m.outcomes
                        .into_iter()
                        .map(|o| (o.reaction, o.next))
                        .collect(),
                );
            }
        }
        file
    }

    /// Validates the cross references between the four tables.
    pub fn to_system(&self) -> Result<InteractionSystem, String> {
        let known = |s: &Token, table: &str| {
            if self.states.contains(s) {
                Ok(())
            } else {
                Err(format!("{table}: `{s}` is not a listed state"))
            }
        };
        for s in self.actions.keys() {
            known(s, "actions")?;
        }
        for (s, by_action) in &self.reactions {
            known(s, "reactions")?;
            let acts = self.actions.get(s).map(Vec::as_slice).unwrap_or(&[]);
            for a in by_action.keys() {
                if !acts.contains(a) {
                    return Err(format!("reactions[{s}]: `{a}` is not an action of `{s}`"));
                }
            }
        }
        for (s, by_action) in &self.next {
            known(s, "next")?;
            for (a, by_reaction) in by_action {
                let ds = self.reactions.get(s).and_then(|m| m.get(a));
                for (d, n) in by_reaction {
                    if !ds.is_some_and(|ds| ds.contains(d)) {
                        return Err(format!("next[{s}][{a}]: `{d}` is not a reaction to `{a}`"));
                    }
                    if !self.states.contains(n) {
                        return Err(format!("next[{s}][{a}][{d}]: `{n}` is not a listed state"));
                    }
                }
            }
        }
        let mut b = InteractionSystem::builder();
        for s in &self.states {
            b = b.state(s.clone());
        }
        for (s, acts) in &self.actions {
            for a in acts {
                b = b.action(s.clone(), a.clone());
                for d in self
                    .reactions
                    .get(s)
                    .and_then(|m| m.get(a))
                    .into_iter()
                    .flatten()
                {
                    let n = self
                        .next
                        .get(s)
                        .and_then(|m| m.get(a))
                        .and_then(|m| m.get(d))
                        .ok_or_else(|| format!("next[{s}][{a}][{d}] is missing"))?;
                    b = b.reaction(s.clone(), a.clone(), d.clone(), n.clone());
                }
            }
        }
        if let Some(i) = &self.initial {
            b = b.initial(i.clone());
        }
        b.build().map_err(|e| e.to_string())
    }
}

/// A relation on disk: a list of `[left, right]` pairs.
pub type RelationFile = Vec<(Token, Token)>;

pub fn relation_from_file(pairs: RelationFile) -> Relation {
    pairs.into_iter().collect()
}

pub fn relation_to_file(r: &Relation) -> RelationFile {
    r.iter().cloned().collect()
}

/// A strategy as printed: the relation and both translation tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub relation: RelationFile,
    /// `[s1, s2, a1, a2]`
    pub act: Vec<(Token, Token, Token, Token)>,
    /// `[s1, s2, a1, d2, d1]`
    pub react: Vec<(Token, Token, Token, Token, Token)>,
}

impl From<&SimulationStrategy> for StrategyFile {
    fn from(x: &SimulationStrategy) -> Self {
        StrategyFile {
            relation: relation_to_file(&x.relation),
            act: x
                .act
                .iter()
                .map(|((s1, s2, a1), a2)| (s1.clone(), s2.clone(), a1.clone(), a2.clone()))
                .collect(),
            react: x
                .react
                .iter()
                .map(|((s1, s2, a1, d2), d1)| {
                    (s1.clone(), s2.clone(), a1.clone(), d2.clone(), d1.clone())
                })
                .collect(),
        }
    }
}

impl From<StrategyFile> for SimulationStrategy {
    fn from(f: StrategyFile) -> Self {
        SimulationStrategy {
            relation: relation_from_file(f.relation),
            act: f
                .act
                .into_iter()
                .map(|(s1, s2, a1, a2)| ((s1, s2, a1), a2))
                .collect(),
            react: f
                .react
                .into_iter()
                .map(|(s1, s2, a1, d2, d1)| ((s1, s2, a1, d2), d1))
                .collect(),
        }
    }
}
