//! Unvalidated game descriptions and the line-oriented text format.
//!
//! A [`GameSpec`] is what generators and the parser produce; it is turned into
//! an immutable [`GameTree`](super::GameTree) by [`build_game`](super::build_game).
//!
//! # Text format
//!
//! One record per line, whitespace separated. Blank lines and lines starting
//! with `#` are ignored. Node ids are arbitrary non-negative integers.
//!
//! ```text
//! node     <id> <p1|p2> [<label1> <label2>]
//! chance   <id> <prob> <prob> ...
//! terminal <id> <u1> [<u2>]
//! edge     <parent> <action-label> <child>
//! ```
//!
//! * `node` declares a decision node. `label1` / `label2` name the infoset of
//!   the node in player 1's and player 2's partition; histories sharing a
//!   label are indistinguishable to that player. When the labels are omitted
//!   the node gets a private label for both players (perfect information).
//! * `chance` lists the outcome probabilities in the order its edges appear.
//! * `terminal` gives player 1's payoff; an optional `u2` is checked to be
//!   `-u1`.
//! * `edge` records are ordered: the n-th edge out of a parent is action n.
//!
//! The root is the unique node without an incoming edge.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::Player;

/// Index of a node inside a [`GameSpec`].
pub type SpecId = usize;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SpecKind {
    Decision {
        player: Player,
        labels: Option<[u32; 2]>,
    },
    Chance {
        probs: Vec<f64>,
    },
    Terminal {
        u1: f64,
        u2: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SpecNode {
    pub(crate) external_id: u64,
    pub(crate) kind: SpecKind,
    pub(crate) children: Vec<(u32, SpecId)>,
    pub(crate) parents: u32,
}

/// A finite game description prior to validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GameSpec {
    pub(crate) nodes: Vec<SpecNode>,
    pub(crate) strings: Vec<String>,
    intern: HashMap<String, u32>,
}

impl GameSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.intern.get(s) {
            return id;
        }
        let id = self.strings.len() as u32;
        self.strings.push(s.to_owned());
        self.intern.insert(s.to_owned(), id);
        id
    }

    fn push(&mut self, kind: SpecKind) -> SpecId {
        let id = self.nodes.len();
        self.nodes.push(SpecNode {
            external_id: id as u64,
            kind,
            children: Vec::new(),
            parents: 0,
        });
        id
    }

    /// Adds a decision node with one infoset label per player.
    pub fn add_decision(&mut self, player: Player, labels: [&str; 2]) -> SpecId {
        let labels = [self.intern(labels[0]), self.intern(labels[1])];
        self.push(SpecKind::Decision {
            player,
            labels: Some(labels),
        })
    }

    /// Adds a decision node that both players observe perfectly.
    pub fn add_perfect_decision(&mut self, player: Player) -> SpecId {
        self.push(SpecKind::Decision {
            player,
            labels: None,
        })
    }

    /// Adds a chance node; `probs[k]` belongs to the k-th edge added from it.
    pub fn add_chance(&mut self, probs: Vec<f64>) -> SpecId {
        self.push(SpecKind::Chance { probs })
    }

    /// Adds a terminal with player 1's payoff (player 2 receives the negation).
    pub fn add_terminal(&mut self, u1: f64) -> SpecId {
        self.push(SpecKind::Terminal { u1, u2: None })
    }

    /// Adds a terminal with both payoffs; validation rejects `u1 + u2 != 0`.
    pub fn add_terminal_pair(&mut self, u1: f64, u2: f64) -> SpecId {
        self.push(SpecKind::Terminal { u1, u2: Some(u2) })
    }

    /// Appends `child` as the next action of `parent`.
    pub fn add_edge(&mut self, parent: SpecId, label: &str, child: SpecId) {
        let label = self.intern(label);
        self.nodes[parent].children.push((label, child));
        self.nodes[child].parents += 1;
    }

    /// Parses the text format described in the module documentation.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = GameSpec::new();
        let mut by_id: HashMap<u64, SpecId> = HashMap::new();
        let mut edges: Vec<(usize, u64, String, u64)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let perr = |reason: &str| Error::Parse {
                line,
                reason: reason.to_owned(),
            };
            let parse_id = |s: &str| s.parse::<u64>().map_err(|_| perr("bad node id"));
            let parse_f = |s: &str| s.parse::<f64>().map_err(|_| perr("bad number"));

            let kind = fields[0];
            if kind == "edge" {
                if fields.len() != 4 {
                    return Err(perr("edge needs <parent> <label> <child>"));
                }
                edges.push((
                    line,
                    parse_id(fields[1])?,
                    fields[2].to_owned(),
                    parse_id(fields[3])?,
                ));
                continue;
            }
            if fields.len() < 2 {
                return Err(perr("missing node id"));
            }
            let ext = parse_id(fields[1])?;
            let id = match kind {
                "node" => {
                    let player = match fields.get(2) {
                        Some(&"p1") => Player::One,
                        Some(&"p2") => Player::Two,
                        _ => return Err(perr("actor must be p1 or p2")),
                    };
                    match fields.len() {
                        3 => spec.add_perfect_decision(player),
                        5 => spec.add_decision(player, [fields[3], fields[4]]),
                        _ => return Err(perr("node takes either zero or two infoset labels")),
                    }
                }
                "chance" => {
                    let probs = fields[2..]
                        .iter()
                        .map(|s| parse_f(s))
                        .collect::<Result<Vec<_>>>()?;
                    if probs.is_empty() {
                        return Err(perr("chance node needs probabilities"));
                    }
                    spec.add_chance(probs)
                }
                "terminal" => match fields.len() {
                    3 => spec.add_terminal(parse_f(fields[2])?),
                    4 => spec.add_terminal_pair(parse_f(fields[2])?, parse_f(fields[3])?),
                    _ => return Err(perr("terminal takes u1 and optional u2")),
                },
                other => return Err(perr(&format!("unknown record `{other}`"))),
            };
            spec.nodes[id].external_id = ext;
            if by_id.insert(ext, id).is_some() {
                return Err(Error::DuplicateNode(ext));
            }
        }

        for (_, parent, label, child) in edges {
            let p = *by_id.get(&parent).ok_or(Error::UnknownNode(parent))?;
            let c = *by_id.get(&child).ok_or(Error::UnknownNode(child))?;
            spec.add_edge(p, &label, c);
        }
        Ok(spec)
    }

    /// Writes the spec in the text format. Node ids are the spec indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            match &node.kind {
                SpecKind::Decision { player, labels } => {
                    let actor = match player {
                        Player::One => "p1",
                        Player::Two => "p2",
                    };
                    match labels {
                        Some([a, b]) => {
                            let _ = writeln!(
                                out,
                                "node {id} {actor} {} {}",
                                self.strings[*a as usize], self.strings[*b as usize]
                            );
                        }
                        None => {
                            let _ = writeln!(out, "node {id} {actor}");
                        }
                    }
                }
                SpecKind::Chance { probs } => {
                    let ps: Vec<String> = probs.iter().map(|p| format!("{p:?}")).collect();
                    let _ = writeln!(out, "chance {id} {}", ps.join(" "));
                }
                SpecKind::Terminal { u1, u2 } => match u2 {
                    Some(u2) => {
                        let _ = writeln!(out, "terminal {id} {u1:?} {u2:?}");
                    }
                    None => {
                        let _ = writeln!(out, "terminal {id} {u1:?}");
                    }
                },
            }
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for (label, child) in &node.children {
                let _ = writeln!(out, "edge {id} {} {child}", self.strings[*label as usize]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_matching_pennies() {
        let text = "\
# matching pennies
node 0 p1 root root
node 1 p2 a hidden
node 2 p2 b hidden
terminal 3 1
terminal 4 -1
terminal 5 -1 1
terminal 6 1
edge 0 heads 1
edge 0 tails 2
edge 1 heads 3
edge 1 tails 4
edge 2 heads 5
edge 2 tails 6
";
        let spec = GameSpec::parse(text).unwrap();
        assert_eq!(spec.len(), 7);
        assert_eq!(spec.nodes[0].children.len(), 2);
        let again = GameSpec::parse(&spec.to_text()).unwrap();
        assert_eq!(again.len(), 7);
    }

    #[test]
    fn rejects_unknown_record() {
        let err = GameSpec::parse("leaf 0 1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_edge_to_missing_node() {
        let err = GameSpec::parse("terminal 0 1\nedge 0 x 7").unwrap_err();
        assert_eq!(err, Error::UnknownNode(7));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = GameSpec::parse("terminal 0 1\nterminal 0 2").unwrap_err();
        assert_eq!(err, Error::DuplicateNode(0));
    }
}
