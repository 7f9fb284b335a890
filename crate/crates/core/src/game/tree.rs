use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::spec::{GameSpec, SpecKind};

/// Dense node identifier. Nodes are numbered in preorder, so every subtree
/// occupies the contiguous id range `h..subtree_end(h)`.
pub type NodeId = usize;

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// `+1` for player one, `-1` for player two: multiplies a player-one
    /// utility into this player's utility.
    pub fn sign(self) -> f64 {
        match self {
            Player::One => 1.0,
            Player::Two => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Actor {
    Player(Player),
    Chance,
    Terminal,
}

#[derive(Debug, Clone)]
pub struct HistoryNode {
    pub actor: Actor,
    pub(crate) parent: u32,
    pub(crate) parent_action: u32,
    pub(crate) edges: Range<u32>,
    pub(crate) subtree_end: u32,
    /// Player one's normalized payoff; zero on non-terminals.
    pub utility: f64,
    /// Interned infoset label per player (decision nodes only).
    pub(crate) labels: [u32; 2],
    pub(crate) depth: u32,
}

/// Immutable, validated game tree.
#[derive(Debug, Clone)]
pub struct GameTree {
    pub(crate) nodes: Vec<HistoryNode>,
    pub(crate) edge_child: Vec<u32>,
    pub(crate) edge_prob: Vec<f64>,
    pub(crate) edge_label: Vec<u32>,
    pub(crate) strings: Vec<String>,
    scale: f64,
    max_actions: usize,
    depth: usize,
}

impl GameTree {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, h: NodeId) -> &HistoryNode {
        &self.nodes[h]
    }

    pub fn actor(&self, h: NodeId) -> Actor {
        self.nodes[h].actor
    }

    pub fn parent(&self, h: NodeId) -> Option<NodeId> {
        let p = self.nodes[h].parent;
        (p != NONE).then_some(p as usize)
    }

    /// Index of the action leading from the parent into `h`.
    pub fn parent_action(&self, h: NodeId) -> Option<usize> {
        let a = self.nodes[h].parent_action;
        (a != NONE).then_some(a as usize)
    }

    pub fn num_actions(&self, h: NodeId) -> usize {
        self.nodes[h].edges.len()
    }

    pub fn children(&self, h: NodeId) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        let r = self.nodes[h].edges.clone();
        self.edge_child[r.start as usize..r.end as usize]
            .iter()
            .map(|&c| c as usize)
    }

    pub fn child(&self, h: NodeId, action: usize) -> NodeId {
        self.edge_child[self.nodes[h].edges.start as usize + action] as usize
    }

    /// Outcome probabilities of a chance node, in action order.
    pub fn chance_probs(&self, h: NodeId) -> &[f64] {
        let r = &self.nodes[h].edges;
        &self.edge_prob[r.start as usize..r.end as usize]
    }

    pub fn action_label(&self, h: NodeId, action: usize) -> &str {
        let e = self.nodes[h].edges.start as usize + action;
        &self.strings[self.edge_label[e] as usize]
    }

    /// One past the last node of the subtree rooted at `h`.
    pub fn subtree_end(&self, h: NodeId) -> NodeId {
        self.nodes[h].subtree_end as usize
    }

    /// Number of decision nodes strictly above `h`.
    pub fn decision_depth(&self, h: NodeId) -> usize {
        self.nodes[h].depth as usize
    }

    pub fn is_terminal(&self, h: NodeId) -> bool {
        self.nodes[h].actor == Actor::Terminal
    }

    /// Infoset label of a decision node in `player`'s partition.
    pub fn label(&self, h: NodeId, player: Player) -> Option<&str> {
        let l = self.nodes[h].labels[player.index()];
        (l != NONE).then(|| self.strings[l as usize].as_str())
    }

    /// Factor that converts normalized utilities back to native units.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Maximum branching over decision nodes.
    pub fn max_actions(&self) -> usize {
        self.max_actions
    }

    /// Maximum number of decision nodes on a root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.actor == Actor::Terminal)
            .count()
    }

    pub fn decision_count(&self, player: Player) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.actor == Actor::Player(player))
            .count()
    }
}

const PROB_TOL: f64 = 1e-9;

/// Validates a spec and lays it out as a preorder-numbered [`GameTree`].
///
/// Terminal payoffs are divided by the largest absolute payoff so that every
/// utility lies in `[-1, 1]`; the divisor is kept as [`GameTree::scale`].
pub fn build_game(spec: &GameSpec) -> Result<GameTree> {
    if spec.nodes.is_empty() {
        return Err(Error::NoRoot);
    }
    let roots: Vec<usize> = (0..spec.nodes.len())
        .filter(|&i| spec.nodes[i].parents == 0)
        .collect();
    match roots.len() {
        0 => return Err(Error::NoRoot),
        1 => {}
        n => return Err(Error::MultipleRoots(n)),
    }
    if let Some(n) = spec.nodes.iter().find(|n| n.parents > 1) {
        return Err(Error::MultipleParents(n.external_id));
    }

    for n in &spec.nodes {
        let id = n.external_id;
        let invalid = |reason: &str| Error::InvalidNode {
            id,
            reason: reason.to_owned(),
        };
        match &n.kind {
            SpecKind::Decision { .. } => {
                if n.children.is_empty() {
                    return Err(invalid("decision node without actions"));
                }
            }
            SpecKind::Chance { probs } => {
                if n.children.is_empty() {
                    return Err(invalid("chance node without outcomes"));
                }
                if probs.len() != n.children.len() {
                    return Err(invalid(&format!(
                        "{} probabilities for {} outcomes",
                        probs.len(),
                        n.children.len()
                    )));
                }
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(invalid("negative or non-finite chance probability"));
                }
                let sum: f64 = probs.iter().sum();
                if (sum - 1.0).abs() > PROB_TOL {
                    return Err(Error::ChanceDistribution { id, sum });
                }
            }
            SpecKind::Terminal { u1, u2 } => {
                if !n.children.is_empty() {
                    return Err(invalid("terminal node with children"));
                }
                if !u1.is_finite() {
                    return Err(invalid("non-finite utility"));
                }
                if let Some(u2) = u2 {
                    if (u1 + u2).abs() > PROB_TOL * u1.abs().max(1.0) {
                        return Err(Error::NotZeroSum {
                            id,
                            u1: *u1,
                            u2: *u2,
                        });
                    }
                }
            }
        }
    }

    // Preorder layout with an explicit stack; children are pushed reversed so
    // action 0 is visited first.
    let n = spec.nodes.len();
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut new_id = vec![NONE; n];
    let mut stack = vec![roots[0]];
    while let Some(s) = stack.pop() {
        if new_id[s] != NONE {
            // only reachable through a cycle back into an already placed node
            return Err(Error::MultipleParents(spec.nodes[s].external_id));
        }
        new_id[s] = order.len() as u32;
        order.push(s as u32);
        for &(_, c) in spec.nodes[s].children.iter().rev() {
            stack.push(c);
        }
    }
    if order.len() != n {
        let missing = (0..n).find(|&i| new_id[i] == NONE).unwrap();
        return Err(Error::Unreachable(spec.nodes[missing].external_id));
    }

    let scale = spec
        .nodes
        .iter()
        .filter_map(|nd| match nd.kind {
            SpecKind::Terminal { u1, .. } => Some(u1.abs()),
            _ => None,
        })
        .fold(0.0_f64, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let mut strings = spec.strings.clone();
    let mut nodes = Vec::with_capacity(n);
    let mut edge_child = Vec::new();
    let mut edge_prob = Vec::new();
    let mut edge_label = Vec::new();
    let mut max_actions = 0;

    for &s in &order {
        let sn = &spec.nodes[s as usize];
        let start = edge_child.len() as u32;
        for (k, &(label, c)) in sn.children.iter().enumerate() {
            edge_child.push(new_id[c]);
            edge_label.push(label);
            edge_prob.push(match &sn.kind {
                SpecKind::Chance { probs } => probs[k],
                _ => 0.0,
            });
        }
        let end = edge_child.len() as u32;
        let (actor, utility, labels) = match &sn.kind {
            SpecKind::Decision { player, labels } => {
                max_actions = max_actions.max(sn.children.len());
                let labels = match labels {
                    Some(l) => *l,
                    None => {
                        let own = format!("#{}", sn.external_id);
                        strings.push(own);
                        let id = (strings.len() - 1) as u32;
                        [id, id]
                    }
                };
                (Actor::Player(*player), 0.0, labels)
            }
            SpecKind::Chance { .. } => (Actor::Chance, 0.0, [NONE, NONE]),
            SpecKind::Terminal { u1, .. } => (Actor::Terminal, u1 / scale, [NONE, NONE]),
        };
        nodes.push(HistoryNode {
            actor,
            parent: NONE,
            parent_action: NONE,
            edges: start..end,
            subtree_end: 0,
            utility,
            labels,
            depth: 0,
        });
    }

    // parents, depths, subtree extents
    let mut depth = 0;
    for h in 0..n {
        let r = nodes[h].edges.clone();
        let child_depth = nodes[h].depth
            + u32::from(matches!(nodes[h].actor, Actor::Player(_)));
        for (k, e) in r.enumerate() {
            let c = edge_child[e as usize] as usize;
            nodes[c].parent = h as u32;
            nodes[c].parent_action = k as u32;
            nodes[c].depth = child_depth;
        }
        if nodes[h].actor == Actor::Terminal {
            depth = depth.max(nodes[h].depth as usize);
        }
    }
    for h in (0..n).rev() {
        let end = match nodes[h].edges.clone().last() {
            Some(e) => nodes[edge_child[e as usize] as usize].subtree_end,
            None => h as u32 + 1,
        };
        nodes[h].subtree_end = end;
    }

    Ok(GameTree {
        nodes,
        edge_child,
        edge_prob,
        edge_label,
        strings,
        scale,
        max_actions,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_terminal_is_a_valid_game() {
        let mut spec = GameSpec::new();
        spec.add_terminal(0.0);
        let tree = build_game(&spec).unwrap();
        assert_eq!(tree.len(), 1);
        assert_eq!(tree.scale(), 1.0);
        assert_eq!(tree.node(0).utility, 0.0);
    }

    #[test]
    fn rejects_bad_chance_distribution() {
        let mut spec = GameSpec::new();
        let c = spec.add_chance(vec![0.5, 0.6]);
        let a = spec.add_terminal(1.0);
        let b = spec.add_terminal(-1.0);
        spec.add_edge(c, "a", a);
        spec.add_edge(c, "b", b);
        assert!(matches!(
            build_game(&spec),
            Err(Error::ChanceDistribution { .. })
        ));
    }

    #[test]
    fn rejects_non_zero_sum() {
        let mut spec = GameSpec::new();
        let d = spec.add_perfect_decision(Player::One);
        let a = spec.add_terminal_pair(1.0, 0.5);
        spec.add_edge(d, "a", a);
        assert!(matches!(build_game(&spec), Err(Error::NotZeroSum { .. })));
    }

    #[test]
    fn rejects_cycles() {
        let text = "node 0 p1\nnode 1 p2\nterminal 2 1\nedge 0 a 1\nedge 1 b 0\nedge 1 c 2";
        let spec = GameSpec::parse(text).unwrap();
        // every node has a parent, so there is no root
        assert_eq!(build_game(&spec).unwrap_err(), Error::NoRoot);

        let text = "node 9 p1\nnode 0 p1\nnode 1 p2\nterminal 2 1\nedge 9 z 2\nedge 0 a 1\nedge 1 b 0";
        let spec = GameSpec::parse(text).unwrap();
        assert!(matches!(
            build_game(&spec),
            Err(Error::Unreachable(_)) | Err(Error::MultipleRoots(_))
        ));
    }

    #[test]
    fn normalizes_utilities_and_orders_preorder() {
        let text = "chance 5 0.25 0.75\nterminal 7 -4\nnode 6 p1\nterminal 8 2\nterminal 9 1\n\
                    edge 5 l 6\nedge 5 r 7\nedge 6 x 8\nedge 6 y 9";
        let tree = build_game(&GameSpec::parse(text).unwrap()).unwrap();
        assert_eq!(tree.scale(), 4.0);
        assert_eq!(tree.actor(0), Actor::Chance);
        assert_eq!(tree.actor(1), Actor::Player(Player::One));
        assert_eq!(tree.child(0, 1), 4);
        assert_eq!(tree.node(4).utility, -1.0);
        assert_eq!(tree.node(2).utility, 0.5);
        assert_eq!(tree.subtree_end(1), 4);
        assert_eq!(tree.subtree_end(0), 5);
        assert_eq!(tree.chance_probs(0), &[0.25, 0.75]);
        assert_eq!(tree.depth(), 1);
        assert_eq!(tree.action_label(1, 1), "y");
    }
}
