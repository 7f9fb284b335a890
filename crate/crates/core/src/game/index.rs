use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::tree::{Actor, GameTree, NodeId, Player, NONE};

pub type InfosetId = usize;

/// One node of a player's infoset tree.
///
/// Every decision history appears in exactly one infoset of each player's
/// index. Infosets where the opponent acts are kept as structure so that
/// `succ` can skip over them.
#[derive(Debug, Clone)]
pub struct Infoset {
    pub label: String,
    /// The player acting at the member histories.
    pub owner: Player,
    pub members: Vec<NodeId>,
    pub num_actions: usize,
    pub action_labels: Vec<String>,
    /// Depth in the infoset tree; roots have depth 1.
    pub depth: usize,
    pub parent: Option<InfosetId>,
    /// Action taken at `parent` on the way here. Only meaningful when the
    /// parent is owned by the index's player.
    pub parent_action: Option<usize>,
    pub children: Vec<InfosetId>,
    /// Nearest owned descendants, paired with the action at this infoset
    /// leading to them when this infoset is owned.
    pub succ: Vec<(usize, InfosetId)>,
    /// Nearest owned strict ancestor and the action taken there.
    pub owned_parent: Option<(InfosetId, usize)>,
}

impl Infoset {
    /// Number of histories in the infoset.
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// A player's view of the game as a tree of infosets.
///
/// Ids `0..num_owned()` are the player's own infosets in first-appearance
/// preorder; the opponent's infosets follow.
#[derive(Debug, Clone)]
pub struct InfosetIndex {
    player: Player,
    infosets: Vec<Infoset>,
    num_owned: usize,
    roots: Vec<InfosetId>,
    owned_roots: Vec<InfosetId>,
    of_node: Vec<u32>,
    owned_anc: Vec<(u32, u32)>,
}

impl InfosetIndex {
    pub fn player(&self) -> Player {
        self.player
    }

    pub fn len(&self) -> usize {
        self.infosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infosets.is_empty()
    }

    pub fn num_owned(&self) -> usize {
        self.num_owned
    }

    pub fn get(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn owned(&self) -> &[Infoset] {
        &self.infosets[..self.num_owned]
    }

    pub fn is_owned(&self, id: InfosetId) -> bool {
        id < self.num_owned
    }

    /// Infosets without a parent in the infoset tree.
    pub fn roots(&self) -> &[InfosetId] {
        &self.roots
    }

    /// Owned infosets with no owned ancestor.
    pub fn owned_roots(&self) -> &[InfosetId] {
        &self.owned_roots
    }

    /// Infoset of a decision history in this player's partition.
    pub fn of_node(&self, h: NodeId) -> Option<InfosetId> {
        let i = self.of_node[h];
        (i != NONE).then_some(i as usize)
    }

    /// Nearest owned decision ancestor of `h` (strict) and the action taken
    /// there on the path to `h`.
    pub fn owned_ancestor(&self, h: NodeId) -> Option<(NodeId, usize)> {
        let (a, k) = self.owned_anc[h];
        (a != NONE).then_some((a as usize, k as usize))
    }

    /// Total number of member histories over owned infosets.
    pub fn owned_history_count(&self) -> usize {
        self.owned().iter().map(|i| i.members.len()).sum()
    }
}

fn inconsistent(label: &str, reason: impl Into<String>) -> Error {
    Error::InconsistentInfoset {
        label: label.to_owned(),
        reason: reason.into(),
    }
}

/// Groups decision histories by `player`'s infoset labels and links the
/// resulting infosets into a tree.
///
/// Rejects infosets whose members disagree on the acting player, on the
/// action list, or on their ancestry (imperfect recall).
pub fn build_infoset_index(tree: &GameTree, player: Player) -> Result<InfosetIndex> {
    let n = tree.len();
    let p = player.index();

    // group in first-appearance preorder, owned first
    let mut by_label: HashMap<u32, usize> = HashMap::new();
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    for h in 0..n {
        if let Actor::Player(_) = tree.actor(h) {
            let l = tree.nodes[h].labels[p];
            let g = *by_label.entry(l).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(h);
        }
    }
    let owner_of = |g: &Vec<NodeId>| match tree.actor(g[0]) {
        Actor::Player(q) => q,
        _ => unreachable!(),
    };
    let (owned, other): (Vec<_>, Vec<_>) = groups.into_iter().partition(|g| owner_of(g) == player);
    let num_owned = owned.len();
    let groups: Vec<Vec<NodeId>> = owned.into_iter().chain(other).collect();

    let mut of_node = vec![NONE; n];
    for (i, g) in groups.iter().enumerate() {
        for &h in g {
            of_node[h] = i as u32;
        }
    }

    // nearest decision ancestor (view parent) and nearest owned ancestor per node
    let mut dec_anc = vec![(NONE, NONE); n];
    let mut owned_anc = vec![(NONE, NONE); n];
    for h in 0..n {
        let (d, o) = (dec_anc[h], owned_anc[h]);
        let is_dec = matches!(tree.actor(h), Actor::Player(_));
        let is_owned = tree.actor(h) == Actor::Player(player);
        for (k, c) in tree.children(h).enumerate() {
            dec_anc[c] = if is_dec { (h as u32, k as u32) } else { d };
            owned_anc[c] = if is_owned { (h as u32, k as u32) } else { o };
        }
    }

    let mut infosets = Vec::with_capacity(groups.len());
    for g in &groups {
        let first = g[0];
        let label = tree.strings[tree.nodes[first].labels[p] as usize].clone();
        let owner = owner_of(g);
        let num_actions = tree.num_actions(first);
        let action_labels: Vec<String> = (0..num_actions)
            .map(|a| tree.action_label(first, a).to_owned())
            .collect();
        let view_parent = |h: NodeId| {
            let (a, k) = dec_anc[h];
            (a != NONE).then(|| (of_node[a as usize] as usize, k as usize))
        };
        let owned_parent = |h: NodeId| {
            let (a, k) = owned_anc[h];
            (a != NONE).then(|| (of_node[a as usize] as usize, k as usize))
        };
        let vp = view_parent(first);
        let op = owned_parent(first);
        for &h in &g[1..] {
            if tree.actor(h) != Actor::Player(owner) {
                return Err(inconsistent(&label, "members have different actors"));
            }
            if tree.num_actions(h) != num_actions
                || (0..num_actions).any(|a| tree.action_label(h, a) != action_labels[a])
            {
                return Err(inconsistent(&label, "members have different action lists"));
            }
            let other = view_parent(h);
            if other.map(|x| x.0) != vp.map(|x| x.0) {
                return Err(inconsistent(&label, "members have different parent infosets"));
            }
            if let (Some((pi, pa)), Some((_, oa))) = (vp, other) {
                if pi < num_owned && pa != oa {
                    return Err(inconsistent(
                        &label,
                        "members are reached by different own actions",
                    ));
                }
            }
            if owned_parent(h) != op {
                return Err(inconsistent(&label, "members have different own histories"));
            }
        }
        infosets.push(Infoset {
            label,
            owner,
            members: g.clone(),
            num_actions,
            action_labels,
            depth: 0,
            parent: vp.map(|x| x.0),
            parent_action: vp.map(|x| x.1),
            children: Vec::new(),
            succ: Vec::new(),
            owned_parent: op,
        });
    }

    // children lists follow first-appearance order, so a parent precedes
    // its children when walking nodes in preorder
    let mut roots = Vec::new();
    let mut owned_roots = Vec::new();
    let mut seen = vec![false; infosets.len()];
    for h in 0..n {
        let i = of_node[h];
        if i == NONE || seen[i as usize] {
            continue;
        }
        let i = i as usize;
        seen[i] = true;
        match infosets[i].parent {
            Some(par) => {
                infosets[i].depth = infosets[par].depth + 1;
                infosets[par].children.push(i);
            }
            None => {
                infosets[i].depth = 1;
                roots.push(i);
            }
        }
        match infosets[i].owned_parent {
            _ if i >= num_owned => {}
            Some((op, a)) => infosets[op].succ.push((a, i)),
            None => owned_roots.push(i),
        }
    }

    // opponent infosets: succ lists the nearest owned descendants below them
    for i in (num_owned..infosets.len()).rev() {
        let mut succ = Vec::new();
        for &c in &infosets[i].children {
            if c < num_owned {
                succ.push((0, c));
            } else {
                succ.extend(infosets[c].succ.iter().copied());
            }
        }
        infosets[i].succ = succ;
    }

    Ok(InfosetIndex {
        player,
        infosets,
        num_owned,
        roots,
        owned_roots,
        of_node,
        owned_anc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::spec::GameSpec;
    use crate::game::tree::build_game;

    fn pennies() -> GameTree {
        let text = "node 0 p1 root root\nnode 1 p2 a hidden\nnode 2 p2 b hidden\n\
                    terminal 3 1\nterminal 4 -1\nterminal 5 -1\nterminal 6 1\n\
                    edge 0 h 1\nedge 0 t 2\nedge 1 h 3\nedge 1 t 4\nedge 2 h 5\nedge 2 t 6";
        build_game(&GameSpec::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn matrix_game_has_single_root_infoset() {
        let tree = pennies();
        let i1 = build_infoset_index(&tree, Player::One).unwrap();
        assert_eq!(i1.num_owned(), 1);
        assert!(i1.get(0).succ.is_empty());
        assert_eq!(i1.len(), 3);

        let i2 = build_infoset_index(&tree, Player::Two).unwrap();
        assert_eq!(i2.num_owned(), 1);
        assert_eq!(i2.get(0).members.len(), 2);
        assert_eq!(i2.get(0).depth, 2);
        assert_eq!(i2.owned_roots(), &[0]);
        // player 2's view of player 1's root is structural
        assert_eq!(i2.get(1).succ, vec![(0, 0)]);
    }

    #[test]
    fn rejects_mismatched_actions() {
        let text = "node 0 p1 r r\nnode 1 p2 a x\nnode 2 p2 b x\nterminal 3 1\nterminal 4 0\n\
                    terminal 5 0\nedge 0 l 1\nedge 0 r 2\nedge 1 u 3\nedge 1 v 4\nedge 2 w 5";
        let tree = build_game(&GameSpec::parse(text).unwrap()).unwrap();
        let err = build_infoset_index(&tree, Player::Two).unwrap_err();
        assert!(matches!(err, Error::InconsistentInfoset { .. }));
    }

    #[test]
    fn rejects_forgetting_own_action() {
        // player 1 moves, then cannot tell which move was made
        let text = "node 0 p1 r r\nnode 1 p1 x x\nnode 2 p1 x x\nterminal 3 1\nterminal 4 0\n\
                    terminal 5 0\nterminal 6 1\nedge 0 l 1\nedge 0 r 2\nedge 1 u 3\nedge 1 v 4\n\
                    edge 2 u 5\nedge 2 v 6";
        let tree = build_game(&GameSpec::parse(text).unwrap()).unwrap();
        assert!(build_infoset_index(&tree, Player::One).is_err());
    }
}
