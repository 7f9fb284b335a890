//! Game trees, infoset partitions, strategy profiles and reach probabilities.

mod index;
mod profile;
pub mod spec;
mod tree;

pub use index::{build_infoset_index, Infoset, InfosetId, InfosetIndex};
pub use profile::{PlayerStrategy, StrategyProfile};
pub use spec::{GameSpec, SpecId};
pub use tree::{build_game, Actor, GameTree, HistoryNode, NodeId, Player};

use crate::error::Result;

/// A validated tree together with both players' infoset indices.
///
/// Immutable after construction; solvers borrow it.
#[derive(Debug, Clone)]
pub struct Game {
    tree: GameTree,
    index: [InfosetIndex; 2],
    node_infoset: Vec<u32>,
}

impl Game {
    pub fn new(spec: &GameSpec) -> Result<Self> {
        Self::from_tree(build_game(spec)?)
    }

    pub fn from_tree(tree: GameTree) -> Result<Self> {
        let i1 = build_infoset_index(&tree, Player::One)?;
        let i2 = build_infoset_index(&tree, Player::Two)?;
        let node_infoset = (0..tree.len())
            .map(|h| match tree.actor(h) {
                Actor::Player(Player::One) => i1.of_node(h).unwrap() as u32,
                Actor::Player(Player::Two) => i2.of_node(h).unwrap() as u32,
                _ => u32::MAX,
            })
            .collect();
        Ok(Self {
            tree,
            index: [i1, i2],
            node_infoset,
        })
    }

    pub fn tree(&self) -> &GameTree {
        &self.tree
    }

    pub fn index(&self, p: Player) -> &InfosetIndex {
        &self.index[p.index()]
    }

    /// The acting player's infoset at decision node `h`.
    #[inline]
    pub fn infoset_of(&self, h: NodeId) -> InfosetId {
        self.node_infoset[h] as usize
    }

    /// Decision infosets of both players.
    pub fn num_infosets(&self) -> usize {
        self.index[0].num_owned() + self.index[1].num_owned()
    }

    /// Probability of taking each action at `h` under `profile`; chance
    /// nodes use their fixed distribution.
    #[inline]
    pub fn action_probs<'a>(&'a self, profile: &'a StrategyProfile, h: NodeId) -> &'a [f64] {
        match self.tree.actor(h) {
            Actor::Player(p) => profile.get(p, self.infoset_of(h)),
            Actor::Chance => self.tree.chance_probs(h),
            Actor::Terminal => &[],
        }
    }
}

/// Reach probabilities split into each player's and chance's contribution.
#[derive(Debug, Clone)]
pub struct ReachDecomposition {
    player: [Vec<f64>; 2],
    chance: Vec<f64>,
}

impl ReachDecomposition {
    /// π_σ(h).
    pub fn total(&self, h: NodeId) -> f64 {
        self.player[0][h] * self.player[1][h] * self.chance[h]
    }

    /// π^p_σ(h), the product of `p`'s own action probabilities.
    pub fn own(&self, p: Player, h: NodeId) -> f64 {
        self.player[p.index()][h]
    }

    pub fn chance(&self, h: NodeId) -> f64 {
        self.chance[h]
    }

    /// π^{-p}_σ(h): opponent and chance.
    pub fn others(&self, p: Player, h: NodeId) -> f64 {
        self.player[p.opponent().index()][h] * self.chance[h]
    }

    /// Σ_{h∈I} π_σ(h) over the members of `p`'s infoset `i`.
    pub fn infoset_total(&self, game: &Game, p: Player, i: InfosetId) -> f64 {
        game.index(p).get(i).members.iter().map(|&h| self.total(h)).sum()
    }

    /// Σ_{h∈I} π^{-p}_σ(h).
    pub fn infoset_others(&self, game: &Game, p: Player, i: InfosetId) -> f64 {
        game.index(p)
            .get(i)
            .members
            .iter()
            .map(|&h| self.others(p, h))
            .sum()
    }

    /// π^p_σ(I); identical across members under perfect recall.
    pub fn infoset_own(&self, game: &Game, p: Player, i: InfosetId) -> f64 {
        self.own(p, game.index(p).get(i).members[0])
    }
}

/// Computes every history's reach under `profile` in one top-down pass.
pub fn reach(game: &Game, profile: &StrategyProfile) -> ReachDecomposition {
    let tree = game.tree();
    let n = tree.len();
    let mut r = ReachDecomposition {
        player: [vec![0.0; n], vec![0.0; n]],
        chance: vec![0.0; n],
    };
    if n == 0 {
        return r;
    }
    r.player[0][0] = 1.0;
    r.player[1][0] = 1.0;
    r.chance[0] = 1.0;
    for h in 0..n {
        let actor = tree.actor(h);
        let probs = game.action_probs(profile, h);
        for (a, c) in tree.children(h).enumerate() {
            let (mut r1, mut r2, mut rc) = (r.player[0][h], r.player[1][h], r.chance[h]);
            match actor {
                Actor::Player(Player::One) => r1 *= probs[a],
                Actor::Player(Player::Two) => r2 *= probs[a],
                Actor::Chance => rc *= probs[a],
                Actor::Terminal => unreachable!(),
            }
            r.player[0][c] = r1;
            r.player[1][c] = r2;
            r.chance[c] = rc;
        }
    }
    r
}

/// Per-node expected player-one utility under `profile` (normalized units).
pub fn node_values(game: &Game, profile: &StrategyProfile) -> Vec<f64> {
    let tree = game.tree();
    let mut v = vec![0.0; tree.len()];
    for h in (0..tree.len()).rev() {
        v[h] = if tree.is_terminal(h) {
            tree.node(h).utility
        } else {
            let probs = game.action_probs(profile, h);
            tree.children(h).zip(probs).map(|(c, p)| p * v[c]).sum()
        };
    }
    v
}

/// Player one's expected utility in normalized units; multiply by
/// [`GameTree::scale`] for native units. Player two receives the negation.
pub fn expected_value(game: &Game, profile: &StrategyProfile) -> f64 {
    node_values(game, profile)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> Game {
        let text = "node 0 p1 root root\nnode 1 p2 a hidden\nnode 2 p2 b hidden\n\
                    terminal 3 1\nterminal 4 -1\nterminal 5 -1\nterminal 6 1\n\
                    edge 0 h 1\nedge 0 t 2\nedge 1 h 3\nedge 1 t 4\nedge 2 h 5\nedge 2 t 6";
        Game::new(&GameSpec::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn uniform_pennies_value_is_zero() {
        let g = pennies();
        let s = StrategyProfile::uniform(&g);
        s.validate(&g).unwrap();
        assert_eq!(expected_value(&g, &s), 0.0);
    }

    #[test]
    fn zero_probability_blocks_reach() {
        let g = pennies();
        let mut s = StrategyProfile::uniform(&g);
        s.set(Player::One, 0, &[1.0, 0.0]);
        let r = reach(&g, &s);
        // preorder: root, p2 after h, two leaves, p2 after t, two leaves
        assert_eq!(r.own(Player::One, 4), 0.0);
        assert_eq!(r.own(Player::One, 5), 0.0);
        assert_eq!(r.total(2), 0.5);
        assert_eq!(expected_value(&g, &s), 0.0);
    }

    #[test]
    fn single_terminal_value() {
        let mut spec = GameSpec::new();
        spec.add_terminal(0.0);
        let g = Game::new(&spec).unwrap();
        assert_eq!(expected_value(&g, &StrategyProfile::uniform(&g)), 0.0);
    }

    #[test]
    fn validate_rejects_non_distribution() {
        let g = pennies();
        let mut s = StrategyProfile::uniform(&g);
        s.set(Player::Two, 0, &[0.7, 0.7]);
        assert!(s.validate(&g).is_err());
    }
}
