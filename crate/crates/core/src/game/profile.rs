use crate::error::{Error, Result};
use crate::game::index::InfosetId;
use crate::game::tree::Player;
use crate::game::Game;

/// Behaviour strategies of one player, stored flat over its owned infosets.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerStrategy {
    offsets: Vec<usize>,
    probs: Vec<f64>,
}

impl PlayerStrategy {
    pub fn uniform(action_counts: impl IntoIterator<Item = usize>) -> Self {
        let mut offsets = vec![0];
        let mut probs = Vec::new();
        for k in action_counts {
            probs.extend(std::iter::repeat_n(1.0 / k as f64, k));
            offsets.push(probs.len());
        }
        Self { offsets, probs }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: InfosetId) -> &[f64] {
        &self.probs[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn get_mut(&mut self, i: InfosetId) -> &mut [f64] {
        &mut self.probs[self.offsets[i]..self.offsets[i + 1]]
    }

    /// All probabilities, infoset after infoset.
    pub fn flat(&self) -> &[f64] {
        &self.probs
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

/// A behaviour strategy for both players.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    players: [PlayerStrategy; 2],
}

impl StrategyProfile {
    pub fn uniform(game: &Game) -> Self {
        let side = |p: Player| {
            PlayerStrategy::uniform(game.index(p).owned().iter().map(|i| i.num_actions))
        };
        Self {
            players: [side(Player::One), side(Player::Two)],
        }
    }

    pub fn from_players(p1: PlayerStrategy, p2: PlayerStrategy) -> Self {
        Self { players: [p1, p2] }
    }

    pub fn player(&self, p: Player) -> &PlayerStrategy {
        &self.players[p.index()]
    }

    pub fn player_mut(&mut self, p: Player) -> &mut PlayerStrategy {
        &mut self.players[p.index()]
    }

    pub fn get(&self, p: Player, i: InfosetId) -> &[f64] {
        self.players[p.index()].get(i)
    }

    pub fn get_mut(&mut self, p: Player, i: InfosetId) -> &mut [f64] {
        self.players[p.index()].get_mut(i)
    }

    /// Replaces `p`'s strategy at `i`.
    pub fn set(&mut self, p: Player, i: InfosetId, probs: &[f64]) {
        self.get_mut(p, i).copy_from_slice(probs);
    }

    /// Checks shape against `game` and that every vector is a distribution.
    pub fn validate(&self, game: &Game) -> Result<()> {
        for p in Player::BOTH {
            let idx = game.index(p);
            let s = self.player(p);
            if s.len() != idx.num_owned() {
                return Err(Error::Config(format!(
                    "profile has {} infosets for {:?}, game has {}",
                    s.len(),
                    p,
                    idx.num_owned()
                )));
            }
            for (i, info) in idx.owned().iter().enumerate() {
                let v = s.get(i);
                if v.len() != info.num_actions {
                    return Err(Error::Config(format!(
                        "infoset `{}` has {} probabilities for {} actions",
                        info.label,
                        v.len(),
                        info.num_actions
                    )));
                }
                let sum: f64 = v.iter().sum();
                if v.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "infoset `{}` is not a distribution (sum {sum})",
                        info.label
                    )));
                }
            }
        }
        Ok(())
    }
}
