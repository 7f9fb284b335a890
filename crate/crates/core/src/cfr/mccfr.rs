use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Accumulators, RunHistory};
use crate::game::{Actor, Game, InfosetId, NodeId, Player, StrategyProfile};
use crate::olo::OloState;

/// Weight of the uniform distribution in the traverser's sampling policy.
pub const EXPLORATION: f64 = 0.6;

fn sample(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (a, p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return a;
        }
    }
    // rounding left a sliver above the last cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Outcome-sampling Monte Carlo CFR.
///
/// Each round samples one trajectory per player. The traverser samples from
/// a mix of `EXPLORATION` uniform and the current strategy; the opponent and
/// chance sample from their own distributions. Sampled counterfactual
/// rewards are importance weighted so that their expectation equals the
/// full-traversal reward.
#[derive(Debug, Clone)]
pub struct MccfrState<'g> {
    game: &'g Game,
    acc: Accumulators,
    current: StrategyProfile,
    rng: ChaCha8Rng,
    seed: u64,
    round: usize,
    touched_nodes: u64,
    history: RunHistory,
    updated: Vec<(Player, InfosetId)>,
    reward: Vec<f64>,
}

impl<'g> MccfrState<'g> {
    pub fn new(game: &'g Game, seed: u64) -> Self {
        Self {
            game,
            acc: Accumulators::new(game),
            current: StrategyProfile::uniform(game),
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            round: 0,
            touched_nodes: 0,
            history: RunHistory::default(),
            updated: Vec::new(),
            reward: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn touched_nodes(&self) -> u64 {
        self.touched_nodes
    }

    pub fn history(&self) -> RunHistory {
        self.history
    }

    pub fn current(&self) -> &StrategyProfile {
        &self.current
    }

    pub fn olo(&self, p: Player, i: InfosetId) -> &OloState {
        &self.acc.olo[p.index()][i]
    }

    pub fn average_strategy(&self) -> StrategyProfile {
        self.acc.average(self.game)
    }

    /// Number of infosets whose regrets changed in the last round.
    pub fn updated_last_round(&self) -> usize {
        self.updated.len()
    }

    /// One round: a sampled traversal for each player against the same σ_t.
    pub fn step(&mut self) {
        self.updated.clear();
        let root = self.game.tree().root();
        let v1 = self.episode(root, Player::One, 1.0, 1.0, 1.0);
        self.episode(root, Player::Two, 1.0, 1.0, 1.0);
        // the player-one estimate is unbiased for u¹(σ_t)
        self.history.record(1.0, v1);
        for &(p, i) in &self.updated {
            let next = &self.acc.olo[p.index()][i].current;
            self.current.get_mut(p, i).copy_from_slice(next);
        }
        self.round += 1;
    }

    /// Returns a sampled estimate of the traverser's value at `h`.
    fn episode(
        &mut self,
        h: NodeId,
        traverser: Player,
        my_reach: f64,
        opp_reach: f64,
        sample_reach: f64,
    ) -> f64 {
        let game = self.game;
        let tree = game.tree();
        self.touched_nodes += 1;
        match tree.actor(h) {
            Actor::Terminal => traverser.sign() * tree.node(h).utility,
            Actor::Chance => {
                let a = sample(&mut self.rng, tree.chance_probs(h));
                self.episode(tree.child(h, a), traverser, my_reach, opp_reach, sample_reach)
            }
            Actor::Player(p) => {
                let i = game.infoset_of(h);
                let policy = self.current.get(p, i);
                let n = policy.len();
                if p == traverser {
                    let u = 1.0 / n as f64;
                    let q: Vec<f64> = policy
                        .iter()
                        .map(|s| EXPLORATION * u + (1.0 - EXPLORATION) * s)
                        .collect();
                    let a = sample(&mut self.rng, &q);
                    let pa = policy[a];
                    let child = self.episode(
                        tree.child(h, a),
                        traverser,
                        my_reach * pa,
                        opp_reach,
                        sample_reach * q[a],
                    );
                    let sampled = child / q[a];
                    let mut reward = std::mem::take(&mut self.reward);
                    reward.clear();
                    reward.resize(n, 0.0);
                    reward[a] = sampled * opp_reach / sample_reach;
                    self.acc.olo[p.index()][i].regret_update(&reward, false);
                    self.reward = reward;
                    self.updated.push((p, i));
                    pa * sampled
                } else {
                    let off = self.current.player(p).offsets()[i];
                    let k = my_reach_weight(opp_reach, sample_reach);
                    let avg = &mut self.acc.avg[p.index()];
                    for (b, s) in policy.iter().enumerate() {
                        avg[off + b] += k * s;
                    }
                    let a = sample(&mut self.rng, policy);
                    let pa = self.current.get(p, i)[a];
                    self.episode(
                        tree.child(h, a),
                        traverser,
                        my_reach,
                        opp_reach * pa,
                        sample_reach * pa,
                    )
                }
            }
        }
    }
}

/// At a node of the non-traversing player `opp_reach` is that player's own
/// reach.
fn my_reach_weight(own_reach: f64, sample_reach: f64) -> f64 {
    own_reach / sample_reach
}

pub fn mccfr_round(state: &mut MccfrState<'_>) {
    state.step();
}
