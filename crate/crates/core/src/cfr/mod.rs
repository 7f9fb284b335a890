//! Full-traversal counterfactual regret minimization (CFR and CFR+), and
//! outcome-sampling Monte Carlo CFR.

mod mccfr;

pub use mccfr::{mccfr_round, MccfrState, EXPLORATION};

use crate::game::{node_values, reach, Actor, Game, InfosetId, Player, StrategyProfile};
use crate::olo::OloState;

/// Which regret updater and averaging weights a solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    /// Regret matching with uniform averaging weights.
    Vanilla,
    /// Regret matching plus with weight `t` on round `t`.
    Plus,
}

impl Variant {
    pub fn weight(self, round: usize) -> f64 {
        match self {
            Variant::Vanilla => 1.0,
            Variant::Plus => round as f64,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Variant::Plus
    }
}

/// Cumulative quantities a run needs for external-regret reporting.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunHistory {
    pub rounds: usize,
    /// Σ_t w_t, the total averaging weight.
    pub weight: f64,
    /// Σ_t w_t·u^i(σ_t) per player, normalized units.
    pub achieved: [f64; 2],
}

impl RunHistory {
    pub fn record(&mut self, weight: f64, u1: f64) {
        self.rounds += 1;
        self.weight += weight;
        self.achieved[0] += weight * u1;
        self.achieved[1] -= weight * u1;
    }
}

/// Counterfactual rewards per (owned infoset, action) for one player.
#[derive(Debug, Clone, PartialEq)]
pub struct CfvTable {
    pub player: Player,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

impl CfvTable {
    pub fn get(&self, i: InfosetId) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// For every infoset `I` owned by `player` and action `a`:
/// `Σ_{h∈I} π^{-i}_σ(h)·u^i(σ, ha)`.
///
/// Visits every history once; returns the table and the visit count.
pub fn compute_cfv(game: &Game, profile: &StrategyProfile, player: Player) -> (CfvTable, u64) {
    let values = node_values(game, profile);
    let r = reach(game, profile);
    (cfv_from(game, profile, player, &values, &r), game.tree().len() as u64)
}

fn cfv_from(
    game: &Game,
    profile: &StrategyProfile,
    player: Player,
    values: &[f64],
    r: &crate::game::ReachDecomposition,
) -> CfvTable {
    let tree = game.tree();
    let strat = profile.player(player);
    let mut out = vec![0.0; strat.flat().len()];
    let sign = player.sign();
    for h in 0..tree.len() {
        if tree.actor(h) != Actor::Player(player) {
            continue;
        }
        let w = r.others(player, h);
        if w == 0.0 {
            continue;
        }
        let off = strat.offsets()[game.infoset_of(h)];
        for (a, c) in tree.children(h).enumerate() {
            out[off + a] += w * sign * values[c];
        }
    }
    CfvTable {
        player,
        offsets: strat.offsets().to_vec(),
        values: out,
    }
}

/// Per-player solver accumulators shared by CFR-family solvers.
#[derive(Debug, Clone)]
pub(crate) struct Accumulators {
    pub olo: [Vec<OloState>; 2],
    /// Σ_t w_t·π^i(I)·σ_t(I), laid out like the profile.
    pub avg: [Vec<f64>; 2],
}

impl Accumulators {
    pub fn new(game: &Game) -> Self {
        let side = |p: Player| -> Vec<OloState> {
            game.index(p)
                .owned()
                .iter()
                .map(|i| OloState::new(i.num_actions))
                .collect()
        };
        let profile = StrategyProfile::uniform(game);
        Self {
            olo: [side(Player::One), side(Player::Two)],
            avg: [
                vec![0.0; profile.player(Player::One).flat().len()],
                vec![0.0; profile.player(Player::Two).flat().len()],
            ],
        }
    }

    /// σ̄(I) = avg(I) / Σ avg(I), uniform where nothing was accumulated.
    pub fn average(&self, game: &Game) -> StrategyProfile {
        let mut out = StrategyProfile::uniform(game);
        for p in Player::BOTH {
            let offsets = out.player(p).offsets().to_vec();
            let s = out.player_mut(p);
            for i in 0..offsets.len() - 1 {
                let acc = &self.avg[p.index()][offsets[i]..offsets[i + 1]];
                let total: f64 = acc.iter().sum();
                if total > 0.0 {
                    for (w, x) in s.get_mut(i).iter_mut().zip(acc) {
                        *w = x / total;
                    }
                }
            }
        }
        out
    }
}

/// State of a vanilla CFR or CFR+ run.
#[derive(Debug, Clone)]
pub struct CfrState<'g> {
    game: &'g Game,
    variant: Variant,
    acc: Accumulators,
    current: StrategyProfile,
    round: usize,
    touched_nodes: u64,
    history: RunHistory,
}

impl<'g> CfrState<'g> {
    pub fn new(game: &'g Game, variant: Variant) -> Self {
        Self {
            game,
            variant,
            acc: Accumulators::new(game),
            current: StrategyProfile::uniform(game),
            round: 0,
            touched_nodes: 0,
            history: RunHistory::default(),
        }
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Rounds completed.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn touched_nodes(&self) -> u64 {
        self.touched_nodes
    }

    pub fn history(&self) -> RunHistory {
        self.history
    }

    /// σ_{t+1}, the strategy the next round will play.
    pub fn current(&self) -> &StrategyProfile {
        &self.current
    }

    pub fn olo(&self, p: Player, i: InfosetId) -> &OloState {
        &self.acc.olo[p.index()][i]
    }

    pub fn average_strategy(&self) -> StrategyProfile {
        self.acc.average(self.game)
    }

    /// One simultaneous round: both players' counterfactual rewards are
    /// computed against the same profile before either strategy changes.
    pub fn step(&mut self) {
        let game = self.game;
        let t = self.round + 1;
        let w = self.variant.weight(t);
        let values = node_values(game, &self.current);
        let r = reach(game, &self.current);
        self.history.record(w, values[0]);

        for p in Player::BOTH {
            let cfv = cfv_from(game, &self.current, p, &values, &r);
            self.touched_nodes += game.tree().len() as u64;
            let idx = game.index(p);
            let strat = self.current.player(p);
            let avg = &mut self.acc.avg[p.index()];
            for (i, info) in idx.owned().iter().enumerate() {
                let own = r.own(p, info.members[0]);
                let off = strat.offsets()[i];
                for (a, s) in strat.get(i).iter().enumerate() {
                    avg[off + a] += w * own * s;
                }
                self.acc.olo[p.index()][i].regret_update(cfv.get(i), self.variant.is_plus());
            }
        }
        for p in Player::BOTH {
            for i in 0..self.game.index(p).num_owned() {
                let next = &self.acc.olo[p.index()][i].current;
                self.current.get_mut(p, i).copy_from_slice(next);
            }
        }
        self.round = t;
    }
}

/// Runs one vanilla CFR round.
pub fn cfr_round(state: &mut CfrState<'_>) {
    debug_assert_eq!(state.variant, Variant::Vanilla);
    state.step();
}

/// Runs one CFR+ round.
pub fn cfr_plus_round(state: &mut CfrState<'_>) {
    debug_assert_eq!(state.variant, Variant::Plus);
    state.step();
}

pub fn average_strategy(state: &CfrState<'_>) -> StrategyProfile {
    state.average_strategy()
}
