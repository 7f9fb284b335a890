//! Lazy-CFR and Lazy-CFR+.
//!
//! An infoset's strategy is only updated once the opponent-and-chance reach
//! that arrived at it since its last update reaches the threshold θ. Between
//! updates its counterfactual reward is accumulated in segments: reach mass
//! waits at the infoset's histories and is multiplied by the (unchanged)
//! subtree values only when it is harvested, or earlier when some strategy
//! below it is about to change.
//!
//! State per player:
//!
//! * `pend[h]`: reach mass waiting at an owned history `h`, not yet banked
//!   into the counterfactual reward or pushed further down.
//! * `m1[h]`: reach mass arrived at `h` since its infoset's last strategy
//!   update, measured per private deal (see below); the trigger compares
//!   `Σ_{h∈I} m1[h]` with θ.
//! * `cfv`: the running segment sum of counterfactual rewards per action.
//! * `own_mass[I]`: own reach times averaging weight not yet folded into the
//!   average strategy.
//!
//! Shared state: the player-one value `v[h]` of every history under the
//! committed profile, and a per-history stamp of the last round in which a
//! strategy at or below it changed.
//!
//! The trigger mass does not count the chance moves that happen before the
//! first decision. Those moves deal private information, and every deal
//! enters the trigger with mass 1 times the opponent's reach. In poker this
//! means `Σ_{h∈I} m1[h]` sums the opponent's reach over the opponent's
//! possible hands, instead of weighting each hand by its deal probability.
//! Without any leading chance node the two measures coincide.
//!
//! New strategies computed during a round are committed only at its end,
//! so every read within a round sees σ_t and both players update
//! simultaneously. With θ = 0 every infoset is updated every round and the
//! trajectory coincides with full-traversal CFR.

use std::collections::VecDeque;

use crate::cfr::{RunHistory, Variant};
use crate::game::{Actor, Game, InfosetId, NodeId, Player, StrategyProfile};
use crate::olo::OloState;

const TRIGGER_SLACK: f64 = 1e-12;

/// One strategy update of one infoset, recorded when instrumentation is on.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvestEvent {
    pub round: usize,
    pub player: Player,
    pub infoset: InfosetId,
    /// The segment sum of counterfactual rewards fed to the updater.
    pub cfv: Vec<f64>,
    /// `Σ_{h∈I} m1[h]` at the update.
    pub trigger_mass: f64,
    /// Depth of the infoset in its player's infoset tree.
    pub depth: usize,
}

/// Counters that hold across the whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LazyStats {
    pub harvests: u64,
    /// Harvests whose reach mass `Σ_{h∈I} π^{-i}` accumulated since the
    /// previous update exceeded the infoset depth.
    pub depth_violations: u64,
    /// Largest `reach mass / depth` seen.
    pub max_mass_ratio: f64,
}

#[derive(Debug, Clone)]
struct Side {
    olo: Vec<OloState>,
    avg: Vec<f64>,
    cfv: Vec<f64>,
    own_mass: Vec<f64>,
    pend: Vec<f64>,
    m1: Vec<f64>,
    segments: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct LazyState<'g> {
    game: &'g Game,
    variant: Variant,
    theta: f64,
    sigma: StrategyProfile,
    sides: [Side; 2],
    v: Vec<f64>,
    trigger_scale: Vec<f64>,
    flag: Vec<u32>,
    round: usize,
    touched_nodes: u64,
    history: RunHistory,
    updated_last_round: usize,
    updated_this_round: usize,
    changed: Vec<(Player, InfosetId)>,
    queue: VecDeque<InfosetId>,
    stack: Vec<(NodeId, f64)>,
    flagged: Vec<NodeId>,
    events: Option<Vec<HarvestEvent>>,
    stats: LazyStats,
}

impl<'g> LazyState<'g> {
    /// `threshold` is θ; 1 is the usual trigger and 0 updates everything
    /// every round.
    pub fn new(game: &'g Game, variant: Variant, threshold: f64) -> Self {
        assert!(threshold >= 0.0, "threshold must be nonnegative");
        let sigma = StrategyProfile::uniform(game);
        let n = game.tree().len();
        let side = |p: Player| {
            let idx = game.index(p);
            let flat = sigma.player(p).flat().len();
            Side {
                olo: idx.owned().iter().map(|i| OloState::new(i.num_actions)).collect(),
                avg: vec![0.0; flat],
                cfv: vec![0.0; flat],
                own_mass: vec![0.0; idx.num_owned()],
                pend: vec![0.0; n],
                m1: vec![0.0; n],
                segments: vec![0; idx.num_owned()],
            }
        };
        let sides = [side(Player::One), side(Player::Two)];
        let v = crate::game::node_values(game, &sigma);
        let trigger_scale = deal_scale(game);
        Self {
            game,
            variant,
            theta: threshold,
            sigma,
            sides,
            v,
            trigger_scale,
            flag: vec![0; n],
            round: 0,
            touched_nodes: 0,
            history: RunHistory::default(),
            updated_last_round: 0,
            updated_this_round: 0,
            changed: Vec::new(),
            queue: VecDeque::new(),
            stack: Vec::new(),
            flagged: Vec::new(),
            events: None,
            stats: LazyStats::default(),
        }
    }

    /// Starts recording a [`HarvestEvent`] for every strategy update.
    pub fn record_events(&mut self) {
        self.events.get_or_insert_with(Vec::new);
    }

    /// Returns and clears the recorded events.
    pub fn take_events(&mut self) -> Vec<HarvestEvent> {
        self.events.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn threshold(&self) -> f64 {
        self.theta
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

    pub fn stats(&self) -> LazyStats {
        self.stats
    }

    /// The committed profile, i.e. the strategy the next round plays.
    pub fn current(&self) -> &StrategyProfile {
        &self.sigma
    }

    /// Infosets updated in the last completed round, over both players.
    pub fn updated_last_round(&self) -> usize {
        self.updated_last_round
    }

    /// Number of strategy updates `n(I)` so far.
    pub fn segment_count(&self, p: Player, i: InfosetId) -> u32 {
        self.sides[p.index()].segments[i]
    }

    /// `Σ_{h∈I} m1[h]` for an owned infoset.
    pub fn trigger_mass(&self, p: Player, i: InfosetId) -> f64 {
        let m1 = &self.sides[p.index()].m1;
        self.game.index(p).get(i).members.iter().map(|&h| m1[h]).sum()
    }

    /// Cached player-one value of `h` under the committed profile.
    pub fn cached_value(&self, h: NodeId) -> f64 {
        self.v[h]
    }

    pub fn olo(&self, p: Player, i: InfosetId) -> &OloState {
        &self.sides[p.index()].olo[i]
    }

    /// One round: push this round's reach from the root, update triggered
    /// infosets top-down for each player, then refresh values.
    pub fn step(&mut self) {
        let game = self.game;
        let t = self.round + 1;
        let w = self.variant.weight(t);
        if game.tree().is_empty() {
            self.round = t;
            return;
        }
        self.history.record(w, self.v[0]);
        self.updated_this_round = 0;
        let root = game.tree().root();
        for p in Player::BOTH {
            self.descend(p, root, 1.0);
            let side = &mut self.sides[p.index()];
            for &i in game.index(p).owned_roots() {
                side.own_mass[i] += w;
            }
            self.queue.extend(game.index(p).owned_roots().iter().copied());
            self.drain(p);
        }
        self.refresh_values();
        self.round = t;
        self.updated_last_round = self.updated_this_round;
    }

    /// Adds reach mass (one entry per member history) to `p`'s infoset `i`.
    ///
    /// For an owned infoset the mass is accumulated and, when the trigger
    /// fires, the infoset and every triggered descendant are updated; returns
    /// whether that happened. For an opponent infoset the mass is pushed down
    /// through the opponent's current strategy until it reaches `p`'s own
    /// histories.
    pub fn propagate_reach(&mut self, p: Player, i: InfosetId, reach: &[f64]) -> bool {
        let idx = self.game.index(p);
        let info = idx.get(i);
        assert_eq!(reach.len(), info.members.len(), "one mass per member history");
        if idx.is_owned(i) {
            let side = &mut self.sides[p.index()];
            for (&h, &m) in info.members.iter().zip(reach) {
                side.pend[h] += m;
                side.m1[h] += m * self.trigger_scale[h];
            }
            if self.trigger_mass(p, i) + TRIGGER_SLACK >= self.theta {
                self.queue.push_back(i);
                self.drain(p);
                return true;
            }
            false
        } else {
            for (&h, &m) in info.members.iter().zip(reach) {
                if m != 0.0 {
                    self.descend(p, h, m);
                }
            }
            false
        }
    }

    fn drain(&mut self, p: Player) {
        while let Some(i) = self.queue.pop_front() {
            self.harvest(p, i);
        }
    }

    /// Pushes `mass` into `start` and onward through non-owned histories.
    fn descend(&mut self, p: Player, start: NodeId, mass: f64) {
        let game = self.game;
        let tree = game.tree();
        let side = &mut self.sides[p.index()];
        self.stack.push((start, mass));
        while let Some((x, m)) = self.stack.pop() {
            self.touched_nodes += 1;
            match tree.actor(x) {
                Actor::Player(q) if q == p => {
                    side.pend[x] += m;
                    side.m1[x] += m * self.trigger_scale[x];
                }
                Actor::Terminal => {}
                _ => {
                    let probs = game.action_probs(&self.sigma, x);
                    for (c, &q) in tree.children(x).zip(probs) {
                        if q > 0.0 {
                            self.stack.push((c, m * q));
                        }
                    }
                }
            }
        }
    }

    /// Banks the mass waiting at owned history `h` against the cached child
    /// values and pushes it below `h`.
    fn flush(&mut self, p: Player, h: NodeId) {
        let tree = self.game.tree();
        let side = &mut self.sides[p.index()];
        let m = side.pend[h];
        if m == 0.0 {
            return;
        }
        side.pend[h] = 0.0;
        let off = self.sigma.player(p).offsets()[self.game.infoset_of(h)];
        let sign = p.sign();
        for (a, c) in tree.children(h).enumerate() {
            side.cfv[off + a] += m * sign * self.v[c];
        }
        for c in tree.children(h) {
            self.descend(p, c, m);
        }
    }

    fn harvest(&mut self, p: Player, i: InfosetId) {
        let game = self.game;
        let info = game.index(p).get(i);
        let mut trigger = 0.0;
        let mut reach_mass = 0.0;
        for &h in &info.members {
            self.touched_nodes += 1;
            let side = &mut self.sides[p.index()];
            trigger += side.m1[h];
            reach_mass += side.m1[h] / self.trigger_scale[h];
            side.m1[h] = 0.0;
            self.flush(p, h);
        }

        self.stats.harvests += 1;
        let depth = info.depth;
        let ratio = reach_mass / depth as f64;
        if ratio > self.stats.max_mass_ratio {
            self.stats.max_mass_ratio = ratio;
        }
        if reach_mass > depth as f64 + 1e-9 {
            self.stats.depth_violations += 1;
        }

        let off = self.sigma.player(p).offsets()[i];
        let k = info.num_actions;
        let sigma_i = self.sigma.get(p, i);
        let side = &mut self.sides[p.index()];
        let om = side.own_mass[i];
        if om != 0.0 {
            side.own_mass[i] = 0.0;
            for (a, s) in sigma_i.iter().enumerate() {
                side.avg[off + a] += om * s;
            }
            for &(a, c) in &info.succ {
                side.own_mass[c] += om * sigma_i[a];
            }
        }

        let cfv = &mut side.cfv[off..off + k];
        if let Some(events) = self.events.as_mut() {
            events.push(HarvestEvent {
                round: self.round + 1,
                player: p,
                infoset: i,
                cfv: cfv.to_vec(),
                trigger_mass: trigger,
                depth,
            });
        }
        side.olo[i].regret_update(cfv, self.variant.is_plus());
        cfv.fill(0.0);
        side.segments[i] += 1;
        self.updated_this_round += 1;
        if side.olo[i].current != sigma_i {
            self.changed.push((p, i));
        }

        for &(_, c) in &info.succ {
            let mass: f64 = game
                .index(p)
                .get(c)
                .members
                .iter()
                .map(|&h| side.m1[h])
                .sum();
            if mass + TRIGGER_SLACK >= self.theta {
                self.queue.push_back(c);
            }
        }
    }

    /// Commits the strategies changed this round and recomputes cached
    /// values on every history at or above a change.
    ///
    /// Mass still waiting at an affected history is first banked with the
    /// old values and pushed down with the old strategies, so that every
    /// segment sum stays exact. Returns the number of nodes touched.
    pub fn refresh_values(&mut self) -> u64 {
        let before = self.touched_nodes;
        if self.changed.is_empty() {
            return 0;
        }
        let game = self.game;
        let tree = game.tree();
        let stamp = self.round as u32 + 1;
        self.flagged.clear();
        for &(p, i) in &self.changed {
            for &h in &game.index(p).get(i).members {
                let mut x = Some(h);
                while let Some(y) = x {
                    if self.flag[y] == stamp {
                        break;
                    }
                    self.flag[y] = stamp;
                    self.flagged.push(y);
                    x = tree.parent(y);
                }
            }
        }
        self.flagged.sort_unstable();

        let flagged = std::mem::take(&mut self.flagged);
        for &x in &flagged {
            if let Actor::Player(q) = tree.actor(x) {
                if self.sides[q.index()].pend[x] != 0.0 {
                    self.touched_nodes += 1;
                    self.flush(q, x);
                }
            }
        }
        for (p, i) in std::mem::take(&mut self.changed) {
            let next = &self.sides[p.index()].olo[i].current;
            self.sigma.get_mut(p, i).copy_from_slice(next);
        }
        for &x in flagged.iter().rev() {
            self.touched_nodes += 1;
            if !tree.is_terminal(x) {
                let probs = game.action_probs(&self.sigma, x);
                self.v[x] = tree.children(x).zip(probs).map(|(c, q)| q * self.v[c]).sum();
            }
        }
        self.flagged = flagged;
        self.touched_nodes - before
    }

    /// The weighted average strategy, including own reach that is still
    /// waiting above some infosets. Does not modify the state.
    pub fn average_strategy(&self) -> StrategyProfile {
        let mut out = StrategyProfile::uniform(self.game);
        for p in Player::BOTH {
            let idx = self.game.index(p);
            let side = &self.sides[p.index()];
            let offsets = self.sigma.player(p).offsets();
            let mut eff = side.own_mass.clone();
            for i in 0..idx.num_owned() {
                if let Some((par, a)) = idx.get(i).owned_parent {
                    eff[i] += eff[par] * self.sigma.get(p, par)[a];
                }
                let sig = self.sigma.get(p, i);
                let acc = &side.avg[offsets[i]..offsets[i + 1]];
                let total: Vec<f64> = acc.iter().zip(sig).map(|(x, s)| x + eff[i] * s).collect();
                let z: f64 = total.iter().sum();
                if z > 0.0 {
                    for (o, x) in out.get_mut(p, i).iter_mut().zip(&total) {
                        *o = x / z;
                    }
                }
            }
        }
        out
    }
}

/// One Lazy-CFR round.
/// `1 / Π q` over the chance moves on the path to `h` that precede every
/// decision.
fn deal_scale(game: &Game) -> Vec<f64> {
    let tree = game.tree();
    let mut scale = vec![1.0; tree.len()];
    let mut dealing = vec![false; tree.len()];
    if let Some(first) = dealing.first_mut() {
        *first = true;
    }
    for h in 0..tree.len() {
        if dealing[h] && tree.actor(h) == Actor::Chance {
            for (c, &q) in tree.children(h).zip(tree.chance_probs(h)) {
                dealing[c] = true;
                scale[c] = if q > 0.0 { scale[h] / q } else { scale[h] };
            }
        } else {
            for c in tree.children(h) {
                scale[c] = scale[h];
            }
        }
    }
    scale
}

pub fn lazy_round(state: &mut LazyState<'_>) {
    debug_assert_eq!(state.variant, Variant::Vanilla);
    state.step();
}

/// One Lazy-CFR+ round.
pub fn lazy_plus_round(state: &mut LazyState<'_>) {
    debug_assert_eq!(state.variant, Variant::Plus);
    state.step();
}
