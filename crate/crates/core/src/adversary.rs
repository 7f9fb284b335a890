//! The lower-bound environment: an oblivious adversary on a full `A`-ary
//! alternating tree that plays a fresh uniformly random pure strategy and
//! fresh ±1 coin-flip terminal utilities every round.
//!
//! Player one is the learner. Each round it commits to a strategy, receives
//! the full counterfactual reward vector of every one of its infosets, and
//! its regret is measured against the best pure strategy in hindsight.
//!
//! Utilities and opponent moves are only randomized inside the restriction
//! set `M`: the histories reachable when the learner plays a strategy that
//! maximizes the total own reach of its infosets. Outside `M` every terminal
//! pays 0, so a learner gains nothing by leaving it.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Actor, Game, GameTree, NodeId, Player, PlayerStrategy};
use crate::games::alternating_tree;
use crate::metrics::{compute_xi, CSV_HEADER};
use crate::olo::OloState;

/// Largest adversary tree [`build_adversary_game`] will build.
pub const MAX_ADVERSARY_NODES: usize = 100_000;

/// Largest number of pure strategies the hindsight search enumerates.
pub const MAX_PURE_STRATEGIES: usize = 1 << 20;

const LEARNER: Player = Player::One;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarySpec {
    /// Actions at every decision, `A ≥ 2`.
    pub branching: usize,
    /// Decisions per player along every path.
    pub depth: usize,
    pub seed: u64,
    pub rounds: usize,
    /// Lets the adversary move first. By default the learner does.
    pub opponent_first: bool,
}

impl AdversarySpec {
    pub fn new(branching: usize, depth: usize) -> Self {
        Self {
            branching,
            depth,
            seed: 0,
            rounds: 1,
            opponent_first: false,
        }
    }

    /// Nodes of the full tree, `Σ_{k=0}^{2d} A^k`, or `None` on overflow.
    pub fn node_count(&self) -> Option<usize> {
        let mut level = 1usize;
        let mut total = 1usize;
        for _ in 0..2 * self.depth {
            level = level.checked_mul(self.branching)?;
            total = total.checked_add(level)?;
        }
        Some(total)
    }
}

/// A game prepared for the adversary: the tree plus the restriction set.
#[derive(Debug, Clone)]
pub struct AdversaryGame {
    game: Game,
    in_m: Vec<bool>,
    xi: f64,
}

impl AdversaryGame {
    /// Wraps any chance-free game; player one is the learner.
    pub fn from_game(game: Game) -> Result<Self> {
        let tree = game.tree();
        if (0..tree.len()).any(|h| tree.actor(h) == Actor::Chance) {
            return Err(Error::Config("adversary games have no chance nodes".into()));
        }
        let in_m = restriction_set(&game);
        let xi = compute_xi(&game, LEARNER);
        Ok(Self { game, in_m, xi })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn tree(&self) -> &GameTree {
        self.game.tree()
    }

    /// Whether history `h` lies in `M`.
    pub fn in_m(&self, h: NodeId) -> bool {
        self.in_m[h]
    }

    /// ξ of the learner.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Owned infosets of the learner.
    pub fn learner_infosets(&self) -> usize {
        self.game.index(LEARNER).num_owned()
    }
}

/// Builds the alternating full `A`-ary tree for `spec`.
pub fn build_adversary_game(spec: &AdversarySpec) -> Result<AdversaryGame> {
    if spec.branching < 2 || spec.depth < 1 {
        return Err(Error::Config(format!(
            "adversary needs branching >= 2 and depth >= 1, got {} and {}",
            spec.branching, spec.depth
        )));
    }
    let nodes = spec.node_count().unwrap_or(usize::MAX);
    if nodes > MAX_ADVERSARY_NODES {
        return Err(Error::TooLarge {
            nodes,
            cap: MAX_ADVERSARY_NODES,
        });
    }
    let first = if spec.opponent_first {
        LEARNER.opponent()
    } else {
        LEARNER
    };
    let game = Game::new(&alternating_tree(spec.branching, spec.depth, first, |_| 0.0))?;
    AdversaryGame::from_game(game)
}

/// Marks the histories reachable under some strategy of the learner that
/// maximizes `Σ_I π^i(I)` over its infosets.
fn restriction_set(game: &Game) -> Vec<bool> {
    let idx = game.index(LEARNER);
    let mut f = vec![0.0; idx.len()];
    let mut per_action: Vec<Vec<f64>> = vec![Vec::new(); idx.len()];
    let mut order: Vec<usize> = (0..idx.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(idx.get(i).depth));
    for i in order {
        let info = idx.get(i);
        f[i] = if idx.is_owned(i) {
            let mut acts = vec![0.0; info.num_actions];
            for &c in &info.children {
                acts[idx.get(c).parent_action.unwrap_or(0)] += f[c];
            }
            let best = acts.iter().copied().fold(0.0, f64::max);
            per_action[i] = acts;
            1.0 + best
        } else {
            info.children.iter().map(|&c| f[c]).sum()
        };
    }

    let tree = game.tree();
    let mut in_m = vec![false; tree.len()];
    if tree.is_empty() {
        return in_m;
    }
    in_m[0] = true;
    for h in 0..tree.len() {
        if !in_m[h] {
            continue;
        }
        match tree.actor(h) {
            Actor::Player(p) if p == LEARNER => {
                let acts = &per_action[game.infoset_of(h)];
                let best = acts.iter().copied().fold(0.0, f64::max);
                for (a, c) in tree.children(h).enumerate() {
                    in_m[c] = acts[a] >= best - 1e-9 * best.max(1.0);
                }
            }
            _ => {
                for c in tree.children(h) {
                    in_m[c] = true;
                }
            }
        }
    }
    in_m
}

/// What the adversary plays in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryRound {
    /// Pure action per opponent infoset.
    pub opponent: Vec<usize>,
    /// Utility of the learner per history; nonzero only at terminals in `M`.
    pub utility: Vec<f64>,
}

/// Samples a round: a uniform action at every opponent infoset in `M`
/// (action 0 elsewhere) and `2·Bernoulli(1/2) − 1` at every terminal in `M`.
pub fn adversary_round(game: &AdversaryGame, rng: &mut impl Rng) -> AdversaryRound {
    let tree = game.tree();
    let opp = LEARNER.opponent();
    let idx = game.game.index(opp);
    let mut opponent = vec![0; idx.num_owned()];
    for (i, info) in idx.owned().iter().enumerate() {
        if info.members.iter().any(|&h| game.in_m[h]) {
            opponent[i] = rng.gen_range(0..info.num_actions);
        }
    }
    let mut utility = vec![0.0; tree.len()];
    for h in 0..tree.len() {
        if tree.is_terminal(h) && game.in_m[h] {
            utility[h] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        }
    }
    AdversaryRound { opponent, utility }
}

/// A full-information learner over the learner's infoset tree.
pub trait OnlineLearner {
    /// Strategy for the coming round over the learner's owned infosets.
    fn strategy(&self) -> &PlayerStrategy;

    /// Counterfactual rewards of the round just played, laid out like
    /// `strategy().flat()`.
    fn observe(&mut self, rewards: &[f64]);
}

/// Regret matching at every infoset, which is CFR seen from one side.
#[derive(Debug, Clone)]
pub struct RmLearner {
    olo: Vec<OloState>,
    strategy: PlayerStrategy,
}

impl RmLearner {
    pub fn new(game: &Game) -> Self {
        let owned = game.index(LEARNER).owned();
        Self {
            olo: owned.iter().map(|i| OloState::new(i.num_actions)).collect(),
            strategy: PlayerStrategy::uniform(owned.iter().map(|i| i.num_actions)),
        }
    }
}

impl OnlineLearner for RmLearner {
    fn strategy(&self) -> &PlayerStrategy {
        &self.strategy
    }

    fn observe(&mut self, rewards: &[f64]) {
        let offsets = self.strategy.offsets().to_vec();
        for (i, olo) in self.olo.iter_mut().enumerate() {
            olo.regret_update(&rewards[offsets[i]..offsets[i + 1]], false);
            self.strategy.get_mut(i).copy_from_slice(&olo.current);
        }
    }
}

/// One learner facing the adversary round after round.
#[derive(Debug, Clone)]
pub struct AdversaryRun<'a, L> {
    game: &'a AdversaryGame,
    learner: L,
    rng: ChaCha8Rng,
    /// `Σ_t π^{-i}_t(z)·u_t(z)` per history.
    weight: Vec<f64>,
    achieved: f64,
    round: usize,
    touched_nodes: u64,
    value: Vec<f64>,
    rewards: Vec<f64>,
}

impl<'a, L: OnlineLearner> AdversaryRun<'a, L> {
    pub fn new(game: &'a AdversaryGame, learner: L, seed: u64) -> Self {
        let n = game.tree().len();
        let flat = learner.strategy().flat().len();
        Self {
            game,
            learner,
            rng: ChaCha8Rng::seed_from_u64(seed),
            weight: vec![0.0; n],
            achieved: 0.0,
            round: 0,
            touched_nodes: 0,
            value: vec![0.0; n],
            rewards: vec![0.0; flat],
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn touched_nodes(&self) -> u64 {
        self.touched_nodes
    }

    pub fn learner(&self) -> &L {
        &self.learner
    }

    /// `Σ_t u_t(σ_t)`.
    pub fn achieved(&self) -> f64 {
        self.achieved
    }

    /// Terminal weights `Σ_t π^{-i}_t(z)·u_t(z)` that define the hindsight
    /// objective.
    pub fn terminal_weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn step(&mut self) {
        let round = adversary_round(self.game, &mut self.rng);
        self.play(&round);
    }

    /// Plays a given adversary round.
    pub fn play(&mut self, round: &AdversaryRound) {
        let game = self.game.game();
        let tree = game.tree();
        let n = tree.len();
        let strategy = self.learner.strategy();

        for h in (0..n).rev() {
            self.value[h] = match tree.actor(h) {
                Actor::Terminal => round.utility[h],
                Actor::Player(p) if p == LEARNER => strategy
                    .get(game.infoset_of(h))
                    .iter()
                    .zip(tree.children(h))
                    .map(|(s, c)| s * self.value[c])
                    .sum(),
                _ => self.value[tree.child(h, round.opponent[game.infoset_of(h)])],
            };
        }
        self.achieved += if n > 0 { self.value[0] } else { 0.0 };

        // π^{-i}_t is 0 or 1: walk the histories the opponent allows
        self.rewards.fill(0.0);
        let offsets = strategy.offsets();
        let mut stack = vec![];
        if n > 0 {
            stack.push(0);
        }
        while let Some(h) = stack.pop() {
            match tree.actor(h) {
                Actor::Terminal => self.weight[h] += round.utility[h],
                Actor::Player(p) if p == LEARNER => {
                    let off = offsets[game.infoset_of(h)];
                    for (a, c) in tree.children(h).enumerate() {
                        self.rewards[off + a] += self.value[c];
                        stack.push(c);
                    }
                }
                _ => stack.push(tree.child(h, round.opponent[game.infoset_of(h)])),
            }
        }
        self.touched_nodes += n as u64;
        self.learner.observe(&self.rewards);
        self.round += 1;
    }

    /// `max_σ Σ_t u_t(σ) − Σ_t u_t(σ_t)`.
    pub fn regret(&self) -> Result<f64> {
        Ok(hindsight_best(self.game.game(), &self.weight)? - self.achieved)
    }
}

/// `max_σ Σ_z π^i_σ(z)·weight[z]` over the learner's pure strategies, by
/// enumerating all of them.
pub fn hindsight_best(game: &Game, weight: &[f64]) -> Result<f64> {
    let tree = game.tree();
    let owned = game.index(LEARNER).owned();
    let mut count = 1usize;
    for info in owned {
        count = count
            .checked_mul(info.num_actions)
            .filter(|&c| c <= MAX_PURE_STRATEGIES)
            .ok_or(Error::TooLarge {
                nodes: usize::MAX,
                cap: MAX_PURE_STRATEGIES,
            })?;
    }
    let mut choice = vec![0usize; owned.len()];
    let mut best = f64::NEG_INFINITY;
    let mut stack = Vec::new();
    loop {
        // value of the pure strategy in `choice`
        let mut total = 0.0;
        if !tree.is_empty() {
            stack.push(0);
        }
        while let Some(h) = stack.pop() {
            match tree.actor(h) {
                Actor::Terminal => total += weight[h],
                Actor::Player(p) if p == LEARNER => {
                    stack.push(tree.child(h, choice[game.infoset_of(h)]))
                }
                _ => stack.extend(tree.children(h)),
            }
        }
        best = best.max(total);

        // odometer over the action choices
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < owned[k].num_actions {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            return Ok(best);
        }
    }
}

/// One checkpoint of the lower-bound harness, averaged over seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundPoint {
    pub round: usize,
    pub touched_nodes: u64,
    pub mean_regret: f64,
    /// `sqrt(ξ·T·ln A)`.
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCurve {
    pub spec: AdversarySpec,
    pub seeds: usize,
    pub xi: f64,
    pub learner_infosets: usize,
    pub points: Vec<LowerBoundPoint>,
}

impl LowerBoundCurve {
    pub fn last(&self) -> Option<&LowerBoundPoint> {
        self.points.last()
    }

    /// The convergence-log CSV plus a `theory_curve` column.
    ///
    /// `avg_regret_p1` holds the mean regret divided by `T` and
    /// `theory_curve` holds `sqrt(ξ·T·ln A) / T`. The adversary has no
    /// exploitability or regret of its own, so those two columns are `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER},theory_curve\n");
        for p in &self.points {
            let t = p.round as f64;
            let _ = writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{},{:.16e}",
                p.round,
                p.touched_nodes,
                f64::NAN,
                p.mean_regret / t,
                f64::NAN,
                self.learner_infosets,
                p.theory / t
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

/// Runs `seeds` independent learners for `spec.rounds` rounds each, with
/// adversary seeds `spec.seed, spec.seed + 1, …`, and records the mean
/// regret every `eval_every` rounds and at the end. Seeds run on separate
/// threads.
pub fn measure_lower_bound<L, F>(
    spec: &AdversarySpec,
    seeds: usize,
    eval_every: usize,
    make_learner: F,
) -> Result<LowerBoundCurve>
where
    L: OnlineLearner,
    F: Fn(&Game) -> L + Sync,
{
    if spec.rounds == 0 || eval_every == 0 || seeds == 0 {
        return Err(Error::Config("rounds, eval cadence and seeds must be positive".into()));
    }
    let game = build_adversary_game(spec)?;
    let checkpoints: Vec<usize> = (1..=spec.rounds)
        .filter(|t| t % eval_every == 0 || *t == spec.rounds)
        .collect();

    let per_seed: Vec<Result<Vec<(u64, f64)>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..seeds as u64)
            .map(|k| {
                let game = &game;
                let make_learner = &make_learner;
                let checkpoints = &checkpoints;
                s.spawn(move || {
                    let mut run =
                        AdversaryRun::new(game, make_learner(game.game()), spec.seed.wrapping_add(k));
                    let mut out = Vec::with_capacity(checkpoints.len());
                    for &t in checkpoints {
                        while run.round() < t {
                            run.step();
                        }
                        out.push((run.touched_nodes(), run.regret()?));
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("seed thread panicked"))
            .collect()
    });
    let per_seed = per_seed.into_iter().collect::<Result<Vec<_>>>()?;

    let ln_a = (spec.branching as f64).ln();
    let points = checkpoints
        .iter()
        .enumerate()
        .map(|(j, &t)| LowerBoundPoint {
            round: t,
            touched_nodes: per_seed[0][j].0,
            mean_regret: per_seed.iter().map(|r| r[j].1).sum::<f64>() / seeds as f64,
            theory: (game.xi() * t as f64 * ln_a).sqrt(),
        })
        .collect();
    Ok(LowerBoundCurve {
        spec: *spec,
        seeds,
        xi: game.xi(),
        learner_infosets: game.learner_infosets(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameSpec;

    /// Backward induction over the learner's infosets; equal to the
    /// exhaustive search on perfect-recall games.
    fn hindsight_best_by_induction(game: &Game, weight: &[f64]) -> f64 {
        fn value(game: &Game, weight: &[f64], choice: &[usize], h: NodeId) -> f64 {
            let tree = game.tree();
            match tree.actor(h) {
                Actor::Terminal => weight[h],
                Actor::Player(p) if p == LEARNER => {
                    value(game, weight, choice, tree.child(h, choice[game.infoset_of(h)]))
                }
                _ => tree.children(h).map(|c| value(game, weight, choice, c)).sum(),
            }
        }
        let idx = game.index(LEARNER);
        let mut choice = vec![0; idx.num_owned()];
        for i in (0..idx.num_owned()).rev() {
            let info = idx.get(i);
            let q = |a: usize, choice: &[usize]| -> f64 {
                info.members
                    .iter()
                    .map(|&h| value(game, weight, choice, game.tree().child(h, a)))
                    .sum()
            };
            choice[i] = (0..info.num_actions)
                .max_by(|&a, &b| q(a, &choice).total_cmp(&q(b, &choice)))
                .unwrap();
        }
        value(game, weight, &choice, 0)
    }

    #[test]
    fn sizes_and_xi() {
        let g = build_adversary_game(&AdversarySpec::new(2, 2)).unwrap();
        assert_eq!(g.tree().terminal_count(), 16);
        assert_eq!(g.xi(), 3.0);
        let g = build_adversary_game(&AdversarySpec::new(3, 1)).unwrap();
        assert_eq!(g.tree().terminal_count(), 9);
        assert!((0..g.tree().len()).all(|h| g.in_m(h)));
    }

    #[test]
    fn size_cap() {
        let err = build_adversary_game(&AdversarySpec::new(10, 3)).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
        assert!(build_adversary_game(&AdversarySpec::new(1, 3)).is_err());
    }

    #[test]
    fn rescaled_utilities_have_zero_mean() {
        let g = build_adversary_game(&AdversarySpec::new(2, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut sum = 0.0;
        let mut count = 0.0;
        for _ in 0..20_000 {
            let r = adversary_round(&g, &mut rng);
            for h in 0..g.tree().len() {
                if g.tree().is_terminal(h) {
                    assert!(r.utility[h] == 1.0 || r.utility[h] == -1.0);
                    sum += r.utility[h];
                    count += 1.0;
                }
            }
        }
        // standard error of the mean is 1 / sqrt(count)
        assert!((sum / count).abs() < 4.0 / f64::sqrt(count));
    }

    #[test]
    fn opponent_actions_are_uniform() {
        let g = build_adversary_game(&AdversarySpec::new(3, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rounds = 10_000;
        let mut hist = [0.0; 3];
        for _ in 0..rounds {
            hist[adversary_round(&g, &mut rng).opponent[0]] += 1.0;
        }
        let expect = rounds as f64 / 3.0;
        let sd = (rounds as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for h in hist {
            assert!((h - expect).abs() < 3.0 * sd, "{hist:?}");
        }
    }

    /// The learner can stop at once (`s`) or continue (`g`) into a binary
    /// alternating subtree that contains another own decision.
    fn lopsided() -> AdversaryGame {
        let text = "node 0 p1\n\
                    terminal 1 0\n\
                    node 2 p2\n\
                    node 3 p1\n\
                    node 4 p1\n\
                    terminal 5 0\nterminal 6 0\nterminal 7 0\nterminal 8 0\n\
                    edge 0 s 1\nedge 0 g 2\nedge 2 l 3\nedge 2 r 4\n\
                    edge 3 a 5\nedge 3 b 6\nedge 4 a 7\nedge 4 b 8";
        AdversaryGame::from_game(Game::new(&GameSpec::parse(text).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn restriction_follows_reach_maximizers() {
        let g = lopsided();
        assert_eq!(g.xi(), 3.0);
        let tree = g.tree();
        let stop = tree.child(0, 0);
        assert!(!g.in_m(stop));
        assert!((0..tree.len()).filter(|&h| h != stop).all(|h| g.in_m(h)));

        // stopping earns nothing whatever the coins say
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut run = AdversaryRun::new(&g, RmLearner::new(g.game()), 3);
        for _ in 0..200 {
            let r = adversary_round(&g, &mut rng);
            assert_eq!(r.utility[stop], 0.0);
            run.play(&r);
        }
        assert_eq!(run.terminal_weights()[stop], 0.0);
    }

    #[test]
    fn exhaustive_search_matches_induction() {
        let g = build_adversary_game(&AdversarySpec::new(2, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let w: Vec<f64> = (0..g.tree().len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let a = hindsight_best(g.game(), &w).unwrap();
            let b = hindsight_best_by_induction(g.game(), &w);
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn one_round_regret_is_within_payoff_range() {
        let g = build_adversary_game(&AdversarySpec::new(2, 2)).unwrap();
        for seed in 0..50 {
            let mut run = AdversaryRun::new(&g, RmLearner::new(g.game()), seed);
            run.step();
            // payoffs span [-1, 1], so one round costs at most the range
            let r = run.regret().unwrap();
            assert!((-1e-12..=2.0).contains(&r), "{r}");
        }
    }

    #[test]
    fn regret_splits_over_opponent_subtrees() {
        // with the opponent at the root, each of its actions opens an
        // independent copy of the learner's problem
        let mut spec = AdversarySpec::new(2, 2);
        spec.opponent_first = true;
        let g = build_adversary_game(&spec).unwrap();
        let tree = g.tree();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut run = AdversaryRun::new(&g, RmLearner::new(g.game()), 5);
        let subtrees: Vec<NodeId> = tree.children(0).collect();
        let mut achieved = vec![0.0; subtrees.len()];
        for _ in 0..500 {
            let r = adversary_round(&g, &mut rng);
            let before = run.achieved();
            run.play(&r);
            achieved[r.opponent[0]] += run.achieved() - before;
        }
        let mut split = 0.0;
        for (k, &root) in subtrees.iter().enumerate() {
            let end = tree.subtree_end(root);
            let w: Vec<f64> = (0..tree.len())
                .map(|h| if (root..end).contains(&h) { run.terminal_weights()[h] } else { 0.0 })
                .collect();
            split += hindsight_best(g.game(), &w).unwrap() - achieved[k];
        }
        assert!((split - run.regret().unwrap()).abs() < 1e-9);
    }
}
