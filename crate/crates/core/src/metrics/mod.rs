//! Best responses, exploitability, external regret, ξ and convergence logs.

mod log;

pub use log::{ConvergenceLog, LogRecord, CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::cfr::RunHistory;
use crate::game::{Actor, Game, NodeId, Player, PlayerStrategy, StrategyProfile};

/// A pure best response for `player` against the other side of `profile`,
/// and its value `max_σ' u^player(σ', σ^{-player})` in normalized units.
///
/// Ties are broken toward the lowest action index.
pub fn best_response(game: &Game, profile: &StrategyProfile, player: Player) -> (PlayerStrategy, f64) {
    let tree = game.tree();
    let idx = game.index(player);
    let n = tree.len();

    // π^{-p}(h)
    let mut others = vec![0.0; n];
    if n > 0 {
        others[0] = 1.0;
    }
    for h in 0..n {
        if others[h] == 0.0 {
            continue;
        }
        match tree.actor(h) {
            Actor::Player(p) if p == player => {
                for c in tree.children(h) {
                    others[c] = others[h];
                }
            }
            Actor::Terminal => {}
            _ => {
                let probs = game.action_probs(profile, h);
                for (c, q) in tree.children(h).zip(probs) {
                    others[c] = others[h] * q;
                }
            }
        }
    }

    let mut choice = vec![0usize; idx.num_owned()];
    let mut memo = vec![f64::NAN; n];
    // children infosets come later in first-appearance order
    for i in (0..idx.num_owned()).rev() {
        let info = idx.get(i);
        let mut best = f64::NEG_INFINITY;
        for a in 0..info.num_actions {
            let mut q = 0.0;
            for &h in &info.members {
                if others[h] > 0.0 {
                    q += others[h] * value(game, profile, player, &choice, &mut memo, tree.child(h, a));
                }
            }
            if q > best {
                best = q;
                choice[i] = a;
            }
        }
    }
    let v = if n == 0 {
        0.0
    } else {
        value(game, profile, player, &choice, &mut memo, 0)
    };

    let mut strat = PlayerStrategy::uniform(idx.owned().iter().map(|i| i.num_actions));
    for (i, &a) in choice.iter().enumerate() {
        let s = strat.get_mut(i);
        s.fill(0.0);
        s[a] = 1.0;
    }
    (strat, v)
}

fn value(
    game: &Game,
    profile: &StrategyProfile,
    player: Player,
    choice: &[usize],
    memo: &mut [f64],
    h: NodeId,
) -> f64 {
    if !memo[h].is_nan() {
        return memo[h];
    }
    let tree = game.tree();
    let v = match tree.actor(h) {
        Actor::Terminal => player.sign() * tree.node(h).utility,
        Actor::Player(p) if p == player => {
            let a = choice[game.infoset_of(h)];
            value(game, profile, player, choice, memo, tree.child(h, a))
        }
        _ => {
            let probs = game.action_probs(profile, h);
            let mut v = 0.0;
            for (a, &q) in probs.iter().enumerate() {
                if q > 0.0 {
                    v += q * value(game, profile, player, choice, memo, tree.child(h, a));
                }
            }
            v
        }
    };
    memo[h] = v;
    v
}

/// Sum of both players' best-response values; 0 exactly at a Nash
/// equilibrium. Normalized units.
pub fn exploitability(game: &Game, profile: &StrategyProfile) -> f64 {
    let (_, b1) = best_response(game, profile, Player::One);
    let (_, b2) = best_response(game, profile, Player::Two);
    b1 + b2
}

/// `R^i = W·BR_i(σ̄^{-i}) − Σ_t w_t·u^i(σ_t)` for both players, where `W` is
/// the total averaging weight and `average` is the weighted average profile.
pub fn external_regret(game: &Game, history: &RunHistory, average: &StrategyProfile) -> [f64; 2] {
    Player::BOTH.map(|p| {
        let (_, br) = best_response(game, average, p);
        history.weight * br - history.achieved[p.index()]
    })
}

/// `ξ^i`: the largest total own-reach over `player`'s infosets achievable by
/// any strategy of that player.
pub fn compute_xi(game: &Game, player: Player) -> f64 {
    let idx = game.index(player);
    let mut f = vec![0.0; idx.len()];
    // deepest infosets first
    let mut order: Vec<usize> = (0..idx.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(idx.get(i).depth));
    for i in order {
        let info = idx.get(i);
        f[i] = if idx.is_owned(i) {
            let mut per_action = vec![0.0; info.num_actions];
            for &c in &info.children {
                let a = idx.get(c).parent_action.unwrap_or(0);
                per_action[a] += f[c];
            }
            1.0 + per_action.iter().copied().fold(0.0, f64::max)
        } else {
            info.children.iter().map(|&c| f[c]).sum()
        };
    }
    idx.roots().iter().map(|&r| f[r]).sum()
}

/// ξ for both players together with the sizes it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiReport {
    pub xi_per_player: [f64; 2],
    pub xi: f64,
    pub infosets: [usize; 2],
    pub depth: usize,
}

impl XiReport {
    pub fn new(game: &Game) -> Self {
        let xi_per_player = Player::BOTH.map(|p| compute_xi(game, p));
        Self {
            xi_per_player,
            xi: xi_per_player[0].max(xi_per_player[1]),
            infosets: Player::BOTH.map(|p| game.index(p).num_owned()),
            depth: game.tree().depth(),
        }
    }
}

/// `Σ_{I owned by player} Σ_{h∈I} π^{-i}_σ(h)`.
pub fn reach_mass_diagnostic(game: &Game, profile: &StrategyProfile, player: Player) -> f64 {
    let r = crate::game::reach(game, profile);
    let tree = game.tree();
    (0..tree.len())
        .filter(|&h| tree.actor(h) == Actor::Player(player))
        .map(|h| r.others(player, h))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::expected_value;
    use crate::games::{gadget_matrix, kuhn, matching_pennies, rock_paper_scissors};

    #[test]
    fn pennies_uniform_is_unexploitable() {
        let g = Game::new(&matching_pennies()).unwrap();
        let s = StrategyProfile::uniform(&g);
        let (br, v) = best_response(&g, &s, Player::One);
        assert_eq!(v, 0.0);
        assert_eq!(br.get(0), &[1.0, 0.0]);
        assert_eq!(exploitability(&g, &s), 0.0);
        let g = Game::new(&rock_paper_scissors()).unwrap();
        assert!(exploitability(&g, &StrategyProfile::uniform(&g)).abs() < 1e-15);
    }

    #[test]
    fn kuhn_always_fold_is_punished_by_betting() {
        let g = Game::new(&kuhn()).unwrap();
        let mut s = StrategyProfile::uniform(&g);
        // player two folds to every bet and checks behind
        for i in 0..g.index(Player::Two).num_owned() {
            s.set(Player::Two, i, &[1.0, 0.0]);
        }
        let (br, v) = best_response(&g, &s, Player::One);
        for (i, info) in g.index(Player::One).owned().iter().enumerate() {
            match info.label.as_str() {
                "J:" | "Q:" => assert_eq!(br.get(i), &[0.0, 1.0]),
                // the king wins the showdown after a check as well; the tie
                // goes to the lower action
                "K:" => assert_eq!(br.get(i), &[1.0, 0.0]),
                _ => {}
            }
        }
        // every deal wins the ante
        assert!((v * g.tree().scale() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kuhn_uniform_exploitability_golden() {
        let g = Game::new(&kuhn()).unwrap();
        let e = exploitability(&g, &StrategyProfile::uniform(&g));
        // player one's best response earns 1/2 chip against uniform, player
        // two's earns 5/12 chips; in normalized units divide by 2
        assert!((e - (0.5 + 5.0 / 12.0) / 2.0).abs() < 1e-12, "{e}");
    }

    #[test]
    fn best_response_dominates_fixed_strategies() {
        let g = Game::new(&kuhn()).unwrap();
        let mut s = StrategyProfile::uniform(&g);
        let (_, b) = best_response(&g, &s, Player::One);
        for i in 0..6 {
            s.set(Player::One, i, &[0.3, 0.7]);
            assert!(expected_value(&g, &s) <= b + 1e-12);
        }
    }

    #[test]
    fn xi_examples() {
        let g = Game::new(&gadget_matrix(&[vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert_eq!(compute_xi(&g, Player::One), 1.0);
        let g = Game::new(&kuhn()).unwrap();
        assert_eq!(compute_xi(&g, Player::One), 6.0);
        assert_eq!(compute_xi(&g, Player::Two), 6.0);
        let r = XiReport::new(&g);
        assert_eq!(r.xi, 6.0);
        assert_eq!(r.infosets, [6, 6]);
    }

    #[test]
    fn root_only_reach_mass() {
        let g = Game::new(&gadget_matrix(&[vec![1.0, 2.0]])).unwrap();
        let s = StrategyProfile::uniform(&g);
        assert_eq!(reach_mass_diagnostic(&g, &s, Player::One), 1.0);
    }
}
