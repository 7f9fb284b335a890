#![allow(dead_code)]

use lazycfr::game::{Actor, Game, GameSpec, Player, SpecId};

/// `max_σ Σ_I π^i_σ(I)` by enumerating every pure strategy of `player`.
pub fn xi_brute_force(game: &Game, player: Player) -> f64 {
    let tree = game.tree();
    let owned = game.index(player).owned();
    let mut choice = vec![0usize; owned.len()];
    let mut best = 0usize;
    loop {
        let mut reached = vec![false; owned.len()];
        let mut stack = vec![tree.root()];
        while let Some(h) = stack.pop() {
            match tree.actor(h) {
                Actor::Terminal => {}
                Actor::Player(p) if p == player => {
                    let i = game.infoset_of(h);
                    reached[i] = true;
                    stack.push(tree.child(h, choice[i]));
                }
                _ => stack.extend(tree.children(h)),
            }
        }
        best = best.max(reached.iter().filter(|&&r| r).count());
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
            return best as f64;
        }
    }
}

/// Perfect-information binary tree with `levels` alternating decision
/// levels, player one at the root, zero payoffs.
pub fn binary_alternating(levels: usize) -> Game {
    fn grow(g: &mut GameSpec, left: usize, mover: Player) -> SpecId {
        if left == 0 {
            return g.add_terminal(0.0);
        }
        let node = g.add_perfect_decision(mover);
        for a in ["l", "r"] {
            let c = grow(g, left - 1, mover.opponent());
            g.add_edge(node, a, c);
        }
        node
    }
    let mut g = GameSpec::new();
    grow(&mut g, levels, Player::One);
    Game::new(&g).unwrap()
}

/// A random perfect-recall poker-like game: chance deals each player a
/// distinct private card out of `cards`, then the players alternate over a
/// random public action tree of at most `max_levels` decisions. Infosets
/// are labelled by own card plus public history, and payoffs are random.
pub fn random_deal_game(seed: u64, cards: usize, max_levels: usize) -> Game {
    use rand::{Rng, SeedableRng};

    #[derive(Clone)]
    enum Public {
        Leaf,
        Node(Vec<Public>),
    }
    fn shape(rng: &mut rand_chacha::ChaCha8Rng, left: usize) -> Public {
        if left == 0 || (left < 3 && rng.gen_bool(0.3)) {
            return Public::Leaf;
        }
        let k = rng.gen_range(1..=3);
        Public::Node((0..k).map(|_| shape(rng, left - 1)).collect())
    }
    fn grow(
        g: &mut GameSpec,
        rng: &mut rand_chacha::ChaCha8Rng,
        node: &Public,
        hist: &str,
        deal: (usize, usize),
        mover: Player,
    ) -> SpecId {
        match node {
            Public::Leaf => g.add_terminal(rng.gen_range(-2.0..=2.0)),
            Public::Node(kids) => {
                let l1 = format!("{}|{hist}", deal.0);
                let l2 = format!("{}|{hist}", deal.1);
                let id = g.add_decision(mover, [&l1, &l2]);
                for (a, kid) in kids.iter().enumerate() {
                    let c = grow(g, rng, kid, &format!("{hist}{a}"), deal, mover.opponent());
                    g.add_edge(id, &format!("a{a}"), c);
                }
                id
            }
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let public = shape(&mut rng, max_levels);
    let deals: Vec<(usize, usize)> = (0..cards)
        .flat_map(|a| (0..cards).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut g = GameSpec::new();
    let root = g.add_chance(vec![1.0 / deals.len() as f64; deals.len()]);
    for (k, &deal) in deals.iter().enumerate() {
        let c = grow(&mut g, &mut rng, &public, "", deal, Player::One);
        g.add_edge(root, &format!("d{k}"), c);
    }
    Game::new(&g).unwrap()
}

/// A random behavior profile for `game`.
pub fn random_profile(game: &Game, seed: u64) -> lazycfr::game::StrategyProfile {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = lazycfr::game::StrategyProfile::uniform(game);
    for p in Player::BOTH {
        for i in 0..game.index(p).num_owned() {
            let w = s.get_mut(p, i);
            let mut total = 0.0;
            for x in w.iter_mut() {
                // some exact zeros so unreachable branches get exercised
                *x = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.01..1.0) };
                total += *x;
            }
            if total == 0.0 {
                w[0] = 1.0;
                total = 1.0;
            }
            for x in w.iter_mut() {
                *x /= total;
            }
        }
    }
    s
}
