mod common;

use common::{random_deal_game, random_profile, xi_brute_force};
use lazycfr::cfr::{CfrState, MccfrState, Variant};
use lazycfr::game::{expected_value, reach, Actor, Game, Player, PlayerStrategy, StrategyProfile};
use lazycfr::games::{gadget_matrix, kuhn};
use lazycfr::lazy::LazyState;
use lazycfr::metrics::{best_response, compute_xi, exploitability, external_regret};
use lazycfr::olo::{collapse_segments, play, play_lazy, OloState, Updater};
use proptest::prelude::*;

fn rewards(max_t: usize, max_a: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_a, 1..=max_t).prop_flat_map(|(a, t)| {
        prop::collection::vec(prop::collection::vec(-1.0f64..=1.0, a), t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reach_factorizes(seed in any::<u64>(), cards in 2usize..4, levels in 1usize..5) {
        let g = random_deal_game(seed, cards, levels);
        let s = random_profile(&g, seed ^ 1);
        let r = reach(&g, &s);
        let tree = g.tree();
        for h in 0..tree.len() {
            let prod = r.own(Player::One, h) * r.own(Player::Two, h) * r.chance(h);
            prop_assert!((r.total(h) - prod).abs() < 1e-15);
            prop_assert!((r.others(Player::One, h) - r.own(Player::Two, h) * r.chance(h)).abs() < 1e-15);
        }
        // the reach of the terminals adds up to one
        let leaves: f64 = (0..tree.len()).filter(|&h| tree.is_terminal(h)).map(|h| r.total(h)).sum();
        prop_assert!((leaves - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_responses_bracket_the_value(seed in any::<u64>(), levels in 1usize..5) {
        let g = random_deal_game(seed, 3, levels);
        let s = random_profile(&g, seed ^ 2);
        let v = expected_value(&g, &s);
        let (_, b1) = best_response(&g, &s, Player::One);
        let (_, b2) = best_response(&g, &s, Player::Two);
        prop_assert!(b1 >= v - 1e-12);
        prop_assert!(b2 >= -v - 1e-12);
        prop_assert!(exploitability(&g, &s) >= -1e-12);
    }

    #[test]
    fn infosets_partition_decisions(seed in any::<u64>(), cards in 2usize..4, levels in 1usize..5) {
        let g = random_deal_game(seed, cards, levels);
        let tree = g.tree();
        for p in Player::BOTH {
            let idx = g.index(p);
            let members: usize = idx.owned().iter().map(|i| i.members.len()).sum();
            let decisions = (0..tree.len()).filter(|&h| tree.actor(h) == Actor::Player(p)).count();
            prop_assert_eq!(members, decisions);
            let mut seen = vec![false; tree.len()];
            for info in idx.owned() {
                for &h in &info.members {
                    prop_assert!(!seen[h]);
                    seen[h] = true;
                }
            }
        }
    }

    #[test]
    fn successors_skip_to_next_own_infoset(seed in any::<u64>(), levels in 1usize..6) {
        let g = random_deal_game(seed, 3, levels);
        for p in Player::BOTH {
            let idx = g.index(p);
            for (i, info) in idx.owned().iter().enumerate() {
                for &(a, c) in &info.succ {
                    prop_assert!(idx.is_owned(c));
                    prop_assert_eq!(idx.get(c).owned_parent, Some((i, a)));
                }
            }
            for c in 0..idx.num_owned() {
                if let Some((i, a)) = idx.get(c).owned_parent {
                    prop_assert!(idx.get(i).succ.contains(&(a, c)));
                }
            }
        }
    }

    #[test]
    fn rm_plus_regrets_stay_nonnegative(seq in rewards(60, 6)) {
        let mut s = OloState::new(seq[0].len());
        for r in &seq {
            s.rm_plus_step(r).unwrap();
            prop_assert!(s.cumulative_regret.iter().all(|&x| x >= 0.0));
            prop_assert!((s.current.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lazy_schedule_replays_collapsed_sequence(
        seq in rewards(60, 5),
        cuts in prop::collection::vec(1usize..8, 1..20),
        plus in any::<bool>(),
    ) {
        // segment lengths covering exactly the sequence
        let mut lengths = Vec::new();
        let mut left = seq.len();
        for c in cuts.into_iter().cycle() {
            if left == 0 { break; }
            let l = c.min(left);
            lengths.push(l);
            left -= l;
        }
        let u = if plus { Updater::RmPlus } else { Updater::Rm };
        let lazy = play_lazy(u, &seq, &lengths).unwrap();
        let collapsed = play(u, &collapse_segments(&seq, &lengths).unwrap()).unwrap();
        let mut t = 0;
        for (j, &l) in lengths.iter().enumerate() {
            for _ in 0..l {
                prop_assert_eq!(&lazy[t], &collapsed[j]);
                t += 1;
            }
        }
    }

    #[test]
    fn exploitability_ignores_action_order(
        seed in any::<u64>(),
        rows in 1usize..5,
        cols in 1usize..5,
    ) {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
        let mut pr: Vec<usize> = (0..rows).collect();
        let mut pc: Vec<usize> = (0..cols).collect();
        pr.shuffle(&mut rng);
        pc.shuffle(&mut rng);
        let permuted: Vec<Vec<f64>> = pr.iter().map(|&r| pc.iter().map(|&c| m[r][c]).collect()).collect();

        let g = Game::new(&gadget_matrix(&m)).unwrap();
        let gp = Game::new(&gadget_matrix(&permuted)).unwrap();
        let s = random_profile(&g, seed);
        let mut sp = StrategyProfile::uniform(&gp);
        let x: Vec<f64> = pr.iter().map(|&r| s.get(Player::One, 0)[r]).collect();
        let y: Vec<f64> = pc.iter().map(|&c| s.get(Player::Two, 0)[c]).collect();
        sp.set(Player::One, 0, &x);
        sp.set(Player::Two, 0, &y);
        prop_assert!((exploitability(&g, &s) - exploitability(&gp, &sp)).abs() < 1e-12);
    }

    #[test]
    fn xi_matches_enumeration(seed in any::<u64>(), levels in 1usize..4) {
        let g = random_deal_game(seed, 2, levels);
        for p in Player::BOTH {
            if g.index(p).num_owned() <= 14 {
                prop_assert_eq!(compute_xi(&g, p), xi_brute_force(&g, p));
            }
        }
    }

    #[test]
    fn external_regret_matches_pure_strategy_oracle(seed in any::<u64>(), levels in 1usize..4, plus in any::<bool>()) {
        let g = random_deal_game(seed, 2, levels);
        let variant = if plus { Variant::Plus } else { Variant::Vanilla };
        let mut cfr = CfrState::new(&g, variant);
        let mut played = Vec::new();
        for t in 1..=15 {
            played.push((variant.weight(t), cfr.current().clone()));
            cfr.step();
        }
        let regret = external_regret(&g, &cfr.history(), &cfr.average_strategy());
        for p in Player::BOTH {
            let owned = g.index(p).owned();
            if owned.iter().map(|i| i.num_actions as f64).product::<f64>() > 4096.0 {
                continue;
            }
            // every pure strategy against the sequence actually played
            let mut choice = vec![0usize; owned.len()];
            let mut best = f64::NEG_INFINITY;
            loop {
                let mut pure = PlayerStrategy::uniform(owned.iter().map(|i| i.num_actions));
                for (i, &a) in choice.iter().enumerate() {
                    let w = pure.get_mut(i);
                    w.fill(0.0);
                    w[a] = 1.0;
                }
                let total: f64 = played.iter().map(|(w, s)| {
                    let mut prof = s.clone();
                    *prof.player_mut(p) = pure.clone();
                    w * p.sign() * expected_value(&g, &prof)
                }).sum();
                best = best.max(total);
                let mut k = 0;
                while k < choice.len() {
                    choice[k] += 1;
                    if choice[k] < owned[k].num_actions { break; }
                    choice[k] = 0;
                    k += 1;
                }
                if k == choice.len() { break; }
            }
            let achieved: f64 = played.iter().map(|(w, s)| w * p.sign() * expected_value(&g, s)).sum();
            prop_assert!((regret[p.index()] - (best - achieved)).abs() < 1e-9 * (1.0 + best.abs()));
        }
    }

    #[test]
    fn zero_threshold_lazy_tracks_cfr(seed in any::<u64>(), levels in 1usize..5, plus in any::<bool>()) {
        let g = random_deal_game(seed, 3, levels);
        let variant = if plus { Variant::Plus } else { Variant::Vanilla };
        let mut lazy = LazyState::new(&g, variant, 0.0);
        let mut cfr = CfrState::new(&g, variant);
        for _ in 0..20 {
            lazy.step();
            cfr.step();
            for p in Player::BOTH {
                for (x, y) in lazy.current().player(p).flat().iter().zip(cfr.current().player(p).flat()) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn lazy_average_is_a_distribution(seed in any::<u64>(), theta in 0.0f64..3.0) {
        let g = random_deal_game(seed, 3, 4);
        let mut lazy = LazyState::new(&g, Variant::Vanilla, theta);
        for _ in 0..30 {
            lazy.step();
        }
        prop_assert!(lazy.average_strategy().validate(&g).is_ok());
        prop_assert!(exploitability(&g, &lazy.average_strategy()) >= -1e-12);
    }
}

/// Averaged over many independent first rounds, the sampled regrets equal
/// the full-traversal regrets.
#[test]
fn mccfr_first_round_is_unbiased() {
    let g = Game::new(&kuhn()).unwrap();
    let mut truth = CfrState::new(&g, Variant::Vanilla);
    truth.step();
    let n = 40_000;
    for p in Player::BOTH {
        for i in 0..g.index(p).num_owned() {
            let k = g.index(p).get(i).num_actions;
            let mut sum = vec![0.0; k];
            let mut sq = vec![0.0; k];
            for seed in 0..n {
                let mut mc = MccfrState::new(&g, seed);
                mc.step();
                for (a, &r) in mc.olo(p, i).cumulative_regret.iter().enumerate() {
                    sum[a] += r;
                    sq[a] += r * r;
                }
            }
            for a in 0..k {
                let mean = sum[a] / n as f64;
                let var = sq[a] / n as f64 - mean * mean;
                let se = (var / n as f64).sqrt();
                let exact = truth.olo(p, i).cumulative_regret[a];
                assert!(
                    (mean - exact).abs() <= 5.0 * se + 1e-12,
                    "{p:?} infoset {i} action {a}: {mean} vs {exact} (se {se})"
                );
            }
        }
    }
}
