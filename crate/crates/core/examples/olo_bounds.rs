//! Regret of regret matching, RM+ and tuned Hedge on random reward
//! sequences, against their worst-case bounds, plus the effect of holding
//! the strategy fixed over segments.

use lazycfr::olo::{measure_olo_regret, play, play_lazy, sum_sq_norms, tuned_hedge_rate, Updater};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lazycfr::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (t, a) = (200, 5);
    let rewards: Vec<Vec<f64>> = (0..t)
        .map(|_| (0..a).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let sq = sum_sq_norms(&rewards);
    let max_sq = rewards
        .iter()
        .flatten()
        .map(|c| c * c)
        .fold(0.0, f64::max);
    let rate = tuned_hedge_rate(a, t, max_sq);

    for (name, u) in [("rm", Updater::Rm), ("rm+", Updater::RmPlus), ("hedge", Updater::Hedge { rate })] {
        let r = measure_olo_regret(&rewards, &play(u, &rewards)?)?;
        println!("{name:>6}: regret {r:8.3}");
    }
    println!("rm bound 2·sqrt(2·Σ‖c‖²) = {:.3}", 2.0 * (2.0 * sq).sqrt());
    println!(
        "hedge bound 4·sqrt(ln A·Σ max c²) = {:.3}",
        4.0 * ((a as f64).ln() * t as f64 * max_sq).sqrt()
    );

    // the same sequence played lazily in segments of 10
    let lengths = vec![10; t / 10];
    let r = measure_olo_regret(&rewards, &play_lazy(Updater::Rm, &rewards, &lengths)?)?;
    println!("lazy rm (segments of 10): regret {r:8.3}");
    Ok(())
}
