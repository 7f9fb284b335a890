//! Regret of a regret-matching learner against the random lower-bound
//! adversary, next to `sqrt(ξ·T·ln A)`.
//!
//! ```text
//! cargo run --release --example lower_bound -- 2 2 10000 20
//! ```

use lazycfr::adversary::{measure_lower_bound, AdversarySpec, RmLearner};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let get = |k: usize, default: usize| args.get(k).copied().unwrap_or(default);
    let mut spec = AdversarySpec::new(get(0, 2), get(1, 2));
    spec.rounds = get(2, 10_000);
    let seeds = get(3, 20);

    let curve = measure_lower_bound(&spec, seeds, spec.rounds / 10, RmLearner::new)?;
    println!(
        "A = {}, depth {}, ξ = {}, {} learner infosets, {} seeds",
        spec.branching, spec.depth, curve.xi, curve.learner_infosets, seeds
    );
    println!("{:>8} {:>12} {:>16} {:>8}", "T", "mean regret", "sqrt(ξ T ln A)", "ratio");
    for p in &curve.points {
        println!(
            "{:>8} {:>12.3} {:>16.3} {:>8.3}",
            p.round,
            p.mean_regret,
            p.theory,
            p.mean_regret / p.theory
        );
    }
    let d = 2.0 * spec.depth as f64;
    let a = spec.branching as f64;
    let t = spec.rounds as f64;
    println!(
        "upper-bound shape 2·sqrt(2·ξ·D·A·T) = {:.1}",
        2.0 * (2.0 * curve.xi * d * a * t).sqrt()
    );
    Ok(())
}
