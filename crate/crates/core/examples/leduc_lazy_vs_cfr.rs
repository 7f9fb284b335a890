//! Touched nodes needed by CFR and Lazy-CFR to reach an exploitability target
//! on Leduc hold'em.
//!
//! ```text
//! cargo run --release --example leduc_lazy_vs_cfr -- 5 0.05
//! ```

use std::time::Instant;

use lazycfr::cfr::{CfrState, Variant};
use lazycfr::game::Game;
use lazycfr::games::{leduc, LeducConfig};
use lazycfr::lazy::LazyState;
use lazycfr::metrics::exploitability;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let bet_max: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let target: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.05);
    let variant = match args.next().as_deref() {
        Some("plus") => Variant::Plus,
        _ => Variant::Vanilla,
    };

    let start = Instant::now();
    let game = Game::new(&leduc(&LeducConfig::with_bet_maximum(bet_max))?)?;
    println!(
        "leduc-{bet_max}: {} nodes, {} infosets (built in {:.1?})",
        game.tree().len(),
        game.num_infosets(),
        start.elapsed()
    );

    let start = Instant::now();
    let mut cfr = CfrState::new(&game, variant);
    let cfr_nodes = loop {
        cfr.step();
        if cfr.round() % 5 == 0 {
            let e = exploitability(&game, &cfr.average_strategy());
            if e <= target {
                break cfr.touched_nodes();
            }
        }
    };
    println!(
        "cfr:  {} rounds, {cfr_nodes} touched nodes ({:.1?})",
        cfr.round(),
        start.elapsed()
    );

    let start = Instant::now();
    let mut lazy = LazyState::new(&game, variant, 1.0);
    let mut updated = 0usize;
    let lazy_nodes = loop {
        lazy.step();
        updated += lazy.updated_last_round();
        if lazy.round() % 5 == 0 {
            let e = exploitability(&game, &lazy.average_strategy());
            if e <= target {
                break lazy.touched_nodes();
            }
        }
    };
    println!(
        "lazy: {} rounds, {lazy_nodes} touched nodes, {:.1} updated infosets per round ({:.1?})",
        lazy.round(),
        updated as f64 / lazy.round() as f64,
        start.elapsed()
    );
    println!("ratio: {:.2}", cfr_nodes as f64 / lazy_nodes as f64);
    Ok(())
}
