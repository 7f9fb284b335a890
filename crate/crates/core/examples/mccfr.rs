//! Outcome-sampling MC-CFR on Kuhn poker next to vanilla CFR, at equal
//! touched-node budgets.

use lazycfr::cfr::{CfrState, MccfrState, Variant};
use lazycfr::game::Game;
use lazycfr::games::kuhn;
use lazycfr::metrics::exploitability;

fn main() -> lazycfr::Result<()> {
    let game = Game::new(&kuhn())?;
    let mut cfr = CfrState::new(&game, Variant::Vanilla);
    let mut mc = MccfrState::new(&game, 42);
    println!("{:>10} {:>14} {:>14}", "nodes", "cfr", "mccfr");
    for budget in [1_000u64, 10_000, 100_000, 1_000_000] {
        while cfr.touched_nodes() < budget {
            cfr.step();
        }
        while mc.touched_nodes() < budget {
            mc.step();
        }
        println!(
            "{budget:>10} {:>14.4e} {:>14.4e}",
            exploitability(&game, &cfr.average_strategy()),
            exploitability(&game, &mc.average_strategy())
        );
    }
    Ok(())
}
