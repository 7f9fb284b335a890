//! Vanilla CFR and CFR+ on Kuhn poker, printing exploitability and the
//! first player's average value against the known game value of −1/18.

use lazycfr::cfr::{CfrState, Variant};
use lazycfr::game::{expected_value, Game};
use lazycfr::games::kuhn;
use lazycfr::metrics::exploitability;

fn main() -> lazycfr::Result<()> {
    let game = Game::new(&kuhn())?;
    let scale = game.tree().scale();
    for variant in [Variant::Vanilla, Variant::Plus] {
        println!("{variant:?}");
        let mut cfr = CfrState::new(&game, variant);
        for checkpoint in [10, 100, 1000, 10_000] {
            while cfr.round() < checkpoint {
                cfr.step();
            }
            let avg = cfr.average_strategy();
            println!(
                "  round {checkpoint:>6}: exploitability {:.2e}, value {:+.5} chips (target {:+.5})",
                exploitability(&game, &avg),
                expected_value(&game, &avg) * scale,
                -1.0 / 18.0
            );
        }
    }
    Ok(())
}
