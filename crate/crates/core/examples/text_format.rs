//! Describing a game in the text format, solving it and printing the
//! average strategy.
//!
//! Player one picks a side; player two guesses it without seeing the pick.
//! A right guess pays player two, a wrong one pays player one, and guessing
//! the left side right costs player one twice as much.

use lazycfr::cfr::{CfrState, Variant};
use lazycfr::game::{Game, GameSpec, Player};
use lazycfr::metrics::exploitability;

const GAME: &str = "\
# p1 picks, p2 guesses without seeing the pick
node 0 p1 root root
node 1 p2 picked_left guess
node 2 p2 picked_right guess
terminal 3 -2
terminal 4 1
terminal 5 1
terminal 6 -1
edge 0 left 1
edge 0 right 2
edge 1 left 3
edge 1 right 4
edge 2 left 5
edge 2 right 6
";

fn main() -> lazycfr::Result<()> {
    let spec = GameSpec::parse(GAME)?;
    let game = Game::new(&spec)?;
    let mut cfr = CfrState::new(&game, Variant::Plus);
    for _ in 0..2000 {
        cfr.step();
    }
    let avg = cfr.average_strategy();
    for p in Player::BOTH {
        for (i, info) in game.index(p).owned().iter().enumerate() {
            println!("{p:?} at `{}`: {:?} -> {:.4?}", info.label, info.action_labels, avg.get(p, i));
        }
    }
    println!("exploitability {:.2e}", exploitability(&game, &avg));
    println!("round trip:\n{}", spec.to_text());
    Ok(())
}
