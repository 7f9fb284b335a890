//! ξ, infoset counts and depth for the built-in games.

use lazycfr::game::Game;
use lazycfr::games::{alternating_tree, kuhn, leduc, LeducConfig};
use lazycfr::game::Player;
use lazycfr::metrics::XiReport;

fn main() -> lazycfr::Result<()> {
    let mut games = vec![("kuhn".to_string(), Game::new(&kuhn())?)];
    for k in [1, 2, 5] {
        games.push((format!("leduc-{k}"), Game::new(&leduc(&LeducConfig::with_bet_maximum(k))?)?));
    }
    for d in [2, 4, 6] {
        games.push((
            format!("binary alternating, depth {d}"),
            Game::new(&alternating_tree(2, d, Player::One, |_| 0.0))?,
        ));
    }
    println!("{:<32} {:>10} {:>10} {:>12} {:>12} {:>6}", "game", "|I1|", "|I2|", "ξ1", "ξ2", "depth");
    for (name, game) in &games {
        let r = XiReport::new(game);
        println!(
            "{name:<32} {:>10} {:>10} {:>12} {:>12} {:>6}",
            r.infosets[0], r.infosets[1], r.xi_per_player[0], r.xi_per_player[1], r.depth
        );
    }
    Ok(())
}
