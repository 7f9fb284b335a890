use std::time::Instant;

use lazycfr::game::{Game, Player};
use lazycfr::games::{leduc, LeducConfig};

fn sizes(k: u32) -> (usize, usize) {
    let g = Game::new(&leduc(&LeducConfig::with_bet_maximum(k)).unwrap()).unwrap();
    assert_eq!(g.index(Player::One).num_owned(), g.index(Player::Two).num_owned());
    (g.num_infosets(), g.tree().len())
}

#[test]
fn golden_counts() {
    assert_eq!(sizes(1), (936, 9_451));
    assert_eq!(sizes(2), (2_760, 29_971));
    assert_eq!(sizes(5), (13_992, 160_651));
    assert_eq!(sizes(10), (51_912, 608_851));
}

#[test]
fn bet_maximum_fifteen_is_over_a_hundred_thousand_infosets() {
    let start = Instant::now();
    let (infosets, nodes) = sizes(15);
    assert_eq!((infosets, nodes), (113_832, 1_345_051));
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn zero_bet_maximum_is_rejected() {
    assert!(leduc(&LeducConfig::with_bet_maximum(0)).is_err());
}
