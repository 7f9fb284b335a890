use crate::game::{GameSpec, Player};

const CARDS: [&str; 3] = ["J", "Q", "K"];

/// Three-card Kuhn poker.
///
/// Each player antes one chip and is dealt one of J, Q, K. Player one may
/// check (`x`) or bet (`b`) one chip; facing a bet a player folds (`f`) or
/// calls (`c`). Payoffs are ±1 or ±2 chips.
///
/// Infoset labels are `<own card>:<betting history>`, e.g. `Q:xb`.
pub fn kuhn() -> GameSpec {
    let mut g = GameSpec::new();
    let probs = vec![1.0 / 6.0; 6];
    let root = g.add_chance(probs);
    for c1 in 0..3 {
        for c2 in 0..3 {
            if c1 == c2 {
                continue;
            }
            let (a, b) = (CARDS[c1], CARDS[c2]);
            let show = if c1 > c2 { 1.0 } else { -1.0 };
            let dec = |g: &mut GameSpec, p: Player, hist: &str| {
                g.add_decision(p, [&format!("{a}:{hist}"), &format!("{b}:{hist}")])
            };

            let p1 = dec(&mut g, Player::One, "");
            g.add_edge(root, &format!("{a}{b}"), p1);

            let after_x = dec(&mut g, Player::Two, "x");
            g.add_edge(p1, "x", after_x);
            let xx = g.add_terminal(show);
            g.add_edge(after_x, "x", xx);
            let after_xb = dec(&mut g, Player::One, "xb");
            g.add_edge(after_x, "b", after_xb);
            let xbf = g.add_terminal(-1.0);
            g.add_edge(after_xb, "f", xbf);
            let xbc = g.add_terminal(2.0 * show);
            g.add_edge(after_xb, "c", xbc);

            let after_b = dec(&mut g, Player::Two, "b");
            g.add_edge(p1, "b", after_b);
            let bf = g.add_terminal(1.0);
            g.add_edge(after_b, "f", bf);
            let bc = g.add_terminal(2.0 * show);
            g.add_edge(after_b, "c", bc);
        }
    }
    g
}
