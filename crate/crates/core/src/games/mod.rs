//! Built-in game generators.

mod kuhn;
mod leduc;

pub use kuhn::kuhn;
pub use leduc::{leduc, LeducConfig};

use crate::game::{GameSpec, Player, SpecId};

/// A one-shot matrix game as an extensive-form gadget.
///
/// Player one picks a row, then player two picks a column without seeing
/// the row. `payoffs[r][c]` is player one's payoff.
pub fn gadget_matrix(payoffs: &[Vec<f64>]) -> GameSpec {
    let mut g = GameSpec::new();
    let root = g.add_decision(Player::One, ["root", "root"]);
    for (r, row) in payoffs.iter().enumerate() {
        let col = g.add_decision(Player::Two, [&format!("row{r}"), "col"]);
        g.add_edge(root, &format!("r{r}"), col);
        for (c, &u) in row.iter().enumerate() {
            let t = g.add_terminal(u);
            g.add_edge(col, &format!("c{c}"), t);
        }
    }
    g
}

pub fn matching_pennies() -> GameSpec {
    gadget_matrix(&[vec![1.0, -1.0], vec![-1.0, 1.0]])
}

pub fn rock_paper_scissors() -> GameSpec {
    gadget_matrix(&[
        vec![0.0, -1.0, 1.0],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, 0.0],
    ])
}

/// A perfect-information tree where the players alternate, every decision
/// node has `branching` actions and each player moves `depth_per_player`
/// times on every path.
///
/// `utility` receives the leaf's index in left-to-right order.
pub fn alternating_tree(
    branching: usize,
    depth_per_player: usize,
    first: Player,
    mut utility: impl FnMut(usize) -> f64,
) -> GameSpec {
    fn grow(
        g: &mut GameSpec,
        branching: usize,
        levels_left: usize,
        mover: Player,
        leaf: &mut usize,
        utility: &mut dyn FnMut(usize) -> f64,
    ) -> SpecId {
        if levels_left == 0 {
            let u = utility(*leaf);
            *leaf += 1;
            return g.add_terminal(u);
        }
        let node = g.add_perfect_decision(mover);
        for a in 0..branching {
            let c = grow(g, branching, levels_left - 1, mover.opponent(), leaf, utility);
            g.add_edge(node, &format!("a{a}"), c);
        }
        node
    }
    let mut g = GameSpec::new();
    let mut leaf = 0;
    grow(
        &mut g,
        branching,
        2 * depth_per_player,
        first,
        &mut leaf,
        &mut utility,
    );
    g
}
