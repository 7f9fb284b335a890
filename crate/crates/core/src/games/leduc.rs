use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameSpec, Player, SpecId};

/// Parameters of a Leduc hold'em variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeducConfig {
    /// Raises each player may make per betting round.
    pub bet_maximum: u32,
    pub ante: f64,
    /// Raise size in the first and second round.
    pub round_bet_sizes: [f64; 2],
}

impl Default for LeducConfig {
    fn default() -> Self {
        Self {
            bet_maximum: 1,
            ante: 1.0,
            round_bet_sizes: [2.0, 4.0],
        }
    }
}

impl LeducConfig {
    pub fn with_bet_maximum(bet_maximum: u32) -> Self {
        Self {
            bet_maximum,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bet_maximum == 0 {
            return Err(Error::Config("bet_maximum must be at least 1".into()));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.ante) || !self.round_bet_sizes.iter().all(|&b| positive(b)) {
            return Err(Error::Config("ante and bet sizes must be positive".into()));
        }
        Ok(())
    }

    /// Largest amount a player can lose: the normalization factor of the
    /// generated game.
    pub fn max_payoff(&self) -> f64 {
        let k = 2.0 * self.bet_maximum as f64;
        self.ante + k * self.round_bet_sizes[0] + k * self.round_bet_sizes[1]
    }
}

const RANKS: [char; 3] = ['J', 'Q', 'K'];

/// Physical card `c` in `0..6`: rank `c / 2`, suit `c % 2`.
fn card_name(c: usize) -> String {
    format!("{}{}", RANKS[c / 2], if c.is_multiple_of(2) { 's' } else { 'h' })
}

/// Higher is better: pairs above all high cards.
fn hand_strength(private: usize, board: usize) -> usize {
    let (r, b) = (private / 2, board / 2);
    if r == b {
        10 + r
    } else {
        r
    }
}

struct Deal {
    cards: [usize; 2],
    board: Option<usize>,
}

struct Builder<'a> {
    cfg: &'a LeducConfig,
    spec: GameSpec,
}

#[derive(Clone)]
struct Betting {
    round: usize,
    contrib: [f64; 2],
    raises: [u32; 2],
    facing_bet: bool,
    to_act: Player,
    /// Public action history, rounds separated by `/`.
    history: String,
    actions_this_round: usize,
}

impl Builder<'_> {
    fn label(&self, p: Player, deal: &Deal, hist: &str) -> String {
        let own = card_name(deal.cards[p.index()]);
        match deal.board {
            Some(b) => format!("{own}:{}:{hist}", card_name(b)),
            None => format!("{own}:{hist}"),
        }
    }

    fn showdown(&self, deal: &Deal, contrib: [f64; 2]) -> f64 {
        let b = deal.board.expect("showdown needs a board card");
        let s1 = hand_strength(deal.cards[0], b);
        let s2 = hand_strength(deal.cards[1], b);
        match s1.cmp(&s2) {
            std::cmp::Ordering::Greater => contrib[1],
            std::cmp::Ordering::Less => -contrib[0],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Builds the subtree where `st.to_act` is about to move.
    fn betting(&mut self, deal: &mut Deal, st: Betting) -> SpecId {
        let p = st.to_act;
        let l1 = self.label(Player::One, deal, &st.history);
        let l2 = self.label(Player::Two, deal, &st.history);
        let node = self.spec.add_decision(p, [&l1, &l2]);
        let me = p.index();
        let size = self.cfg.round_bet_sizes[st.round];

        // check or call
        let mut next = st.clone();
        next.contrib[me] = st.contrib[1 - me];
        next.history.push('c');
        next.actions_this_round += 1;
        let round_over = st.facing_bet || st.actions_this_round >= 1;
        let child = if !round_over {
            next.to_act = p.opponent();
            self.betting(deal, next)
        } else if st.round == 0 {
            self.board(deal, next)
        } else {
            let u = self.showdown(deal, next.contrib);
            self.spec.add_terminal(u)
        };
        self.spec.add_edge(node, "c", child);

        if st.raises[me] < self.cfg.bet_maximum {
            let mut next = st.clone();
            next.contrib[me] = st.contrib[1 - me] + size;
            next.raises[me] += 1;
            next.facing_bet = true;
            next.to_act = p.opponent();
            next.history.push('r');
            next.actions_this_round += 1;
            let child = self.betting(deal, next);
            self.spec.add_edge(node, "r", child);
        }

        if st.facing_bet {
            let u = if p == Player::One {
                -st.contrib[0]
            } else {
                st.contrib[1]
            };
            let child = self.spec.add_terminal(u);
            self.spec.add_edge(node, "f", child);
        }
        node
    }

    fn board(&mut self, deal: &mut Deal, st: Betting) -> SpecId {
        let rest: Vec<usize> = (0..6).filter(|c| !deal.cards.contains(c)).collect();
        let node = self.spec.add_chance(vec![1.0 / rest.len() as f64; rest.len()]);
        for &b in &rest {
            deal.board = Some(b);
            let mut next = st.clone();
            next.round = 1;
            next.raises = [0, 0];
            next.facing_bet = false;
            next.to_act = Player::One;
            next.history.push('/');
            next.actions_this_round = 0;
            let child = self.betting(deal, next);
            self.spec.add_edge(node, &card_name(b), child);
        }
        deal.board = None;
        node
    }
}

/// Leduc hold'em over a six-card deck (two suits of J, Q, K).
///
/// Each player antes, receives one private card, and a betting round
/// follows; then one public card is revealed and a second betting round is
/// played with a doubled raise size. Player one acts first in both rounds.
/// Each player may raise at most `bet_maximum` times per round; fold is only
/// available when facing a raise. At showdown a pair with the board wins,
/// otherwise the higher rank; equal ranks split the pot.
///
/// Cards are kept physically distinct in infoset labels, so the two suits of
/// a rank give different (strategically equivalent) infosets.
pub fn leduc(cfg: &LeducConfig) -> Result<GameSpec> {
    cfg.validate()?;
    let mut b = Builder {
        cfg,
        spec: GameSpec::new(),
    };
    let root = b.spec.add_chance(vec![1.0 / 30.0; 30]);
    for c1 in 0..6 {
        for c2 in 0..6 {
            if c1 == c2 {
                continue;
            }
            let mut deal = Deal {
                cards: [c1, c2],
                board: None,
            };
            let st = Betting {
                round: 0,
                contrib: [cfg.ante; 2],
                raises: [0, 0],
                facing_bet: false,
                to_act: Player::One,
                history: String::new(),
                actions_this_round: 0,
            };
            let child = b.betting(&mut deal, st);
            let label = format!("{}{}", card_name(c1), card_name(c2));
            b.spec.add_edge(root, &label, child);
        }
    }
    Ok(b.spec)
}
