//! Shipped example games, embedded at compile time.

use crate::game::{parse_game, Game};

pub const CHEAT: &str = include_str!("../fixtures/fig-cheat.json");
pub const CHEAT_REPORT: &str = include_str!("../fixtures/fig-cheat-report.json");
pub const BEHAV: &str = include_str!("../fixtures/fig-behav.json");
pub const PURE_GAP_A: &str = include_str!("../fixtures/fig-pure-gap-a.json");
pub const PURE_GAP_B: &str = include_str!("../fixtures/fig-pure-gap-b.json");
pub const YSHAPE: &str = include_str!("../fixtures/fig-yshape.json");
pub const STRONG_A: &str = include_str!("../fixtures/fig-strong-a.json");
pub const STRONG_B: &str = include_str!("../fixtures/fig-strong-b.json");
pub const AMENDMENT: &str = include_str!("../fixtures/amendment-regression.json");

fn load(text: &str) -> Game {
    parse_game(text).expect("shipped fixture parses")
}

/// Follower at the root; misreporting moves the outcome from z2 to z3.
pub fn cheat() -> Game {
    load(CHEAT)
}

/// Leader gains by mixing at her only node.
pub fn behav() -> Game {
    load(BEHAV)
}

pub fn pure_gap_a() -> Game {
    load(PURE_GAP_A)
}

pub fn pure_gap_b() -> Game {
    load(PURE_GAP_B)
}

pub fn yshape() -> Game {
    load(YSHAPE)
}

pub fn strong_a() -> Game {
    load(STRONG_A)
}

pub fn strong_b() -> Game {
    load(STRONG_B)
}

/// Point mass on z2 is inducible through a follower cut below a leader node
/// whose maximin exceeds U_L(z2).
pub fn amendment() -> Game {
    load(AMENDMENT)
}

pub fn all() -> Vec<(&'static str, Game)> {
    vec![
        ("fig-cheat", cheat()),
        ("fig-behav", behav()),
        ("fig-pure-gap-a", pure_gap_a()),
        ("fig-pure-gap-b", pure_gap_b()),
        ("fig-yshape", yshape()),
        ("fig-strong-a", strong_a()),
        ("fig-strong-b", strong_b()),
        ("amendment-regression", amendment()),
    ]
}
