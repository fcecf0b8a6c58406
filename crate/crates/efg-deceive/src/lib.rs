//! Exact Stackelberg equilibria on perfect-information game trees, and the
//! follower's payoff misreporting problem.
//!
//! All arithmetic is over exact rationals. The modules build on each other
//! bottom-up: [`game`] and [`maximin`] are the core, [`equilibrium`] solves
//! SSEs, [`inducibility`] and [`strong`] analyse misreports, and [`oracle`]
//! holds brute-force checkers used by the test suites.

pub mod cli;
pub mod dot;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod frontier;
pub mod game;
pub mod generate;
pub mod inducibility;
pub mod maximin;
pub mod oracle;
pub mod rational;
pub mod strong;

pub use error::{Error, Result};
pub use game::{Game, GameTree, LeafDistribution, NodeId, PayoffFunction, Player};
pub use rational::Rational;
