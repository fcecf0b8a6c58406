//! Seeded random game generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Game, GameTree, NodeId, PayoffFunction, Player, RawKind, RawNode};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_depth: usize,
    pub max_branch: usize,
    /// Inclusive bounds on the number of leaves.
    pub leaf_count_range: (usize, usize),
    pub payoff_grid: Vec<Rational>,
    /// Probability that an internal node belongs to the leader.
    pub owner_bias: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_depth: 4,
            max_branch: 3,
            leaf_count_range: (2, 8),
            payoff_grid: (-3..=3).map(Rational::from_int).collect(),
            owner_bias: 0.5,
        }
    }
}

impl GenParams {
    fn capacity(&self, depth: usize) -> u128 {
        let mut cap: u128 = 1;
        for _ in 0..depth {
            cap = cap.saturating_mul(self.max_branch as u128);
        }
        cap
    }

    fn check(&self) -> Result<()> {
        let (lo, hi) = self.leaf_count_range;
        if lo == 0 || lo > hi {
            return Err(Error::Bounds(format!("leaf range [{lo}, {hi}]")));
        }
        if self.payoff_grid.is_empty() {
            return Err(Error::Bounds("empty payoff grid".into()));
        }
        if !(0.0..=1.0).contains(&self.owner_bias) {
            return Err(Error::Bounds(format!("owner bias {}", self.owner_bias)));
        }
        if lo > 1 && self.max_branch < 2 {
            return Err(Error::Bounds(
                "branching below 2 allows a single leaf only".into(),
            ));
        }
        if self.capacity(self.max_depth) < lo as u128 {
            return Err(Error::Bounds(format!(
                "depth {} with branching {} cannot hold {lo} leaves",
                self.max_depth, self.max_branch
            )));
        }
        Ok(())
    }
}

/// Draws a game. Identical `(params, seed)` give identical games. Internal
/// nodes have between 2 and `max_branch` children and leaves are labelled
/// `z0, z1, ...` in preorder.
pub fn random_game(params: &GenParams, seed: u64) -> Result<Game> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = params.leaf_count_range;
    let hi = hi.min(params.capacity(params.max_depth).min(usize::MAX as u128) as usize);
    let n = rng.gen_range(lo..=hi);

    let mut raw = Vec::with_capacity(2 * n);
    // (parent, leaves in this subtree, remaining depth)
    let mut stack: Vec<(Option<NodeId>, usize, usize)> = vec![(None, n, params.max_depth)];
    while let Some((parent, leaves, depth)) = stack.pop() {
        let id = raw.len();
        if leaves == 1 {
            raw.push(RawNode {
                parent,
                kind: RawKind::Leaf(String::new()),
            });
            continue;
        }
        let owner = if rng.gen_bool(params.owner_bias) {
            Player::Leader
        } else {
            Player::Follower
        };
        raw.push(RawNode {
            parent,
            kind: RawKind::Internal(owner),
        });
        let cap = params.capacity(depth - 1).min(leaves as u128) as usize;
        let k_lo = leaves.div_ceil(cap).max(2);
        let k_hi = params.max_branch.min(leaves);
        let k = rng.gen_range(k_lo..=k_hi);
        let parts = split(&mut rng, leaves, k, cap);
        for &m in parts.iter().rev() {
            stack.push((Some(id), m, depth - 1));
        }
    }
    let mut next = 0;
    for node in raw.iter_mut() {
        if let RawKind::Leaf(label) = &mut node.kind {
            *label = format!("z{next}");
            next += 1;
        }
    }
    let tree = GameTree::from_preorder(raw)?;
    let grid = &params.payoff_grid;
    let mut draw = |_| grid[rng.gen_range(0..grid.len())].clone();
    let ul = PayoffFunction::from_fn(&tree, &mut draw);
    let uf = PayoffFunction::from_fn(&tree, &mut draw);
    Ok(Game { tree, ul, uf })
}

/// Random composition of `total` into `k` positive parts, each at most `cap`.
fn split(rng: &mut impl Rng, total: usize, k: usize, cap: usize) -> Vec<usize> {
    let mut parts = vec![1; k];
    let mut rem = total - k;
    while rem > 0 {
        let i = rng.gen_range(0..k);
        let room = cap - parts[i];
        if room == 0 {
            continue;
        }
        let add = rng.gen_range(1..=room.min(rem));
        parts[i] += add;
        rem -= add;
    }
    parts
}
