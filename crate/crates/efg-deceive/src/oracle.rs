//! Brute-force ground truth for small games.
//!
//! Everything here enumerates: leader pure strategies, weak orders over the
//! leaves as candidate misreports, grid behavioral strategies. Caps are
//! explicit and exceeding one is an error.

use std::collections::BTreeSet;

use crate::equilibrium::{feasible_distribution, solve_sse_behavioral, Commitment};
use crate::error::{Error, Result};
use crate::game::{
    first_split, Game, GameTree, LeafDistribution, NodeId, PayoffFunction, Player, RawKind, RawNode,
};
use crate::maximin::maximin_values;
use crate::rational::Rational;

pub const DEFAULT_BUDGET: u128 = 10_000_000;
/// Largest leaf count the weak-order sweep accepts (4683 orders at six).
pub const WEAK_ORDER_MAX_LEAVES: usize = 6;

/// The oracle cap, overridable through `EFG_BUDGET`.
pub fn budget() -> u128 {
    std::env::var("EFG_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

type Mask = u128;

fn strategy_count(tree: &GameTree, player: Player) -> u128 {
    tree.nodes_of(player).fold(1u128, |acc, v| {
        acc.saturating_mul(tree.children(v).len() as u128)
    })
}

/// Leaves consistent with each pure strategy of `player`, deduplicated.
fn strategy_masks(tree: &GameTree, player: Player, budget: u128) -> Result<Vec<Mask>> {
    if tree.num_leaves() > Mask::BITS as usize {
        return Err(Error::TooLarge(tree.num_leaves()));
    }
    let needed = strategy_count(tree, player);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let nodes: Vec<NodeId> = tree.nodes_of(player).collect();
    let mut choice = vec![0usize; tree.len()];
    let mut out = BTreeSet::new();
    loop {
        out.insert(consistent(tree, player, &choice, tree.root()));
        // odometer over the player's nodes
        let mut k = 0;
        loop {
            if k == nodes.len() {
                return Ok(out.into_iter().collect());
            }
            let v = nodes[k];
            choice[v] += 1;
            if choice[v] < tree.children(v).len() {
                break;
            }
            choice[v] = 0;
            k += 1;
        }
    }
}

fn consistent(tree: &GameTree, player: Player, choice: &[usize], v: NodeId) -> Mask {
    match tree.owner(v) {
        None => 1 << tree.leaf_index(v).expect("leaf"),
        Some(p) if p == player => consistent(tree, player, choice, tree.children(v)[choice[v]]),
        Some(_) => tree
            .children(v)
            .iter()
            .fold(0, |m, &c| m | consistent(tree, player, choice, c)),
    }
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..Mask::BITS as usize).filter(move |i| m >> i & 1 == 1)
}

/// Dense ranks, so that order comparisons run on integers.
fn ranks(u: &PayoffFunction) -> Vec<u32> {
    let mut vals: Vec<&Rational> = u.values().iter().collect();
    vals.sort();
    vals.dedup();
    u.values()
        .iter()
        .map(|x| vals.binary_search(&x).expect("present") as u32)
        .collect()
}

/// Follower best-response outcome sets, one per leader strategy mask.
fn response_masks(lmasks: &[Mask], report: &[u32]) -> Vec<Mask> {
    let mut out: Vec<Mask> = lmasks
        .iter()
        .map(|&m| {
            let top = bits(m).map(|i| report[i]).max().expect("nonempty");
            bits(m)
                .filter(|&i| report[i] == top)
                .fold(0, |r, i| r | 1 << i)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// SSE leaf set from response masks: leaves of maximal leader rank.
fn sse_mask(rmasks: &[Mask], ul: &[u32]) -> Mask {
    let best = rmasks
        .iter()
        .flat_map(|&m| bits(m))
        .map(|i| ul[i])
        .max()
        .expect("nonempty");
    rmasks.iter().fold(0, |acc, &m| {
        acc | bits(m)
            .filter(|&i| ul[i] == best)
            .fold(0, |r, i| r | 1 << i)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureSseSet {
    pub value: Rational,
    /// Leaf indices reached by some SSE with pure commitment.
    pub leaves: BTreeSet<usize>,
}

/// Every leader pure strategy against its full best-response set.
pub fn brute_sse_pure(
    tree: &GameTree,
    ul: &PayoffFunction,
    report: &PayoffFunction,
    budget: u128,
) -> Result<PureSseSet> {
    let needed =
        strategy_count(tree, Player::Leader).saturating_mul(strategy_count(tree, Player::Follower));
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let lmasks = strategy_masks(tree, Player::Leader, budget)?;
    let rmasks = response_masks(&lmasks, &ranks(report));
    let m = sse_mask(&rmasks, &ranks(ul));
    let leaves: BTreeSet<usize> = bits(m).collect();
    let value = ul.get(*leaves.first().expect("nonempty")).clone();
    Ok(PureSseSet { value, leaves })
}

/// `M_i(root)` by pure-profile enumeration: the best strategy for `player`
/// against the worst consistent leaf.
pub fn brute_maximin(
    tree: &GameTree,
    payoffs: &PayoffFunction,
    player: Player,
    budget: u128,
) -> Result<Rational> {
    let masks = strategy_masks(tree, player, budget)?;
    Ok(masks
        .iter()
        .map(|&m| {
            bits(m)
                .map(|i| payoffs.get(i))
                .min()
                .expect("nonempty")
                .clone()
        })
        .max()
        .expect("at least one strategy"))
}

/// Ordered set partitions of `n` leaves, as level vectors (level 0 lowest).
pub fn weak_orders(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut levels = vec![0u32; n];
    loop {
        let k = levels.iter().max().map_or(0, |&m| m + 1);
        if (0..k).all(|l| levels.contains(&l)) {
            out.push(levels.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            levels[i] += 1;
            if (levels[i] as usize) < n {
                break;
            }
            levels[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LeafVerdict {
    pub inducible: bool,
    pub strongly_inducible: bool,
}

/// The weak-order misreport sweep for one tree. Response sets depend on
/// the tree and the order only, so they are computed once and reused for
/// every leader payoff vector.
pub struct WeakOrderOracle {
    rmasks: Vec<Vec<Mask>>,
}

impl WeakOrderOracle {
    pub fn new(tree: &GameTree, budget: u128) -> Result<Self> {
        let n = tree.num_leaves();
        if n > WEAK_ORDER_MAX_LEAVES {
            return Err(Error::TooLarge(n));
        }
        let lmasks = strategy_masks(tree, Player::Leader, budget)?;
        let orders = weak_orders(n);
        let needed = (orders.len() as u128).saturating_mul(lmasks.len() as u128);
        if needed > budget {
            return Err(Error::Budget { needed, budget });
        }
        Ok(WeakOrderOracle {
            rmasks: orders.iter().map(|o| response_masks(&lmasks, o)).collect(),
        })
    }

    pub fn analyze(&self, ul: &PayoffFunction) -> Vec<LeafVerdict> {
        let r = ranks(ul);
        let mut out = vec![LeafVerdict::default(); ul.len()];
        for rm in &self.rmasks {
            let m = sse_mask(rm, &r);
            for i in bits(m) {
                out[i].inducible = true;
            }
            if m.count_ones() == 1 {
                out[m.trailing_zeros() as usize].strongly_inducible = true;
            }
        }
        out
    }
}

/// Some weak-order report puts `z` in the pure SSE set.
pub fn brute_inducible_pure(
    tree: &GameTree,
    ul: &PayoffFunction,
    z: NodeId,
    budget: u128,
) -> Result<bool> {
    let i = tree.leaf_index(z).ok_or(Error::UnknownNode(z))?;
    Ok(WeakOrderOracle::new(tree, budget)?.analyze(ul)[i].inducible)
}

/// Some weak-order report makes the pure SSE set exactly `{z}`.
pub fn brute_strongly_inducible_pure(
    tree: &GameTree,
    ul: &PayoffFunction,
    z: NodeId,
    budget: u128,
) -> Result<bool> {
    let i = tree.leaf_index(z).ok_or(Error::UnknownNode(z))?;
    Ok(WeakOrderOracle::new(tree, budget)?.analyze(ul)[i].strongly_inducible)
}

/// Whether `target` is an SSE outcome of the game with the reported payoffs.
pub fn verify_induces(
    tree: &GameTree,
    ul: &PayoffFunction,
    report: &PayoffFunction,
    target: &LeafDistribution,
    mode: Commitment,
    budget: u128,
) -> Result<bool> {
    if let Some(v) = first_split(tree, target) {
        return Err(Error::NotRealizable(v));
    }
    match mode {
        Commitment::Pure => {
            if target.support_size() != 1 {
                return Ok(false);
            }
            Ok(brute_sse_pure(tree, ul, report, budget)?
                .leaves
                .contains(&target.support()[0]))
        }
        Commitment::Behavioral => Ok(feasible_distribution(tree, report, target)?
            && target.expect(ul) == solve_sse_behavioral(tree, ul, report).leader_value),
    }
}

/// Looks for a second behavioral SSE outcome: the solver's optimal set,
/// then every Y-shape feasible distribution at the SSE leader value.
/// `None` does not prove uniqueness.
pub fn refute_uniqueness(
    tree: &GameTree,
    ul: &PayoffFunction,
    report: &PayoffFunction,
    target: &LeafDistribution,
) -> Result<Option<LeafDistribution>> {
    if let Some(v) = first_split(tree, target) {
        return Err(Error::NotRealizable(v));
    }
    let sol = solve_sse_behavioral(tree, ul, report);
    let value = &sol.leader_value;
    let ok = |p: &LeafDistribution| -> bool {
        p != target
            && &p.expect(ul) == value
            && feasible_distribution(tree, report, p).unwrap_or(false)
    };
    if let Some(p) = sol.all_optimal_outcomes.iter().find(|p| ok(p)) {
        return Ok(Some(p.clone()));
    }
    for i in 0..tree.num_leaves() {
        let p = LeafDistribution::point(i);
        if ok(&p) {
            return Ok(Some(p));
        }
    }
    let mf = maximin_values(tree, report, Player::Follower);
    for l in tree.nodes_of(Player::Leader) {
        let ch = tree.children(l);
        for (a, &ca) in ch.iter().enumerate() {
            for &cb in &ch[a + 1..] {
                for i in tree.leaf_span(ca) {
                    for j in tree.leaf_span(cb) {
                        for alpha in pair_weights(tree, ul, report, &mf, l, i, j, value) {
                            let p = LeafDistribution::mix(i, j, &alpha);
                            if ok(&p) {
                                return Ok(Some(p));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Weights on `i` worth testing for the pair `(i, j)` under LCA `l`.
#[allow(clippy::too_many_arguments)]
fn pair_weights(
    tree: &GameTree,
    ul: &PayoffFunction,
    report: &PayoffFunction,
    mf: &crate::maximin::MaximinTable,
    l: NodeId,
    i: usize,
    j: usize,
    value: &Rational,
) -> Vec<Rational> {
    let (ui, uj) = (ul.get(i), ul.get(j));
    if ui != uj {
        let a = (value - uj) / (ui - uj);
        return if a.is_positive() && a < Rational::one() {
            vec![a]
        } else {
            vec![]
        };
    }
    if ui != value {
        return vec![];
    }
    // feasible weights above the LCA form an interval
    let (fi, fj) = (report.get(i), report.get(j));
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    let mut v = tree.root();
    while v != l {
        if tree.owner(v) == Some(Player::Follower) {
            // alpha * (fi - fj) >= M - fj
            let d = fi - fj;
            let rhs = mf.get(v) - fj;
            if d.is_zero() {
                if rhs.is_positive() {
                    return vec![];
                }
            } else if d.is_positive() {
                lo = lo.max(&rhs / &d);
            } else {
                hi = hi.min(&rhs / &d);
            }
        }
        v = tree.child_toward(v, l);
    }
    if lo > hi {
        return vec![];
    }
    let mid = (&lo + &hi) / Rational::from_int(2);
    [lo, mid, hi]
        .into_iter()
        .filter(|a| a.is_positive() && a < &Rational::one())
        .collect()
}

/// Best leader value over behavioral strategies whose probabilities are
/// multiples of `1/denom`, with leader-favoring follower tie-breaking. A
/// lower bound on the behavioral SSE value.
pub fn grid_sse_behavioral(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    denom: u32,
    budget: u128,
) -> Result<Rational> {
    let leaders: Vec<NodeId> = tree.nodes_of(Player::Leader).collect();
    let per_node: Vec<Vec<Vec<Rational>>> = leaders
        .iter()
        .map(|&v| compositions(denom, tree.children(v).len()))
        .collect();
    let needed = per_node
        .iter()
        .fold(1u128, |a, c| a.saturating_mul(c.len() as u128));
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let mut slot = vec![usize::MAX; tree.len()];
    for (k, &v) in leaders.iter().enumerate() {
        slot[v] = k;
    }
    let mut idx = vec![0usize; leaders.len()];
    let mut best: Option<Rational> = None;
    loop {
        let (_, l) = induce_values(
            tree,
            ul,
            uf,
            &|v: NodeId| &per_node[slot[v]][idx[slot[v]]],
            tree.root(),
        );
        if best.as_ref().is_none_or(|b| &l > b) {
            best = Some(l);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(best.expect("at least one strategy"));
            }
            idx[k] += 1;
            if idx[k] < per_node[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn induce_values<'a>(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    mix: &dyn Fn(NodeId) -> &'a Vec<Rational>,
    v: NodeId,
) -> (Rational, Rational) {
    match tree.owner(v) {
        None => {
            let i = tree.leaf_index(v).expect("leaf");
            (uf.get(i).clone(), ul.get(i).clone())
        }
        Some(Player::Follower) => tree
            .children(v)
            .iter()
            .map(|&c| induce_values(tree, ul, uf, mix, c))
            .max()
            .expect("nonempty"),
        Some(Player::Leader) => {
            let w = mix(v);
            let mut f = Rational::zero();
            let mut l = Rational::zero();
            for (&c, q) in tree.children(v).iter().zip(w) {
                if q.is_positive() {
                    let (cf, cl) = induce_values(tree, ul, uf, mix, c);
                    f = f + q * cf;
                    l = l + q * cl;
                }
            }
            (f, l)
        }
    }
}

fn compositions(denom: u32, parts: usize) -> Vec<Vec<Rational>> {
    fn go(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(denom, parts, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|c| {
            c.into_iter()
                .map(|k| Rational::new(k as i64, denom as i64))
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------- corpus

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub max_leaves: usize,
    /// Edges from the root to the deepest leaf.
    pub max_depth: usize,
    pub ul_grid: Vec<Rational>,
    pub uf_grid: Vec<Rational>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            max_leaves: 5,
            max_depth: 3,
            ul_grid: (0..=2).map(Rational::from_int).collect(),
            uf_grid: vec![Rational::zero()],
        }
    }
}

#[derive(Clone, Debug)]
enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn internal(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Node(ch) => 1 + ch.iter().map(Shape::internal).sum::<usize>(),
        }
    }
}

/// Shapes with at most `max_leaves` leaves and height at most `depth`, no
/// unary nodes, each paired with its leaf count.
fn shapes(max_leaves: usize, depth: usize) -> Vec<(Shape, usize)> {
    let mut out = vec![(Shape::Leaf, 1)];
    if depth == 0 || max_leaves < 2 {
        return out;
    }
    let sub = shapes(max_leaves - 1, depth - 1);
    fn seqs(
        sub: &[(Shape, usize)],
        budget: usize,
        cur: &mut Vec<Shape>,
        used: usize,
        out: &mut Vec<(Shape, usize)>,
    ) {
        if cur.len() >= 2 {
            out.push((Shape::Node(cur.clone()), used));
        }
        for (s, n) in sub {
            if used + n <= budget {
                cur.push(s.clone());
                seqs(sub, budget, cur, used + n, out);
                cur.pop();
            }
        }
    }
    seqs(&sub, max_leaves, &mut Vec::new(), 0, &mut out);
    out
}

fn build(
    shape: &Shape,
    owners: &mut impl Iterator<Item = Player>,
    parent: Option<NodeId>,
    raw: &mut Vec<RawNode>,
) {
    let id = raw.len();
    match shape {
        Shape::Leaf => {
            let label = format!(
                "z{}",
                raw.iter()
                    .filter(|r| matches!(r.kind, RawKind::Leaf(_)))
                    .count()
                    + 1
            );
            raw.push(RawNode {
                parent,
                kind: RawKind::Leaf(label),
            });
        }
        Shape::Node(ch) => {
            raw.push(RawNode {
                parent,
                kind: RawKind::Internal(owners.next().expect("one owner per node")),
            });
            for c in ch {
                build(c, owners, Some(id), raw);
            }
        }
    }
}

/// Every tree of the spec, each shape under every ownership assignment.
/// Leaves are labeled `z1, z2, ...` in preorder.
pub fn enumerate_small_trees(spec: &CorpusSpec) -> Vec<GameTree> {
    let mut out = Vec::new();
    for (shape, _) in shapes(spec.max_leaves, spec.max_depth) {
        let k = shape.internal();
        for bitsv in 0u32..(1 << k) {
            let mut owners = (0..k).map(|b| {
                if bitsv >> b & 1 == 1 {
                    Player::Follower
                } else {
                    Player::Leader
                }
            });
            let mut raw = Vec::new();
            build(&shape, &mut owners, None, &mut raw);
            out.push(GameTree::from_preorder(raw).expect("generated trees are valid"));
        }
    }
    out
}

/// All vectors in `grid^n`, in odometer order (first coordinate fastest).
pub fn payoff_vectors(tree: &GameTree, grid: &[Rational]) -> Vec<PayoffFunction> {
    let n = tree.num_leaves();
    if grid.is_empty() {
        return Vec::new();
    }
    let mut idx = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        out.push(PayoffFunction::from_fn(tree, |i| grid[idx[i]].clone()));
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] < grid.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Every `(tree, U_L, U_F)` of the spec, deterministic and duplicate-free.
pub fn enumerate_small_games(spec: &CorpusSpec) -> impl Iterator<Item = Game> + '_ {
    enumerate_small_trees(spec)
        .into_iter()
        .flat_map(move |tree| {
            let uls = payoff_vectors(&tree, &spec.ul_grid);
            let ufs = payoff_vectors(&tree, &spec.uf_grid);
            let mut games = Vec::with_capacity(uls.len() * ufs.len());
            for ul in &uls {
                for uf in &ufs {
                    games.push(Game::new(tree.clone(), ul.clone(), uf.clone()));
                }
            }
            games
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::parse_payoffs;
    use crate::rational::r;

    #[test]
    fn cheat_sse_sets() {
        let g = fixtures::cheat();
        let s = brute_sse_pure(&g.tree, &g.ul, &g.uf, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.value, r("4"));
        assert_eq!(s.leaves, BTreeSet::from([g.leaf_idx("z2")]));
        let report = parse_payoffs(&g.tree, fixtures::CHEAT_REPORT).unwrap();
        let s = brute_sse_pure(&g.tree, &g.ul, &report, DEFAULT_BUDGET).unwrap();
        assert!(s.leaves.contains(&g.leaf_idx("z3")));
    }

    #[test]
    fn weak_order_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| weak_orders(n).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75, 541, 4683]);
    }

    #[test]
    fn cheat_weak_order_sweep() {
        let g = fixtures::cheat();
        assert!(brute_inducible_pure(&g.tree, &g.ul, g.leaf("z3"), DEFAULT_BUDGET).unwrap());
        assert!(!brute_inducible_pure(&g.tree, &g.ul, g.leaf("z4"), DEFAULT_BUDGET).unwrap());
        assert!(
            brute_strongly_inducible_pure(&g.tree, &g.ul, g.leaf("z3"), DEFAULT_BUDGET).unwrap()
        );
        let flat = PayoffFunction::constant(&g.tree, r("1"));
        assert!(
            !brute_strongly_inducible_pure(&g.tree, &flat, g.leaf("z1"), DEFAULT_BUDGET).unwrap()
        );
    }

    #[test]
    fn verify_modes() {
        let g = fixtures::cheat();
        let report = parse_payoffs(&g.tree, fixtures::CHEAT_REPORT).unwrap();
        let z3 = LeafDistribution::point(g.leaf_idx("z3"));
        assert!(verify_induces(
            &g.tree,
            &g.ul,
            &report,
            &z3,
            Commitment::Pure,
            DEFAULT_BUDGET
        )
        .unwrap());
        assert!(
            !verify_induces(&g.tree, &g.ul, &g.uf, &z3, Commitment::Pure, DEFAULT_BUDGET).unwrap()
        );
    }

    #[test]
    fn refuter_finds_alternative() {
        let g = fixtures::strong_a();
        let p = g.dist(&[("z3", "1/2"), ("z4", "1/2")]);
        let report = crate::inducibility::misreport_for_distribution(&g.tree, &g.ul, &p).unwrap();
        assert!(verify_induces(
            &g.tree,
            &g.ul,
            &report,
            &p,
            Commitment::Behavioral,
            DEFAULT_BUDGET
        )
        .unwrap());
        let alt = refute_uniqueness(&g.tree, &g.ul, &report, &p)
            .unwrap()
            .expect("not unique");
        assert_ne!(alt, p);
        assert!(feasible_distribution(&g.tree, &report, &alt).unwrap());
    }

    #[test]
    fn corpus_counts() {
        let spec = CorpusSpec {
            max_leaves: 3,
            max_depth: 3,
            ul_grid: vec![r("0"), r("1")],
            uf_grid: vec![r("0")],
        };
        // 1 leaf: 2; 2 leaves: 2 owners * 4; 3 leaves: (2 + 2 * 4) * 8
        assert_eq!(enumerate_small_games(&spec).count(), 2 + 8 + 80);
        let a: Vec<String> = enumerate_small_games(&spec).map(|g| g.to_text()).collect();
        let b: Vec<String> = enumerate_small_games(&spec).map(|g| g.to_text()).collect();
        assert_eq!(a, b);
        let distinct: BTreeSet<&String> = a.iter().collect();
        assert_eq!(distinct.len(), a.len());
        let empty = CorpusSpec {
            ul_grid: vec![],
            ..spec
        };
        assert_eq!(enumerate_small_games(&empty).count(), 0);
    }

    #[test]
    fn grid_oracle_bounds_behav() {
        let g = fixtures::behav();
        let v = grid_sse_behavioral(&g.tree, &g.ul, &g.uf, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(v, r("14/5"));
    }
}
