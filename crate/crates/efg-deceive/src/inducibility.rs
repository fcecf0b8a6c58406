//! Which outcome distributions a follower can induce by misreporting his
//! payoffs, and payoff functions that induce them.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{first_split, GameTree, LeafDistribution, NodeId, PayoffFunction, Player};
use crate::maximin::{maximin_values, MaximinTable, SiblingBounds};
use crate::rational::Rational;

/// Leader-side tables shared by every characterization: they read `U_L`
/// only, never the follower's payoffs.
pub struct LeaderTables<'a> {
    pub tree: &'a GameTree,
    pub ul: &'a PayoffFunction,
    pub ml: MaximinTable,
    pub sib: SiblingBounds,
}

impl<'a> LeaderTables<'a> {
    pub fn new(tree: &'a GameTree, ul: &'a PayoffFunction) -> Self {
        let ml = maximin_values(tree, ul, Player::Leader);
        let sib = SiblingBounds::new(tree, &ml);
        LeaderTables { tree, ul, ml, sib }
    }

    pub fn u(&self, leaf: usize) -> &Rational {
        self.ul.get(leaf)
    }

    pub fn u_node(&self, z: NodeId) -> &Rational {
        self.ul.at(self.tree, z)
    }

    /// `u >= min of M_L over the siblings of c` (false for no siblings).
    pub fn meets_sibmin(&self, u: &Rational, c: NodeId, strict: bool) -> bool {
        match &self.sib.min[c] {
            None => false,
            Some(m) if strict => u > m,
            Some(m) => u >= m,
        }
    }

    /// `u >= max of M_L over the siblings of c` (true for no siblings).
    pub fn meets_sibmax(&self, u: &Rational, c: NodeId, strict: bool) -> bool {
        match &self.sib.max[c] {
            None => true,
            Some(m) if strict => u > m,
            Some(m) => u >= m,
        }
    }
}

pub(crate) fn check_realizable(tree: &GameTree, p: &LeafDistribution) -> Result<()> {
    match first_split(tree, p) {
        Some(v) => Err(Error::NotRealizable(v)),
        None => Ok(()),
    }
}

pub(crate) fn check_yshape(tree: &GameTree, p: &LeafDistribution) -> Result<()> {
    check_realizable(tree, p)?;
    if p.support_size() > 2 {
        return Err(Error::NotYShape(p.support_size()));
    }
    Ok(())
}

fn leaf_arg(tree: &GameTree, z: NodeId) -> Result<usize> {
    tree.leaf_index(z).ok_or(Error::UnknownNode(z))
}

// ---------------------------------------------------------------- pure

pub fn is_inducible_pure(tree: &GameTree, ul: &PayoffFunction, z: NodeId) -> Result<bool> {
    let i = leaf_arg(tree, z)?;
    Ok(ul.get(i) >= maximin_values(tree, ul, Player::Leader).root())
}

/// A report under which some pure-commitment SSE ends at `z`. Linear time.
pub fn misreport_for_leaf(
    tree: &GameTree,
    ul: &PayoffFunction,
    z: NodeId,
) -> Result<PayoffFunction> {
    if !is_inducible_pure(tree, ul, z)? {
        return Err(Error::NotInducible);
    }
    let ml = maximin_values(tree, ul, Player::Leader);
    Ok(pure_construction(tree, ul, &ml, z, None))
}

/// The pure-commitment construction. `strict` carries the sibling bounds
/// for the strong variant: a follower node switches to the threat branch
/// only when `U_L(z)` beats the chosen sibling strictly.
pub(crate) fn pure_construction(
    tree: &GameTree,
    ul: &PayoffFunction,
    ml: &MaximinTable,
    z: NodeId,
    strict: Option<&SiblingBounds>,
) -> PayoffFunction {
    let uz = ul.at(tree, z).clone();
    let path = tree.path_to(z);
    // Threat partner at follower node path[k], when the threat branch fires.
    let threat = |k: usize| -> Option<NodeId> {
        let v = path[k];
        let v1 = path[k + 1];
        match strict {
            None => {
                let v2 = ml.argmin_child(tree, v);
                (v2 != v1).then_some(v2)
            }
            Some(_) => {
                // first sibling minimizing M_L, used only if U_L(z) beats it
                let v2 = tree
                    .siblings(v, v1)
                    .fold(None, |best: Option<NodeId>, c| match best {
                        Some(b) if ml.get(b) <= ml.get(c) => Some(b),
                        _ => Some(c),
                    })?;
                (&uz > ml.get(v2)).then_some(v2)
            }
        }
    };

    let mut out: Vec<Option<Rational>> = vec![None; tree.num_leaves()];
    let mut lo;
    // Deepest level still to be processed bottom-up.
    let mut k = path.len() - 1;
    let top_threat = (0..path.len() - 1)
        .find(|&k| tree.owner(path[k]) == Some(Player::Follower) && threat(k).is_some());
    match top_threat {
        Some(t) => {
            let v = path[t];
            let v2 = threat(t).expect("checked");
            let m2 = ml.get(v2);
            let hi = -m2 + Rational::one();
            let low = -m2 - Rational::one();
            for i in tree.leaf_span(v) {
                out[i] = Some(low.clone());
            }
            for i in tree.leaf_span(v2) {
                out[i] = Some(-ul.get(i));
            }
            out[tree.leaf_index(z).expect("leaf")] = Some(hi);
            lo = tree
                .leaf_span(v)
                .filter_map(|i| out[i].clone())
                .min()
                .expect("nonempty");
            k = t;
        }
        None => {
            out[tree.leaf_index(z).expect("leaf")] = Some(Rational::zero());
            lo = Rational::zero();
        }
    }
    while k > 0 {
        let v = path[k - 1];
        let done = path[k];
        let fill: Box<dyn Fn(usize) -> Rational> = match tree.owner(v) {
            Some(Player::Leader) => Box::new(|i| -ul.get(i)),
            _ => {
                let pad = &lo - Rational::one();
                Box::new(move |_| pad.clone())
            }
        };
        for &c in tree.children(v) {
            if c != done {
                for i in tree.leaf_span(c) {
                    let x = fill(i);
                    if x < lo {
                        lo = x.clone();
                    }
                    out[i] = Some(x);
                }
            }
        }
        k -= 1;
    }
    PayoffFunction::new(
        tree,
        out.into_iter()
            .map(|x| x.expect("every leaf assigned"))
            .collect(),
    )
    .expect("total over leaves")
}

#[derive(Clone, Debug)]
pub struct PureReport {
    pub leaf: NodeId,
    pub follower_true_utility: Rational,
    pub leader_utility: Rational,
    pub report: PayoffFunction,
}

/// Best leaf for the follower among `{z : U_L(z) >= M_L(root)}`.
pub fn optimal_misreport_pure(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
) -> PureReport {
    let ml = maximin_values(tree, ul, Player::Leader);
    let root = ml.root();
    let mut best: Option<usize> = None;
    for i in 0..tree.num_leaves() {
        if ul.get(i) >= root && best.is_none_or(|b| uf.get(i) > uf.get(b)) {
            best = Some(i);
        }
    }
    let i = best.expect("a leaf attains M_L(root)");
    let z = tree.leaf_node(i);
    PureReport {
        leaf: z,
        follower_true_utility: uf.get(i).clone(),
        leader_utility: ul.get(i).clone(),
        report: pure_construction(tree, ul, &ml, z, None),
    }
}

// ---------------------------------------------------------------- pairs

/// `E(v)`: leaf pairs in `T_v` whose least common ancestor is a leader node.
/// Pairs are leaf-index tuples `(i, j)` with `i < j`.
pub fn leader_lca_pairs(tree: &GameTree, v: NodeId) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in tree.subtree_range(v) {
        if tree.owner(u) != Some(Player::Leader) {
            continue;
        }
        let ch = tree.children(u);
        for (a, &ca) in ch.iter().enumerate() {
            for &cb in &ch[a + 1..] {
                for i in tree.leaf_span(ca) {
                    for j in tree.leaf_span(cb) {
                        out.push((i, j));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// `E(v)` for every node at once, as sets.
pub struct LeaderLcaPairs {
    pub sets: Vec<BTreeSet<(usize, usize)>>,
}

impl LeaderLcaPairs {
    pub fn build(tree: &GameTree) -> Self {
        let mut sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); tree.len()];
        for v in (0..tree.len()).rev() {
            let mut s = BTreeSet::new();
            for &c in tree.children(v) {
                s.extend(sets[c].iter().copied());
            }
            if tree.owner(v) == Some(Player::Leader) {
                s.extend(leader_lca_pairs_at(tree, v));
            }
            sets[v] = s;
        }
        LeaderLcaPairs { sets }
    }
}

fn leader_lca_pairs_at(tree: &GameTree, u: NodeId) -> impl Iterator<Item = (usize, usize)> + '_ {
    let ch = tree.children(u);
    ch.iter().enumerate().flat_map(move |(a, &ca)| {
        ch[a + 1..].iter().flat_map(move |&cb| {
            tree.leaf_span(ca)
                .flat_map(move |i| tree.leaf_span(cb).map(move |j| (i, j)))
        })
    })
}

// ---------------------------------------------------------------- recursive theorem

/// Per-node record of the recursive characterization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Leaf {
        node: NodeId,
    },
    Leader {
        node: NodeId,
        value: Rational,
        maximin: Rational,
        /// Every supported child gives the leader the same restricted value.
        equal_values: bool,
        /// `U_L(p|_v) >= M_L(v)`.
        above_maximin: bool,
        children: Vec<Trace>,
    },
    Follower {
        node: NodeId,
        child: NodeId,
        value: Rational,
        sibling_min: Option<Rational>,
        /// `U_L(p|_v) >= min` of the siblings' maximin values.
        sibling_bound: bool,
        child_trace: Box<Trace>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EqualValues(NodeId),
    AboveMaximin(NodeId),
    /// Neither the sibling bound holds nor is the supported child inducible.
    SiblingBound(NodeId),
}

impl Violation {
    pub fn node(&self) -> NodeId {
        match self {
            Violation::EqualValues(v) | Violation::AboveMaximin(v) | Violation::SiblingBound(v) => {
                *v
            }
        }
    }

    pub fn clause(&self) -> &'static str {
        match self {
            Violation::EqualValues(_) => "equal_values",
            Violation::AboveMaximin(_) => "above_maximin",
            Violation::SiblingBound(_) => "sibling_bound",
        }
    }
}

impl Trace {
    pub fn node(&self) -> NodeId {
        match self {
            Trace::Leaf { node } | Trace::Leader { node, .. } | Trace::Follower { node, .. } => {
                *node
            }
        }
    }

    pub fn verdict(&self) -> bool {
        match self {
            Trace::Leaf { .. } => true,
            Trace::Leader {
                equal_values,
                above_maximin,
                children,
                ..
            } => *equal_values && *above_maximin && children.iter().all(Trace::verdict),
            Trace::Follower {
                sibling_bound,
                child_trace,
                ..
            } => *sibling_bound || child_trace.verdict(),
        }
    }

    /// First failing clause in preorder, if the trace is negative.
    pub fn first_violation(&self) -> Option<Violation> {
        match self {
            Trace::Leaf { .. } => None,
            Trace::Leader {
                node,
                equal_values,
                above_maximin,
                children,
                ..
            } => {
                if !equal_values {
                    Some(Violation::EqualValues(*node))
                } else if !above_maximin {
                    Some(Violation::AboveMaximin(*node))
                } else {
                    children.iter().find_map(Trace::first_violation)
                }
            }
            Trace::Follower {
                node,
                sibling_bound,
                child_trace,
                ..
            } => {
                (!sibling_bound && !child_trace.verdict()).then_some(Violation::SiblingBound(*node))
            }
        }
    }

    /// Recomputes every recorded clause; true iff all agree.
    pub fn replay(&self, tree: &GameTree, ul: &PayoffFunction, p: &LeafDistribution) -> bool {
        let lt = LeaderTables::new(tree, ul);
        *self == trace(&lt, p, self.node(), false)
    }

    pub fn to_json(&self, tree: &GameTree) -> Value {
        match self {
            Trace::Leaf { node } => json!({"node": tree.node_name(*node), "kind": "leaf"}),
            Trace::Leader {
                node,
                value,
                maximin,
                equal_values,
                above_maximin,
                children,
            } => json!({
                "node": tree.node_name(*node),
                "kind": "leader",
                "value": value.to_string(),
                "maximin": maximin.to_string(),
                "equal_values": equal_values,
                "above_maximin": above_maximin,
                "children": children.iter().map(|c| c.to_json(tree)).collect::<Vec<_>>(),
            }),
            Trace::Follower {
                node,
                child,
                value,
                sibling_min,
                sibling_bound,
                child_trace,
            } => json!({
                "node": tree.node_name(*node),
                "kind": "follower",
                "supported_child": tree.node_name(*child),
                "value": value.to_string(),
                "sibling_min": sibling_min.as_ref().map(|m| m.to_string()),
                "sibling_bound": sibling_bound,
                "below": child_trace.to_json(tree),
            }),
        }
    }
}

/// Builds the trace of `p|_v` at `v`. With `strict`, comparisons become
/// strict and leader nodes must have a single supported child: the strong
/// variant for Y-shape distributions, without the pair check.
pub(crate) fn trace(lt: &LeaderTables, p: &LeafDistribution, v: NodeId, strict: bool) -> Trace {
    let tree = lt.tree;
    let value = p
        .expect_at(tree, lt.ul, v)
        .expect("trace visits reached nodes only");
    match tree.owner(v) {
        None => Trace::Leaf { node: v },
        Some(Player::Leader) => {
            let supported = p.supported_children(tree, v);
            let vals: Vec<Rational> = supported
                .iter()
                .map(|&w| p.expect_at(tree, lt.ul, w).expect("supported"))
                .collect();
            let maximin = lt.ml.get(v).clone();
            let (equal_values, above_maximin) = if strict {
                // single supported child that beats every sibling strictly
                let single = supported.len() == 1;
                (
                    single,
                    single && lt.meets_sibmax(&value, supported[0], true),
                )
            } else {
                (vals.windows(2).all(|w| w[0] == w[1]), value >= maximin)
            };
            let children = supported.iter().map(|&w| trace(lt, p, w, strict)).collect();
            Trace::Leader {
                node: v,
                value,
                maximin,
                equal_values,
                above_maximin,
                children,
            }
        }
        Some(Player::Follower) => {
            let child = p.supported_children(tree, v)[0];
            let sibling_min = lt.sib.min[child].clone();
            // a strict cut cannot pin the mix of two leaves the leader values equally
            let flat_pair = strict && {
                let sup: Vec<usize> = p
                    .entries()
                    .map(|(i, _)| i)
                    .filter(|i| tree.leaf_span(v).contains(i))
                    .collect();
                sup.len() == 2 && lt.u(sup[0]) == lt.u(sup[1])
            };
            let sibling_bound = !flat_pair && lt.meets_sibmin(&value, child, strict);
            let child_trace = Box::new(trace(lt, p, child, strict));
            Trace::Follower {
                node: v,
                child,
                value,
                sibling_min,
                sibling_bound,
                child_trace,
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct InducibilityVerdict {
    pub inducible: bool,
    pub certificate: Trace,
}

impl InducibilityVerdict {
    pub fn first_violation(&self) -> Option<Violation> {
        self.certificate.first_violation()
    }
}

/// The recursive characterization, evaluated literally from the root.
pub fn is_inducible(
    tree: &GameTree,
    ul: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<InducibilityVerdict> {
    check_realizable(tree, p)?;
    let lt = LeaderTables::new(tree, ul);
    Ok(inducible_with(&lt, p))
}

pub(crate) fn inducible_with(lt: &LeaderTables, p: &LeafDistribution) -> InducibilityVerdict {
    let certificate = trace(lt, p, lt.tree.root(), false);
    InducibilityVerdict {
        inducible: certificate.verdict(),
        certificate,
    }
}

// ---------------------------------------------------------------- Y-shape fast path

/// Walks `from -> z` while leader nodes satisfy `u >= M_L` and stops with
/// success at the first follower node whose sibling bound `u` meets.
fn pass(lt: &LeaderTables, from: NodeId, z: NodeId, u: &Rational) -> bool {
    let tree = lt.tree;
    let mut v = from;
    while v != z {
        let c = tree.child_toward(v, z);
        match tree.owner(v) {
            Some(Player::Leader) if u < lt.ml.get(v) => return false,
            Some(Player::Follower) if lt.meets_sibmin(u, c, false) => return true,
            _ => {}
        }
        v = c;
    }
    true
}

/// Non-recursive check for supports of size at most two.
///
/// A follower node above the pair's LCA whose sibling bound the leader value
/// meets settles the question, provided the leader nodes above it pass their
/// maximin test. Without such a cut, the two leaves must give the leader
/// equal utility and each branch below the LCA must pass on its own, where
/// follower nodes below the LCA may again act as cuts.
pub fn is_inducible_yshape(
    tree: &GameTree,
    ul: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<bool> {
    check_yshape(tree, p)?;
    let lt = LeaderTables::new(tree, ul);
    Ok(yshape_with(&lt, p))
}

pub(crate) fn yshape_with(lt: &LeaderTables, p: &LeafDistribution) -> bool {
    let tree = lt.tree;
    let support = p.support();
    let u = p.expect(lt.ul);
    let z1 = tree.leaf_node(support[0]);
    let Some(&i2) = support.get(1) else {
        return pass(lt, tree.root(), z1, &u);
    };
    let z2 = tree.leaf_node(i2);
    let l = tree.lca(z1, z2);
    let mut v = tree.root();
    while v != l {
        let c = tree.child_toward(v, l);
        match tree.owner(v) {
            Some(Player::Leader) if u < *lt.ml.get(v) => return false,
            Some(Player::Follower) if lt.meets_sibmin(&u, c, false) => return true,
            _ => {}
        }
        v = c;
    }
    lt.u(support[0]) == lt.u(i2)
        && u >= *lt.ml.get(l)
        && pass(lt, tree.child_toward(l, z1), z1, &u)
        && pass(lt, tree.child_toward(l, z2), z2, &u)
}

// ---------------------------------------------------------------- constructions

/// A report under which `p` is an SSE outcome of the behavioral game.
pub fn misreport_for_distribution(
    tree: &GameTree,
    ul: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<PayoffFunction> {
    check_realizable(tree, p)?;
    let lt = LeaderTables::new(tree, ul);
    if !inducible_with(&lt, p).inducible {
        return Err(Error::NotInducible);
    }
    Ok(construct(&lt, p, false))
}

/// The recursive construction; `strict` selects the strong variant, which
/// only takes the threat branch on a strict sibling bound.
pub(crate) fn construct(lt: &LeaderTables, p: &LeafDistribution, strict: bool) -> PayoffFunction {
    let mut out: Vec<Option<Rational>> = vec![None; lt.tree.num_leaves()];
    build(lt, p, lt.tree.root(), strict, &mut out);
    PayoffFunction::new(
        lt.tree,
        out.into_iter()
            .map(|x| x.expect("every leaf assigned"))
            .collect(),
    )
    .expect("total over leaves")
}

fn lower(lo: &mut Option<Rational>, x: &Rational) {
    if lo.as_ref().is_none_or(|l| x < l) {
        *lo = Some(x.clone());
    }
}

/// Fills `Z_v` and returns the smallest value written.
fn build(
    lt: &LeaderTables,
    p: &LeafDistribution,
    v: NodeId,
    strict: bool,
    out: &mut [Option<Rational>],
) -> Rational {
    let tree = lt.tree;
    let ul = lt.ul;
    let mut lo: Option<Rational> = None;
    match tree.owner(v) {
        None => {
            out[tree.leaf_index(v).expect("leaf")] = Some(Rational::zero());
            lo = Some(Rational::zero());
        }
        Some(Player::Leader) => {
            for &w in tree.children(v) {
                if p.reaches(tree, w) {
                    let m = build(lt, p, w, strict, out);
                    lower(&mut lo, &m);
                } else {
                    for i in tree.leaf_span(w) {
                        let x = -ul.get(i);
                        lower(&mut lo, &x);
                        out[i] = Some(x);
                    }
                }
            }
        }
        Some(Player::Follower) => {
            let w = p.supported_children(tree, v)[0];
            let value = p.expect_at(tree, ul, v).expect("reached");
            if lt.meets_sibmin(&value, w, strict) {
                let v0 = tree
                    .siblings(v, w)
                    .fold(None, |best: Option<NodeId>, c| match best {
                        Some(b) if lt.ml.get(b) <= lt.ml.get(c) => Some(b),
                        _ => Some(c),
                    })
                    .expect("a sibling exists when the bound holds");
                let shift = lt.ml.get(v0) - &value;
                let top = tree
                    .leaf_span(v)
                    .map(|i| ul.get(i))
                    .max()
                    .expect("nonempty")
                    .clone();
                let big = (top + Rational::one()).max(Rational::one());
                let threat = -(&big + &big);
                let v0_span = tree.leaf_span(v0);
                for i in tree.leaf_span(v) {
                    let x = if p.prob(i).is_positive() {
                        -ul.get(i)
                    } else if v0_span.contains(&i) {
                        -ul.get(i) + &shift
                    } else {
                        threat.clone()
                    };
                    lower(&mut lo, &x);
                    out[i] = Some(x);
                }
            } else {
                let m = build(lt, p, w, strict, out);
                let pad = &m - Rational::one();
                lo = Some(m);
                for &c in tree.children(v) {
                    if c != w {
                        for i in tree.leaf_span(c) {
                            out[i] = Some(pad.clone());
                        }
                        lo = Some(pad.clone());
                    }
                }
            }
        }
    }
    lo.expect("nonempty subtree")
}

// ---------------------------------------------------------------- optimal report

/// One member of the optimal Y-shape family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Candidate {
    Leaf(usize),
    /// Weight `alpha` on `z1`, the rest on `z2`, for every `alpha` in `[lo, hi]`.
    Mix {
        z1: usize,
        z2: usize,
        lo: Rational,
        hi: Rational,
    },
}

impl Candidate {
    pub fn representative(&self) -> LeafDistribution {
        match self {
            Candidate::Leaf(i) => LeafDistribution::point(*i),
            Candidate::Mix { z1, z2, lo, .. } => LeafDistribution::mix(*z1, *z2, lo),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BehavioralReport {
    pub distribution: LeafDistribution,
    pub follower_true_utility: Rational,
    pub leader_utility: Rational,
    pub report: PayoffFunction,
}

/// Per-node thresholds of the optimal-report search.
///
/// `above[v]` is the running max of `M_L` over strict ancestors (the
/// search's `Lminval`). `cut[v]` is the smallest `max(sibling min,
/// Lminval)` over follower strict ancestors: the cheapest cut available to
/// anything supported inside `T_v`. Folding follower ancestors into
/// `Lminval` is harmless: `M_L(f) <= M_L(child)` for a follower node `f`, so
/// each such term is dominated by a later one on the path or by `U_L` of the
/// leaf itself.
pub(crate) struct Thresholds {
    pub above: Vec<Option<Rational>>,
    pub cut: Vec<Option<Rational>>,
}

impl Thresholds {
    pub fn new(lt: &LeaderTables, fold_followers: bool) -> Self {
        let tree = lt.tree;
        let mut above: Vec<Option<Rational>> = vec![None; tree.len()];
        let mut cut: Vec<Option<Rational>> = vec![None; tree.len()];
        for v in 0..tree.len() {
            let Some(f) = tree.parent(v) else { continue };
            let fm = lt.ml.get(f);
            let counts = fold_followers || tree.owner(f) == Some(Player::Leader);
            above[v] = match &above[f] {
                Some(a) if !counts || a >= fm => Some(a.clone()),
                _ if counts => Some(fm.clone()),
                other => other.clone(),
            };
            cut[v] = cut[f].clone();
            if tree.owner(f) == Some(Player::Follower) {
                if let Some(s) = &lt.sib.min[v] {
                    let t = match &above[f] {
                        Some(a) if a > s => a.clone(),
                        _ => s.clone(),
                    };
                    if cut[v].as_ref().is_none_or(|c| &t < c) {
                        cut[v] = Some(t);
                    }
                }
            }
        }
        Thresholds { above, cut }
    }

    /// Smallest leader value at which a point mass on leaf node `z` is inducible.
    pub fn leaf_threshold(&self, z: NodeId) -> Option<Rational> {
        match (&self.above[z], &self.cut[z]) {
            (None, _) => None,
            (Some(a), Some(c)) => Some(a.clone().min(c.clone())),
            (Some(a), None) => Some(a.clone()),
        }
    }
}

fn ge_opt(u: &Rational, t: &Option<Rational>) -> bool {
    t.as_ref().is_none_or(|t| u >= t)
}

/// Lexicographic `(U_F, U_L)`; ties keep the incumbent.
fn improves(a: &(Rational, Rational), incumbent: &Option<(Rational, Rational)>) -> bool {
    incumbent.as_ref().is_none_or(|b| a > b)
}

pub(crate) struct Search {
    pub best: Option<(Rational, Rational)>,
    pub distribution: Option<LeafDistribution>,
    /// Every optimal member, kept when requested.
    pub all: Vec<Candidate>,
}

/// The optimal-report scan over singletons and leader-LCA pairs.
///
/// Singletons are accepted at their cheapest threshold. A pair with LCA `l`
/// needs a cut above `l`; its feasible mixing weights form the closed
/// interval where the leader's value reaches the cut threshold. Follower
/// utility is linear in the weight, so a pair only adds something new at the
/// interior endpoint, where the leader's value equals the threshold exactly.
pub(crate) fn optimal_search(
    lt: &LeaderTables,
    uf: &PayoffFunction,
    th: &Thresholds,
    keep_all: bool,
) -> Search {
    let tree = lt.tree;
    let nl = tree.num_leaves();
    let mut best: Option<(Rational, Rational)> = None;
    let mut dist = None;
    let leaf_ok: Vec<bool> = (0..nl)
        .map(|i| ge_opt(lt.u(i), &th.leaf_threshold(tree.leaf_node(i))))
        .collect();
    for i in 0..nl {
        if leaf_ok[i] {
            let key = (uf.get(i).clone(), lt.u(i).clone());
            if improves(&key, &best) {
                best = Some(key);
                dist = Some(LeafDistribution::point(i));
            }
        }
    }
    for l in tree.nodes_of(Player::Leader) {
        let Some(t) = &th.cut[l] else { continue };
        for (i, j) in leader_lca_pairs_at(tree, l) {
            let (hi, lo) = if lt.u(i) > lt.u(j) { (i, j) } else { (j, i) };
            let (uh, ulo) = (lt.u(hi), lt.u(lo));
            // interior endpoint exists iff uh > t > ulo
            if !(uh > t && t > ulo) || uf.get(hi) >= uf.get(lo) {
                continue;
            }
            if best.as_ref().is_some_and(|b| uf.get(lo) < &b.0) {
                continue;
            }
            let alpha = (t - ulo) / (uh - ulo);
            let fu = &alpha * uf.get(hi) + (Rational::one() - &alpha) * uf.get(lo);
            let key = (fu, t.clone());
            if improves(&key, &best) {
                best = Some(key);
                dist = Some(LeafDistribution::mix(hi, lo, &alpha));
            }
        }
    }
    let mut all = Vec::new();
    if keep_all {
        let (bf, _) = best.clone().expect("some leaf is always inducible");
        all = optimal_members(lt, uf, th, &leaf_ok, &bf);
    }
    Search {
        best,
        distribution: dist,
        all,
    }
}

/// Every inducible Y-shape distribution with follower utility `bf`.
fn optimal_members(
    lt: &LeaderTables,
    uf: &PayoffFunction,
    th: &Thresholds,
    leaf_ok: &[bool],
    bf: &Rational,
) -> Vec<Candidate> {
    let tree = lt.tree;
    let mut out: Vec<Candidate> = (0..tree.num_leaves())
        .filter(|&i| leaf_ok[i] && uf.get(i) == bf)
        .map(Candidate::Leaf)
        .collect();
    for l in tree.nodes_of(Player::Leader) {
        for (i, j) in leader_lca_pairs_at(tree, l) {
            let (fi, fj) = (uf.get(i), uf.get(j));
            if fi.clone().max(fj.clone()) < *bf {
                continue;
            }
            let (ui, uj) = (lt.u(i), lt.u(j));
            if ui == uj {
                // any weight works or none does; U_F must be flat at bf
                if fi == bf
                    && fj == bf
                    && yshape_with(lt, &LeafDistribution::mix(i, j, &Rational::new(1, 2)))
                {
                    out.push(Candidate::Mix {
                        z1: i,
                        z2: j,
                        lo: Rational::zero(),
                        hi: Rational::one(),
                    });
                }
                continue;
            }
            let Some(t) = &th.cut[l] else { continue };
            // alpha on i with alpha*ui + (1-alpha)*uj >= t
            let a = (t - uj) / (ui - uj);
            let (lo, hi) = if ui > uj {
                (a.max(Rational::zero()), Rational::one())
            } else {
                (Rational::zero(), a.min(Rational::one()))
            };
            if lo > hi {
                continue;
            }
            if fi == bf && fj == bf {
                out.push(Candidate::Mix {
                    z1: i,
                    z2: j,
                    lo,
                    hi,
                });
            } else if fi != fj {
                let alpha = (bf - fj) / (fi - fj);
                if alpha > Rational::zero() && alpha < Rational::one() && lo <= alpha && alpha <= hi
                {
                    out.push(Candidate::Mix {
                        z1: i,
                        z2: j,
                        lo: alpha.clone(),
                        hi: alpha,
                    });
                }
            }
        }
    }
    out
}

pub fn optimal_misreport_behavioral(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
) -> BehavioralReport {
    let lt = LeaderTables::new(tree, ul);
    let th = Thresholds::new(&lt, true);
    let s = optimal_search(&lt, uf, &th, false);
    let p = s.distribution.expect("some leaf is always inducible");
    let report = construct(&lt, &p, false);
    BehavioralReport {
        follower_true_utility: p.expect(uf),
        leader_utility: p.expect(ul),
        distribution: p,
        report,
    }
}

/// Every optimal member of the Y-shape family, with the optimal value.
pub fn optimal_family(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
) -> (Rational, Vec<Candidate>) {
    let lt = LeaderTables::new(tree, ul);
    let th = Thresholds::new(&lt, true);
    let s = optimal_search(&lt, uf, &th, true);
    (s.best.expect("nonempty").0, s.all)
}

/// The search as a literal depth-first recursion carrying `Lminval`, with
/// pair enumeration over `E(w)` at every follower child. Slower than
/// [`optimal_misreport_behavioral`]; kept as a cross-check. Returns the
/// optimal `(U_F, U_L)`.
pub fn optimal_report_recursive(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    fold_followers: bool,
) -> (Rational, Rational) {
    let lt = LeaderTables::new(tree, ul);
    let mut best: Option<(Rational, Rational)> = None;
    let mut stack: Vec<(NodeId, Option<Rational>)> = vec![(tree.root(), None)];
    while let Some((v, lmin)) = stack.pop() {
        match tree.owner(v) {
            None => {
                let i = tree.leaf_index(v).expect("leaf");
                if ge_opt(lt.u(i), &lmin) {
                    let key = (uf.get(i).clone(), lt.u(i).clone());
                    if improves(&key, &best) {
                        best = Some(key);
                    }
                }
            }
            Some(owner) => {
                if owner == Player::Follower {
                    for &w in tree.children(v) {
                        let Some(s) = &lt.sib.min[w] else { continue };
                        let t = match &lmin {
                            Some(a) if a > s => a.clone(),
                            _ => s.clone(),
                        };
                        for i in tree.leaf_span(w) {
                            if lt.u(i) >= &t {
                                let key = (uf.get(i).clone(), lt.u(i).clone());
                                if improves(&key, &best) {
                                    best = Some(key);
                                }
                            }
                        }
                        for (i, j) in leader_lca_pairs(tree, w) {
                            if best
                                .as_ref()
                                .is_some_and(|b| uf.get(i).clone().max(uf.get(j).clone()) < b.0)
                            {
                                continue;
                            }
                            let (hi, lo) = if lt.u(i) > lt.u(j) { (i, j) } else { (j, i) };
                            let (uh, ulo) = (lt.u(hi), lt.u(lo));
                            if !(uh >= &t && &t > ulo) {
                                continue;
                            }
                            let alpha = (&t - ulo) / (uh - ulo);
                            // alpha in [a, 1]; U_F linear, so check both ends
                            for a in [alpha, Rational::one()] {
                                let fu = &a * uf.get(hi) + (Rational::one() - &a) * uf.get(lo);
                                let lu = &a * uh + (Rational::one() - &a) * ulo;
                                let key = (fu, lu);
                                if improves(&key, &best) {
                                    best = Some(key);
                                }
                            }
                        }
                    }
                }
                let counts = fold_followers || owner == Player::Leader;
                let next = if counts {
                    Some(match &lmin {
                        Some(a) if a > lt.ml.get(v) => a.clone(),
                        _ => lt.ml.get(v).clone(),
                    })
                } else {
                    lmin.clone()
                };
                for &c in tree.children(v).iter().rev() {
                    stack.push((c, next.clone()));
                }
            }
        }
    }
    best.expect("some leaf is always inducible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{feasible_distribution, solve_sse_behavioral, solve_sse_pure};
    use crate::fixtures;
    use crate::rational::r;

    fn induces_behavioral(
        tree: &GameTree,
        ul: &PayoffFunction,
        report: &PayoffFunction,
        p: &LeafDistribution,
    ) -> bool {
        feasible_distribution(tree, report, p).unwrap()
            && p.expect(ul) == solve_sse_behavioral(tree, ul, report).leader_value
    }

    #[test]
    fn cheat_pure() {
        let g = fixtures::cheat();
        assert!(is_inducible_pure(&g.tree, &g.ul, g.leaf("z3")).unwrap());
        assert!(!is_inducible_pure(&g.tree, &g.ul, g.leaf("z4")).unwrap());
        let u = misreport_for_leaf(&g.tree, &g.ul, g.leaf("z3")).unwrap();
        assert_eq!(
            u,
            g.payoffs(&[("z1", -2), ("z2", -2), ("z3", 0), ("z4", -1)])
        );
        let best = optimal_misreport_pure(&g.tree, &g.ul, &g.uf);
        assert_eq!(best.leaf, g.leaf("z3"));
        assert_eq!(best.follower_true_utility, r("4"));
        let sse = solve_sse_pure(&g.tree, &g.ul, &best.report);
        assert!(sse
            .all_optimal_outcomes
            .iter()
            .any(|p| p == &LeafDistribution::point(g.leaf_idx("z3"))));
    }

    #[test]
    fn pure_gap_certificates() {
        let a = fixtures::pure_gap_a();
        let p = a.dist(&[("z1", "1/2"), ("z3", "1/2")]);
        let v = is_inducible(&a.tree, &a.ul, &p).unwrap();
        assert!(!v.inducible);
        assert_eq!(v.first_violation(), Some(Violation::EqualValues(0)));
        assert!(v.certificate.replay(&a.tree, &a.ul, &p));

        let b = fixtures::pure_gap_b();
        let p = b.dist(&[("z3", "1/2"), ("z5", "1/2")]);
        let v = is_inducible(&b.tree, &b.ul, &p).unwrap();
        assert!(!v.inducible);
        assert_eq!(v.first_violation(), Some(Violation::SiblingBound(0)));
    }

    #[test]
    fn strong_a_pair() {
        let g = fixtures::strong_a();
        let p = g.dist(&[("z3", "1/2"), ("z4", "1/2")]);
        assert!(is_inducible(&g.tree, &g.ul, &p).unwrap().inducible);
        assert!(is_inducible_yshape(&g.tree, &g.ul, &p).unwrap());
        let u = misreport_for_distribution(&g.tree, &g.ul, &p).unwrap();
        assert_eq!(
            u,
            g.payoffs(&[("z1", -1), ("z2", -2), ("z3", 0), ("z4", -4)])
        );
        assert!(induces_behavioral(&g.tree, &g.ul, &u, &p));

        let best = optimal_misreport_behavioral(&g.tree, &g.ul, &g.uf);
        assert_eq!(best.distribution, p);
        assert_eq!(best.follower_true_utility, r("3/2"));
        assert_eq!(best.leader_utility, r("2"));
    }

    #[test]
    fn strong_b_optimum() {
        let g = fixtures::strong_b();
        let best = optimal_misreport_behavioral(&g.tree, &g.ul, &g.uf);
        assert_eq!(best.distribution, LeafDistribution::point(g.leaf_idx("z3")));
        assert_eq!(best.follower_true_utility, r("2"));
        assert!(induces_behavioral(
            &g.tree,
            &g.ul,
            &best.report,
            &best.distribution
        ));
    }

    #[test]
    fn amendment_case() {
        let g = fixtures::amendment();
        let p = LeafDistribution::point(g.leaf_idx("z2"));
        assert!(is_inducible(&g.tree, &g.ul, &p).unwrap().inducible);
        assert!(is_inducible_yshape(&g.tree, &g.ul, &p).unwrap());
        let u = misreport_for_distribution(&g.tree, &g.ul, &p).unwrap();
        assert!(induces_behavioral(&g.tree, &g.ul, &u, &p));
    }

    #[test]
    fn yshape_rejects_wide_support() {
        let g = fixtures::strong_b();
        let p = g.dist(&[("z1", "1/3"), ("z2", "1/3"), ("z3", "1/3")]);
        assert!(matches!(
            is_inducible_yshape(&g.tree, &g.ul, &p),
            Err(Error::NotRealizable(_))
        ));
    }

    #[test]
    fn recursive_search_agrees() {
        for (_, g) in fixtures::all() {
            let fast = optimal_misreport_behavioral(&g.tree, &g.ul, &g.uf);
            let key = (
                fast.follower_true_utility.clone(),
                fast.leader_utility.clone(),
            );
            assert_eq!(optimal_report_recursive(&g.tree, &g.ul, &g.uf, true), key);
            assert_eq!(optimal_report_recursive(&g.tree, &g.ul, &g.uf, false), key);
        }
    }

    #[test]
    fn pairs_have_leader_lca() {
        let g = fixtures::yshape();
        let all = LeaderLcaPairs::build(&g.tree);
        for v in 0..g.tree.len() {
            let listed: BTreeSet<_> = leader_lca_pairs(&g.tree, v).into_iter().collect();
            assert_eq!(listed, all.sets[v]);
            for (i, j) in listed {
                let l = g.tree.lca(g.tree.leaf_node(i), g.tree.leaf_node(j));
                assert_eq!(g.tree.owner(l), Some(Player::Leader));
            }
        }
    }
}
