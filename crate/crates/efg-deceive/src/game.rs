//! Game trees, payoff functions, leaf distributions and strategy profiles.
//!
//! Node ids are assigned in preorder with the root at 0, so every subtree
//! occupies a contiguous id range and its leaves a contiguous range of leaf
//! indices. Children keep their input order, which is the tie-break order used
//! everywhere in the crate.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "L")]
    Leader,
    #[serde(rename = "F")]
    Follower,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Leader => Player::Follower,
            Player::Follower => Player::Leader,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Player::Leader => "L",
            Player::Follower => "F",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Internal {
        owner: Player,
        children: Vec<NodeId>,
    },
    Leaf {
        label: String,
    },
}

/// One entry of a preorder node listing used to build a [`GameTree`].
#[derive(Clone, Debug)]
pub struct RawNode {
    pub parent: Option<NodeId>,
    pub kind: RawKind,
}

#[derive(Clone, Debug)]
pub enum RawKind {
    Internal(Player),
    Leaf(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    kinds: Vec<NodeKind>,
    parent: Vec<Option<NodeId>>,
    depth: Vec<usize>,
    end: Vec<NodeId>,
    leaves: Vec<NodeId>,
    leaf_index: Vec<usize>,
    leaf_lo: Vec<usize>,
    labels: HashMap<String, usize>,
}

const NOT_A_LEAF: usize = usize::MAX;

impl GameTree {
    /// Builds a tree from nodes listed in preorder; children appear in the
    /// order they are listed.
    pub fn from_preorder(raw: Vec<RawNode>) -> Result<GameTree> {
        let n = raw.len();
        if n == 0 {
            return Err(Error::MalformedTree("no nodes".into()));
        }
        let mut kinds = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        let mut depth = Vec::with_capacity(n);
        let mut leaves = Vec::new();
        let mut leaf_index = vec![NOT_A_LEAF; n];
        let mut labels = HashMap::new();
        let mut open: Vec<NodeId> = Vec::new();

        for (id, node) in raw.into_iter().enumerate() {
            match (id, node.parent) {
                (0, None) => depth.push(0),
                (0, Some(_)) => return Err(Error::MalformedTree("root has a parent".into())),
                (_, None) => return Err(Error::MalformedTree(format!("node {id} has no parent"))),
                (_, Some(p)) => {
                    while open.last().is_some_and(|&top| top != p) {
                        open.pop();
                    }
                    if open.is_empty() {
                        return Err(Error::MalformedTree(format!(
                            "node {id}: parent {p} is not an open internal ancestor"
                        )));
                    }
                    match &mut kinds[p] {
                        NodeKind::Internal { children, .. } => children.push(id),
                        NodeKind::Leaf { .. } => unreachable!("leaves are never opened"),
                    }
                    depth.push(depth[p] + 1);
                }
            }
            parent.push(node.parent);
            match node.kind {
                RawKind::Internal(owner) => {
                    kinds.push(NodeKind::Internal {
                        owner,
                        children: Vec::new(),
                    });
                    open.push(id);
                }
                RawKind::Leaf(label) => {
                    if labels.insert(label.clone(), leaves.len()).is_some() {
                        return Err(Error::DuplicateLabel(label));
                    }
                    leaf_index[id] = leaves.len();
                    leaves.push(id);
                    kinds.push(NodeKind::Leaf { label });
                }
            }
        }

        let mut end: Vec<NodeId> = (1..=n).collect();
        let mut leaf_lo = vec![0; n];
        for v in (0..n).rev() {
            match &kinds[v] {
                NodeKind::Internal { children, .. } => {
                    let Some(&last) = children.last() else {
                        return Err(Error::EmptyNode(v));
                    };
                    end[v] = end[last];
                    leaf_lo[v] = leaf_lo[children[0]];
                }
                NodeKind::Leaf { .. } => leaf_lo[v] = leaf_index[v],
            }
        }
        Ok(GameTree {
            kinds,
            parent,
            depth,
            end,
            leaves,
            leaf_index,
            leaf_lo,
            labels,
        })
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, v: NodeId) -> &NodeKind {
        &self.kinds[v]
    }

    pub fn owner(&self, v: NodeId) -> Option<Player> {
        match &self.kinds[v] {
            NodeKind::Internal { owner, .. } => Some(*owner),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        match &self.kinds[v] {
            NodeKind::Internal { children, .. } => children,
            NodeKind::Leaf { .. } => &[],
        }
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v]
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.leaf_index[v] != NOT_A_LEAF
    }

    /// Leaves in canonical (input) order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).filter(move |&v| !self.is_leaf(v))
    }

    pub fn nodes_of(&self, player: Player) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).filter(move |&v| self.owner(v) == Some(player))
    }

    /// Position of leaf `z` in canonical order.
    pub fn leaf_index(&self, z: NodeId) -> Option<usize> {
        match self.leaf_index.get(z) {
            Some(&i) if i != NOT_A_LEAF => Some(i),
            _ => None,
        }
    }

    pub fn leaf_node(&self, i: usize) -> NodeId {
        self.leaves[i]
    }

    pub fn label(&self, z: NodeId) -> Option<&str> {
        match &self.kinds[z] {
            NodeKind::Leaf { label } => Some(label),
            NodeKind::Internal { .. } => None,
        }
    }

    pub fn leaf_label(&self, i: usize) -> &str {
        self.label(self.leaves[i]).expect("leaf")
    }

    pub fn leaf_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.get(label).map(|&i| self.leaves[i])
    }

    pub fn leaf_index_by_label(&self, label: &str) -> Result<usize> {
        self.labels
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLeaf(label.to_string()))
    }

    /// Display name: the label for leaves, `n<id>` for internal nodes.
    pub fn node_name(&self, v: NodeId) -> String {
        match &self.kinds[v] {
            NodeKind::Leaf { label } => label.clone(),
            NodeKind::Internal { .. } => format!("n{v}"),
        }
    }

    /// Ids of the subtree rooted at `v`.
    pub fn subtree_range(&self, v: NodeId) -> Range<NodeId> {
        v..self.end[v]
    }

    /// Leaf indices of `Z_v`.
    pub fn leaf_span(&self, v: NodeId) -> Range<usize> {
        let lo = self.leaf_lo[v];
        let hi = if self.end[v] >= self.len() {
            self.leaves.len()
        } else {
            self.leaf_lo[self.end[v]]
        };
        lo..hi
    }

    pub fn contains(&self, ancestor: NodeId, v: NodeId) -> bool {
        ancestor <= v && v < self.end[ancestor]
    }

    /// The child of `ancestor` whose subtree holds `v`.
    pub fn child_toward(&self, ancestor: NodeId, v: NodeId) -> NodeId {
        debug_assert!(ancestor != v && self.contains(ancestor, v));
        let ch = self.children(ancestor);
        ch[ch.partition_point(|&c| c <= v) - 1]
    }

    /// Nodes from the root down to `v`, inclusive.
    pub fn path_to(&self, v: NodeId) -> Vec<NodeId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a, b);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root");
        }
        while a != b {
            a = self.parent[a].expect("non-root");
            b = self.parent[b].expect("non-root");
        }
        a
    }

    /// Least common ancestor of two leaves given by label.
    pub fn lca_of_labels(&self, a: &str, b: &str) -> Result<NodeId> {
        let za = self
            .leaf_by_label(a)
            .ok_or_else(|| Error::UnknownLeaf(a.into()))?;
        let zb = self
            .leaf_by_label(b)
            .ok_or_else(|| Error::UnknownLeaf(b.into()))?;
        Ok(self.lca(za, zb))
    }

    /// Children of the parent of `v` other than `v`.
    pub fn siblings(&self, parent: NodeId, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children(parent)
            .iter()
            .copied()
            .filter(move |&w| w != v)
    }

    pub fn to_raw(&self) -> Vec<RawNode> {
        (0..self.len())
            .map(|v| RawNode {
                parent: self.parent[v],
                kind: match &self.kinds[v] {
                    NodeKind::Internal { owner, .. } => RawKind::Internal(*owner),
                    NodeKind::Leaf { label } => RawKind::Leaf(label.clone()),
                },
            })
            .collect()
    }

    /// Materializes `T_v` as a standalone tree. Node ids shift by `v` and leaf
    /// indices by `leaf_span(v).start`.
    pub fn subtree(&self, v: NodeId) -> GameTree {
        let raw = self
            .subtree_range(v)
            .map(|u| RawNode {
                parent: if u == v {
                    None
                } else {
                    self.parent[u].map(|p| p - v)
                },
                kind: match &self.kinds[u] {
                    NodeKind::Internal { owner, .. } => RawKind::Internal(*owner),
                    NodeKind::Leaf { label } => RawKind::Leaf(label.clone()),
                },
            })
            .collect();
        GameTree::from_preorder(raw).expect("a subtree of a valid tree is valid")
    }

    /// Internal nodes with a single child are legal but unusual.
    pub fn warnings(&self) -> Vec<String> {
        self.internal_nodes()
            .filter(|&v| self.children(v).len() == 1)
            .map(|v| format!("node {} has a single child", self.node_name(v)))
            .collect()
    }
}

/// A total map from leaves to rationals, indexed by canonical leaf position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PayoffFunction {
    values: Vec<Rational>,
}

impl PayoffFunction {
    pub fn new(tree: &GameTree, values: Vec<Rational>) -> Result<Self> {
        if values.len() != tree.num_leaves() {
            return Err(Error::PayoffDomain {
                got: values.len(),
                want: tree.num_leaves(),
            });
        }
        Ok(PayoffFunction { values })
    }

    pub fn from_fn(tree: &GameTree, f: impl FnMut(usize) -> Rational) -> Self {
        PayoffFunction {
            values: (0..tree.num_leaves()).map(f).collect(),
        }
    }

    pub fn constant(tree: &GameTree, c: Rational) -> Self {
        PayoffFunction {
            values: vec![c; tree.num_leaves()],
        }
    }

    pub fn from_ints(tree: &GameTree, values: &[i64]) -> Result<Self> {
        Self::new(
            tree,
            values.iter().map(|&v| Rational::from_int(v)).collect(),
        )
    }

    pub fn get(&self, leaf: usize) -> &Rational {
        &self.values[leaf]
    }

    /// Value at leaf node `z`.
    pub fn at(&self, tree: &GameTree, z: NodeId) -> &Rational {
        &self.values[tree
            .leaf_index(z)
            .expect("payoffs are defined on leaves only")]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        PayoffFunction {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Restriction to `T_v`, matching the leaf order of `tree.subtree(v)`.
    pub fn restrict(&self, tree: &GameTree, v: NodeId) -> Self {
        PayoffFunction {
            values: self.values[tree.leaf_span(v)].to_vec(),
        }
    }

    pub fn from_labels(tree: &GameTree, map: &BTreeMap<String, Rational>) -> Result<Self> {
        let mut values = vec![None; tree.num_leaves()];
        for (label, v) in map {
            values[tree.leaf_index_by_label(label)?] = Some(v.clone());
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| Error::BadPayoff {
                    label: tree.leaf_label(i).to_string(),
                    value: "missing".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PayoffFunction { values })
    }

    pub fn to_labels(&self, tree: &GameTree) -> BTreeMap<String, Rational> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (tree.leaf_label(i).to_string(), v.clone()))
            .collect()
    }
}

/// A probability vector over leaves, stored sparsely (positive entries only).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafDistribution {
    probs: BTreeMap<usize, Rational>,
}

impl LeafDistribution {
    pub fn point(leaf: usize) -> Self {
        LeafDistribution {
            probs: BTreeMap::from([(leaf, Rational::one())]),
        }
    }

    /// `alpha` on `a`, the rest on `b`.
    pub fn mix(a: usize, b: usize, alpha: &Rational) -> Self {
        let mut probs = BTreeMap::new();
        let beta = Rational::one() - alpha;
        if alpha.is_positive() {
            probs.insert(a, alpha.clone());
        }
        if beta.is_positive() {
            *probs.entry(b).or_insert_with(Rational::zero) =
                probs.get(&b).cloned().unwrap_or_default() + beta;
        }
        LeafDistribution { probs }
    }

    pub fn new(
        tree: &GameTree,
        entries: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Result<Self> {
        let mut probs = BTreeMap::new();
        for (leaf, p) in entries {
            if leaf >= tree.num_leaves() {
                return Err(Error::BadDistribution(format!(
                    "leaf index {leaf} out of range"
                )));
            }
            if p.is_negative() {
                return Err(Error::BadDistribution(format!(
                    "negative mass {p} on {}",
                    tree.leaf_label(leaf)
                )));
            }
            if p.is_positive() {
                let e = probs.entry(leaf).or_insert_with(Rational::zero);
                *e = &*e + &p;
            }
        }
        let total: Rational = probs.values().sum();
        if total != Rational::one() {
            return Err(Error::BadDistribution(format!("mass sums to {total}")));
        }
        Ok(LeafDistribution { probs })
    }

    pub fn from_labels(tree: &GameTree, map: &BTreeMap<String, Rational>) -> Result<Self> {
        let entries = map
            .iter()
            .map(|(l, p)| Ok((tree.leaf_index_by_label(l)?, p.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(tree, entries)
    }

    pub fn to_labels(&self, tree: &GameTree) -> BTreeMap<String, Rational> {
        self.probs
            .iter()
            .map(|(&i, p)| (tree.leaf_label(i).to_string(), p.clone()))
            .collect()
    }

    pub fn prob(&self, leaf: usize) -> Rational {
        self.probs.get(&leaf).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.probs.iter().map(|(&i, p)| (i, p))
    }

    /// `Supp(p)` as leaf indices in canonical order.
    pub fn support(&self) -> Vec<usize> {
        self.probs.keys().copied().collect()
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// `p(v)`: probability of reaching `v`.
    pub fn reach(&self, tree: &GameTree, v: NodeId) -> Rational {
        self.probs.range(tree.leaf_span(v)).map(|(_, p)| p).sum()
    }

    pub fn reaches(&self, tree: &GameTree, v: NodeId) -> bool {
        self.probs.range(tree.leaf_span(v)).next().is_some()
    }

    /// `Supp(p, v)`: children of `v` reached with positive probability.
    pub fn supported_children(&self, tree: &GameTree, v: NodeId) -> Vec<NodeId> {
        tree.children(v)
            .iter()
            .copied()
            .filter(|&w| self.reaches(tree, w))
            .collect()
    }

    /// `p|_v`, kept on the host tree's leaf indices. `None` when `p(v) = 0`.
    pub fn restrict(&self, tree: &GameTree, v: NodeId) -> Option<Self> {
        let mass = self.reach(tree, v);
        if mass.is_zero() {
            return None;
        }
        let probs = self
            .probs
            .range(tree.leaf_span(v))
            .map(|(&i, p)| (i, p / &mass))
            .collect();
        Some(LeafDistribution { probs })
    }

    /// Re-indexes a distribution supported inside `T_v` onto `tree.subtree(v)`.
    pub fn to_subtree(&self, tree: &GameTree, v: NodeId) -> Option<Self> {
        let span = tree.leaf_span(v);
        if self.probs.keys().any(|i| !span.contains(i)) {
            return None;
        }
        Some(LeafDistribution {
            probs: self
                .probs
                .iter()
                .map(|(&i, p)| (i - span.start, p.clone()))
                .collect(),
        })
    }

    /// `Σ_z p(z) u(z)`.
    pub fn expect(&self, u: &PayoffFunction) -> Rational {
        self.probs.iter().map(|(&i, p)| p * u.get(i)).sum()
    }

    /// `u(p|_v)`, or `None` when `p(v) = 0`.
    pub fn expect_at(&self, tree: &GameTree, u: &PayoffFunction, v: NodeId) -> Option<Rational> {
        let mut mass = Rational::zero();
        let mut acc = Rational::zero();
        for (&i, p) in self.probs.range(tree.leaf_span(v)) {
            mass = mass + p;
            acc = acc + p * u.get(i);
        }
        if mass.is_zero() {
            None
        } else {
            Some(acc / mass)
        }
    }

    /// Reach probability of every node, computed bottom-up.
    pub fn reach_all(&self, tree: &GameTree) -> Vec<Rational> {
        let mut reach = vec![Rational::zero(); tree.len()];
        for (&i, p) in &self.probs {
            reach[tree.leaf_node(i)] = p.clone();
        }
        for v in (0..tree.len()).rev() {
            if let Some(p) = tree.parent(v) {
                if !reach[v].is_zero() {
                    reach[p] = &reach[p] + &reach[v];
                }
            }
        }
        reach
    }
}

/// The follower node where a distribution splits its mass, if any.
pub fn first_split(tree: &GameTree, p: &LeafDistribution) -> Option<NodeId> {
    let support = p.support();
    let mut seen: HashMap<NodeId, NodeId> = HashMap::new();
    for &i in &support {
        let mut child = tree.leaf_node(i);
        while let Some(v) = tree.parent(child) {
            if tree.owner(v) == Some(Player::Follower) {
                match seen.get(&v) {
                    Some(&c) if c != child => return Some(v),
                    Some(_) => break,
                    None => {
                        seen.insert(v, child);
                    }
                }
            }
            child = v;
        }
    }
    None
}

/// True iff every reached follower node has exactly one supported child.
pub fn is_realizable(tree: &GameTree, p: &LeafDistribution) -> bool {
    first_split(tree, p).is_none()
}

pub fn outcome_utilities(u: &PayoffFunction, p: &LeafDistribution) -> Rational {
    p.expect(u)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureStrategy {
    pub player: Player,
    pub choices: BTreeMap<NodeId, NodeId>,
}

impl PureStrategy {
    pub fn empty(player: Player) -> Self {
        PureStrategy {
            player,
            choices: BTreeMap::new(),
        }
    }

    pub fn choice(&self, v: NodeId) -> Option<NodeId> {
        self.choices.get(&v).copied()
    }

    pub fn validate(&self, tree: &GameTree) -> Result<()> {
        for v in tree.nodes_of(self.player) {
            match self.choices.get(&v) {
                Some(c) if tree.children(v).contains(c) => {}
                _ => {
                    return Err(Error::MalformedTree(format!(
                        "no valid choice at {}",
                        tree.node_name(v)
                    )))
                }
            }
        }
        if self.choices.len() != tree.nodes_of(self.player).count() {
            return Err(Error::MalformedTree(
                "choices outside the player's nodes".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self, tree: &GameTree) -> Value {
        Value::Object(
            self.choices
                .iter()
                .map(|(&v, &c)| (tree.node_name(v), Value::String(tree.node_name(c))))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehavioralStrategy {
    pub player: Player,
    pub mixes: BTreeMap<NodeId, Vec<(NodeId, Rational)>>,
}

impl BehavioralStrategy {
    pub fn from_pure(pure: &PureStrategy) -> Self {
        BehavioralStrategy {
            player: pure.player,
            mixes: pure
                .choices
                .iter()
                .map(|(&v, &c)| (v, vec![(c, Rational::one())]))
                .collect(),
        }
    }

    pub fn weight(&self, v: NodeId, child: NodeId) -> Rational {
        self.mixes
            .get(&v)
            .and_then(|m| m.iter().find(|(c, _)| *c == child))
            .map(|(_, q)| q.clone())
            .unwrap_or_default()
    }

    pub fn validate(&self, tree: &GameTree) -> Result<()> {
        for v in tree.nodes_of(self.player) {
            let mix = self
                .mixes
                .get(&v)
                .ok_or_else(|| Error::MalformedTree(format!("no mix at {}", tree.node_name(v))))?;
            let mut total = Rational::zero();
            for (c, q) in mix {
                if !tree.children(v).contains(c) || q.is_negative() {
                    return Err(Error::MalformedTree(format!(
                        "bad mix entry at {}",
                        tree.node_name(v)
                    )));
                }
                total = total + q;
            }
            if total != Rational::one() {
                return Err(Error::MalformedTree(format!(
                    "mix at {} sums to {total}",
                    tree.node_name(v)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, tree: &GameTree) -> Value {
        Value::Object(
            self.mixes
                .iter()
                .map(|(&v, mix)| {
                    let inner = mix
                        .iter()
                        .filter(|(_, q)| q.is_positive())
                        .map(|(c, q)| (tree.node_name(*c), Value::String(q.to_string())))
                        .collect();
                    (tree.node_name(v), Value::Object(inner))
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile {
    pub leader: BehavioralStrategy,
    pub follower: PureStrategy,
}

impl StrategyProfile {
    pub fn validate(&self, tree: &GameTree) -> Result<()> {
        if self.leader.player != Player::Leader || self.follower.player != Player::Follower {
            return Err(Error::MalformedTree("profile sides swapped".into()));
        }
        self.leader.validate(tree)?;
        self.follower.validate(tree)
    }

    /// Probability attached to the edge `v -> child` by this profile.
    pub fn edge_prob(&self, tree: &GameTree, v: NodeId, child: NodeId) -> Rational {
        match tree.owner(v) {
            Some(Player::Leader) => self.leader.weight(v, child),
            Some(Player::Follower) if self.follower.choice(v) == Some(child) => Rational::one(),
            _ => Rational::zero(),
        }
    }

    pub fn to_json(&self, tree: &GameTree) -> Value {
        serde_json::json!({
            "leader": self.leader.to_json(tree),
            "follower": self.follower.to_json(tree),
        })
    }
}

/// Leaf distribution generated by a profile: products of edge probabilities.
pub fn outcome_distribution(tree: &GameTree, profile: &StrategyProfile) -> LeafDistribution {
    let mut probs = BTreeMap::new();
    let mut stack = vec![(tree.root(), Rational::one())];
    while let Some((v, mass)) = stack.pop() {
        match tree.owner(v) {
            None => {
                probs.insert(tree.leaf_index(v).expect("leaf"), mass);
            }
            Some(Player::Follower) => {
                let c = profile
                    .follower
                    .choice(v)
                    .expect("follower strategy covers every follower node");
                stack.push((c, mass));
            }
            Some(Player::Leader) => {
                let mix = profile
                    .leader
                    .mixes
                    .get(&v)
                    .expect("leader strategy covers every leader node");
                for (c, q) in mix {
                    if q.is_positive() {
                        stack.push((*c, &mass * q));
                    }
                }
            }
        }
    }
    LeafDistribution { probs }
}

/// A parsed game: tree plus true leader and follower payoffs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub tree: GameTree,
    pub ul: PayoffFunction,
    pub uf: PayoffFunction,
}

impl Game {
    pub fn new(tree: GameTree, ul: PayoffFunction, uf: PayoffFunction) -> Self {
        Game { tree, ul, uf }
    }

    /// Leaf node by label; panics on unknown labels.
    pub fn leaf(&self, label: &str) -> NodeId {
        self.tree
            .leaf_by_label(label)
            .unwrap_or_else(|| panic!("no leaf {label:?}"))
    }

    pub fn leaf_idx(&self, label: &str) -> usize {
        self.tree.leaf_index(self.leaf(label)).expect("leaf")
    }

    /// Distribution from `(label, "a/b")` pairs; panics on invalid input.
    pub fn dist(&self, entries: &[(&str, &str)]) -> LeafDistribution {
        let map = entries
            .iter()
            .map(|(l, p)| (l.to_string(), p.parse().expect("rational")))
            .collect();
        LeafDistribution::from_labels(&self.tree, &map).expect("valid distribution")
    }

    /// Payoff function from `(label, value)` pairs covering every leaf.
    pub fn payoffs(&self, entries: &[(&str, i64)]) -> PayoffFunction {
        let map = entries
            .iter()
            .map(|(l, v)| (l.to_string(), Rational::from_int(*v)))
            .collect();
        PayoffFunction::from_labels(&self.tree, &map).expect("total payoff function")
    }

    pub fn with_uf(&self, uf: PayoffFunction) -> Game {
        Game {
            tree: self.tree.clone(),
            ul: self.ul.clone(),
            uf,
        }
    }

    pub fn to_text(&self) -> String {
        serialize_game(&self.tree, &self.ul, &self.uf)
    }
}

fn syntax(msg: impl Into<String>) -> Error {
    Error::Syntax(msg.into())
}

fn parse_payoff(label: &str, v: Option<&Value>) -> Result<Rational> {
    let bad = |value: String| Error::BadPayoff {
        label: label.to_string(),
        value,
    };
    match v {
        Some(Value::String(s)) => s.parse().map_err(|_| bad(s.clone())),
        Some(Value::Number(n)) if n.is_i64() || n.is_u64() => {
            n.to_string().parse().map_err(|_| bad(n.to_string()))
        }
        Some(other) => Err(bad(other.to_string())),
        None => Err(bad("missing".into())),
    }
}

/// Parses `{"root": NODE}`.
pub fn parse_game(text: &str) -> Result<Game> {
    let doc: Value = serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| syntax("top level must be an object"))?;
    if obj.len() != 1 {
        return Err(syntax("top level must have exactly the key \"root\""));
    }
    let root = obj.get("root").ok_or_else(|| syntax("missing \"root\""))?;

    let mut raw = Vec::new();
    let mut ul = Vec::new();
    let mut uf = Vec::new();
    let mut stack: Vec<(Option<NodeId>, &Value)> = vec![(None, root)];
    while let Some((parent, node)) = stack.pop() {
        let id = raw.len();
        let o = node
            .as_object()
            .ok_or_else(|| syntax("node must be an object"))?;
        if let Some(label) = o.get("leaf") {
            let label = label
                .as_str()
                .ok_or_else(|| syntax("leaf label must be a string"))?;
            if let Some(k) = o
                .keys()
                .find(|k| !matches!(k.as_str(), "leaf" | "uL" | "uF"))
            {
                return Err(syntax(format!("unexpected key {k:?} in leaf {label:?}")));
            }
            ul.push(parse_payoff(label, o.get("uL"))?);
            uf.push(parse_payoff(label, o.get("uF"))?);
            raw.push(RawNode {
                parent,
                kind: RawKind::Leaf(label.to_string()),
            });
        } else {
            if let Some(k) = o
                .keys()
                .find(|k| !matches!(k.as_str(), "player" | "children"))
            {
                return Err(syntax(format!("unexpected key {k:?} in internal node")));
            }
            let owner = match o.get("player").and_then(Value::as_str) {
                Some("L") => Player::Leader,
                Some("F") => Player::Follower,
                _ => return Err(syntax("internal node needs \"player\": \"L\" or \"F\"")),
            };
            let children = o
                .get("children")
                .and_then(Value::as_array)
                .ok_or_else(|| syntax("internal node needs a \"children\" array"))?;
            if children.is_empty() {
                return Err(Error::EmptyNode(id));
            }
            raw.push(RawNode {
                parent,
                kind: RawKind::Internal(owner),
            });
            for c in children.iter().rev() {
                stack.push((Some(id), c));
            }
        }
    }
    let tree = GameTree::from_preorder(raw)?;
    let ul = PayoffFunction::new(&tree, ul)?;
    let uf = PayoffFunction::new(&tree, uf)?;
    Ok(Game { tree, ul, uf })
}

/// Emits the game file format; `parse_game` inverts it exactly.
pub fn serialize_game(tree: &GameTree, ul: &PayoffFunction, uf: &PayoffFunction) -> String {
    fn emit(
        out: &mut String,
        tree: &GameTree,
        ul: &PayoffFunction,
        uf: &PayoffFunction,
        v: NodeId,
        indent: usize,
    ) {
        let pad = "  ".repeat(indent);
        match tree.kind(v) {
            NodeKind::Leaf { label } => {
                let i = tree.leaf_index(v).expect("leaf");
                let _ = write!(
                    out,
                    "{pad}{{\"leaf\": {}, \"uL\": \"{}\", \"uF\": \"{}\"}}",
                    serde_json::to_string(label).expect("string"),
                    ul.get(i),
                    uf.get(i)
                );
            }
            NodeKind::Internal { owner, children } => {
                let _ = writeln!(
                    out,
                    "{pad}{{\"player\": \"{}\", \"children\": [",
                    owner.tag()
                );
                for (k, &c) in children.iter().enumerate() {
                    emit(out, tree, ul, uf, c, indent + 1);
                    out.push_str(if k + 1 < children.len() { ",\n" } else { "\n" });
                }
                let _ = write!(out, "{pad}]}}");
            }
        }
    }
    let mut out = String::from("{\"root\":\n");
    emit(&mut out, tree, ul, uf, tree.root(), 1);
    out.push_str("\n}\n");
    out
}

fn parse_label_map(text: &str) -> Result<BTreeMap<String, Rational>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| syntax("expected an object of leaf label -> rational"))?;
    obj.iter()
        .map(|(k, v)| Ok((k.clone(), parse_payoff(k, Some(v))?)))
        .collect()
}

/// Parses a distribution file: leaf label -> probability.
pub fn parse_distribution(tree: &GameTree, text: &str) -> Result<LeafDistribution> {
    LeafDistribution::from_labels(tree, &parse_label_map(text)?)
}

/// Parses a payoff report file: leaf label -> value, total over leaves.
pub fn parse_payoffs(tree: &GameTree, text: &str) -> Result<PayoffFunction> {
    PayoffFunction::from_labels(tree, &parse_label_map(text)?)
}

pub fn label_map_json(map: &BTreeMap<String, Rational>) -> Value {
    Value::Object(
        map.iter()
            .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::r;

    #[test]
    fn parses_cheat_fixture() {
        let g = fixtures::cheat();
        assert_eq!(g.tree.internal_nodes().count(), 3);
        assert_eq!(g.tree.num_leaves(), 4);
        assert_eq!(g.tree.owner(0), Some(Player::Follower));
        let labels: Vec<_> = (0..4).map(|i| g.tree.leaf_label(i)).collect();
        assert_eq!(labels, ["z1", "z2", "z3", "z4"]);
    }

    #[test]
    fn single_leaf_game() {
        let g = parse_game(r#"{"root":{"leaf":"z","uL":"0","uF":"0"}}"#).unwrap();
        assert_eq!(g.tree.len(), 1);
        assert_eq!(g.tree.internal_nodes().count(), 0);
        assert_eq!(g.tree.num_leaves(), 1);
    }

    #[test]
    fn exact_payoffs_round_trip() {
        let g = parse_game(r#"{"root":{"player":"L","children":[{"leaf":"a","uL":"1/3","uF":7},{"leaf":"b","uL":"7/2","uF":"-2"}]}}"#).unwrap();
        assert_eq!(g.ul.get(0), &r("1/3"));
        let text = serialize_game(&g.tree, &g.ul, &g.uf);
        assert!(text.contains("\"7/2\""));
        assert_eq!(parse_game(&text).unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_game("{"), Err(Error::Syntax(_))));
        assert!(matches!(
            parse_game(
                r#"{"root":{"player":"L","children":[{"leaf":"a","uL":0,"uF":0},{"leaf":"a","uL":0,"uF":0}]}}"#
            ),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            parse_game(r#"{"root":{"player":"L","children":[{"leaf":"a","uL":"x","uF":0}]}}"#),
            Err(Error::BadPayoff { .. })
        ));
        assert!(matches!(
            parse_game(r#"{"root":{"leaf":"a","uL":1.5,"uF":0}}"#),
            Err(Error::BadPayoff { .. })
        ));
        assert!(matches!(
            parse_game(r#"{"root":{"player":"F","children":[]}}"#),
            Err(Error::EmptyNode(0))
        ));
    }

    #[test]
    fn lca_and_spans() {
        let g = fixtures::strong_a();
        let t = &g.tree;
        let id = |l: &str| t.leaf_by_label(l).unwrap();
        let l2 = t.parent(id("z3")).unwrap();
        assert_eq!(t.lca(id("z3"), id("z4")), l2);
        assert_eq!(t.lca(id("z3"), id("z3")), id("z3"));
        assert_eq!(t.lca(id("z1"), id("z4")), t.root());
        assert_eq!(t.leaf_span(l2), 2..4);
        assert_eq!(t.child_toward(t.root(), id("z4")), l2);

        let b = fixtures::pure_gap_b();
        let l2 = b.tree.lca_of_labels("z3", "z5").unwrap();
        assert_eq!(b.tree.owner(l2), Some(Player::Leader));
        assert_eq!(b.tree.leaf_span(l2), 2..6);
    }

    #[test]
    fn realizability() {
        let a = fixtures::pure_gap_a();
        let p = a.dist(&[("z1", "1/2"), ("z3", "1/2")]);
        assert!(is_realizable(&a.tree, &p));
        let c = fixtures::cheat();
        let p = c.dist(&[("z1", "1/2"), ("z3", "1/2")]);
        assert!(!is_realizable(&c.tree, &p));
        assert_eq!(first_split(&c.tree, &p), Some(0));
        for i in 0..4 {
            assert!(is_realizable(&c.tree, &LeafDistribution::point(i)));
        }
    }

    #[test]
    fn utilities_and_restrictions() {
        let g = fixtures::strong_a();
        let p = g.dist(&[("z3", "1/2"), ("z4", "1/2")]);
        assert_eq!(outcome_utilities(&g.uf, &p), r("3/2"));
        assert_eq!(outcome_utilities(&g.ul, &p), r("2"));
        let l2 = g.tree.parent(g.leaf("z3")).unwrap();
        assert_eq!(p.reach(&g.tree, l2), Rational::one());
        assert_eq!(p.supported_children(&g.tree, 0), vec![l2]);
        assert_eq!(p.expect_at(&g.tree, &g.uf, l2), Some(r("3/2")));
        assert_eq!(p.expect_at(&g.tree, &g.uf, 1), None);
    }

    #[test]
    fn distribution_validation() {
        let g = fixtures::cheat();
        assert!(LeafDistribution::new(&g.tree, [(0, r("1/2"))]).is_err());
        assert!(LeafDistribution::new(&g.tree, [(0, r("3/2")), (1, r("-1/2"))]).is_err());
        assert!(LeafDistribution::new(&g.tree, [(9, r("1"))]).is_err());
        let p =
            LeafDistribution::new(&g.tree, [(0, r("1/2")), (0, r("1/2")), (2, r("0"))]).unwrap();
        assert_eq!(p, LeafDistribution::point(0));
    }

    #[test]
    fn profile_outcome() {
        let g = fixtures::behav();
        let t = &g.tree;
        let l = t.children(0)[0];
        let leader = BehavioralStrategy {
            player: Player::Leader,
            mixes: BTreeMap::from([(
                l,
                vec![(t.children(l)[0], r("3/5")), (t.children(l)[1], r("2/5"))],
            )]),
        };
        let follower = PureStrategy {
            player: Player::Follower,
            choices: BTreeMap::from([(0, l)]),
        };
        let profile = StrategyProfile { leader, follower };
        profile.validate(t).unwrap();
        let p = outcome_distribution(t, &profile);
        assert_eq!(p.prob(0), r("3/5"));
        assert_eq!(p.prob(1), r("2/5"));
        assert_eq!(p.expect(&g.ul), r("14/5"));
    }

    #[test]
    fn subtree_materialization() {
        let g = fixtures::yshape();
        let v = g.tree.children(0)[1];
        let sub = g.tree.subtree(v);
        let span = g.tree.leaf_span(v);
        assert_eq!(sub.num_leaves(), span.len());
        for (k, i) in span.enumerate() {
            assert_eq!(sub.leaf_label(k), g.tree.leaf_label(i));
        }
    }
}
