//! Maximin values `M_i(v)` and the pure strategies that attain them.

use std::collections::BTreeMap;

use crate::game::{GameTree, NodeId, PayoffFunction, Player, PureStrategy};
use crate::rational::Rational;

/// `M_i(v)` for every node, indexed by node id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximinTable {
    pub player: Player,
    pub values: Vec<Rational>,
}

impl MaximinTable {
    pub fn get(&self, v: NodeId) -> &Rational {
        &self.values[v]
    }

    pub fn root(&self) -> &Rational {
        &self.values[0]
    }

    /// First child of `v` with the largest value.
    pub fn argmax_child(&self, tree: &GameTree, v: NodeId) -> NodeId {
        first_best(tree.children(v), |a, b| self.values[a] > self.values[b])
    }

    /// First child of `v` with the smallest value.
    pub fn argmin_child(&self, tree: &GameTree, v: NodeId) -> NodeId {
        first_best(tree.children(v), |a, b| self.values[a] < self.values[b])
    }
}

fn first_best(children: &[NodeId], better: impl Fn(NodeId, NodeId) -> bool) -> NodeId {
    let mut best = children[0];
    for &c in &children[1..] {
        if better(c, best) {
            best = c;
        }
    }
    best
}

pub fn maximin_values(tree: &GameTree, payoffs: &PayoffFunction, player: Player) -> MaximinTable {
    let mut values = vec![Rational::zero(); tree.len()];
    for v in (0..tree.len()).rev() {
        values[v] = match tree.owner(v) {
            None => payoffs.at(tree, v).clone(),
            Some(owner) => {
                let kids = tree.children(v).iter().map(|&c| &values[c]);
                if owner == player {
                    kids.max()
                } else {
                    kids.min()
                }
                .expect("internal nodes have children")
                .clone()
            }
        };
    }
    MaximinTable { player, values }
}

/// At each of `player`'s nodes, the first child maximizing `M_player`.
pub fn maximin_strategy(tree: &GameTree, payoffs: &PayoffFunction, player: Player) -> PureStrategy {
    let table = maximin_values(tree, payoffs, player);
    let choices = tree
        .nodes_of(player)
        .map(|v| (v, table.argmax_child(tree, v)))
        .collect();
    PureStrategy { player, choices }
}

/// At each of `opponent`'s nodes, the first child minimizing the other
/// player's maximin value.
pub fn minimax_strategy(
    tree: &GameTree,
    payoffs: &PayoffFunction,
    opponent: Player,
) -> PureStrategy {
    let table = maximin_values(tree, payoffs, opponent.opponent());
    let choices = tree
        .nodes_of(opponent)
        .map(|v| (v, table.argmin_child(tree, v)))
        .collect();
    PureStrategy {
        player: opponent,
        choices,
    }
}

/// Per-node min and max of a table over the node's siblings. `None` stands
/// for the empty sibling set (root, or an only child): +inf for the min and
/// -inf for the max.
#[derive(Clone, Debug)]
pub struct SiblingBounds {
    pub min: Vec<Option<Rational>>,
    pub max: Vec<Option<Rational>>,
}

impl SiblingBounds {
    pub fn new(tree: &GameTree, table: &MaximinTable) -> Self {
        let mut min = vec![None; tree.len()];
        let mut max = vec![None; tree.len()];
        for v in tree.internal_nodes() {
            let ch = tree.children(v);
            if ch.len() < 2 {
                continue;
            }
            // Two best on each side are enough to exclude any single child.
            let (lo1, lo2) = two_best(ch, |a, b| table.values[a] < table.values[b]);
            let (hi1, hi2) = two_best(ch, |a, b| table.values[a] > table.values[b]);
            for &c in ch {
                let lo = if c == lo1 { lo2 } else { lo1 };
                let hi = if c == hi1 { hi2 } else { hi1 };
                min[c] = Some(table.values[lo].clone());
                max[c] = Some(table.values[hi].clone());
            }
        }
        SiblingBounds { min, max }
    }
}

fn two_best(children: &[NodeId], better: impl Fn(NodeId, NodeId) -> bool) -> (NodeId, NodeId) {
    let (mut a, mut b) = if better(children[1], children[0]) {
        (children[1], children[0])
    } else {
        (children[0], children[1])
    };
    for &c in &children[2..] {
        if better(c, a) {
            b = a;
            a = c;
        } else if better(c, b) {
            b = c;
        }
    }
    (a, b)
}

/// `(node name -> value)` view used by the CLI.
pub fn table_by_name(tree: &GameTree, table: &MaximinTable) -> BTreeMap<String, Rational> {
    (0..tree.len())
        .map(|v| (tree.node_name(v), table.values[v].clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{outcome_distribution, BehavioralStrategy, StrategyProfile};

    #[test]
    fn cheat_tables() {
        let g = fixtures::cheat();
        let t = &g.tree;
        let ml = maximin_values(t, &g.ul, Player::Leader);
        let (left, right) = (t.children(0)[0], t.children(0)[1]);
        assert_eq!(ml.root(), &Rational::from_int(2));
        assert_eq!(ml.get(left), &Rational::from_int(8));
        assert_eq!(ml.get(right), &Rational::from_int(2));
        let mf = maximin_values(t, &g.uf, Player::Follower);
        assert_eq!(mf.root(), &Rational::from_int(2));
    }

    #[test]
    fn single_leaf_table() {
        let g = crate::game::parse_game(r#"{"root":{"leaf":"z","uL":"7","uF":"0"}}"#).unwrap();
        let t = maximin_values(&g.tree, &g.ul, Player::Leader);
        assert_eq!(t.values, vec![Rational::from_int(7)]);
        assert!(maximin_strategy(&g.tree, &g.ul, Player::Leader)
            .choices
            .is_empty());
        assert!(minimax_strategy(&g.tree, &g.ul, Player::Follower)
            .choices
            .is_empty());
    }

    #[test]
    fn strategies_follow_tie_order() {
        let g = fixtures::cheat();
        let t = &g.tree;
        let f = maximin_strategy(t, &g.uf, Player::Follower);
        assert_eq!(f.choice(0), Some(t.children(0)[1]));
        let m = minimax_strategy(t, &g.ul, Player::Follower);
        assert_eq!(m.choice(0), Some(t.children(0)[1]));

        let a = fixtures::strong_a();
        let s = maximin_strategy(&a.tree, &a.ul, Player::Leader);
        let l1 = a.tree.children(0)[0];
        let l2 = a.tree.children(0)[1];
        assert_eq!(s.choice(l1), Some(a.leaf("z2")));
        assert_eq!(s.choice(l2), Some(a.leaf("z4")));

        let tie = crate::game::parse_game(
            r#"{"root":{"player":"L","children":[{"leaf":"a","uL":1,"uF":0},{"leaf":"b","uL":1,"uF":0}]}}"#,
        )
        .unwrap();
        assert_eq!(
            maximin_strategy(&tie.tree, &tie.ul, Player::Leader).choice(0),
            Some(1)
        );
    }

    #[test]
    fn maximin_pair_attains_value() {
        let g = fixtures::yshape();
        let t = &g.tree;
        let table = maximin_values(t, &g.ul, Player::Leader);
        let profile = StrategyProfile {
            leader: BehavioralStrategy::from_pure(&maximin_strategy(t, &g.ul, Player::Leader)),
            follower: minimax_strategy(t, &g.ul, Player::Follower),
        };
        let p = outcome_distribution(t, &profile);
        assert_eq!(&p.expect(&g.ul), table.root());
    }

    #[test]
    fn sibling_bounds() {
        let g = fixtures::strong_b();
        let t = &g.tree;
        let table = maximin_values(t, &g.ul, Player::Leader);
        let sb = SiblingBounds::new(t, &table);
        let [l1, l2, l3] = [t.children(0)[0], t.children(0)[1], t.children(0)[2]];
        assert_eq!(sb.min[l2], Some(Rational::from_int(2)));
        assert_eq!(sb.min[l1], Some(Rational::from_int(2)));
        assert_eq!(sb.max[l3], Some(Rational::from_int(2)));
        assert_eq!(sb.min[0], None);
    }
}
