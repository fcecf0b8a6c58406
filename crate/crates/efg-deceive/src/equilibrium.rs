//! Best responses, feasibility, and strong Stackelberg equilibria under pure
//! and behavioral commitment.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontier::{Frontier, Point};
use crate::game::{
    first_split, outcome_distribution, BehavioralStrategy, GameTree, LeafDistribution, NodeId,
    PayoffFunction, Player, PureStrategy, StrategyProfile,
};
use crate::maximin::{maximin_values, MaximinTable};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Commitment {
    Pure,
    Behavioral,
}

#[derive(Clone, Debug)]
pub struct SseSolution {
    pub commitment: Commitment,
    pub leader_value: Rational,
    pub follower_value: Rational,
    pub outcome: LeafDistribution,
    pub witness: StrategyProfile,
    /// Pure mode: a point mass per optimal leaf. Behavioral mode: the witness
    /// outcome followed by every optimal point mass.
    pub all_optimal_outcomes: Vec<LeafDistribution>,
}

/// Follower best responses to a fixed leader strategy.
#[derive(Clone, Debug)]
pub struct BestResponses {
    /// Follower value of every node under optimal follower play below it.
    pub follower_values: Vec<Rational>,
    /// Leader value under the leader-favoured best response.
    pub leader_values: Vec<Rational>,
    /// Every best-response child at each follower node. A pure strategy is in
    /// the BR set (up to unreached nodes) iff it picks from these everywhere.
    pub argmax: BTreeMap<NodeId, Vec<NodeId>>,
    pub leader_favored: PureStrategy,
}

impl BestResponses {
    /// Number of strategies picking an argmax child at every follower node.
    pub fn count(&self) -> u128 {
        self.argmax
            .values()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    pub fn contains(&self, strategy: &PureStrategy) -> bool {
        self.argmax
            .iter()
            .all(|(v, set)| strategy.choice(*v).is_some_and(|c| set.contains(&c)))
    }
}

pub fn best_responses(
    tree: &GameTree,
    ul: &PayoffFunction,
    reported_uf: &PayoffFunction,
    leader: &BehavioralStrategy,
) -> BestResponses {
    let n = tree.len();
    let mut vf = vec![Rational::zero(); n];
    let mut vl = vec![Rational::zero(); n];
    let mut argmax = BTreeMap::new();
    let mut pick = BTreeMap::new();
    for v in (0..n).rev() {
        match tree.owner(v) {
            None => {
                vf[v] = reported_uf.at(tree, v).clone();
                vl[v] = ul.at(tree, v).clone();
            }
            Some(Player::Leader) => {
                let mix = &leader.mixes[&v];
                vf[v] = mix.iter().map(|(c, q)| q * &vf[*c]).sum();
                vl[v] = mix.iter().map(|(c, q)| q * &vl[*c]).sum();
            }
            Some(Player::Follower) => {
                let ch = tree.children(v);
                let best = ch.iter().map(|&c| &vf[c]).max().expect("nonempty").clone();
                let set: Vec<NodeId> = ch.iter().copied().filter(|&c| vf[c] == best).collect();
                let mut fav = set[0];
                for &c in &set[1..] {
                    if vl[c] > vl[fav] {
                        fav = c;
                    }
                }
                vf[v] = best;
                vl[v] = vl[fav].clone();
                argmax.insert(v, set);
                pick.insert(v, fav);
            }
        }
    }
    BestResponses {
        follower_values: vf,
        leader_values: vl,
        argmax,
        leader_favored: PureStrategy {
            player: Player::Follower,
            choices: pick,
        },
    }
}

/// For every leaf, whether `U_F(z) >= M_F(v)` at each follower ancestor.
pub fn reachable_leaves(tree: &GameTree, mf: &MaximinTable) -> Vec<bool> {
    // bound[v] = max of M_F over follower proper ancestors of v
    let mut bound: Vec<Option<&Rational>> = vec![None; tree.len()];
    let mut out = vec![false; tree.num_leaves()];
    for v in 0..tree.len() {
        if let Some(p) = tree.parent(v) {
            let mut b = bound[p];
            if tree.owner(p) == Some(Player::Follower) {
                let m = mf.get(p);
                b = Some(b.map_or(m, |x| x.max(m)));
            }
            bound[v] = b;
        }
        if let Some(i) = tree.leaf_index(v) {
            out[i] = bound[v].is_none_or(|b| mf.get(v) >= b);
        }
    }
    out
}

pub fn pure_commitment_reachable(tree: &GameTree, uf: &PayoffFunction, z: NodeId) -> Result<bool> {
    if tree.leaf_index(z).is_none() {
        return Err(Error::UnknownNode(z));
    }
    let mf = maximin_values(tree, uf, Player::Follower);
    let u = mf.get(z);
    Ok(tree
        .path_to(z)
        .iter()
        .all(|&v| tree.owner(v) != Some(Player::Follower) || u >= mf.get(v)))
}

/// Off the target path the leader minimizes and the follower maximizes `M_F`.
fn default_profile(
    tree: &GameTree,
    mf: &MaximinTable,
) -> (BTreeMap<NodeId, NodeId>, BTreeMap<NodeId, NodeId>) {
    let mut lead = BTreeMap::new();
    let mut foll = BTreeMap::new();
    for v in tree.internal_nodes() {
        match tree.owner(v) {
            Some(Player::Leader) => {
                lead.insert(v, mf.argmin_child(tree, v));
            }
            _ => {
                foll.insert(v, mf.argmax_child(tree, v));
            }
        }
    }
    (lead, foll)
}

/// Pure profile leading to `z`, with threats off the path.
pub fn pure_witness(tree: &GameTree, mf: &MaximinTable, z: NodeId) -> StrategyProfile {
    let (mut lead, mut foll) = default_profile(tree, mf);
    let path = tree.path_to(z);
    for w in path.windows(2) {
        match tree.owner(w[0]) {
            Some(Player::Leader) => lead.insert(w[0], w[1]),
            _ => foll.insert(w[0], w[1]),
        };
    }
    StrategyProfile {
        leader: BehavioralStrategy::from_pure(&PureStrategy {
            player: Player::Leader,
            choices: lead,
        }),
        follower: PureStrategy {
            player: Player::Follower,
            choices: foll,
        },
    }
}

pub fn solve_sse_pure(tree: &GameTree, ul: &PayoffFunction, uf: &PayoffFunction) -> SseSolution {
    let mf = maximin_values(tree, uf, Player::Follower);
    let reach = reachable_leaves(tree, &mf);
    let best = (0..tree.num_leaves())
        .filter(|&i| reach[i])
        .map(|i| ul.get(i))
        .max()
        .expect("the follower-maximin leaf is always reachable")
        .clone();
    let optimal: Vec<usize> = (0..tree.num_leaves())
        .filter(|&i| reach[i] && ul.get(i) == &best)
        .collect();
    let z = optimal[0];
    SseSolution {
        commitment: Commitment::Pure,
        leader_value: best,
        follower_value: uf.get(z).clone(),
        outcome: LeafDistribution::point(z),
        witness: pure_witness(tree, &mf, tree.leaf_node(z)),
        all_optimal_outcomes: optimal.into_iter().map(LeafDistribution::point).collect(),
    }
}

/// Realizable `p` is feasible iff `U_F(p|_v) >= M_F(v)` at every reached
/// follower node.
pub fn feasible_distribution(
    tree: &GameTree,
    uf: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<bool> {
    if let Some(v) = first_split(tree, p) {
        return Err(Error::NotRealizable(v));
    }
    let mf = maximin_values(tree, uf, Player::Follower);
    Ok(feasible_with(tree, uf, &mf, p))
}

pub(crate) fn feasible_with(
    tree: &GameTree,
    uf: &PayoffFunction,
    mf: &MaximinTable,
    p: &LeafDistribution,
) -> bool {
    // Walk the reached part of the tree only: the support's ancestors.
    let mut mass: BTreeMap<NodeId, (Rational, Rational)> = BTreeMap::new();
    for (i, q) in p.entries() {
        let mut v = tree.leaf_node(i);
        let w = q * uf.get(i);
        loop {
            let e = mass
                .entry(v)
                .or_insert_with(|| (Rational::zero(), Rational::zero()));
            e.0 = &e.0 + q;
            e.1 = &e.1 + &w;
            match tree.parent(v) {
                Some(u) => v = u,
                None => break,
            }
        }
    }
    mass.iter()
        .filter(|(v, _)| tree.owner(**v) == Some(Player::Follower))
        .all(|(v, (reach, total))| total >= &(mf.get(*v) * reach))
}

/// A profile inducing a feasible `p`: the leader mixes by reach ratios on the
/// support, every other choice is the `M_F` threat or best reply.
pub fn realize_profile(
    tree: &GameTree,
    uf: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<StrategyProfile> {
    if !feasible_distribution(tree, uf, p)? {
        return Err(Error::Infeasible);
    }
    let mf = maximin_values(tree, uf, Player::Follower);
    Ok(realize_with(tree, &mf, p))
}

pub(crate) fn realize_with(
    tree: &GameTree,
    mf: &MaximinTable,
    p: &LeafDistribution,
) -> StrategyProfile {
    let reach = p.reach_all(tree);
    let (lead, mut foll) = default_profile(tree, mf);
    let mut mixes = BTreeMap::new();
    for (v, c) in lead {
        let mix = if reach[v].is_positive() {
            tree.children(v)
                .iter()
                .filter(|&&w| reach[w].is_positive())
                .map(|&w| (w, &reach[w] / &reach[v]))
                .collect()
        } else {
            vec![(c, Rational::one())]
        };
        mixes.insert(v, mix);
    }
    for (v, c) in foll.iter_mut() {
        if reach[*v].is_positive() {
            *c = *tree
                .children(*v)
                .iter()
                .find(|&&w| reach[w].is_positive())
                .expect("supported child");
        }
    }
    StrategyProfile {
        leader: BehavioralStrategy {
            player: Player::Leader,
            mixes,
        },
        follower: PureStrategy {
            player: Player::Follower,
            choices: foll,
        },
    }
}

/// Achievable `(U_F, U_L)` frontiers of every subtree.
pub struct Regions {
    pub frontiers: Vec<Frontier>,
    pub mf: MaximinTable,
}

/// The region recursion: leaves are points, follower nodes take the best
/// child above `M_F(v)`, leader nodes add mixtures of two different children.
pub fn feasible_regions(tree: &GameTree, ul: &PayoffFunction, uf: &PayoffFunction) -> Regions {
    let mf = maximin_values(tree, uf, Player::Follower);
    let mut fr: Vec<Option<Frontier>> = vec![None; tree.len()];
    for v in (0..tree.len()).rev() {
        let f = match tree.owner(v) {
            None => Frontier::point(Point::new(uf.at(tree, v).clone(), ul.at(tree, v).clone())),
            Some(Player::Follower) => tree
                .children(v)
                .iter()
                .filter_map(|&c| fr[c].as_ref().expect("child done").clip(mf.get(v)))
                .reduce(|a, b| a.max(&b))
                .expect("the M_F-maximizing child survives its own bound"),
            Some(Player::Leader) => {
                let ch = tree.children(v);
                let verts: Vec<Vec<Point>> = ch
                    .iter()
                    .map(|&c| fr[c].as_ref().expect("child done").vertices())
                    .collect();
                let mut acc = fr[ch[0]].clone().expect("child done");
                for &c in &ch[1..] {
                    acc = acc.max(fr[c].as_ref().expect("child done"));
                }
                for i in 0..ch.len() {
                    for j in 0..ch.len() {
                        if i == j {
                            continue;
                        }
                        for a in &verts[i] {
                            for b in &verts[j] {
                                // Under acc already when acc(b.x) >= a.y.
                                if a.x < b.x && a.y > b.y && acc.value(&b.x).is_none_or(|h| h < a.y)
                                {
                                    acc = acc.max(&Frontier::bridge(a, b));
                                }
                            }
                        }
                    }
                }
                acc
            }
        };
        fr[v] = Some(f);
    }
    Regions {
        frontiers: fr.into_iter().map(|f| f.expect("all nodes done")).collect(),
        mf,
    }
}

pub fn feasible_region(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    v: NodeId,
) -> Frontier {
    feasible_regions(tree, ul, uf).frontiers.swap_remove(v)
}

impl Regions {
    /// A sub-distribution over `Z_v` (weights summing to 1) whose outcome has
    /// `U_F >= x` and `U_L >= y`; requires `f_v(x) >= y`.
    fn achieve(
        &self,
        tree: &GameTree,
        v: NodeId,
        x: &Rational,
        y: &Rational,
        weight: Rational,
        out: &mut Vec<(usize, Rational)>,
    ) {
        debug_assert!(self.frontiers[v].value(x).is_some_and(|h| &h >= y));
        match tree.owner(v) {
            None => out.push((tree.leaf_index(v).expect("leaf"), weight)),
            Some(Player::Follower) => {
                let t = x.clone().max(self.mf.get(v).clone());
                let w = tree
                    .children(v)
                    .iter()
                    .copied()
                    .find(|&w| self.frontiers[w].value(&t).is_some_and(|h| &h >= y))
                    .expect("some child attains the follower-node frontier");
                self.achieve(tree, w, &t, y, weight, out);
            }
            Some(Player::Leader) => {
                let ch = tree.children(v);
                if let Some(&w) = ch
                    .iter()
                    .find(|&&w| self.frontiers[w].value(x).is_some_and(|h| &h >= y))
                {
                    return self.achieve(tree, w, x, y, weight, out);
                }
                for &wa in ch {
                    for &wb in ch {
                        if wa == wb {
                            continue;
                        }
                        for a in self.frontiers[wa].vertices() {
                            for b in self.frontiers[wb].vertices() {
                                if !(a.x < b.x && a.y > b.y && &a.x <= x && x <= &b.x) {
                                    continue;
                                }
                                let lambda = (&b.x - x) / (&b.x - &a.x);
                                let h = &lambda * &a.y + (Rational::one() - &lambda) * &b.y;
                                if &h >= y {
                                    let rest = Rational::one() - &lambda;
                                    self.achieve(tree, wa, &a.x, &a.y, &weight * &lambda, out);
                                    self.achieve(tree, wb, &b.x, &b.y, &weight * &rest, out);
                                    return;
                                }
                            }
                        }
                    }
                }
                unreachable!("frontier value is attained by a child or a bridge")
            }
        }
    }

    pub fn distribution_achieving(
        &self,
        tree: &GameTree,
        x: &Rational,
        y: &Rational,
    ) -> LeafDistribution {
        let mut out = Vec::new();
        self.achieve(tree, tree.root(), x, y, Rational::one(), &mut out);
        LeafDistribution::new(tree, out).expect("weights sum to one")
    }
}

pub fn solve_sse_behavioral(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
) -> SseSolution {
    let regions = feasible_regions(tree, ul, uf);
    let top = regions.frontiers[tree.root()].top();
    let outcome = regions.distribution_achieving(tree, &top.x, &top.y);
    let witness = realize_with(tree, &regions.mf, &outcome);
    debug_assert_eq!(outcome_distribution(tree, &witness), outcome);
    let leader_value = outcome.expect(ul);
    debug_assert_eq!(leader_value, top.y);
    let reach = reachable_leaves(tree, &regions.mf);
    let mut all = vec![outcome.clone()];
    for i in 0..tree.num_leaves() {
        let pm = LeafDistribution::point(i);
        if reach[i] && ul.get(i) == &leader_value && pm != outcome {
            all.push(pm);
        }
    }
    SseSolution {
        commitment: Commitment::Behavioral,
        follower_value: outcome.expect(uf),
        leader_value,
        outcome,
        witness,
        all_optimal_outcomes: all,
    }
}

pub fn solve_sse(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    mode: Commitment,
) -> SseSolution {
    match mode {
        Commitment::Pure => solve_sse_pure(tree, ul, uf),
        Commitment::Behavioral => solve_sse_behavioral(tree, ul, uf),
    }
}
