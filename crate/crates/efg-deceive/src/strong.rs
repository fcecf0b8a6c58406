//! Strong inducibility: reports that make the target the unique SSE outcome.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{GameTree, LeafDistribution, NodeId, PayoffFunction, Player};
use crate::inducibility::{
    check_realizable, check_yshape, construct, optimal_family, pure_construction, trace, Candidate,
    LeaderTables, PureReport, Trace,
};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct StrongVerdict {
    pub strongly_inducible: bool,
    pub certificate: Trace,
}

impl StrongVerdict {
    fn of(lt: &LeaderTables, p: &LeafDistribution) -> Self {
        let certificate = trace(lt, p, lt.tree.root(), true);
        StrongVerdict {
            strongly_inducible: certificate.verdict(),
            certificate,
        }
    }

    pub fn replay(&self, tree: &GameTree, ul: &PayoffFunction, p: &LeafDistribution) -> bool {
        let lt = LeaderTables::new(tree, ul);
        self.certificate == trace(&lt, p, tree.root(), true)
    }

    pub fn to_json(&self, tree: &GameTree) -> Value {
        json!({
            "strongly_inducible": self.strongly_inducible,
            "certificate": strict_json(&self.certificate, tree),
        })
    }
}

/// Same shape as [`Trace::to_json`] with the strict clause names.
fn strict_json(t: &Trace, tree: &GameTree) -> Value {
    match t {
        Trace::Leaf { node } => json!({"node": tree.node_name(*node), "kind": "leaf"}),
        Trace::Leader {
            node,
            value,
            equal_values,
            above_maximin,
            children,
            ..
        } => json!({
            "node": tree.node_name(*node),
            "kind": "leader",
            "value": value.to_string(),
            "single_child": equal_values,
            "above_sibling_max": above_maximin,
            "children": children.iter().map(|c| strict_json(c, tree)).collect::<Vec<_>>(),
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
            "supported_child": tree.node_name(*child),
            "kind": "follower",
            "value": value.to_string(),
            "sibling_min": sibling_min.as_ref().map(|m| m.to_string()),
            "strict_sibling_bound": sibling_bound,
            "below": strict_json(child_trace, tree),
        }),
    }
}

fn leaf_arg(tree: &GameTree, z: NodeId) -> Result<usize> {
    tree.leaf_index(z).ok_or(Error::UnknownNode(z))
}

pub fn is_strongly_inducible_pure(
    tree: &GameTree,
    ul: &PayoffFunction,
    z: NodeId,
) -> Result<StrongVerdict> {
    let i = leaf_arg(tree, z)?;
    let lt = LeaderTables::new(tree, ul);
    Ok(StrongVerdict::of(&lt, &LeafDistribution::point(i)))
}

/// A report under which every pure-commitment SSE ends at `z`.
pub fn strong_misreport_for_leaf(
    tree: &GameTree,
    ul: &PayoffFunction,
    z: NodeId,
) -> Result<PayoffFunction> {
    let i = leaf_arg(tree, z)?;
    let lt = LeaderTables::new(tree, ul);
    if !StrongVerdict::of(&lt, &LeafDistribution::point(i)).strongly_inducible {
        return Err(Error::NotStronglyInducible);
    }
    Ok(pure_construction(tree, ul, &lt.ml, z, Some(&lt.sib)))
}

/// Best strongly inducible leaf for the follower; first in leaf order on ties.
pub fn optimal_strong_pure(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
) -> Option<PureReport> {
    let lt = LeaderTables::new(tree, ul);
    let th = StrictThresholds::new(&lt);
    let mut best: Option<usize> = None;
    for i in 0..tree.num_leaves() {
        if th.leaf_passes(&lt, i) && best.is_none_or(|b| uf.get(i) > uf.get(b)) {
            best = Some(i);
        }
    }
    let i = best?;
    let z = tree.leaf_node(i);
    Some(PureReport {
        leaf: z,
        follower_true_utility: uf.get(i).clone(),
        leader_utility: ul.get(i).clone(),
        report: pure_construction(tree, ul, &lt.ml, z, Some(&lt.sib)),
    })
}

pub fn is_strongly_inducible_yshape(
    tree: &GameTree,
    ul: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<StrongVerdict> {
    check_yshape(tree, p)?;
    let lt = LeaderTables::new(tree, ul);
    Ok(StrongVerdict::of(&lt, p))
}

/// Necessary conditions for any support size: `false` rules strong
/// inducibility out, `true` decides nothing beyond two leaves.
pub fn screen_strong_necessities(
    tree: &GameTree,
    ul: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<bool> {
    check_realizable(tree, p)?;
    let lt = LeaderTables::new(tree, ul);
    Ok(trace(&lt, p, tree.root(), true).verdict())
}

/// The strong report for a strongly inducible Y-shape distribution.
pub fn strong_misreport_for_distribution(
    tree: &GameTree,
    ul: &PayoffFunction,
    p: &LeafDistribution,
) -> Result<PayoffFunction> {
    check_yshape(tree, p)?;
    let lt = LeaderTables::new(tree, ul);
    if !StrongVerdict::of(&lt, p).strongly_inducible {
        return Err(Error::NotStronglyInducible);
    }
    Ok(construct(&lt, p, true))
}

// ---------------------------------------------------------------- thresholds

/// Strict per-node thresholds. `smax[v]`: max over leader strict ancestors
/// `u` of the sibling max at `u` (`None` is minus infinity). `scut[v]`: min
/// over follower strict ancestors `f` of `max(smax[f], sibling min at f)`
/// (`None` is plus infinity). A value strictly above either one passes.
struct StrictThresholds {
    smax: Vec<Option<Rational>>,
    scut: Vec<Option<Rational>>,
}

fn max_opt(a: &Option<Rational>, b: &Rational) -> Rational {
    match a {
        Some(a) if a > b => a.clone(),
        _ => b.clone(),
    }
}

impl StrictThresholds {
    fn new(lt: &LeaderTables) -> Self {
        let tree = lt.tree;
        let mut smax: Vec<Option<Rational>> = vec![None; tree.len()];
        let mut scut: Vec<Option<Rational>> = vec![None; tree.len()];
        for v in 0..tree.len() {
            let Some(f) = tree.parent(v) else { continue };
            smax[v] = smax[f].clone();
            scut[v] = scut[f].clone();
            match tree.owner(f) {
                Some(Player::Leader) => {
                    if let Some(s) = &lt.sib.max[v] {
                        smax[v] = Some(max_opt(&smax[f], s));
                    }
                }
                _ => {
                    if let Some(s) = &lt.sib.min[v] {
                        let t = max_opt(&smax[f], s);
                        if scut[v].as_ref().is_none_or(|c| &t < c) {
                            scut[v] = Some(t);
                        }
                    }
                }
            }
        }
        StrictThresholds { smax, scut }
    }

    /// `M(z)`; `None` means every value passes.
    fn leaf_bound(&self, z: NodeId) -> Option<Rational> {
        match (&self.smax[z], &self.scut[z]) {
            (None, _) => None,
            (Some(a), Some(c)) => Some(a.clone().min(c.clone())),
            (Some(a), None) => Some(a.clone()),
        }
    }

    fn leaf_passes(&self, lt: &LeaderTables, i: usize) -> bool {
        self.leaf_bound(lt.tree.leaf_node(i))
            .is_none_or(|m| lt.u(i) > &m)
    }
}

// ---------------------------------------------------------------- supremum

/// Open interval of weights on `z1` (the leaf the leader values more) that
/// keep the mix of `z1` and `z2` strongly inducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFamily {
    pub z1: usize,
    pub z2: usize,
    pub lo: Rational,
    pub hi: Rational,
    /// Endpoint the follower's supremum is approached at.
    pub sup_at: Rational,
    /// `U_F(z1) - U_F(z2)`.
    pub slope: Rational,
}

impl PairFamily {
    /// A weight whose mix gives the follower at least `sup - eps`.
    pub fn alpha(&self, eps: &Rational) -> Rational {
        let half = (&self.hi - &self.lo) / Rational::from_int(2);
        let step = if self.slope.is_zero() {
            half.clone()
        } else {
            (eps / &self.slope.abs()).min(half)
        };
        if self.sup_at == self.lo {
            &self.lo + step
        } else {
            &self.hi - step
        }
    }

    pub fn member(&self, eps: &Rational) -> LeafDistribution {
        LeafDistribution::mix(self.z1, self.z2, &self.alpha(eps))
    }

    fn sup(&self, uf: &PayoffFunction) -> Rational {
        &self.sup_at * uf.get(self.z1) + (Rational::one() - &self.sup_at) * uf.get(self.z2)
    }
}

/// Thresholds recorded for one leader-LCA pair.
#[derive(Clone, Debug)]
pub struct PairScreen {
    pub z1: usize,
    pub z2: usize,
    /// Common follower ancestors above the pair's LCA, with `M(v, (z1, z2))`.
    pub caf: Vec<(NodeId, Rational)>,
    /// `M(z1, z2)`; `None` when no cut exists.
    pub bound: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct StrongSupremumReport {
    /// `None` when nothing is strongly inducible.
    pub sup: Option<Rational>,
    pub attained: bool,
    pub witness: Option<LeafDistribution>,
    pub family: Option<PairFamily>,
    /// `M(z)` per leaf index; `None` means unconstrained.
    pub leaf_bounds: Vec<Option<Rational>>,
    pub pairs: Vec<PairScreen>,
    /// Report inducing `witness`, when one was produced.
    pub report: Option<PayoffFunction>,
}

impl StrongSupremumReport {
    pub fn to_json(&self, tree: &GameTree, ul: &PayoffFunction, uf: &PayoffFunction) -> Value {
        let name = |i: usize| tree.leaf_label(i).to_string();
        let dist = |p: &LeafDistribution| crate::game::label_map_json(&p.to_labels(tree));
        json!({
            "sup": self.sup.as_ref().map_or("empty".to_string(), |c| c.to_string()),
            "attained": self.attained,
            "witness": self.witness.as_ref().map(dist),
            "witness_utility": self.witness.as_ref().map(|p| p.expect(uf).to_string()),
            "witness_leader_utility": self.witness.as_ref().map(|p| p.expect(ul).to_string()),
            "family": self.family.as_ref().map(|f| json!({
                "z1": name(f.z1),
                "z2": name(f.z2),
                "interval": [f.lo.to_string(), f.hi.to_string()],
                "sup_at": f.sup_at.to_string(),
                "alpha": format!("{} {} min(eps / {}, {})",
                    f.sup_at,
                    if f.sup_at == f.lo { "+" } else { "-" },
                    f.slope.abs(),
                    (&f.hi - &f.lo) / Rational::from_int(2)),
            })),
            "leaf_bounds": self.leaf_bounds.iter().enumerate()
                .map(|(i, m)| (name(i), m.as_ref().map_or(Value::Null, |m| Value::String(m.to_string()))))
                .collect::<serde_json::Map<_, _>>(),
            "pairs": self.pairs.iter().map(|s| json!({
                "z1": name(s.z1),
                "z2": name(s.z2),
                "caf": s.caf.iter().map(|(v, m)| json!({"node": tree.node_name(*v), "bound": m.to_string()})).collect::<Vec<_>>(),
                "bound": s.bound.as_ref().map(|m| m.to_string()),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Candidate for the supremum, compared by value and then support order.
struct Member {
    value: Rational,
    attained: bool,
    key: Vec<usize>,
    witness: Option<LeafDistribution>,
    family: Option<PairFamily>,
}

/// The supremum of the follower's utility over strongly inducible
/// distributions, with an exact witness when attained and an `eps`-optimal
/// one otherwise.
pub fn strong_supremum(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    eps: Option<&Rational>,
) -> Result<StrongSupremumReport> {
    if let Some(e) = eps {
        if !e.is_positive() {
            return Err(Error::Bounds(format!("epsilon must be positive, got {e}")));
        }
    }
    let lt = LeaderTables::new(tree, ul);
    let th = StrictThresholds::new(&lt);
    let leaf_bounds: Vec<Option<Rational>> = (0..tree.num_leaves())
        .map(|i| th.leaf_bound(tree.leaf_node(i)))
        .collect();

    let mut members: Vec<Member> = Vec::new();
    for i in 0..tree.num_leaves() {
        if th.leaf_passes(&lt, i) {
            members.push(Member {
                value: uf.get(i).clone(),
                attained: true,
                key: vec![i],
                witness: Some(LeafDistribution::point(i)),
                family: None,
            });
        }
    }

    let mut pairs = Vec::new();
    for l in tree.nodes_of(Player::Leader) {
        let caf: Vec<(NodeId, Rational)> = tree
            .path_to(l)
            .windows(2)
            .filter(|w| tree.owner(w[0]) == Some(Player::Follower))
            .filter_map(|w| {
                lt.sib.min[w[1]]
                    .as_ref()
                    .map(|s| (w[0], max_opt(&th.smax[w[0]], s)))
            })
            .collect();
        let bound = th.scut[l].clone();
        for (i, j) in pair_iter(tree, l) {
            if lt.u(i) == lt.u(j) {
                continue;
            }
            pairs.push(PairScreen {
                z1: i,
                z2: j,
                caf: caf.clone(),
                bound: bound.clone(),
            });
            let Some(m) = &bound else { continue };
            let (hi, lo) = if lt.u(i) > lt.u(j) { (i, j) } else { (j, i) };
            let (uh, ulo) = (lt.u(hi), lt.u(lo));
            if uh <= m {
                continue;
            }
            let a = ((m - ulo) / (uh - ulo)).max(Rational::zero());
            let slope = uf.get(hi) - uf.get(lo);
            let sup_at = if slope.is_positive() {
                Rational::one()
            } else {
                a.clone()
            };
            let fam = PairFamily {
                z1: hi,
                z2: lo,
                lo: a,
                hi: Rational::one(),
                sup_at,
                slope,
            };
            let value = fam.sup(uf);
            let attained = fam.slope.is_zero();
            members.push(Member {
                value,
                attained,
                key: vec![i, j],
                witness: attained.then(|| fam.member(&Rational::one())),
                family: Some(fam),
            });
        }
    }

    let Some(sup) = members.iter().map(|m| m.value.clone()).max() else {
        return Ok(StrongSupremumReport {
            sup: None,
            attained: false,
            witness: None,
            family: None,
            leaf_bounds,
            pairs,
            report: None,
        });
    };
    let mut top: Vec<&Member> = members.iter().filter(|m| m.value == sup).collect();
    top.sort_by(|a, b| a.key.cmp(&b.key));
    let attained = top.iter().any(|m| m.attained);
    let (witness, family) = if attained {
        let m = top.iter().find(|m| m.attained).expect("some attains");
        (m.witness.clone(), None)
    } else {
        let fam = top[0]
            .family
            .clone()
            .expect("only pair families can miss their sup");
        (eps.map(|e| fam.member(e)), Some(fam))
    };
    let report = witness.as_ref().map(|p| construct(&lt, p, true));
    Ok(StrongSupremumReport {
        sup: Some(sup),
        attained,
        witness,
        family,
        leaf_bounds,
        pairs,
        report,
    })
}

fn pair_iter(tree: &GameTree, u: NodeId) -> Vec<(usize, usize)> {
    let ch = tree.children(u);
    let mut out = Vec::new();
    for (a, &ca) in ch.iter().enumerate() {
        for &cb in &ch[a + 1..] {
            for i in tree.leaf_span(ca) {
                for j in tree.leaf_span(cb) {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- USE

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UseRoute {
    /// An optimal inducible pair whose leaves the leader values differently.
    ConditionOne(LeafDistribution),
    /// An optimal inducible distribution that is itself strongly inducible.
    StrongOptimum(LeafDistribution),
    /// An optimal leaf `z_star`, a follower node `v` above it whose sibling
    /// bound it meets, and a partner `z1` the leader values more.
    ConditionTwo {
        v: NodeId,
        z_star: usize,
        z1: usize,
    },
    Neither,
}

#[derive(Clone, Debug)]
pub struct UseVerdict {
    pub satisfied: bool,
    pub route: UseRoute,
    /// Optimal inducible follower utility.
    pub optimum: Rational,
}

impl UseVerdict {
    pub fn to_json(&self, tree: &GameTree) -> Value {
        let dist = |p: &LeafDistribution| crate::game::label_map_json(&p.to_labels(tree));
        let route = match &self.route {
            UseRoute::ConditionOne(p) => json!({"condition": "1", "distribution": dist(p)}),
            UseRoute::StrongOptimum(p) => json!({"condition": "2.1", "distribution": dist(p)}),
            UseRoute::ConditionTwo { v, z_star, z1 } => json!({
                "condition": "2.2",
                "node": tree.node_name(*v),
                "z_star": tree.leaf_label(*z_star),
                "z1": tree.leaf_label(*z1),
            }),
            UseRoute::Neither => json!({"condition": "neither"}),
        };
        json!({"satisfied": self.satisfied, "optimum": self.optimum.to_string(), "route": route})
    }
}

/// Decides whether the strong supremum equals the optimal inducible utility
/// by scanning the full optimal Y-shape family.
pub fn use_check(tree: &GameTree, ul: &PayoffFunction, uf: &PayoffFunction) -> UseVerdict {
    let (optimum, family) = optimal_family(tree, ul, uf);
    let lt = LeaderTables::new(tree, ul);
    let verdict = |route| UseVerdict {
        satisfied: route != UseRoute::Neither,
        route,
        optimum: optimum.clone(),
    };

    for c in &family {
        if let Candidate::Mix { z1, z2, lo, hi } = c {
            if lt.u(*z1) != lt.u(*z2) && hi > &Rational::zero() && lo < &Rational::one() {
                let alpha = if lo.is_zero() {
                    hi.clone() / Rational::from_int(2)
                } else {
                    lo.clone()
                };
                return verdict(UseRoute::ConditionOne(LeafDistribution::mix(
                    *z1, *z2, &alpha,
                )));
            }
        }
    }
    for c in &family {
        let p = match c {
            Candidate::Leaf(i) => LeafDistribution::point(*i),
            Candidate::Mix { z1, z2, lo, hi } => {
                LeafDistribution::mix(*z1, *z2, &((lo + hi) / Rational::from_int(2)))
            }
        };
        if p.support_size() <= 2 && StrongVerdict::of(&lt, &p).strongly_inducible {
            return verdict(UseRoute::StrongOptimum(p));
        }
    }
    for c in &family {
        let Candidate::Leaf(zi) = c else { continue };
        if let Some((v, z1)) = condition_two(&lt, *zi) {
            return verdict(UseRoute::ConditionTwo { v, z_star: *zi, z1 });
        }
    }
    verdict(UseRoute::Neither)
}

/// Follower node `v` on the path to leaf `zi` with `U_L(z*)` at or above its
/// sibling bound and every leader node above it at or above its sibling max,
/// plus a partner `z1` under a leader LCA inside `T_v` that the leader
/// strictly prefers.
fn condition_two(lt: &LeaderTables, zi: usize) -> Option<(NodeId, usize)> {
    let tree = lt.tree;
    let z = tree.leaf_node(zi);
    let u = lt.u(zi);
    let path = tree.path_to(z);
    for w in path.windows(2) {
        let (v, c) = (w[0], w[1]);
        match tree.owner(v) {
            Some(Player::Leader) => {
                if !lt.meets_sibmax(u, c, false) {
                    return None;
                }
            }
            _ => {
                if lt.meets_sibmin(u, c, false) {
                    let partner = tree.leaf_span(v).find(|&j| {
                        j != zi && lt.u(j) > u && {
                            let l = tree.lca(z, tree.leaf_node(j));
                            l != v && tree.owner(l) == Some(Player::Leader)
                        }
                    });
                    if let Some(j) = partner {
                        return Some((v, j));
                    }
                }
            }
        }
    }
    None
}
