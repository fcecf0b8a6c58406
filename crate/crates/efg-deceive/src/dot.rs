//! Graphviz export.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{GameTree, LeafDistribution, NodeKind, PayoffFunction, StrategyProfile};
use crate::rational::Rational;

pub enum Annotation<'a> {
    Distribution(&'a LeafDistribution),
    Profile(&'a StrategyProfile),
}

/// Renders the tree as a DOT digraph. Leaves show `(uL, uF)`; with an
/// annotation, edges carry their probability and reached leaves are filled.
pub fn export_dot(
    tree: &GameTree,
    ul: &PayoffFunction,
    uf: &PayoffFunction,
    annotation: Option<Annotation<'_>>,
) -> Result<String> {
    let n = tree.len();
    // edge_prob[w] is the probability of the edge into w.
    let mut edge_prob: Vec<Option<Rational>> = vec![None; n];
    let mut reached = vec![false; n];
    match annotation {
        None => {}
        Some(Annotation::Distribution(p)) => {
            if let Some((i, _)) = p.entries().find(|(i, _)| *i >= tree.num_leaves()) {
                return Err(Error::UnknownLeaf(format!("#{i}")));
            }
            let reach = p.reach_all(tree);
            for w in 1..n {
                let v = tree.parent(w).expect("non-root");
                if reach[w].is_positive() {
                    edge_prob[w] = Some(&reach[w] / &reach[v]);
                }
            }
            for (i, _) in p.entries() {
                reached[tree.leaf_node(i)] = true;
            }
        }
        Some(Annotation::Profile(profile)) => {
            let mixes = profile
                .leader
                .mixes
                .iter()
                .flat_map(|(&v, m)| m.iter().map(move |(c, _)| (v, *c)));
            let picks = profile.follower.choices.iter().map(|(&v, &c)| (v, c));
            for (v, c) in mixes.chain(picks) {
                if v >= n || c >= n || tree.parent(c) != Some(v) {
                    return Err(Error::UnknownNode(v.max(c)));
                }
            }
            for w in 1..n {
                let v = tree.parent(w).expect("non-root");
                let q = profile.edge_prob(tree, v, w);
                if q.is_positive() {
                    edge_prob[w] = Some(q);
                }
            }
            let p = crate::game::outcome_distribution(tree, profile);
            for (i, _) in p.entries() {
                reached[tree.leaf_node(i)] = true;
            }
        }
    }

    let mut out = String::from("digraph game {\n  node [fontname=\"Helvetica\"];\n");
    for v in 0..n {
        match tree.kind(v) {
            NodeKind::Internal { owner, .. } => {
                let _ = writeln!(
                    out,
                    "  v{v} [label=\"{}: {}\", shape=circle];",
                    tree.node_name(v),
                    owner.tag()
                );
            }
            NodeKind::Leaf { label } => {
                let i = tree.leaf_index(v).expect("leaf");
                let fill = if reached[v] {
                    ", style=filled, fillcolor=\"#ffd27f\""
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "  v{v} [label=\"{}\\n({}, {})\", shape=box{fill}];",
                    escape(label),
                    ul.get(i),
                    uf.get(i)
                );
            }
        }
    }
    for w in 1..n {
        let v = tree.parent(w).expect("non-root");
        match &edge_prob[w] {
            Some(q) => {
                let _ = writeln!(out, "  v{v} -> v{w} [label=\"{q}\", penwidth=2];");
            }
            None => {
                let _ = writeln!(out, "  v{v} -> v{w};");
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
