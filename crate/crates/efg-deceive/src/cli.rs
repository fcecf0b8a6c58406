//! Command-line entry point. `run` returns the exit code and the stdout
//! document so tests can drive it without a process.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dot::{export_dot, Annotation};
use crate::equilibrium::{solve_sse, Commitment};
use crate::error::{Error, Result};
use crate::game::{
    label_map_json, parse_distribution, parse_game, parse_payoffs, serialize_game, Game,
    LeafDistribution,
};
use crate::generate::{random_game, GenParams};
use crate::inducibility::{
    is_inducible, is_inducible_pure, misreport_for_distribution, misreport_for_leaf,
    optimal_misreport_behavioral, optimal_misreport_pure,
};
use crate::maximin::{maximin_values, table_by_name};
use crate::oracle::{budget, refute_uniqueness, verify_induces};
use crate::rational::Rational;
use crate::strong::{strong_supremum, use_check};
use crate::Player;

#[derive(Parser, Debug)]
#[command(
    name = "efg-deceive",
    version,
    about = "Stackelberg solving and follower misreport analysis"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Commit {
    Pure,
    Behavioral,
}

impl From<Commit> for Commitment {
    fn from(c: Commit) -> Self {
        match c {
            Commit::Pure => Commitment::Pure,
            Commit::Behavioral => Commitment::Behavioral,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InduceMode {
    /// Best target for the follower, with its report.
    Optimal,
    /// Decide whether a target is inducible.
    Check,
    /// Build a report for a target.
    Construct,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    L,
    F,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strong Stackelberg equilibrium.
    Solve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Commit::Pure)]
        commit: Commit,
    },
    /// Maximin value of every node.
    Maximin {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::L)]
        player: Side,
    },
    /// Follower misreports.
    Induce {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = InduceMode::Optimal)]
        mode: InduceMode,
        #[arg(long, value_enum, default_value_t = Commit::Pure)]
        commit: Commit,
        #[command(flatten)]
        target: TargetArgs,
        /// Write the report (leaf label -> value) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the emitted target distribution here.
        #[arg(long)]
        target_out: Option<PathBuf>,
    },
    /// Supremum over strongly inducible distributions.
    Strong {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        epsilon: Option<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        target_out: Option<PathBuf>,
    },
    /// Whether the strong supremum equals the optimal inducible utility.
    UseCheck {
        #[arg(long)]
        game: PathBuf,
    },
    /// Check that a report makes the target an SSE outcome.
    Verify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = Commit::Pure)]
        commit: Commit,
        /// Also search for a second SSE outcome.
        #[arg(long)]
        unique: bool,
    },
    /// Seeded random game.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        max_branch: usize,
        #[arg(long, default_value_t = 2)]
        min_leaves: usize,
        #[arg(long, default_value_t = 8)]
        max_leaves: usize,
        /// Comma-separated payoff grid.
        #[arg(long, value_delimiter = ',', default_value = "-3,-2,-1,0,1,2,3")]
        grid: Vec<Rational>,
        #[arg(long, default_value_t = 0.5)]
        owner_bias: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graphviz rendering, optionally highlighting a distribution.
    ExportDot {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct TargetArgs {
    /// Distribution file (leaf label -> probability).
    #[arg(long, conflicts_with = "leaf")]
    target: Option<PathBuf>,
    /// Point-mass target by leaf label.
    #[arg(long)]
    leaf: Option<String>,
}

/// Parses `argv` (program name first) and runs it. Diagnostics go to
/// stderr; input errors exit with 2.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (0, e.to_string()),
                _ => {
                    eprint!("{e}");
                    (2, String::new())
                }
            };
        }
    };
    let format = cli.format;
    match execute(cli.command) {
        Ok((code, doc)) => (code, render(&doc, format)),
        Err(e) => {
            eprintln!("error: {e}");
            (2, String::new())
        }
    }
}

fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            text(doc, "", &mut out);
            out
        }
    }
}

fn text(v: &Value, prefix: &str, out: &mut String) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                text(x, &key(k), out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                text(x, &key(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn load_game(path: &Path) -> Result<Game> {
    parse_game(&read(path)?)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    Ok(fs::write(path, s)?)
}

fn dist_json(g: &Game, p: &LeafDistribution) -> Value {
    label_map_json(&p.to_labels(&g.tree))
}

fn target_of(g: &Game, t: &TargetArgs) -> Result<LeafDistribution> {
    match (&t.target, &t.leaf) {
        (Some(path), _) => parse_distribution(&g.tree, &read(path)?),
        (None, Some(label)) => Ok(LeafDistribution::point(g.tree.leaf_index_by_label(label)?)),
        (None, None) => Err(Error::BadDistribution(
            "this mode needs --target or --leaf".into(),
        )),
    }
}

fn execute(cmd: Command) -> Result<(i32, Value)> {
    match cmd {
        Command::Solve { game, commit } => {
            let g = load_game(&game)?;
            let s = solve_sse(&g.tree, &g.ul, &g.uf, commit.into());
            Ok((
                0,
                json!({
                    "commitment": s.commitment,
                    "leader_value": s.leader_value.to_string(),
                    "follower_value": s.follower_value.to_string(),
                    "outcome": dist_json(&g, &s.outcome),
                    "witness": s.witness.to_json(&g.tree),
                    "all_optimal_outcomes": s.all_optimal_outcomes.iter().map(|p| dist_json(&g, p)).collect::<Vec<_>>(),
                }),
            ))
        }
        Command::Maximin { game, player } => {
            let g = load_game(&game)?;
            let (p, u) = match player {
                Side::L => (Player::Leader, &g.ul),
                Side::F => (Player::Follower, &g.uf),
            };
            let t = maximin_values(&g.tree, u, p);
            Ok((
                0,
                json!({"player": p.tag(), "root": t.root().to_string(), "values": label_map_json(&table_by_name(&g.tree, &t))}),
            ))
        }
        Command::Induce {
            game,
            mode,
            commit,
            target,
            out,
            target_out,
        } => {
            let g = load_game(&game)?;
            induce(
                &g,
                mode,
                commit,
                &target,
                out.as_deref(),
                target_out.as_deref(),
            )
        }
        Command::Strong {
            game,
            epsilon,
            out,
            target_out,
        } => {
            let g = load_game(&game)?;
            let rep = strong_supremum(&g.tree, &g.ul, &g.uf, epsilon.as_ref())?;
            if (out.is_some() || target_out.is_some()) && rep.witness.is_none() {
                return Err(if rep.sup.is_none() {
                    Error::Empty
                } else {
                    Error::EpsilonRequired
                });
            }
            if let (Some(path), Some(r)) = (&out, &rep.report) {
                write_json(path, &label_map_json(&r.to_labels(&g.tree)))?;
            }
            if let (Some(path), Some(w)) = (&target_out, &rep.witness) {
                write_json(path, &dist_json(&g, w))?;
            }
            let mut doc = rep.to_json(&g.tree, &g.ul, &g.uf);
            if let Some(r) = &rep.report {
                doc["report"] = label_map_json(&r.to_labels(&g.tree));
            }
            Ok((0, doc))
        }
        Command::UseCheck { game } => {
            let g = load_game(&game)?;
            let v = use_check(&g.tree, &g.ul, &g.uf);
            Ok((if v.satisfied { 0 } else { 1 }, v.to_json(&g.tree)))
        }
        Command::Verify {
            game,
            report,
            target,
            commit,
            unique,
        } => {
            let g = load_game(&game)?;
            let report = parse_payoffs(&g.tree, &read(&report)?)?;
            let p = parse_distribution(&g.tree, &read(&target)?)?;
            let ok = verify_induces(&g.tree, &g.ul, &report, &p, commit.into(), budget())?;
            let mut doc = json!({"induces": ok});
            let mut pass = ok;
            if unique {
                let alt = match Commitment::from(commit) {
                    Commitment::Behavioral if ok => refute_uniqueness(&g.tree, &g.ul, &report, &p)?,
                    Commitment::Pure if ok => {
                        let s = crate::oracle::brute_sse_pure(&g.tree, &g.ul, &report, budget())?;
                        s.leaves
                            .iter()
                            .find(|&&i| LeafDistribution::point(i) != p)
                            .map(|&i| LeafDistribution::point(i))
                    }
                    _ => None,
                };
                doc["counterexample"] = alt.as_ref().map_or(Value::Null, |a| dist_json(&g, a));
                pass = pass && alt.is_none();
            }
            Ok((if pass { 0 } else { 1 }, doc))
        }
        Command::Gen {
            seed,
            max_depth,
            max_branch,
            min_leaves,
            max_leaves,
            grid,
            owner_bias,
            out,
        } => {
            let params = GenParams {
                max_depth,
                max_branch,
                leaf_count_range: (min_leaves, max_leaves),
                payoff_grid: grid,
                owner_bias,
            };
            let g = random_game(&params, seed)?;
            let text = serialize_game(&g.tree, &g.ul, &g.uf);
            if let Some(path) = out {
                fs::write(path, &text)?;
            }
            let doc: Value = serde_json::from_str(&text).expect("serialized games parse");
            Ok((0, doc))
        }
        Command::ExportDot { game, target, out } => {
            let g = load_game(&game)?;
            let p = target
                .map(|t| read(&t).and_then(|s| parse_distribution(&g.tree, &s)))
                .transpose()?;
            let dot = export_dot(
                &g.tree,
                &g.ul,
                &g.uf,
                p.as_ref().map(Annotation::Distribution),
            )?;
            if let Some(path) = out {
                fs::write(path, &dot)?;
            }
            Ok((0, json!({"dot": dot})))
        }
    }
}

fn induce(
    g: &Game,
    mode: InduceMode,
    commit: Commit,
    target: &TargetArgs,
    out: Option<&Path>,
    target_out: Option<&Path>,
) -> Result<(i32, Value)> {
    let save = |report: &crate::PayoffFunction, p: &LeafDistribution| -> Result<()> {
        if let Some(path) = out {
            write_json(path, &label_map_json(&report.to_labels(&g.tree)))?;
        }
        if let Some(path) = target_out {
            write_json(path, &dist_json(g, p))?;
        }
        Ok(())
    };
    match (mode, commit) {
        (InduceMode::Optimal, Commit::Pure) => {
            let r = optimal_misreport_pure(&g.tree, &g.ul, &g.uf);
            let i = g.tree.leaf_index(r.leaf).expect("leaf");
            save(&r.report, &LeafDistribution::point(i))?;
            Ok((
                0,
                json!({
                    "leaf": g.tree.leaf_label(i),
                    "follower_true_utility": r.follower_true_utility.to_string(),
                    "leader_utility": r.leader_utility.to_string(),
                    "report": label_map_json(&r.report.to_labels(&g.tree)),
                }),
            ))
        }
        (InduceMode::Optimal, Commit::Behavioral) => {
            let r = optimal_misreport_behavioral(&g.tree, &g.ul, &g.uf);
            save(&r.report, &r.distribution)?;
            Ok((
                0,
                json!({
                    "distribution": dist_json(g, &r.distribution),
                    "follower_true_utility": r.follower_true_utility.to_string(),
                    "leader_utility": r.leader_utility.to_string(),
                    "report": label_map_json(&r.report.to_labels(&g.tree)),
                }),
            ))
        }
        (InduceMode::Check, Commit::Pure) => {
            let p = target_of(g, target)?;
            let [i] = p.support()[..] else {
                return Err(Error::BadDistribution(
                    "pure commitment targets are point masses".into(),
                ));
            };
            let ok = is_inducible_pure(&g.tree, &g.ul, g.tree.leaf_node(i))?;
            let ml = maximin_values(&g.tree, &g.ul, Player::Leader);
            Ok((
                if ok { 0 } else { 1 },
                json!({"inducible": ok, "leader_utility": g.ul.get(i).to_string(), "leader_maximin": ml.root().to_string()}),
            ))
        }
        (InduceMode::Check, Commit::Behavioral) => {
            let p = target_of(g, target)?;
            let v = is_inducible(&g.tree, &g.ul, &p)?;
            let violation = v
                .first_violation()
                .map(|x| json!({"node": g.tree.node_name(x.node()), "clause": x.clause()}));
            Ok((
                if v.inducible { 0 } else { 1 },
                json!({"inducible": v.inducible, "violation": violation, "certificate": v.certificate.to_json(&g.tree)}),
            ))
        }
        (InduceMode::Construct, c) => {
            let p = target_of(g, target)?;
            let report = match c {
                Commit::Pure => {
                    let [i] = p.support()[..] else {
                        return Err(Error::BadDistribution(
                            "pure commitment targets are point masses".into(),
                        ));
                    };
                    misreport_for_leaf(&g.tree, &g.ul, g.tree.leaf_node(i))
                }
                Commit::Behavioral => misreport_for_distribution(&g.tree, &g.ul, &p),
            };
            match report {
                Ok(r) => {
                    save(&r, &p)?;
                    Ok((0, json!({"report": label_map_json(&r.to_labels(&g.tree))})))
                }
                Err(e @ Error::NotInducible) => {
                    Ok((1, json!({"report": null, "reason": e.to_string()})))
                }
                Err(e) => Err(e),
            }
        }
    }
}
