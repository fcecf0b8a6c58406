use crate::game::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate leaf label {0:?}")]
    DuplicateLabel(String),
    #[error("bad payoff at leaf {label:?}: {value:?}")]
    BadPayoff { label: String, value: String },
    #[error("internal node {0} has no children")]
    EmptyNode(NodeId),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("unknown leaf {0:?}")]
    UnknownLeaf(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("payoff function covers {got} leaves, tree has {want}")]
    PayoffDomain { got: usize, want: usize },
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("distribution is not realizable: follower node {0} splits its mass")]
    NotRealizable(NodeId),
    #[error("distribution is not feasible under the given follower payoffs")]
    Infeasible,
    #[error("target is not inducible")]
    NotInducible,
    #[error("target is not strongly inducible")]
    NotStronglyInducible,
    #[error("support has {0} leaves; at most two are allowed here")]
    NotYShape(usize),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("too many leaves for exhaustive search: {0}")]
    TooLarge(usize),
    #[error("unsatisfiable generator bounds: {0}")]
    Bounds(String),
    #[error("a positive epsilon is required when the supremum is not attained")]
    EpsilonRequired,
    #[error("no strongly inducible distribution exists")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
