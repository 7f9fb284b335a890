use thiserror::Error;

/// Errors raised while building games, indexing infosets or driving runs.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("game has no root node")]
    NoRoot,
    #[error("game has {0} root candidates; expected exactly one")]
    MultipleRoots(usize),
    #[error("node {0} has more than one parent")]
    MultipleParents(u64),
    #[error("node {0} is not reachable from the root (cycle or detached subtree)")]
    Unreachable(u64),
    #[error("unknown node id {0}")]
    UnknownNode(u64),
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("node {id}: {reason}")]
    InvalidNode { id: u64, reason: String },
    #[error("chance node {id}: probabilities sum to {sum}, expected 1")]
    ChanceDistribution { id: u64, sum: f64 },
    #[error("terminal node {id}: utilities {u1} and {u2} do not sum to zero")]
    NotZeroSum { id: u64, u1: f64, u2: f64 },
    #[error("infoset `{label}`: {reason}")]
    InconsistentInfoset { label: String, reason: String },
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("non-finite reward entry")]
    NonFiniteReward,
    #[error("reward has {got} entries, expected {expected}")]
    RewardLength { expected: usize, got: usize },
    #[error("length mismatch: {0} rewards but {1} plays")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("game too large: {nodes} nodes exceeds cap {cap}")]
    TooLarge { nodes: usize, cap: usize },
    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
