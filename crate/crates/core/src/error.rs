use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid vertex pair ({u}, {v}) for a tournament on {n} vertices")]
    InvalidVertex { u: usize, v: usize, n: usize },

    #[error("vertex sets must be disjoint")]
    OverlappingSets,

    #[error("vertex {0} is not covered by the ordering")]
    NotInOrdering(usize),

    #[error("{what}: size {size} exceeds the limit of {limit}")]
    SizeLimit {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("probability out of domain: {0}")]
    Domain(String),

    #[error("gadget construction failed: {0}")]
    Gadget(String),

    #[error("tournament has {alive} live vertices, fewer than the gadget order {h}")]
    TooSmall { alive: usize, h: usize },

    #[error("vertex {0} has no groundtruth label")]
    Unlabeled(usize),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
