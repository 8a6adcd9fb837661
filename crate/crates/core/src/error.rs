use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("value {value} outside support [{low}, {high}]")]
    Domain { value: f64, low: f64, high: f64 },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid tree decomposition: {0}")]
    TreeDecomposition(#[from] TdError),

    #[error("invalid rotation system: {0}")]
    Rotation(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("no genus-reducing cycle found in component rooted at {root} (genus {genus})")]
    NoReducingCycle { root: usize, genus: usize },

    #[error("trace integrity: {0}")]
    Integrity(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

/// Tree-decomposition validation failures, each naming the offender.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(usize),
    #[error("edge {{{0}, {1}}} is in no bag")]
    UncoveredEdge(usize, usize),
    #[error("bags containing vertex {0} do not form a connected subtree")]
    DisconnectedSubtree(usize),
    #[error("bag tree is not a tree: {0}")]
    NotATree(String),
    #[error("bag {bag} references vertex {vertex} outside the graph")]
    UnknownVertex { bag: usize, vertex: usize },
}
