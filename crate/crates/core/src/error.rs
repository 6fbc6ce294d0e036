use crate::graph::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate edge ({u}, {v}) at line {line}")]
    DuplicateEdge { u: String, v: String, line: usize },

    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(NodeId, NodeId),

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("invalid weight {weight} on edge ({u}, {v})")]
    InvalidWeight { u: NodeId, v: NodeId, weight: f64 },

    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("graph contains a cycle")]
    CycleDetected,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("node {0} is already revealed")]
    RevealedQuery(NodeId),

    #[error("node {0} revealed twice")]
    DuplicateReveal(NodeId),

    #[error("operation requires a signed-mode graph")]
    SignedModeRequired,

    #[error("presentation order is not a permutation of the nodes")]
    NotAPermutation,

    #[error("labeling covers {got} nodes, expected {expected}")]
    PartialLabeling { expected: usize, got: usize },

    #[error("train and test sets overlap at node {0}")]
    TrainTestOverlap(NodeId),

    #[error("no training labels available")]
    NoTrainingLabels,

    #[error("degenerate kernel width at node {0}")]
    DegenerateSigma(NodeId),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty test set")]
    EmptyTestSet,

    #[error("only one class present")]
    SingleClass,

    #[error("infeasible cutsize budget {0}")]
    InfeasibleBudget(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad configuration rather than bad data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::SignedModeRequired | Error::InfeasibleBudget(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
