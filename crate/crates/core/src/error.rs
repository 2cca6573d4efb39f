use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate probabilistic fact for `{0}`")]
    DuplicateFact(String),
    #[error("`{0}` is both a probabilistic fact and a clause head")]
    FactHeadOverlap(String),
    #[error("clause for `{head}` mentions `{atom}` more than once")]
    DuplicateBodyAtom { head: String, atom: String },
    #[error("atom `{0}` is used but never declared as a fact or clause head")]
    UndeclaredAtom(String),
    #[error("atom name `{0}` uses a reserved prefix or suffix")]
    ReservedName(String),
    #[error("generated atom `{0}` collides with an existing atom")]
    NameCollision(String),
    #[error("dependency cycle: {}", .0.join(" -> "))]
    Cyclic(Vec<String>),
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityRange(String),
    #[error("annotated disjunction head probabilities sum to {0}, which exceeds 1")]
    HeadMassExceeded(String),
    #[error("annotated disjunction lists head `{0}` twice")]
    DuplicateHead(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid query: {0}")]
    BadQuery(String),
    #[error("intervention is empty")]
    EmptyIntervention,
    #[error("conflicting truth values for `{0}`")]
    ConflictingLiterals(String),
    #[error("evidence has zero probability (marginal = {probability})")]
    ZeroEvidence { probability: f64 },
    #[error(
        "evidence on `{atom}` is downstream of intervened atom `{intervened}`; \
         the single-world evaluator cannot condition on it (use the twin evaluator)"
    )]
    EvidenceOnDescendant { atom: String, intervened: String },
    #[error("{what} has {size} entries, above the limit of {limit}")]
    Guard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("circuit exceeded the node cap of {0}")]
    NodeCap(usize),
    #[error("deadline exceeded")]
    Timeout,
    #[error("invalid benchmark parameters: {0}")]
    BenchParams(String),
    #[error("need {needed} eligible vertices but only {available} are available")]
    NotEnoughVertices { needed: usize, available: usize },
}
