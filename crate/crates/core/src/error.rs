use thiserror::Error;

use crate::model::AllocationViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("cannot parse rational `{0}`")]
    Rational(String),
    #[error("instance must have at least one agent")]
    NoAgents,
    #[error("instance has {0} item types; at most {max} are supported", max = crate::model::MAX_TYPES)]
    TooManyTypes(usize),
    #[error("duplicate item type name `{0}`")]
    DuplicateType(String),
    #[error("item type `{name}` has {copies} copies; must be between 1 and {agents}")]
    Copies {
        name: String,
        copies: usize,
        agents: usize,
    },
    #[error("item type `{name}`: expected {expected} values, found {found}")]
    ValueCount {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("item type `{0}` is a good for some agents and a chore for others")]
    MixedSignType(String),
    #[error("values of agent {agent} are too large for exact evaluation")]
    ValueRange { agent: usize },
    #[error("unknown item type `{0}`")]
    UnknownType(String),
    #[error("item type `{name}` listed twice in the bundle of agent {agent}")]
    DuplicateInBundle { name: String, agent: usize },
    #[error("agent index {agent} out of range for {agents} agents")]
    UnknownAgent { agent: usize, agents: usize },
    #[error("invalid allocation: {}", describe_violations(.0))]
    InvalidAllocation(Vec<AllocationViolation>),
    #[error("criterion `{criterion}` does not apply to a {instance} instance")]
    OrientationMismatch { criterion: String, instance: String },
    #[error("instance mixes goods and chores; envy-based criteria need a sign-pure instance")]
    MixedInstance,
    #[error("unknown notion `{0}`")]
    UnknownNotion(String),
    #[error("enumeration needs {needed} evaluations, over the cap of {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },
    #[error("agents {0:?} do not form a cycle in the envy graph")]
    NotACycle(Vec<usize>),
    #[error("agent {agent} has negative values; leveled preferences are defined for goods")]
    NegativeValues { agent: usize },
    #[error("agent {agent} is not leveled: some bundle of size {smaller} is worth at least one of size {larger}")]
    NotLeveled {
        agent: usize,
        smaller: usize,
        larger: usize,
    },
    #[error("allocation has {0} distinct bundle sizes; the potential needs at most two")]
    TooManyLevels(usize),
    #[error("entitlement must lie in (0, 1], got {0}")]
    Entitlement(String),
    #[error("alpha must be positive, got {0}")]
    Alpha(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("solver invariant violated: {0}")]
    SolverInvariant(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn describe_violations(violations: &[AllocationViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}
