use std::fmt;

/// Errors raised by the library. Variants mirror the failure classes of the
/// public operations: malformed input, violated preconditions, exhausted
/// budgets and internal inconsistencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A commutator tree references a generator outside the declared rank.
    MalformedCommutator(String),
    /// A structurally invalid parameter (zero rank, zero step, ...).
    InvalidParameter(String),
    /// An operation received input it cannot work with.
    InvalidInput(String),
    /// A stated precondition does not hold for the given arguments.
    Precondition(String),
    /// A word references a generator with no assigned group element.
    MissingAssignment(usize),
    /// A configured budget (step count, enumeration size, search cap) ran out.
    ResourceLimit(String),
    /// The operation is not available for this backend.
    Unsupported(String),
    /// Internal invariant violation, e.g. a trace that does not replay.
    Inconsistency(String),
    /// Text input failed to parse; positions are 1-based.
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MalformedCommutator(m) => write!(f, "malformed commutator: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::MissingAssignment(i) => write!(f, "no element assigned to generator x{i}"),
            Error::ResourceLimit(m) => write!(f, "resource limit exceeded: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Inconsistency(m) => write!(f, "internal inconsistency: {m}"),
            Error::Parse { line, col, message } => {
                write!(f, "parse error at line {line}, column {col}: {message}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
