use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("token `{0}` is not in the alphabet")]
    UnknownToken(String),
    #[error("strings are over different alphabets")]
    AlphabetMismatch,

    #[error("transducer is nondeterministic; a function was required")]
    Nondeterministic,
    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),
    #[error("growth bound violated: output length {output_len} for input length {input_len} exceeds {bound}")]
    GrowthBoundViolation {
        input_len: usize,
        output_len: usize,
        bound: f64,
    },
    #[error("epsilon-input cycle producing output: output length is unbounded")]
    UnboundedOutput,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("determinization exceeded the cap of {0} states")]
    StateCapExceeded(usize),

    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    UndeclaredVariable {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: unknown domain `{name}`")]
    UnknownDomain {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: token `{token}` is not in the {which} alphabet")]
    TokenNotInAlphabet {
        line: usize,
        col: usize,
        token: String,
        which: &'static str,
    },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("rule is not a valid GGR: {0}")]
    InvalidRule(String),

    #[error("substitution error: {0}")]
    Substitution(String),
    #[error("no rule matches `{0}`")]
    NoRuleMatches(String),
    #[error("recursion depth {0} exceeded")]
    DepthExceeded(usize),
    #[error("rule {rule} recurses on an argument not shorter than `{input}`")]
    NonDecreasingRecursion { rule: usize, input: String },
    #[error("{candidates} (rule, assignment) candidates match `{input}`")]
    AmbiguousMatch { input: String, candidates: usize },
    #[error("cannot derive a growth bound: {0}")]
    BoundDerivation(String),

    #[error("transduction undefined at assignment {0}")]
    UndefinedPoint(String),
    #[error("beta must be positive, got {0}")]
    InvalidBeta(f64),
    #[error("the transduction carries no growth bound")]
    MissingGrowthBound,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category, used in `error:<kind>:` prefixes.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidAlphabet(_) | UnknownToken(_) | AlphabetMismatch => "alphabet",
            Syntax { .. }
            | UndeclaredVariable { .. }
            | UnknownDomain { .. }
            | TokenNotInAlphabet { .. }
            | Format { .. } => "parse",
            InvalidRule(_) => "validation",
            InvalidTransducer(_) | InvalidPartition(_) => "format",
            InvalidArgument(_) | InvalidBeta(_) | EmptyDataset => "usage",
            Io(_) => "io",
            _ => "runtime",
        }
    }

    /// Whether the failure is caused by the caller's input rather than by a run.
    pub fn is_input_error(&self) -> bool {
        !matches!(self.kind(), "runtime")
    }
}
