use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-integer power {0}")]
    NonIntegerPower(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("no value for atom {0}")]
    MissingAtom(String),
    #[error("pole: denominator vanishes ({0})")]
    Pole(String),
    #[error("zero test indeterminate: every sample hit a pole")]
    Indeterminate,
    #[error("multi-index dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("equation {name} is not orderly solvable: {expr}")]
    NotOrderlySolvable { name: String, expr: String },
    #[error("equations {first} and {second} share the leading term {lead}")]
    DuplicateLeadingTerm { first: String, second: String, lead: String },
    #[error("equation {0} is zero")]
    ZeroEquation(String),
    #[error("equation {name} depends only on independent variables: {expr}")]
    Inconsistent { name: String, expr: String },
    #[error("leading terms belong to different unknowns")]
    UnknownMismatch,
    #[error("operator tuple has {expected} slots but {got} functions were given")]
    ArityMismatch { expected: usize, got: usize },
    #[error("reduction step budget of {0} exceeded")]
    StepBudget(usize),
    #[error("cannot solve remainder for its highest derivative: {0}")]
    NotMonicizable(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("singular data: equation {equation} has a pole at {jet}")]
    SingularData { equation: String, jet: String },
    #[error("missing parametric value for {0}")]
    MissingParametric(String),
    #[error("system is not passive: {0}")]
    NotPassive(String),
    #[error("trace does not replay: {0}")]
    TraceMismatch(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
