use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gamma ratio arguments {a} and {b} do not differ by an integer")]
    NonIntegerOffset { a: String, b: String },

    #[error("gamma function pole at {0}")]
    PoleError(String),

    #[error("cannot add square roots with distinct radicands {0} and {1}")]
    MixedRadicands(String, String),

    #[error("cannot parse '{token}'")]
    ParseError { token: String },

    #[error("triad ({0}, {1}, {2}) violates the triangle condition")]
    InvalidTriad(String, String, String),

    #[error("series does not terminate: no nonpositive integer numerator parameter")]
    NonTerminating,

    #[error("denominator parameter {0} hits a pole before the series terminates")]
    DenominatorPole(String),

    #[error("well-poised test needs p = q + 1, got p = {p}, q = {q}")]
    ArityMismatch { p: usize, q: usize },

    #[error("expected an integer, got {0} (half-integer bookkeeping error)")]
    ParityViolation(String),

    #[error("parameter {name} = {value} outside the supported domain")]
    InvalidParameter { name: &'static str, value: String },

    #[error("closed form disagrees with the oracle: {closed} != {oracle}")]
    FormulaMismatch { closed: String, oracle: String },

    #[error("method {method} gave {got}, oracle gave {expected}")]
    VerificationMismatch {
        method: String,
        got: String,
        expected: String,
    },

    #[error("method {method} does not apply to {symbol}")]
    MethodInapplicable { method: String, symbol: String },
}
