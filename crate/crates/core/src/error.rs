use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("triplet components must be positive integers")]
    NonPositive,

    #[error("no reversion: z = {z} does not exceed x = {x}, the inequality never reverses")]
    NoReversion { z: String, x: String },

    #[error("reversion at n = 1: there is no last triangle with a positive exponent")]
    NoLastTriangle,

    #[error("boundary equality z^{exponent} = x^{exponent} + y^{exponent}: phi = 1, reversor analysis refused")]
    BoundaryEquality { exponent: u32 },

    #[error("rho = {rho} lies outside [{lower}, {upper}]")]
    OutOfInterval { rho: String, lower: String, upper: String },

    #[error("degenerate logarithm base: z = 1")]
    DegenerateBase,

    #[error("wrong class: {0}")]
    WrongClass(String),

    #[error("no sign change of z^s - x^s - y^s on [{lo}, {hi}]")]
    NoSignChange { lo: String, hi: String },

    #[error("malformed radical base: {0}")]
    MalformedBase(String),

    #[error("comparison undecided at {digits} digits")]
    Indeterminate { digits: u32 },

    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),

    #[error("state file was written for config {saved}, current config is {current}")]
    ConfigMismatch { saved: String, current: String },

    #[error("malformed state file: {0}")]
    StateFormat(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
