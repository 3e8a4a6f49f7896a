use crate::moo::ParetoPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line search stalled: no admissible step after {halvings} backtracking steps")]
    Stall { halvings: u32 },

    #[error("descent did not converge after {iters} iterations (stationarity {stationarity:e})")]
    NonConvergence {
        iters: usize,
        stationarity: f64,
        best: Box<ParetoPoint>,
    },

    #[error("tangent right-hand side vanishes for this β")]
    NullTangent,

    #[error("no solution: every Pareto set is empty")]
    NoSolution,

    #[error("not available: {0}")]
    NotAvailable(String),
}

impl Error {
    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::Dimension { expected, got })
        }
    }
}
