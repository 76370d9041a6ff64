use thiserror::Error;

use crate::poly::Polynomial;
use crate::problem::MinimaxSolution;
use crate::remez::ReferenceSet;

/// The last levelled iterate of an exchange run that did not converge.
#[derive(Debug, Clone)]
pub struct RemezIterate {
    pub reference: ReferenceSet,
    pub poly: Polynomial,
    pub level: f64,
    pub max_error: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("degenerate reference set: the levelled system is singular")]
    DegenerateReference,

    #[error("exchange did not converge after {iterations} iterations (defect {defect:e})")]
    NotConverged {
        iterations: usize,
        defect: f64,
        last: Box<RemezIterate>,
    },

    #[error("solution is not converged")]
    Unconverged,

    #[error("only {count} alternation points found, need at least {needed}")]
    TooFewAlternationPoints { count: usize, needed: usize },

    #[error("{count} alternation points found, at most {allowed} are possible")]
    TooManyAlternationPoints { count: usize, allowed: usize },

    #[error("alternation signs do not alternate at x = {at}")]
    NonAlternating { at: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("Newton refinement refused: {reason}")]
    RefinementRefused {
        reason: String,
        original: Box<MinimaxSolution>,
    },

    #[error("external extremum found on both sides (left {left}, right {right})")]
    AmbiguousExternalExtremum { left: f64, right: f64 },

    #[error("linear program is {0}")]
    Simplex(&'static str),

    #[error("no sign change of the indicator on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("solver failed during bisection with bracket [{lo}, {hi}]: {source}")]
    Bisection {
        lo: f64,
        hi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{failed} of {total} sweep rows failed")]
    SweepFailed { failed: usize, total: usize },

    #[error("trajectory matching ambiguous near alpha = {alpha}; refine the grid")]
    Resolution { alpha: f64 },

    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
