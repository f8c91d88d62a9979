use thiserror::Error;

use crate::utility::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("demand {demand} is outside the model domain [0, {upper}]")]
    Domain { demand: f64, upper: f64 },

    #[error("price must be positive and finite, got {0}")]
    NonPositivePrice(f64),

    #[error("marginal utility vanishes at demand {demand}; absolute risk aversion is undefined")]
    Singular { demand: f64 },

    #[error("quadratic calibration is infeasible: a*d0 = {product} must be below 1")]
    CalibrationInfeasible { product: f64 },

    #[error("invalid model: {}", join_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("zero own-price elasticity implies infinite risk aversion")]
    ZeroElasticity,

    #[error("own-price elasticity must be negative, got {0}")]
    PositiveOwnPrice(f64),

    #[error("elasticity must be finite, got {0}")]
    NonFiniteElasticity(f64),

    #[error("budget {budget} is infeasible (must be positive and below the satiation spend {limit})")]
    InfeasibleBudget { budget: f64, limit: f64 },

    #[error("lambda bisection did not converge after {iterations} iterations (bracket [{lo:e}, {hi:e}])")]
    NoConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("closed-form allocation hits a corner in period {period}; use the numeric solver")]
    CornerSolution { period: usize },

    #[error("no closed-form allocation for a profile mixing utility families")]
    NoClosedForm,

    #[error("period index {index} out of range for {len} periods")]
    PeriodIndex { index: usize, len: usize },

    #[error("cross-price elasticity needs two distinct periods, got {0} twice")]
    SamePeriod(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Format(String),
}

impl Error {
    /// True for failures of the numerics (infeasible budgets, corner
    /// solutions, non-convergence) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleBudget { .. }
                | Error::NoConvergence { .. }
                | Error::CornerSolution { .. }
                | Error::NoClosedForm
                | Error::Singular { .. }
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
