use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension N = {dimension} is too small (need N >= {required})")]
    DimensionTooSmall { dimension: usize, required: usize },

    #[error("at least {required} poles are required, got {got}")]
    TooFewPoles { got: usize, required: usize },

    #[error("poles {first} and {second} coincide")]
    DuplicatePoles { first: usize, second: usize },

    #[error("invalid weights: {0}")]
    BadWeights(String),

    #[error("point has {got} coordinates but the configuration lives in R^{expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation point lies within {distance:e} of pole {pole}")]
    EvalAtPole { pole: usize, distance: f64 },

    #[error("s = {0} makes the exponent tables singular (s must avoid 2 and 4)")]
    DegenerateS(String),

    #[error("this potential requires uniform weights 1/n")]
    NonUniformWeights,

    #[error("integrand is not integrable: {0}")]
    NonIntegrableTarget(String),

    #[error("integrand is not finite at {point:?}")]
    NaNEncountered { point: Vec<f64> },

    #[error("divergent integral: exponent {alpha} >= dimension {dimension}")]
    DivergentIntegral { alpha: f64, dimension: usize },

    #[error("finite-difference step {step:e} exceeds half the distance {distance:e} to the nearest singularity")]
    StepTooLarge { step: f64, distance: f64 },

    #[error("denominator {estimate:e} is not distinguishable from zero (std error {std_error:e})")]
    DegenerateDenominator { estimate: f64, std_error: f64 },

    #[error("need at least {required} data points, got {got}")]
    InsufficientData { got: usize, required: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
