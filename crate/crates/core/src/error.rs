use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    /// The discriminant under the square root of the equilibrium formulas is negative.
    #[error("complex branch at N = {n}: alpha = {alpha} < 0")]
    ComplexBranch { n: f64, alpha: f64 },

    #[error("boundary equilibrium does not exist (requires r > xi3)")]
    NoBoundaryEquilibrium,

    #[error("singular crossing denominator at omega = {omega}")]
    SingularDenominator { omega: f64 },

    #[error("inconsistent crossing at omega = {omega}: cos^2 + sin^2 = {norm}")]
    InconsistentCrossing { omega: f64, norm: f64 },

    #[error("degenerate crossing at omega = {omega}: rho1^2 + rho2^2 = 0")]
    DegenerateCrossing { omega: f64 },

    #[error("step {step} exceeds the delay {tau}")]
    InvalidStep { step: f64, tau: f64 },

    #[error("non-finite state at t = {time}")]
    BlowUp { time: f64 },

    #[error("time {time} outside the integrated span [{start}, {end}]")]
    OutOfSpan { time: f64, start: f64, end: f64 },

    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
}
