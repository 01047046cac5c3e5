use thiserror::Error;

use crate::criterion::ReebDecision;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is below the minimum of {min}", min = crate::circle_map::MIN_GRID)]
    GridTooSmall(usize),

    #[error("lift endpoint gap {gap} is not a multiple of 2π (off by {off:e})")]
    NonIntegralGap { gap: f64, off: f64 },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("ambiguous lift between samples {index} and {next}: jump {jump} is within π/2 of both branches", next = index + 1)]
    AmbiguousLift { index: usize, jump: f64 },

    #[error("degree hint {hint} contradicts the unwrapped degree {found}")]
    DegreeMismatch { hint: i64, found: i64 },

    #[error("derivative is flat over {cells} grid cells near z = {z:.6} without a sign change")]
    DegenerateCritical { z: f64, cells: usize },

    #[error("drawdown is undefined for a degree-zero map")]
    ZeroDegree,

    #[error("drawdown {max_drawdown} is within {tol:e} of π; the decision cannot be certified")]
    Borderline {
        max_drawdown: f64,
        tol: f64,
        degree: i64,
    },

    #[error("plateau interval {index} is infeasible: level {level} not above {lower}")]
    InfeasibleIntervals {
        index: usize,
        level: f64,
        lower: f64,
    },

    #[error("cannot keep |φ − θ| ≤ π/2 − {required} (reached {reached})")]
    TubeViolation { required: f64, reached: f64 },

    #[error("φ is not strictly monotone: min oriented slope {min_slope:e} < {eta:e}")]
    NotMonotone { min_slope: f64, eta: f64 },

    #[error("bias forcing failed to make I(φ) {sign} after {escalations} escalations")]
    MaxBias {
        sign: &'static str,
        escalations: usize,
    },

    #[error("map is not equivariant for the screw motion: residual {residual:e}")]
    NotEquivariant { residual: f64 },

    #[error("invalid screw data: {0}")]
    InvalidScrew(String),

    #[error("sup |φ − θ| = {sup} is too close to π/2 for tan")]
    TanOverflow { sup: f64 },

    #[error("the two quadratures of I disagree: {theta_form} vs {phi_form}")]
    QuadratureMismatch { theta_form: f64, phi_form: f64 },

    #[error("bracket does not straddle zero: I(φ⁻) = {minus}, I(φ⁺) = {plus}")]
    BadBracket { minus: f64, plus: f64 },

    #[error("bisection did not reach |I| < {tol:e} in {iterations} steps (|I| = {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("criterion rejects θ (max drawdown {:.6})", .0.max_drawdown)]
    CriterionFailed(Box<ReebDecision>),

    #[error("contact-form precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("not a connection form: α(X) residual {pairing:e}, i_X dα residual {contraction:e}")]
    NotConnectionForm { pairing: f64, contraction: f64 },

    #[error("frequency n must be non-zero")]
    ZeroFrequency,

    #[error("ε = {eps} too large: min(1 + 2εθ′) = {min_factor}")]
    EpsilonTooLarge { eps: f64, min_factor: f64 },

    #[error("anchor condition violated: {0}")]
    AnchorViolation(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}
