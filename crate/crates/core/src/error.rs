use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live on tori of different half-dimension `q`.
    #[error("dimension mismatch: q = {left} vs q = {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Two spectral fields live on incompatible grids.
    #[error("grid mismatch: N = {left} vs N = {right}")]
    GridMismatch { left: usize, right: usize },

    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The two Hamiltonians do not span a 2-plane.
    #[error("degenerate plane: Gram determinant {gram:.3e} below threshold")]
    DegeneratePlane { gram: f64 },

    /// The torus closed form has a vanishing denominator at (n,m) = ±(k,l).
    #[error("singular denominator: resonant mode pair (n,m) = ±(k,l): ({n:?},{m:?}) vs ({k:?},{l:?})")]
    ResonantPair {
        n: Vec<i32>,
        m: Vec<i32>,
        k: Vec<i32>,
        l: Vec<i32>,
    },

    /// A Laplace eigenfunction was required but not supplied.
    #[error("not a Laplace eigenfunction: residual {residual:.3e}")]
    NotEigenfunction { residual: f64 },

    /// The eigenbasis does not cover the bracket of the inputs.
    #[error("incomplete basis: bracket coverage residual {residual:.3e} exceeds {tolerance:.1e}")]
    IncompleteBasis { residual: f64, tolerance: f64 },

    /// The closed-form structure constants disagree with quadrature.
    #[error(
        "structure-constant formula disagrees with quadrature at ({n},{m};{k},{l})->({i},{j}): |diff| = {diff:.3e}"
    )]
    FormulaMismatch {
        n: i32,
        m: i32,
        k: i32,
        l: i32,
        i: i32,
        j: i32,
        diff: f64,
    },

    /// The time integration produced non-finite values.
    #[error("solver diverged: non-finite state after step {step}")]
    Diverged { step: usize },

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
