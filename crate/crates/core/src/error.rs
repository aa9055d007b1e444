use thiserror::Error;

/// Errors raised by the geometry kernel and the flocking dynamics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (max |M + Mᵀ| entry = {asymmetry:e})")]
    NonSkewInput { asymmetry: f64 },

    #[error("matrix is not a rotation (‖RᵀR − I‖_F = {orthogonality:e}, det = {det})")]
    NotRotation { orthogonality: f64, det: f64 },

    #[error("points are at the cut locus of each other (distance {distance} ≥ π − ε)")]
    CutLocus { distance: f64 },

    #[error("polar projection failed: {0}")]
    Degenerate(String),

    #[error("point outside the exponential chart (‖x‖ = {norm} ≥ π)")]
    OutOfChart { norm: f64 },

    #[error("rotation axis is not a unit vector (‖n‖ = {norm})")]
    BadAxis { norm: f64 },

    #[error("matrix is not tangent at the base rotation (asymmetry of RᵀV = {asymmetry:e})")]
    NotTangent { asymmetry: f64 },

    #[error("particles {i} and {k} reached distance {distance} with a weight that does not vanish at the cut locus")]
    CutLocusViolation { i: usize, k: usize, distance: f64 },

    #[error("diagnostics history is empty")]
    EmptyHistory,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
