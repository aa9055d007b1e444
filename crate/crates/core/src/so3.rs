//! Primitives for the rotation group SO(3): the hat/vee isomorphism with
//! so(3), Rodrigues exponential and logarithm, geodesic distance, relative
//! rotations and projection of nearly-orthogonal matrices back onto the group.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::coeffs::{cosc, sinc};
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Distance-to-π guard below which two rotations are treated as cut-locus points.
pub const CUT_LOCUS_EPS: f64 = 1e-9;

/// Largest entry of `M + Mᵀ` accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-12;

/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` for a valid [`Rotation`].
pub const ROTATION_TOL: f64 = 1e-9;

const POLAR_TOL: f64 = 1e-14;
const POLAR_MAX_ITER: usize = 50;

/// The basis skew matrices `E₁, E₂, E₃` (`E_α = hat(e_α)`).
pub fn basis() -> [Mat3; 3] {
    [hat_matrix(&Vec3::x()), hat_matrix(&Vec3::y()), hat_matrix(&Vec3::z())]
}

/// A 3×3 skew-symmetric matrix, always built from its vector so that
/// `Mᵀ + M = 0` holds exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewMat(Mat3);

impl SkewMat {
    pub fn from_vector(v: &Vec3) -> Self {
        SkewMat(hat_matrix(v))
    }

    /// Accepts a matrix that is skew-symmetric to within [`SKEW_TOL`] and
    /// stores the exact skew matrix of its vee.
    pub fn try_from_matrix(m: &Mat3) -> Result<Self> {
        Ok(Self::from_vector(&vee(m)?))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn vector(&self) -> Vec3 {
        vee_unchecked(&self.0)
    }

    pub fn into_inner(self) -> Mat3 {
        self.0
    }
}

impl From<SkewMat> for Mat3 {
    fn from(s: SkewMat) -> Mat3 {
        s.0
    }
}

/// A rotation matrix satisfying `‖RᵀR − I‖_F ≤ 1e-9` and `|det R − 1| ≤ 1e-9`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn new(m: Mat3) -> Result<Self> {
        let orthogonality = (m.transpose() * m - Mat3::identity()).norm();
        let det = m.determinant();
        if !(orthogonality <= ROTATION_TOL && (det - 1.0).abs() <= ROTATION_TOL) {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(Rotation(m))
    }

    /// Wraps a matrix without validation; callers guarantee orthogonality.
    pub(crate) fn new_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation(self.0 * other.0)
    }

    /// `‖RᵀR − I‖_F`
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    /// Rotation about the z axis by `angle`.
    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation(Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }
}

impl From<Rotation> for [[f64; 3]; 3] {
    fn from(r: Rotation) -> Self {
        let m = r.0;
        [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]]
    }
}

impl TryFrom<[[f64; 3]; 3]> for Rotation {
    type Error = Error;

    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self> {
        Rotation::new(Mat3::from_fn(|i, j| rows[i][j]))
    }
}

/// Angle-axis form of a rotation with `theta ∈ [0, π]` and a unit axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub theta: f64,
    pub axis: Vec3,
}

impl AxisAngle {
    /// The rotation vector `θ·n`.
    pub fn to_vector(&self) -> Vec3 {
        self.axis * self.theta
    }
}

/// Skew matrix of `v`:
/// ```text
/// [  0  -v3  v2 ]
/// [  v3  0  -v1 ]
/// [ -v2  v1  0  ]
/// ```
pub fn hat(v: &Vec3) -> SkewMat {
    SkewMat::from_vector(v)
}

#[inline]
pub fn hat_matrix(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Axial vector of the skew part, `vee(½(M − Mᵀ))`, without a symmetry check.
#[inline]
pub fn vee_unchecked(m: &Mat3) -> Vec3 {
    Vec3::new(0.5 * (m[(2, 1)] - m[(1, 2)]), 0.5 * (m[(0, 2)] - m[(2, 0)]), 0.5 * (m[(1, 0)] - m[(0, 1)]))
}

/// Inverse of [`hat`]. Fails when any entry of `M + Mᵀ` exceeds [`SKEW_TOL`].
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let asymmetry = (m + m.transpose()).amax();
    if !(asymmetry <= SKEW_TOL) {
        return Err(Error::NonSkewInput { asymmetry });
    }
    Ok(vee_unchecked(m))
}

/// Rodrigues formula `I + (sin θ/θ) v̂ + ((1 − cos θ)/θ²) v̂²`, `θ = ‖v‖`.
pub fn exp_so3(v: &Vec3) -> Rotation {
    Rotation(exp_matrix(v))
}

#[inline]
pub(crate) fn exp_matrix(v: &Vec3) -> Mat3 {
    let theta = v.norm();
    let k = hat_matrix(v);
    Mat3::identity() + k * sinc(theta) + (k * k) * cosc(theta)
}

// Angle and axis of a rotation-like matrix. The angle comes from
// atan2(|sin θ|, cos θ), which keeps full relative accuracy near 0 and π.
fn log_matrix(m: &Mat3) -> AxisAngle {
    let s = vee_unchecked(m);
    let sin_t = s.norm();
    let cos_t = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = sin_t.atan2(cos_t);
    if theta == 0.0 {
        return AxisAngle { theta: 0.0, axis: Vec3::x() };
    }
    if cos_t > -0.5 {
        return AxisAngle { theta, axis: s / sin_t };
    }
    // Far from the identity the skew part is small; recover n nᵀ from the
    // symmetric part instead.
    let nnt = Mat3::identity() + (m + m.transpose() - 2.0 * Mat3::identity()) / (2.0 * (1.0 - cos_t));
    let j = (0..3).max_by(|&a, &b| nnt[(a, a)].total_cmp(&nnt[(b, b)])).unwrap_or(0);
    let col: Vec3 = nnt.column(j).into();
    let mut axis = col / col.norm();
    let skew_norm = (m - m.transpose()).norm();
    if skew_norm > 1e-13 {
        if axis.dot(&s) < 0.0 {
            axis = -axis;
        }
    } else if let Some(first) = axis.iter().copied().find(|c| c.abs() > 1e-12) {
        if first < 0.0 {
            axis = -axis;
        }
    }
    AxisAngle { theta, axis }
}

/// Inverse of Rodrigues' formula. The identity maps to `θ = 0` with axis
/// `(1, 0, 0)`; at `θ = π` the axis sign is fixed by making its first
/// nonzero component positive.
pub fn log_so3(r: &Rotation) -> AxisAngle {
    log_matrix(&r.0)
}

// Rᵀ Q with an explicit summation order, so that (RᵀQ)ᵀ and QᵀR agree bitwise.
#[inline]
fn transpose_mul(r: &Mat3, q: &Mat3) -> Mat3 {
    Mat3::from_fn(|i, j| r[(0, i)] * q[(0, j)] + r[(1, i)] * q[(1, j)] + r[(2, i)] * q[(2, j)])
}

#[inline]
fn angle_of(m: &Mat3) -> f64 {
    let sin_t = vee_unchecked(m).norm();
    let cos_t = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    sin_t.atan2(cos_t)
}

/// Angle and axis of `R_kᵀ R_i` for matrices that may sit slightly off the
/// group (intermediate integrator stages). The angle is bitwise symmetric
/// under swapping the arguments.
#[inline]
pub(crate) fn relative_axis_angle(r_k: &Mat3, r_i: &Mat3) -> AxisAngle {
    log_matrix(&transpose_mul(r_k, r_i))
}

/// Bi-invariant distance `arccos((tr(RᵀQ) − 1)/2) ∈ [0, π]`, symmetric bitwise.
pub fn geodesic_distance(r: &Rotation, q: &Rotation) -> f64 {
    angle_of(&transpose_mul(&r.0, &q.0))
}

/// Angle and unit axis of `log(R_kᵀ R_i)`.
pub fn relative_log(r_k: &Rotation, r_i: &Rotation) -> Result<(f64, Vec3)> {
    let aa = log_matrix(&transpose_mul(&r_k.0, &r_i.0));
    if aa.theta >= std::f64::consts::PI - CUT_LOCUS_EPS {
        return Err(Error::CutLocus { distance: aa.theta });
    }
    Ok((aa.theta, aa.axis))
}

/// `⟨A, B⟩_F = tr(AᵀB)`
pub fn frobenius_inner(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

/// `‖R A‖_R = ‖A‖_F / √2`, independent of the base point.
pub fn riemannian_norm(a: &SkewMat) -> f64 {
    a.0.norm() / std::f64::consts::SQRT_2
}

/// Orthogonal polar factor of `m`, by the Newton iteration `X ← ½(X + X⁻ᵀ)`.
pub fn project_to_so3(m: &Mat3) -> Result<Rotation> {
    let det = m.determinant();
    if !(det > 0.0) {
        return Err(Error::Degenerate(format!("determinant {det} is not positive")));
    }
    let mut x = *m;
    for _ in 0..=POLAR_MAX_ITER {
        if (x.transpose() * x - Mat3::identity()).norm() < POLAR_TOL {
            return Ok(Rotation(x));
        }
        let inv_t = x.try_inverse().ok_or_else(|| Error::Degenerate("singular iterate".into()))?.transpose();
        x = 0.5 * (x + inv_t);
    }
    Err(Error::Degenerate(format!("no convergence in {POLAR_MAX_ITER} iterations")))
}
