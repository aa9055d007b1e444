//! Closed-form parallel transport along minimizing geodesics of SO(3).
//!
//! Body-frame velocities transport by a rotation about `−n` through half the
//! geodesic angle. [`transport_vec`] is the production path; the sandwich and
//! ambient matrix forms compute the same map independently and are used to
//! cross-check it.

use crate::coeffs::{ambient_skew_coeff, ambient_sym_coeff, half_sinc};
use crate::error::{Error, Result};
use crate::so3::{exp_matrix, hat_matrix, relative_log, vee_unchecked, Mat3, Rotation, SkewMat, Vec3};

/// Accepted deviation of `‖n‖` from one.
pub const AXIS_TOL: f64 = 1e-12;

/// Accepted asymmetry of `R₀ᵀV₀` for a tangent vector at `R₀`.
pub const TANGENT_TOL: f64 = 1e-10;

/// `a₁ = (1 − cos(θ/2))(n·a₀)n + sin(θ/2) a₀×n + cos(θ/2) a₀`.
pub fn transport_vec(a0: &Vec3, theta: f64, n: &Vec3) -> Result<Vec3> {
    let norm = n.norm();
    if !((norm - 1.0).abs() <= AXIS_TOL) {
        return Err(Error::BadAxis { norm });
    }
    Ok(transport_vec_unchecked(a0, theta, n))
}

#[inline]
pub(crate) fn transport_vec_unchecked(a0: &Vec3, theta: f64, n: &Vec3) -> Vec3 {
    let (s, c) = (0.5 * theta).sin_cos();
    n * ((1.0 - c) * n.dot(a0)) + a0.cross(n) * s + a0 * c
}

/// `A₁ = exp(−û/2) A₀ exp(û/2)`, the transport of `A₀` from `I` to `exp(û)`.
pub fn transport_sandwich(a0: &SkewMat, u: &Vec3) -> SkewMat {
    SkewMat::from_vector(&vee_unchecked(&sandwich_matrix(a0.matrix(), u)))
}

pub(crate) fn sandwich_matrix(a0: &Mat3, u: &Vec3) -> Mat3 {
    let half = u * 0.5;
    exp_matrix(&-half) * a0 * exp_matrix(&half)
}

/// Transport of the tangent vector `V₀` at `R₀` to `R₁` in ambient matrix form.
pub fn transport_ambient(r0: &Rotation, r1: &Rotation, v0: &Mat3) -> Result<Mat3> {
    let r0m = r0.matrix();
    let a0m = r0m.transpose() * v0;
    let asymmetry = (a0m + a0m.transpose()).amax();
    if !(asymmetry <= TANGENT_TOL) {
        return Err(Error::NotTangent { asymmetry });
    }
    let (theta, n) = relative_log(r0, r1)?;
    let u = n * theta;
    let uh = hat_matrix(&u);
    let c = u.dot(&vee_unchecked(&a0m));
    let r0u = r0m * uh;
    let (_, ch) = (0.5 * theta).sin_cos();
    Ok(r0u * (c * ambient_skew_coeff(theta))
        + r0u * uh * (c * ambient_sym_coeff(theta))
        + (v0 * uh + r0u * r0m.transpose() * v0) * half_sinc(theta)
        + v0 * ch)
}

/// Discrepancy between particle `i`'s velocity and particle `k`'s velocity
/// transported to `R_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Misalignment {
    /// `‖P_{ki} a_k − a_i‖`, or `+∞` at the cut locus.
    pub value: f64,
    /// Set when the pair is at distance `≥ π − ε_cut`, where transport is undefined.
    pub cut_locus: bool,
}

/// Misalignment of the pair `(R_i, a_i)`, `(R_k, a_k)`.
pub fn misalignment(p_i: (&Rotation, &Vec3), p_k: (&Rotation, &Vec3)) -> Misalignment {
    match relative_log(p_k.0, p_i.0) {
        Ok((theta, n)) => {
            Misalignment { value: (transport_vec_unchecked(p_k.1, theta, &n) - p_i.1).norm(), cut_locus: false }
        }
        Err(_) => Misalignment { value: f64::INFINITY, cut_locus: true },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{exp_so3, hat};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| Vec3::new(a, b, c).normalize())
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| Vec3::new(a, b, c))
    }

    #[test]
    fn transport_vec_examples() {
        let n = Vec3::new(0.6, 0.0, 0.8);
        let a = transport_vec(&(n * 2.5), 1.9, &n).unwrap();
        assert!((a - n * 2.5).norm() < 1e-15);
        let a0 = Vec3::new(0.3, -1.0, 0.7);
        assert_eq!(transport_vec(&a0, 0.0, &n).unwrap(), a0);
        let a = transport_vec(&Vec3::x(), PI - 1e-9, &Vec3::z()).unwrap();
        assert!((a - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-8);
        let u = Vec3::z() * (PI - 1e-9);
        let s = transport_sandwich(&hat(&Vec3::x()), &u).vector();
        assert!((a - s).norm() < 1e-14);
        assert!(matches!(transport_vec(&a0, 1.0, &Vec3::new(1.0, 1e-5, 0.0)), Err(Error::BadAxis { .. })));
    }

    #[test]
    fn sandwich_examples() {
        let a0 = hat(&Vec3::new(0.2, 0.4, -0.1));
        assert_eq!(transport_sandwich(&a0, &Vec3::zeros()), a0);
        let u = Vec3::new(1.0, -2.0, 0.5);
        let axis = hat(&u.normalize());
        assert!((transport_sandwich(&axis, &u).matrix() - axis.matrix()).amax() < 1e-15);
    }

    #[test]
    fn ambient_examples() {
        let r0 = exp_so3(&Vec3::new(0.4, 0.1, -1.2));
        let v0 = r0.matrix() * hat_matrix(&Vec3::new(0.5, -0.2, 0.3));
        assert!((transport_ambient(&r0, &r0, &v0).unwrap() - v0).amax() < 1e-15);

        let n = Vec3::new(2.0, -1.0, 2.0) / 3.0;
        let theta = 2.2;
        let r1 = r0.compose(&exp_so3(&(n * theta)));
        let v1 = transport_ambient(&r0, &r1, &(r0.matrix() * hat_matrix(&n))).unwrap();
        assert!((v1 - r1.matrix() * hat_matrix(&n)).amax() < 1e-14);

        let bad = r0.matrix() * Mat3::identity();
        assert!(matches!(transport_ambient(&r0, &r1, &bad), Err(Error::NotTangent { .. })));
        let far = r0.compose(&exp_so3(&(n * PI)));
        assert!(matches!(transport_ambient(&r0, &far, &v0), Err(Error::CutLocus { .. })));
    }

    #[test]
    fn misalignment_examples() {
        let r = exp_so3(&Vec3::new(0.3, 0.3, 0.3));
        let a = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(misalignment((&r, &a), (&r, &a)).value, 0.0);
        let b = Vec3::new(-1.0, 0.5, 0.0);
        let m = misalignment((&r, &a), (&r, &b));
        assert!((m.value - (a - b).norm()).abs() < 1e-15);

        let rk = exp_so3(&Vec3::new(-0.8, 0.2, 1.0));
        let (t, n) = relative_log(&rk, &r).unwrap();
        let ai = transport_vec(&b, t, &n).unwrap();
        assert!(misalignment((&r, &ai), (&rk, &b)).value < 1e-12);

        let antipode = r.compose(&exp_so3(&Vec3::new(PI, 0.0, 0.0)));
        let m = misalignment((&r, &a), (&antipode, &b));
        assert!(m.cut_locus && m.value == f64::INFINITY);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn preserves_norms_and_inner_products(a in vec3(), b in vec3(), n in unit(), t in 0.0..PI) {
            let a1 = transport_vec(&a, t, &n).unwrap();
            let b1 = transport_vec(&b, t, &n).unwrap();
            prop_assert!((a1.norm() - a.norm()).abs() < 1e-12);
            prop_assert!((a1.dot(&b1) - a.dot(&b)).abs() < 1e-12);
            prop_assert!((n.dot(&a1) - n.dot(&a)).abs() < 1e-12);
        }

        #[test]
        fn reversible(a in vec3(), n in unit(), t in 0.0..PI) {
            let back = transport_vec(&transport_vec(&a, t, &n).unwrap(), t, &-n).unwrap();
            prop_assert!((back - a).amax() < 1e-12);
        }

        #[test]
        fn sandwich_matches_vector_form(a in vec3(), n in unit(), t in 0.0..PI) {
            let u = n * t;
            let raw = sandwich_matrix(hat(&a).matrix(), &u);
            prop_assert!((raw + raw.transpose()).amax() < 1e-13);
            let s = transport_sandwich(&hat(&a), &u).vector();
            prop_assert!((s - transport_vec(&a, t, &n).unwrap()).amax() < 1e-12);
        }

        #[test]
        fn ambient_is_tangent_and_isometric(a in vec3(), w in vec3(), n in unit(), t in 0.0..(PI - 1e-3)) {
            let r0 = exp_so3(&w);
            let r1 = r0.compose(&exp_so3(&(n * t)));
            let v0 = r0.matrix() * hat_matrix(&a);
            let v1 = transport_ambient(&r0, &r1, &v0).unwrap();
            let a1m = r1.matrix().transpose() * v1;
            prop_assert!((a1m + a1m.transpose()).amax() < 1e-10);
            prop_assert!((v1.norm() - v0.norm()).abs() < 1e-11);
        }
    }
}
