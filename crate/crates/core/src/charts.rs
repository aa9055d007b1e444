//! Exponential coordinates `x ↦ R₀ exp(x̂)` around a base rotation `R₀`.
//!
//! The chart covers everything except the cut locus of `R₀` (`‖x‖ < π`).
//! Everything in this module is computed from coordinates alone and serves
//! as an independent oracle for the closed-form transport in
//! [`crate::transport`].

use std::f64::consts::PI;

use crate::coeffs::{
    basis_radial_skew, basis_radial_sym, christoffel_cubic, christoffel_mixed, christoffel_trace, cosc,
    half_angle_gain, inverse_metric_iso, inverse_metric_radial, metric_iso, metric_radial, sinc,
};
use crate::error::{Error, Result};
use crate::so3::{basis, exp_matrix, frobenius_inner, hat_matrix, Mat3, Rotation, Vec3};

/// Below this parameter value the transport ODE coefficient is replaced by
/// its leading-order behaviour `-θ² t / 12`.
const ODE_LIMIT_T: f64 = 1e-6;

/// A point `R₀ exp(x̂)` given by its chart center and exponential coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    base: Rotation,
    x: Vec3,
}

impl ChartPoint {
    pub fn new(base: Rotation, x: Vec3) -> Result<Self> {
        let norm = x.norm();
        if !(norm < PI) {
            return Err(Error::OutOfChart { norm });
        }
        Ok(ChartPoint { base, x })
    }

    /// Chart centered at the identity.
    pub fn at_identity(x: Vec3) -> Result<Self> {
        Self::new(Rotation::identity(), x)
    }

    pub fn base(&self) -> &Rotation {
        &self.base
    }

    pub fn x(&self) -> &Vec3 {
        &self.x
    }

    pub fn theta(&self) -> f64 {
        self.x.norm()
    }

    /// The rotation `R₀ exp(x̂)`.
    pub fn rotation(&self) -> Mat3 {
        self.base.matrix() * exp_matrix(&self.x)
    }
}

/// Symmetric metric coefficients `g_{αβ}` (or their inverse).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricTensor(Mat3);

impl MetricTensor {
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }
}

/// Christoffel symbols stored as `gamma[γ][α][β] = Γ^γ_{αβ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChristoffelTensor(pub [[[f64; 3]; 3]; 3]);

impl ChristoffelTensor {
    pub fn get(&self, gamma: usize, alpha: usize, beta: usize) -> f64 {
        self.0[gamma][alpha][beta]
    }

    /// `w_γ = Γ^γ_{αβ} u_α v_β`
    pub fn contract(&self, u: &Vec3, v: &Vec3) -> Vec3 {
        Vec3::from_fn(|g, _| {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    s += self.0[g][a][b] * u[a] * v[b];
                }
            }
            s
        })
    }

    /// Largest entry in absolute value.
    pub fn amax(&self) -> f64 {
        self.0.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference from `other`.
    pub fn max_diff(&self, other: &ChristoffelTensor) -> f64 {
        let mut m: f64 = 0.0;
        for g in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    m = m.max((self.0[g][a][b] - other.0[g][a][b]).abs());
                }
            }
        }
        m
    }
}

/// Coordinate tangent vectors `∂_α R(x)`, α = 1, 2, 3.
pub fn tangent_basis(p: &ChartPoint) -> [Mat3; 3] {
    let x = p.x;
    let t = x.norm();
    let xh = hat_matrix(&x);
    let xh2 = xh * xh;
    let (c1, s, c3, c) = (basis_radial_skew(t), sinc(t), basis_radial_sym(t), cosc(t));
    let e = basis();
    let r0 = p.base.matrix();
    std::array::from_fn(|a| {
        let anti = e[a] * xh + xh * e[a];
        r0 * (xh * (c1 * x[a]) + e[a] * s + xh2 * (c3 * x[a]) + anti * c)
    })
}

/// Closed-form metric `g = a(θ) x xᵀ + b(θ) I`.
pub fn metric(p: &ChartPoint) -> MetricTensor {
    let t = p.theta();
    MetricTensor(p.x * p.x.transpose() * metric_radial(t) + Mat3::identity() * metric_iso(t))
}

/// Closed-form inverse metric `g⁻¹ = A(θ) x xᵀ + B(θ) I`.
pub fn metric_inverse(p: &ChartPoint) -> MetricTensor {
    let t = p.theta();
    MetricTensor(p.x * p.x.transpose() * inverse_metric_radial(t) + Mat3::identity() * inverse_metric_iso(t))
}

/// Metric from its definition `g_{αβ} = ½⟨∂_αR, ∂_βR⟩_F`.
pub fn metric_from_basis(p: &ChartPoint) -> MetricTensor {
    let b = tangent_basis(p);
    MetricTensor(Mat3::from_fn(|i, j| 0.5 * frobenius_inner(&b[i], &b[j])))
}

/// Closed-form Christoffel symbols of the bi-invariant metric.
pub fn christoffel(p: &ChartPoint) -> ChristoffelTensor {
    christoffel_at(&p.x)
}

fn christoffel_at(x: &Vec3) -> ChristoffelTensor {
    let t = x.norm();
    let (k1, k2, k3) = (christoffel_cubic(t), christoffel_mixed(t), christoffel_trace(t));
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut out = [[[0.0; 3]; 3]; 3];
    for (g, plane) in out.iter_mut().enumerate() {
        for (a, row) in plane.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = k1 * x[a] * x[b] * x[g] + k2 * (x[a] * d(b, g) + x[b] * d(a, g)) - k3 * d(a, b) * x[g];
            }
        }
    }
    ChristoffelTensor(out)
}

/// Levi-Civita formula `½ g^{γκ}(∂_β g_{κα} + ∂_α g_{κβ} − ∂_κ g_{αβ})` with
/// metric derivatives taken by central differences of step `h`.
pub fn christoffel_finite_difference(p: &ChartPoint, h: f64) -> Result<ChristoffelTensor> {
    let mut dg = [Mat3::zeros(); 3];
    for (k, slot) in dg.iter_mut().enumerate() {
        let mut step = Vec3::zeros();
        step[k] = h;
        let plus = metric(&ChartPoint::new(p.base, p.x + step)?).0;
        let minus = metric(&ChartPoint::new(p.base, p.x - step)?).0;
        *slot = (plus - minus) / (2.0 * h);
    }
    let ginv = metric_inverse(p).0;
    let mut out = [[[0.0; 3]; 3]; 3];
    for (g, plane) in out.iter_mut().enumerate() {
        for (a, row) in plane.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for k in 0..3 {
                    s += ginv[(g, k)] * (dg[b][(k, a)] + dg[a][(k, b)] - dg[k][(a, b)]);
                }
                *v = 0.5 * s;
            }
        }
    }
    Ok(ChristoffelTensor(out))
}

/// `Γ^γ_{αβ}(t u) u_α u_β`, which vanishes because straight lines through the
/// origin are geodesics.
pub fn geodesic_residual(u: &Vec3, t: f64) -> Result<Vec3> {
    let x = u * t;
    let norm = x.norm();
    if !(norm < PI) {
        return Err(Error::OutOfChart { norm });
    }
    Ok(christoffel_at(&x).contract(u, u))
}

// Scalar s(t) in Γ^γ_{αβ}(tu) u_α = s(t)(δ_βγ − u_β u_γ/θ²).
fn transport_coefficient(theta: f64, t: f64) -> f64 {
    if t < ODE_LIMIT_T {
        -theta * theta * t / 12.0
    } else {
        theta * theta * t * christoffel_mixed(theta * t)
    }
}

/// Integrates `v̇_γ + Γ^γ_{αβ}(t u) u_α v_β = 0` over `t ∈ [0, 1]` with
/// classical RK4 and returns `v(1)`.
pub fn transport_ode_solve(u: &Vec3, v0: &Vec3, steps: usize) -> Result<Vec3> {
    let theta = u.norm();
    if !(theta < PI - crate::so3::CUT_LOCUS_EPS) {
        return Err(Error::OutOfChart { norm: theta });
    }
    if steps < 100 {
        return Err(Error::InvalidArgument(format!("steps = {steps}, at least 100 required")));
    }
    if theta == 0.0 {
        return Ok(*v0);
    }
    let n = u / theta;
    let f = |t: f64, v: &Vec3| -> Vec3 { -transport_coefficient(theta, t) * (v - n * n.dot(v)) };
    let h = 1.0 / steps as f64;
    let mut v = *v0;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, &v);
        let k2 = f(t + 0.5 * h, &(v + k1 * (0.5 * h)));
        let k3 = f(t + 0.5 * h, &(v + k2 * (0.5 * h)));
        let k4 = f(t + h, &(v + k3 * h));
        v += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    }
    Ok(v)
}

/// Exact solution of the transport equations along `x(t) = t u`:
/// `v(t) = G v₀ + (1 − G)(n·v₀) n` with `G = θt / (2 sin(θt/2))`.
pub fn transport_exact_coords(u: &Vec3, v0: &Vec3, t: f64) -> Result<Vec3> {
    let theta = u.norm();
    let norm = theta * t;
    if !(norm < PI) {
        return Err(Error::OutOfChart { norm });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    if theta == 0.0 {
        return Ok(*v0);
    }
    let n = u / theta;
    let g = half_angle_gain(norm);
    Ok(v0 * g + n * ((1.0 - g) * n.dot(v0)))
}

/// Body-frame vector at `R₁ = R₀ exp(û)` of the tangent vector with chart
/// components `v` at `x = u`: `vee(R₁ᵀ Σ_α v_α ∂_αR(u))`.
pub fn coords_to_body(p: &ChartPoint, v: &Vec3) -> Vec3 {
    let b = tangent_basis(p);
    let tangent = b[0] * v[0] + b[1] * v[1] + b[2] * v[2];
    crate::so3::vee_unchecked(&(p.rotation().transpose() * tangent))
}
