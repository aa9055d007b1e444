use std::f64::consts::{PI, TAU};

use super::{Ensemble, Particle, WeightFn};
use crate::error::{Error, Result};
use crate::so3::{Rotation, Vec3, CUT_LOCUS_EPS};

/// Builds rotations about the z axis by `thetas[i]` with angular velocities
/// `(0, 0, nus[i])`. Such data stay in the z-rotation subgroup, where the
/// dynamics reduce to the Cucker-Smale model on the circle.
pub fn make_circle_ensemble(thetas: &[f64], nus: &[f64], kappa: f64, weight: WeightFn) -> Result<Ensemble> {
    if thetas.len() != nus.len() {
        return Err(Error::InvalidArgument(format!("{} angles but {} angular speeds", thetas.len(), nus.len())));
    }
    let particles =
        thetas.iter().zip(nus).map(|(&t, &nu)| Particle::new(Rotation::about_z(t), Vec3::new(0.0, 0.0, nu))).collect();
    Ensemble::new(particles, kappa, weight)
}

/// States of the circle model at every step, including the initial one.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleTrajectory {
    pub thetas: Vec<Vec<f64>>,
    pub nus: Vec<Vec<f64>>,
}

/// Arc distance on the circle, `arccos(cos(x − y)) ∈ [0, π]`.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

fn circle_rhs(theta: &[f64], nu: &[f64], kappa: f64, weight: &WeightFn) -> (Vec<f64>, Vec<f64>) {
    let n = theta.len();
    let dnu = (0..n)
        .map(|i| {
            let mut s = 0.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let d = circle_distance(theta[i], theta[k]);
                if d >= PI - CUT_LOCUS_EPS && weight.vanishes_at_cut_locus() {
                    continue;
                }
                s += weight.eval(d) * (nu[k] - nu[i]);
            }
            kappa / n as f64 * s
        })
        .collect();
    (nu.to_vec(), dnu)
}

/// Integrates `θ̇_i = ν_i`, `ν̇_i = (κ/N) Σ_k φ(|θ_i − θ_k|) (ν_k − ν_i)` with
/// classical RK4.
pub fn circle_cs_reference(
    thetas: &[f64],
    nus: &[f64],
    kappa: f64,
    weight: &WeightFn,
    dt: f64,
    steps: usize,
) -> Result<CircleTrajectory> {
    if thetas.len() != nus.len() || thetas.is_empty() {
        return Err(Error::InvalidArgument("angles and speeds must be nonempty and of equal length".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let axpy = |x: &[f64], d: &[f64], h: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + b * h).collect() };
    let mut out = CircleTrajectory { thetas: vec![thetas.to_vec()], nus: vec![nus.to_vec()] };
    let (mut th, mut nu) = (thetas.to_vec(), nus.to_vec());
    for _ in 0..steps {
        let (k1t, k1n) = circle_rhs(&th, &nu, kappa, weight);
        let (k2t, k2n) = circle_rhs(&axpy(&th, &k1t, 0.5 * dt), &axpy(&nu, &k1n, 0.5 * dt), kappa, weight);
        let (k3t, k3n) = circle_rhs(&axpy(&th, &k2t, 0.5 * dt), &axpy(&nu, &k2n, 0.5 * dt), kappa, weight);
        let (k4t, k4n) = circle_rhs(&axpy(&th, &k3t, dt), &axpy(&nu, &k3n, dt), kappa, weight);
        for i in 0..th.len() {
            th[i] += (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]) * dt / 6.0;
            nu[i] += (k1n[i] + 2.0 * k2n[i] + 2.0 * k3n[i] + k4n[i]) * dt / 6.0;
        }
        out.thetas.push(th.clone());
        out.nus.push(nu.clone());
    }
    Ok(out)
}
