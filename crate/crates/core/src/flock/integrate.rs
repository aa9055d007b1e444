use serde::{Deserialize, Serialize};

use super::{rhs_raw, Ensemble, Exec, Particle, WeightFn};
use crate::coeffs::dexp_inv_quadratic;
use crate::error::{Error, Result};
use crate::so3::{exp_matrix, project_to_so3, Mat3, Rotation, Vec3};

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Classical RK4 on the ambient 12N-dimensional state, followed by polar
    /// projection of every rotation.
    #[default]
    Rk4Ambient,
    /// Runge-Kutta-Munthe-Kaas RK4: rotations advance by right
    /// multiplication with exponentials, so they never leave SO(3).
    Lie,
}

impl Integrator {
    pub fn step(&self, e: &Ensemble, dt: f64, exec: &Exec) -> Result<Ensemble> {
        match self {
            Integrator::Rk4Ambient => step_rk4(e, dt, exec),
            Integrator::Lie => step_lie(e, dt, exec),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Integrator::Rk4Ambient => "rk4_ambient",
            Integrator::Lie => "lie",
        }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive and finite")));
    }
    Ok(())
}

fn axpy_state(r: &[Mat3], a: &[Vec3], dr: &[Mat3], da: &[Vec3], h: f64) -> (Vec<Mat3>, Vec<Vec3>) {
    (r.iter().zip(dr).map(|(x, d)| x + d * h).collect(), a.iter().zip(da).map(|(x, d)| x + d * h).collect())
}

// One classical RK4 step of signed size `dt` without reprojection.
fn rk4_raw(
    weight: &WeightFn,
    kappa: f64,
    r: &[Mat3],
    a: &[Vec3],
    dt: f64,
    exec: &Exec,
) -> Result<(Vec<Mat3>, Vec<Vec3>)> {
    let (k1r, k1a) = rhs_raw(weight, kappa, r, a, exec)?;
    let (r2, a2) = axpy_state(r, a, &k1r, &k1a, 0.5 * dt);
    let (k2r, k2a) = rhs_raw(weight, kappa, &r2, &a2, exec)?;
    let (r3, a3) = axpy_state(r, a, &k2r, &k2a, 0.5 * dt);
    let (k3r, k3a) = rhs_raw(weight, kappa, &r3, &a3, exec)?;
    let (r4, a4) = axpy_state(r, a, &k3r, &k3a, dt);
    let (k4r, k4a) = rhs_raw(weight, kappa, &r4, &a4, exec)?;
    let h6 = dt / 6.0;
    let r_new = (0..r.len()).map(|i| r[i] + (k1r[i] + k2r[i] * 2.0 + k3r[i] * 2.0 + k4r[i]) * h6).collect();
    let a_new = (0..a.len()).map(|i| a[i] + (k1a[i] + k2a[i] * 2.0 + k3a[i] * 2.0 + k4a[i]) * h6).collect();
    Ok((r_new, a_new))
}

fn rebuild(e: &Ensemble, r: Vec<Mat3>, a: Vec<Vec3>) -> Result<Ensemble> {
    let particles =
        r.iter().zip(a).map(|(m, a)| Ok(Particle::new(project_to_so3(m)?, a))).collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { particles, kappa: e.kappa, weight: e.weight.clone() })
}

/// One step of ambient RK4 followed by polar projection of every rotation.
pub fn step_rk4(e: &Ensemble, dt: f64, exec: &Exec) -> Result<Ensemble> {
    check_dt(dt)?;
    signed_step(e, dt, exec)
}

fn signed_step(e: &Ensemble, dt: f64, exec: &Exec) -> Result<Ensemble> {
    let (r, a) = e.state();
    let (r, a) = rk4_raw(&e.weight, e.kappa, &r, &a, dt, exec)?;
    rebuild(e, r, a)
}

/// Flow of the ensemble over a signed `duration` using `steps` ambient RK4
/// steps. Negative durations integrate backwards in time.
pub fn evolve(e: &Ensemble, duration: f64, steps: usize, exec: &Exec) -> Result<Ensemble> {
    if steps == 0 || !duration.is_finite() {
        return Err(Error::InvalidArgument(format!("cannot evolve over {duration} in {steps} steps")));
    }
    let h = duration / steps as f64;
    let mut cur = e.clone();
    for _ in 0..steps {
        cur = signed_step(&cur, h, exec)?;
    }
    Ok(cur)
}

/// `σ̇` for `R = R₀ exp(σ̂)` with body velocity `a`, i.e. `dexp⁻¹_{−σ}(a) =
/// a + ½ σ×a + c(‖σ‖) σ×(σ×a)`.
fn dexp_inv(sigma: &Vec3, a: &Vec3) -> Vec3 {
    let sa = sigma.cross(a);
    a + sa * 0.5 + sigma.cross(&sa) * dexp_inv_quadratic(sigma.norm())
}

/// One Runge-Kutta-Munthe-Kaas step of order four. Rotations are updated as
/// `R_i ← R_i exp(σ̂_i)`, which is exact for free geodesic motion.
pub fn step_lie(e: &Ensemble, dt: f64, exec: &Exec) -> Result<Ensemble> {
    check_dt(dt)?;
    let (r0, a0) = e.state();
    let n = r0.len();
    let zeros = vec![Vec3::zeros(); n];

    // Stage derivatives of (σ, a) evaluated at σ-offsets and velocities.
    let stage = |sigma: &[Vec3], a: &[Vec3]| -> Result<(Vec<Vec3>, Vec<Vec3>)> {
        let r: Vec<Mat3> = r0.iter().zip(sigma).map(|(m, s)| m * exp_matrix(s)).collect();
        let (_, da) = rhs_raw(&e.weight, e.kappa, &r, a, exec)?;
        let ds = sigma.iter().zip(a).map(|(s, v)| dexp_inv(s, v)).collect();
        Ok((ds, da))
    };
    let shift =
        |base: &[Vec3], d: &[Vec3], h: f64| -> Vec<Vec3> { base.iter().zip(d).map(|(x, y)| x + y * h).collect() };

    let (k1s, k1a) = stage(&zeros, &a0)?;
    let (k2s, k2a) = stage(&shift(&zeros, &k1s, 0.5 * dt), &shift(&a0, &k1a, 0.5 * dt))?;
    let (k3s, k3a) = stage(&shift(&zeros, &k2s, 0.5 * dt), &shift(&a0, &k2a, 0.5 * dt))?;
    let (k4s, k4a) = stage(&shift(&zeros, &k3s, dt), &shift(&a0, &k3a, dt))?;
    let h6 = dt / 6.0;
    let particles = (0..n)
        .map(|i| {
            let sigma = (k1s[i] + k2s[i] * 2.0 + k3s[i] * 2.0 + k4s[i]) * h6;
            let a = a0[i] + (k1a[i] + k2a[i] * 2.0 + k3a[i] * 2.0 + k4a[i]) * h6;
            Particle::new(Rotation::new_unchecked(r0[i] * exp_matrix(&sigma)), a)
        })
        .collect();
    Ok(Ensemble { particles, kappa: e.kappa, weight: e.weight.clone() })
}

#[cfg(test)]
mod tests {
    use super::super::tests::sample_ensemble;
    use super::*;
    use crate::flock::energy;
    use crate::so3::exp_so3;

    fn free_particle() -> (Ensemble, Rotation, Vec3) {
        let r0 = exp_so3(&Vec3::new(0.4, -0.7, 0.2));
        let a0 = Vec3::new(0.9, 0.3, -1.1);
        let e = Ensemble::new(vec![Particle::new(r0, a0)], 0.0, WeightFn::CosHalfDist).unwrap();
        (e, r0, a0)
    }

    #[test]
    fn rejects_bad_steps() {
        let (e, _, _) = free_particle();
        assert!(step_rk4(&e, 0.0, &Exec::Serial).is_err());
        assert!(step_lie(&e, -1e-3, &Exec::Serial).is_err());
        assert!(evolve(&e, 1.0, 0, &Exec::Serial).is_err());
    }

    #[test]
    fn free_motion_is_a_geodesic() {
        let (e, r0, a0) = free_particle();
        let mut rk = e.clone();
        let mut lie = e.clone();
        for _ in 0..1000 {
            rk = step_rk4(&rk, 1e-3, &Exec::Serial).unwrap();
            lie = step_lie(&lie, 1e-3, &Exec::Serial).unwrap();
        }
        let exact = r0.compose(&exp_so3(&a0));
        assert!((rk.particles()[0].r.matrix() - exact.matrix()).norm() <= 1e-10);
        assert!((lie.particles()[0].r.matrix() - exact.matrix()).norm() <= 1e-13);
    }

    #[test]
    fn lie_step_is_exact_per_step() {
        let (e, r0, a0) = free_particle();
        let one = step_lie(&e, 0.1, &Exec::Serial).unwrap();
        let exact = r0.compose(&exp_so3(&(a0 * 0.1)));
        assert!((one.particles()[0].r.matrix() - exact.matrix()).norm() <= 1e-14);
    }

    #[test]
    fn zero_velocity_is_a_fixed_point() {
        let e = sample_ensemble(5, 1.0, WeightFn::CosHalfDist);
        let still: Vec<Particle> = e.particles().iter().map(|p| Particle::new(p.r, Vec3::zeros())).collect();
        let e = e.with_particles(still).unwrap();
        for step in [step_rk4, step_lie] {
            let next = step(&e, 1e-2, &Exec::Serial).unwrap();
            for (p, q) in e.particles().iter().zip(next.particles()) {
                assert!((p.r.matrix() - q.r.matrix()).amax() <= 1e-15);
                assert_eq!(q.a, Vec3::zeros());
            }
        }
    }

    #[test]
    fn steppers_agree() {
        let mut rk = sample_ensemble(6, 1.0, WeightFn::CosHalfDist);
        let mut lie = rk.clone();
        for _ in 0..100 {
            rk = step_rk4(&rk, 1e-3, &Exec::Serial).unwrap();
            lie = step_lie(&lie, 1e-3, &Exec::Serial).unwrap();
        }
        for (p, q) in rk.particles().iter().zip(lie.particles()) {
            assert!((p.r.matrix() - q.r.matrix()).norm() <= 1e-9);
        }
    }

    #[test]
    fn energy_does_not_increase() {
        let mut e = sample_ensemble(8, 1.0, WeightFn::CosHalfDist);
        let mut prev = energy(&e);
        for _ in 0..300 {
            e = step_rk4(&e, 1e-2, &Exec::Serial).unwrap();
            let cur = energy(&e);
            assert!(cur <= prev + 1e-10);
            prev = cur;
        }
    }

    #[test]
    fn evolve_backwards_returns() {
        let e = sample_ensemble(4, 1.0, WeightFn::SinDist);
        let fwd = evolve(&e, 0.05, 50, &Exec::Serial).unwrap();
        let back = evolve(&fwd, -0.05, 50, &Exec::Serial).unwrap();
        for (p, q) in e.particles().iter().zip(back.particles()) {
            assert!((p.a - q.a).norm() < 1e-11);
            assert!((p.r.matrix() - q.r.matrix()).norm() < 1e-11);
        }
    }
}
