//! The Cucker-Smale particle system on SO(3).
//!
//! Each particle carries a rotation `R_i` and a body angular velocity `a_i`:
//!
//! ```text
//! dR_i/dt = R_i â_i
//! da_i/dt = (κ/N) Σ_{k≠i} φ(d(R_i, R_k)) [P_{ki} a_k − a_i]
//! ```
//!
//! where `P_{ki}` is parallel transport from `R_k` to `R_i` along the
//! minimizing geodesic.

mod circle;
mod diagnostics;
mod integrate;
mod weight;

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::{hat_matrix, relative_axis_angle, Mat3, Rotation, Vec3, CUT_LOCUS_EPS};
use crate::transport::transport_vec_unchecked;

pub use circle::{circle_cs_reference, make_circle_ensemble, CircleTrajectory};
pub use diagnostics::{
    classify, dissipation_rate, energy, frame, max_misalignment, DiagnosticsFrame, DichotomyVerdict, SpeedCheck,
    Thresholds, Verdict,
};
pub use integrate::{evolve, step_lie, step_rk4, Integrator};
pub use weight::WeightFn;

/// Relative angle below which two distinct particles are treated as coincident.
pub const COINCIDENT_EPS: f64 = 1e-12;

/// A rotation together with its body-frame angular velocity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub r: Rotation,
    pub a: Vec3,
}

impl Particle {
    pub fn new(r: Rotation, a: Vec3) -> Self {
        Particle { r, a }
    }
}

/// A full simulation state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    particles: Vec<Particle>,
    kappa: f64,
    weight: WeightFn,
}

impl Ensemble {
    pub fn new(particles: Vec<Particle>, kappa: f64, weight: WeightFn) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidArgument("an ensemble needs at least one particle".into()));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!("coupling strength {kappa} must be finite and nonnegative")));
        }
        weight.validate()?;
        Ok(Ensemble { particles, kappa, weight })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn weight(&self) -> &WeightFn {
        &self.weight
    }

    /// Same coupling, new particle states.
    pub fn with_particles(&self, particles: Vec<Particle>) -> Result<Self> {
        Ensemble::new(particles, self.kappa, self.weight.clone())
    }

    pub(crate) fn state(&self) -> (Vec<Mat3>, Vec<Vec3>) {
        self.particles.iter().map(|p| (*p.r.matrix(), p.a)).unzip()
    }
}

/// How the per-particle loop of the right-hand side is executed.
///
/// Every particle's sum is accumulated in the same order in either mode,
/// so results are bitwise identical.
#[derive(Clone, Debug, Default)]
pub enum Exec {
    #[default]
    Serial,
    Parallel(Arc<rayon::ThreadPool>),
}

impl Exec {
    /// `0` selects serial execution; otherwise a dedicated pool of `threads` workers.
    pub fn with_threads(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Ok(Exec::Serial);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
        Ok(Exec::Parallel(Arc::new(pool)))
    }

    fn map<T: Send>(&self, n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        match self {
            Exec::Serial => (0..n).map(f).collect(),
            Exec::Parallel(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        }
    }
}

/// Pair geometry seen from particle `i`: distance, weight and `P_{ki} a_k`.
pub(crate) enum Pair {
    Interacting {
        weight: f64,
        transported: Vec3,
    },
    /// At the cut locus under a weight vanishing there.
    Silent,
}

pub(crate) fn pair(weight: &WeightFn, i: usize, k: usize, r_i: &Mat3, r_k: &Mat3, a_k: &Vec3) -> Result<Pair> {
    let aa = relative_axis_angle(r_k, r_i);
    if aa.theta >= PI - CUT_LOCUS_EPS {
        if weight.vanishes_at_cut_locus() {
            return Ok(Pair::Silent);
        }
        return Err(Error::CutLocusViolation { i, k, distance: aa.theta });
    }
    let transported = if aa.theta < COINCIDENT_EPS { *a_k } else { transport_vec_unchecked(a_k, aa.theta, &aa.axis) };
    Ok(Pair::Interacting { weight: weight.eval(aa.theta), transported })
}

// Sum in a canonical order (by magnitude, ties by value) so the result does
// not depend on how the particles are labelled.
fn canonical_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(|x, y| x.abs().total_cmp(&y.abs()).then(x.total_cmp(y)));
    terms.iter().sum()
}

pub(crate) fn alignment_force(weight: &WeightFn, kappa: f64, i: usize, r: &[Mat3], a: &[Vec3]) -> Result<Vec3> {
    let n = r.len();
    if n == 1 || kappa == 0.0 {
        return Ok(Vec3::zeros());
    }
    let mut comps: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n - 1));
    for k in 0..n {
        if k == i {
            continue;
        }
        if let Pair::Interacting { weight: w, transported } = pair(weight, i, k, &r[i], &r[k], &a[k])? {
            let term = (transported - a[i]) * w;
            for (c, v) in comps.iter_mut().zip(term.iter()) {
                c.push(*v);
            }
        }
    }
    let scale = kappa / n as f64;
    Ok(Vec3::new(canonical_sum(&mut comps[0]), canonical_sum(&mut comps[1]), canonical_sum(&mut comps[2])) * scale)
}

/// Right-hand side on raw matrices. Rotations may be slightly off the group
/// at intermediate integrator stages.
pub(crate) fn rhs_raw(
    weight: &WeightFn,
    kappa: f64,
    r: &[Mat3],
    a: &[Vec3],
    exec: &Exec,
) -> Result<(Vec<Mat3>, Vec<Vec3>)> {
    let out = exec.map(r.len(), |i| alignment_force(weight, kappa, i, r, a).map(|da| (r[i] * hat_matrix(&a[i]), da)));
    let mut dr = Vec::with_capacity(r.len());
    let mut da = Vec::with_capacity(r.len());
    for item in out {
        let (x, y) = item?;
        dr.push(x);
        da.push(y);
    }
    Ok((dr, da))
}

/// Time derivatives `(dR_i/dt, da_i/dt)` for every particle.
pub fn rhs(e: &Ensemble, exec: &Exec) -> Result<Vec<(Mat3, Vec3)>> {
    let (r, a) = e.state();
    let (dr, da) = rhs_raw(&e.weight, e.kappa, &r, &a, exec)?;
    Ok(dr.into_iter().zip(da).collect())
}
