//! Differential test of the circle reduction: for rotations about a common
//! axis with velocities along it, the SO(3) dynamics must stay in that
//! subgroup and agree with the Cucker-Smale model on the circle.

use std::f64::consts::{PI, TAU};
use std::fmt;

use so3flock::flock::{circle_cs_reference, Ensemble, Exec};

use crate::config::{InitSpec, SimConfig};
use crate::error::{Result, SimError};
use crate::init::init_ensemble;

/// Largest deviations observed over every step of a reduction run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionReport {
    pub steps: usize,
    /// Largest entry outside the z-rotation block, including `|R₃₃ − 1|`
    /// and the x, y velocity components.
    pub off_subgroup: f64,
    /// Largest angle difference to the circle model, modulo 2π.
    pub angle_error: f64,
    pub speed_error: f64,
}

impl ReductionReport {
    pub fn passed(&self, subgroup_tol: f64, match_tol: f64) -> bool {
        self.off_subgroup < subgroup_tol && self.angle_error <= match_tol && self.speed_error <= match_tol
    }
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "steps {}  off-subgroup {:.3e}  angle error {:.3e}  speed error {:.3e}",
            self.steps, self.off_subgroup, self.angle_error, self.speed_error
        )
    }
}

fn angle_gap(x: f64, y: f64) -> f64 {
    ((x - y + PI).rem_euclid(TAU) - PI).abs()
}

fn off_subgroup(e: &Ensemble) -> f64 {
    e.particles()
        .iter()
        .map(|p| {
            let m = p.r.matrix();
            [m[(0, 2)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)] - 1.0, p.a.x, p.a.y]
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

/// Integrates the circle-ansatz configuration `cfg` on SO(3) with its
/// integrator and compares every step against the circle model integrated
/// with the same step size.
pub fn reduce_circle(cfg: &SimConfig, exec: &Exec) -> Result<ReductionReport> {
    let InitSpec::Circle { thetas, nus } = &cfg.init else {
        return Err(SimError::Config("circle reduction needs circle initial data".into()));
    };
    let steps = cfg.steps();
    let reference = circle_cs_reference(thetas, nus, cfg.kappa, &cfg.weight, cfg.dt, steps)
        .map_err(|e| SimError::Config(e.to_string()))?;
    let mut state = init_ensemble(cfg)?;
    let mut report = ReductionReport { steps, off_subgroup: 0.0, angle_error: 0.0, speed_error: 0.0 };
    for k in 0..=steps {
        if k > 0 {
            state = cfg
                .integrator
                .step(&state, cfg.dt, exec)
                .map_err(|source| SimError::Runtime { t: (k - 1) as f64 * cfg.dt, source })?;
        }
        report.off_subgroup = report.off_subgroup.max(off_subgroup(&state));
        for (i, p) in state.particles().iter().enumerate() {
            let m = p.r.matrix();
            let angle = m[(1, 0)].atan2(m[(0, 0)]);
            report.angle_error = report.angle_error.max(angle_gap(angle, reference.thetas[k][i]));
            report.speed_error = report.speed_error.max((p.a.z - reference.nus[k][i]).abs());
        }
    }
    Ok(report)
}
