use serde::{Deserialize, Serialize};

use super::{pair, Ensemble, Pair};
use crate::error::{Error, Result};

/// Scalar diagnostics of one ensemble state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFrame {
    pub t: f64,
    /// `Σ ‖a_i‖²`
    pub energy: f64,
    /// `dE/dt`, nonpositive.
    pub dissipation: f64,
    pub max_misalignment: f64,
    /// `‖a_i‖` per particle.
    pub speeds: Vec<f64>,
}

/// Total kinetic energy `Σ_i ‖a_i‖²`.
pub fn energy(e: &Ensemble) -> f64 {
    e.particles.iter().map(|p| p.a.norm_squared()).sum()
}

/// `dE/dt = −(κ/N) Σ_{i,k} φ_ik ‖P_{ki} a_k − a_i‖²`.
pub fn dissipation_rate(e: &Ensemble) -> Result<f64> {
    let n = e.len();
    let mut total = 0.0;
    for (i, pi) in e.particles.iter().enumerate() {
        for (k, pk) in e.particles.iter().enumerate() {
            if k == i {
                continue;
            }
            if let Pair::Interacting { weight, transported } =
                pair(&e.weight, i, k, pi.r.matrix(), pk.r.matrix(), &pk.a)?
            {
                total += weight * (transported - pi.a).norm_squared();
            }
        }
    }
    Ok(-e.kappa / n as f64 * total)
}

/// Largest pairwise misalignment `‖P_{ki} a_k − a_i‖` over ordered pairs.
/// Cut-locus pairs count as 0 under weights vanishing there and as `+∞`
/// otherwise.
pub fn max_misalignment(e: &Ensemble) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, pi) in e.particles.iter().enumerate() {
        for (k, pk) in e.particles.iter().enumerate() {
            if k == i {
                continue;
            }
            match pair(&e.weight, i, k, pi.r.matrix(), pk.r.matrix(), &pk.a) {
                Ok(Pair::Interacting { transported, .. }) => {
                    worst = worst.max((transported - pi.a).norm());
                }
                Ok(Pair::Silent) => {}
                Err(_) => return f64::INFINITY,
            }
        }
    }
    worst
}

/// All diagnostics of `e` at time `t`.
pub fn frame(e: &Ensemble, t: f64) -> Result<DiagnosticsFrame> {
    Ok(DiagnosticsFrame {
        t,
        energy: energy(e),
        dissipation: dissipation_rate(e)?,
        max_misalignment: max_misalignment(e),
        speeds: e.particles.iter().map(|p| p.a.norm()).collect(),
    })
}

/// Decision thresholds of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Final energy below which the run counts as decaying.
    pub tau_energy: f64,
    /// Final maximal misalignment below which velocities count as aligned.
    pub tau_align: f64,
    /// Relative energy variation allowed over the last 10% of frames.
    pub tau_settle: f64,
    /// Allowed `max_i |‖A_i‖²_F − 2E∞/N|` in a flocking state.
    pub speed_tol: f64,
    /// Fewest frames for a flocking verdict.
    pub min_frames: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { tau_energy: 1e-8, tau_align: 1e-6, tau_settle: 1e-6, speed_tol: 1e-6, min_frames: 10 }
    }
}

/// The asymptotic regime a run appears to have reached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Energy has decayed to zero.
    Decay,
    /// Velocities aligned at the settled positive energy `e_inf`.
    Flocking {
        e_inf: f64,
    },
    Undecided,
}

/// Equal-speed check of a flocking state: every `‖A_i‖²_F = 2‖a_i‖²`
/// approaches `2E∞/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedCheck {
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    /// Relative energy variation over the last 10% of frames, when computed.
    pub settle_change: Option<f64>,
    pub speed_check: Option<SpeedCheck>,
}

/// Classifies a time-ordered diagnostics history as decay, flocking or undecided.
pub fn classify(history: &[DiagnosticsFrame], thresholds: &Thresholds) -> Result<DichotomyVerdict> {
    let last = history.last().ok_or(Error::EmptyHistory)?;
    let mut out = DichotomyVerdict {
        verdict: Verdict::Undecided,
        thresholds: *thresholds,
        settle_change: None,
        speed_check: None,
    };
    if last.energy < thresholds.tau_energy {
        out.verdict = Verdict::Decay;
        return Ok(out);
    }
    if history.len() < thresholds.min_frames.max(2) {
        return Ok(out);
    }
    let start = (history.len() * 9 / 10).min(history.len() - 2);
    let (lo, hi) = history[start..]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f.energy), hi.max(f.energy)));
    let change = (hi - lo) / last.energy;
    out.settle_change = Some(change);
    if last.max_misalignment < thresholds.tau_align && change < thresholds.tau_settle {
        let e_inf = last.energy;
        let target = 2.0 * e_inf / last.speeds.len() as f64;
        let max_deviation = last.speeds.iter().map(|s| (2.0 * s * s - target).abs()).fold(0.0, f64::max);
        out.verdict = Verdict::Flocking { e_inf };
        out.speed_check = Some(SpeedCheck { max_deviation, passed: max_deviation < thresholds.speed_tol });
    }
    Ok(out)
}
