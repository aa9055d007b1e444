//! The integration loop with frame capture.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use so3flock::flock::{classify, frame, DiagnosticsFrame, DichotomyVerdict, Ensemble, Exec};
use so3flock::so3::{log_so3, Vec3};

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::init::init_ensemble;

/// Snapshot of an ensemble at one recorded time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub diagnostics: DiagnosticsFrame,
    /// `θ_i n_i = vee(log R_i)`, a point of the closed ball of radius π.
    pub ball: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    /// `max_i ‖R_iᵀR_i − I‖_F`
    pub max_orthogonality_error: f64,
}

impl FrameRecord {
    pub fn capture(e: &Ensemble, t: f64) -> so3flock::Result<Self> {
        Ok(FrameRecord {
            diagnostics: frame(e, t)?,
            ball: e.particles().iter().map(|p| log_so3(&p.r).to_vector()).collect(),
            velocities: e.particles().iter().map(|p| p.a).collect(),
            max_orthogonality_error: e.particles().iter().map(|p| p.r.orthogonality_error()).fold(0.0, f64::max),
        })
    }

    pub fn t(&self) -> f64 {
        self.diagnostics.t
    }
}

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub frames: Vec<FrameRecord>,
    pub verdict: DichotomyVerdict,
    pub final_state: Ensemble,
    pub steps: usize,
    pub wall_time_s: f64,
}

/// Initializes from `cfg` and integrates to `t_end`.
pub fn run(cfg: &SimConfig, exec: &Exec) -> Result<RunOutput> {
    let start = init_ensemble(cfg)?;
    run_from(cfg, start, exec)
}

/// Integrates `start` with the stepping parameters of `cfg`. Frames are
/// recorded at step 0, every `frame_stride` steps and at the final step;
/// step `k` sits at time `k · dt`.
pub fn run_from(cfg: &SimConfig, start: Ensemble, exec: &Exec) -> Result<RunOutput> {
    cfg.validate()?;
    let clock = Instant::now();
    let steps = cfg.steps();
    let capture = |e: &Ensemble, k: usize| {
        let t = k as f64 * cfg.dt;
        FrameRecord::capture(e, t).map_err(|source| SimError::Runtime { t, source })
    };
    let mut frames = Vec::with_capacity(steps / cfg.frame_stride + 2);
    let mut state = start;
    frames.push(capture(&state, 0)?);
    for k in 1..=steps {
        state = cfg
            .integrator
            .step(&state, cfg.dt, exec)
            .map_err(|source| SimError::Runtime { t: (k - 1) as f64 * cfg.dt, source })?;
        if k % cfg.frame_stride == 0 || k == steps {
            frames.push(capture(&state, k)?);
        }
    }
    let history: Vec<DiagnosticsFrame> = frames.iter().map(|f| f.diagnostics.clone()).collect();
    let verdict = classify(&history, &cfg.thresholds).expect("history holds at least the initial frame");
    Ok(RunOutput { frames, verdict, final_state: state, steps, wall_time_s: clock.elapsed().as_secs_f64() })
}
