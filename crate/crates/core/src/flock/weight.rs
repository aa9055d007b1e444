use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Communication weight as a function of geodesic distance `d ∈ [0, π]`.
///
/// Weights that vanish at `d = π` may be used with arbitrary initial data: a
/// pair at the cut locus simply does not interact. A weight that does not
/// vanish there relies on the particles staying apart from antipodal
/// configurations, which the dynamics check at run time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFn {
    /// `sin d`
    SinDist,
    /// `cos(d/2)`
    #[default]
    CosHalfDist,
    /// `cos d + 1`
    CosDistPlusOne,
    /// `c`, constant in `d`.
    Constant { c: f64 },
    /// Piecewise-linear interpolation of samples taken at equally spaced
    /// distances `0, π/(m−1), …, π`.
    Tabulated { samples: Vec<f64> },
}

impl WeightFn {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFn::Constant { c } if !(c.is_finite() && *c >= 0.0) => {
                Err(Error::InvalidArgument(format!("constant weight {c} must be finite and nonnegative")))
            }
            WeightFn::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidArgument("tabulated weight needs at least two samples".into()));
                }
                if let Some(bad) = samples.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
                    return Err(Error::InvalidArgument(format!(
                        "tabulated weight sample {bad} must be finite and nonnegative"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `φ(d)`, with `d` clamped to `[0, π]`.
    pub fn eval(&self, d: f64) -> f64 {
        let d = d.clamp(0.0, PI);
        match self {
            WeightFn::SinDist => d.sin().max(0.0),
            WeightFn::CosHalfDist => (0.5 * d).cos().max(0.0),
            WeightFn::CosDistPlusOne => d.cos() + 1.0,
            WeightFn::Constant { c } => *c,
            WeightFn::Tabulated { samples } => {
                let m = samples.len() - 1;
                let pos = d / PI * m as f64;
                let j = (pos.floor() as usize).min(m - 1);
                let frac = pos - j as f64;
                samples[j] * (1.0 - frac) + samples[j + 1] * frac
            }
        }
    }

    /// Whether the weight is zero at distance π, so that cut-locus pairs drop
    /// out of the interaction.
    pub fn vanishes_at_cut_locus(&self) -> bool {
        match self {
            WeightFn::SinDist | WeightFn::CosHalfDist | WeightFn::CosDistPlusOne => true,
            WeightFn::Constant { .. } => false,
            WeightFn::Tabulated { samples } => samples.last() == Some(&0.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightFn::SinDist => "sin_dist",
            WeightFn::CosHalfDist => "cos_half_dist",
            WeightFn::CosDistPlusOne => "cos_dist_plus_one",
            WeightFn::Constant { .. } => "constant",
            WeightFn::Tabulated { .. } => "tabulated",
        }
    }
}
