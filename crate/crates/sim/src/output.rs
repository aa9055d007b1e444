//! Result files: `frames.csv`, `energy.dat` and `summary.json`.
//!
//! `frames.csv` has one header row and one row per recorded frame. For `N`
//! particles the columns are
//!
//! ```text
//! t, b0_x, b0_y, b0_z, …, b{N−1}_z, a0_x, a0_y, a0_z, …, a{N−1}_z,
//! energy, dissipation, max_misalignment[, wrap]
//! ```
//!
//! where `b_i = vee(log R_i)` are ball coordinates and `a_i` body angular
//! velocities. Reals are written in scientific notation with 17 significant
//! digits, enough to parse back to the identical `f64`. The optional `wrap`
//! column is `1` when some particle's ball coordinates moved by more than π/2
//! since the previous frame, which marks passage through the antipodal
//! identification of the ball surface, and `0` otherwise.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use so3flock::flock::DichotomyVerdict;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::run::{FrameRecord, RunOutput};

/// Version tag stored in every summary.
pub const SUMMARY_SCHEMA: &str = "so3-flock/1";

/// Ball-coordinate displacement above which consecutive frames are flagged.
pub const WRAP_JUMP: f64 = std::f64::consts::FRAC_PI_2;

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io { path: path.to_path_buf(), source }
}

/// Column names of `frames.csv` for `n` particles.
pub fn csv_header(n: usize, wrap_column: bool) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for prefix in ["b", "a"] {
        for i in 0..n {
            for axis in ["x", "y", "z"] {
                cols.push(format!("{prefix}{i}_{axis}"));
            }
        }
    }
    cols.extend(["energy", "dissipation", "max_misalignment"].map(String::from));
    if wrap_column {
        cols.push("wrap".into());
    }
    cols
}

/// Whether some particle jumped by more than [`WRAP_JUMP`] between frames.
pub fn wrapped(prev: &FrameRecord, cur: &FrameRecord) -> bool {
    prev.ball.iter().zip(&cur.ball).any(|(p, c)| (c - p).norm() > WRAP_JUMP)
}

/// Writes `frames` in the column layout of the module docs. The particle
/// count is taken from the first frame; an empty list yields a header naming
/// only the scalar columns.
pub fn write_frames_csv(frames: &[FrameRecord], path: &Path, wrap_column: bool) -> Result<()> {
    let csv_err = |source| SimError::Csv { path: path.to_path_buf(), source };
    let n = frames.first().map_or(0, |f| f.ball.len());
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(csv_header(n, wrap_column)).map_err(csv_err)?;
    for (j, f) in frames.iter().enumerate() {
        if f.ball.len() != n {
            return Err(SimError::Config(format!("frame {j} has {} particles, expected {n}", f.ball.len())));
        }
        let mut row = vec![format_real(f.t())];
        for v in f.ball.iter().chain(&f.velocities) {
            row.extend(v.iter().map(|c| format_real(*c)));
        }
        let d = &f.diagnostics;
        row.extend([d.energy, d.dissipation, d.max_misalignment].map(format_real));
        if wrap_column {
            let flag = j > 0 && wrapped(&frames[j - 1], f);
            row.push(if flag { "1" } else { "0" }.into());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Two whitespace-separated columns `t E` after a `#` comment line.
pub fn write_energy_dat(frames: &[FrameRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# t energy").map_err(io_err(path))?;
    for f in frames {
        writeln!(w, "{} {}", format_real(f.t()), format_real(f.diagnostics.energy)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub config: SimConfig,
    #[serde(flatten)]
    pub classification: DichotomyVerdict,
    pub steps: usize,
    pub frames: usize,
    pub final_time: f64,
    pub final_energy: f64,
    pub final_dissipation: f64,
    pub final_max_misalignment: f64,
    /// `‖a_i‖` per particle at the final frame.
    pub final_speeds: Vec<f64>,
    /// `‖â_i‖²_F = 2‖a_i‖²` per particle at the final frame.
    pub final_frobenius_sq: Vec<f64>,
    /// Largest `‖RᵀR − I‖_F` over all recorded frames.
    pub max_orthogonality_error: f64,
    pub wall_time_s: f64,
}

impl Summary {
    pub fn new(cfg: &SimConfig, out: &RunOutput) -> Self {
        let last = out.frames.last().expect("a run records at least one frame");
        let d = &last.diagnostics;
        Summary {
            schema: SUMMARY_SCHEMA.into(),
            config: cfg.clone(),
            classification: out.verdict.clone(),
            steps: out.steps,
            frames: out.frames.len(),
            final_time: d.t,
            final_energy: d.energy,
            final_dissipation: d.dissipation,
            final_max_misalignment: d.max_misalignment,
            final_speeds: d.speeds.clone(),
            final_frobenius_sq: d.speeds.iter().map(|s| 2.0 * s * s).collect(),
            max_orthogonality_error: out.frames.iter().map(|f| f.max_orthogonality_error).fold(0.0, f64::max),
            wall_time_s: out.wall_time_s,
        }
    }
}

pub fn write_summary_json(summary: &Summary, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, summary)
        .map_err(|source| SimError::Json { path: path.to_path_buf(), source })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Writes every file enabled in `cfg.output` and returns their paths.
pub fn write_all(cfg: &SimConfig, out: &RunOutput) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output.out_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    if cfg.output.write_frames {
        let path = dir.join("frames.csv");
        write_frames_csv(&out.frames, &path, cfg.output.wrap_column)?;
        written.push(path);
    }
    if cfg.output.write_energy {
        let path = dir.join("energy.dat");
        write_energy_dat(&out.frames, &path)?;
        written.push(path);
    }
    if cfg.output.write_summary {
        let path = dir.join("summary.json");
        write_summary_json(&Summary::new(cfg, out), &path)?;
        written.push(path);
    }
    Ok(written)
}
