//! Seeded construction of initial ensembles.
//!
//! Random streams come from SplitMix64. With 64-bit wrapping arithmetic, each
//! draw first advances the state by `s ← s + 0x9E3779B97F4A7C15` and then
//! outputs
//!
//! ```text
//! z = s
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z = z ^ (z >> 31)
//! ```
//!
//! seeded with the configured `seed` as the initial state. An output `z`
//! becomes the open-interval uniform `u = ((z >> 12) + ½) · 2⁻⁵² ∈ (0, 1)`; every
//! such value is exactly representable, so `u` never rounds to 0 or 1.
//!
//! Particles are drawn in index order, each consuming six uniforms in the order
//! rotation angle, polar angle, azimuthal angle, `a_x`, `a_y`, `a_z`. The
//! rotation is `exp(θ v̂)` with `θ = (π/2) u₁` and
//! `v = (sin p cos q, sin p sin q, cos p)`, `p = π u₂`, `q = 2π u₃`; velocity
//! components are `2u − 1`. Axes drawn this way are not uniform on the sphere.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use so3flock::flock::{make_circle_ensemble, Ensemble, Particle};
use so3flock::so3::{exp_so3, Vec3};

use crate::config::{InitSpec, SimConfig};
use crate::error::{Result, SimError};

/// Uniform draws on `(0, 1)` from a SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct Uniform01(SplitMix64);

impl Uniform01 {
    pub fn new(seed: u64) -> Self {
        Uniform01(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn sample(&mut self) -> f64 {
        ((self.0.next_u64() >> 12) as f64 + 0.5) * f64::EPSILON
    }
}

/// Builds the initial ensemble described by `cfg`.
pub fn init_ensemble(cfg: &SimConfig) -> Result<Ensemble> {
    cfg.validate()?;
    let ensemble = match &cfg.init {
        InitSpec::Random => {
            let mut rng = Uniform01::new(cfg.seed);
            let particles = (0..cfg.n_particles)
                .map(|_| {
                    let angle = FRAC_PI_2 * rng.sample();
                    let polar = PI * rng.sample();
                    let azimuth = TAU * rng.sample();
                    let axis = Vec3::new(polar.sin() * azimuth.cos(), polar.sin() * azimuth.sin(), polar.cos());
                    let a = Vec3::new(2.0 * rng.sample() - 1.0, 2.0 * rng.sample() - 1.0, 2.0 * rng.sample() - 1.0);
                    Particle::new(exp_so3(&(axis * angle)), a)
                })
                .collect();
            Ensemble::new(particles, cfg.kappa, cfg.weight.clone())
        }
        InitSpec::Circle { thetas, nus } => make_circle_ensemble(thetas, nus, cfg.kappa, cfg.weight.clone()),
    };
    ensemble.map_err(|e| SimError::Config(e.to_string()))
}
