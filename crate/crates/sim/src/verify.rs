//! Conformance suites comparing the closed-form geometry against independent
//! oracles, plus a short dynamical smoke run.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use so3flock::charts::{
    christoffel, christoffel_finite_difference, coords_to_body, metric, metric_from_basis, metric_inverse, ChartPoint,
    ChristoffelTensor,
};
use so3flock::flock::Exec;
use so3flock::so3::{basis, exp_so3, frobenius_inner, hat, hat_matrix, Mat3, Rotation, Vec3};
use so3flock::transport::{transport_ambient, transport_sandwich, transport_vec};

use crate::config::SimConfig;
use crate::init::Uniform01;
use crate::run::run;

/// How many random cases each suite draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    /// Reduced case counts, a few seconds in total.
    Fast,
    /// Case counts and tolerances of the acceptance criteria.
    Full,
}

/// Replaceable pieces of the geometry, so a deliberately broken variant can
/// be checked to fail.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub christoffel: fn(&ChartPoint) -> ChristoffelTensor,
}

impl Default for Hooks {
    fn default() -> Self {
        Hooks { christoffel }
    }
}

/// Worst error of one quantity over all cases of a suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub what: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl Check {
    fn new(what: &'static str, tolerance: f64) -> Self {
        Check { what, max_error: 0.0, tolerance, cases: 0 }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        // NaN must fail the check
        if err.is_nan() || err > self.max_error {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
        }
    }

    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "[{status}] {} ({:.2} s)", self.name, self.elapsed_s)?;
        for c in &self.checks {
            let mark = if c.passed() { "ok" } else { "FAILED" };
            writeln!(
                f,
                "    {:<40} max error {:.3e}  tolerance {:.1e}  cases {:>5}  {mark}",
                c.what, c.max_error, c.tolerance, c.cases
            )?;
        }
        Ok(())
    }
}

fn timed(name: &'static str, body: impl FnOnce() -> Vec<Check>) -> SuiteReport {
    let clock = Instant::now();
    let checks = body();
    SuiteReport { name, checks, elapsed_s: clock.elapsed().as_secs_f64() }
}

/// Random geometric inputs drawn from a seeded stream.
pub struct Sampler(Uniform01);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler(Uniform01::new(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.sample()
    }

    pub fn cube(&mut self, half: f64) -> Vec3 {
        Vec3::new(self.uniform(-half, half), self.uniform(-half, half), self.uniform(-half, half))
    }

    pub fn unit(&mut self) -> Vec3 {
        loop {
            let v = self.cube(1.0);
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v / n;
            }
        }
    }

    pub fn rotation(&mut self) -> Rotation {
        let axis = self.unit();
        exp_so3(&(axis * self.uniform(0.0, PI)))
    }
}

fn max_abs(m: &Mat3) -> f64 {
    m.amax()
}

/// `transport_vec`, `transport_sandwich` and `transport_ambient` agree.
pub fn transport_triple(cases: usize, seed: u64) -> Vec<Check> {
    let mut rng = Sampler::new(seed);
    let mut check = Check::new("pairwise deviation", 1e-11);
    for _ in 0..cases {
        let r0 = rng.rotation();
        let n = rng.unit();
        let theta = rng.uniform(0.0, PI - 1e-3);
        let a0 = rng.cube(1.0);
        let u = n * theta;
        let by_vec = transport_vec(&a0, theta, &n).expect("unit axis");
        let by_sandwich = transport_sandwich(&hat(&a0), &u).vector();
        let r1 = r0.compose(&exp_so3(&u));
        let by_ambient = match transport_ambient(&r0, &r1, &(r0.matrix() * hat_matrix(&a0))) {
            Ok(v1) => so3flock::so3::vee_unchecked(&(r1.matrix().transpose() * v1)),
            Err(_) => Vec3::repeat(f64::NAN),
        };
        check.record(
            (by_vec - by_sandwich).amax().max((by_vec - by_ambient).amax()).max((by_sandwich - by_ambient).amax()),
        );
    }
    vec![check]
}

/// Closed-form transport against RK4 integration of the transport equations
/// in exponential coordinates.
pub fn transport_ode(cases: usize, steps: usize, seed: u64) -> Vec<Check> {
    let mut rng = Sampler::new(seed);
    let mut check = Check::new("closed form vs ODE", 1e-8);
    for _ in 0..cases {
        let r0 = rng.rotation();
        let n = rng.unit();
        let theta = rng.uniform(0.0, PI - 0.1);
        let a0 = rng.cube(1.0);
        let u = n * theta;
        let err = so3flock::charts::transport_ode_solve(&u, &a0, steps)
            .and_then(|v1| ChartPoint::new(r0, u).map(|p| coords_to_body(&p, &v1)))
            .map(|body| (body - transport_vec(&a0, theta, &n).expect("unit axis")).amax())
            .unwrap_or(f64::INFINITY);
        check.record(err);
    }
    vec![check]
}

/// Norm and axial component are preserved, and `C û² + û² A₀ û = 0` with
/// `C = u·a₀`.
pub fn conservation(cases: usize, seed: u64) -> Vec<Check> {
    let mut rng = Sampler::new(seed);
    let mut norm = Check::new("norm preservation", 1e-12);
    let mut axial = Check::new("axial component", 1e-12);
    let mut identity = Check::new("C u^2 + u^2 A0 u = 0", 1e-12);
    for _ in 0..cases {
        let n = rng.unit();
        let theta = rng.uniform(0.0, PI - 1e-3);
        let a0 = rng.cube(1.0);
        let a1 = transport_vec(&a0, theta, &n).expect("unit axis");
        norm.record((a1.norm() - a0.norm()).abs());
        axial.record((n.dot(&a1) - n.dot(&a0)).abs());
        let u = n * theta;
        let uh = hat_matrix(&u);
        let u2 = uh * uh;
        identity.record(max_abs(&(u2 * u.dot(&a0) + u2 * hat_matrix(&a0) * uh)));
    }
    vec![norm, axial, identity]
}

/// Metric, inverse metric, Christoffel symbols and straight-line geodesics of
/// the exponential chart.
pub fn chart_conformance(cases: usize, seed: u64, hooks: &Hooks) -> Vec<Check> {
    let mut rng = Sampler::new(seed);
    let mut from_basis = Check::new("metric vs tangent basis", 1e-10);
    let mut inverse = Check::new("g g^-1 = I", 1e-12);
    let mut gamma = Check::new("Christoffel vs finite differences", 1e-6);
    let mut geodesic = Check::new("geodesic residual", 1e-11);
    for _ in 0..cases {
        let base = rng.rotation();
        let x = rng.unit() * rng.uniform(0.1, 3.0);
        let p = ChartPoint::new(base, x).expect("inside the chart");
        from_basis.record(max_abs(&(metric(&p).matrix() - metric_from_basis(&p).matrix())));
        inverse.record(max_abs(&(metric(&p).matrix() * metric_inverse(&p).matrix() - Mat3::identity())));
        let fd = christoffel_finite_difference(&p, 1e-5).expect("steps stay inside the chart");
        gamma.record((hooks.christoffel)(&p).max_diff(&fd));
        // straight line s ↦ s x through the chart center
        let s = rng.uniform(0.05, 1.0);
        let on_line = ChartPoint::new(base, x * s).expect("inside the chart");
        geodesic.record((hooks.christoffel)(&on_line).contract(&x, &x).amax());
    }
    vec![from_basis, inverse, gamma, geodesic]
}

fn anticommutator(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b + b * a
}

/// Algebraic identities of the hat map and its square.
pub fn hat_identities(cases: usize, seed: u64) -> Vec<Check> {
    let mut rng = Sampler::new(seed);
    let e = basis();
    let mut derivatives = Check::new("derivatives of x^ and x^2", 1e-12);
    let mut cubic = Check::new("x^3 = -t^2 x^, x_a x^2 + x^2 E_a x^ = 0", 1e-12);
    let mut frob_linear = Check::new("Frobenius products of E_a, x^", 1e-12);
    let mut frob_quadratic = Check::new("Frobenius products of x^2", 1e-12);
    let mut algebra = Check::new("trace, commutator, x^ y^ x^", 1e-12);
    for _ in 0..cases {
        let x = rng.unit() * rng.uniform(0.0, PI);
        let y = rng.unit() * rng.uniform(0.0, PI);
        let xh = hat_matrix(&x);
        let yh = hat_matrix(&y);
        let x2 = xh * xh;
        let th2 = x.norm_squared();
        for a in 0..3 {
            // x^ is linear and x^2 quadratic in x, so unit-step central
            // differences are exact up to rounding
            let mut step = Vec3::zeros();
            step[a] = 1.0;
            let (hp, hm) = (hat_matrix(&(x + step)), hat_matrix(&(x - step)));
            derivatives.record(max_abs(&((hp - hm) / 2.0 - e[a])));
            derivatives.record(max_abs(&((hp * hp - hm * hm) / 2.0 - anticommutator(&e[a], &xh))));
            cubic.record(max_abs(&(x2 * x[a] + x2 * e[a] * xh)));
            frob_linear.record((frobenius_inner(&xh, &e[a]) - 2.0 * x[a]).abs());
            frob_quadratic.record((frobenius_inner(&x2, &anticommutator(&e[a], &xh)) - 4.0 * x[a] * th2).abs());
            for b in 0..3 {
                let delta = if a == b { 1.0 } else { 0.0 };
                frob_linear.record((frobenius_inner(&e[a], &e[b]) - 2.0 * delta).abs());
                let lhs = frobenius_inner(&anticommutator(&e[a], &xh), &anticommutator(&e[b], &xh));
                frob_quadratic.record((lhs - (6.0 * x[a] * x[b] + 2.0 * delta * th2)).abs());
            }
        }
        cubic.record(max_abs(&(x2 * xh + xh * th2)));
        frob_linear.record((frobenius_inner(&xh, &xh) - 2.0 * th2).abs());
        frob_quadratic.record((frobenius_inner(&x2, &x2) - 2.0 * th2 * th2).abs());
        algebra.record(((xh * yh).trace() + 2.0 * x.dot(&y)).abs());
        algebra.record(max_abs(&(xh * yh - yh * xh - hat_matrix(&x.cross(&y)))));
        algebra.record(max_abs(&(xh * yh * xh + xh * x.dot(&y))));
    }
    vec![derivatives, cubic, frob_linear, frob_quadratic, algebra]
}

/// Largest frame-to-frame energy increase over seeded runs of the default
/// ten-particle configuration.
pub fn energy_monotonicity(seeds: std::ops::Range<u64>, t_end: f64) -> Vec<Check> {
    let mut rise = Check::new("energy increase between frames", 1e-10);
    let mut manifold = Check::new("orthogonality error", 1e-9);
    for seed in seeds {
        let cfg = SimConfig { seed, t_end, frame_stride: 1, ..SimConfig::default() };
        match run(&cfg, &Exec::Serial) {
            Ok(out) => {
                let worst = out
                    .frames
                    .windows(2)
                    .map(|w| w[1].diagnostics.energy - w[0].diagnostics.energy)
                    .fold(0.0, f64::max);
                rise.record(worst);
                manifold.record(out.frames.iter().map(|f| f.max_orthogonality_error).fold(0.0, f64::max));
            }
            Err(_) => rise.record(f64::INFINITY),
        }
    }
    vec![rise, manifold]
}

/// Runs every suite at `level`.
pub fn verify_with(level: Level, hooks: &Hooks) -> Vec<SuiteReport> {
    let full = level == Level::Full;
    let pick = |fast: usize, full_count: usize| if full { full_count } else { fast };
    vec![
        timed("transport triple agreement", || transport_triple(pick(200, 1000), 11)),
        timed("transport vs ODE oracle", || transport_ode(pick(20, 500), 10_000, 12)),
        timed("transport conservation", || conservation(pick(200, 1000), 13)),
        timed("chart conformance", || chart_conformance(pick(30, 100), 14, hooks)),
        timed("hat-map identities", || hat_identities(pick(200, 1000), 15)),
        timed("energy monotonicity", || {
            if full {
                energy_monotonicity(0..20, 100.0)
            } else {
                energy_monotonicity(0..1, 5.0)
            }
        }),
    ]
}

pub fn verify(level: Level) -> Vec<SuiteReport> {
    verify_with(level, &Hooks::default())
}
